//! Knot-table ingestion, the per-diagram analysis pipeline, and result files.
//!
//! Tables are plain text, one `name<TAB>code` per line; `#` starts a comment.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::time::{Duration, Instant};

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::coloring::{wirtinger_number_until, ColoringSequence, SearchError};
use crate::gauss::{parse_gauss_code, GaussDiagram};
use crate::group::{ideal_lower_bound_until, GroupError, IdealCertificate, DEFAULT_PRIME_BOUND};
use crate::parity::parity_projection;
use crate::quandle::{count_colorings, FiniteQuandle};
use crate::welded::{replay_certificate, welded_unknot_certificate, UnknottingCertificate};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableEntry {
    pub name: String,
    pub code: String,
}

/// A malformed table line. Line numbers start at 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineDiagnostic {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for LineDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Debug, Error)]
pub enum BatchError {
    #[error("{path}: file not found")]
    FileNotFound { path: String },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Parses table text. Bad lines are reported and skipped.
pub fn parse_table(text: &str) -> (Vec<TableEntry>, Vec<LineDiagnostic>) {
    let mut entries = Vec::new();
    let mut diagnostics = Vec::new();
    let mut names = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let mut bad = |message: String| diagnostics.push(LineDiagnostic { line: i + 1, message });
        let Some((name, code)) = line.split_once('\t') else {
            bad("expected name<TAB>code".into());
            continue;
        };
        let (name, code) = (name.trim(), code.trim());
        if name.is_empty() {
            bad("empty name".into());
            continue;
        }
        if let Err(e) = parse_gauss_code(code) {
            bad(format!("{name}: {e}"));
            continue;
        }
        if !names.insert(name.to_string()) {
            bad(format!("duplicate name {name}"));
            continue;
        }
        entries.push(TableEntry { name: name.into(), code: code.into() });
    }
    (entries, diagnostics)
}

pub fn ingest_table(path: impl AsRef<Path>) -> Result<(Vec<TableEntry>, Vec<LineDiagnostic>), BatchError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| match e.kind() {
        io::ErrorKind::NotFound => BatchError::FileNotFound { path: path.display().to_string() },
        _ => BatchError::Io(e),
    })?;
    Ok(parse_table(&text))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Analyses {
    pub ideal: bool,
    pub parity: bool,
    pub quandle: bool,
    pub welded: bool,
}

impl Default for Analyses {
    fn default() -> Self {
        Analyses { ideal: true, parity: true, quandle: true, welded: true }
    }
}

#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub max_k: Option<usize>,
    /// Wall-clock budget per entry.
    pub time_limit: Option<Duration>,
    /// Worker threads; 0 lets the pool decide.
    pub jobs: usize,
    pub analyses: Analyses,
    pub quandles: Vec<(String, FiniteQuandle)>,
    pub prime_bound: u64,
    /// Largest elementary ideal index examined.
    pub ideal_k_max: usize,
    /// Coloring counts are skipped when |X|^ω exceeds this.
    pub max_quandle_assignments: u64,
    pub certificates: bool,
    /// When false, `elapsed_ms` is written as 0 so output is reproducible.
    pub record_timing: bool,
}

pub fn default_quandles() -> Vec<(String, FiniteQuandle)> {
    vec![
        ("T2".into(), FiniteQuandle::trivial(2)),
        ("T3".into(), FiniteQuandle::trivial(3)),
        ("R3".into(), FiniteQuandle::dihedral(3)),
    ]
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            max_k: None,
            time_limit: None,
            jobs: 0,
            analyses: Analyses::default(),
            quandles: default_quandles(),
            prime_bound: DEFAULT_PRIME_BOUND,
            ideal_k_max: 3,
            max_quandle_assignments: 1 << 20,
            certificates: false,
            record_timing: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Timeout,
    Error(String),
}

impl Status {
    pub fn is_ok(&self) -> bool {
        *self == Status::Ok
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Ok => f.write_str("ok"),
            Status::Timeout => f.write_str("timeout"),
            Status::Error(code) => write!(f, "error:{code}"),
        }
    }
}

impl Serialize for Status {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Proof objects attached to a record on request.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Certificates {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sequence: Option<ColoringSequence>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub ideal: Vec<IdealCertificate>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub parity_ideal: Vec<IdealCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parity_projection: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub welded: Option<UnknottingCertificate>,
}

/// Summary of one table entry, measured on the normalized diagram.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultRecord {
    pub name: String,
    pub components: usize,
    pub chords: usize,
    pub strands: usize,
    #[serde(rename = "vbD")]
    pub vb_d: usize,
    #[serde(rename = "omegaD")]
    pub omega_d: Option<usize>,
    pub seed_set: Vec<usize>,
    pub ideal_lb: Option<usize>,
    pub parity_lb: Option<usize>,
    pub quandle_counts: BTreeMap<String, u64>,
    pub welded_unknot: Option<bool>,
    pub status: Status,
    pub elapsed_ms: u64,
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificates: Option<Certificates>,
}

impl ResultRecord {
    fn blank(name: &str) -> Self {
        ResultRecord {
            name: name.into(),
            components: 0,
            chords: 0,
            strands: 0,
            vb_d: 0,
            omega_d: None,
            seed_set: Vec::new(),
            ideal_lb: None,
            parity_lb: None,
            quandle_counts: BTreeMap::new(),
            welded_unknot: None,
            status: Status::Ok,
            elapsed_ms: 0,
            notes: Vec::new(),
            certificates: None,
        }
    }

    /// `ideal_lb <= omegaD <= vbD`, with absent values skipped.
    pub fn bounds_consistent(&self) -> bool {
        let Some(omega) = self.omega_d else { return true };
        self.ideal_lb.is_none_or(|lb| lb <= omega) && omega <= self.vb_d && self.components <= omega
    }
}

struct Timeout;

fn run_entry(entry: &TableEntry, config: &PipelineConfig) -> ResultRecord {
    let start = Instant::now();
    let deadline = config.time_limit.map(|t| start + t);
    let mut rec = ResultRecord::blank(&entry.name);
    let mut certs = Certificates::default();
    match parse_gauss_code(&entry.code) {
        Err(e) => rec.status = Status::Error(e.code().into()),
        Ok(raw) => {
            let tailless = raw.tailless_components();
            if !tailless.is_empty() {
                rec.notes.push(format!("kink added to components {tailless:?}"));
            }
            let d = raw.ensure_tail_per_component();
            if analyze(&d, config, deadline, &mut rec, &mut certs).is_err() {
                rec.status = Status::Timeout;
            } else if !rec.bounds_consistent() {
                rec.status = Status::Error("InvariantViolation".into());
            }
        }
    }
    if config.certificates {
        rec.certificates = Some(certs);
    }
    if config.record_timing {
        rec.elapsed_ms = start.elapsed().as_millis() as u64;
    }
    rec
}

fn ideal_bound(
    d: &GaussDiagram,
    config: &PipelineConfig,
    deadline: Option<Instant>,
) -> Result<Option<(usize, Vec<IdealCertificate>)>, Timeout> {
    match ideal_lower_bound_until(d, config.ideal_k_max, config.prime_bound, deadline) {
        Ok(b) => Ok(Some((b.bound, b.certificates))),
        Err(GroupError::TimedOut) => Err(Timeout),
        Err(_) => Ok(None),
    }
}

/// Fills `rec` step by step so a timeout keeps what was finished.
fn analyze(
    d: &GaussDiagram,
    config: &PipelineConfig,
    deadline: Option<Instant>,
    rec: &mut ResultRecord,
    certs: &mut Certificates,
) -> Result<(), Timeout> {
    rec.components = d.component_count();
    rec.chords = d.chords().len();
    rec.strands = d.strand_count();
    rec.vb_d = d.bridge_count();

    match wirtinger_number_until(d, config.max_k, deadline) {
        Ok(w) => {
            rec.omega_d = Some(w.omega);
            rec.seed_set = w.seed_set;
            certs.sequence = Some(w.sequence);
        }
        Err(SearchError::TimedOut { .. }) => return Err(Timeout),
        Err(SearchError::Exhausted { max_k }) => rec.notes.push(format!("no seed set of size <= {max_k}")),
    }

    if config.analyses.ideal {
        if d.is_knot() {
            if let Some((bound, c)) = ideal_bound(d, config, deadline)? {
                rec.ideal_lb = Some(bound);
                certs.ideal = c;
            } else {
                rec.notes.push(format!("ideal bound skipped: {} strands", d.strand_count()));
            }
        } else {
            rec.notes.push("ideal bound applies to knots".into());
        }
    }

    if config.analyses.parity && d.is_knot() {
        let projected = parity_projection(d).expect("knot").ensure_tail_per_component();
        if let Some((bound, c)) = ideal_bound(&projected, config, deadline)? {
            rec.parity_lb = Some(bound);
            certs.parity_ideal = c;
        }
        certs.parity_projection = Some(projected.to_string());
        if let (Some(lb), Some(omega)) = (rec.parity_lb, rec.omega_d) {
            if lb > omega {
                rec.notes.push(format!("parity bound {lb} exceeds omegaD {omega}"));
            }
        }
    }

    if config.analyses.quandle && !rec.seed_set.is_empty() {
        for (name, x) in &config.quandles {
            if deadline.is_some_and(|t| Instant::now() >= t) {
                return Err(Timeout);
            }
            let assignments = (x.order() as u64).checked_pow(rec.seed_set.len() as u32);
            if assignments.is_none_or(|a| a > config.max_quandle_assignments) {
                rec.notes.push(format!("{name} colorings skipped"));
                continue;
            }
            let count = count_colorings(d, x, Some(&rec.seed_set)).expect("minimal seeds generate");
            rec.quandle_counts.insert(name.clone(), count);
        }
    }

    if config.analyses.welded && d.is_knot() {
        match welded_unknot_certificate(d) {
            Ok(cert) => {
                rec.welded_unknot = Some(replay_certificate(&cert).is_ok());
                certs.welded = Some(cert);
            }
            Err(_) => rec.notes.push("isOneOverbridge = false".into()),
        }
    }
    Ok(())
}

/// Runs every entry on a pool of `config.jobs` workers. Records come back in
/// input order and do not depend on the worker count.
pub fn run_pipeline(entries: &[TableEntry], config: &PipelineConfig) -> Vec<ResultRecord> {
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .expect("thread pool");
    pool.install(|| entries.par_iter().map(|e| run_entry(e, config)).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format {s:?}; expected csv or json")),
        }
    }
}

pub const CSV_HEADER: [&str; 11] =
    ["name", "components", "chords", "strands", "vbD", "omegaD", "seed_set", "ideal_lb", "parity_lb", "status", "elapsed_ms"];

fn opt(v: Option<usize>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_results_to<W: Write>(records: &[ResultRecord], format: Format, mut out: W) -> Result<(), BatchError> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(CSV_HEADER)?;
            for r in records {
                let seeds: Vec<String> = r.seed_set.iter().map(usize::to_string).collect();
                w.write_record([
                    r.name.clone(),
                    r.components.to_string(),
                    r.chords.to_string(),
                    r.strands.to_string(),
                    r.vb_d.to_string(),
                    opt(r.omega_d),
                    seeds.join(";"),
                    opt(r.ideal_lb),
                    opt(r.parity_lb),
                    r.status.to_string(),
                    r.elapsed_ms.to_string(),
                ])?;
            }
            w.flush()?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, records)?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

pub fn write_results(records: &[ResultRecord], format: Format, path: impl AsRef<Path>) -> Result<(), BatchError> {
    let file = io::BufWriter::new(fs::File::create(path)?);
    write_results_to(records, format, file)
}
