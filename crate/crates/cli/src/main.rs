use std::fs;
use std::io;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};
use serde_json::json;

use vwirtinger::batch::{default_quandles, Analyses};
use vwirtinger::coloring::{verify_coloring_sequence, SearchError};
use vwirtinger::{
    alexander_matrix, count_colorings, elementary_ideal_generators, gaussian_parity, ideal_lower_bound,
    ingest_table, iterated_parity_projection, parity_lower_bound, parity_projection, parse_gauss_code,
    replay_certificate, run_pipeline, welded_unknot_certificate, wirtinger_number, wirtinger_presentation,
    write_results, write_results_to, ColoringSequence, FiniteQuandle, Format, GaussDiagram, PipelineConfig,
    SearchLimits, Status, UnknottingCertificate, DEFAULT_PRIME_BOUND,
};

const USAGE: u8 = 1;
const INPUT: u8 = 2;
const TIMEOUT: u8 = 3;

#[derive(Parser)]
#[command(name = "vwirt", version, about = "Wirtinger numbers and bridge bounds of virtual links")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Largest seed-set size to try.
    #[arg(long, global = true)]
    max_k: Option<usize>,
    /// Wall-clock limit in seconds (per entry in batch mode).
    #[arg(long, global = true)]
    time_limit: Option<f64>,
    /// Worker threads for batch mode; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Output format: csv or json. Single-diagram commands print text unless json is asked for.
    #[arg(long, global = true)]
    format: Option<Format>,
    /// Attach coloring sequences and other proof objects to the output.
    #[arg(long, global = true)]
    certificates: bool,
    /// Quandle table file (first line n, then n rows of x▷y). Repeatable.
    #[arg(long, global = true)]
    quandle: Vec<PathBuf>,
    #[arg(long, global = true, default_value_t = DEFAULT_PRIME_BOUND)]
    prime_bound: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a Gauss code and print its canonical form and strands.
    Parse { code: String },
    /// Diagram bridge count and overbridges.
    Bridge { code: String },
    /// Wirtinger number by seed-subset search.
    Wirtinger {
        code: String,
        /// Check a coloring sequence (JSON file) against the diagram instead of searching.
        #[arg(long)]
        verify: Option<PathBuf>,
    },
    /// Gaussian parity and the parity projection of a knot diagram.
    Parity {
        code: String,
        /// Project until no odd chords remain.
        #[arg(long)]
        iterate: bool,
        /// Largest elementary ideal index for the bound on the projection.
        #[arg(long, default_value_t = 3)]
        ideal_k: usize,
    },
    /// Alexander matrix, elementary ideals and the ideal lower bound.
    Alexander {
        code: String,
        #[arg(long, default_value_t = 3)]
        ideal_k: usize,
    },
    /// Quandle coloring counts.
    Quandle { code: String },
    /// Welded unknotting certificate for a one-overbridge knot diagram.
    Welded {
        /// Gauss code; omit when replaying.
        code: Option<String>,
        /// Replay a certificate from a JSON file.
        #[arg(long)]
        replay: Option<PathBuf>,
    },
    /// Run the full pipeline over a name<TAB>code table.
    Batch {
        table: PathBuf,
        /// Output file; standard output when absent.
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Write elapsed_ms as 0 so results are byte-reproducible.
        #[arg(long)]
        omit_timing: bool,
        #[arg(long, default_value_t = 3)]
        ideal_k: usize,
    },
}

struct Failure(u8, String);

fn input_error(msg: impl ToString) -> Failure {
    Failure(INPUT, msg.to_string())
}

fn diagram(code: &str) -> Result<GaussDiagram, Failure> {
    parse_gauss_code(code).map_err(|e| input_error(format!("{}: {e}", e.code())))
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn quandles(cli: &Cli) -> Result<Vec<(String, FiniteQuandle)>, Failure> {
    if cli.quandle.is_empty() {
        return Ok(default_quandles());
    }
    cli.quandle
        .iter()
        .map(|p| {
            let x: FiniteQuandle = read(p)?.parse().map_err(|e| input_error(format!("{}: {e}", p.display())))?;
            let name = p.file_stem().map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned());
            Ok((name, x))
        })
        .collect()
}

fn limits(cli: &Cli) -> SearchLimits {
    SearchLimits { max_k: cli.max_k, time_limit: cli.time_limit.map(Duration::from_secs_f64) }
}

fn json_out(cli: &Cli) -> bool {
    cli.format == Some(Format::Json)
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json"));
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Parse { code } => {
            let d = diagram(code)?;
            if json_out(cli) {
                print_json(&json!({
                    "code": d.to_string(),
                    "components": d.component_count(),
                    "chords": d.chords().len(),
                    "strands": d.strands(),
                }));
            } else {
                println!("{d}");
                println!("components {} chords {} strands {}", d.component_count(), d.chords().len(), d.strand_count());
                for s in d.strands() {
                    println!("strand {} component {} positions {:?} tails {:?}", s.id, s.component, s.positions, s.arrowtails);
                }
            }
        }
        Command::Bridge { code } => {
            let d = diagram(code)?;
            let over = d.overbridges();
            if json_out(cli) {
                print_json(&json!({
                    "vbD": d.bridge_count(),
                    "overbridges": over,
                    "cut_split": d.is_cut_split(),
                }));
            } else {
                println!("vbD {}", d.bridge_count());
                println!("overbridges {over:?}");
                if let Some(w) = d.cut_split_witness() {
                    println!("cut-split {w:?}");
                }
            }
        }
        Command::Wirtinger { code, verify } => {
            let d = diagram(code)?;
            if let Some(path) = verify {
                let seq: ColoringSequence =
                    serde_json::from_str(&read(path)?).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
                return match verify_coloring_sequence(&d, &seq) {
                    Ok(()) => {
                        println!("valid: {} seeds color all {} strands", seq.seed_count, d.strand_count());
                        Ok(())
                    }
                    Err(fault) => Err(input_error(format!("invalid sequence: {fault}"))),
                };
            }
            match wirtinger_number(&d, limits(cli)) {
                Ok(w) => {
                    if json_out(cli) {
                        let mut v = json!({ "omegaD": w.omega, "seed_set": w.seed_set, "stats": w.stats });
                        if cli.certificates {
                            v["sequence"] = serde_json::to_value(&w.sequence).expect("json");
                        }
                        print_json(&v);
                    } else {
                        println!("omegaD {}", w.omega);
                        println!("seeds {:?}", w.seed_set);
                        if cli.certificates {
                            println!("{}", serde_json::to_string(&w.sequence).expect("json"));
                        }
                    }
                }
                Err(e @ SearchError::TimedOut { .. }) => return Err(Failure(TIMEOUT, e.to_string())),
                Err(e) => return Err(input_error(e)),
            }
        }
        Command::Parity { code, iterate, ideal_k } => {
            let d = diagram(code)?;
            let parity = gaussian_parity(&d).map_err(input_error)?;
            let stages: Vec<String> = if *iterate {
                iterated_parity_projection(&d).map_err(input_error)?.iter().map(|s| s.to_string()).collect()
            } else {
                vec![d.to_string(), parity_projection(&d).map_err(input_error)?.to_string()]
            };
            let bound = parity_lower_bound(&d, *ideal_k, cli.prime_bound).map_err(input_error)?;
            if json_out(cli) {
                print_json(&json!({ "parity": parity, "stages": stages, "parity_lb": bound }));
            } else {
                for (chord, f) in &parity {
                    println!("chord {chord} parity {f}");
                }
                for s in &stages[1..] {
                    println!("projection {s}");
                }
                println!("parity_lb {bound}");
            }
        }
        Command::Alexander { code, ideal_k } => {
            let d = diagram(code)?;
            let a = alexander_matrix(&wirtinger_presentation(&d));
            let bound = ideal_lower_bound(&d, *ideal_k, cli.prime_bound).map_err(input_error)?;
            if json_out(cli) {
                let mut v = json!({ "matrix": a.entries, "ideal_lb": bound.bound });
                if cli.certificates {
                    v["certificates"] = serde_json::to_value(&bound.certificates).expect("json");
                }
                print_json(&v);
            } else {
                for r in 0..a.rows {
                    let row: Vec<String> = (0..a.cols).map(|c| a.entry(r, c).to_string()).collect();
                    println!("[{}]", row.join(", "));
                }
                for k in 1..=(*ideal_k).min(a.cols.saturating_sub(1)) {
                    let gens = elementary_ideal_generators(&a, k).map_err(input_error)?;
                    let shown: Vec<String> = gens.iter().map(|g| g.to_string()).collect();
                    println!("E{k} = ({})", shown.join(", "));
                }
                for c in &bound.certificates {
                    if let Some(w) = c.proper_witness {
                        println!("E{} proper: every generator vanishes mod {} at t = {}", c.k, w.prime, w.unit);
                    }
                }
                println!("ideal_lb {}", bound.bound);
            }
        }
        Command::Quandle { code } => {
            let d = diagram(code)?.ensure_tail_per_component();
            let w = wirtinger_number(&d, limits(cli)).map_err(|e| match e {
                SearchError::TimedOut { .. } => Failure(TIMEOUT, e.to_string()),
                _ => input_error(e),
            })?;
            let mut counts = serde_json::Map::new();
            for (name, x) in quandles(cli)? {
                let n = count_colorings(&d, &x, Some(&w.seed_set)).map_err(input_error)?;
                if !json_out(cli) {
                    println!("{name} {n}");
                }
                counts.insert(name, n.into());
            }
            if json_out(cli) {
                print_json(&json!({ "omegaD": w.omega, "quandle_counts": counts }));
            }
        }
        Command::Welded { code, replay } => match (code, replay) {
            (_, Some(path)) => {
                let cert: UnknottingCertificate =
                    serde_json::from_str(&read(path)?).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
                replay_certificate(&cert).map_err(|e| input_error(format!("invalid certificate: {e}")))?;
                println!("valid: {} reduces to {}", cert.initial, cert.final_code);
            }
            (Some(code), None) => {
                let cert = welded_unknot_certificate(&diagram(code)?).map_err(input_error)?;
                println!("{}", serde_json::to_string_pretty(&cert).expect("json"));
            }
            (None, None) => return Err(Failure(USAGE, "welded needs a code or --replay <file>".into())),
        },
        Command::Batch { table, output, omit_timing, ideal_k } => {
            let (entries, diagnostics) = ingest_table(table).map_err(input_error)?;
            for d in &diagnostics {
                eprintln!("{}: {d}", table.display());
            }
            let config = PipelineConfig {
                max_k: cli.max_k,
                time_limit: cli.time_limit.map(Duration::from_secs_f64),
                jobs: cli.jobs,
                analyses: Analyses::default(),
                quandles: quandles(cli)?,
                prime_bound: cli.prime_bound,
                ideal_k_max: *ideal_k,
                certificates: cli.certificates,
                record_timing: !omit_timing,
                ..PipelineConfig::default()
            };
            let records = run_pipeline(&entries, &config);
            let format = cli.format.unwrap_or(Format::Csv);
            match output {
                Some(path) => write_results(&records, format, path).map_err(input_error)?,
                None => write_results_to(&records, format, io::stdout().lock()).map_err(input_error)?,
            }
            let errors = records.iter().filter(|r| matches!(r.status, Status::Error(_))).count();
            let timeouts = records.iter().filter(|r| r.status == Status::Timeout).count();
            if errors > 0 || !diagnostics.is_empty() {
                return Err(input_error(format!("{} malformed lines, {errors} failed entries", diagnostics.len())));
            }
            if timeouts > 0 {
                return Err(Failure(TIMEOUT, format!("{timeouts} entries timed out")));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            eprintln!("vwirt: {msg}");
            ExitCode::from(code)
        }
    }
}
