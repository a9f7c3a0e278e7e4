//! Gauss diagrams of virtual links.
//!
//! A diagram is a list of circle components, each a cyclic sequence of chord
//! endpoints. Every chord joins one overcrossing passage (its tail, token
//! `O`) to one undercrossing passage (its head, token `U`) and carries a
//! crossing sign. The textual form is
//!
//! ```text
//! code      := component ("|" component)*
//! component := "." | token+
//! token     := ("O" | "U") label ("+" | "-")
//! ```
//!
//! Strands, head incidences and the strand lookup tables are computed once
//! at construction; the diagram is immutable afterwards.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GaussError {
    #[error("empty input")]
    EmptyInput,
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("chord {label} must appear exactly once as O and once as U")]
    UnbalancedChord { label: u32 },
    #[error("chord {label} carries different signs at its two endpoints")]
    SignMismatch { label: u32 },
}

impl GaussError {
    /// Short machine-readable name, used in batch status fields.
    pub fn code(&self) -> &'static str {
        match self {
            GaussError::EmptyInput => "EmptyInput",
            GaussError::Syntax { .. } => "SyntaxError",
            GaussError::UnbalancedChord { .. } => "UnbalancedChord",
            GaussError::SignMismatch { .. } => "SignMismatch",
        }
    }
}

/// Which passage of a crossing an endpoint records.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EndKind {
    /// Overcrossing passage, token `O`.
    Tail,
    /// Undercrossing passage, token `U`.
    Head,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn exponent(self) -> i32 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }

    fn symbol(self) -> char {
        match self {
            Sign::Positive => '+',
            Sign::Negative => '-',
        }
    }
}

/// One token of a Gauss code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Token {
    pub kind: EndKind,
    pub label: u32,
    pub sign: Sign,
}

impl Token {
    pub fn tail(label: u32, sign: Sign) -> Self {
        Token { kind: EndKind::Tail, label, sign }
    }

    pub fn head(label: u32, sign: Sign) -> Self {
        Token { kind: EndKind::Head, label, sign }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.kind {
            EndKind::Tail => 'O',
            EndKind::Head => 'U',
        };
        write!(f, "{}{}{}", k, self.label, self.sign.symbol())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Endpoint {
    pub kind: EndKind,
    pub chord: u32,
    pub component: usize,
    pub position: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Chord {
    pub id: u32,
    pub sign: Sign,
    pub head: Endpoint,
    pub tail: Endpoint,
}

/// A maximal arrowhead-free arc of a component.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Strand {
    pub id: usize,
    pub component: usize,
    /// Positions covered by the strand, in traversal order. Excludes the
    /// bounding arrowheads.
    pub positions: Vec<usize>,
    /// Chord ids whose arrowtail lies on this strand, in traversal order.
    pub arrowtails: Vec<u32>,
}

impl Strand {
    pub fn is_overbridge(&self) -> bool {
        !self.arrowtails.is_empty()
    }
}

/// The local picture at one arrowhead: the strand ending there, the strand
/// starting there, and the strand carrying the chord's tail.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HeadIncidence {
    pub chord: u32,
    pub before: usize,
    pub after: usize,
    pub tail_strand: usize,
    pub sign: Sign,
    pub component: usize,
    pub position: usize,
}

/// Why a diagram is cut-split.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CutSplitWitness {
    /// The strand on both sides of this arrowhead is the same.
    SelfAdjacentHead { chord: u32, strand: usize },
    ChordlessComponent { component: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaussDiagram {
    components: Vec<Vec<Token>>,
    chords: Vec<Chord>,
    chord_index: BTreeMap<u32, usize>,
    strands: Vec<Strand>,
    heads: Vec<HeadIncidence>,
    strand_at: Vec<Vec<usize>>,
}

impl GaussDiagram {
    /// Validates a token list per component and builds the strand tables.
    pub fn from_components(components: Vec<Vec<Token>>) -> Result<Self, GaussError> {
        if components.is_empty() {
            return Err(GaussError::EmptyInput);
        }
        let mut tails: BTreeMap<u32, Vec<(Endpoint, Sign)>> = BTreeMap::new();
        let mut heads: BTreeMap<u32, Vec<(Endpoint, Sign)>> = BTreeMap::new();
        for (c, comp) in components.iter().enumerate() {
            for (p, tok) in comp.iter().enumerate() {
                let ep = Endpoint { kind: tok.kind, chord: tok.label, component: c, position: p };
                match tok.kind {
                    EndKind::Tail => tails.entry(tok.label).or_default().push((ep, tok.sign)),
                    EndKind::Head => heads.entry(tok.label).or_default().push((ep, tok.sign)),
                }
            }
        }
        let mut labels: Vec<u32> = tails.keys().chain(heads.keys()).copied().collect();
        labels.sort_unstable();
        labels.dedup();

        let mut chords = Vec::with_capacity(labels.len());
        for label in labels {
            let t = tails.get(&label).map(Vec::as_slice).unwrap_or(&[]);
            let h = heads.get(&label).map(Vec::as_slice).unwrap_or(&[]);
            if t.len() != 1 || h.len() != 1 {
                return Err(GaussError::UnbalancedChord { label });
            }
            if t[0].1 != h[0].1 {
                return Err(GaussError::SignMismatch { label });
            }
            chords.push(Chord { id: label, sign: t[0].1, head: h[0].0, tail: t[0].0 });
        }
        let chord_index = chords.iter().enumerate().map(|(i, c)| (c.id, i)).collect();

        let mut diagram = GaussDiagram {
            components,
            chords,
            chord_index,
            strands: Vec::new(),
            heads: Vec::new(),
            strand_at: Vec::new(),
        };
        diagram.build_strands();
        Ok(diagram)
    }

    fn build_strands(&mut self) {
        let mut strands = Vec::new();
        let mut strand_at = Vec::with_capacity(self.components.len());
        // (component, position, before, after) for every arrowhead, in head order.
        let mut head_sides = Vec::new();

        for (c, comp) in self.components.iter().enumerate() {
            let len = comp.len();
            let head_pos: Vec<usize> =
                (0..len).filter(|&p| comp[p].kind == EndKind::Head).collect();
            let mut at = vec![usize::MAX; len];
            let first = strands.len();
            if head_pos.is_empty() {
                let positions: Vec<usize> = (0..len).collect();
                for &p in &positions {
                    at[p] = first;
                }
                let arrowtails = positions.iter().map(|&p| comp[p].label).collect();
                strands.push(Strand { id: first, component: c, positions, arrowtails });
            } else {
                let m = head_pos.len();
                for j in 0..m {
                    let id = first + j;
                    let end = head_pos[j];
                    let start = head_pos[(j + m - 1) % m];
                    let mut positions = Vec::new();
                    let mut p = (start + 1) % len;
                    while p != end {
                        positions.push(p);
                        at[p] = id;
                        p = (p + 1) % len;
                    }
                    let arrowtails = positions.iter().map(|&p| comp[p].label).collect();
                    strands.push(Strand { id, component: c, positions, arrowtails });
                    head_sides.push((c, end, id, first + (j + 1) % m));
                }
                // Arrowheads themselves are attributed to the strand they end.
                for (j, &p) in head_pos.iter().enumerate() {
                    at[p] = first + j;
                }
            }
            strand_at.push(at);
        }

        let heads = head_sides
            .into_iter()
            .map(|(c, p, before, after)| {
                let chord = &self.chords[self.chord_index[&self.components[c][p].label]];
                HeadIncidence {
                    chord: chord.id,
                    before,
                    after,
                    tail_strand: strand_at[chord.tail.component][chord.tail.position],
                    sign: chord.sign,
                    component: c,
                    position: p,
                }
            })
            .collect();

        self.strands = strands;
        self.heads = heads;
        self.strand_at = strand_at;
    }

    pub fn components(&self) -> &[Vec<Token>] {
        &self.components
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn chords(&self) -> &[Chord] {
        &self.chords
    }

    pub fn chord(&self, id: u32) -> Option<&Chord> {
        self.chord_index.get(&id).map(|&i| &self.chords[i])
    }

    pub fn strands(&self) -> &[Strand] {
        &self.strands
    }

    pub fn strand_count(&self) -> usize {
        self.strands.len()
    }

    /// Head incidences ordered by (component, position); the i-th entry
    /// terminates strand i whenever every component carries an arrowhead.
    pub fn head_incidences(&self) -> &[HeadIncidence] {
        &self.heads
    }

    /// Strand covering the given position (an arrowhead belongs to the strand it ends).
    pub fn strand_at(&self, component: usize, position: usize) -> usize {
        self.strand_at[component][position]
    }

    pub fn is_knot(&self) -> bool {
        self.components.len() == 1
    }

    /// Strands of one component in cyclic traversal order.
    pub fn component_strands(&self, component: usize) -> impl Iterator<Item = &Strand> {
        self.strands.iter().filter(move |s| s.component == component)
    }

    /// Number of overbridges, counting a chordless circle as one.
    pub fn bridge_count(&self) -> usize {
        let overbridges = self.strands.iter().filter(|s| s.is_overbridge()).count();
        let chordless = self.components.iter().filter(|c| c.is_empty()).count();
        overbridges + chordless
    }

    pub fn overbridges(&self) -> Vec<usize> {
        self.strands.iter().filter(|s| s.is_overbridge()).map(|s| s.id).collect()
    }

    /// Returns a witness when the diagram is cut-split.
    pub fn cut_split_witness(&self) -> Option<CutSplitWitness> {
        if let Some(h) = self.heads.iter().find(|h| h.before == h.after) {
            return Some(CutSplitWitness::SelfAdjacentHead { chord: h.chord, strand: h.before });
        }
        self.components
            .iter()
            .position(Vec::is_empty)
            .map(|component| CutSplitWitness::ChordlessComponent { component })
    }

    pub fn is_cut_split(&self) -> bool {
        self.cut_split_witness().is_some()
    }

    fn max_label(&self) -> u32 {
        self.chords.last().map_or(0, |c| c.id)
    }

    /// Adds a one-crossing kink (tail immediately followed by its head) at
    /// the start of every component that carries no arrowtail.
    pub fn ensure_tail_per_component(&self) -> GaussDiagram {
        let mut next = self.max_label();
        let mut changed = false;
        let components = self
            .components
            .iter()
            .map(|comp| {
                if comp.iter().any(|t| t.kind == EndKind::Tail) {
                    comp.clone()
                } else {
                    changed = true;
                    next += 1;
                    let mut out = vec![Token::tail(next, Sign::Positive), Token::head(next, Sign::Positive)];
                    out.extend_from_slice(comp);
                    out
                }
            })
            .collect();
        if !changed {
            return self.clone();
        }
        GaussDiagram::from_components(components).expect("kink insertion keeps the diagram valid")
    }

    /// Components lacking an arrowtail, i.e. those `ensure_tail_per_component` would touch.
    pub fn tailless_components(&self) -> Vec<usize> {
        (0..self.components.len())
            .filter(|&c| !self.components[c].iter().any(|t| t.kind == EndKind::Tail))
            .collect()
    }

    /// Drops the listed chords, keeping the cyclic order of the rest.
    pub fn without_chords(&self, drop: &[u32]) -> GaussDiagram {
        let components = self
            .components
            .iter()
            .map(|comp| comp.iter().filter(|t| !drop.contains(&t.label)).copied().collect())
            .collect();
        GaussDiagram::from_components(components).expect("removing whole chords keeps the diagram valid")
    }
}

impl fmt::Display for GaussDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, comp) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            if comp.is_empty() {
                f.write_str(".")?;
            }
            for tok in comp {
                write!(f, "{tok}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for GaussDiagram {
    type Err = GaussError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_gauss_code(s)
    }
}

/// Parses a Gauss code such as `O1-O2-U1-U2-` or `.|O1+U1+`.
pub fn parse_gauss_code(text: &str) -> Result<GaussDiagram, GaussError> {
    let components = tokenize(text)?;
    GaussDiagram::from_components(components)
}

fn tokenize(text: &str) -> Result<Vec<Vec<Token>>, GaussError> {
    let bytes = text.as_bytes();
    if text.trim().is_empty() {
        return Err(GaussError::EmptyInput);
    }
    let syntax = |offset: usize, message: &str| GaussError::Syntax { offset, message: message.to_string() };

    let mut components = Vec::new();
    let mut current: Vec<Token> = Vec::new();
    let mut chordless = false;
    let mut i = 0;
    let skip_ws = |i: &mut usize| {
        while *i < bytes.len() && bytes[*i].is_ascii_whitespace() {
            *i += 1;
        }
    };

    loop {
        skip_ws(&mut i);
        if i >= bytes.len() {
            break;
        }
        match bytes[i] {
            b'|' => {
                if current.is_empty() && !chordless {
                    return Err(syntax(i, "empty component"));
                }
                components.push(std::mem::take(&mut current));
                chordless = false;
                i += 1;
            }
            b'.' => {
                if chordless || !current.is_empty() {
                    return Err(syntax(i, "'.' must be the whole component"));
                }
                chordless = true;
                i += 1;
            }
            b'O' | b'U' => {
                if chordless {
                    return Err(syntax(i, "'.' must be the whole component"));
                }
                let kind = if bytes[i] == b'O' { EndKind::Tail } else { EndKind::Head };
                i += 1;
                skip_ws(&mut i);
                let digits = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if digits == i {
                    return Err(syntax(digits, "expected chord label"));
                }
                let label: u32 = text[digits..i]
                    .parse()
                    .map_err(|_| syntax(digits, "chord label out of range"))?;
                if label == 0 {
                    return Err(syntax(digits, "chord labels are positive"));
                }
                skip_ws(&mut i);
                let sign = match bytes.get(i) {
                    Some(b'+') => Sign::Positive,
                    Some(b'-') => Sign::Negative,
                    _ => return Err(syntax(i, "expected sign '+' or '-'")),
                };
                i += 1;
                current.push(Token { kind, label, sign });
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(syntax(i, &format!("unexpected character {ch:?}")));
            }
        }
    }
    if current.is_empty() && !chordless {
        return Err(syntax(bytes.len(), "empty component"));
    }
    components.push(current);
    Ok(components)
}
