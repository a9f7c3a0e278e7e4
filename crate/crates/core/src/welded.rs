//! Welded unknotting of one-overbridge knot diagrams.
//!
//! On a one-overbridge diagram every arrowtail sits on a single arc and all
//! arrowheads follow it. Adjacent arrowtails may trade places (the welded
//! move); once the tails are ordered opposite to their heads the chords are
//! nested, and Reidemeister I deletions peel them off from the inside.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gauss::{parse_gauss_code, EndKind, GaussDiagram, Token};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum WeldedError {
    #[error("welded unknotting applies to knot diagrams; got {components} components")]
    NotAKnot { components: usize },
    #[error("the diagram has {overbridges} overbridges, not one")]
    NotOneOverbridge { overbridges: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WeldedMove {
    /// Exchange two cyclically adjacent arrowtails at these token positions.
    Swap { at: [usize; 2] },
    /// Delete a chord whose head and tail are cyclically adjacent.
    R1 { chord: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnknottingCertificate {
    pub initial: String,
    pub moves: Vec<WeldedMove>,
    #[serde(rename = "final")]
    pub final_code: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ReplayFault {
    #[error("initial code does not parse as a knot diagram")]
    BadInitial,
    #[error("move {index} is illegal: {reason}")]
    IllegalMove { index: usize, reason: &'static str },
    #[error("replay ends at {reached}, certificate claims {claimed}")]
    FinalMismatch { reached: String, claimed: String },
    #[error("final diagram {0} still has chords")]
    NotUnknotted(String),
}

impl ReplayFault {
    pub fn index(&self) -> Option<usize> {
        match self {
            ReplayFault::IllegalMove { index, .. } => Some(*index),
            _ => None,
        }
    }
}

fn require_knot(d: &GaussDiagram) -> Result<(), WeldedError> {
    if d.is_knot() {
        Ok(())
    } else {
        Err(WeldedError::NotAKnot { components: d.component_count() })
    }
}

/// At most one strand carries arrowtails.
pub fn is_one_overbridge(d: &GaussDiagram) -> Result<bool, WeldedError> {
    require_knot(d)?;
    Ok(d.overbridges().len() <= 1)
}

fn render(tokens: &[Token]) -> String {
    if tokens.is_empty() {
        ".".to_string()
    } else {
        tokens.iter().map(Token::to_string).collect()
    }
}

/// Applies one move to a circle's token list, checking legality.
fn apply(tokens: &mut Vec<Token>, mv: WeldedMove) -> Result<(), &'static str> {
    let len = tokens.len();
    match mv {
        WeldedMove::Swap { at: [i, j] } => {
            if i >= len || j >= len || i == j {
                return Err("swap position out of range");
            }
            if (i + 1) % len != j && (j + 1) % len != i {
                return Err("swap positions are not adjacent");
            }
            if tokens[i].kind != EndKind::Tail || tokens[j].kind != EndKind::Tail {
                return Err("only arrowtails may be swapped");
            }
            tokens.swap(i, j);
        }
        WeldedMove::R1 { chord } => {
            let ends: Vec<usize> = (0..len).filter(|&p| tokens[p].label == chord).collect();
            if ends.len() != 2 {
                return Err("chord not present");
            }
            let (a, b) = (ends[0], ends[1]);
            if b != a + 1 && !(a == 0 && b == len - 1) {
                return Err("chord endpoints are not adjacent");
            }
            tokens.remove(b);
            tokens.remove(a);
        }
    }
    Ok(())
}

/// Builds a certificate: bubble-sort the tails by adjacent swaps until their
/// order reverses the order of their heads, then delete chords innermost first.
pub fn welded_unknot_certificate(d: &GaussDiagram) -> Result<UnknottingCertificate, WeldedError> {
    if !is_one_overbridge(d)? {
        return Err(WeldedError::NotOneOverbridge { overbridges: d.overbridges().len() });
    }
    let mut tokens = d.components()[0].clone();
    let initial = render(&tokens);
    let mut moves = Vec::new();
    let len = tokens.len();
    if len > 0 {
        // Rotate the view so the overbridge starts at index `start` (a tail right after a head).
        let start = (0..len)
            .find(|&p| tokens[p].kind == EndKind::Tail && tokens[(p + len - 1) % len].kind == EndKind::Head)
            .expect("one-overbridge knot with chords has a tail after a head");
        let t = len / 2;
        let pos = |k: usize| (start + k) % len;
        // Heads are read from the overbridge's end; the chord whose head comes
        // first must end up with the last tail.
        let head_rank: std::collections::BTreeMap<u32, usize> =
            (0..t).map(|k| (tokens[pos(t + k)].label, k)).collect();
        let key = |tok: &Token| t - 1 - head_rank[&tok.label];
        for pass in 0..t {
            for k in 0..t - 1 - pass.min(t - 1) {
                if key(&tokens[pos(k)]) > key(&tokens[pos(k + 1)]) {
                    let mv = WeldedMove::Swap { at: [pos(k), pos(k + 1)] };
                    apply(&mut tokens, mv).expect("adjacent tails");
                    moves.push(mv);
                }
            }
        }
        for k in 0..t {
            let chord = tokens[pos(t + k)].label;
            moves.push(WeldedMove::R1 { chord });
        }
        let mut check = tokens.clone();
        for &mv in &moves[moves.len() - t..] {
            apply(&mut check, mv).expect("nested chords peel off");
        }
        tokens = check;
    }
    Ok(UnknottingCertificate { initial, moves, final_code: render(&tokens) })
}

/// Replays a certificate from its initial code. Succeeds when every move is
/// legal, the result matches the recorded final code, and it is chordless.
pub fn replay_certificate(cert: &UnknottingCertificate) -> Result<(), ReplayFault> {
    let d = parse_gauss_code(&cert.initial).map_err(|_| ReplayFault::BadInitial)?;
    if !d.is_knot() {
        return Err(ReplayFault::BadInitial);
    }
    let mut tokens = d.components()[0].clone();
    for (index, &mv) in cert.moves.iter().enumerate() {
        apply(&mut tokens, mv).map_err(|reason| ReplayFault::IllegalMove { index, reason })?;
    }
    let reached = render(&tokens);
    if reached != cert.final_code {
        return Err(ReplayFault::FinalMismatch { reached, claimed: cert.final_code.clone() });
    }
    if !tokens.is_empty() {
        return Err(ReplayFault::NotUnknotted(reached));
    }
    Ok(())
}

/// Intermediate diagrams of a certificate, the initial one included.
pub fn certificate_stages(cert: &UnknottingCertificate) -> Result<Vec<GaussDiagram>, ReplayFault> {
    let d = parse_gauss_code(&cert.initial).map_err(|_| ReplayFault::BadInitial)?;
    let mut tokens = d.components()[0].clone();
    let mut out = vec![d];
    for (index, &mv) in cert.moves.iter().enumerate() {
        apply(&mut tokens, mv).map_err(|reason| ReplayFault::IllegalMove { index, reason })?;
        out.push(GaussDiagram::from_components(vec![tokens.clone()]).expect("moves keep chords whole"));
    }
    Ok(out)
}
