//! Coloring moves, saturation, and the seed-subset search for the
//! Wirtinger number of a diagram.
//!
//! A coloring move fires at an arrowhead whose tail strand is colored and
//! exactly one of whose two side strands is colored; the other side inherits
//! that color. Move availability only grows as more strands get colored, so
//! the saturated set for a fixed seed set does not depend on move order.

use std::collections::VecDeque;
use std::time::{Duration, Instant};

use fixedbitset::FixedBitSet;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gauss::{GaussDiagram, HeadIncidence};

/// Partial strand coloring. Colors are `1..=k`, one per seed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoringState {
    colors: Vec<Option<u32>>,
    colored: FixedBitSet,
}

impl ColoringState {
    pub fn new(strands: usize) -> Self {
        ColoringState { colors: vec![None; strands], colored: FixedBitSet::with_capacity(strands) }
    }

    pub fn color(&self, strand: usize) -> Option<u32> {
        self.colors[strand]
    }

    pub fn is_colored(&self, strand: usize) -> bool {
        self.colored.contains(strand)
    }

    pub fn colored_set(&self) -> &FixedBitSet {
        &self.colored
    }

    pub fn colored_count(&self) -> usize {
        self.colored.count_ones(..)
    }

    pub fn is_complete(&self) -> bool {
        self.colored_count() == self.colors.len()
    }

    fn paint(&mut self, strand: usize, color: u32) {
        debug_assert!(self.colors[strand].is_none());
        self.colors[strand] = Some(color);
        self.colored.insert(strand);
    }
}

/// Order in which strands were colored. The first `seed_count` entries are
/// the seeds; `colors[j]` is the color carried by `order[j]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColoringSequence {
    pub seed_count: usize,
    pub order: Vec<usize>,
    pub colors: Vec<u32>,
}

impl ColoringSequence {
    pub fn seeds(&self) -> &[usize] {
        &self.order[..self.seed_count.min(self.order.len())]
    }

    /// Height 1/(j+1) of the j-th colored strand, j counted from 1.
    pub fn heights(&self) -> Vec<f64> {
        (0..self.order.len()).map(|i| 1.0 / (i as f64 + 2.0)).collect()
    }

    /// Stage at which each strand was colored (0-based), `None` if absent.
    pub fn stages(&self, strands: usize) -> Vec<Option<usize>> {
        let mut stage = vec![None; strands];
        for (j, &s) in self.order.iter().enumerate() {
            if s < strands && stage[s].is_none() {
                stage[s] = Some(j);
            }
        }
        stage
    }
}

/// One fired move: `strand` took its color from `from` across head `head`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ColoringMove {
    pub strand: usize,
    pub head: usize,
    pub from: usize,
}

#[derive(Clone, Debug)]
pub struct Saturation {
    pub state: ColoringState,
    pub sequence: ColoringSequence,
    pub moves: Vec<ColoringMove>,
    pub steps: u64,
}

/// Worklist discipline for pending arrowheads.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WorklistOrder {
    Fifo,
    Lifo,
    /// Pending heads are drawn uniformly at random from the pool.
    Shuffled(u64),
}

/// Precomputed per-strand head lists; reusable across many seed sets.
pub struct Saturator<'a> {
    diagram: &'a GaussDiagram,
    incident: Vec<Vec<usize>>,
    colored: FixedBitSet,
    stack: Vec<usize>,
}

impl<'a> Saturator<'a> {
    pub fn new(diagram: &'a GaussDiagram) -> Self {
        let n = diagram.strand_count();
        let mut incident = vec![Vec::new(); n];
        for (i, h) in diagram.head_incidences().iter().enumerate() {
            for s in [h.before, h.after, h.tail_strand] {
                if incident[s].last() != Some(&i) {
                    incident[s].push(i);
                }
            }
        }
        for list in &mut incident {
            list.sort_unstable();
            list.dedup();
        }
        Saturator { diagram, incident, colored: FixedBitSet::with_capacity(n), stack: Vec::new() }
    }

    pub fn diagram(&self) -> &'a GaussDiagram {
        self.diagram
    }

    /// Saturates without recording a sequence. Returns whether every strand
    /// got colored, and the number of heads examined.
    pub fn colors_everything(&mut self, seeds: &[usize]) -> (bool, u64) {
        let heads = self.diagram.head_incidences();
        let n = self.diagram.strand_count();
        self.colored.clear();
        self.stack.clear();
        let mut count = 0;
        for &s in seeds {
            if !self.colored.put(s) {
                count += 1;
                self.stack.push(s);
            }
        }
        let mut steps = 0u64;
        while let Some(s) = self.stack.pop() {
            for &hi in &self.incident[s] {
                steps += 1;
                if let Some((target, _)) = fire(&heads[hi], |x| self.colored.contains(x)) {
                    self.colored.insert(target);
                    count += 1;
                    self.stack.push(target);
                }
            }
        }
        (count == n, steps)
    }

    /// Saturates from `seeds` (seed i gets color i+1), recording the
    /// coloring sequence and the justifying move for every non-seed strand.
    pub fn run(&self, seeds: &[usize], order: WorklistOrder) -> Saturation {
        let heads = self.diagram.head_incidences();
        let mut state = ColoringState::new(self.diagram.strand_count());
        let mut sequence = ColoringSequence { seed_count: 0, order: Vec::new(), colors: Vec::new() };
        let mut moves = Vec::new();
        let mut pool: VecDeque<usize> = VecDeque::new();
        let mut rng = match order {
            WorklistOrder::Shuffled(seed) => Some(StdRng::seed_from_u64(seed)),
            _ => None,
        };

        for &s in seeds {
            if state.is_colored(s) {
                continue;
            }
            let color = sequence.order.len() as u32 + 1;
            state.paint(s, color);
            sequence.order.push(s);
            sequence.colors.push(color);
            pool.extend(self.incident[s].iter().copied());
        }
        sequence.seed_count = sequence.order.len();

        let mut steps = 0u64;
        loop {
            let next = match order {
                WorklistOrder::Fifo => pool.pop_front(),
                WorklistOrder::Lifo => pool.pop_back(),
                WorklistOrder::Shuffled(_) => {
                    if pool.is_empty() {
                        None
                    } else {
                        let i = rng.as_mut().expect("rng").gen_range(0..pool.len());
                        pool.swap_remove_back(i)
                    }
                }
            };
            let Some(hi) = next else { break };
            steps += 1;
            if let Some((target, from)) = fire(&heads[hi], |x| state.is_colored(x)) {
                let color = state.color(from).expect("source strand is colored");
                state.paint(target, color);
                sequence.order.push(target);
                sequence.colors.push(color);
                moves.push(ColoringMove { strand: target, head: hi, from });
                pool.extend(self.incident[target].iter().copied());
            }
        }
        Saturation { state, sequence, moves, steps }
    }
}

/// If a move fires at `h`, returns (newly colored strand, strand it copies).
fn fire(h: &HeadIncidence, colored: impl Fn(usize) -> bool) -> Option<(usize, usize)> {
    if !colored(h.tail_strand) {
        return None;
    }
    match (colored(h.before), colored(h.after)) {
        (true, false) => Some((h.after, h.before)),
        (false, true) => Some((h.before, h.after)),
        _ => None,
    }
}

/// Saturates the coloring seeded by `seeds` with a first-in first-out worklist.
pub fn apply_coloring_moves(diagram: &GaussDiagram, seeds: &[usize]) -> Saturation {
    Saturator::new(diagram).run(seeds, WorklistOrder::Fifo)
}

pub fn apply_coloring_moves_with(
    diagram: &GaussDiagram,
    seeds: &[usize],
    order: WorklistOrder,
) -> Saturation {
    Saturator::new(diagram).run(seeds, order)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_k: Option<usize>,
    pub time_limit: Option<Duration>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub subsets_examined: u64,
    pub saturation_steps: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WirtingerResult {
    pub omega: usize,
    pub seed_set: Vec<usize>,
    pub sequence: ColoringSequence,
    pub stats: SearchStats,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("no seed set of size at most {max_k} colors the diagram")]
    Exhausted { max_k: usize },
    #[error("search timed out while examining seed sets of size {k}")]
    TimedOut { k: usize, stats: SearchStats },
}

/// Computes the Wirtinger number of the diagram: the least k such that some
/// k strands, one or more per component, color everything by moves.
///
/// Seed sets of each size are tried in lexicographic order of strand ids, so
/// the reported seed set is the lexicographically least among the minimum ones.
pub fn wirtinger_number(diagram: &GaussDiagram, limits: SearchLimits) -> Result<WirtingerResult, SearchError> {
    let deadline = limits.time_limit.map(|t| Instant::now() + t);
    wirtinger_number_until(diagram, limits.max_k, deadline)
}

pub fn wirtinger_number_until(
    diagram: &GaussDiagram,
    max_k: Option<usize>,
    deadline: Option<Instant>,
) -> Result<WirtingerResult, SearchError> {
    let n = diagram.strand_count();
    let comps = diagram.component_count();
    let top = max_k.unwrap_or(n).min(n);
    let mut search = SubsetSearch {
        saturator: Saturator::new(diagram),
        component_of: diagram.strands().iter().map(|s| s.component).collect(),
        last_of_component: (0..comps)
            .map(|c| diagram.component_strands(c).map(|s| s.id).max().expect("every component has a strand"))
            .collect(),
        covered: vec![0; comps],
        uncovered: comps,
        chosen: Vec::new(),
        stats: SearchStats::default(),
        deadline,
        timed_out: false,
    };

    for k in comps.max(1)..=top {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            return Err(SearchError::TimedOut { k, stats: search.stats });
        }
        if let Some(seeds) = search.first_success(k) {
            let sat = search.saturator.run(&seeds, WorklistOrder::Fifo);
            debug_assert!(sat.state.is_complete());
            return Ok(WirtingerResult { omega: k, seed_set: seeds, sequence: sat.sequence, stats: search.stats });
        }
        if search.timed_out {
            return Err(SearchError::TimedOut { k, stats: search.stats });
        }
    }
    Err(SearchError::Exhausted { max_k: top })
}

struct SubsetSearch<'a> {
    saturator: Saturator<'a>,
    component_of: Vec<usize>,
    last_of_component: Vec<usize>,
    covered: Vec<usize>,
    uncovered: usize,
    chosen: Vec<usize>,
    stats: SearchStats,
    deadline: Option<Instant>,
    timed_out: bool,
}

impl SubsetSearch<'_> {
    fn first_success(&mut self, k: usize) -> Option<Vec<usize>> {
        self.chosen.clear();
        if self.extend(0, k) {
            Some(self.chosen.clone())
        } else {
            None
        }
    }

    /// Depth-first lexicographic enumeration; true once a seed set succeeds.
    fn extend(&mut self, start: usize, k: usize) -> bool {
        let remaining = k - self.chosen.len();
        if remaining == 0 {
            if self.uncovered > 0 {
                return false;
            }
            self.stats.subsets_examined += 1;
            if self.stats.subsets_examined.is_multiple_of(256) {
                if let Some(d) = self.deadline {
                    if Instant::now() >= d {
                        self.timed_out = true;
                        return false;
                    }
                }
            }
            let (full, steps) = self.saturator.colors_everything(&self.chosen);
            self.stats.saturation_steps += steps;
            return full;
        }
        let n = self.component_of.len();
        for s in start..=n - remaining {
            if self.uncovered > remaining {
                return false;
            }
            // Every uncovered component must still have a strand at or after s.
            if self.uncovered > 0
                && (0..self.covered.len()).any(|c| self.covered[c] == 0 && self.last_of_component[c] < s)
            {
                return false;
            }
            let c = self.component_of[s];
            self.covered[c] += 1;
            if self.covered[c] == 1 {
                self.uncovered -= 1;
            }
            self.chosen.push(s);
            let found = self.extend(s + 1, k);
            if found {
                return true;
            }
            self.chosen.pop();
            self.covered[c] -= 1;
            if self.covered[c] == 0 {
                self.uncovered += 1;
            }
            if self.timed_out {
                return false;
            }
        }
        false
    }
}

/// Reason a coloring sequence fails to replay.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SequenceFault {
    #[error("sequence has {order} strands but {colors} colors")]
    LengthMismatch { order: usize, colors: usize },
    #[error("seed count {seed_count} exceeds sequence length")]
    TooManySeeds { seed_count: usize },
    #[error("entry {index}: strand {strand} does not exist")]
    UnknownStrand { index: usize, strand: usize },
    #[error("entry {index}: strand {strand} is already colored")]
    Repeated { index: usize, strand: usize },
    #[error("entry {index}: seed color {color} is reused")]
    SeedColorReused { index: usize, color: u32 },
    #[error("entry {index}: no legal move colors strand {strand} with color {color}")]
    NoLegalMove { index: usize, strand: usize, color: u32 },
    #[error("sequence leaves {missing} strands uncolored")]
    Incomplete { missing: usize },
}

impl SequenceFault {
    /// Index of the first offending entry, when the fault is local to one.
    pub fn index(&self) -> Option<usize> {
        match self {
            SequenceFault::UnknownStrand { index, .. }
            | SequenceFault::Repeated { index, .. }
            | SequenceFault::SeedColorReused { index, .. }
            | SequenceFault::NoLegalMove { index, .. } => Some(*index),
            _ => None,
        }
    }
}

/// Replays a coloring sequence: seeds are free, every later entry must be
/// the target of a move legal at that stage, and every strand must appear once.
pub fn verify_coloring_sequence(diagram: &GaussDiagram, seq: &ColoringSequence) -> Result<(), SequenceFault> {
    if seq.order.len() != seq.colors.len() {
        return Err(SequenceFault::LengthMismatch { order: seq.order.len(), colors: seq.colors.len() });
    }
    if seq.seed_count > seq.order.len() {
        return Err(SequenceFault::TooManySeeds { seed_count: seq.seed_count });
    }
    let n = diagram.strand_count();
    let mut state = ColoringState::new(n);
    let mut seed_colors = Vec::new();
    for (index, (&strand, &color)) in seq.order.iter().zip(&seq.colors).enumerate() {
        if strand >= n {
            return Err(SequenceFault::UnknownStrand { index, strand });
        }
        if state.is_colored(strand) {
            return Err(SequenceFault::Repeated { index, strand });
        }
        if index < seq.seed_count {
            if seed_colors.contains(&color) {
                return Err(SequenceFault::SeedColorReused { index, color });
            }
            seed_colors.push(color);
        } else {
            let legal = diagram.head_incidences().iter().any(|h| {
                fire(h, |x| state.is_colored(x))
                    .is_some_and(|(target, from)| target == strand && state.color(from) == Some(color))
            });
            if !legal {
                return Err(SequenceFault::NoLegalMove { index, strand, color });
            }
        }
        state.paint(strand, color);
    }
    let missing = n - state.colored_count();
    if missing > 0 {
        return Err(SequenceFault::Incomplete { missing });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CertificateError {
    #[error("the height certificate only applies to diagrams that are not cut-split")]
    CutSplitInput,
    #[error("invalid coloring sequence: {0}")]
    InvalidSequence(#[from] SequenceFault),
}

/// Checks that along every color class the height function has exactly one
/// local maximum, sitting at that color's seed strand.
pub fn verify_height_certificate(diagram: &GaussDiagram, seq: &ColoringSequence) -> Result<bool, CertificateError> {
    if diagram.is_cut_split() {
        return Err(CertificateError::CutSplitInput);
    }
    verify_coloring_sequence(diagram, seq)?;
    let n = diagram.strand_count();
    let stage = seq.stages(n);
    let mut color_of = vec![0u32; n];
    for (&s, &c) in seq.order.iter().zip(&seq.colors) {
        color_of[s] = c;
    }
    for (j, &seed) in seq.seeds().iter().enumerate() {
        let color = seq.colors[j];
        let comp = diagram.strands()[seed].component;
        let ring: Vec<usize> = diagram.component_strands(comp).map(|s| s.id).collect();
        let in_class: Vec<bool> = ring.iter().map(|&s| color_of[s] == color).collect();
        let class_size = in_class.iter().filter(|&&b| b).count();
        let total_size = color_of.iter().filter(|&&c| c == color).count();
        if class_size != total_size {
            // Class leaks onto another component.
            return Ok(false);
        }
        let arc = match class_arc(&in_class) {
            Some(arc) => arc,
            None => return Ok(false),
        };
        let h = |i: usize| 1.0 / (stage[ring[i]].expect("verified") as f64 + 2.0);
        let m = ring.len();
        let maxima: Vec<usize> = if arc.len() == 1 {
            vec![arc[0]]
        } else if arc.len() == m {
            (0..m).filter(|&i| h(i) > h((i + m - 1) % m) && h(i) > h((i + 1) % m)).collect()
        } else {
            let l = arc.len();
            (0..l)
                .filter(|&p| {
                    let here = h(arc[p]);
                    (p == 0 || here > h(arc[p - 1])) && (p + 1 == l || here > h(arc[p + 1]))
                })
                .map(|p| arc[p])
                .collect()
        };
        if maxima.len() != 1 || ring[maxima[0]] != seed {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Ring indices of a cyclically contiguous class, in traversal order, or
/// `None` if the class is empty or split into several arcs.
fn class_arc(in_class: &[bool]) -> Option<Vec<usize>> {
    let m = in_class.len();
    if in_class.iter().all(|&b| b) {
        return Some((0..m).collect());
    }
    let starts: Vec<usize> = (0..m).filter(|&i| in_class[i] && !in_class[(i + m - 1) % m]).collect();
    if starts.len() != 1 {
        return None;
    }
    let mut arc = Vec::new();
    let mut i = starts[0];
    while in_class[i] {
        arc.push(i);
        i = (i + 1) % m;
    }
    Some(arc)
}

/// A chord whose head separates two strands of the same final color while
/// its tail strand was colored no earlier than either of them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LowTailChord {
    pub chord: u32,
    pub head: usize,
    pub before: usize,
    pub after: usize,
    pub tail_strand: usize,
    pub color: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum LemmaCase {
    /// No chord has a low tail.
    NoLowTail,
    /// Knot colored from a single seed with exactly one low-tail chord.
    SingleSeedKnot { chord: u32 },
    /// Each low-tail chord's color fills a whole component, one chord per component.
    WholeComponent { classes: Vec<(u32, usize, u32)> },
    /// The low-tail chords do not fit either pattern (only possible off the
    /// hypotheses, e.g. for cut-split diagrams).
    Unexplained,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub cut_split: bool,
    pub low_tail_chords: Vec<LowTailChord>,
    pub case: LemmaCase,
}

/// Lists every low-tail chord of a verified sequence and says which of the
/// structural cases explains them.
pub fn lemma_witness(diagram: &GaussDiagram, seq: &ColoringSequence) -> Result<LemmaReport, SequenceFault> {
    verify_coloring_sequence(diagram, seq)?;
    let n = diagram.strand_count();
    let stage: Vec<usize> = seq.stages(n).into_iter().map(|s| s.expect("verified")).collect();
    let mut color_of = vec![0u32; n];
    for (&s, &c) in seq.order.iter().zip(&seq.colors) {
        color_of[s] = c;
    }
    // h(x) <= min(h(a), h(b)) is stage(x) >= max(stage(a), stage(b)).
    let low: Vec<LowTailChord> = diagram
        .head_incidences()
        .iter()
        .enumerate()
        .filter(|(_, h)| {
            color_of[h.before] == color_of[h.after]
                && stage[h.tail_strand] >= stage[h.before].max(stage[h.after])
        })
        .map(|(i, h)| LowTailChord {
            chord: h.chord,
            head: i,
            before: h.before,
            after: h.after,
            tail_strand: h.tail_strand,
            color: color_of[h.before],
        })
        .collect();

    let case = if low.is_empty() {
        LemmaCase::NoLowTail
    } else if diagram.is_knot() && low.len() == 1 && seq.seed_count == 1 {
        LemmaCase::SingleSeedKnot { chord: low[0].chord }
    } else {
        let mut classes = Vec::new();
        let mut ok = true;
        for c in &low {
            let comp = diagram.head_incidences()[c.head].component;
            let fills = diagram.component_strands(comp).all(|s| color_of[s.id] == c.color)
                && color_of.iter().filter(|&&x| x == c.color).count() == diagram.component_strands(comp).count();
            let unique = low.iter().filter(|o| diagram.head_incidences()[o.head].component == comp).count() == 1;
            if !(fills && unique) {
                ok = false;
                break;
            }
            classes.push((c.color, comp, c.chord));
        }
        if ok {
            LemmaCase::WholeComponent { classes }
        } else {
            LemmaCase::Unexplained
        }
    };
    Ok(LemmaReport { cut_split: diagram.is_cut_split(), low_tail_chords: low, case })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::{parse_gauss_code, strategies};
    use proptest::prelude::*;

    const D6: &str = "O1-O2-O3-U1-O4-U3-O5-U6-U2-U5-U4-O6-";
    const D3: &str = "O1-U2-O3-U1-O2-U3-";
    const DV: &str = "O1+O2+U1+U2+";

    fn d(code: &str) -> GaussDiagram {
        parse_gauss_code(code).unwrap()
    }

    #[test]
    fn example_knot_saturates_from_long_overbridge() {
        let sat = apply_coloring_moves(&d(D6), &[0]);
        assert!(sat.state.is_complete());
        assert_eq!(sat.sequence.order, vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(sat.sequence.colors, vec![1; 6]);
    }

    #[test]
    fn virtual_trefoil_single_move() {
        let sat = apply_coloring_moves(&d(DV), &[0]);
        assert_eq!(sat.sequence.order, vec![0, 1]);
        assert_eq!(sat.moves, vec![ColoringMove { strand: 1, head: 0, from: 0 }]);
    }

    #[test]
    fn trefoil_singletons_stall() {
        let t = d(D3);
        for s in 0..3 {
            let sat = apply_coloring_moves(&t, &[s]);
            assert_eq!(sat.state.colored_count(), 1);
        }
    }

    #[test]
    fn wirtinger_numbers_of_examples() {
        let r = wirtinger_number(&d(D6), SearchLimits::default()).unwrap();
        assert_eq!((r.omega, r.seed_set.clone()), (1, vec![0]));
        let r = wirtinger_number(&d(D3), SearchLimits::default()).unwrap();
        assert_eq!((r.omega, r.seed_set.clone()), (2, vec![0, 1]));
        let unlink = d(".|.").ensure_tail_per_component();
        assert_eq!(wirtinger_number(&unlink, SearchLimits::default()).unwrap().omega, 2);
        assert_eq!(wirtinger_number(&d("."), SearchLimits::default()).unwrap().omega, 1);
    }

    #[test]
    fn search_limits() {
        let err = wirtinger_number(&d(D3), SearchLimits { max_k: Some(1), time_limit: None }).unwrap_err();
        assert_eq!(err, SearchError::Exhausted { max_k: 1 });
        let err = wirtinger_number(&d(D3), SearchLimits { max_k: None, time_limit: Some(Duration::ZERO) });
        assert!(matches!(err, Err(SearchError::TimedOut { k: 1, .. })));
    }

    #[test]
    fn sequence_verification() {
        let r = wirtinger_number(&d(D6), SearchLimits::default()).unwrap();
        assert_eq!(verify_coloring_sequence(&d(D6), &r.sequence), Ok(()));

        // s2 colored from s1 across U1 needs s0 (tail of chord 1) colored; it is not.
        let bad = ColoringSequence { seed_count: 1, order: vec![1, 2, 0], colors: vec![1, 1, 1] };
        let fault = verify_coloring_sequence(&d(D3), &bad).unwrap_err();
        assert_eq!(fault.index(), Some(1));

        let seeds_only = ColoringSequence { seed_count: 2, order: vec![0, 1], colors: vec![1, 2] };
        assert_eq!(verify_coloring_sequence(&d(DV), &seeds_only), Ok(()));

        let short = ColoringSequence { seed_count: 1, order: vec![0], colors: vec![1] };
        assert_eq!(verify_coloring_sequence(&d(DV), &short), Err(SequenceFault::Incomplete { missing: 1 }));
        let wrong_color = ColoringSequence { seed_count: 1, order: vec![0, 1], colors: vec![1, 2] };
        assert!(matches!(
            verify_coloring_sequence(&d(DV), &wrong_color),
            Err(SequenceFault::NoLegalMove { index: 1, .. })
        ));
    }

    #[test]
    fn height_certificates() {
        let t = d(D3);
        let r = wirtinger_number(&t, SearchLimits::default()).unwrap();
        assert_eq!(verify_height_certificate(&t, &r.sequence), Ok(true));
        let k = d(D6);
        let r = wirtinger_number(&k, SearchLimits::default()).unwrap();
        assert_eq!(verify_height_certificate(&k, &r.sequence), Ok(true));
        let kink = d("O1+U1+");
        let seq = ColoringSequence { seed_count: 1, order: vec![0], colors: vec![1] };
        assert_eq!(verify_height_certificate(&kink, &seq), Err(CertificateError::CutSplitInput));
    }

    #[test]
    fn lemma_reports() {
        let k = d(D6);
        let r = wirtinger_number(&k, SearchLimits::default()).unwrap();
        // The only valid seed is s0 and every coloring order starts s0, s1;
        // no tail strand is colored after both sides of its head.
        let rep = lemma_witness(&k, &r.sequence).unwrap();
        assert_eq!(rep.case, LemmaCase::NoLowTail);

        let t = d(D3);
        let r = wirtinger_number(&t, SearchLimits::default()).unwrap();
        assert!(lemma_witness(&t, &r.sequence).unwrap().low_tail_chords.is_empty());

        // A knot whose last strand carries the tail of the closing chord.
        let kink = d("O1+U1+");
        let seq = ColoringSequence { seed_count: 1, order: vec![0], colors: vec![1] };
        let rep = lemma_witness(&kink, &seq).unwrap();
        assert_eq!(rep.case, LemmaCase::SingleSeedKnot { chord: 1 });
        assert!(rep.cut_split);

        // Two-component link: component 1 is colored from component 0 around
        // its circle; the closing head on it has its tail on the last strand.
        let link = d("O1+O2+O3+U1+|U2+U3+O4+U4+");
        let r = wirtinger_number(&link, SearchLimits::default()).unwrap();
        let rep = lemma_witness(&link, &r.sequence).unwrap();
        for c in &rep.low_tail_chords {
            assert!(color_class_is_component(&link, &r.sequence, c.color));
        }
    }

    fn color_class_is_component(d: &GaussDiagram, seq: &ColoringSequence, color: u32) -> bool {
        let members: Vec<usize> =
            seq.order.iter().zip(&seq.colors).filter(|(_, &c)| c == color).map(|(&s, _)| s).collect();
        let comp = d.strands()[members[0]].component;
        members.len() == d.component_strands(comp).count()
    }

    proptest! {
        #[test]
        fn saturation_is_confluent(diagram in strategies::diagram(2, 8), seed in any::<u64>(), pick in any::<u64>()) {
            let n = diagram.strand_count();
            let seeds: Vec<usize> = (0..n).filter(|i| (pick >> (i % 64)) & 1 == 1).collect();
            prop_assume!(!seeds.is_empty());
            let a = apply_coloring_moves(&diagram, &seeds);
            let b = apply_coloring_moves_with(&diagram, &seeds, WorklistOrder::Shuffled(seed));
            let c = apply_coloring_moves_with(&diagram, &seeds, WorklistOrder::Lifo);
            prop_assert_eq!(a.state.colored_set(), b.state.colored_set());
            prop_assert_eq!(a.state.colored_set(), c.state.colored_set());
            let (full, _) = Saturator::new(&diagram).colors_everything(&seeds);
            prop_assert_eq!(full, a.state.is_complete());
        }

        #[test]
        fn saturation_is_monotone(diagram in strategies::diagram(2, 8), pick in any::<u64>(), extra in any::<u64>()) {
            let n = diagram.strand_count();
            let small: Vec<usize> = (0..n).filter(|i| (pick >> (i % 64)) & 1 == 1).collect();
            prop_assume!(!small.is_empty());
            let large: Vec<usize> = (0..n).filter(|i| ((pick | extra) >> (i % 64)) & 1 == 1).collect();
            let a = apply_coloring_moves(&diagram, &small);
            let b = apply_coloring_moves(&diagram, &large);
            prop_assert!(a.state.colored_set().is_subset(b.state.colored_set()));
        }

        #[test]
        fn color_classes_stay_connected(diagram in strategies::diagram(2, 8), seed in any::<u64>()) {
            let diagram = diagram.ensure_tail_per_component();
            let r = wirtinger_number(&diagram, SearchLimits::default()).unwrap();
            prop_assert!(verify_coloring_sequence(&diagram, &r.sequence).is_ok());
            let sat = apply_coloring_moves_with(&diagram, &r.seed_set, WorklistOrder::Shuffled(seed));
            // Every prefix of the sequence has contiguous color classes on a single component.
            for len in 1..=sat.sequence.order.len() {
                for color in 1..=sat.sequence.seed_count as u32 {
                    let members: Vec<usize> = sat.sequence.order[..len].iter().zip(&sat.sequence.colors)
                        .filter(|(_, &c)| c == color).map(|(&s, _)| s).collect();
                    if members.is_empty() { continue; }
                    let comp = diagram.strands()[members[0]].component;
                    prop_assert!(members.iter().all(|&s| diagram.strands()[s].component == comp));
                    let ring: Vec<bool> = diagram.component_strands(comp).map(|s| members.contains(&s.id)).collect();
                    prop_assert!(class_arc(&ring).is_some());
                }
            }
        }

        #[test]
        fn overbridges_seed_everything(diagram in strategies::diagram(3, 8)) {
            let diagram = diagram.ensure_tail_per_component();
            let seeds = diagram.overbridges();
            let sat = apply_coloring_moves(&diagram, &seeds);
            prop_assert!(sat.state.is_complete());
            let r = wirtinger_number(&diagram, SearchLimits::default()).unwrap();
            prop_assert!(r.omega <= diagram.bridge_count());
            prop_assert!(r.omega >= diagram.component_count());
            if !diagram.is_cut_split() {
                prop_assert_eq!(verify_height_certificate(&diagram, &r.sequence), Ok(true));
            }
        }
    }
}
