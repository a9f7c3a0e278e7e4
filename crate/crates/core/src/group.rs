//! Wirtinger presentations, Fox calculus and elementary-ideal lower bounds.

use std::collections::{BTreeSet, HashMap};
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::gauss::{GaussDiagram, Sign};
use crate::laurent::Laurent;

pub const DEFAULT_PRIME_BOUND: u64 = 97;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("ideal index {k} out of range for {generators} generators")]
    BadIndex { k: usize, generators: usize },
    #[error("the diagram has {components} components; a knot diagram is required")]
    NotAKnot { components: usize },
    #[error("minor enumeration needs at most 64 columns, got {columns}")]
    TooLarge { columns: usize },
    #[error("deadline passed during minor enumeration")]
    TimedOut,
}

/// `after = conjugator^sign · before · conjugator^-sign`, read at one arrowhead.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Relation {
    pub chord: u32,
    pub before: usize,
    pub after: usize,
    pub conjugator: usize,
    pub sign: Sign,
}

impl Relation {
    /// The relator `b^ε a_i b^-ε a_{i+1}^-1` as (generator, ±1) letters.
    pub fn word(&self) -> Vec<(usize, i32)> {
        let e = self.sign.exponent();
        vec![(self.conjugator, e), (self.before, 1), (self.conjugator, -e), (self.after, -1)]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Presentation {
    pub generators: usize,
    pub relations: Vec<Relation>,
}

/// Generators are the strands; each arrowhead contributes one relation.
pub fn wirtinger_presentation(diagram: &GaussDiagram) -> Presentation {
    let relations = diagram
        .head_incidences()
        .iter()
        .map(|h| Relation { chord: h.chord, before: h.before, after: h.after, conjugator: h.tail_strand, sign: h.sign })
        .collect();
    Presentation { generators: diagram.strand_count(), relations }
}

/// Fox derivative of a free-group word with respect to `x`, pushed through
/// the abelianization sending every generator to `t`.
pub fn fox_derivative(word: &[(usize, i32)], x: usize) -> Laurent {
    let mut out = Laurent::zero();
    let mut prefix = 0i32;
    for &(g, e) in word {
        debug_assert!(e == 1 || e == -1);
        if g == x {
            // d(x)/dx = 1, d(x^-1)/dx = -x^-1, each multiplied by the prefix.
            out += &if e == 1 { Laurent::monomial(1, prefix) } else { Laurent::monomial(-1, prefix - 1) };
        }
        prefix += e;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlexanderMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<Laurent>>,
}

impl AlexanderMatrix {
    pub fn entry(&self, r: usize, c: usize) -> &Laurent {
        &self.entries[r][c]
    }

    pub fn row_sum_at_one(&self, r: usize) -> i128 {
        self.entries[r].iter().map(|p| p.eval_unit(1)).sum()
    }

    /// Determinant of the submatrix on `rows` x `cols` (equal lengths).
    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> Laurent {
        assert_eq!(rows.len(), cols.len());
        let mask = cols.iter().fold(0u64, |m, &c| m | (1 << c));
        let mut memo = HashMap::new();
        self.cofactor(rows, 0, mask, &mut memo)
    }

    /// Laplace expansion along `rows[depth]` over the columns left in
    /// `mask`, memoized on the remaining column set.
    fn cofactor(&self, rows: &[usize], depth: usize, mask: u64, memo: &mut HashMap<u64, Laurent>) -> Laurent {
        if depth == rows.len() {
            return Laurent::one();
        }
        if let Some(v) = memo.get(&mask) {
            return v.clone();
        }
        let mut acc = Laurent::zero();
        let mut rest = mask;
        let mut idx = 0;
        while rest != 0 {
            let c = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let a = &self.entries[rows[depth]][c];
            if !a.is_zero() {
                let sub = self.cofactor(rows, depth + 1, mask & !(1 << c), memo);
                let term = a * &sub;
                acc += &if idx % 2 == 0 { term } else { -term };
            }
            idx += 1;
        }
        memo.insert(mask, acc.clone());
        acc
    }
}

/// Rows are relations, columns generators; entries are abelianized Fox derivatives.
pub fn alexander_matrix(p: &Presentation) -> AlexanderMatrix {
    let entries = p
        .relations
        .iter()
        .map(|r| {
            let w = r.word();
            (0..p.generators).map(|g| fox_derivative(&w, g)).collect()
        })
        .collect();
    AlexanderMatrix { rows: p.relations.len(), cols: p.generators, entries }
}

/// Generators of the k-th elementary ideal: all (n-k)x(n-k) minors, up to
/// units `±t^m`, deduplicated and sorted.
pub fn elementary_ideal_generators(a: &AlexanderMatrix, k: usize) -> Result<Vec<Laurent>, GroupError> {
    elementary_ideal_generators_until(a, k, None)
}

pub(crate) fn elementary_ideal_generators_until(
    a: &AlexanderMatrix,
    k: usize,
    deadline: Option<Instant>,
) -> Result<Vec<Laurent>, GroupError> {
    if k >= a.cols {
        return Err(GroupError::BadIndex { k, generators: a.cols });
    }
    let m = a.cols - k;
    if m > a.rows {
        return Ok(Vec::new());
    }
    if a.cols > 64 {
        return Err(GroupError::TooLarge { columns: a.cols });
    }
    let mut found = BTreeSet::new();
    for rows in combinations(a.rows, m) {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            return Err(GroupError::TimedOut);
        }
        let mut memo = HashMap::new();
        for cols in combinations(a.cols, m) {
            let mask = cols.iter().fold(0u64, |acc, &c| acc | (1 << c));
            found.insert(a.cofactor(&rows, 0, mask, &mut memo).normalized());
        }
    }
    Ok(found.into_iter().collect())
}

fn combinations(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(m);
    fn rec(start: usize, n: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for i in start..=n - (m - cur.len()) {
            cur.push(i);
            rec(i + 1, n, m, cur, out);
            cur.pop();
        }
    }
    if m <= n {
        rec(0, n, m, &mut cur, &mut out);
    }
    out
}

/// A prime `p` and unit `u` at which every generator vanishes mod `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ModularWitness {
    pub prime: u64,
    pub unit: u64,
}

impl ModularWitness {
    pub fn holds_for(&self, gens: &[Laurent]) -> bool {
        gens.iter().all(|g| g.eval_mod(self.prime, self.unit) == 0)
    }
}

pub fn primes_up_to(bound: u64) -> Vec<u64> {
    (2..=bound).filter(|&n| (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)).collect()
}

/// Searches primes `p <= prime_bound` and units `1 <= u < p` in increasing
/// order for a point where the whole ideal vanishes. A hit proves the ideal
/// is proper; a miss proves nothing.
pub fn properness_certificate(gens: &[Laurent], prime_bound: u64) -> Option<ModularWitness> {
    primes_up_to(prime_bound).into_iter().find_map(|p| {
        (1..p).map(|u| ModularWitness { prime: p, unit: u }).find(|w| w.holds_for(gens))
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdealCertificate {
    pub k: usize,
    pub generators: Vec<Laurent>,
    pub proper_witness: Option<ModularWitness>,
    pub nontrivial: bool,
}

impl IdealCertificate {
    pub fn certifies_bound(&self) -> bool {
        self.nontrivial && self.proper_witness.is_some_and(|w| w.holds_for(&self.generators))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdealBound {
    pub bound: usize,
    pub certificates: Vec<IdealCertificate>,
}

/// `1 + max k <= k_max` such that E_k is certified proper and is nonzero.
///
/// Stops early once some E_k contains a unit or admits no witness, since
/// E_k ⊆ E_{k+1} and neither condition can improve at larger k.
pub fn ideal_lower_bound(diagram: &GaussDiagram, k_max: usize, prime_bound: u64) -> Result<IdealBound, GroupError> {
    ideal_lower_bound_until(diagram, k_max, prime_bound, None)
}

pub(crate) fn ideal_lower_bound_until(
    diagram: &GaussDiagram,
    k_max: usize,
    prime_bound: u64,
    deadline: Option<Instant>,
) -> Result<IdealBound, GroupError> {
    if !diagram.is_knot() {
        return Err(GroupError::NotAKnot { components: diagram.component_count() });
    }
    let a = alexander_matrix(&wirtinger_presentation(diagram));
    let mut best = 0;
    let mut certificates = Vec::new();
    for k in 1..=k_max.min(a.cols.saturating_sub(1)) {
        let generators = elementary_ideal_generators_until(&a, k, deadline)?;
        if generators.iter().any(Laurent::is_unit) {
            break;
        }
        let proper_witness = properness_certificate(&generators, prime_bound);
        let nontrivial = generators.iter().any(|g| !g.is_zero());
        let cert = IdealCertificate { k, generators, proper_witness, nontrivial };
        let stop = cert.proper_witness.is_none();
        if cert.certifies_bound() {
            best = k;
        }
        certificates.push(cert);
        if stop {
            break;
        }
    }
    Ok(IdealBound { bound: best + 1, certificates })
}
