//! Finite quandles given by operation tables, and coloring counts.
//!
//! At an arrowhead with sides `before`/`after`, tail strand `b` and sign
//! `ε`, a coloring must satisfy `after = before ▷^ε b`, the quandle image of
//! the Wirtinger relation `a_{i+1} = b^ε a_i b^-ε`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::coloring::{apply_coloring_moves, wirtinger_number, ColoringMove, SearchError, SearchLimits};
use crate::gauss::{GaussDiagram, Sign};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum QuandleError {
    #[error("table is not square or has entries outside 0..{order}")]
    Malformed { order: usize },
    #[error("{x} ▷ {x} = {value}, not {x}")]
    NotIdempotent { x: usize, value: usize },
    #[error("right multiplication by {y} is not a bijection ({x1} and {x2} collide)")]
    NotRightInvertible { y: usize, x1: usize, x2: usize },
    #[error("self-distributivity fails at ({x}, {y}, {z})")]
    NotDistributive { x: usize, y: usize, z: usize },
    #[error("quandle file: {0}")]
    Parse(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteQuandle {
    order: usize,
    table: Vec<usize>,
    inverse: Vec<usize>,
}

impl FiniteQuandle {
    /// Checks the three axioms and builds the right-inverse table.
    pub fn from_table(rows: Vec<Vec<usize>>) -> Result<Self, QuandleError> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n || r.iter().any(|&v| v >= n)) {
            return Err(QuandleError::Malformed { order: n });
        }
        let table: Vec<usize> = rows.into_iter().flatten().collect();
        let op = |x: usize, y: usize| table[x * n + y];
        for x in 0..n {
            if op(x, x) != x {
                return Err(QuandleError::NotIdempotent { x, value: op(x, x) });
            }
        }
        let mut inverse = vec![usize::MAX; n * n];
        for y in 0..n {
            for x in 0..n {
                let z = op(x, y);
                let slot = &mut inverse[z * n + y];
                if *slot != usize::MAX {
                    return Err(QuandleError::NotRightInvertible { y, x1: *slot, x2: x });
                }
                *slot = x;
            }
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if op(op(x, y), z) != op(op(x, z), op(y, z)) {
                        return Err(QuandleError::NotDistributive { x, y, z });
                    }
                }
            }
        }
        Ok(FiniteQuandle { order: n, table, inverse })
    }

    /// Trivial quandle `x ▷ y = x`.
    pub fn trivial(n: usize) -> Self {
        Self::from_table((0..n).map(|x| vec![x; n]).collect()).expect("trivial quandle")
    }

    /// Dihedral quandle `x ▷ y = 2y - x mod n`.
    pub fn dihedral(n: usize) -> Self {
        Self::from_table((0..n).map(|x| (0..n).map(|y| (2 * y + n - x) % n).collect()).collect())
            .expect("dihedral quandle")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn op(&self, x: usize, y: usize) -> usize {
        self.table[x * self.order + y]
    }

    /// The unique z with z ▷ y = x.
    pub fn op_inv(&self, x: usize, y: usize) -> usize {
        self.inverse[x * self.order + y]
    }

    pub fn op_signed(&self, x: usize, y: usize, sign: Sign) -> usize {
        match sign {
            Sign::Positive => self.op(x, y),
            Sign::Negative => self.op_inv(x, y),
        }
    }

    /// Whether `colors` (indexed by strand) satisfies every crossing relation.
    pub fn is_coloring(&self, d: &GaussDiagram, colors: &[usize]) -> bool {
        d.head_incidences()
            .iter()
            .all(|h| colors[h.after] == self.op_signed(colors[h.before], colors[h.tail_strand], h.sign))
    }
}

/// Text form: first line `n`, then `n` rows of `n` entries; row x, column y holds x ▷ y.
impl FromStr for FiniteQuandle {
    type Err = QuandleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lines = s.lines().map(str::trim).filter(|l| !l.is_empty());
        let n: usize = lines
            .next()
            .ok_or_else(|| QuandleError::Parse("missing order line".into()))?
            .parse()
            .map_err(|_| QuandleError::Parse("order is not an integer".into()))?;
        let rows: Vec<Vec<usize>> = lines
            .map(|l| {
                l.split_whitespace()
                    .map(|v| v.parse().map_err(|_| QuandleError::Parse(format!("bad entry {v:?}"))))
                    .collect()
            })
            .collect::<Result<_, _>>()?;
        if rows.len() != n {
            return Err(QuandleError::Parse(format!("expected {n} rows, found {}", rows.len())));
        }
        FiniteQuandle::from_table(rows)
    }
}

impl fmt::Display for FiniteQuandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.order)?;
        for x in 0..self.order {
            let row: Vec<String> = (0..self.order).map(|y| self.op(x, y).to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ColoringCountError {
    #[error("seed strands {0:?} do not generate the whole diagram")]
    SeedsDoNotGenerate(Vec<usize>),
    #[error(transparent)]
    Search(#[from] SearchError),
}

/// Counts quandle colorings. Each of the |X|^k assignments to the seed
/// strands is pushed along the coloring moves, which determine every other
/// strand; an assignment counts when all crossing relations then hold.
///
/// With `seeds = None` the minimal seed set from the Wirtinger search is used.
pub fn count_colorings(d: &GaussDiagram, x: &FiniteQuandle, seeds: Option<&[usize]>) -> Result<u64, ColoringCountError> {
    let seeds: Vec<usize> = match seeds {
        Some(s) => s.to_vec(),
        None => wirtinger_number(d, SearchLimits::default())?.seed_set,
    };
    let sat = apply_coloring_moves(d, &seeds);
    if !sat.state.is_complete() {
        return Err(ColoringCountError::SeedsDoNotGenerate(seeds));
    }
    let seed_strands = sat.sequence.seeds().to_vec();
    let heads = d.head_incidences();
    let q = x.order();
    let mut colors = vec![0usize; d.strand_count()];
    let mut digits = vec![0usize; seed_strands.len()];
    let mut count = 0u64;
    loop {
        for (&s, &v) in seed_strands.iter().zip(&digits) {
            colors[s] = v;
        }
        for &ColoringMove { strand, head, from } in &sat.moves {
            let h = &heads[head];
            let b = colors[h.tail_strand];
            colors[strand] = if from == h.before {
                x.op_signed(colors[from], b, h.sign)
            } else {
                // before = after ▷^-ε b
                x.op_signed(colors[from], b, flip(h.sign))
            };
        }
        if x.is_coloring(d, &colors) {
            count += 1;
        }
        // Next assignment in base |X|.
        let mut i = 0;
        loop {
            if i == digits.len() {
                return Ok(count);
            }
            digits[i] += 1;
            if digits[i] < q {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

fn flip(s: Sign) -> Sign {
    match s {
        Sign::Positive => Sign::Negative,
        Sign::Negative => Sign::Positive,
    }
}

/// `|X| <= Col_X(D) <= |X|^omega`.
pub fn sandwich_check(d: &GaussDiagram, x: &FiniteQuandle, omega: usize) -> Result<bool, ColoringCountError> {
    let count = count_colorings(d, x, None)?;
    let q = x.order() as u64;
    let ceiling = q.checked_pow(omega as u32).unwrap_or(u64::MAX);
    Ok(q <= count && count <= ceiling)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::{parse_gauss_code, strategies};
    use proptest::prelude::*;

    const D6: &str = "O1-O2-O3-U1-O4-U3-O5-U6-U2-U5-U4-O6-";
    const D3: &str = "O1-U2-O3-U1-O2-U3-";

    fn brute_force(d: &GaussDiagram, x: &FiniteQuandle) -> u64 {
        let n = d.strand_count();
        let q = x.order();
        let total = q.pow(n as u32);
        (0..total)
            .filter(|&code| {
                let colors: Vec<usize> = (0..n).map(|i| code / q.pow(i as u32) % q).collect();
                x.is_coloring(d, &colors)
            })
            .count() as u64
    }

    #[test]
    fn validation() {
        assert_eq!(FiniteQuandle::trivial(3).order(), 3);
        let r3 = FiniteQuandle::dihedral(3);
        assert_eq!(r3.op(0, 1), 2);
        for x in 0..3 {
            for y in 0..3 {
                assert_eq!(r3.op(r3.op_inv(x, y), y), x);
            }
        }
        let t3 = vec![vec![0, 0, 0], vec![1, 1, 1], vec![2, 2, 2]];
        assert_eq!(FiniteQuandle::from_table(t3), Ok(FiniteQuandle::trivial(3)));
        let not_bijective = vec![vec![0, 0], vec![0, 1]];
        assert!(matches!(
            FiniteQuandle::from_table(not_bijective),
            Err(QuandleError::NotRightInvertible { .. })
        ));
        assert!(matches!(
            FiniteQuandle::from_table(vec![vec![1, 0], vec![1, 0]]),
            Err(QuandleError::NotIdempotent { x: 0, value: 1 })
        ));
        // Columns act as (1 2), (0 2) and the identity: idempotent and
        // right-invertible, but (0 ▷ 1) ▷ 0 = 1 while (0 ▷ 0) ▷ (1 ▷ 0) = 0.
        let rows = vec![vec![0, 2, 0], vec![2, 1, 1], vec![1, 0, 2]];
        assert!(matches!(FiniteQuandle::from_table(rows), Err(QuandleError::NotDistributive { .. })));
        assert!(matches!(FiniteQuandle::from_table(vec![vec![0, 5], vec![1, 1]]), Err(QuandleError::Malformed { .. })));
    }

    #[test]
    fn text_round_trip() {
        let r3 = FiniteQuandle::dihedral(3);
        let text = r3.to_string();
        assert_eq!(text, "3\n0 2 1\n2 1 0\n1 0 2\n");
        assert_eq!(text.parse::<FiniteQuandle>().unwrap(), r3);
        assert!(matches!("2\n0 0\n".parse::<FiniteQuandle>(), Err(QuandleError::Parse(_))));
    }

    #[test]
    fn counts() {
        let r3 = FiniteQuandle::dihedral(3);
        let trefoil = parse_gauss_code(D3).unwrap();
        assert_eq!(brute_force(&trefoil, &r3), 9);
        assert_eq!(count_colorings(&trefoil, &r3, None), Ok(9));
        let k = parse_gauss_code(D6).unwrap();
        assert_eq!(count_colorings(&k, &r3, None), Ok(3));
        for n in 1..5 {
            assert_eq!(count_colorings(&k, &FiniteQuandle::trivial(n), None), Ok(n as u64));
        }
        assert_eq!(
            count_colorings(&trefoil, &r3, Some(&[0])),
            Err(ColoringCountError::SeedsDoNotGenerate(vec![0]))
        );
    }

    #[test]
    fn sandwiches() {
        let r3 = FiniteQuandle::dihedral(3);
        assert_eq!(sandwich_check(&parse_gauss_code(D3).unwrap(), &r3, 2), Ok(true));
        assert_eq!(sandwich_check(&parse_gauss_code(D6).unwrap(), &r3, 1), Ok(true));
        let kink = parse_gauss_code(".").unwrap().ensure_tail_per_component();
        assert_eq!(count_colorings(&kink, &r3, None), Ok(3));
        assert_eq!(sandwich_check(&kink, &r3, 1), Ok(true));
    }

    #[test]
    fn count_is_independent_of_seed_set() {
        let trefoil = parse_gauss_code(D3).unwrap();
        let r3 = FiniteQuandle::dihedral(3);
        for seeds in [[0, 1], [0, 2], [1, 2]] {
            assert_eq!(count_colorings(&trefoil, &r3, Some(&seeds)), Ok(9));
        }
    }

    fn small_quandles() -> Vec<FiniteQuandle> {
        let mut v = vec![FiniteQuandle::trivial(2), FiniteQuandle::trivial(3), FiniteQuandle::dihedral(3), FiniteQuandle::dihedral(4)];
        // Order 3: acting by 0 swaps 1 and 2, acting by 1 or 2 is trivial.
        v.push(FiniteQuandle::from_table(vec![vec![0, 0, 0], vec![2, 1, 1], vec![1, 2, 2]]).unwrap());
        v
    }

    proptest! {
        #[test]
        fn propagation_matches_brute_force(d in strategies::diagram(2, 5)) {
            let d = d.ensure_tail_per_component();
            prop_assume!(d.strand_count() <= 5);
            for x in small_quandles() {
                prop_assert_eq!(count_colorings(&d, &x, None).unwrap(), brute_force(&d, &x));
            }
        }

        #[test]
        fn trivial_quandle_counts_components(d in strategies::diagram(3, 6), n in 1usize..4) {
            let d = d.ensure_tail_per_component();
            let expected = (n as u64).pow(d.component_count() as u32);
            prop_assert_eq!(count_colorings(&d, &FiniteQuandle::trivial(n), None).unwrap(), expected);
        }

        #[test]
        fn every_generating_seed_set_gives_same_count(d in strategies::diagram(1, 6), pick in any::<u32>()) {
            let n = d.strand_count();
            let seeds: Vec<usize> = (0..n).filter(|i| (pick >> i) & 1 == 1).collect();
            prop_assume!(!seeds.is_empty() && apply_coloring_moves(&d, &seeds).state.is_complete());
            let r3 = FiniteQuandle::dihedral(3);
            prop_assert_eq!(count_colorings(&d, &r3, Some(&seeds)).unwrap(), count_colorings(&d, &r3, None).unwrap());
        }
    }
}
