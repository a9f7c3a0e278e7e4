//! Gaussian parity of chords and the parity projection of knot diagrams.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::gauss::GaussDiagram;
use crate::group::{ideal_lower_bound, GroupError};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParityError {
    #[error("parity is defined for knot diagrams; got {components} components")]
    NotAKnot { components: usize },
}

/// Chord id to parity bit.
pub type ParityMap = BTreeMap<u32, u8>;

fn require_knot(d: &GaussDiagram) -> Result<(), ParityError> {
    if d.is_knot() {
        Ok(())
    } else {
        Err(ParityError::NotAKnot { components: d.component_count() })
    }
}

/// Two chords intersect when their endpoints alternate around the circle.
fn interleaved(a: (usize, usize), b: (usize, usize)) -> bool {
    let inside = |x: usize, (lo, hi): (usize, usize)| lo < x && x < hi;
    inside(b.0, a) != inside(b.1, a)
}

/// Number of intersecting chords, mod 2, for every chord.
pub fn gaussian_parity(d: &GaussDiagram) -> Result<ParityMap, ParityError> {
    require_knot(d)?;
    let spans: Vec<(u32, (usize, usize))> = d
        .chords()
        .iter()
        .map(|c| {
            let (x, y) = (c.head.position, c.tail.position);
            (c.id, (x.min(y), x.max(y)))
        })
        .collect();
    Ok(spans
        .iter()
        .map(|&(id, a)| {
            let crossings = spans.iter().filter(|&&(other, b)| other != id && interleaved(a, b)).count();
            (id, (crossings % 2) as u8)
        })
        .collect())
}

/// Erases every odd chord. Applied once; parities of the result may differ.
pub fn parity_projection(d: &GaussDiagram) -> Result<GaussDiagram, ParityError> {
    let parity = gaussian_parity(d)?;
    let odd: Vec<u32> = parity.iter().filter(|(_, &f)| f == 1).map(|(&id, _)| id).collect();
    Ok(d.without_chords(&odd))
}

/// Projects repeatedly until no odd chord remains. Returns every stage,
/// starting with `d` itself.
pub fn iterated_parity_projection(d: &GaussDiagram) -> Result<Vec<GaussDiagram>, ParityError> {
    let mut stages = vec![d.clone()];
    loop {
        let last = stages.last().expect("nonempty");
        let next = parity_projection(last)?;
        if next.chords().len() == last.chords().len() {
            return Ok(stages);
        }
        stages.push(next);
    }
}

/// Ideal lower bound of the projection, a lower bound on the virtual bridge
/// number of the knot `d` represents.
pub fn parity_lower_bound(d: &GaussDiagram, k_max: usize, prime_bound: u64) -> Result<usize, ParityError> {
    let projected = parity_projection(d)?.ensure_tail_per_component();
    match ideal_lower_bound(&projected, k_max, prime_bound) {
        Ok(b) => Ok(b.bound),
        Err(GroupError::NotAKnot { components }) => Err(ParityError::NotAKnot { components }),
        Err(e) => unreachable!("knot ideal bound failed: {e}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::{parse_gauss_code, strategies};
    use proptest::prelude::*;

    const D3: &str = "O1-U2-O3-U1-O2-U3-";
    const DV: &str = "O1+O2+U1+U2+";

    fn d(code: &str) -> GaussDiagram {
        parse_gauss_code(code).unwrap()
    }

    #[test]
    fn parities() {
        assert!(gaussian_parity(&d(D3)).unwrap().values().all(|&f| f == 0));
        assert!(gaussian_parity(&d(DV)).unwrap().values().all(|&f| f == 1));
        assert_eq!(gaussian_parity(&d("O1+U1+")).unwrap(), ParityMap::from([(1, 0)]));
        assert_eq!(gaussian_parity(&d(".|.")), Err(ParityError::NotAKnot { components: 2 }));
    }

    #[test]
    fn projections() {
        assert_eq!(parity_projection(&d(D3)).unwrap(), d(D3));
        assert_eq!(parity_projection(&d(DV)).unwrap().to_string(), ".");
        assert_eq!(parity_projection(&d(".")).unwrap().to_string(), ".");
    }

    #[test]
    fn iterated_projection_stops_at_fixed_point() {
        // Chord 1 crosses 2 and 3 (even); chords 2 and 3 cross only chord 1 (odd).
        let stages = iterated_parity_projection(&d("O1+O2+O3+U1+U3+U2+")).unwrap();
        let codes: Vec<String> = stages.iter().map(|s| s.to_string()).collect();
        assert_eq!(codes, vec!["O1+O2+O3+U1+U3+U2+", "O1+U1+"]);
        assert!(gaussian_parity(&stages[1]).unwrap().values().all(|&f| f == 0));
    }

    #[test]
    fn parity_bounds() {
        assert_eq!(parity_lower_bound(&d(DV), 2, 97), Ok(1));
        assert_eq!(parity_lower_bound(&d(D3), 2, 97), Ok(2));
        assert_eq!(parity_lower_bound(&d("."), 2, 97), Ok(1));
    }

    proptest! {
        #[test]
        fn projection_is_valid_and_small(diagram in strategies::diagram(1, 8)) {
            let p = parity_projection(&diagram).unwrap();
            let reparsed = parse_gauss_code(&p.to_string()).unwrap();
            prop_assert_eq!(&reparsed, &p);
            prop_assert!(p.bridge_count() <= diagram.bridge_count() + 1);
        }

        #[test]
        fn parity_matches_alternation_count(diagram in strategies::diagram(1, 8)) {
            // Independent count: a chord d crosses c iff exactly one endpoint
            // of d lies strictly between the endpoints of c, walking the code.
            let f = gaussian_parity(&diagram).unwrap();
            let tokens = &diagram.components()[0];
            for c in diagram.chords() {
                let ends: Vec<usize> = (0..tokens.len()).filter(|&i| tokens[i].label == c.id).collect();
                let mut seen = BTreeMap::new();
                for t in &tokens[ends[0] + 1..ends[1]] {
                    *seen.entry(t.label).or_insert(0) += 1;
                }
                let crossings = seen.values().filter(|&&v| v == 1).count();
                prop_assert_eq!(f[&c.id] as usize, crossings % 2);
            }
        }
    }
}
