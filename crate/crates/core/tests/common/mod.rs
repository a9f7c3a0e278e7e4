//! Shared helpers for the integration suites: an independent brute-force
//! Wirtinger oracle and seeded random diagram generators.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use vwirtinger::gauss::{EndKind, GaussDiagram, Sign, Token};

pub const D6: &str = "O1-O2-O3-U1-O4-U3-O5-U6-U2-U5-U4-O6-";
pub const D3: &str = "O1-U2-O3-U1-O2-U3-";
pub const DV: &str = "O1+O2+U1+U2+";

/// Arrowhead data rebuilt from raw tokens, without the library's strand code.
pub struct RawHeads {
    pub strands: usize,
    pub component_of: Vec<usize>,
    /// (tail strand, before, after)
    pub heads: Vec<(usize, usize, usize)>,
}

pub fn raw_heads(components: &[Vec<Token>]) -> RawHeads {
    // Strand of a position: the number of heads strictly before the next
    // head at or after it, cyclically; one strand for head-free circles.
    let mut offset = 0;
    let mut strand_of = Vec::new();
    let mut head_slots = Vec::new();
    let mut component_of = Vec::new();
    for (c, comp) in components.iter().enumerate() {
        let heads: Vec<usize> = (0..comp.len()).filter(|&p| comp[p].kind == EndKind::Head).collect();
        let m = heads.len().max(1);
        let mut row = vec![0; comp.len()];
        for p in 0..comp.len() {
            let next = heads.iter().position(|&h| h >= p).unwrap_or(0);
            row[p] = offset + next;
        }
        for (i, &h) in heads.iter().enumerate() {
            head_slots.push((comp[h].label, offset + i, offset + (i + 1) % m));
        }
        component_of.extend(std::iter::repeat(c).take(m));
        strand_of.push(row);
        offset += m;
    }
    let tail_strand = |label: u32| {
        for (c, comp) in components.iter().enumerate() {
            for (p, t) in comp.iter().enumerate() {
                if t.label == label && t.kind == EndKind::Tail {
                    return strand_of[c][p];
                }
            }
        }
        unreachable!("chord without tail")
    };
    let heads = head_slots.into_iter().map(|(label, b, a)| (tail_strand(label), b, a)).collect();
    RawHeads { strands: offset, component_of, heads }
}

/// Whether some sequence of single coloring moves reaches the full set,
/// exploring every reachable colored set breadth first.
fn reaches_everything(raw: &RawHeads, seeds: u64) -> bool {
    let full = (1u64 << raw.strands) - 1;
    let mut seen = std::collections::HashSet::from([seeds]);
    let mut queue = std::collections::VecDeque::from([seeds]);
    while let Some(s) = queue.pop_front() {
        if s == full {
            return true;
        }
        for &(t, b, a) in &raw.heads {
            let has = |x: usize| s >> x & 1 == 1;
            if !has(t) || has(b) == has(a) {
                continue;
            }
            let next = s | 1 << b | 1 << a;
            if seen.insert(next) {
                queue.push_back(next);
            }
        }
    }
    false
}

/// Least number of seeds from which moves can color every strand.
pub fn oracle_omega(components: &[Vec<Token>]) -> usize {
    let raw = raw_heads(components);
    assert!(raw.strands < 40, "oracle is exponential");
    for k in 1..=raw.strands {
        for mask in 0u64..1 << raw.strands {
            if mask.count_ones() as usize == k && reaches_everything(&raw, mask) {
                return k;
            }
        }
    }
    raw.strands
}

fn sign(positive: bool) -> Sign {
    if positive {
        Sign::Positive
    } else {
        Sign::Negative
    }
}

/// Random diagram: `chords` chords with endpoints scattered over `comps`
/// circles. Circles may end up chordless or without tails.
pub fn random_diagram<R: Rng>(rng: &mut R, comps: usize, chords: usize) -> GaussDiagram {
    let mut out: Vec<Vec<Token>> = vec![Vec::new(); comps];
    for label in 1..=chords as u32 {
        let s = sign(rng.gen());
        for t in [Token::tail(label, s), Token::head(label, s)] {
            let c = rng.gen_range(0..comps);
            let at = rng.gen_range(0..=out[c].len());
            out[c].insert(at, t);
        }
    }
    GaussDiagram::from_components(out).expect("generated diagram is valid")
}

/// The property-test corpus: `count` normalized diagrams with 1 to 3
/// components and at most `max_chords` chords.
pub fn corpus<R: Rng>(rng: &mut R, count: usize, max_chords: usize) -> Vec<GaussDiagram> {
    (0..count)
        .map(|_| {
            let comps = rng.gen_range(1..=3);
            let chords = rng.gen_range(0..=max_chords);
            random_diagram(rng, comps, chords).ensure_tail_per_component()
        })
        .collect()
}

/// Random one-overbridge knot diagram: a block of tails in random order,
/// then a block of heads in random order, rotated by a random amount.
pub fn random_one_overbridge<R: Rng>(rng: &mut R, chords: usize) -> GaussDiagram {
    let signs: Vec<Sign> = (0..chords).map(|_| sign(rng.gen())).collect();
    let mut tails: Vec<u32> = (1..=chords as u32).collect();
    let mut heads = tails.clone();
    tails.shuffle(rng);
    heads.shuffle(rng);
    let mut tokens: Vec<Token> = tails
        .iter()
        .map(|&l| Token::tail(l, signs[l as usize - 1]))
        .chain(heads.iter().map(|&l| Token::head(l, signs[l as usize - 1])))
        .collect();
    if !tokens.is_empty() {
        let r = rng.gen_range(0..tokens.len());
        tokens.rotate_left(r);
    }
    GaussDiagram::from_components(vec![tokens]).expect("generated diagram is valid")
}

/// Every single-component diagram with exactly `n` chords, labels in order
/// of first appearance, all sign choices. Calls `f` on each token list.
pub fn for_each_knot_code(n: usize, mut f: impl FnMut(&[Token])) {
    fn walk(
        n: usize,
        code: &mut Vec<(u32, EndKind)>,
        open: &mut Vec<(u32, EndKind)>,
        f: &mut dyn FnMut(&[(u32, EndKind)]),
    ) {
        if code.len() == 2 * n {
            f(code);
            return;
        }
        let next = code.iter().map(|&(l, _)| l).max().unwrap_or(0) + 1;
        let remaining = 2 * n - code.len();
        if (next as usize) <= n && open.len() < remaining {
            for kind in [EndKind::Tail, EndKind::Head] {
                let other = if kind == EndKind::Tail { EndKind::Head } else { EndKind::Tail };
                code.push((next, kind));
                open.push((next, other));
                walk(n, code, open, f);
                open.pop();
                code.pop();
            }
        }
        for i in 0..open.len() {
            let pending = open.remove(i);
            code.push(pending);
            walk(n, code, open, f);
            code.pop();
            open.insert(i, pending);
        }
    }
    let mut tokens = Vec::with_capacity(2 * n);
    walk(n, &mut Vec::new(), &mut Vec::new(), &mut |code| {
        for signs in 0u32..1 << n {
            tokens.clear();
            tokens.extend(code.iter().map(|&(l, kind)| Token { kind, label: l, sign: sign(signs >> (l - 1) & 1 == 0) }));
            f(&tokens);
        }
    });
}
