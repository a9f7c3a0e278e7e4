//! Integer Laurent polynomials in one variable `t`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Exact polynomial in `t` and `t⁻¹` with `i128` coefficients. Zero
/// coefficients are never stored. Arithmetic panics on overflow rather than
/// wrapping.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Laurent {
    terms: BTreeMap<i32, i128>,
}

impl Laurent {
    pub fn zero() -> Self {
        Laurent::default()
    }

    pub fn one() -> Self {
        Laurent::monomial(1, 0)
    }

    pub fn constant(c: i128) -> Self {
        Laurent::monomial(c, 0)
    }

    /// `c * t^exp`.
    pub fn monomial(c: i128, exp: i32) -> Self {
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(exp, c);
        }
        Laurent { terms }
    }

    pub fn t() -> Self {
        Laurent::monomial(1, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True for `±t^m`, the units of the Laurent ring.
    pub fn is_unit(&self) -> bool {
        self.terms.len() == 1 && self.terms.values().all(|c| c.abs() == 1)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, i128)> + '_ {
        self.terms.iter().map(|(&e, &c)| (e, c))
    }

    pub fn coefficient(&self, exp: i32) -> i128 {
        self.terms.get(&exp).copied().unwrap_or(0)
    }

    pub fn min_exponent(&self) -> Option<i32> {
        self.terms.keys().next().copied()
    }

    pub fn max_exponent(&self) -> Option<i32> {
        self.terms.keys().next_back().copied()
    }

    fn add_term(&mut self, exp: i32, c: i128) {
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(exp).or_insert(0);
        *entry = entry.checked_add(c).expect("Laurent coefficient overflow");
        if *entry == 0 {
            self.terms.remove(&exp);
        }
    }

    /// Multiplies by `t^shift`.
    pub fn shifted(&self, shift: i32) -> Laurent {
        Laurent { terms: self.terms.iter().map(|(&e, &c)| (e + shift, c)).collect() }
    }

    /// Representative of the class up to units `±t^m`: lowest exponent 0 and
    /// positive top coefficient. Zero stays zero.
    pub fn normalized(&self) -> Laurent {
        let Some(lo) = self.min_exponent() else {
            return Laurent::zero();
        };
        let mut out = self.shifted(-lo);
        if out.terms.values().next_back().is_some_and(|&c| c < 0) {
            out = -out;
        }
        out
    }

    /// Exact value at an integer point where the value is defined; `t⁻¹`
    /// terms require `x = ±1`.
    pub fn eval_unit(&self, x: i128) -> i128 {
        assert!(x == 1 || x == -1, "eval_unit only supports t = ±1");
        self.terms
            .iter()
            .map(|(&e, &c)| if x == -1 && e.rem_euclid(2) == 1 { -c } else { c })
            .fold(0i128, |acc, c| acc.checked_add(c).expect("overflow"))
    }

    /// Value at `t = u` in Z/p, with `t⁻¹` read as the inverse of `u`.
    /// Requires `p` prime and `u` nonzero mod `p`.
    pub fn eval_mod(&self, p: u64, u: u64) -> u64 {
        let p128 = p as i128;
        let u = u % p;
        assert!(u != 0, "t must be a unit mod p");
        let inv = pow_mod(u, p - 2, p);
        let mut acc: i128 = 0;
        for (&e, &c) in &self.terms {
            let base = if e >= 0 { pow_mod(u, e as u64, p) } else { pow_mod(inv, e.unsigned_abs() as u64, p) };
            acc = (acc + c.rem_euclid(p128) * base as i128) % p128;
        }
        acc as u64
    }
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r: u64 = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as u128 * b as u128) % p as u128) as u64;
        }
        b = ((b as u128 * b as u128) % p as u128) as u64;
        e >>= 1;
    }
    r
}

impl Add for &Laurent {
    type Output = Laurent;
    fn add(self, rhs: &Laurent) -> Laurent {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for Laurent {
    type Output = Laurent;
    fn add(mut self, rhs: Laurent) -> Laurent {
        self += &rhs;
        self
    }
}

impl AddAssign<&Laurent> for Laurent {
    fn add_assign(&mut self, rhs: &Laurent) {
        for (&e, &c) in &rhs.terms {
            self.add_term(e, c);
        }
    }
}

impl Neg for Laurent {
    type Output = Laurent;
    fn neg(self) -> Laurent {
        Laurent { terms: self.terms.into_iter().map(|(e, c)| (e, -c)).collect() }
    }
}

impl Neg for &Laurent {
    type Output = Laurent;
    fn neg(self) -> Laurent {
        -self.clone()
    }
}

impl Sub for &Laurent {
    type Output = Laurent;
    fn sub(self, rhs: &Laurent) -> Laurent {
        self + &(-rhs)
    }
}

impl Sub for Laurent {
    type Output = Laurent;
    fn sub(self, rhs: Laurent) -> Laurent {
        &self - &rhs
    }
}

impl Mul for &Laurent {
    type Output = Laurent;
    fn mul(self, rhs: &Laurent) -> Laurent {
        let mut out = Laurent::zero();
        for (&ea, &ca) in &self.terms {
            for (&eb, &cb) in &rhs.terms {
                out.add_term(ea + eb, ca.checked_mul(cb).expect("Laurent coefficient overflow"));
            }
        }
        out
    }
}

impl Mul for Laurent {
    type Output = Laurent;
    fn mul(self, rhs: Laurent) -> Laurent {
        &self * &rhs
    }
}

/// Renders as `coeff*t^exp` terms from the highest exponent down, e.g.
/// `1*t^2-1*t^1+1*t^0`. The zero polynomial renders as `0`.
impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (&e, &c)) in self.terms.iter().rev().enumerate() {
            if i > 0 && c > 0 {
                f.write_str("+")?;
            }
            write!(f, "{c}*t^{e}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("malformed Laurent polynomial: {0}")]
pub struct LaurentParseError(String);

impl FromStr for Laurent {
    type Err = LaurentParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s == "0" {
            return Ok(Laurent::zero());
        }
        if s.is_empty() {
            return Err(LaurentParseError("empty".into()));
        }
        // Split before every sign that starts a term (not one following '^').
        let bytes = s.as_bytes();
        let mut pieces = Vec::new();
        let mut start = 0;
        for i in 1..bytes.len() {
            if (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'^' {
                pieces.push(&s[start..i]);
                start = i;
            }
        }
        pieces.push(&s[start..]);
        let mut out = Laurent::zero();
        for piece in pieces {
            let piece = piece.strip_prefix('+').unwrap_or(piece);
            let (coeff, exp) = piece
                .split_once("*t^")
                .ok_or_else(|| LaurentParseError(format!("term {piece:?}")))?;
            let c: i128 = coeff.parse().map_err(|_| LaurentParseError(format!("coefficient {coeff:?}")))?;
            let e: i32 = exp.parse().map_err(|_| LaurentParseError(format!("exponent {exp:?}")))?;
            out.add_term(e, c);
        }
        Ok(out)
    }
}

impl Serialize for Laurent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Laurent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
