//! Rational points of a product of projective spaces in canonical integer
//! coordinates.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::DynamicsError;
use crate::geometry::ProductSpace;
use crate::scalar::decimal_digits;

/// Per factor, a primitive integer vector whose first nonzero entry is
/// positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProjPoint {
    coords: Vec<Vec<BigInt>>,
}

impl ProjPoint {
    /// Canonicalizes each factor; fails on a zero vector.
    pub fn new(coords: Vec<Vec<BigInt>>) -> Result<Self, DynamicsError> {
        let mut out = Vec::with_capacity(coords.len());
        for (j, v) in coords.into_iter().enumerate() {
            if v.is_empty() || v.iter().all(|c| c.is_zero()) {
                return Err(DynamicsError::ZeroPoint(j));
            }
            out.push(normalize(v, None));
        }
        Ok(ProjPoint { coords: out })
    }

    pub fn from_i64(coords: &[&[i64]]) -> Result<Self, DynamicsError> {
        Self::new(coords.iter().map(|v| v.iter().map(|&c| BigInt::from(c)).collect()).collect())
    }

    pub(crate) fn from_canonical(coords: Vec<Vec<BigInt>>) -> Self {
        ProjPoint { coords }
    }

    /// Wraps coordinates already known to be canonical (primitive, first
    /// nonzero entry positive) without recomputing gcds. Used when loading
    /// stored orbits.
    pub fn from_canonical_unchecked(coords: Vec<Vec<BigInt>>) -> Self {
        debug_assert!(coords.iter().all(|v| v.iter().any(|c| !c.is_zero())));
        ProjPoint { coords }
    }

    pub fn coords(&self) -> &[Vec<BigInt>] {
        &self.coords
    }

    pub fn factor(&self, j: usize) -> &[BigInt] {
        &self.coords[j]
    }

    pub fn factors(&self) -> usize {
        self.coords.len()
    }

    /// All coordinates concatenated over the factors.
    pub fn flat(&self) -> Vec<BigInt> {
        self.coords.iter().flatten().cloned().collect()
    }

    pub fn lies_on(&self, space: &ProductSpace) -> bool {
        self.coords.len() == space.factors() && self.coords.iter().zip(space.dims()).all(|(v, &n)| v.len() == n + 1)
    }

    /// Largest absolute coordinate of factor `j`.
    pub fn max_abs(&self, j: usize) -> BigInt {
        self.coords[j].iter().map(|c| c.abs()).max().expect("nonempty factor")
    }

    /// Sum over factors of the decimal digit count of the largest coordinate.
    pub fn digit_size(&self) -> u64 {
        (0..self.factors()).map(|j| decimal_digits(&self.max_abs(j))).sum()
    }

    /// Primitive with positive leading entry in every factor.
    pub fn is_canonical(&self) -> bool {
        self.coords.iter().all(|v| {
            let g = v.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
            let lead = v.iter().find(|c| !c.is_zero());
            g.is_one() && lead.is_some_and(|c| c.is_positive())
        })
    }
}

/// Divides out the gcd and fixes the sign. `bound`, when given, is a nonzero
/// multiple of the gcd and lets huge vectors skip a full big-integer gcd.
pub(crate) fn normalize(mut v: Vec<BigInt>, bound: Option<&BigInt>) -> Vec<BigInt> {
    let g = gcd_all(&v, bound);
    if !g.is_one() {
        for c in v.iter_mut() {
            *c = &*c / &g;
        }
    }
    if v.iter().find(|c| !c.is_zero()).is_some_and(|c| c.is_negative()) {
        for c in v.iter_mut() {
            *c = -&*c;
        }
    }
    v
}

/// gcd of the entries, reducing every entry modulo the running gcd first so
/// that the binary gcd only ever runs on the smallest operands.
pub(crate) fn gcd_all(v: &[BigInt], bound: Option<&BigInt>) -> BigInt {
    let mut nz: Vec<&BigInt> = v.iter().filter(|c| !c.is_zero()).collect();
    nz.sort_by_key(|c| c.bits());
    let mut g = match bound {
        Some(b) if !b.is_zero() => b.abs(),
        _ => match nz.first() {
            Some(c) => c.abs(),
            None => return BigInt::zero(),
        },
    };
    for c in nz {
        if g.is_one() {
            break;
        }
        let r = c.mod_floor(&g);
        g = g.gcd(&r);
    }
    g
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coords
            .iter()
            .map(|v| {
                let c: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                format!("[{}]", c.join(":"))
            })
            .collect();
        if parts.len() == 1 {
            write!(f, "{}", parts[0])
        } else {
            write!(f, "({})", parts.join(","))
        }
    }
}
