//! Scalar traits shared by the generic polynomial, matrix and class types.
//!
//! The exact paths use `BigInt` and `BigRational`; `f64` satisfies [`Ring`]
//! as well so the same containers serve floating-point cross-checks.

use std::cmp::Ordering;
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A commutative ring with unit, owned-value arithmetic only.
pub trait Ring:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
}

impl<T> Ring for T where
    T: Clone
        + Debug
        + PartialEq
        + Zero
        + One
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Neg<Output = T>
{
}

/// Division that is only ever asked to divide exactly (Bareiss elimination,
/// content removal). Implementations may panic or truncate otherwise.
pub trait ExactDiv: Ring {
    fn exact_div(&self, rhs: &Self) -> Self;
}

impl ExactDiv for BigInt {
    fn exact_div(&self, rhs: &Self) -> Self {
        let (q, r) = self.div_rem(rhs);
        debug_assert!(r.is_zero(), "inexact integer division");
        q
    }
}

impl ExactDiv for BigRational {
    fn exact_div(&self, rhs: &Self) -> Self {
        self / rhs
    }
}

impl ExactDiv for f64 {
    fn exact_div(&self, rhs: &Self) -> Self {
        self / rhs
    }
}

/// A ring whose elements carry a decidable sign.
///
/// For rationals this is immediate; for elements of `Q(alpha)` the sign is
/// decided by refining the isolating interval of `alpha`.
pub trait OrderedRing: Ring {
    fn sign(&self) -> Ordering;

    fn is_positive(&self) -> bool {
        self.sign() == Ordering::Greater
    }
}

impl OrderedRing for BigRational {
    fn sign(&self) -> Ordering {
        if self.is_zero() {
            Ordering::Equal
        } else if Signed::is_positive(self) {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }
}

impl OrderedRing for BigInt {
    fn sign(&self) -> Ordering {
        self.cmp(&BigInt::zero())
    }
}

/// Rational from a pair of machine integers.
pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Integer as a rational.
pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Natural logarithm of a positive big integer, accurate to double precision
/// regardless of its size.
pub fn ln_big(n: &BigInt) -> f64 {
    let n = n.abs();
    assert!(!n.is_zero(), "logarithm of zero");
    let bits = n.bits();
    if bits <= 1000 {
        return num_traits::ToPrimitive::to_f64(&n).unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top: BigInt = &n >> shift;
    let top = num_traits::ToPrimitive::to_f64(&top).expect("64-bit head");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Number of decimal digits of `|n|` (with `0` having one digit).
///
/// Exact: the floating estimate is corrected against a power of ten when it
/// lands near an integer.
pub fn decimal_digits(n: &BigInt) -> u64 {
    let n = n.abs();
    if n.is_zero() {
        return 1;
    }
    if n.bits() <= 63 {
        return n.to_string().len() as u64;
    }
    let est = ln_big(&n) / std::f64::consts::LN_10;
    let floor = est.floor();
    if est - floor > 1e-9 && floor + 1.0 - est > 1e-9 {
        return floor as u64 + 1;
    }
    // near a power of ten: decide exactly
    let k = est.round() as u32;
    let p = num_traits::pow(BigInt::from(10u32), k as usize);
    match n.cmp(&p) {
        Ordering::Less => k as u64,
        _ => k as u64 + 1,
    }
}

/// Floor of a rational as a big integer.
pub fn floor_rat(r: &BigRational) -> BigInt {
    r.floor().to_integer()
}

/// Decimal rendering of a rational with `places` digits, rounded toward
/// negative infinity (`round_up = false`) or positive infinity.
pub fn format_rational(r: &BigRational, places: usize, round_up: bool) -> String {
    let scale = num_traits::pow(BigInt::from(10u32), places);
    let scaled = r * BigRational::from_integer(scale.clone());
    let v = if round_up {
        scaled.ceil().to_integer()
    } else {
        scaled.floor().to_integer()
    };
    let neg = v.is_negative();
    let digits = v.abs().to_string();
    let digits = if digits.len() <= places {
        format!("{}{}", "0".repeat(places + 1 - digits.len()), digits)
    } else {
        digits
    };
    let (ip, fp) = digits.split_at(digits.len() - places);
    let sign = if neg { "-" } else { "" };
    if places == 0 {
        format!("{sign}{ip}")
    } else {
        format!("{sign}{ip}.{fp}")
    }
}

/// Best `f64` approximation of a rational (ratios of huge integers included).
pub fn rat_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let n = r.numer();
    let d = r.denom();
    if n.bits() < 1000 && d.bits() < 1000 {
        let nf = num_traits::ToPrimitive::to_f64(n).unwrap();
        let df = num_traits::ToPrimitive::to_f64(d).unwrap();
        return nf / df;
    }
    let sign = if n.is_negative() { -1.0 } else { 1.0 };
    sign * (ln_big(n) - ln_big(d)).exp()
}
