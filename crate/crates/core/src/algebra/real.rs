//! Real algebraic numbers as (squarefree integer polynomial, isolating
//! interval) pairs.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::interval::Interval;
use super::matrix::Matrix;
use super::poly::{IntPolynomial, Polynomial};
use super::roots::{simplest_rational, SturmSequence};
use super::AlgebraError;
use crate::scalar::{format_rational, rat_to_f64};

/// A real root of a squarefree primitive integer polynomial, pinned down by
/// a closed rational interval containing exactly that root and no root at
/// either endpoint.
#[derive(Clone, Debug)]
pub struct AlgebraicReal {
    poly: IntPolynomial,
    lo: BigRational,
    hi: BigRational,
}

impl AlgebraicReal {
    pub(crate) fn from_parts_unchecked(poly: IntPolynomial, lo: BigRational, hi: BigRational) -> Self {
        AlgebraicReal { poly, lo, hi }
    }

    /// Validates the isolation invariants with a Sturm count.
    pub fn new(poly: IntPolynomial, lo: BigRational, hi: BigRational) -> Result<Self, AlgebraError> {
        if poly.degree().unwrap_or(0) == 0 {
            return Err(AlgebraError::ZeroPolynomial);
        }
        let poly = poly.squarefree();
        if lo > hi
            || poly.sign_at(&lo) == Ordering::Equal
            || poly.sign_at(&hi) == Ordering::Equal
            || SturmSequence::new(&poly).count(&lo, &hi) != 1
        {
            return Err(AlgebraError::NotIsolating);
        }
        Ok(AlgebraicReal { poly, lo, hi })
    }

    pub fn from_rational(r: BigRational) -> Self {
        let one = BigRational::one();
        let (lo, hi) = (&r - &one, &r + &one);
        Self::rational_in(r, lo, hi)
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// Rational value with a given enclosing interval (endpoints must differ
    /// from `r`).
    pub(crate) fn rational_in(r: BigRational, lo: BigRational, hi: BigRational) -> Self {
        debug_assert!(lo < r && r < hi);
        let poly = IntPolynomial::new(vec![-r.numer().clone(), r.denom().clone()]);
        AlgebraicReal { poly, lo, hi }
    }

    /// The squarefree primitive defining polynomial.
    pub fn poly(&self) -> &IntPolynomial {
        &self.poly
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn interval(&self) -> Interval {
        Interval::new(self.lo.clone(), self.hi.clone())
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    /// Exact value when the defining polynomial is linear.
    pub fn as_rational(&self) -> Option<BigRational> {
        (self.poly.degree() == Some(1))
            .then(|| BigRational::new(-self.poly.coeff(0), self.poly.coeff(1)))
    }

    /// Decides rationality exactly: a rational root `p/q` of the defining
    /// polynomial has `q` dividing the leading coefficient, and two such
    /// fractions are at least `1/lc^2` apart.
    pub fn rational_value(&self) -> Option<BigRational> {
        if let Some(r) = self.as_rational() {
            return Some(r);
        }
        let lc = self.poly.leading().abs();
        let lc_r = BigRational::from_integer(lc.clone());
        let w = (&lc_r * &lc_r).recip() / BigRational::from_integer(BigInt::from(2));
        let fine = self.refine(&w);
        let s = simplest_rational(&fine.lo, &fine.hi);
        if *s.denom() <= lc && self.poly.sign_at(&s) == Ordering::Equal {
            Some(s)
        } else {
            None
        }
    }

    /// Shrinks the interval to width at most `width` by bisection. Returns
    /// the input unchanged if it is already narrow enough.
    pub fn refine(&self, width: &BigRational) -> AlgebraicReal {
        let mut lo = self.lo.clone();
        let mut hi = self.hi.clone();
        let two = BigRational::from_integer(BigInt::from(2));
        let s_lo = self.poly.sign_at(&lo);
        while &(&hi - &lo) > width {
            let mid = (&lo + &hi) / &two;
            match self.poly.sign_at(&mid) {
                Ordering::Equal => {
                    // the root is exactly `mid`
                    let q = width / BigRational::from_integer(BigInt::from(4));
                    let q = if q < (&hi - &lo) / &two { q } else { (&hi - &lo) / BigRational::from_integer(BigInt::from(4)) };
                    return AlgebraicReal {
                        poly: self.poly.clone(),
                        lo: &mid - &q,
                        hi: &mid + &q,
                    };
                }
                s if s == s_lo => lo = mid,
                _ => hi = mid,
            }
        }
        AlgebraicReal { poly: self.poly.clone(), lo, hi }
    }

    /// Refines to relative width around `2^-bits` and returns the midpoint.
    pub fn to_f64(&self) -> f64 {
        let w = BigRational::new(BigInt::one(), BigInt::one() << 64u32);
        let mut r = self.clone();
        loop {
            let scale = r.lo.abs().max(r.hi.abs()).max(BigRational::one());
            if r.width() <= &w * &scale {
                break;
            }
            r = r.refine(&(r.width() / BigRational::from_integer(BigInt::from(1u64 << 20))));
        }
        rat_to_f64(&((&r.lo + &r.hi) / BigRational::from_integer(BigInt::from(2))))
    }

    /// Sign of the number itself.
    pub fn signum(&self) -> Ordering {
        if self.poly.sign_at(&BigRational::zero()) == Ordering::Equal
            && self.lo < BigRational::zero()
            && self.hi > BigRational::zero()
        {
            return Ordering::Equal;
        }
        let mut r = self.clone();
        loop {
            if r.lo >= BigRational::zero() {
                return Ordering::Greater;
            }
            if r.hi <= BigRational::zero() {
                return Ordering::Less;
            }
            r = r.refine(&(r.width() / BigRational::from_integer(BigInt::from(4))));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.signum() == Ordering::Equal
    }

    /// Interval narrowed until it excludes zero; requires a nonzero value.
    fn sign_separated(&self) -> AlgebraicReal {
        let mut r = self.clone();
        while r.interval().contains_zero() {
            r = r.refine(&(r.width() / BigRational::from_integer(BigInt::from(4))));
        }
        r
    }

    /// Exact equality: both values are roots of the gcd of their defining
    /// polynomials lying in the overlap of their intervals.
    pub fn algebraic_equal(&self, other: &AlgebraicReal) -> bool {
        let Some(overlap) = self.interval().intersect(&other.interval()) else {
            return false;
        };
        let g = self.poly.gcd(&other.poly);
        if g.degree().unwrap_or(0) == 0 {
            return false;
        }
        // roots of g are roots of both polys, so never at an endpoint of
        // either interval; a root of g in the overlap is both numbers
        if g.sign_at(&overlap.lo) == Ordering::Equal {
            return true;
        }
        SturmSequence::new(&g).count(&overlap.lo, &overlap.hi) > 0
    }

    /// Exact comparison.
    pub fn cmp_exact(&self, other: &AlgebraicReal) -> Ordering {
        if self.algebraic_equal(other) {
            return Ordering::Equal;
        }
        let (mut a, mut b) = (self.clone(), other.clone());
        let four = BigRational::from_integer(BigInt::from(4));
        loop {
            if a.hi < b.lo {
                return Ordering::Less;
            }
            if b.hi < a.lo {
                return Ordering::Greater;
            }
            a = a.refine(&(a.width() / &four));
            b = b.refine(&(b.width() / &four));
        }
    }

    pub fn cmp_rational(&self, r: &BigRational) -> Ordering {
        self.cmp_exact(&AlgebraicReal::from_rational(r.clone()))
    }

    /// `self / other`, with the defining polynomial obtained by eliminating
    /// `y` from `other.poly(y) = 0`, `self.poly(x y) = 0`.
    pub fn algebraic_ratio(&self, other: &AlgebraicReal) -> Result<AlgebraicReal, AlgebraError> {
        if other.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(AlgebraicReal::from_integer(0));
        }
        let pa = strip_zero_root(&self.poly);
        let pb = strip_zero_root(&other.poly);
        let na = pa.degree().unwrap();
        // pa(x y) as a polynomial in y with coefficients in Z[x]
        let q: Polynomial<IntPolynomial> = Polynomial::new(
            (0..=na)
                .map(|i| IntPolynomial::monomial(pa.coeff(i), i))
                .collect(),
        );
        let p_lift: Polynomial<IntPolynomial> = pb.map(|c| IntPolynomial::constant(c.clone()));
        let res = resultant(&p_lift, &q)?;
        self.isolate_combined(other, &res, |x, y| x.div(y))
    }

    /// `self * other`, eliminating `y` from `other.poly(y) = 0`,
    /// `y^n self.poly(x / y) = 0`.
    pub fn algebraic_product(&self, other: &AlgebraicReal) -> Result<AlgebraicReal, AlgebraError> {
        if self.is_zero() || other.is_zero() {
            return Ok(AlgebraicReal::from_integer(0));
        }
        let pa = strip_zero_root(&self.poly);
        let pb = strip_zero_root(&other.poly);
        let na = pa.degree().unwrap();
        let q: Polynomial<IntPolynomial> = Polynomial::new(
            (0..=na)
                .map(|k| {
                    // coefficient of y^k is a_(n-k) x^(n-k)
                    let i = na - k;
                    IntPolynomial::monomial(pa.coeff(i), i)
                })
                .collect(),
        );
        let p_lift: Polynomial<IntPolynomial> = pb.map(|c| IntPolynomial::constant(c.clone()));
        let res = resultant(&p_lift, &q)?;
        self.isolate_combined(other, &res, |x, y| x.mul(y))
    }

    fn isolate_combined(
        &self,
        other: &AlgebraicReal,
        res: &IntPolynomial,
        op: impl Fn(&Interval, &Interval) -> Interval,
    ) -> Result<AlgebraicReal, AlgebraError> {
        if res.is_zero() {
            return Err(AlgebraError::DegenerateResultant);
        }
        let poly = strip_zero_root(&res.squarefree());
        let sturm = SturmSequence::new(&poly);
        let mut a = self.sign_separated();
        let mut b = other.sign_separated();
        let four = BigRational::from_integer(BigInt::from(4));
        loop {
            let iv = op(&a.interval(), &b.interval());
            if poly.sign_at(&iv.lo) != Ordering::Equal
                && poly.sign_at(&iv.hi) != Ordering::Equal
                && sturm.count(&iv.lo, &iv.hi) == 1
            {
                let root = AlgebraicReal { poly, lo: iv.lo, hi: iv.hi };
                return Ok(root.simplified());
            }
            a = a.refine(&(a.width() / &four));
            b = b.refine(&(b.width() / &four));
        }
    }

    /// Replaces the defining polynomial by a linear one when the value is
    /// rational, and otherwise divides out every rational linear factor.
    pub fn simplified(&self) -> AlgebraicReal {
        if self.poly.degree() == Some(1) {
            return self.clone();
        }
        if let Some(r) = self.rational_value() {
            return AlgebraicReal::rational_in(r, self.lo.clone(), self.hi.clone());
        }
        match super::roots::sturm_isolate_real_roots(&self.poly) {
            Ok(roots) => {
                let mut p = self.poly.clone();
                for r in roots.iter().filter_map(|r| r.as_rational()) {
                    let lin = IntPolynomial::new(vec![-r.numer().clone(), r.denom().clone()]);
                    p = p.exact_div_poly(&lin);
                }
                AlgebraicReal { poly: p.primitive(), lo: self.lo.clone(), hi: self.hi.clone() }
            }
            Err(_) => self.clone(),
        }
    }

    /// Interval endpoints rendered to `places` decimals (outward rounding),
    /// after refining to width `10^-places`.
    pub fn decimal_interval(&self, places: usize) -> (String, String) {
        let w = BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(10), places));
        let r = self.refine(&w);
        (format_rational(&r.lo, places, false), format_rational(&r.hi, places, true))
    }
}

fn strip_zero_root(p: &IntPolynomial) -> IntPolynomial {
    if p.coeff(0).is_zero() && p.degree().unwrap_or(0) >= 1 {
        IntPolynomial::new(p.coeffs()[1..].to_vec())
    } else {
        p.clone()
    }
}

/// Sylvester resultant of two polynomials over an integral domain.
pub fn resultant<T: crate::scalar::ExactDiv>(
    p: &Polynomial<T>,
    q: &Polynomial<T>,
) -> Result<T, AlgebraError> {
    let (Some(m), Some(n)) = (p.degree(), q.degree()) else {
        return Ok(T::zero());
    };
    let size = m + n;
    if size == 0 {
        return Ok(T::one());
    }
    let mut s: Matrix<T> = Matrix::zeros(size, size);
    // n rows of p's coefficients, m rows of q's, highest degree first
    for r in 0..n {
        for (k, c) in p.coeffs().iter().enumerate() {
            s[(r, r + m - k)] = c.clone();
        }
    }
    for r in 0..m {
        for (k, c) in q.coeffs().iter().enumerate() {
            s[(n + r, r + n - k)] = c.clone();
        }
    }
    s.determinant()
}

impl PartialEq for AlgebraicReal {
    fn eq(&self, other: &Self) -> bool {
        self.algebraic_equal(other)
    }
}

impl fmt::Display for AlgebraicReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_rational() {
            Some(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Some(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            None => {
                let (lo, hi) = self.decimal_interval(12);
                write!(f, "root of {} in [{lo}, {hi}]", self.poly)
            }
        }
    }
}
