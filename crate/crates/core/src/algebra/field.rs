//! Arithmetic in `Q(alpha)` for a real algebraic `alpha`, with signs decided
//! by refining `alpha`'s isolating interval.

use std::cmp::Ordering;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::RatPolynomial;
use super::real::AlgebraicReal;
use super::roots::{positive_integer_multiple, SturmSequence};
use crate::scalar::OrderedRing;

/// A polynomial expression in `alpha` with rational coefficients, kept
/// reduced modulo the defining polynomial of `alpha`.
///
/// Constants built through [`Zero`]/[`One`] carry no `alpha`; the context is
/// picked up from the other operand in mixed arithmetic.
#[derive(Clone, Debug)]
pub struct FieldElement {
    value: RatPolynomial,
    alpha: Option<Arc<AlgebraicReal>>,
}

impl FieldElement {
    pub fn rational(r: BigRational, alpha: &Arc<AlgebraicReal>) -> Self {
        FieldElement { value: RatPolynomial::constant(r), alpha: Some(alpha.clone()) }
    }

    pub fn generator(alpha: &Arc<AlgebraicReal>) -> Self {
        Self::from_poly(RatPolynomial::var(), alpha)
    }

    pub fn from_poly(p: RatPolynomial, alpha: &Arc<AlgebraicReal>) -> Self {
        let m = alpha.poly().to_rational();
        FieldElement { value: p.rem(&m), alpha: Some(alpha.clone()) }
    }

    pub fn value(&self) -> &RatPolynomial {
        &self.value
    }

    fn combine(a: &Self, b: &Self, value: RatPolynomial) -> Self {
        let alpha = a.alpha.clone().or_else(|| b.alpha.clone());
        let value = match &alpha {
            Some(al) if value.degree().unwrap_or(0) >= al.poly().degree().unwrap_or(1) => {
                value.rem(&al.poly().to_rational())
            }
            _ => value,
        };
        FieldElement { value, alpha }
    }
}

impl OrderedRing for FieldElement {
    /// Zero is tested exactly: the element vanishes at `alpha` iff the gcd
    /// of its numerator with `alpha`'s polynomial has a root in the
    /// isolating interval. Otherwise the interval is refined until the
    /// interval evaluation excludes zero.
    fn sign(&self) -> Ordering {
        if self.value.is_zero() {
            return Ordering::Equal;
        }
        if self.value.degree() == Some(0) {
            return self.value.leading().sign();
        }
        let alpha = self.alpha.as_ref().expect("non-constant element without alpha");
        let e = positive_integer_multiple(&self.value);
        let g = e.gcd(alpha.poly());
        if g.degree().unwrap_or(0) >= 1 && SturmSequence::new(&g).count(alpha.lo(), alpha.hi()) > 0 {
            return Ordering::Equal;
        }
        let mut a: AlgebraicReal = (**alpha).clone();
        let four = BigRational::from_integer(BigInt::from(4));
        loop {
            let v = a.interval().eval_poly(self.value.coeffs());
            if v.lo > BigRational::zero() {
                return Ordering::Greater;
            }
            if v.hi < BigRational::zero() {
                return Ordering::Less;
            }
            a = a.refine(&(a.width() / &four));
        }
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).sign() == Ordering::Equal
    }
}

impl Zero for FieldElement {
    fn zero() -> Self {
        FieldElement { value: RatPolynomial::zero(), alpha: None }
    }
    fn is_zero(&self) -> bool {
        self.sign() == Ordering::Equal
    }
}

impl One for FieldElement {
    fn one() -> Self {
        FieldElement { value: RatPolynomial::one(), alpha: None }
    }
}

impl Add for FieldElement {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let v = &self.value + &rhs.value;
        Self::combine(&self, &rhs, v)
    }
}

impl Sub for FieldElement {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let v = &self.value - &rhs.value;
        Self::combine(&self, &rhs, v)
    }
}

impl Mul for FieldElement {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let v = &self.value * &rhs.value;
        Self::combine(&self, &rhs, v)
    }
}

impl Neg for FieldElement {
    type Output = Self;
    fn neg(self) -> Self {
        FieldElement { value: -&self.value, alpha: self.alpha }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::IntPolynomial;
    use crate::scalar::int;

    fn sqrt6() -> Arc<AlgebraicReal> {
        Arc::new(AlgebraicReal::new(IntPolynomial::from_i64(&[-6, 0, 1]), int(2), int(3)).unwrap())
    }

    #[test]
    fn generator_squared_is_six() {
        let a = sqrt6();
        let g = FieldElement::generator(&a);
        let sq = g.clone() * g;
        assert_eq!(sq.value(), &RatPolynomial::constant(int(6)));
    }

    #[test]
    fn signs_near_the_root() {
        let a = sqrt6();
        let g = FieldElement::generator(&a);
        // sqrt6 - 49/20 < 0, sqrt6 - 12/5 > 0
        let lhs = g.clone() - FieldElement::rational(crate::scalar::rat(49, 20), &a);
        assert_eq!(lhs.sign(), Ordering::Less);
        let rhs = g.clone() - FieldElement::rational(crate::scalar::rat(12, 5), &a);
        assert_eq!(rhs.sign(), Ordering::Greater);
        // 2*sqrt6*sqrt6 - 12 == 0
        let z = FieldElement::rational(int(2), &a) * g.clone() * g - FieldElement::rational(int(12), &a);
        assert_eq!(z.sign(), Ordering::Equal);
    }

    #[test]
    fn reducible_defining_polynomial() {
        // alpha = 3 given as a root of (t - 3)(t^2 - 2): e = t - 3 vanishes
        let p = &IntPolynomial::from_i64(&[-3, 1]) * &IntPolynomial::from_i64(&[-2, 0, 1]);
        let a = Arc::new(AlgebraicReal::new(p, crate::scalar::rat(5, 2), int(4)).unwrap());
        let e = FieldElement::generator(&a) - FieldElement::rational(int(3), &a);
        assert_eq!(e.sign(), Ordering::Equal);
    }
}
