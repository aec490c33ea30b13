//! Closed rational intervals with the arithmetic needed for sign decisions.

use num_rational::BigRational;
use num_traits::Zero;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Interval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn point(x: BigRational) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains_zero(&self) -> bool {
        self.lo <= BigRational::zero() && self.hi >= BigRational::zero()
    }

    pub fn add(&self, o: &Interval) -> Interval {
        Interval::new(&self.lo + &o.lo, &self.hi + &o.hi)
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        Interval::new(
            c.iter().min().unwrap().clone(),
            c.iter().max().unwrap().clone(),
        )
    }

    /// Quotient; `o` must not contain zero.
    pub fn div(&self, o: &Interval) -> Interval {
        assert!(!o.contains_zero(), "interval division by an interval containing zero");
        let c = [&self.lo / &o.lo, &self.lo / &o.hi, &self.hi / &o.lo, &self.hi / &o.hi];
        Interval::new(
            c.iter().min().unwrap().clone(),
            c.iter().max().unwrap().clone(),
        )
    }

    /// Horner evaluation of a polynomial with rational coefficients.
    pub fn eval_poly(&self, coeffs: &[BigRational]) -> Interval {
        coeffs.iter().rev().fold(Interval::point(BigRational::zero()), |acc, c| {
            acc.mul(self).add(&Interval::point(c.clone()))
        })
    }

    pub fn intersect(&self, o: &Interval) -> Option<Interval> {
        let lo = if self.lo > o.lo { &self.lo } else { &o.lo };
        let hi = if self.hi < o.hi { &self.hi } else { &o.hi };
        (lo <= hi).then(|| Interval::new(lo.clone(), hi.clone()))
    }
}
