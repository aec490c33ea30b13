//! Certified statements about root moduli via the Schur–Cohn test.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::poly::{IntPolynomial, RatPolynomial};

/// True iff every complex root of `p` lies in the open unit disk.
///
/// Schur–Cohn recursion: with `p*(z) = z^n p(1/z)`, the condition is
/// `|a_0| < |a_n|` together with the same property for
/// `(a_n p - a_0 p*) / z`, which has degree `n - 1`.
pub fn roots_inside_unit_disk(p: &RatPolynomial) -> bool {
    let mut p = p.clone();
    loop {
        let Some(n) = p.degree() else {
            return false;
        };
        if n == 0 {
            return true;
        }
        let a0 = p.coeff(0);
        let an = p.leading();
        if a0.abs() >= an.abs() {
            return false;
        }
        let star = p.reversed();
        // reversed() drops the zero padding when a_0 = 0; rebuild explicitly
        let star = if star.degree() == Some(n) {
            star
        } else {
            let mut c: Vec<BigRational> = p.coeffs().to_vec();
            c.reverse();
            RatPolynomial::new(c)
        };
        let t = &p.scale(&an) - &star.scale(&a0);
        debug_assert!(t.coeff(0).is_zero());
        p = RatPolynomial::new(t.coeffs().iter().skip(1).cloned().collect());
    }
}

/// True iff every complex root of `p` has modulus strictly greater than 1.
pub fn roots_outside_unit_disk(p: &IntPolynomial) -> bool {
    if p.coeff(0).is_zero() {
        return false;
    }
    roots_inside_unit_disk(&p.reversed().to_rational())
}

/// True iff every root of `p` has modulus strictly below `r > 0`.
pub fn roots_inside_radius(p: &IntPolynomial, r: &BigRational) -> bool {
    roots_inside_unit_disk(&p.to_rational().scale_var(r))
}

/// Bracket `(lo, hi)` of width at most `tol` around the largest root
/// modulus of `p`. A constant polynomial has no roots and yields `(0, 0)`.
pub fn max_root_modulus(p: &IntPolynomial, tol: &BigRational) -> (BigRational, BigRational) {
    if p.degree().unwrap_or(0) == 0 {
        return (BigRational::zero(), BigRational::zero());
    }
    let mut lo = BigRational::zero();
    let mut hi = p.root_bound();
    let two = BigRational::from_integer(BigInt::from(2));
    while &(&hi - &lo) > tol {
        let mid = (&lo + &hi) / &two;
        if mid.is_zero() || !roots_inside_radius(p, &mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    #[test]
    fn linear_factors() {
        assert!(roots_inside_unit_disk(&IntPolynomial::from_i64(&[-1, 2]).to_rational()));
        assert!(!roots_inside_unit_disk(&IntPolynomial::from_i64(&[-2, 1]).to_rational()));
        // root exactly on the circle
        assert!(!roots_inside_unit_disk(&IntPolynomial::from_i64(&[-1, 1]).to_rational()));
    }

    #[test]
    fn complex_pair() {
        // t^2 + t + 1: roots on the unit circle
        assert!(!roots_inside_unit_disk(&IntPolynomial::from_i64(&[1, 1, 1]).to_rational()));
        // 4t^2 + 1: |roots| = 1/2
        assert!(roots_inside_unit_disk(&IntPolynomial::from_i64(&[1, 0, 4]).to_rational()));
        // t^2 + 4: |roots| = 2 -> outside
        assert!(roots_outside_unit_disk(&IntPolynomial::from_i64(&[4, 0, 1])));
    }

    #[test]
    fn modulus_of_sqrt6_pair() {
        let (lo, hi) = max_root_modulus(&IntPolynomial::from_i64(&[-6, 0, 1]), &rat(1, 1_000_000));
        assert!(lo < rat(2449490, 1000000) && hi > rat(2449489, 1000000));
        // (t-2)(t-3)
        let (lo, hi) = max_root_modulus(&IntPolynomial::from_i64(&[6, -5, 1]), &rat(1, 1000));
        assert!(lo <= int(3) && hi >= int(3));
    }

    #[test]
    fn jordan_type_double_root() {
        // (t - 2)^2 outside, (t - 1)^2 not
        assert!(roots_outside_unit_disk(&IntPolynomial::from_i64(&[4, -4, 1])));
        assert!(!roots_outside_unit_disk(&IntPolynomial::from_i64(&[1, -2, 1])));
    }
}
