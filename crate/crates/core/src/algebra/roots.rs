//! Sturm sequences and real root isolation for integer polynomials.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::poly::{IntPolynomial, RatPolynomial};
use super::real::AlgebraicReal;
use super::AlgebraError;

/// Integer multiple of a rational polynomial by a *positive* factor, so sign
/// information is preserved.
pub(crate) fn positive_integer_multiple(p: &RatPolynomial) -> IntPolynomial {
    let l = p.coeffs().iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let ints: Vec<BigInt> = p
        .coeffs()
        .iter()
        .map(|c| (c * BigRational::from_integer(l.clone())).to_integer())
        .collect();
    let v = IntPolynomial::new(ints);
    let g = v.content();
    if g.is_zero() {
        return v;
    }
    IntPolynomial::new(v.coeffs().iter().map(|c| c / &g).collect())
}

/// The Sturm sequence `p, p', -rem(p, p'), ...` scaled by positive constants.
#[derive(Clone, Debug)]
pub struct SturmSequence {
    seq: Vec<IntPolynomial>,
}

impl SturmSequence {
    pub fn new(p: &IntPolynomial) -> Self {
        let mut seq = vec![p.clone()];
        if p.degree().unwrap_or(0) == 0 {
            return SturmSequence { seq };
        }
        let mut a = p.to_rational();
        let mut b = p.derivative().to_rational();
        while !b.is_zero() {
            seq.push(positive_integer_multiple(&b));
            let r = -&a.rem(&b);
            a = b;
            b = r;
        }
        SturmSequence { seq }
    }

    pub fn sign_changes(&self, x: &BigRational) -> usize {
        let mut count = 0;
        let mut last = Ordering::Equal;
        for q in &self.seq {
            let s = q.sign_at(x);
            if s == Ordering::Equal {
                continue;
            }
            if last != Ordering::Equal && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    /// Number of distinct real roots in `(lo, hi]`.
    pub fn count(&self, lo: &BigRational, hi: &BigRational) -> usize {
        self.sign_changes(lo).saturating_sub(self.sign_changes(hi))
    }
}

/// Distinct real roots in `(lo, hi]` of any nonzero polynomial.
pub fn count_real_roots(p: &IntPolynomial, lo: &BigRational, hi: &BigRational) -> usize {
    SturmSequence::new(&p.squarefree()).count(lo, hi)
}

/// A split point inside `(a, b)` that is not a root of `p`.
fn split_point(p: &IntPolynomial, a: &BigRational, b: &BigRational) -> BigRational {
    let two = BigRational::from_integer(BigInt::from(2));
    let mid = (a + b) / &two;
    if p.sign_at(&mid) != Ordering::Equal {
        return mid;
    }
    let mut off = (b - a) / BigRational::from_integer(BigInt::from(8));
    loop {
        let c = &mid + &off;
        if p.sign_at(&c) != Ordering::Equal {
            return c;
        }
        off /= &two;
    }
}

/// Isolates every distinct real root. Rational roots come back with a
/// linear defining polynomial; irrational roots carry the squarefree part
/// with all rational linear factors removed.
pub fn sturm_isolate_real_roots(p: &IntPolynomial) -> Result<Vec<AlgebraicReal>, AlgebraError> {
    if p.is_zero() {
        return Err(AlgebraError::ZeroPolynomial);
    }
    let sf = p.squarefree();
    if sf.degree() == Some(0) {
        return Ok(Vec::new());
    }
    let sturm = SturmSequence::new(&sf);
    let bound = sf.root_bound();
    let mut out = Vec::new();
    let mut stack = vec![(-bound.clone(), bound)];
    // depth-first, right half pushed first so roots come out ascending
    while let Some((a, b)) = stack.pop() {
        match sturm.count(&a, &b) {
            0 => {}
            1 => out.push(AlgebraicReal::from_parts_unchecked(sf.clone(), a, b)),
            _ => {
                let m = split_point(&sf, &a, &b);
                stack.push((m.clone(), b));
                stack.push((a, m));
            }
        }
    }

    // neighbouring intervals may share a split point; make them disjoint
    let quarter = |r: &AlgebraicReal| r.width() / BigRational::from_integer(BigInt::from(4));
    for i in 1..out.len() {
        while out[i - 1].hi() >= out[i].lo() {
            let (a, b) = (quarter(&out[i - 1]), quarter(&out[i]));
            out[i - 1] = out[i - 1].refine(&a);
            out[i] = out[i].refine(&b);
        }
    }

    // split off rational roots
    let rational: Vec<Option<BigRational>> = out.iter().map(|r| r.rational_value()).collect();
    let mut irr_poly = sf.clone();
    for r in rational.iter().flatten() {
        let lin = IntPolynomial::new(vec![-r.numer().clone(), r.denom().clone()]);
        irr_poly = irr_poly.exact_div_poly(&lin);
    }
    let irr_poly = irr_poly.primitive();
    Ok(out
        .into_iter()
        .zip(rational)
        .map(|(root, q)| match q {
            Some(q) => AlgebraicReal::rational_in(q, root.lo().clone(), root.hi().clone()),
            None => AlgebraicReal::from_parts_unchecked(irr_poly.clone(), root.lo().clone(), root.hi().clone()),
        })
        .collect())
}

/// The rational with the smallest denominator in the closed interval.
pub fn simplest_rational(lo: &BigRational, hi: &BigRational) -> BigRational {
    debug_assert!(lo <= hi);
    let zero = BigRational::zero();
    if *lo <= zero && *hi >= zero {
        return zero;
    }
    if hi.is_negative() {
        return -simplest_rational(&-hi, &-lo);
    }
    let fl = lo.floor();
    if fl == *lo {
        return fl;
    }
    let next = &fl + BigRational::one();
    if next <= *hi {
        return next;
    }
    let inner = simplest_rational(&(hi - &fl).recip(), &(lo - &fl).recip());
    fl + inner.recip()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    #[test]
    fn isolates_sqrt_six() {
        let p = IntPolynomial::from_i64(&[-6, 0, 1]);
        let roots = sturm_isolate_real_roots(&p).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots[0].to_f64() < 0.0 && roots[1].to_f64() > 0.0);
        assert!((roots[1].to_f64() - 6f64.sqrt()).abs() < 1e-12);
        assert!(roots[0].hi() < roots[1].lo());
    }

    #[test]
    fn no_real_roots() {
        let p = IntPolynomial::from_i64(&[1, 0, 1]);
        assert!(sturm_isolate_real_roots(&p).unwrap().is_empty());
    }

    #[test]
    fn repeated_root_collapses() {
        let p = IntPolynomial::from_i64(&[1, -2, 1]);
        let roots = sturm_isolate_real_roots(&p).unwrap();
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0].rational_value(), Some(int(1)));
        assert_eq!(roots[0].poly(), &IntPolynomial::from_i64(&[-1, 1]));
    }

    #[test]
    fn zero_polynomial_is_an_error() {
        assert!(matches!(
            sturm_isolate_real_roots(&IntPolynomial::zero()),
            Err(AlgebraError::ZeroPolynomial)
        ));
    }

    #[test]
    fn rational_factor_is_split_off() {
        // (t - 3)(t^2 - 6)
        let p = &IntPolynomial::from_i64(&[-3, 1]) * &IntPolynomial::from_i64(&[-6, 0, 1]);
        let roots = sturm_isolate_real_roots(&p).unwrap();
        assert_eq!(roots.len(), 3);
        assert_eq!(roots[2].rational_value(), Some(int(3)));
        assert_eq!(roots[1].poly(), &IntPolynomial::from_i64(&[-6, 0, 1]));
    }

    #[test]
    fn simplest_fraction() {
        assert_eq!(simplest_rational(&rat(3, 10), &rat(4, 10)), rat(1, 3));
        assert_eq!(simplest_rational(&rat(-7, 2), &rat(-13, 4)), rat(-7, 2));
        assert_eq!(simplest_rational(&rat(5, 2), &rat(7, 2)), int(3));
    }

    // Brute-force sign changes on the grid (3k+1)/3000, which never meets a
    // half-integer; roots below are half-integers, separated by >= 1/2.
    fn grid_count(p: &IntPolynomial, k0: i64, k1: i64) -> usize {
        let mut prev = p.sign_at(&rat(3 * k0 + 1, 3000));
        let mut n = 0;
        for k in k0 + 1..=k1 {
            let s = p.sign_at(&rat(3 * k + 1, 3000));
            if s != prev {
                n += 1;
                prev = s;
            }
        }
        n
    }

    #[test]
    fn sturm_count_matches_grid_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            // product of up to 4 linear factors (t - r/2) with r distinct
            let deg = rng.gen_range(1..=4);
            let mut rs: Vec<i64> = Vec::new();
            while rs.len() < deg {
                let r = rng.gen_range(-12..=12);
                if !rs.contains(&r) {
                    rs.push(r);
                }
            }
            let mut p = IntPolynomial::from_i64(&[1]);
            for r in &rs {
                p = &p * &IntPolynomial::from_i64(&[-r, 2]);
            }
            // optionally multiply by an irreducible quadratic without real roots
            if rng.gen_bool(0.3) {
                p = &p * &IntPolynomial::from_i64(&[1, 0, 1]);
            }
            let s = SturmSequence::new(&p.squarefree());
            let (k0, k1) = (-4000i64, 4000i64);
            let sturm = s.count(&rat(3 * k0 + 1, 3000), &rat(3 * k1 + 1, 3000));
            assert_eq!(sturm, grid_count(&p, k0, k1), "poly {p}");
        }
    }
}
