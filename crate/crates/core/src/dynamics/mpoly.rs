//! Sparse multivariate polynomials over a generic ring.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::ops::Range;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::scalar::Ring;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiPoly<T> {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, T>,
}

impl<T: Ring> MultiPoly<T> {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: T) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::from_terms(nvars, vec![(e, T::one())])
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, T)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Vec<u32>, c: T) {
        let v = self.terms.get(&e).cloned().unwrap_or_else(T::zero) + c;
        if v.is_zero() {
            self.terms.remove(&e);
        } else {
            self.terms.insert(e, v);
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, T> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.nvars, o.nvars);
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.nvars, o.nvars);
        let mut out = Self::zero(self.nvars);
        for (ea, a) in &self.terms {
            for (eb, b) in &o.terms {
                let e = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(e, a.clone() * b.clone());
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(self.nvars, T::one());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::from_terms(self.nvars, self.terms.iter().map(|(e, a)| (e.clone(), a.clone() * c.clone())))
    }

    /// Embeds into a larger variable set, shifting indices by `offset`.
    pub fn embed(&self, nvars: usize, offset: usize) -> Self {
        assert!(offset + self.nvars <= nvars);
        let terms = self.terms.iter().map(|(e, c)| {
            let mut v = vec![0; nvars];
            v[offset..offset + self.nvars].copy_from_slice(e);
            (v, c.clone())
        });
        Self::from_terms(nvars, terms)
    }

    /// Substitutes polynomial `subs[i]` for variable `i`.
    pub fn substitute(&self, subs: &[MultiPoly<T>]) -> MultiPoly<T> {
        assert_eq!(subs.len(), self.nvars);
        let nv = subs.first().map_or(0, |s| s.nvars);
        let mut cache: HashMap<(usize, u32), MultiPoly<T>> = HashMap::new();
        let mut out = MultiPoly::zero(nv);
        for (e, c) in &self.terms {
            let mut t = MultiPoly::constant(nv, c.clone());
            for (i, &a) in e.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                let p = cache.entry((i, a)).or_insert_with(|| subs[i].pow(a)).clone();
                t = t.mul(&p);
            }
            out = out.add(&t);
        }
        out
    }

    /// Degree in the variables `group` if every term has the same one.
    pub fn group_degree(&self, group: Range<usize>) -> Option<u32> {
        let mut degs = self.terms.keys().map(|e| e[group.clone()].iter().sum::<u32>());
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    /// Value at a point, caching variable powers.
    pub fn eval(&self, x: &[T]) -> T {
        assert_eq!(x.len(), self.nvars);
        let mut cache: HashMap<(usize, u32), T> = HashMap::new();
        let mut acc = T::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &a) in e.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                let p = cache
                    .entry((i, a))
                    .or_insert_with(|| {
                        let mut r = T::one();
                        let mut b = x[i].clone();
                        let mut k = a;
                        while k > 0 {
                            if k & 1 == 1 {
                                r = r * b.clone();
                            }
                            k >>= 1;
                            if k > 0 {
                                b = b.clone() * b;
                            }
                        }
                        r
                    })
                    .clone();
                t = t * p;
            }
            acc = acc + t;
        }
        acc
    }

    /// Maps coefficients into another ring.
    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> MultiPoly<U> {
        MultiPoly::from_terms(self.nvars, self.terms.iter().map(|(e, c)| (e.clone(), f(c))))
    }
}

impl MultiPoly<BigRational> {
    /// Integer polynomial `s * self` for the least positive `s` clearing
    /// denominators.
    pub fn clear_denominators(&self) -> MultiPoly<BigInt> {
        let l = self.terms.values().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        self.map(|c| (c * BigRational::from_integer(l.clone())).to_integer())
    }
}

impl MultiPoly<BigInt> {
    pub fn content(&self) -> BigInt {
        self.terms.values().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    pub fn to_rational(&self) -> MultiPoly<BigRational> {
        self.map(|c| BigRational::from_integer(c.clone()))
    }

    /// Value modulo a prime below `2^63`; `x` already reduced.
    pub fn eval_mod(&self, x: &[u64], p: u64) -> u64 {
        let mulm = |a: u64, b: u64| ((a as u128 * b as u128) % p as u128) as u64;
        let mut acc = 0u64;
        for (e, c) in &self.terms {
            let cm = c.mod_floor(&BigInt::from(p));
            let mut t: u64 = num_traits::ToPrimitive::to_u64(&cm).unwrap();
            for (i, &a) in e.iter().enumerate() {
                let (mut b, mut k) = (x[i], a);
                while k > 0 {
                    if k & 1 == 1 {
                        t = mulm(t, b);
                    }
                    b = mulm(b, b);
                    k >>= 1;
                }
            }
            acc = (acc + t) % p;
        }
        acc
    }
}

/// Rendering with caller-supplied variable names, highest terms first,
/// e.g. `X1_0^2 - 3/2*X1_0*X1_1`.
pub fn format_poly(p: &MultiPoly<BigRational>, names: &dyn Fn(usize) -> String) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut s = String::new();
    for (k, (e, c)) in p.terms.iter().rev().enumerate() {
        let neg = c.is_negative();
        if k == 0 {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        let a = c.abs();
        let mut factors: Vec<String> = Vec::new();
        let is_const = e.iter().all(|&x| x == 0);
        if !a.is_one() || is_const {
            if a.is_integer() {
                factors.push(a.numer().to_string());
            } else {
                factors.push(format!("{}/{}", a.numer(), a.denom()));
            }
        }
        for (i, &x) in e.iter().enumerate() {
            match x {
                0 => {}
                1 => factors.push(names(i)),
                _ => factors.push(format!("{}^{x}", names(i))),
            }
        }
        let _ = write!(s, "{}", factors.join("*"));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn x(i: usize) -> MultiPoly<BigRational> {
        MultiPoly::var(2, i)
    }

    #[test]
    fn arithmetic_and_evaluation() {
        let p = x(0).pow(2).add(&x(1).pow(2)); // X^2 + Y^2
        assert_eq!(p.eval(&[int(2), int(1)]), int(5));
        let q = p.mul(&x(0)).sub(&x(0).pow(3));
        assert_eq!(q, x(0).mul(&x(1).pow(2)));
    }

    #[test]
    fn group_degrees() {
        let p = x(0).pow(2).add(&x(0).mul(&x(1)));
        assert_eq!(p.group_degree(0..2), Some(2));
        assert_eq!(p.group_degree(0..1), None);
    }

    #[test]
    fn substitution_composes() {
        // (X^2)(X -> X + Y) = X^2 + 2XY + Y^2
        let p = x(0).pow(2);
        let r = p.substitute(&[x(0).add(&x(1)), x(1)]);
        assert_eq!(r, x(0).pow(2).add(&x(0).mul(&x(1)).scale(&int(2))).add(&x(1).pow(2)));
    }

    #[test]
    fn formatting() {
        let names = |i: usize| format!("X1_{i}");
        let p = x(0).pow(2).sub(&x(0).mul(&x(1)).scale(&rat(3, 2))).add(&MultiPoly::constant(2, int(4)));
        assert_eq!(format_poly(&p, &names), "X1_0^2 - 3/2*X1_0*X1_1 + 4");
    }

    #[test]
    fn modular_evaluation_agrees() {
        let p = x(0).pow(5).add(&x(1).scale(&int(-7))).clear_denominators();
        let v = p.eval(&[BigInt::from(123456789), BigInt::from(987654321)]);
        let m = 1_000_000_007u64;
        let expected = v.mod_floor(&BigInt::from(m));
        assert_eq!(BigInt::from(p.eval_mod(&[123456789, 987654321], m)), expected);
    }
}
