//! Products of projective spaces and their cohomology rings
//! `Z[h_1, ..., h_k] / (h_j^(n_j + 1))`.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::scalar::{OrderedRing, Ring};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("a product space needs at least one factor, each of positive dimension")]
    InvalidSpace,
    #[error("classes live on different spaces")]
    SpaceMismatch,
    #[error("class has degree {found}, expected {expected}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("degree {degree} outside 0..={dim}")]
    DegreeOutOfRange { degree: usize, dim: usize },
    #[error("exponent vector {0:?} does not fit the space")]
    BadExponents(Vec<u32>),
}

/// `P^(n_1) x ... x P^(n_k)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProductSpace {
    dims: Vec<usize>,
}

impl ProductSpace {
    pub fn new(dims: Vec<usize>) -> Result<Self, GeometryError> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(GeometryError::InvalidSpace);
        }
        Ok(ProductSpace { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn factors(&self) -> usize {
        self.dims.len()
    }

    /// Total dimension `d = sum n_j`.
    pub fn dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Number of homogeneous coordinates over all factors.
    pub fn num_vars(&self) -> usize {
        self.dims.iter().map(|n| n + 1).sum()
    }

    /// Index of the first coordinate of factor `j` in the concatenated list.
    pub fn var_offset(&self, j: usize) -> usize {
        self.dims[..j].iter().map(|n| n + 1).sum()
    }

    /// `self x other`.
    pub fn product(&self, other: &ProductSpace) -> ProductSpace {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        ProductSpace { dims }
    }

    /// Exponent vectors of total degree `i` with `a_j <= n_j`, in
    /// lexicographic order with `h_1 > h_2 > ...` (so `(1,0)` precedes
    /// `(0,1)`).
    pub fn graded_basis(&self, i: usize) -> Result<Vec<Vec<u32>>, GeometryError> {
        if i > self.dim() {
            return Err(GeometryError::DegreeOutOfRange { degree: i, dim: self.dim() });
        }
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(self.dims.len());
        self.fill_basis(0, i, &mut cur, &mut out);
        Ok(out)
    }

    fn fill_basis(&self, j: usize, left: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if j == self.dims.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let rest: usize = self.dims[j + 1..].iter().sum();
        for a in (0..=self.dims[j].min(left)).rev() {
            if left - a > rest {
                continue;
            }
            cur.push(a as u32);
            self.fill_basis(j + 1, left - a, cur, out);
            cur.pop();
        }
    }

    /// Exponent vector of the point class `h_1^(n_1) ... h_k^(n_k)`.
    pub fn top_monomial(&self) -> Vec<u32> {
        self.dims.iter().map(|&n| n as u32).collect()
    }

    fn fits(&self, e: &[u32]) -> bool {
        e.len() == self.dims.len() && e.iter().zip(&self.dims).all(|(&a, &n)| a as usize <= n)
    }
}

impl fmt::Display for ProductSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(|n| format!("P^{n}")).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

/// A homogeneous class: a combination of monomials `h^a` of one total
/// degree, with truncated monomials discarded.
#[derive(Debug, Clone, PartialEq)]
pub struct CohomClass<T> {
    space: ProductSpace,
    degree: usize,
    terms: BTreeMap<Vec<u32>, T>,
}

impl<T: Ring> CohomClass<T> {
    pub fn zero(space: &ProductSpace, degree: usize) -> Self {
        CohomClass { space: space.clone(), degree, terms: BTreeMap::new() }
    }

    pub fn one(space: &ProductSpace) -> Self {
        Self::monomial(space, vec![0; space.factors()], T::one()).expect("unit monomial")
    }

    /// `c * h^a`; a monomial beyond the truncation is the zero class.
    pub fn monomial(space: &ProductSpace, exps: Vec<u32>, c: T) -> Result<Self, GeometryError> {
        if exps.len() != space.factors() {
            return Err(GeometryError::BadExponents(exps));
        }
        let degree = exps.iter().map(|&a| a as usize).sum();
        let mut out = Self::zero(space, degree);
        if space.fits(&exps) && !c.is_zero() {
            out.terms.insert(exps, c);
        }
        Ok(out)
    }

    /// The hyperplane class `h_j` (0-based `j`).
    pub fn hyperplane(space: &ProductSpace, j: usize) -> Self {
        let mut e = vec![0; space.factors()];
        e[j] = 1;
        Self::monomial(space, e, T::one()).expect("hyperplane class")
    }

    /// The degree-1 class `sum_j c_j h_j`.
    pub fn divisor(space: &ProductSpace, coeffs: &[T]) -> Result<Self, GeometryError> {
        if coeffs.len() != space.factors() {
            return Err(GeometryError::BadExponents(vec![coeffs.len() as u32]));
        }
        let mut out = Self::zero(space, 1);
        for (j, c) in coeffs.iter().enumerate() {
            out = out.add(&Self::hyperplane(space, j).scale(c))?;
        }
        Ok(out)
    }

    /// The polarization `L = h_1 + ... + h_k`.
    pub fn ample(space: &ProductSpace) -> Self {
        Self::divisor(space, &vec![T::one(); space.factors()]).expect("ample class")
    }

    pub fn space(&self) -> &ProductSpace {
        &self.space
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, T> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: &[u32]) -> T {
        self.terms.get(exps).cloned().unwrap_or_else(T::zero)
    }

    pub fn scale(&self, c: &T) -> Self {
        let mut out = Self::zero(&self.space, self.degree);
        for (e, a) in &self.terms {
            let v = a.clone() * c.clone();
            if !v.is_zero() {
                out.terms.insert(e.clone(), v);
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self, GeometryError> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (e, b) in &other.terms {
            let v = out.coeff(e) + b.clone();
            if v.is_zero() {
                out.terms.remove(e);
            } else {
                out.terms.insert(e.clone(), v);
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, GeometryError> {
        self.add(&other.scale(&(-T::one())))
    }

    fn check_same(&self, other: &Self) -> Result<(), GeometryError> {
        if self.space != other.space {
            return Err(GeometryError::SpaceMismatch);
        }
        if self.degree != other.degree {
            return Err(GeometryError::DegreeMismatch { expected: self.degree, found: other.degree });
        }
        Ok(())
    }

    /// Product in the truncated ring.
    pub fn ring_multiply(&self, other: &Self) -> Result<Self, GeometryError> {
        if self.space != other.space {
            return Err(GeometryError::SpaceMismatch);
        }
        let mut out = Self::zero(&self.space, self.degree + other.degree);
        for (ea, a) in &self.terms {
            for (eb, b) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                if !self.space.fits(&e) {
                    continue;
                }
                let v = out.coeff(&e) + a.clone() * b.clone();
                if v.is_zero() {
                    out.terms.remove(&e);
                } else {
                    out.terms.insert(e, v);
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::one(&self.space);
        for _ in 0..e {
            acc = acc.ring_multiply(self).expect("same space");
        }
        acc
    }

    /// Degree of the top monomial in a class of top degree.
    pub fn intersection_number(&self) -> Result<T, GeometryError> {
        let d = self.space.dim();
        if self.degree != d {
            return Err(GeometryError::DegreeMismatch { expected: d, found: self.degree });
        }
        Ok(self.coeff(&self.space.top_monomial()))
    }

    /// Coordinates in [`ProductSpace::graded_basis`] order.
    pub fn coordinates(&self) -> Vec<T> {
        self.space
            .graded_basis(self.degree.min(self.space.dim()))
            .map(|b| {
                if self.degree > self.space.dim() {
                    Vec::new()
                } else {
                    b.iter().map(|e| self.coeff(e)).collect()
                }
            })
            .unwrap_or_default()
    }

    /// Class with the given coordinates in the degree-`i` basis.
    pub fn from_coordinates(space: &ProductSpace, i: usize, coords: &[T]) -> Result<Self, GeometryError> {
        let basis = space.graded_basis(i)?;
        if basis.len() != coords.len() {
            return Err(GeometryError::DegreeMismatch { expected: basis.len(), found: coords.len() });
        }
        let mut out = Self::zero(space, i);
        for (e, c) in basis.into_iter().zip(coords) {
            if !c.is_zero() {
                out.terms.insert(e, c.clone());
            }
        }
        Ok(out)
    }

    /// Image under the ring endomorphism `h_j -> sum_l m[j][l] h_l`.
    pub fn pullback(&self, m: &[Vec<T>]) -> Self {
        let k = self.space.factors();
        assert_eq!(m.len(), k);
        let images: Vec<CohomClass<T>> = m
            .iter()
            .map(|row| Self::divisor(&self.space, row).expect("row length"))
            .collect();
        let mut out = Self::zero(&self.space, self.degree);
        for (e, c) in &self.terms {
            let mut t = Self::one(&self.space).scale(c);
            for (j, &a) in e.iter().enumerate() {
                for _ in 0..a {
                    t = t.ring_multiply(&images[j]).expect("same space");
                }
            }
            out = out.add(&t).expect("same degree");
        }
        out
    }
}

impl<T: OrderedRing> CohomClass<T> {
    /// A degree-1 class is big iff every `h_j` coefficient is positive.
    pub fn is_big(&self) -> Result<bool, GeometryError> {
        if self.degree != 1 {
            return Err(GeometryError::DegreeMismatch { expected: 1, found: self.degree });
        }
        Ok(self.coordinates().iter().all(|c| c.is_positive()))
    }
}

pub type Class = CohomClass<crate::Rational>;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn p1p1() -> ProductSpace {
        ProductSpace::new(vec![1, 1]).unwrap()
    }

    fn h(space: &ProductSpace, j: usize) -> Class {
        Class::hyperplane(space, j)
    }

    #[test]
    fn multiply_with_truncation() {
        let s = p1p1();
        let h1h2 = h(&s, 0).ring_multiply(&h(&s, 1)).unwrap();
        assert_eq!(h1h2.coeff(&[1, 1]), int(1));
        assert!(h(&s, 0).ring_multiply(&h(&s, 0)).unwrap().is_zero());
        let p2 = ProductSpace::new(vec![2]).unwrap();
        assert_eq!(h(&p2, 0).pow(2).coeff(&[2]), int(1));
    }

    #[test]
    fn multiply_rejects_other_space() {
        let p2 = ProductSpace::new(vec![2]).unwrap();
        assert_eq!(
            h(&p1p1(), 0).ring_multiply(&h(&p2, 0)).unwrap_err(),
            GeometryError::SpaceMismatch
        );
    }

    #[test]
    fn intersection_numbers() {
        let s = p1p1();
        let c = h(&s, 0).ring_multiply(&h(&s, 1)).unwrap().scale(&int(6));
        assert_eq!(c.intersection_number().unwrap(), int(6));
        let p2 = ProductSpace::new(vec![2]).unwrap();
        assert_eq!(h(&p2, 0).pow(2).intersection_number().unwrap(), int(1));
        let z = h(&s, 0).pow(2);
        assert_eq!(z.intersection_number().unwrap(), int(0));
        assert!(matches!(h(&s, 0).intersection_number(), Err(GeometryError::DegreeMismatch { .. })));
    }

    #[test]
    fn bigness() {
        let s = p1p1();
        assert!(Class::divisor(&s, &[int(2), int(3)]).unwrap().is_big().unwrap());
        assert!(!h(&s, 0).is_big().unwrap());
        assert!(!Class::divisor(&s, &[int(-1), int(1)]).unwrap().is_big().unwrap());
        assert!(h(&s, 0).pow(2).is_big().is_err());
    }

    #[test]
    fn graded_bases() {
        let s = p1p1();
        assert_eq!(s.graded_basis(1).unwrap(), vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(s.graded_basis(2).unwrap(), vec![vec![1, 1]]);
        assert_eq!(ProductSpace::new(vec![2]).unwrap().graded_basis(2).unwrap(), vec![vec![2]]);
        assert!(s.graded_basis(3).is_err());
        let s3 = ProductSpace::new(vec![2, 1]).unwrap();
        assert_eq!(s3.graded_basis(2).unwrap(), vec![vec![2, 0], vec![1, 1]]);
    }

    #[test]
    fn top_self_intersection_of_ample() {
        // (c1 h1 + c2 h2)^2 = 2 c1 c2 on P1 x P1
        let s = p1p1();
        for (c1, c2) in [(1, 1), (2, 5), (-3, 4)] {
            let l = Class::divisor(&s, &[int(c1), int(c2)]).unwrap();
            assert_eq!(l.pow(2).intersection_number().unwrap(), int(2 * c1 * c2));
        }
    }

    #[test]
    fn pullback_of_point_class() {
        let s = p1p1();
        let pt = h(&s, 0).ring_multiply(&h(&s, 1)).unwrap();
        let m = vec![vec![int(0), int(2)], vec![int(3), int(0)]];
        assert_eq!(pt.pullback(&m).coeff(&[1, 1]), int(6));
    }
}
