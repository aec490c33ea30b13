//! Exact arithmetic kernel: polynomials, matrices, real root isolation,
//! certified real algebraic numbers and linear cone feasibility.

pub mod cone;
pub mod field;
pub mod interval;
pub mod matrix;
pub mod poly;
pub mod real;
pub mod roots;
pub mod stability;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

pub use cone::subspace_meets_open_orthant;
pub use field::FieldElement;
pub use interval::Interval;
pub use matrix::{FloatMatrix, IntMatrix, Matrix, RationalMatrix};
pub use poly::{IntPolynomial, Polynomial, RatPolynomial};
pub use real::{resultant, AlgebraicReal};
pub use roots::{count_real_roots, simplest_rational, sturm_isolate_real_roots, SturmSequence};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("operation on the zero polynomial")]
    ZeroPolynomial,
    #[error("interval does not isolate exactly one root")]
    NotIsolating,
    #[error("division by a number that is zero")]
    DivisionByZero,
    #[error("resultant vanished identically")]
    DegenerateResultant,
    #[error("matrix has a negative entry")]
    NegativeEntry,
    #[error("matrix is singular")]
    Singular,
    #[error("linear system is inconsistent")]
    Inconsistent,
    #[error("vector of dimension {found}, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// `det(tI - m)` as an integer polynomial and positive scale.
pub fn char_poly(m: &RationalMatrix) -> Result<(IntPolynomial, BigInt), AlgebraError> {
    m.char_poly()
}

/// Largest real root of the characteristic polynomial of a nonnegative
/// matrix; by Perron–Frobenius this is its spectral radius.
pub fn spectral_radius_nonneg(m: &RationalMatrix) -> Result<AlgebraicReal, AlgebraError> {
    if m.entries().any(|c| c.is_negative()) {
        return Err(AlgebraError::NegativeEntry);
    }
    let (p, _) = m.char_poly()?;
    if m.rows() == 0 {
        return Err(AlgebraError::NotSquare { rows: 0, cols: 0 });
    }
    let roots = sturm_isolate_real_roots(&p)?;
    // a nonnegative matrix always has its spectral radius as an eigenvalue
    Ok(roots.into_iter().last().unwrap_or_else(|| AlgebraicReal::from_integer(0)))
}

/// Real eigenvalues of a rational matrix, ascending.
pub fn real_eigenvalues(m: &RationalMatrix) -> Result<Vec<AlgebraicReal>, AlgebraError> {
    let (p, _) = m.char_poly()?;
    if p.is_zero() {
        return Ok(Vec::new());
    }
    sturm_isolate_real_roots(&p)
}

pub fn algebraic_equal(a: &AlgebraicReal, b: &AlgebraicReal) -> bool {
    a.algebraic_equal(b)
}

pub fn algebraic_ratio(a: &AlgebraicReal, b: &AlgebraicReal) -> Result<AlgebraicReal, AlgebraError> {
    a.algebraic_ratio(b)
}

pub fn refine(a: &AlgebraicReal, width: &num_rational::BigRational) -> AlgebraicReal {
    a.refine(width)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    #[test]
    fn spectral_radius_examples() {
        let d = RationalMatrix::from_i64_rows(&[&[2, 0], &[0, 3]]);
        assert_eq!(spectral_radius_nonneg(&d).unwrap().as_rational(), Some(int(3)));
        let s = spectral_radius_nonneg(&RationalMatrix::from_i64_rows(&[&[0, 2], &[3, 0]])).unwrap();
        assert_eq!(s.poly(), &IntPolynomial::from_i64(&[-6, 0, 1]));
        let one = spectral_radius_nonneg(&RationalMatrix::from_i64_rows(&[&[5]])).unwrap();
        assert_eq!(one.as_rational(), Some(int(5)));
    }

    #[test]
    fn spectral_radius_rejects_negative_entries() {
        let m = RationalMatrix::from_i64_rows(&[&[1, -1], &[0, 1]]);
        assert_eq!(spectral_radius_nonneg(&m).unwrap_err(), AlgebraError::NegativeEntry);
    }

    #[test]
    fn nilpotent_has_radius_zero() {
        let m = RationalMatrix::from_i64_rows(&[&[0, 1], &[0, 0]]);
        assert!(spectral_radius_nonneg(&m).unwrap().is_zero());
    }
}
