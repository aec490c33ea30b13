//! Exact computation of dynamical degrees, cohomological Lyapunov
//! multipliers, Weil and canonical heights, and arithmetic-degree estimates
//! for endomorphisms of products of projective spaces over `Q`.
//!
//! The containers in [`algebra`] and [`geometry`] are generic over the
//! scalar; the aliases below fix the instantiations used by the exact paths.

pub mod algebra;
pub mod dml;
pub mod dynamics;
pub mod geometry;
pub mod heights;
pub mod scalar;

pub use algebra::{AlgebraError, AlgebraicReal};

pub type Integer = num_bigint::BigInt;
pub type Rational = num_rational::BigRational;

pub type IntPolynomial = algebra::Polynomial<Integer>;
pub type RatPolynomial = algebra::Polynomial<Rational>;
pub type RationalMatrix = algebra::Matrix<Rational>;
pub type IntMatrix = algebra::Matrix<Integer>;
pub type FloatMatrix = algebra::Matrix<f64>;
