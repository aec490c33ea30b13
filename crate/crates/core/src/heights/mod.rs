//! Weil heights over `Q`, canonical height vectors, arithmetic-degree
//! estimation and growth diagnostics along orbits.
//!
//! Heights use the natural logarithm. The height attached to a divisor
//! class `sum c_j h_j` is exactly `sum c_j ln max|x_j|` on canonical
//! coordinates.

pub mod canonical;
pub mod estimate;
pub mod growth;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;
use thiserror::Error;

use crate::algebra::AlgebraError;
use crate::dynamics::{DynamicsError, Endomorphism, OrbitRecord, ProjPoint};
use crate::geometry::{Class, GeometryError, ProductSpace};
use crate::scalar::{ln_big, rat_to_f64};

pub use canonical::{
    canonical_heights, canonical_heights_from_orbit, check_expanding, deviation_profile, functional_equation_residual,
    restrict_pullback,
    telescoping_limit, CanonicalHeightVector, LimitResult,
};
pub use estimate::{
    arithmetic_degree_estimate, classify_alpha, estimate_from_heights, has_converged, ratio_estimates,
    recurrence_estimate, root_estimates, two_step_estimates, AlphaClass, AlphaEstimate, EstimateMethod,
    RecurrenceFit,
};
pub use growth::{big_height_subsequence, growth_bound_check, BigHeightReport, DensityVerdict, GrowthReport};

pub use crate::dynamics::{FactorHeight, StopReason};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HeightError {
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("orbit has {found} points, at least {needed} are needed")]
    OrbitTooShort { needed: usize, found: usize },
    #[error("enumeration supports P^1 and P^2 factors with total dimension at most 3")]
    UnsupportedSpace,
    #[error("height bound {0} exceeds the enumeration limit ln 100")]
    BoundTooLarge(f64),
    #[error("the span of the basis is not invariant under f^*")]
    NotInvariant,
    #[error("basis classes are linearly dependent")]
    DependentBasis,
    #[error("the restricted pullback has an eigenvalue of modulus <= 1")]
    SmallEigenvalue,
    #[error("no multiplier is >= 1")]
    EmptyMultipliers,
    #[error("class is not ample")]
    NotAmple,
    #[error("class lives on a different space")]
    SpaceMismatch,
    #[error("big class minus the class of the effective part is not ample")]
    BadDecomposition,
}

/// `ln max|coordinate|` for every factor of a canonical point.
pub fn weil_height(x: &ProjPoint) -> Vec<f64> {
    (0..x.factors()).map(|j| ln_big(&x.max_abs(j))).collect()
}

/// Coefficients of a degree-1 class as floats.
pub fn class_weights(c: &Class) -> Result<Vec<f64>, HeightError> {
    if c.degree() != 1 {
        return Err(GeometryError::DegreeMismatch { expected: 1, found: c.degree() }.into());
    }
    Ok(c.coordinates().iter().map(rat_to_f64).collect())
}

/// `h_c(x) = sum c_j h_j(x)`.
pub fn class_height(c: &Class, x: &ProjPoint) -> Result<f64, HeightError> {
    let w = class_weights(c)?;
    if w.len() != x.factors() {
        return Err(HeightError::SpaceMismatch);
    }
    Ok(w.iter().zip(weil_height(x)).map(|(a, h)| a * h).sum())
}

/// `h_c(x_n)` along a stored orbit.
pub fn orbit_class_heights(orbit: &OrbitRecord, c: &Class) -> Result<Vec<f64>, HeightError> {
    let w = class_weights(c)?;
    (0..orbit.len())
        .map(|n| {
            let hs = orbit.factor_heights(n);
            if hs.len() != w.len() {
                return Err(HeightError::SpaceMismatch);
            }
            Ok(w.iter().zip(hs).map(|(a, h)| a * h.ln).sum())
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct LowerBoundReport {
    pub minimum: f64,
    pub argmin: usize,
    /// The class has nonnegative coefficients, so the bound is asserted.
    pub hypothesis: bool,
    /// `Some(minimum >= 0)` under the hypothesis, `None` otherwise.
    pub holds: Option<bool>,
}

/// Minimum of `h_c` over the orbit; for nonnegative classes it must be
/// nonnegative.
pub fn height_lower_bound_off_base_locus_check(c: &Class, orbit: &OrbitRecord) -> Result<LowerBoundReport, HeightError> {
    let hs = orbit_class_heights(orbit, c)?;
    let (argmin, minimum) = hs
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |a, (i, h)| if h < a.1 { (i, h) } else { a });
    let hypothesis = c.coordinates().iter().all(|v| !v.is_negative());
    Ok(LowerBoundReport { minimum, argmin, hypothesis, holds: hypothesis.then_some(minimum >= 0.0) })
}

/// Every point with all factor heights at most `bound`, by brute force over
/// primitive vectors. Points are ordered factor by factor, each factor's
/// vectors sorted by height and then lexicographically.
pub fn northcott_enumerate(space: &ProductSpace, bound: f64) -> Result<Vec<ProjPoint>, HeightError> {
    if space.dim() > 3 || space.dims().iter().any(|&n| n > 2) {
        return Err(HeightError::UnsupportedSpace);
    }
    if bound > 100f64.ln() + 1e-12 || bound.is_nan() {
        return Err(HeightError::BoundTooLarge(bound));
    }
    if bound < 0.0 {
        return Ok(Vec::new());
    }
    let mut m: i64 = 1;
    while ((m + 1) as f64).ln() <= bound + 1e-12 {
        m += 1;
    }
    let per_factor: Vec<Vec<Vec<BigInt>>> = space.dims().iter().map(|&n| primitive_vectors(n + 1, m)).collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; per_factor.len()];
    loop {
        let coords = idx.iter().zip(&per_factor).map(|(&i, v)| v[i].clone()).collect();
        out.push(ProjPoint::new(coords)?);
        let mut j = per_factor.len();
        loop {
            if j == 0 {
                return Ok(out);
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < per_factor[j].len() {
                break;
            }
            idx[j] = 0;
        }
    }
}

fn primitive_vectors(len: usize, m: i64) -> Vec<Vec<BigInt>> {
    let mut out = Vec::new();
    let mut v = vec![-m; len];
    loop {
        let lead = v.iter().find(|&&c| c != 0);
        let g = v.iter().fold(0i64, |g, &c| g.gcd(&c));
        if lead.is_some_and(|&c| c > 0) && g == 1 {
            out.push(v.clone());
        }
        let mut i = len;
        loop {
            if i == 0 {
                out.sort_by_key(|v| (v.iter().map(|c| c.abs()).max(), v.clone()));
                return out.into_iter().map(|v| v.into_iter().map(BigInt::from).collect()).collect();
            }
            i -= 1;
            v[i] += 1;
            if v[i] <= m {
                break;
            }
            v[i] = -m;
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DefectReport {
    /// `h_(f^* c)(x_n) - h_c(x_(n+1))` for each available `n`.
    pub sequence: Vec<f64>,
    pub sup: f64,
}

pub fn functoriality_defect(f: &Endomorphism, c: &Class, orbit: &OrbitRecord) -> Result<DefectReport, HeightError> {
    if orbit.len() < 2 {
        return Err(HeightError::OrbitTooShort { needed: 2, found: orbit.len() });
    }
    if c.space() != f.space() {
        return Err(HeightError::SpaceMismatch);
    }
    let rows: Vec<Vec<crate::Rational>> = f
        .degree_matrix()
        .iter()
        .map(|r| r.iter().map(|&d| crate::Rational::from_integer(d.into())).collect())
        .collect();
    let pulled = c.pullback(&rows);
    let a = orbit_class_heights(orbit, &pulled)?;
    let b = orbit_class_heights(orbit, c)?;
    let sequence: Vec<f64> = (0..orbit.len() - 1).map(|n| a[n] - b[n + 1]).collect();
    let sup = sequence.iter().fold(0f64, |m, v| m.max(v.abs()));
    Ok(DefectReport { sequence, sup })
}

/// Indices at which two stored points coincide, proving the orbit finite.
pub(crate) fn first_repeat(orbit: &OrbitRecord) -> Option<usize> {
    let mut seen = std::collections::HashSet::new();
    orbit.points().iter().position(|p| !seen.insert(p))
}

/// The class `sum deg_l h_l` of a multihomogeneous section.
pub fn section_class(space: &ProductSpace, section: &crate::dynamics::MultiPoly<crate::Rational>) -> Option<Class> {
    let degs: Option<Vec<crate::Rational>> = (0..space.factors())
        .map(|l| {
            let off = space.var_offset(l);
            section
                .group_degree(off..off + space.dims()[l] + 1)
                .map(|d| crate::Rational::from_integer(d.into()))
        })
        .collect();
    Class::divisor(space, &degs?).ok()
}

#[cfg(test)]
mod tests;
