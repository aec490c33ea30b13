//! Growth diagnostics: polynomial-times-exponential bounds from an
//! annihilating polynomial, and height subsequences off an effective
//! divisor.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::{orbit_class_heights, section_class, HeightError};
use crate::algebra::stability::max_root_modulus;
use crate::algebra::IntPolynomial;
use crate::dynamics::{Endomorphism, MultiPoly, OrbitRecord};
use crate::geometry::Class;
use crate::scalar::rat_to_f64;

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthReport {
    pub rho: f64,
    pub degree: usize,
    pub constant: f64,
    /// Orbit indices used to fit the constant.
    pub fit_len: usize,
    pub pass: bool,
    /// `min (2C g(n) - |h|) / (2C g(n))` over the checked indices.
    pub margin: f64,
}

/// Checks `|h_c(x_n)| <= 2C max(n,1)^deg(P) rho^n` on the last two thirds of
/// the orbit, with `C` fitted on the first third and `rho` the largest root
/// modulus of `P` (the bound is `2C` alone when `rho < 1`).
pub fn growth_bound_check(orbit: &OrbitRecord, c: &Class, annihilator: &IntPolynomial) -> Result<GrowthReport, HeightError> {
    if orbit.len() < 6 {
        return Err(HeightError::OrbitTooShort { needed: 6, found: orbit.len() });
    }
    let deg = annihilator.degree().ok_or(crate::algebra::AlgebraError::ZeroPolynomial)?;
    let tol = BigRational::new(1.into(), BigInt::from(10u64).pow(12));
    let (_, hi) = max_root_modulus(annihilator, &tol);
    let rho = rat_to_f64(&hi);
    let h = orbit_class_heights(orbit, c)?;
    let g = |n: usize| {
        if rho >= 1.0 {
            (n.max(1) as f64).powi(deg as i32) * rho.powi(n as i32)
        } else {
            1.0
        }
    };
    let fit_len = orbit.len() / 3;
    let constant = (0..fit_len).fold(0f64, |m, n| m.max(h[n].abs() / g(n)));
    let mut margin = f64::INFINITY;
    for (n, v) in h.iter().enumerate().skip(fit_len) {
        let b = 2.0 * constant * g(n);
        let m = if b > 0.0 { (b - v.abs()) / b } else if v.abs() == 0.0 { 0.0 } else { f64::NEG_INFINITY };
        margin = margin.min(m);
    }
    Ok(GrowthReport { rho, degree: deg, constant, fit_len, pass: margin >= 0.0, margin })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DensityVerdict {
    /// Heights on the subsequence keep setting new records.
    Consistent,
    /// Heights on the subsequence stall; the orbit is not dense.
    Inconsistent,
    /// Every orbit point lies on the effective divisor.
    AllOnSupport,
}

impl DensityVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            DensityVerdict::Consistent => "consistent with density",
            DensityVerdict::Inconsistent => "inconsistent with density",
            DensityVerdict::AllOnSupport => "all points on the support",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BigHeightReport {
    /// Orbit indices off the support of the effective section.
    pub indices: Vec<usize>,
    /// `h+_B(x_n)` at those indices.
    pub heights: Vec<f64>,
    /// `h+_B(x_n)^(1/n)` at those indices with `n >= 1`.
    pub roots: Vec<f64>,
    pub verdict: DensityVerdict,
}

/// Height subsequence off the zero set of `effective_part`, where
/// `big_class - [effective_part]` must be ample.
pub fn big_height_subsequence(
    f: &Endomorphism,
    orbit: &OrbitRecord,
    big_class: &Class,
    effective_part: &MultiPoly<BigRational>,
) -> Result<BigHeightReport, HeightError> {
    let space = f.space();
    if big_class.space() != space || effective_part.nvars() != space.num_vars() {
        return Err(HeightError::SpaceMismatch);
    }
    let e = section_class(space, effective_part).ok_or(HeightError::BadDecomposition)?;
    let ample = big_class.sub(&e)?;
    if effective_part.is_zero() || !ample.is_big()? {
        return Err(HeightError::BadDecomposition);
    }
    let section = effective_part.clear_denominators();
    let h = orbit_class_heights(orbit, big_class)?;
    let mut report = BigHeightReport { indices: vec![], heights: vec![], roots: vec![], verdict: DensityVerdict::AllOnSupport };
    for (n, p) in orbit.points().iter().enumerate() {
        if section.eval(&p.flat()).is_zero() {
            continue;
        }
        let v = h[n].max(1.0);
        report.indices.push(n);
        report.heights.push(v);
        if n >= 1 {
            report.roots.push(v.powf(1.0 / n as f64));
        }
    }
    if !report.indices.is_empty() {
        let records = report.heights.windows(2).all(|w| w[1] > w[0]);
        report.verdict = if records && report.heights.len() >= 2 {
            DensityVerdict::Consistent
        } else {
            DensityVerdict::Inconsistent
        };
    }
    Ok(report)
}

