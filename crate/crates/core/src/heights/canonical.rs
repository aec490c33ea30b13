//! Canonical height vectors as limits of `h(f^n x) Lambda^(-n)`.

use num_rational::BigRational;

use super::{orbit_class_heights, HeightError};
use crate::algebra::stability::roots_outside_unit_disk;
use crate::algebra::{AlgebraError, Matrix};
use crate::dynamics::{iterate, pullback_on_n1, Endomorphism, OrbitRecord, ProjPoint};
use crate::geometry::Class;
use crate::RationalMatrix;

#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalHeightVector {
    pub basis: Vec<Class>,
    /// Action of `f^*` on the span of the basis:
    /// `(f^* L_1, ..., f^* L_r) = (L_1, ..., L_r) Lambda`.
    pub lambda: RationalMatrix,
    pub values: Vec<f64>,
    /// `max_r |v_N - v_(N-1)|` for the last two iterates.
    pub error: f64,
    /// The same difference for every `n = 1..=n_used`.
    pub errors: Vec<f64>,
    pub n_used: usize,
    pub converged: bool,
}

impl CanonicalHeightVector {
    /// `values * Lambda^n`, the prediction for `h(f^n x)`.
    pub fn predicted(&self, n: u32) -> Vec<f64> {
        self.lambda.pow(n).to_f64().left_apply(&self.values)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitResult {
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    pub n_used: usize,
}

/// Basis coordinates as the columns of a `k x r` matrix.
fn basis_matrix(basis: &[Class]) -> Result<RationalMatrix, HeightError> {
    let cols: Vec<Vec<BigRational>> = basis
        .iter()
        .map(|c| {
            if c.degree() != 1 {
                return Err(crate::geometry::GeometryError::DegreeMismatch { expected: 1, found: c.degree() }.into());
            }
            Ok(c.coordinates())
        })
        .collect::<Result<_, HeightError>>()?;
    let k = cols.first().map_or(0, |c| c.len());
    Ok(Matrix::from_rows((0..k).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect()))
}

/// `Lambda` with `f^* B = B Lambda`, where `B` holds the basis columns.
pub fn restrict_pullback(f: &Endomorphism, basis: &[Class]) -> Result<RationalMatrix, HeightError> {
    if basis.is_empty() {
        return Err(HeightError::DependentBasis);
    }
    if basis.iter().any(|c| c.space() != f.space()) {
        return Err(HeightError::SpaceMismatch);
    }
    let b = basis_matrix(basis)?;
    if b.rank() < basis.len() {
        return Err(HeightError::DependentBasis);
    }
    let image = &pullback_on_n1(f) * &b;
    b.solve(&image).map_err(|e| match e {
        AlgebraError::Inconsistent => HeightError::NotInvariant,
        e => e.into(),
    })
}

/// Certifies that every eigenvalue of `lambda` has modulus above 1.
pub fn check_expanding(lambda: &RationalMatrix) -> Result<(), HeightError> {
    let (p, _) = lambda.char_poly()?;
    if roots_outside_unit_disk(&p) {
        Ok(())
    } else {
        Err(HeightError::SmallEigenvalue)
    }
}

/// `v_n = heights[n] Lambda^(-n)` for every `n`, keeping the last one and
/// the successive differences.
pub fn telescoping_limit(heights: &[Vec<f64>], lambda: &RationalMatrix) -> Result<LimitResult, HeightError> {
    if heights.is_empty() {
        return Err(HeightError::OrbitTooShort { needed: 1, found: 0 });
    }
    let inv = lambda.inverse()?;
    let mut power = RationalMatrix::identity(lambda.rows());
    let mut prev: Option<Vec<f64>> = None;
    let mut errors = Vec::new();
    let mut values = Vec::new();
    for h in heights {
        let v = power.to_f64().left_apply(h);
        if let Some(p) = &prev {
            errors.push(p.iter().zip(&v).fold(0f64, |m, (a, b)| m.max((a - b).abs())));
        }
        prev = Some(v.clone());
        values = v;
        power = &power * &inv;
    }
    Ok(LimitResult { values, errors, n_used: heights.len() - 1 })
}

/// Canonical heights at `orbit[start]` from the points `start..=start + n`.
pub fn canonical_heights_from_orbit(
    orbit: &OrbitRecord,
    basis: &[Class],
    lambda: &RationalMatrix,
    start: usize,
    n: usize,
    tol: f64,
) -> Result<CanonicalHeightVector, HeightError> {
    if orbit.len() < start + n + 1 {
        return Err(HeightError::OrbitTooShort { needed: start + n + 1, found: orbit.len() });
    }
    let per_class: Vec<Vec<f64>> = basis.iter().map(|c| orbit_class_heights(orbit, c)).collect::<Result<_, _>>()?;
    let rows: Vec<Vec<f64>> = (start..=start + n).map(|m| per_class.iter().map(|h| h[m]).collect()).collect();
    let lim = telescoping_limit(&rows, lambda)?;
    let error = lim.errors.last().copied().unwrap_or(f64::INFINITY);
    Ok(CanonicalHeightVector {
        basis: basis.to_vec(),
        lambda: lambda.clone(),
        values: lim.values,
        error,
        errors: lim.errors,
        n_used: n,
        converged: error < tol,
    })
}

/// Canonical height vector of `x` from the orbit up to `n_max`.
pub fn canonical_heights(
    f: &Endomorphism,
    x: &ProjPoint,
    basis: &[Class],
    n_max: usize,
    tol: f64,
    digit_budget: u64,
) -> Result<CanonicalHeightVector, HeightError> {
    let lambda = restrict_pullback(f, basis)?;
    check_expanding(&lambda)?;
    let orbit = iterate(f, x, n_max, digit_budget)?;
    canonical_heights_from_orbit(&orbit, basis, &lambda, 0, orbit.len() - 1, tol)
}

/// `max |h^(x_1) - h^(x_0) Lambda|` with both vectors computed from the
/// same number of steps, together with the two vectors.
pub fn functional_equation_residual(
    orbit: &OrbitRecord,
    basis: &[Class],
    lambda: &RationalMatrix,
    tol: f64,
) -> Result<(f64, CanonicalHeightVector, CanonicalHeightVector), HeightError> {
    if orbit.len() < 3 {
        return Err(HeightError::OrbitTooShort { needed: 3, found: orbit.len() });
    }
    let n = orbit.len() - 2;
    let h0 = canonical_heights_from_orbit(orbit, basis, lambda, 0, n, tol)?;
    let h1 = canonical_heights_from_orbit(orbit, basis, lambda, 1, n, tol)?;
    let pred = h0.predicted(1);
    let r = pred.iter().zip(&h1.values).fold(0f64, |m, (a, b)| m.max((a - b).abs()));
    Ok((r, h0, h1))
}

/// `max_r |h^(x) Lambda^n - h(x_n)|` for each `n` of the orbit.
pub fn deviation_profile(chv: &CanonicalHeightVector, orbit: &OrbitRecord) -> Result<Vec<f64>, HeightError> {
    let per_class: Vec<Vec<f64>> = chv.basis.iter().map(|c| orbit_class_heights(orbit, c)).collect::<Result<_, _>>()?;
    Ok((0..orbit.len())
        .map(|n| {
            let p = chv.predicted(n as u32);
            p.iter().zip(&per_class).fold(0f64, |m, (a, h)| m.max((a - h[n]).abs()))
        })
        .collect())
}
