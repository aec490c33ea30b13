//! Estimators for the arithmetic degree `lim h(f^n x)^(1/n)` and the
//! classifier against the Lyapunov multipliers.

use num_rational::BigRational;
use num_traits::Float;

use super::{first_repeat, orbit_class_heights, HeightError};
use crate::algebra::stability::max_root_modulus;
use crate::algebra::{AlgebraicReal, IntPolynomial, RatPolynomial};
use crate::dynamics::OrbitRecord;
use crate::geometry::Class;
use crate::scalar::rat_to_f64;

fn plus<F: Float>(h: F) -> F {
    h.max(F::one())
}

/// `h+(x_n)^(1/n)` for `n = 1..`.
pub fn root_estimates<F: Float>(h: &[F]) -> Vec<F> {
    h.iter()
        .enumerate()
        .skip(1)
        .map(|(n, &v)| plus(v).powf(F::one() / F::from(n).unwrap()))
        .collect()
}

/// `h+(x_(n+1)) / h+(x_n)` for `n = 0..`.
pub fn ratio_estimates<F: Float>(h: &[F]) -> Vec<F> {
    h.windows(2).map(|w| plus(w[1]) / plus(w[0])).collect()
}

/// `sqrt(h+(x_(n+2)) / h+(x_n))`, which averages out period-2 oscillation.
pub fn two_step_estimates<F: Float>(h: &[F]) -> Vec<F> {
    h.windows(3).map(|w| (plus(w[2]) / plus(w[0])).sqrt()).collect()
}

/// The last three values agree within relative `tol`.
pub fn has_converged<F: Float>(seq: &[F], tol: F) -> bool {
    if seq.len() < 3 {
        return false;
    }
    let last = &seq[seq.len() - 3..];
    let hi = last.iter().fold(F::neg_infinity(), |a, &b| a.max(b));
    let lo = last.iter().fold(F::infinity(), |a, &b| a.min(b));
    hi - lo <= tol * hi.abs()
}

/// A linear recurrence `s_(m+k) = sum_i a_i s_(m+i)` matching the tail of
/// a height sequence, and the largest root modulus of its characteristic
/// polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct RecurrenceFit {
    pub order: usize,
    pub coefficients: Vec<f64>,
    pub rate: f64,
}

const FIT_TOL: f64 = 1e-9;

/// Smallest-order recurrence fitted on the last `2k` values that also
/// predicts the preceding windows to relative `1e-9`.
pub fn recurrence_estimate(s: &[f64], max_order: usize) -> Option<RecurrenceFit> {
    let m_last = s.len().checked_sub(1)?;
    for k in 1..=max_order {
        // k fitting windows and two held-out windows
        if s.len() < 2 * k + 2 {
            break;
        }
        let fit_start = m_last + 1 - 2 * k;
        let rows: Vec<Vec<f64>> = (0..k).map(|r| s[fit_start + r..fit_start + r + k].to_vec()).collect();
        let rhs: Vec<f64> = (0..k).map(|r| s[fit_start + r + k]).collect();
        let Some(a) = solve_dense(rows, rhs) else { continue };
        let ok = (1..=2).all(|back| {
            let m = fit_start - back;
            let pred: f64 = (0..k).map(|i| a[i] * s[m + i]).sum();
            let scale = s[m..=m + k].iter().fold(0f64, |x, v| x.max(v.abs()));
            scale > 0.0 && (pred - s[m + k]).abs() <= FIT_TOL * scale
        });
        if !ok {
            continue;
        }
        // t^k - sum a_i t^i
        let mut coeffs: Vec<BigRational> =
            a.iter().map(|&c| -BigRational::from_float(c).unwrap_or_default()).collect();
        coeffs.push(BigRational::from_integer(1.into()));
        let p = IntPolynomial::from_rational(&RatPolynomial::new(coeffs));
        let tol = BigRational::new(1.into(), num_bigint::BigInt::from(10u64).pow(13));
        let (lo, hi) = max_root_modulus(&p, &tol);
        let rate = rat_to_f64(&((lo + hi) / BigRational::from_integer(2.into())));
        return Some(RecurrenceFit { order: k, coefficients: a, rate });
    }
    None
}

fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a.iter().flatten().fold(0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() <= 1e-13 * scale {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            let pivot = a[c].clone();
            for (x, y) in a[r][c..].iter_mut().zip(&pivot[c..]) {
                *x -= f * y;
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for c in (0..n).rev() {
        let s: f64 = (c + 1..n).map(|j| a[c][j] * x[j]).sum();
        x[c] = (b[c] - s) / a[c][c];
    }
    Some(x)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EstimateMethod {
    /// The orbit repeats a point, so heights are bounded.
    BoundedOrbit,
    Recurrence,
    Ratio,
    TwoStep,
    /// Nothing stabilized; the last ratio is reported.
    Unconverged,
}

impl EstimateMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            EstimateMethod::BoundedOrbit => "bounded-orbit",
            EstimateMethod::Recurrence => "recurrence",
            EstimateMethod::Ratio => "ratio",
            EstimateMethod::TwoStep => "two-step",
            EstimateMethod::Unconverged => "unconverged",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlphaEstimate {
    pub heights: Vec<f64>,
    pub root: Vec<f64>,
    pub ratio: Vec<f64>,
    pub two_step: Vec<f64>,
    pub recurrence: Option<RecurrenceFit>,
    pub estimate: f64,
    pub method: EstimateMethod,
    /// Last three ratios agree within `tol`.
    pub ratio_converged: bool,
    pub converged: bool,
    pub bounded: bool,
}

/// Arithmetic-degree estimate of a stored orbit for an ample class.
pub fn arithmetic_degree_estimate(orbit: &OrbitRecord, c: &Class, tol: f64) -> Result<AlphaEstimate, HeightError> {
    if orbit.len() < 4 {
        return Err(HeightError::OrbitTooShort { needed: 4, found: orbit.len() });
    }
    if !c.is_big()? {
        return Err(HeightError::NotAmple);
    }
    let h = orbit_class_heights(orbit, c)?;
    let mut est = estimate_from_heights(&h, tol, 2 * c.space().factors() + 2);
    if first_repeat(orbit).is_some() || h.iter().all(|&v| v == 0.0) {
        est.bounded = true;
        est.estimate = 1.0;
        est.method = EstimateMethod::BoundedOrbit;
        est.converged = true;
    }
    Ok(est)
}

/// Estimators on a raw height sequence. The final value is, in order of
/// preference: the rate of a recurrence validated on held-out values, the
/// stabilized ratio, the stabilized two-step value, and otherwise the last
/// ratio flagged unconverged.
pub fn estimate_from_heights(h: &[f64], tol: f64, max_order: usize) -> AlphaEstimate {
    let root = root_estimates(h);
    let ratio = ratio_estimates(h);
    let two_step = two_step_estimates(h);
    let growing = h.len() >= 2 && h[h.len() - 1] > 1.0;
    let recurrence = if growing { recurrence_estimate(h, max_order) } else { None };
    let ratio_converged = has_converged(&ratio, tol);
    let last_ratio = ratio.last().copied().unwrap_or(1.0);
    let (estimate, method, converged) = if let Some(r) = &recurrence {
        (r.rate, EstimateMethod::Recurrence, true)
    } else if ratio_converged {
        (last_ratio, EstimateMethod::Ratio, true)
    } else if has_converged(&two_step, tol) {
        (*two_step.last().unwrap(), EstimateMethod::TwoStep, true)
    } else {
        (last_ratio, EstimateMethod::Unconverged, false)
    };
    AlphaEstimate {
        heights: h.to_vec(),
        root,
        ratio,
        two_step,
        recurrence,
        estimate,
        method,
        ratio_converged,
        converged,
        bounded: false,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum AlphaClass {
    Multiplier(AlgebraicReal),
    Inconclusive,
}

/// The multiplier `>= 1` within relative `tol` of `estimate`.
pub fn classify_alpha(estimate: f64, multipliers: &[AlgebraicReal], tol: f64) -> Result<AlphaClass, HeightError> {
    let one = BigRational::from_integer(1.into());
    let mut distinct: Vec<&AlgebraicReal> = Vec::new();
    for m in multipliers.iter().filter(|m| m.cmp_rational(&one).is_ge()) {
        if !distinct.iter().any(|d| d.algebraic_equal(m)) {
            distinct.push(m);
        }
    }
    if distinct.is_empty() {
        return Err(HeightError::EmptyMultipliers);
    }
    let close: Vec<(&AlgebraicReal, f64)> = distinct
        .into_iter()
        .map(|m| (m, m.to_f64()))
        .filter(|(_, v)| (estimate - v).abs() <= tol * v)
        .collect();
    if close.is_empty() {
        return Ok(AlphaClass::Inconclusive);
    }
    let below = close.iter().any(|(_, v)| *v < estimate);
    let above = close.iter().any(|(_, v)| *v > estimate);
    if below && above {
        return Ok(AlphaClass::Inconclusive);
    }
    let best = close
        .iter()
        .min_by(|a, b| {
            let da = (estimate - a.1).abs();
            let db = (estimate - b.1).abs();
            da.total_cmp(&db).then_with(|| b.0.cmp_exact(a.0))
        })
        .unwrap();
    Ok(AlphaClass::Multiplier(best.0.clone()))
}
