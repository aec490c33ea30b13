//! Forward orbits with per-factor heights and a stopping reason.

use num_bigint::BigInt;

use super::{DynamicsError, Endomorphism, ProjPoint};
use crate::scalar::{decimal_digits, ln_big};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StopReason {
    Completed,
    Budget,
    Indeterminacy { step: usize, block: usize },
}

impl StopReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            StopReason::Completed => "completed",
            StopReason::Budget => "budget",
            StopReason::Indeterminacy { .. } => "indeterminacy",
        }
    }
}

/// Height of one factor: digit count and natural log of the largest
/// absolute coordinate. The exact integer is [`OrbitRecord::max_abs`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FactorHeight {
    pub digits: u64,
    pub ln: f64,
}

impl FactorHeight {
    pub fn of(max_abs: &BigInt) -> Self {
        FactorHeight { digits: decimal_digits(max_abs), ln: ln_big(max_abs) }
    }
}

/// `x, f(x), f^2(x), ...` indexed from 0.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitRecord {
    system_digest: String,
    points: Vec<ProjPoint>,
    heights: Vec<Vec<FactorHeight>>,
    stop_reason: StopReason,
}

impl OrbitRecord {
    pub fn new(system_digest: String, points: Vec<ProjPoint>, stop_reason: StopReason) -> Self {
        let heights = points.iter().map(point_heights).collect();
        OrbitRecord { system_digest, points, heights, stop_reason }
    }

    pub fn system_digest(&self) -> &str {
        &self.system_digest
    }

    pub fn points(&self) -> &[ProjPoint] {
        &self.points
    }

    pub fn point(&self, n: usize) -> &ProjPoint {
        &self.points[n]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index of the last stored point.
    pub fn last_index(&self) -> usize {
        self.points.len().saturating_sub(1)
    }

    pub fn stop_reason(&self) -> &StopReason {
        &self.stop_reason
    }

    pub fn factor_heights(&self, n: usize) -> &[FactorHeight] {
        &self.heights[n]
    }

    /// `ln max|coordinates|` of factor `j` at step `n`.
    pub fn height(&self, n: usize, j: usize) -> f64 {
        self.heights[n][j].ln
    }

    pub fn max_abs(&self, n: usize, j: usize) -> BigInt {
        self.points[n].max_abs(j)
    }

    /// Continues the orbit up to index `n_max` within `digit_budget`.
    pub fn extend(&mut self, f: &Endomorphism, n_max: usize, digit_budget: u64) -> Result<(), DynamicsError> {
        if matches!(self.stop_reason, StopReason::Indeterminacy { .. }) {
            return Ok(());
        }
        self.stop_reason = StopReason::Completed;
        while self.points.len() <= n_max {
            let n = self.points.len() - 1;
            let next = match f.evaluate_at_step(&self.points[n], n) {
                Ok(p) => p,
                Err(DynamicsError::Indeterminacy { step, block }) => {
                    self.stop_reason = StopReason::Indeterminacy { step, block };
                    return Ok(());
                }
                Err(e) => return Err(e),
            };
            let h = point_heights(&next);
            if h.iter().map(|x| x.digits).sum::<u64>() > digit_budget {
                self.stop_reason = StopReason::Budget;
                return Ok(());
            }
            self.points.push(next);
            self.heights.push(h);
        }
        Ok(())
    }

    /// Drops every point after index `n`.
    pub fn truncate(&mut self, n: usize) {
        self.points.truncate(n + 1);
        self.heights.truncate(n + 1);
        self.stop_reason = StopReason::Completed;
    }
}

fn point_heights(p: &ProjPoint) -> Vec<FactorHeight> {
    (0..p.factors()).map(|j| FactorHeight::of(&p.max_abs(j))).collect()
}

/// Orbit of `x` up to index `n_max`, stopping before the total digit size
/// of a point exceeds `digit_budget`. Indeterminacy is an error.
pub fn iterate(f: &Endomorphism, x: &ProjPoint, n_max: usize, digit_budget: u64) -> Result<OrbitRecord, DynamicsError> {
    let rec = iterate_partial(f, x, n_max, digit_budget)?;
    match rec.stop_reason {
        StopReason::Indeterminacy { step, block } => Err(DynamicsError::Indeterminacy { step, block }),
        _ => Ok(rec),
    }
}

/// Like [`iterate`] but keeps the points computed before an indeterminacy.
pub fn iterate_partial(
    f: &Endomorphism,
    x: &ProjPoint,
    n_max: usize,
    digit_budget: u64,
) -> Result<OrbitRecord, DynamicsError> {
    if !x.lies_on(f.space()) {
        return Err(DynamicsError::PointShape(f.space().to_string()));
    }
    let mut rec = OrbitRecord::new(f.digest(), vec![x.clone()], StopReason::Completed);
    rec.extend(f, n_max, digit_budget)?;
    Ok(rec)
}
