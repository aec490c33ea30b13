//! Pullback on cohomology, dynamical degrees and Lyapunov multipliers.

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{DynamicsError, Endomorphism};
use crate::algebra::{spectral_radius_nonneg, subspace_meets_open_orthant, AlgebraicReal, FieldElement};
use crate::geometry::CohomClass;
use crate::scalar::ln_big;
use crate::RationalMatrix;

fn degree_rows(f: &Endomorphism) -> Vec<Vec<BigRational>> {
    f.degree_matrix()
        .iter()
        .map(|r| r.iter().map(|&d| BigRational::from_integer(d.into())).collect())
        .collect()
}

/// Matrix of `f^*` on the degree-`i` piece in the basis of
/// [`crate::geometry::ProductSpace::graded_basis`]; column `c` holds the
/// coordinates of the pullback of basis element `c`.
pub fn pullback_on_graded(f: &Endomorphism, i: usize) -> Result<RationalMatrix, DynamicsError> {
    let space = f.space();
    let basis = space.graded_basis(i)?;
    let rows = degree_rows(f);
    let m = basis.len();
    let mut out = RationalMatrix::zeros(m, m);
    for (c, e) in basis.iter().enumerate() {
        let img = CohomClass::monomial(space, e.clone(), BigRational::one())?.pullback(&rows);
        for (r, v) in img.coordinates().into_iter().enumerate() {
            out[(r, c)] = v;
        }
    }
    Ok(out)
}

/// `f^*` on `N^1`: the transpose of the multidegree matrix.
pub fn pullback_on_n1(f: &Endomorphism) -> RationalMatrix {
    pullback_on_graded(f, 1).expect("degree 1 exists")
}

/// `lambda_i(f)` as the spectral radius of `f^*` on degree `i`.
pub fn dynamical_degree(f: &Endomorphism, i: usize) -> Result<AlgebraicReal, DynamicsError> {
    if i == 0 {
        pullback_on_graded(f, 0)?;
        return Ok(AlgebraicReal::from_integer(1));
    }
    Ok(spectral_radius_nonneg(&pullback_on_graded(f, i)?)?)
}

/// `lambda_0, ..., lambda_d`.
pub fn dynamical_degrees(f: &Endomorphism) -> Result<Vec<AlgebraicReal>, DynamicsError> {
    (0..=f.space().dim()).map(|i| dynamical_degree(f, i)).collect()
}

/// `mu_i = lambda_i / lambda_(i-1)` for `i = 1..d`.
pub fn lyapunov_multipliers(f: &Endomorphism) -> Result<Vec<AlgebraicReal>, DynamicsError> {
    let l = dynamical_degrees(f)?;
    l.windows(2)
        .map(|w| Ok(w[1].algebraic_ratio(&w[0])?.simplified()))
        .collect()
}

/// The candidates `alpha` for which the image of `f^* - alpha` on `N^1`
/// misses the open positive orthant (the big cone).
pub fn multipliers_via_big_cone(
    f: &Endomorphism,
    candidates: &[AlgebraicReal],
) -> Result<Vec<AlgebraicReal>, DynamicsError> {
    let lam = pullback_on_n1(f);
    let k = lam.rows();
    let mut out = Vec::new();
    for a in candidates {
        let meets = match a.as_rational() {
            Some(r) => {
                let gens: Vec<Vec<BigRational>> = (0..k)
                    .map(|c| (0..k).map(|r0| if r0 == c { &lam[(r0, c)] - &r } else { lam[(r0, c)].clone() }).collect())
                    .collect();
                subspace_meets_open_orthant(&gens)?
            }
            None => {
                let alpha = Arc::new(a.clone());
                let gens: Vec<Vec<FieldElement>> = (0..k)
                    .map(|c| {
                        (0..k)
                            .map(|r0| {
                                let e = FieldElement::rational(lam[(r0, c)].clone(), &alpha);
                                if r0 == c {
                                    e - FieldElement::generator(&alpha)
                                } else {
                                    e
                                }
                            })
                            .collect()
                    })
                    .collect();
                subspace_meets_open_orthant(&gens)?
            }
        };
        if !meets {
            out.push(a.clone());
        }
    }
    Ok(out)
}

/// Exact intersection numbers `((f^n)^* L^i . L^(d-i))` with `L` the sum
/// of the hyperplane classes, and their floating growth rates.
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthTable {
    pub degree: usize,
    /// Value at `n = 0`, i.e. `L^d`.
    pub base: BigRational,
    /// Values for `n = 1..=n_max`.
    pub values: Vec<BigRational>,
    /// `value_n^(1/n)`.
    pub roots: Vec<f64>,
    /// `(value_n / value_(n/2))^(1 / (n - n/2))`, which cancels the
    /// constant factor that slows the plain root.
    pub trend: Vec<f64>,
    /// `(value_n / value_(n-2))^(1/2)` (the plain ratio at `n = 1`): also
    /// constant-free, averages period-2 oscillation, and discounts a close
    /// subdominant eigenvalue less than `trend` does.
    pub lag2: Vec<f64>,
}

impl GrowthTable {
    fn value(&self, n: usize) -> &BigRational {
        if n == 0 {
            &self.base
        } else {
            &self.values[n - 1]
        }
    }
}

pub fn intersection_growth_estimate(f: &Endomorphism, i: usize, n_max: usize) -> Result<GrowthTable, DynamicsError> {
    let space = f.space();
    let d = space.dim();
    if i > d {
        return Err(crate::geometry::GeometryError::DegreeOutOfRange { degree: i, dim: d }.into());
    }
    let l = CohomClass::<BigRational>::ample(space);
    let rest = l.pow(d - i);
    let rows = degree_rows(f);
    let mut c = l.pow(i);
    let base = c.ring_multiply(&rest)?.intersection_number()?;
    let mut table = GrowthTable { degree: i, base, values: vec![], roots: vec![], trend: vec![], lag2: vec![] };
    for n in 1..=n_max {
        c = c.pullback(&rows);
        let v = c.ring_multiply(&rest)?.intersection_number()?;
        table.values.push(v);
        let ln_n = ln_rat(table.value(n));
        let half = n / 2;
        let ln_h = ln_rat(table.value(half));
        table.roots.push((ln_n / n as f64).exp());
        table.trend.push(((ln_n - ln_h) / (n - half) as f64).exp());
        let back = n.saturating_sub(2);
        table.lag2.push(((ln_n - ln_rat(table.value(back))) / (n - back) as f64).exp());
    }
    Ok(table)
}

fn ln_rat(r: &BigRational) -> f64 {
    if r.is_zero() {
        return f64::NEG_INFINITY;
    }
    ln_big(r.numer()) - ln_big(r.denom())
}
