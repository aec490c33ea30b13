//! Dynamical Mordell–Lang experiments on `X x Y`: multiplier disjointness,
//! return sets of a correspondence and the height-separation sequence.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::algebra::{AlgebraicReal, IntPolynomial};
use crate::dynamics::{iterate, lyapunov_multipliers, DynamicsError, Endomorphism, MultiPoly, ProjPoint, StopReason};
use crate::geometry::{Class, ProductSpace};
use crate::heights::{orbit_class_heights, HeightError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DmlError {
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Height(#[from] HeightError),
    #[error("a correspondence needs at least one equation")]
    NoEquations,
    #[error("equation {0} is the zero polynomial")]
    ZeroEquation(usize),
    #[error("equation {0} is not multihomogeneous")]
    NotMultihomogeneous(usize),
    #[error("equation {0} uses the wrong number of variables")]
    VariableCount(usize),
    #[error("correspondence lives on {found}, expected {expected}")]
    SpaceMismatch { expected: String, found: String },
}

/// A closed subset `V` of `X x Y` cut out by multihomogeneous equations in
/// the concatenated coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Correspondence {
    ambient: ProductSpace,
    equations: Vec<MultiPoly<BigRational>>,
    int_equations: Vec<MultiPoly<BigInt>>,
}

impl Correspondence {
    pub fn new(ambient: ProductSpace, equations: Vec<MultiPoly<BigRational>>) -> Result<Self, DmlError> {
        if equations.is_empty() {
            return Err(DmlError::NoEquations);
        }
        for (i, e) in equations.iter().enumerate() {
            if e.nvars() != ambient.num_vars() {
                return Err(DmlError::VariableCount(i));
            }
            if e.is_zero() {
                return Err(DmlError::ZeroEquation(i));
            }
            for l in 0..ambient.factors() {
                let off = ambient.var_offset(l);
                if e.group_degree(off..off + ambient.dims()[l] + 1).is_none() {
                    return Err(DmlError::NotMultihomogeneous(i));
                }
            }
        }
        let int_equations = equations.iter().map(|e| e.clear_denominators()).collect();
        Ok(Correspondence { ambient, equations, int_equations })
    }

    pub fn ambient(&self) -> &ProductSpace {
        &self.ambient
    }

    pub fn equations(&self) -> &[MultiPoly<BigRational>] {
        &self.equations
    }

    /// Every equation vanishes at the concatenated coordinates.
    pub fn contains(&self, flat: &[BigInt]) -> bool {
        self.int_equations.iter().all(|e| e.eval(flat).is_zero())
    }

    /// Same correspondence with one more equation.
    pub fn with_equation(&self, e: MultiPoly<BigRational>) -> Result<Self, DmlError> {
        let mut eqs = self.equations.clone();
        eqs.push(e);
        Self::new(self.ambient.clone(), eqs)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub f_index: usize,
    pub g_index: usize,
    pub mu_f: AlgebraicReal,
    pub mu_g: AlgebraicReal,
    /// gcd of the two defining polynomials; equality needs a common root
    /// of it inside both isolating intervals.
    pub gcd: IntPolynomial,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DisjointnessCertificate {
    pub disjoint: bool,
    pub mu_f: Vec<AlgebraicReal>,
    pub mu_g: Vec<AlgebraicReal>,
    pub comparisons: Vec<Comparison>,
}

/// Whether no multiplier `>= 1` of `f` equals one of `g`, with every
/// pairwise comparison recorded.
pub fn multiplier_sets_disjoint(f: &Endomorphism, g: &Endomorphism) -> Result<DisjointnessCertificate, DmlError> {
    let one = BigRational::from_integer(1.into());
    let mu_f = lyapunov_multipliers(f)?;
    let mu_g = lyapunov_multipliers(g)?;
    let mut comparisons = Vec::new();
    for (i, a) in mu_f.iter().enumerate().filter(|(_, m)| m.cmp_rational(&one).is_ge()) {
        for (j, b) in mu_g.iter().enumerate().filter(|(_, m)| m.cmp_rational(&one).is_ge()) {
            comparisons.push(Comparison {
                f_index: i,
                g_index: j,
                mu_f: a.clone(),
                mu_g: b.clone(),
                gcd: a.poly().gcd(b.poly()),
                equal: a.algebraic_equal(b),
            });
        }
    }
    let disjoint = comparisons.iter().all(|c| !c.equal);
    Ok(DisjointnessCertificate { disjoint, mu_f, mu_g, comparisons })
}

/// Status of one index of the paired orbit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReturnStatus {
    /// Exact evaluation: every equation vanishes.
    Return,
    /// Exact evaluation: some equation does not vanish.
    NoReturn,
    /// Beyond the digit budget; some equation is nonzero modulo a prime.
    CertifiedNoReturn,
    /// Beyond the digit budget and zero modulo every prime tried.
    Undecided,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReturnSet {
    /// Indices `n <= horizon` at which the orbit is known to lie on `V`.
    pub indices: Vec<usize>,
    pub status: Vec<ReturnStatus>,
    /// Last index checked on exact coordinates.
    pub exact_until: usize,
    /// The exact orbit stopped on the digit budget.
    pub budget_exhausted: bool,
    pub horizon: usize,
}

impl ReturnSet {
    pub fn undecided(&self) -> Vec<usize> {
        self.indices_with(ReturnStatus::Undecided)
    }

    fn indices_with(&self, s: ReturnStatus) -> Vec<usize> {
        self.status.iter().enumerate().filter(|(_, &t)| t == s).map(|(n, _)| n).collect()
    }
}

/// Primes below `2^62` used for modular continuation.
pub const MODULI: [u64; 4] = [
    2305843009213693951,
    4611686018427387847,
    4611686018427387817,
    4611686018427387787,
];

/// Indices `n <= horizon` with `(f^n x, g^n y)` on `V`.
///
/// Points within the digit budget are tested exactly. Past the budget the
/// orbit continues on unreduced integer coordinates modulo several primes:
/// an unreduced representative differs from the canonical one by a nonzero
/// scalar per factor, so a nonzero residue proves the index is not a return.
pub fn return_set(
    f: &Endomorphism,
    g: &Endomorphism,
    x: &ProjPoint,
    y: &ProjPoint,
    v: &Correspondence,
    horizon: usize,
    digit_budget: u64,
) -> Result<ReturnSet, DmlError> {
    let fg = f.product_system(g);
    if v.ambient() != fg.space() {
        return Err(DmlError::SpaceMismatch { expected: fg.space().to_string(), found: v.ambient().to_string() });
    }
    let mut coords = x.coords().to_vec();
    coords.extend_from_slice(y.coords());
    let start = ProjPoint::new(coords)?;
    let orbit = iterate(&fg, &start, horizon, digit_budget)?;
    let mut status: Vec<ReturnStatus> = orbit
        .points()
        .iter()
        .map(|p| if v.contains(&p.flat()) { ReturnStatus::Return } else { ReturnStatus::NoReturn })
        .collect();
    let exact_until = orbit.last_index();
    let budget_exhausted = orbit.stop_reason() == &StopReason::Budget;
    if exact_until < horizon {
        let blocks: Vec<&MultiPoly<BigInt>> = fg.integer_blocks().iter().flatten().collect();
        let last = orbit.point(exact_until).flat();
        let mut states: Vec<Vec<u64>> = MODULI.iter().map(|&p| reduce(&last, p)).collect();
        for _ in exact_until + 1..=horizon {
            let mut certified = false;
            for (state, &p) in states.iter_mut().zip(&MODULI) {
                *state = blocks.iter().map(|b| b.eval_mod(state, p)).collect();
                if v.int_equations.iter().any(|e| e.eval_mod(state, p) != 0) {
                    certified = true;
                }
            }
            status.push(if certified { ReturnStatus::CertifiedNoReturn } else { ReturnStatus::Undecided });
        }
    }
    let indices = status
        .iter()
        .enumerate()
        .filter(|(_, &s)| s == ReturnStatus::Return || s == ReturnStatus::Undecided)
        .map(|(n, _)| n)
        .collect();
    Ok(ReturnSet { indices, status, exact_until, budget_exhausted, horizon })
}

fn reduce(v: &[BigInt], p: u64) -> Vec<u64> {
    let m = BigInt::from(p);
    v.iter().map(|c| c.mod_floor(&m).to_u64().expect("residue fits")).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeparationReport {
    /// `N h_L1(f^n x) - h_L2(g^n y)` for the computed `n`.
    pub sequence: Vec<f64>,
    /// First index from which every later value is negative.
    pub crossover: Option<usize>,
    /// Strictly decreasing from the crossover on.
    pub decreasing_after_crossover: bool,
    /// Negative, strictly decreasing tail: the sequence heads to minus
    /// infinity over the horizon.
    pub diverges: bool,
    /// Largest absolute value is at rounding level.
    pub bounded: bool,
    /// Number of steps actually available within the digit budget.
    pub horizon_reached: usize,
}

pub fn height_separation(
    f: &Endomorphism,
    g: &Endomorphism,
    x: &ProjPoint,
    y: &ProjPoint,
    big_n: u32,
    horizon: usize,
    digit_budget: u64,
) -> Result<SeparationReport, DmlError> {
    let of = iterate(f, x, horizon, digit_budget)?;
    let og = iterate(g, y, horizon, digit_budget)?;
    let hf = orbit_class_heights(&of, &Class::ample(f.space()))?;
    let hg = orbit_class_heights(&og, &Class::ample(g.space()))?;
    let len = hf.len().min(hg.len());
    let sequence: Vec<f64> = (0..len).map(|n| f64::from(big_n) * hf[n] - hg[n]).collect();
    let crossover = match sequence.iter().rposition(|&s| s >= 0.0) {
        None => Some(0),
        Some(i) if i + 1 < len => Some(i + 1),
        Some(_) => None,
    };
    let decreasing_after_crossover =
        crossover.is_some_and(|c| sequence[c..].windows(2).all(|w| w[1] < w[0]));
    let diverges = decreasing_after_crossover && sequence.len() >= 2 && crossover.is_some_and(|c| c + 1 < len);
    let scale = sequence.iter().fold(0f64, |m, s| m.max(s.abs()));
    let bounded = scale <= 1e-9 * (1.0 + hf.iter().fold(0f64, |m, h| m.max(h.abs())));
    Ok(SeparationReport { sequence, crossover, decreasing_after_crossover, diverges, bounded, horizon_reached: len - 1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn p1() -> ProductSpace {
        ProductSpace::new(vec![1]).unwrap()
    }

    fn power(d: u32) -> Endomorphism {
        Endomorphism::power_map(p1(), d)
    }

    fn pt(c: &[i64]) -> ProjPoint {
        ProjPoint::from_i64(&[c]).unwrap()
    }

    fn diagonal() -> Correspondence {
        let v = |i| MultiPoly::<BigRational>::var(4, i);
        Correspondence::new(p1().product(&p1()), vec![v(0).mul(&v(3)).sub(&v(1).mul(&v(2)))]).unwrap()
    }

    #[test]
    fn disjointness() {
        let c = multiplier_sets_disjoint(&power(2), &power(3)).unwrap();
        assert!(c.disjoint);
        assert_eq!(c.comparisons.len(), 1);
        assert!(!multiplier_sets_disjoint(&power(2), &power(2)).unwrap().disjoint);

        let twist = Endomorphism::monomial(
            p1().product(&p1()),
            &[vec![vec![0, 0, 2, 0], vec![0, 0, 0, 2]], vec![vec![3, 0, 0, 0], vec![0, 3, 0, 0]]],
        )
        .unwrap();
        let c = multiplier_sets_disjoint(&twist, &power(6)).unwrap();
        assert!(c.disjoint);
        assert_eq!(c.comparisons.len(), 2);
        assert!(c.comparisons.iter().all(|k| k.gcd.degree() == Some(0)));
    }

    #[test]
    fn diagonal_returns() {
        let r = return_set(&power(2), &power(3), &pt(&[2, 1]), &pt(&[2, 1]), &diagonal(), 20, 1_000_000).unwrap();
        assert_eq!(r.indices, vec![0]);
        assert!(r.undecided().is_empty());
        assert_eq!(r.status.len(), 21);

        let r = return_set(&power(2), &power(3), &pt(&[1, 1]), &pt(&[1, 1]), &diagonal(), 20, 1000).unwrap();
        assert_eq!(r.indices, (0..=20).collect::<Vec<_>>());

        let unit = Correspondence::new(diagonal().ambient().clone(), vec![MultiPoly::constant(4, int(1))]).unwrap();
        let r = return_set(&power(2), &power(3), &pt(&[1, 1]), &pt(&[1, 1]), &unit, 5, 1000).unwrap();
        assert!(r.indices.is_empty());
        assert_eq!(
            Correspondence::new(unit.ambient().clone(), vec![MultiPoly::zero(4)]),
            Err(DmlError::ZeroEquation(0))
        );
    }

    #[test]
    fn modular_continuation_agrees_with_exact() {
        // x = [2:1] and y = [4:1]: f^n x = 2^(2^n), g^n y = 4^(3^n) never meet
        let x = pt(&[2, 1]);
        let y = pt(&[4, 1]);
        let exact = return_set(&power(2), &power(3), &x, &y, &diagonal(), 8, 1_000_000).unwrap();
        let modular = return_set(&power(2), &power(3), &x, &y, &diagonal(), 8, 5).unwrap();
        assert_eq!(exact.indices, modular.indices);
        assert!(modular.exact_until < 8);
        assert!(modular.status[modular.exact_until + 1..].iter().all(|s| *s == ReturnStatus::CertifiedNoReturn));
    }

    #[test]
    fn separation_sequences() {
        let s = height_separation(&power(2), &power(3), &pt(&[2, 1]), &pt(&[2, 1]), 1, 10, 1_000_000).unwrap();
        for (n, v) in s.sequence.iter().enumerate() {
            let expected = (2f64.powi(n as i32) - 3f64.powi(n as i32)) * std::f64::consts::LN_2;
            assert!((v - expected).abs() < 1e-9 * (1.0 + expected.abs()));
        }
        assert_eq!(s.crossover, Some(1));
        assert!(s.diverges);

        let s = height_separation(&power(2), &power(2), &pt(&[3, 1]), &pt(&[3, 1]), 1, 8, 1_000_000).unwrap();
        assert!(s.sequence.iter().all(|&v| v == 0.0));
        assert!(s.bounded);

        // 100 * 2^n > 3^n until n = 12
        let s = height_separation(&power(2), &power(3), &pt(&[2, 1]), &pt(&[2, 1]), 100, 13, 1_000_000).unwrap();
        assert!(s.sequence[1] > 0.0);
        assert_eq!(s.crossover, Some(12));
        assert!(s.decreasing_after_crossover);
    }
}
