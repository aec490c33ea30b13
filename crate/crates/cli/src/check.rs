//! The acceptance battery over the bundled corpus.
//!
//! Failures are results: every criterion reports `pass`, a margin where
//! one makes sense, and the numbers behind it.

use std::str::FromStr;

use arithdeg::algebra::stability::roots_inside_radius;
use arithdeg::algebra::{real_eigenvalues, AlgebraicReal};
use arithdeg::dml::{height_separation, multiplier_sets_disjoint, return_set};
use arithdeg::dynamics::{
    dynamical_degrees, intersection_growth_estimate, lyapunov_multipliers, multipliers_via_big_cone, pullback_on_n1,
    StopReason,
};
use arithdeg::geometry::{Class, ProductSpace};
use arithdeg::heights::{
    arithmetic_degree_estimate, classify_alpha, growth_bound_check, northcott_enumerate, restrict_pullback,
    telescoping_limit, AlphaClass,
};
use arithdeg::{IntPolynomial, Rational, RationalMatrix};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::commands::{hyperplane_basis, log_concave, math, run_canonical, same_set, CliError, Outcome, Settings};
use crate::corpus;
use crate::report::{algebraic, float, floats, RunReport, Stopwatch};
use crate::system::{Options, SystemDescription};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Degrees,
    Heights,
    Theorem11,
    Dml,
    All,
}

pub const SUITE_NAMES: [&str; 5] = ["degrees", "heights", "theorem11", "dml", "all"];

impl FromStr for Suite {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "degrees" => Ok(Suite::Degrees),
            "heights" => Ok(Suite::Heights),
            "theorem11" => Ok(Suite::Theorem11),
            "dml" => Ok(Suite::Dml),
            "all" => Ok(Suite::All),
            _ => Err(CliError::Usage(format!("unknown suite {s:?}; expected one of {}", SUITE_NAMES.join(", ")))),
        }
    }
}

impl Suite {
    pub fn name(&self) -> &'static str {
        match self {
            Suite::Degrees => "degrees",
            Suite::Heights => "heights",
            Suite::Theorem11 => "theorem11",
            Suite::Dml => "dml",
            Suite::All => "all",
        }
    }

    pub fn criteria(&self) -> Vec<u8> {
        match self {
            Suite::Degrees => vec![1, 2, 3, 4],
            Suite::Heights => vec![7, 8, 9],
            Suite::Theorem11 => vec![5, 6],
            Suite::Dml => vec![10],
            Suite::All => (1..=10).collect(),
        }
    }
}

pub const HORIZON: usize = 15;
pub const DIGIT_BUDGET: u64 = 1_000_000;
pub const ALPHA_TOL: f64 = 0.02;
pub const TREND_TOL: f64 = 0.05;
pub const TREND_N: usize = 8;
pub const RESIDUAL_TOL: f64 = 1e-9;
pub const CANONICAL_STEPS: usize = 12;
pub const RANDOM_PAIRS: usize = 10;
pub const PAIR_SEED: u64 = 0x0a11_ce5e_ed00_0004;

pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    pub margin: Option<f64>,
    pub details: Value,
}

fn title(id: u8) -> &'static str {
    match id {
        1 => "degree oracle equivalence",
        2 => "multiplier double oracle",
        3 => "log-concavity",
        4 => "semiconjugacy containment",
        5 => "arithmetic degree is a multiplier",
        6 => "alpha at most lambda_1",
        7 => "canonical heights",
        8 => "growth bound",
        9 => "Northcott counts",
        10 => "dynamical Mordell-Lang experiment",
        _ => "unknown",
    }
}

/// Runs the criteria of `suite` and collects one report.
pub fn run(suite: Suite, s: &Settings) -> Result<Outcome, CliError> {
    let total = Stopwatch::start();
    let mut r = RunReport::new("check");
    r.input("suite", suite.name());
    r.input("corpus", Value::Array(corpus::SYSTEMS.iter().map(|(n, _)| Value::from(*n)).collect()));
    let systems = corpus::systems();
    let mut alpha_rows: Option<Vec<AlphaRow>> = None;
    let mut results = vec![];
    for id in suite.criteria() {
        let sw = Stopwatch::start();
        let res = match id {
            1 => degree_oracle(&systems)?,
            2 => double_oracle(&systems)?,
            3 => log_concavity(&systems)?,
            4 => containment(&systems)?,
            5 | 6 => {
                if alpha_rows.is_none() {
                    alpha_rows = Some(alpha_battery(&systems, s)?);
                }
                let rows = alpha_rows.as_ref().expect("computed above");
                if id == 5 {
                    alpha_criterion(rows)
                } else {
                    lambda_bound(rows)
                }
            }
            7 => canonical_criterion(&systems, s)?,
            8 => growth_criterion(s)?,
            9 => northcott_criterion()?,
            10 => dml_criterion()?,
            _ => unreachable!("suites only list criteria 1 to 10"),
        };
        r.timing(&format!("criterion_{id}_ms"), sw.ms());
        results.push(res);
    }
    let passed = results.iter().filter(|c| c.pass).count();
    for c in &results {
        let margin = c.margin.map_or(String::new(), |m| format!(", margin {m:.p$}", p = s.precision));
        r.line(format!("criterion {} ({}): {}{margin}", c.id, c.name, if c.pass { "PASS" } else { "FAIL" }));
    }
    r.line(format!("{passed} of {} criteria pass", results.len()));
    r.result(
        "criteria",
        Value::Array(
            results
                .into_iter()
                .map(|c| {
                    json!({"id": c.id, "name": c.name, "pass": c.pass,
                           "margin": c.margin.map_or(Value::Null, float), "details": c.details})
                })
                .collect(),
        ),
    );
    r.result("passed", passed);
    r.result("total", suite.criteria().len());
    r.timing("total_ms", total.ms());
    Ok(Outcome { report: r, partial: false, error: None })
}

fn criterion(id: u8, pass: bool, margin: Option<f64>, details: Value) -> CriterionResult {
    CriterionResult { id, name: title(id), pass, margin, details }
}

fn degree_oracle(systems: &[(&str, SystemDescription)]) -> Result<CriterionResult, CliError> {
    let mut worst = 0f64;
    let mut rows = vec![];
    for (name, sys) in systems {
        let lambda = dynamical_degrees(&sys.map).map_err(math)?;
        let mut errs = vec![];
        for (i, l) in lambda.iter().enumerate().skip(1) {
            let g = intersection_growth_estimate(&sys.map, i, TREND_N).map_err(math)?;
            let l = l.to_f64();
            let trend = g.lag2[TREND_N - 1];
            errs.push((trend - l).abs() / l);
            worst = worst.max((trend - l).abs() / l);
        }
        rows.push(json!({"system": name, "relative_errors": floats(&errs)}));
    }
    let pass = systems.len() >= 20 && worst <= TREND_TOL;
    let details = json!({"systems": systems.len(), "n": TREND_N, "tolerance": float(TREND_TOL),
                         "max_relative_error": float(worst), "per_system": rows});
    Ok(criterion(1, pass, Some(TREND_TOL - worst), details))
}

fn double_oracle(systems: &[(&str, SystemDescription)]) -> Result<CriterionResult, CliError> {
    let mut rows = vec![];
    let mut all = true;
    let mut irrational = vec![];
    for (name, sys) in systems {
        let mu = lyapunov_multipliers(&sys.map).map_err(math)?;
        let eig = real_eigenvalues(&pullback_on_n1(&sys.map)).map_err(math)?;
        let cone = multipliers_via_big_cone(&sys.map, &eig).map_err(math)?;
        let agree = same_set(&mu, &cone);
        all &= agree;
        for m in &mu {
            let m = m.simplified();
            if m.as_rational().is_none() {
                irrational.push(json!({"system": name, "polynomial": m.poly().to_string()}));
            }
        }
        rows.push(json!({"system": name, "agree": agree, "ratio_set": mu.len(), "big_cone_set": cone.len()}));
    }
    let sqrt6 = irrational.iter().any(|v| v["polynomial"] == "t^2 - 6");
    let details = json!({"per_system": rows, "irrational_multipliers": irrational, "includes_sqrt6": sqrt6});
    Ok(criterion(2, all && sqrt6, None, details))
}

fn log_concavity(systems: &[(&str, SystemDescription)]) -> Result<CriterionResult, CliError> {
    let mut rows = vec![];
    let mut all = true;
    for (name, sys) in systems {
        let mu = lyapunov_multipliers(&sys.map).map_err(math)?;
        let ok = log_concave(&mu);
        all &= ok;
        rows.push(json!({"system": name, "holds": ok}));
    }
    Ok(criterion(3, all, None, json!({"per_system": rows})))
}

fn contains_multiset(big: &[AlgebraicReal], small: &[AlgebraicReal]) -> bool {
    let mut used = vec![false; big.len()];
    small.iter().all(|m| match (0..big.len()).find(|&i| !used[i] && big[i].algebraic_equal(m)) {
        Some(i) => {
            used[i] = true;
            true
        }
        None => false,
    })
}

/// Pairs of corpus systems drawn with a fixed seed, keeping the product
/// at dimension 4 or less.
pub fn random_pairs(systems: &[(&str, SystemDescription)]) -> Vec<(usize, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(PAIR_SEED);
    let mut out = vec![];
    while out.len() < RANDOM_PAIRS {
        let (a, b) = (rng.gen_range(0..systems.len()), rng.gen_range(0..systems.len()));
        if systems[a].1.map.space().dim() + systems[b].1.map.space().dim() <= 4 {
            out.push((a, b));
        }
    }
    out
}

fn containment(systems: &[(&str, SystemDescription)]) -> Result<CriterionResult, CliError> {
    let mut rows = vec![];
    let mut all = true;
    for (a, b) in random_pairs(systems) {
        let (f, g) = (&systems[a].1.map, &systems[b].1.map);
        let prod = lyapunov_multipliers(&f.product_system(g)).map_err(math)?;
        let mf = lyapunov_multipliers(f).map_err(math)?;
        let mg = lyapunov_multipliers(g).map_err(math)?;
        let ok = contains_multiset(&prod, &mf) && contains_multiset(&prod, &mg);
        all &= ok;
        rows.push(json!({"f": systems[a].0, "g": systems[b].0, "product_multipliers": prod.len(), "contained": ok}));
    }
    Ok(criterion(4, all, None, json!({"seed": PAIR_SEED, "pairs": rows})))
}

struct AlphaRow {
    name: &'static str,
    increasing: bool,
    estimate: Option<f64>,
    method: &'static str,
    class: Option<AlgebraicReal>,
    expected: Option<f64>,
    rel_tol: f64,
    lambda1: f64,
    length: usize,
    stop: &'static str,
}

fn alpha_battery(systems: &[(&'static str, SystemDescription)], s: &Settings) -> Result<Vec<AlphaRow>, CliError> {
    let mut rows = vec![];
    for (name, sys) in systems {
        let Some(pname) = &sys.check.alpha_point else { continue };
        let f = &sys.map;
        let x = &sys.points[pname];
        let (orbit, _) = s.cache.orbit(f, x, HORIZON, DIGIT_BUDGET).map_err(math)?;
        let increasing = (0..f.space().factors()).all(|j| (1..orbit.len()).all(|n| orbit.height(n, j) > orbit.height(n - 1, j)));
        let mu = lyapunov_multipliers(f).map_err(math)?;
        let lambda1 = dynamical_degrees(f).map_err(math)?[1].to_f64();
        let est = arithmetic_degree_estimate(&orbit, &Class::ample(f.space()), ALPHA_TOL).ok();
        let class = match &est {
            Some(e) => match classify_alpha(e.estimate, &mu, ALPHA_TOL).map_err(math)? {
                AlphaClass::Multiplier(m) => Some(m),
                AlphaClass::Inconclusive => None,
            },
            None => None,
        };
        rows.push(AlphaRow {
            name,
            increasing,
            estimate: est.as_ref().map(|e| e.estimate),
            method: est.as_ref().map_or("none", |e| e.method.as_str()),
            class,
            expected: sys.check.alpha_expected,
            rel_tol: sys.check.alpha_rel_tol.unwrap_or(ALPHA_TOL),
            lambda1,
            length: orbit.len(),
            stop: orbit.stop_reason().as_str(),
        });
    }
    Ok(rows)
}

fn alpha_criterion(rows: &[AlphaRow]) -> CriterionResult {
    let mut margin = f64::INFINITY;
    let mut all = true;
    let mut out = vec![];
    for r in rows {
        let est = r.estimate.unwrap_or(f64::NAN);
        let (err, class_ok) = match r.expected {
            Some(e) => (
                (est - e).abs() / e,
                r.class.as_ref().is_some_and(|m| (m.to_f64() - e).abs() <= 1e-12 * e.max(1.0)),
            ),
            None => (0.0, r.class.is_some()),
        };
        let ok = r.increasing && class_ok && err <= r.rel_tol;
        all &= ok;
        margin = margin.min(if err.is_nan() { f64::NEG_INFINITY } else { r.rel_tol - err });
        out.push(json!({
            "system": r.name, "orbit_length": r.length, "stop": r.stop, "heights_increasing": r.increasing,
            "estimate": r.estimate.map_or(Value::Null, float), "method": r.method,
            "classified": r.class.as_ref().map_or(Value::Null, |m| algebraic(m, 12)),
            "expected": r.expected.map_or(Value::Null, float), "relative_error": float(err),
            "relative_tolerance": float(r.rel_tol), "pass": ok,
        }));
    }
    let pass = all && rows.len() >= 8;
    let details = json!({"systems": rows.len(), "horizon": HORIZON, "digit_budget": DIGIT_BUDGET,
                         "tol": float(ALPHA_TOL), "per_system": out});
    criterion(5, pass, Some(margin), details)
}

fn lambda_bound(rows: &[AlphaRow]) -> CriterionResult {
    let mut margin = f64::INFINITY;
    let mut out = vec![];
    for r in rows {
        let est = r.estimate.unwrap_or(f64::NAN);
        let m = (r.lambda1 * (1.0 + ALPHA_TOL) - est) / r.lambda1;
        margin = margin.min(if m.is_nan() { f64::NEG_INFINITY } else { m });
        out.push(json!({"system": r.name, "estimate": float(est), "lambda_1": float(r.lambda1), "holds": m >= 0.0}));
    }
    criterion(6, margin >= 0.0 && !rows.is_empty(), Some(margin), json!({"per_system": out}))
}

/// Characteristic polynomial of `m` is squarefree and all its roots have
/// modulus at least 2 (up to `10^-12`).
fn diagonalizable_and_expanding(m: &RationalMatrix) -> Result<(bool, bool), CliError> {
    let (p, _) = m.char_poly().map_err(math)?;
    // Diagonalizable over C iff the squarefree part of the char poly kills m.
    let q = p.squarefree();
    let n = m.rows();
    let mut acc = RationalMatrix::zeros(n, n);
    for c in q.coeffs().iter().rev() {
        let shift = RationalMatrix::identity(n).scale(&Rational::from_integer(c.clone()));
        acc = &(&acc * m) + &shift;
    }
    let squarefree = acc == RationalMatrix::zeros(n, n);
    let half = Rational::new(BigInt::from(500_000_000_001i64), BigInt::from(1_000_000_000_000i64));
    let big_enough = p.coeff(0) != BigInt::from(0) && roots_inside_radius(&p.reversed(), &half);
    Ok((squarefree, big_enough))
}

/// Heights `h_(n+1) = h_n Lambda + e_n` with `|e_n| <= 0.1` for a Jordan
/// block `Lambda`; returns `|h^(x_1) - h^(x_0) Lambda|` and the last step
/// change of the limit.
pub fn jordan_synthetic(steps: usize, seed: u64) -> Result<(f64, f64), CliError> {
    let lambda = RationalMatrix::from_i64_rows(&[&[2, 1], &[0, 2]]);
    let lf = lambda.to_f64();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = vec![vec![1.0, 0.5]];
    for n in 0..steps {
        let mut next = lf.left_apply(&h[n]);
        for v in next.iter_mut() {
            *v += rng.gen_range(-0.1..=0.1);
        }
        h.push(next);
    }
    let l0 = telescoping_limit(&h[..steps], &lambda).map_err(math)?;
    let l1 = telescoping_limit(&h[1..], &lambda).map_err(math)?;
    let pred = lf.left_apply(&l0.values);
    let residual = pred.iter().zip(&l1.values).fold(0f64, |a, (x, y)| a.max((x - y).abs()));
    Ok((residual, l0.errors.last().copied().unwrap_or(f64::INFINITY)))
}

fn canonical_criterion(systems: &[(&str, SystemDescription)], s: &Settings) -> Result<CriterionResult, CliError> {
    let opts = Options { horizon: CANONICAL_STEPS, digit_budget: DIGIT_BUDGET, tol: RESIDUAL_TOL };
    let mut rows = vec![];
    let mut all = true;
    let mut worst = 0f64;
    for (name, sys) in systems {
        let Some(pname) = &sys.check.canonical_point else { continue };
        let basis = hyperplane_basis(sys);
        let lambda = restrict_pullback(&sys.map, &basis).map_err(math)?;
        let (diag, expanding) = diagonalizable_and_expanding(&lambda)?;
        let mut scratch = RunReport::new("canonical");
        let run = run_canonical(&sys.map, &sys.points[pname], &basis, &opts, s, &mut scratch)?;
        let ok = diag && expanding && run.residual < RESIDUAL_TOL && run.n_used <= CANONICAL_STEPS && run.no_growth;
        all &= ok;
        worst = worst.max(run.residual);
        let dev_max = run.deviation.iter().fold(0f64, |a, &b| a.max(b));
        rows.push(json!({"system": name, "diagonalizable": diag, "eigenvalues_at_least_2": expanding,
                         "residual": float(run.residual), "n_used": run.n_used, "max_deviation": float(dev_max),
                         "no_growth": run.no_growth, "pass": ok}));
    }
    let (jr, jerr) = jordan_synthetic(40, PAIR_SEED)?;
    let jordan_ok = jr < 1e-6 && jerr < 1e-6;
    let pass = all && !rows.is_empty() && jordan_ok;
    let details = json!({"per_system": rows, "residual_tolerance": float(RESIDUAL_TOL),
                         "jordan": {"steps": 40, "noise": float(0.1), "residual": float(jr), "last_step_change": float(jerr), "pass": jordan_ok}});
    Ok(criterion(7, pass, Some(RESIDUAL_TOL - worst), details))
}

fn growth_criterion(s: &Settings) -> Result<CriterionResult, CliError> {
    let sys = corpus::system("split-2-3").expect("bundled system");
    let x = &sys.points["wander"];
    let (orbit, _) = s.cache.orbit(&sys.map, x, HORIZON, DIGIT_BUDGET).map_err(math)?;
    if let StopReason::Indeterminacy { step, .. } = orbit.stop_reason() {
        return Err(CliError::Math(format!("indeterminacy at index {step} on a bundled system")));
    }
    let space = sys.map.space();
    let right = IntPolynomial::from_i64(&[6, -5, 1]);
    let wrong = IntPolynomial::from_i64(&[-2, 1]);
    let ample = growth_bound_check(&orbit, &Class::ample(space), &right).map_err(math)?;
    let h2 = Class::hyperplane(space, 1);
    let h2_right = growth_bound_check(&orbit, &h2, &right).map_err(math)?;
    let h2_wrong = growth_bound_check(&orbit, &h2, &wrong).map_err(math)?;
    let pass = ample.pass && h2_right.pass && !h2_wrong.pass;
    let report = |name: &str, p: &IntPolynomial, g: &arithdeg::heights::GrowthReport| {
        json!({"class": name, "annihilator": p.to_string(), "rho": float(g.rho), "constant": float(g.constant),
               "fit_len": g.fit_len, "pass": g.pass, "margin": float(g.margin)})
    };
    let details = json!({"orbit_length": orbit.len(), "checks": [
        report("h1 + h2", &right, &ample), report("h2", &right, &h2_right), report("h2", &wrong, &h2_wrong)]});
    Ok(criterion(8, pass, Some(ample.margin.min(h2_right.margin).min(-h2_wrong.margin)), details))
}

fn northcott_criterion() -> Result<CriterionResult, CliError> {
    let p1 = ProductSpace::new(vec![1]).map_err(math)?;
    let p1p1 = ProductSpace::new(vec![1, 1]).map_err(math)?;
    let a = northcott_enumerate(&p1, 2f64.ln()).map_err(math)?;
    let b = northcott_enumerate(&p1p1, 0.0).map_err(math)?;
    let pts: Vec<String> = a.iter().map(|p| p.to_string()).collect();
    let details = json!({"p1_ln2": {"count": a.len(), "expected": 8, "points": pts},
                         "p1xp1_0": {"count": b.len(), "expected": 16}});
    Ok(criterion(9, a.len() == 8 && b.len() == 16, None, details))
}

fn dml_criterion() -> Result<CriterionResult, CliError> {
    let f = corpus::system("power-2").expect("bundled system");
    let g = corpus::system("power-3").expect("bundled system");
    let (x, y) = (&f.points["wander"], &g.points["wander"]);
    let v = corpus::diagonal();
    let rs = return_set(&f.map, &g.map, x, y, &v.correspondence, 20, DIGIT_BUDGET).map_err(math)?;
    let rs_ok = rs.indices == vec![0] && rs.undecided().is_empty();
    let cert = multiplier_sets_disjoint(&f.map, &g.map).map_err(math)?;
    let mut seps = vec![];
    let mut sep_ok = true;
    for n in [1u32, 100] {
        let sep = height_separation(&f.map, &g.map, x, y, n, 20, DIGIT_BUDGET).map_err(math)?;
        sep_ok &= sep.crossover.is_some() && sep.decreasing_after_crossover;
        seps.push(json!({"n": n, "crossover": sep.crossover, "decreasing_after_crossover": sep.decreasing_after_crossover,
                         "steps": sep.horizon_reached}));
    }
    let st = corpus::system("swap-twist-2-3").expect("bundled system");
    let p6 = corpus::system("power-6").expect("bundled system");
    let cert6 = multiplier_sets_disjoint(&st.map, &p6.map).map_err(math)?;
    let gcds: Vec<String> = cert6.comparisons.iter().map(|c| c.gcd.to_string()).collect();
    let minpoly_ok = cert6.disjoint && cert6.comparisons.iter().all(|c| !c.equal && c.gcd.degree() == Some(0));
    let pass = rs_ok && cert.disjoint && sep_ok && minpoly_ok;
    let details = json!({
        "return_set": {"indices": rs.indices, "undecided": rs.undecided(), "exact_until": rs.exact_until, "horizon": 20},
        "disjoint_2_3": cert.disjoint, "separation": seps,
        "swap_twist_vs_power_6": {"disjoint": cert6.disjoint, "gcds": gcds,
            "mu_f": cert6.mu_f.iter().map(|m| m.simplified().poly().to_string()).collect::<Vec<_>>()},
    });
    Ok(criterion(10, pass, None, details))
}
