//! The `degrees`, `alpha`, `orbit`, `canonical` and `dml` commands.

use std::fs;

use arithdeg::algebra::{real_eigenvalues, AlgebraicReal};
use arithdeg::dml::{height_separation, multiplier_sets_disjoint, return_set, ReturnStatus};
use arithdeg::dynamics::{
    dynamical_degrees, intersection_growth_estimate, lyapunov_multipliers, multipliers_via_big_cone, pullback_on_n1,
    Endomorphism, OrbitRecord, ProjPoint, StopReason,
};
use arithdeg::geometry::Class;
use arithdeg::heights::{
    arithmetic_degree_estimate, canonical_heights_from_orbit, check_expanding, classify_alpha, deviation_profile,
    functional_equation_residual, restrict_pullback, AlphaClass, HeightError,
};
use arithdeg::{Rational, RationalMatrix};
use serde_json::{json, Map, Value};

use crate::cache::OrbitCache;
use crate::report::{algebraic, algebraic_text, big, float, floats, rational, RunReport, Stopwatch, Table};
use crate::system::{CorrespondenceFile, Options, ParseError, SystemDescription};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}:{err}")]
    Parse { path: String, err: ParseError },
    #[error("{0}")]
    Math(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Parse { .. } => 1,
            CliError::Math(_) => 2,
        }
    }
}

pub fn math(e: impl std::fmt::Display) -> CliError {
    CliError::Math(e.to_string())
}

/// A finished report. `partial` marks a run cut short by the digit budget;
/// `error` is a math error found after the report was assembled.
pub struct Outcome {
    pub report: RunReport,
    pub partial: bool,
    pub error: Option<String>,
}

impl Outcome {
    fn done(report: RunReport, partial: bool) -> Self {
        Outcome { report, partial, error: None }
    }
}

/// Command-line overrides and shared state.
#[derive(Clone, Debug)]
pub struct Settings {
    pub horizon: Option<usize>,
    pub digit_budget: Option<u64>,
    pub tol: Option<f64>,
    pub cache: OrbitCache,
    pub precision: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            horizon: None,
            digit_budget: None,
            tol: None,
            cache: OrbitCache::new(None),
            precision: crate::report::DEFAULT_PRECISION,
        }
    }
}

impl Settings {
    pub fn options(&self, sys: &SystemDescription) -> Options {
        Options {
            horizon: self.horizon.unwrap_or(sys.options.horizon),
            digit_budget: self.digit_budget.unwrap_or(sys.options.digit_budget),
            tol: self.tol.unwrap_or(sys.options.tol),
        }
    }
}

pub fn read_system(path: &str) -> Result<SystemDescription, CliError> {
    let src = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {path}: {e}")))?;
    SystemDescription::parse(&src).map_err(|err| CliError::Parse { path: path.to_string(), err })
}

pub fn read_correspondence(path: &str) -> Result<CorrespondenceFile, CliError> {
    let src = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {path}: {e}")))?;
    CorrespondenceFile::parse(&src).map_err(|err| CliError::Parse { path: path.to_string(), err })
}

fn point<'a>(sys: &'a SystemDescription, name: &str) -> Result<&'a ProjPoint, CliError> {
    sys.point(name).ok_or_else(|| {
        let known: Vec<&str> = sys.points.keys().map(String::as_str).collect();
        CliError::Usage(format!("system {} has no point {name} (known: {})", sys.name, known.join(", ")))
    })
}

fn echo(r: &mut RunReport, sys: &SystemDescription, label: &str, opts: &Options) {
    r.system_digest = Some(sys.map.digest());
    r.input("system_file", label);
    r.input("system", sys.to_canonical_string());
    r.input("options", json!({"horizon": opts.horizon, "digit_budget": opts.digit_budget, "tol": float(opts.tol)}));
}

fn algebraics(xs: &[AlgebraicReal], precision: usize) -> Value {
    Value::Array(xs.iter().map(|a| algebraic(a, precision)).collect())
}

fn list_text(xs: &[AlgebraicReal], precision: usize) -> String {
    xs.iter().map(|a| algebraic_text(a, precision)).collect::<Vec<_>>().join(", ")
}

/// Same elements, compared exactly.
pub fn same_set(a: &[AlgebraicReal], b: &[AlgebraicReal]) -> bool {
    a.iter().all(|x| b.iter().any(|y| x.algebraic_equal(y))) && b.iter().all(|y| a.iter().any(|x| x.algebraic_equal(y)))
}

/// `mu_1 >= ... >= mu_d > 0`, decided exactly.
pub fn log_concave(mu: &[AlgebraicReal]) -> bool {
    mu.windows(2).all(|w| w[0].cmp_exact(&w[1]).is_ge()) && mu.last().is_none_or(|m| m.signum().is_gt())
}

fn matrix_json(m: &RationalMatrix) -> Value {
    Value::Array((0..m.rows()).map(|i| Value::Array(m.row(i).iter().map(rational).collect())).collect())
}

fn orbit_for(
    s: &Settings,
    f: &Endomorphism,
    x: &ProjPoint,
    n_max: usize,
    budget: u64,
    r: &mut RunReport,
) -> Result<OrbitRecord, CliError> {
    let sw = Stopwatch::start();
    let (orbit, status) = s.cache.orbit(f, x, n_max, budget).map_err(math)?;
    r.timing("orbit_ms", sw.ms());
    r.timing("cache", status.as_str());
    Ok(orbit)
}

fn stop_json(orbit: &OrbitRecord) -> Value {
    match orbit.stop_reason() {
        StopReason::Indeterminacy { step, block } => json!({"reason": "indeterminacy", "step": step, "block": block + 1}),
        s => json!({"reason": s.as_str()}),
    }
}

fn indeterminacy(orbit: &OrbitRecord) -> Result<(), CliError> {
    if let StopReason::Indeterminacy { step, block } = orbit.stop_reason() {
        return Err(CliError::Math(format!(
            "indeterminacy: block {} vanishes at the point of index {step}, so f^{} is undefined there",
            block + 1,
            step + 1
        )));
    }
    Ok(())
}

pub fn degrees(sys: &SystemDescription, label: &str, s: &Settings) -> Result<Outcome, CliError> {
    let sw = Stopwatch::start();
    let opts = s.options(sys);
    let f = &sys.map;
    let p = s.precision;
    let mut r = RunReport::new("degrees");
    echo(&mut r, sys, label, &opts);
    let lambda = dynamical_degrees(f).map_err(math)?;
    let mu = lyapunov_multipliers(f).map_err(math)?;
    let n1 = pullback_on_n1(f);
    let eig = real_eigenvalues(&n1).map_err(math)?;
    let cone = multipliers_via_big_cone(f, &eig).map_err(math)?;
    let agree = same_set(&mu, &cone);
    let concave = log_concave(&mu);
    r.result("space", f.space().to_string());
    r.result("degree_matrix", json!(f.degree_matrix()));
    r.result("pullback_n1", matrix_json(&n1));
    r.result("dynamical_degrees", algebraics(&lambda, p));
    r.result("multipliers", algebraics(&mu, p));
    r.result("multipliers_big_cone", algebraics(&cone, p));
    r.result("oracles_agree", agree);
    r.result("log_concave", concave);
    r.line(format!("lambda_0..lambda_{} = {}", lambda.len() - 1, list_text(&lambda, p)));
    r.line(format!("mu_1..mu_{} = {}", mu.len(), list_text(&mu, p)));
    for (i, m) in mu.iter().enumerate() {
        let m = m.simplified();
        if m.as_rational().is_none() {
            r.line(format!("mu_{} has defining polynomial {}", i + 1, m.poly()));
        }
    }
    r.line(format!("big-cone multipliers agree: {agree}; log-concave: {concave}"));
    let n_max = opts.horizon.clamp(1, 12);
    let mut checks = vec![];
    for (i, li) in lambda.iter().enumerate().skip(1) {
        let g = intersection_growth_estimate(f, i, n_max).map_err(math)?;
        let mut t = Table::new(&format!("intersection_growth_{i}"), &["n", "intersection", "root", "trend", "lag2"]);
        for n in 0..g.values.len() {
            t.push(vec![(n + 1).into(), rational(&g.values[n]), float(g.roots[n]), float(g.trend[n]), float(g.lag2[n])]);
        }
        r.tables.push(t);
        let l = li.to_f64();
        let lag2 = *g.lag2.last().expect("n_max >= 1");
        checks.push(json!({"degree": i, "n": n_max, "lambda": float(l), "lag2": float(lag2), "relative_error": float((lag2 - l).abs() / l)}));
    }
    r.result("growth_check", Value::Array(checks));
    r.timing("total_ms", sw.ms());
    Ok(Outcome::done(r, false))
}

pub fn alpha(sys: &SystemDescription, label: &str, point_name: &str, s: &Settings) -> Result<Outcome, CliError> {
    let sw = Stopwatch::start();
    let opts = s.options(sys);
    let f = &sys.map;
    let p = s.precision;
    let x = point(sys, point_name)?;
    let mut r = RunReport::new("alpha");
    echo(&mut r, sys, label, &opts);
    r.input("point", json!({"name": point_name, "coordinates": x.to_string()}));
    let orbit = orbit_for(s, f, x, opts.horizon, opts.digit_budget, &mut r)?;
    indeterminacy(&orbit)?;
    let partial = *orbit.stop_reason() == StopReason::Budget;
    r.result("orbit", json!({"length": orbit.len(), "stop": stop_json(&orbit)}));
    let c = Class::ample(f.space());
    let est = match arithmetic_degree_estimate(&orbit, &c, opts.tol) {
        Ok(e) => e,
        Err(HeightError::OrbitTooShort { needed, found }) => {
            r.line(format!("orbit has {found} points within the digit budget, {needed} are needed for an estimate"));
            r.timing("total_ms", sw.ms());
            return Ok(Outcome::done(r, true));
        }
        Err(e) => return Err(math(e)),
    };
    let mu = lyapunov_multipliers(f).map_err(math)?;
    let lambda1 = dynamical_degrees(f).map_err(math)?[1].clone();
    let class = classify_alpha(est.estimate, &mu, opts.tol).map_err(math)?;
    let mut t = Table::new("estimators", &["n", "height", "root", "ratio", "two_step"]);
    for n in 0..est.heights.len() {
        let at = |v: &[f64], k: usize| if n >= k { float(v[n - k]) } else { Value::Null };
        t.push(vec![n.into(), float(est.heights[n]), at(&est.root, 1), at(&est.ratio, 1), at(&est.two_step, 2)]);
    }
    r.tables.push(t);
    let mut e = Map::new();
    e.insert("value".into(), float(est.estimate));
    e.insert("method".into(), est.method.as_str().into());
    e.insert("converged".into(), est.converged.into());
    e.insert("ratio_converged".into(), est.ratio_converged.into());
    e.insert("bounded".into(), est.bounded.into());
    e.insert(
        "recurrence".into(),
        est.recurrence.as_ref().map_or(Value::Null, |fit| {
            json!({"order": fit.order, "coefficients": floats(&fit.coefficients), "rate": float(fit.rate)})
        }),
    );
    r.result("estimate", Value::Object(e));
    r.result("multipliers", algebraics(&mu, p));
    r.result("lambda_1", algebraic(&lambda1, p));
    let bound_ok = est.estimate <= lambda1.to_f64() * (1.0 + opts.tol);
    r.result("alpha_at_most_lambda_1", bound_ok);
    let ah = format!("{:.p$}", est.estimate);
    match &class {
        AlphaClass::Multiplier(m) => {
            let k = mu.iter().position(|x| x.algebraic_equal(m)).map_or(0, |i| i + 1);
            r.result("classification", json!({"kind": "multiplier", "index": k, "value": algebraic(m, p)}));
            r.line(format!(
                "verdict: alpha_hat = {ah} ({}) is mu_{k} = {}; this is the arithmetic degree only if the orbit is Zariski dense, which is not checked",
                est.method.as_str(),
                algebraic_text(m, p)
            ));
        }
        AlphaClass::Inconclusive => {
            r.result("classification", json!({"kind": "inconclusive"}));
            r.line(format!(
                "verdict: alpha_hat = {ah} ({}) is not within tol {} of a unique multiplier (candidates {}); density of the orbit is not checked",
                est.method.as_str(),
                opts.tol,
                list_text(&mu, p)
            ));
        }
    }
    if partial {
        r.line(format!("orbit stopped at index {} on the digit budget {}", orbit.last_index(), opts.digit_budget));
    }
    r.timing("total_ms", sw.ms());
    Ok(Outcome::done(r, partial))
}

pub fn orbit(sys: &SystemDescription, label: &str, point_name: &str, s: &Settings) -> Result<Outcome, CliError> {
    let sw = Stopwatch::start();
    let opts = s.options(sys);
    let f = &sys.map;
    let x = point(sys, point_name)?;
    let mut r = RunReport::new("orbit");
    echo(&mut r, sys, label, &opts);
    r.input("point", json!({"name": point_name, "coordinates": x.to_string()}));
    let orbit = orbit_for(s, f, x, opts.horizon, opts.digit_budget, &mut r)?;
    let k = f.space().factors();
    let mut cols: Vec<String> = vec!["n".into()];
    cols.extend((1..=k).map(|j| format!("digits_{j}")));
    cols.extend((1..=k).map(|j| format!("height_{j}")));
    cols.push("point".into());
    let cols: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut t = Table::new("orbit", &cols);
    for n in 0..orbit.len() {
        let hs = orbit.factor_heights(n);
        let mut row: Vec<Value> = vec![n.into()];
        row.extend(hs.iter().map(|h| Value::from(h.digits)));
        row.extend(hs.iter().map(|h| float(h.ln)));
        let pt = orbit.point(n);
        // long points stay in the cache; reports only carry their size
        row.push(if pt.digit_size() <= 64 { pt.to_string().into() } else { Value::Null });
        t.push(row);
    }
    r.tables.push(t);
    let last = orbit.last_index();
    r.result("orbit", json!({"length": orbit.len(), "stop": stop_json(&orbit)}));
    r.result(
        "last",
        json!({"index": last, "max_abs": (0..k).map(|j| {
            let m = orbit.max_abs(last, j);
            if m.bits() <= 256 { big(&m) } else { Value::Null }
        }).collect::<Vec<_>>(), "heights": floats(&orbit.factor_heights(last).iter().map(|h| h.ln).collect::<Vec<_>>())}),
    );
    r.line(format!("{} points, stopped: {}", orbit.len(), orbit.stop_reason().as_str()));
    if let StopReason::Indeterminacy { step, block } = orbit.stop_reason() {
        r.line(format!("block {} vanishes identically at the point of index {step}", block + 1));
    }
    r.timing("total_ms", sw.ms());
    let partial = *orbit.stop_reason() == StopReason::Budget;
    // the rows computed before an indeterminacy are still reported
    let error = indeterminacy(&orbit).err().map(|e| e.to_string());
    Ok(Outcome { report: r, partial, error })
}

/// Rows of divisor coordinates separated by `;`, e.g. `1,0;0,1`.
pub fn parse_basis(spec: &str, sys: &SystemDescription) -> Result<Vec<Class>, CliError> {
    let space = sys.map.space();
    spec.split(';')
        .map(|row| {
            let coeffs = row
                .split(',')
                .map(|c| c.trim().parse::<Rational>().map_err(|_| CliError::Usage(format!("bad basis entry {c:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            Class::divisor(space, &coeffs).map_err(|e| CliError::Usage(format!("bad basis row {row:?}: {e}")))
        })
        .collect()
}

pub fn hyperplane_basis(sys: &SystemDescription) -> Vec<Class> {
    let space = sys.map.space();
    (0..space.factors()).map(|j| Class::hyperplane(space, j)).collect()
}

/// Canonical height vector and its diagnostics, shared with the battery.
pub struct CanonicalRun {
    pub values: Vec<f64>,
    pub residual: f64,
    pub n_used: usize,
    pub error: f64,
    pub deviation: Vec<f64>,
    pub no_growth: bool,
    pub orbit: OrbitRecord,
}

/// Absolute slack for the no-growth comparison; deviations below it are
/// rounding noise.
pub const DEVIATION_FLOOR: f64 = 1e-9;

/// `max` over the last quarter is at most twice the `max` over the first
/// quarter, up to [`DEVIATION_FLOOR`].
pub fn no_growth(dev: &[f64]) -> bool {
    let q = (dev.len() / 4).max(1);
    let first = dev[..q].iter().fold(0f64, |a, &b| a.max(b));
    let last = dev[dev.len() - q..].iter().fold(0f64, |a, &b| a.max(b));
    last <= 2.0 * first + DEVIATION_FLOOR
}

pub fn run_canonical(
    f: &Endomorphism,
    x: &ProjPoint,
    basis: &[Class],
    opts: &Options,
    s: &Settings,
    r: &mut RunReport,
) -> Result<CanonicalRun, CliError> {
    let lambda = restrict_pullback(f, basis).map_err(math)?;
    check_expanding(&lambda).map_err(|e| match e {
        HeightError::SmallEigenvalue => CliError::Math(
            "the basis does not satisfy the eigenvalue precondition: f^* on its span has an eigenvalue of modulus <= 1".into(),
        ),
        e => math(e),
    })?;
    let orbit = orbit_for(s, f, x, opts.horizon, opts.digit_budget, r)?;
    indeterminacy(&orbit)?;
    if orbit.len() < 3 {
        return Err(CliError::Math(format!("only {} orbit points within the digit budget, 3 are needed", orbit.len())));
    }
    let chv = canonical_heights_from_orbit(&orbit, basis, &lambda, 0, orbit.len() - 1, opts.tol).map_err(math)?;
    let (residual, _, _) = functional_equation_residual(&orbit, basis, &lambda, opts.tol).map_err(math)?;
    let deviation = deviation_profile(&chv, &orbit).map_err(math)?;
    let ng = no_growth(&deviation);
    r.result("lambda", matrix_json(&lambda));
    Ok(CanonicalRun { values: chv.values, residual, n_used: chv.n_used, error: chv.error, deviation, no_growth: ng, orbit })
}

pub fn canonical(
    sys: &SystemDescription,
    label: &str,
    point_name: &str,
    basis_spec: Option<&str>,
    s: &Settings,
) -> Result<Outcome, CliError> {
    let sw = Stopwatch::start();
    let opts = s.options(sys);
    let f = &sys.map;
    let x = point(sys, point_name)?;
    let basis = match basis_spec {
        Some(b) => parse_basis(b, sys)?,
        None => hyperplane_basis(sys),
    };
    let mut r = RunReport::new("canonical");
    echo(&mut r, sys, label, &opts);
    r.input("point", json!({"name": point_name, "coordinates": x.to_string()}));
    r.input(
        "basis",
        Value::Array(basis.iter().map(|c| Value::Array(c.coordinates().iter().map(rational).collect())).collect()),
    );
    let run = run_canonical(f, x, &basis, &opts, s, &mut r)?;
    let partial = *run.orbit.stop_reason() == StopReason::Budget;
    r.result("canonical_heights", floats(&run.values));
    r.result("n_used", run.n_used);
    r.result("last_step_change", float(run.error));
    r.result("residual", float(run.residual));
    r.result("max_deviation", float(run.deviation.iter().fold(0f64, |a, &b| a.max(b))));
    r.result("no_growth", run.no_growth);
    let mut t = Table::new("deviation", &["n", "deviation"]);
    for (n, d) in run.deviation.iter().enumerate() {
        t.push(vec![n.into(), float(*d)]);
    }
    r.tables.push(t);
    let p = s.precision;
    let vals: Vec<String> = run.values.iter().map(|v| format!("{v:.p$}")).collect();
    r.line(format!("canonical heights ({}) from {} steps", vals.join(", "), run.n_used));
    r.line(format!("functional equation residual {:.p$}", run.residual));
    r.line(format!(
        "max |h^ Lambda^n - h(f^n x)| = {:.p$}, growth trend: {}",
        run.deviation.iter().fold(0f64, |a, &b| a.max(b)),
        if run.no_growth { "none" } else { "present" }
    ));
    r.timing("total_ms", sw.ms());
    Ok(Outcome::done(r, partial))
}

#[allow(clippy::too_many_arguments)]
pub fn dml(
    fsys: (&SystemDescription, &str),
    gsys: (&SystemDescription, &str),
    x_name: &str,
    y_name: &str,
    v: (&CorrespondenceFile, &str),
    big_n: u32,
    s: &Settings,
) -> Result<Outcome, CliError> {
    let sw = Stopwatch::start();
    let p = s.precision;
    let (fd, gd) = (fsys.0, gsys.0);
    let (f, g) = (&fd.map, &gd.map);
    let opts = s.options(fd);
    let x = point(fd, x_name)?;
    let y = point(gd, y_name)?;
    let mut r = RunReport::new("dml");
    r.system_digest = Some(f.product_system(g).digest());
    r.input("f", json!({"file": fsys.1, "system": fd.to_canonical_string(), "point": x_name, "coordinates": x.to_string()}));
    r.input("g", json!({"file": gsys.1, "system": gd.to_canonical_string(), "point": y_name, "coordinates": y.to_string()}));
    r.input("correspondence", json!({"file": v.1, "text": v.0.to_canonical_string()}));
    r.input("n", big_n);
    r.input("options", json!({"horizon": opts.horizon, "digit_budget": opts.digit_budget}));
    let cert = multiplier_sets_disjoint(f, g).map_err(math)?;
    let comparisons: Vec<Value> = cert
        .comparisons
        .iter()
        .map(|c| {
            json!({"f_index": c.f_index + 1, "g_index": c.g_index + 1, "mu_f": algebraic(&c.mu_f, p),
                   "mu_g": algebraic(&c.mu_g, p), "gcd": c.gcd.to_string(), "equal": c.equal})
        })
        .collect();
    r.result(
        "disjointness",
        json!({"disjoint": cert.disjoint, "mu_f": algebraics(&cert.mu_f, p), "mu_g": algebraics(&cert.mu_g, p), "comparisons": comparisons}),
    );
    let rs = return_set(f, g, x, y, &v.0.correspondence, opts.horizon, opts.digit_budget).map_err(math)?;
    let status: Vec<&str> = rs
        .status
        .iter()
        .map(|st| match st {
            ReturnStatus::Return => "return",
            ReturnStatus::NoReturn => "no-return",
            ReturnStatus::CertifiedNoReturn => "certified-no-return",
            ReturnStatus::Undecided => "undecided",
        })
        .collect();
    r.result(
        "return_set",
        json!({"indices": rs.indices, "undecided": rs.undecided(), "exact_until": rs.exact_until,
               "budget_exhausted": rs.budget_exhausted, "horizon": rs.horizon, "status": status}),
    );
    let sep = height_separation(f, g, x, y, big_n, opts.horizon, opts.digit_budget).map_err(math)?;
    r.result(
        "separation",
        json!({"n": big_n, "sequence": floats(&sep.sequence), "crossover": sep.crossover,
               "decreasing_after_crossover": sep.decreasing_after_crossover, "diverges": sep.diverges,
               "bounded": sep.bounded, "steps": sep.horizon_reached}),
    );
    let mut t = Table::new("separation", &["n", "value"]);
    for (n, x) in sep.sequence.iter().enumerate() {
        t.push(vec![n.into(), float(*x)]);
    }
    r.tables.push(t);
    if cert.disjoint {
        r.line(format!("multiplier sets disjoint: true ({} exact comparisons)", cert.comparisons.len()));
    } else {
        r.line("multiplier sets disjoint: false; f and g share a multiplier, so the disjointness hypothesis is unmet");
    }
    let idx: Vec<String> = rs.indices.iter().map(usize::to_string).collect();
    r.line(format!("return set up to n = {}: {{{}}}", rs.horizon, idx.join(", ")));
    if !rs.undecided().is_empty() {
        r.line(format!("undecided indices past the digit budget: {:?}", rs.undecided()));
    }
    match sep.crossover {
        Some(c) => r.line(format!(
            "separation N*h(f^n x) - h(g^n y) with N = {big_n}: negative from n = {c}, strictly decreasing after: {}",
            sep.decreasing_after_crossover
        )),
        None => r.line(format!("separation with N = {big_n}: no crossover within {} steps", sep.horizon_reached)),
    }
    r.timing("total_ms", sw.ms());
    let partial = rs.budget_exhausted && !rs.undecided().is_empty();
    Ok(Outcome::done(r, partial))
}
