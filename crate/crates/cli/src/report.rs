//! Run reports and their json, csv and text renderings.
//!
//! Every float in a report is printed with a fixed number of decimals
//! (12 by default). Wall-clock data and cache status live only in the
//! `timings` field, so two runs on the same inputs differ nowhere else.

use std::time::Instant;

use arithdeg::algebra::AlgebraicReal;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde_json::{Map, Number, Value};

pub const TOOL: &str = "arithdeg";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const DEFAULT_PRECISION: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table { name: name.to_string(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: vec![] }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub command: String,
    pub system_digest: Option<String>,
    pub inputs: Map<String, Value>,
    pub results: Map<String, Value>,
    pub tables: Vec<Table>,
    pub summary: Vec<String>,
    pub timings: Map<String, Value>,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        RunReport {
            command: command.to_string(),
            system_digest: None,
            inputs: Map::new(),
            results: Map::new(),
            tables: vec![],
            summary: vec![],
            timings: Map::new(),
        }
    }

    pub fn input(&mut self, k: &str, v: impl Into<Value>) {
        self.inputs.insert(k.to_string(), v.into());
    }

    pub fn result(&mut self, k: &str, v: impl Into<Value>) {
        self.results.insert(k.to_string(), v.into());
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.summary.push(s.into());
    }

    pub fn timing(&mut self, k: &str, v: impl Into<Value>) {
        self.timings.insert(k.to_string(), v.into());
    }

    /// The whole report as one json value.
    pub fn to_value(&self, precision: usize) -> Value {
        let mut m = Map::new();
        m.insert("tool".into(), TOOL.into());
        m.insert("version".into(), VERSION.into());
        m.insert("command".into(), self.command.clone().into());
        m.insert("system_digest".into(), self.system_digest.clone().map_or(Value::Null, Value::from));
        m.insert("inputs".into(), Value::Object(self.inputs.clone()));
        m.insert("results".into(), Value::Object(self.results.clone()));
        let tables: Vec<Value> = self
            .tables
            .iter()
            .map(|t| {
                let mut o = Map::new();
                o.insert("name".into(), t.name.clone().into());
                o.insert("columns".into(), t.columns.clone().into());
                o.insert("rows".into(), t.rows.iter().map(|r| Value::Array(r.clone())).collect::<Vec<_>>().into());
                Value::Object(o)
            })
            .collect();
        m.insert("tables".into(), tables.into());
        m.insert("summary".into(), self.summary.clone().into());
        m.insert("timings".into(), Value::Object(self.timings.clone()));
        fix_floats(&mut Value::Object(m), precision)
    }

    pub fn render(&self, format: Format, precision: usize) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_value(precision)).expect("reports serialize");
                s.push('\n');
                s
            }
            Format::Csv => self.render_csv(precision),
            Format::Text => self.render_text(precision),
        }
    }

    fn render_csv(&self, precision: usize) -> String {
        let mut out = String::new();
        let cell = |v: &Value| scalar_text(&fix_floats(&mut v.clone(), precision));
        let write = |name: &str, header: &[String], rows: Vec<Vec<String>>, out: &mut String| {
            let mut w = csv::Writer::from_writer(vec![]);
            w.write_record(header).expect("in-memory csv");
            for r in rows {
                w.write_record(&r).expect("in-memory csv");
            }
            out.push_str(&format!("# {name}\n"));
            out.push_str(&String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf8"));
            out.push('\n');
        };
        for t in &self.tables {
            write(&t.name, &t.columns, t.rows.iter().map(|r| r.iter().map(cell).collect()).collect(), &mut out);
        }
        let header = vec!["key".to_string(), "value".to_string()];
        let mut flat = vec![];
        flatten("", &fix_floats(&mut Value::Object(self.results.clone()), precision), &mut flat);
        write("results", &header, flat.into_iter().map(|(k, v)| vec![k, v]).collect(), &mut out);
        let mut flat = vec![];
        flatten("", &fix_floats(&mut Value::Object(self.timings.clone()), precision), &mut flat);
        write("timings", &header, flat.into_iter().map(|(k, v)| vec![k, v]).collect(), &mut out);
        out
    }

    fn render_text(&self, precision: usize) -> String {
        let mut out = String::new();
        out.push_str(&format!("{TOOL} {VERSION} {}\n", self.command));
        if let Some(d) = &self.system_digest {
            out.push_str(&format!("system {d}\n"));
        }
        for l in &self.summary {
            out.push_str(l);
            out.push('\n');
        }
        for t in &self.tables {
            out.push_str(&format!("\n[{}]\n", t.name));
            let cells: Vec<Vec<String>> = std::iter::once(t.columns.clone())
                .chain(t.rows.iter().map(|r| r.iter().map(|v| scalar_text(&fix_floats(&mut v.clone(), precision))).collect()))
                .collect();
            let widths: Vec<usize> =
                (0..t.columns.len()).map(|c| cells.iter().map(|r| r[c].len()).max().unwrap_or(0)).collect();
            for r in cells {
                let line: Vec<String> = r.iter().zip(&widths).map(|(s, w)| format!("{s:>w$}")).collect();
                out.push_str(line.join("  ").trim_end());
                out.push('\n');
            }
        }
        out.push_str("\n[results]\n");
        let mut flat = vec![];
        flatten("", &fix_floats(&mut Value::Object(self.results.clone()), precision), &mut flat);
        for (k, v) in flat {
            out.push_str(&format!("{k} = {v}\n"));
        }
        out.push_str("\n[timings]\n");
        let mut flat = vec![];
        flatten("", &fix_floats(&mut Value::Object(self.timings.clone()), precision), &mut flat);
        for (k, v) in flat {
            out.push_str(&format!("{k} = {v}\n"));
        }
        out
    }
}

/// Removes the `timings` field from a json report, for comparisons.
pub fn strip_timings(v: &mut Value) {
    if let Value::Object(m) = v {
        m.shift_remove("timings");
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        Value::Array(a) if a.iter().any(|x| x.is_object() || x.is_array()) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        Value::Array(a) => {
            let items: Vec<String> = a.iter().map(scalar_text).collect();
            out.push((prefix.to_string(), format!("[{}]", items.join(", "))));
        }
        other => out.push((prefix.to_string(), scalar_text(other))),
    }
}

fn fix_floats(v: &mut Value, precision: usize) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            fixed(x, precision)
        }
        Value::Array(a) => Value::Array(a.iter_mut().map(|x| fix_floats(x, precision)).collect()),
        Value::Object(m) => Value::Object(m.iter_mut().map(|(k, x)| (k.clone(), fix_floats(x, precision))).collect()),
        other => other.clone(),
    }
}

/// `x` printed with `precision` decimals, as a json number.
pub fn fixed(x: f64, precision: usize) -> Value {
    if !x.is_finite() {
        return Value::String(if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() });
    }
    let s = format!("{x:.precision$}");
    // "-0.000" carries no information beyond "0.000"
    let s = if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') { s[1..].to_string() } else { s };
    serde_json::from_str::<Number>(&s).map(Value::Number).unwrap_or(Value::String(s))
}

/// A float that is formatted at render time.
pub fn float(x: f64) -> Value {
    if x.is_finite() {
        // keep a decimal point so the value is recognized as a float
        serde_json::from_str::<Number>(&format!("{x:?}")).map(Value::Number).unwrap_or(Value::Null)
    } else {
        fixed(x, 0)
    }
}

pub fn floats(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| float(x)).collect())
}

/// An exact integer of any size as a json number.
pub fn big(n: &BigInt) -> Value {
    serde_json::from_str::<Number>(&n.to_string()).map(Value::Number).unwrap_or_else(|_| Value::String(n.to_string()))
}

/// Integers as numbers, other rationals as `"p/q"` strings.
pub fn rational(r: &BigRational) -> Value {
    if r.denom().is_one() {
        big(r.numer())
    } else {
        Value::String(format!("{}/{}", r.numer(), r.denom()))
    }
}

/// Short exact form: the rational value, or the decimal value with its
/// defining polynomial.
pub fn algebraic_text(a: &AlgebraicReal, precision: usize) -> String {
    match a.as_rational() {
        Some(r) if r.denom().is_one() => r.numer().to_string(),
        Some(r) => format!("{}/{}", r.numer(), r.denom()),
        None => format!("{:.precision$} [root of {}]", a.to_f64(), a.simplified().poly()),
    }
}

pub fn algebraic(a: &AlgebraicReal, precision: usize) -> Value {
    let s = a.simplified();
    let (lo, hi) = s.decimal_interval(precision);
    let mut m = Map::new();
    m.insert("value".into(), float(s.to_f64()));
    m.insert("exact".into(), s.as_rational().map_or(Value::Null, |r| rational(&r)));
    m.insert("polynomial".into(), s.poly().to_string().into());
    m.insert("interval".into(), Value::Array(vec![decimal(&lo), decimal(&hi)]));
    Value::Object(m)
}

fn decimal(s: &str) -> Value {
    serde_json::from_str::<Number>(s).map(Value::Number).unwrap_or_else(|_| Value::String(s.to_string()))
}

/// Wall-clock stopwatch whose readings go into the timings field.
pub struct Stopwatch(Instant);

impl Stopwatch {
    pub fn start() -> Self {
        Stopwatch(Instant::now())
    }

    pub fn ms(&self) -> Value {
        float(self.0.elapsed().as_secs_f64() * 1000.0)
    }
}
