//! System description files (TOML, schema 1) and correspondence files.
//!
//! ```toml
//! schema = 1
//! name = "split-2-3"
//! space = [1, 1]
//! blocks = [
//!   ["X1_0^2", "X1_1^2"],
//!   ["X2_0^3", "X2_1^3"],
//! ]
//!
//! [points]
//! wander = [[2, 1], [2, 1]]
//!
//! [options]
//! horizon = 15
//! digit_budget = 1000000
//! tol = 0.02
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::Range;

use arithdeg::dml::{Correspondence, DmlError};
use arithdeg::dynamics::{format_poly, DynamicsError, Endomorphism, MultiPoly, ProjPoint};
use arithdeg::geometry::ProductSpace;
use arithdeg::Rational;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Deserialize;
use toml::Spanned;

use crate::polyparse::parse_poly;

pub const SCHEMA: i64 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

fn at(src: &str, offset: usize, message: impl Into<String>) -> ParseError {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    ParseError { line, col, message: message.into() }
}

fn at_span(src: &str, span: &Range<usize>, message: impl Into<String>) -> ParseError {
    at(src, span.start, message)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Options {
    pub horizon: usize,
    pub digit_budget: u64,
    pub tol: f64,
}

impl Default for Options {
    fn default() -> Self {
        Options { horizon: arithdeg::dynamics::DEFAULT_N_MAX, digit_budget: arithdeg::dynamics::DEFAULT_DIGIT_BUDGET, tol: 0.02 }
    }
}

/// Battery metadata: which point feeds which check, and closed-form
/// expectations where they exist.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckMeta {
    pub alpha_point: Option<String>,
    pub alpha_expected: Option<f64>,
    pub alpha_rel_tol: Option<f64>,
    pub canonical_point: Option<String>,
}

impl CheckMeta {
    fn is_empty(&self) -> bool {
        *self == CheckMeta::default()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemDescription {
    pub name: String,
    pub map: Endomorphism,
    pub points: BTreeMap<String, ProjPoint>,
    pub options: Options,
    pub check: CheckMeta,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Coord {
    Int(i64),
    Str(String),
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawOptions {
    horizon: Option<Spanned<i64>>,
    digit_budget: Option<Spanned<i64>>,
    tol: Option<Spanned<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    schema: Spanned<i64>,
    name: String,
    space: Spanned<Vec<i64>>,
    blocks: Spanned<Vec<Spanned<Vec<Spanned<String>>>>>,
    #[serde(default)]
    points: BTreeMap<String, Spanned<Vec<Vec<Spanned<Coord>>>>>,
    #[serde(default)]
    options: RawOptions,
    #[serde(default)]
    check: CheckMeta,
}

fn toml_error(src: &str, e: toml::de::Error) -> ParseError {
    let off = e.span().map_or(0, |s| s.start);
    at(src, off, e.message().trim().to_string())
}

fn check_schema(src: &str, schema: &Spanned<i64>) -> Result<(), ParseError> {
    if *schema.get_ref() != SCHEMA {
        return Err(at_span(src, &schema.span(), format!("unsupported schema {}, expected {SCHEMA}", schema.get_ref())));
    }
    Ok(())
}

fn parse_space(src: &str, space: &Spanned<Vec<i64>>) -> Result<ProductSpace, ParseError> {
    let dims: Option<Vec<usize>> = space.get_ref().iter().map(|&d| usize::try_from(d).ok()).collect();
    dims.and_then(|d| ProductSpace::new(d).ok())
        .ok_or_else(|| at_span(src, &space.span(), "space must be a nonempty list of positive dimensions"))
}

fn parse_expr(src: &str, s: &Spanned<String>, space: &ProductSpace) -> Result<MultiPoly<Rational>, ParseError> {
    parse_poly(s.get_ref(), space).map_err(|e| {
        // +1 skips the opening quote of a basic string
        at(src, s.span().start + 1 + e.offset, e.message)
    })
}

impl SystemDescription {
    pub fn parse(src: &str) -> Result<Self, ParseError> {
        let raw: RawSystem = toml::from_str(src).map_err(|e| toml_error(src, e))?;
        check_schema(src, &raw.schema)?;
        let space = parse_space(src, &raw.space)?;
        let mut blocks = Vec::new();
        for b in raw.blocks.get_ref() {
            let polys = b.get_ref().iter().map(|s| parse_expr(src, s, &space)).collect::<Result<Vec<_>, _>>()?;
            blocks.push(polys);
        }
        let map = Endomorphism::new(space.clone(), blocks).map_err(|e| {
            let span = match &e {
                DynamicsError::BlockShape { block, .. }
                | DynamicsError::VariableCount { block, .. }
                | DynamicsError::NotMultihomogeneous { block, .. } => raw.blocks.get_ref().get(*block).map(|b| b.span()),
                DynamicsError::ZeroBlock(block) | DynamicsError::ConstantBlock(block) | DynamicsError::NotAMorphism(block) => {
                    raw.blocks.get_ref().get(*block).map(|b| b.span())
                }
                _ => None,
            };
            at_span(src, &span.unwrap_or_else(|| raw.blocks.span()), format!("invalid endomorphism: {e}"))
        })?;
        let mut points = BTreeMap::new();
        for (name, p) in &raw.points {
            let coords = p
                .get_ref()
                .iter()
                .map(|v| {
                    v.iter()
                        .map(|c| match c.get_ref() {
                            Coord::Int(i) => Ok(BigInt::from(*i)),
                            Coord::Str(s) => s
                                .trim()
                                .parse::<BigInt>()
                                .map_err(|_| at_span(src, &c.span(), "coordinate is not an integer")),
                        })
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()?;
            let pt = ProjPoint::new(coords).map_err(|e| at_span(src, &p.span(), format!("point {name}: {e}")))?;
            if !pt.lies_on(&space) {
                return Err(at_span(src, &p.span(), format!("point {name} does not lie on {space}")));
            }
            points.insert(name.clone(), pt);
        }
        let mut options = Options::default();
        if let Some(h) = &raw.options.horizon {
            options.horizon = usize::try_from(*h.get_ref()).map_err(|_| at_span(src, &h.span(), "horizon must be >= 0"))?;
        }
        if let Some(b) = &raw.options.digit_budget {
            options.digit_budget = u64::try_from(*b.get_ref()).map_err(|_| at_span(src, &b.span(), "digit_budget must be >= 0"))?;
        }
        if let Some(t) = &raw.options.tol {
            if t.get_ref().is_nan() || *t.get_ref() <= 0.0 {
                return Err(at_span(src, &t.span(), "tol must be positive"));
            }
            options.tol = *t.get_ref();
        }
        for p in [&raw.check.alpha_point, &raw.check.canonical_point].into_iter().flatten() {
            if !points.contains_key(p) {
                return Err(at(src, 0, format!("check section names unknown point {p}")));
            }
        }
        Ok(SystemDescription { name: raw.name, map, points, options, check: raw.check })
    }

    pub fn point(&self, name: &str) -> Option<&ProjPoint> {
        self.points.get(name)
    }

    /// Canonical serialization; parsing it yields an equal description.
    pub fn to_canonical_string(&self) -> String {
        let space = self.map.space();
        let names = |v: usize| Endomorphism::variable_name(space, v);
        let mut s = String::new();
        let _ = writeln!(s, "schema = {SCHEMA}");
        let _ = writeln!(s, "name = {}", quote(&self.name));
        let _ = writeln!(s, "space = {}", int_list(space.dims().iter().map(|d| d.to_string())));
        s.push_str("blocks = [\n");
        for b in self.map.blocks() {
            let polys: Vec<String> = b.iter().map(|p| quote(&format_poly(p, &names))).collect();
            let _ = writeln!(s, "  [{}],", polys.join(", "));
        }
        s.push_str("]\n");
        if !self.points.is_empty() {
            s.push_str("\n[points]\n");
            for (name, p) in &self.points {
                let factors: Vec<String> = p.coords().iter().map(|v| int_list(v.iter().map(coord))).collect();
                let _ = writeln!(s, "{} = [{}]", key(name), factors.join(", "));
            }
        }
        let o = &self.options;
        let _ = write!(s, "\n[options]\nhorizon = {}\ndigit_budget = {}\ntol = {}\n", o.horizon, o.digit_budget, float(o.tol));
        if !self.check.is_empty() {
            s.push_str("\n[check]\n");
            let c = &self.check;
            if let Some(p) = &c.alpha_point {
                let _ = writeln!(s, "alpha_point = {}", quote(p));
            }
            if let Some(v) = c.alpha_expected {
                let _ = writeln!(s, "alpha_expected = {}", float(v));
            }
            if let Some(v) = c.alpha_rel_tol {
                let _ = writeln!(s, "alpha_rel_tol = {}", float(v));
            }
            if let Some(p) = &c.canonical_point {
                let _ = writeln!(s, "canonical_point = {}", quote(p));
            }
        }
        s
    }
}

fn coord(c: &BigInt) -> String {
    match c.to_i64() {
        Some(i) => i.to_string(),
        None => quote(&c.to_string()),
    }
}

fn int_list(items: impl Iterator<Item = String>) -> String {
    format!("[{}]", items.collect::<Vec<_>>().join(", "))
}

fn float(v: f64) -> String {
    let s = format!("{v:?}");
    if s.contains(['.', 'e', 'E']) || !v.is_finite() {
        s
    } else {
        format!("{s}.0")
    }
}

fn key(k: &str) -> String {
    if !k.is_empty() && k.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
        k.to_string()
    } else {
        quote(k)
    }
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c if c.is_control() => {
                let _ = write!(out, "\\u{:04X}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCorrespondence {
    schema: Spanned<i64>,
    name: String,
    space: Spanned<Vec<i64>>,
    equations: Spanned<Vec<Spanned<String>>>,
}

/// A correspondence file: the ambient `X x Y` and the equations of `V`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrespondenceFile {
    pub name: String,
    pub correspondence: Correspondence,
}

impl CorrespondenceFile {
    pub fn parse(src: &str) -> Result<Self, ParseError> {
        let raw: RawCorrespondence = toml::from_str(src).map_err(|e| toml_error(src, e))?;
        check_schema(src, &raw.schema)?;
        let space = parse_space(src, &raw.space)?;
        let eqs = raw.equations.get_ref().iter().map(|s| parse_expr(src, s, &space)).collect::<Result<Vec<_>, _>>()?;
        let correspondence = Correspondence::new(space, eqs).map_err(|e| {
            let span = match &e {
                DmlError::ZeroEquation(i) | DmlError::NotMultihomogeneous(i) | DmlError::VariableCount(i) => {
                    raw.equations.get_ref().get(*i).map(|s| s.span())
                }
                _ => None,
            };
            at_span(src, &span.unwrap_or_else(|| raw.equations.span()), format!("invalid correspondence: {e}"))
        })?;
        Ok(CorrespondenceFile { name: raw.name, correspondence })
    }

    pub fn to_canonical_string(&self) -> String {
        let space = self.correspondence.ambient();
        let names = |v: usize| Endomorphism::variable_name(space, v);
        let eqs: Vec<String> = self.correspondence.equations().iter().map(|p| quote(&format_poly(p, &names))).collect();
        format!(
            "schema = {SCHEMA}\nname = {}\nspace = {}\nequations = [{}]\n",
            quote(&self.name),
            int_list(space.dims().iter().map(|d| d.to_string())),
            eqs.join(", ")
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SPLIT: &str = r#"schema = 1
name = "split"
space = [1, 1]
blocks = [
  ["X1_0^2", "X1_1^2"],
  ["X2_0^3", "X2_1^3"],
]

[points]
a = [[4, 2], [3, 1]]
big = [["123456789012345678901234567890", 1], [1, 0]]
"#;

    #[test]
    fn parses_a_system() {
        let s = SystemDescription::parse(SPLIT).unwrap();
        assert_eq!(s.map.degree_matrix(), &[vec![2, 0], vec![0, 3]]);
        assert_eq!(s.points["a"].to_string(), "([2:1],[3:1])");
        assert_eq!(s.options, Options::default());
    }

    #[test]
    fn canonical_form_is_a_fixed_point() {
        let s = SystemDescription::parse(SPLIT).unwrap();
        let c = s.to_canonical_string();
        let again = SystemDescription::parse(&c).unwrap();
        assert_eq!(again, s);
        assert_eq!(again.to_canonical_string(), c);
        assert!(c.contains("big = [[\"123456789012345678901234567890\", 1], [1, 0]]"));
    }

    #[test]
    fn errors_carry_positions() {
        let bad = SPLIT.replace("X2_0^3", "X2_0^3 + X3_0");
        let e = SystemDescription::parse(&bad).unwrap_err();
        assert_eq!((e.line, e.col), (6, 14));
        let bad = SPLIT.replace("\"X2_1^3\"", "\"X2_1^2\"");
        let e = SystemDescription::parse(&bad).unwrap_err();
        assert_eq!(e.line, 6);
        assert!(e.message.contains("multihomogeneous"), "{}", e.message);
        let bad = SPLIT.replace("schema = 1", "schema = 2");
        assert_eq!(SystemDescription::parse(&bad).unwrap_err().line, 1);
        let bad = SPLIT.replace("[4, 2]", "[0, 0]");
        assert_eq!(SystemDescription::parse(&bad).unwrap_err().line, 10);
        let bad = SPLIT.replace("blocks", "blokcs");
        assert!(SystemDescription::parse(&bad).is_err());
        let bad = SPLIT.replace("X1_0^2\", \"X1_1^2", "X1_0*X1_1\", \"X1_0^2");
        assert!(SystemDescription::parse(&bad).unwrap_err().message.contains("common zero"));
    }

    #[test]
    fn correspondence_files() {
        let src = "schema = 1\nname = \"diagonal\"\nspace = [1, 1]\nequations = [\"X1_0*X2_1 - X1_1*X2_0\"]\n";
        let c = CorrespondenceFile::parse(src).unwrap();
        assert_eq!(c.to_canonical_string(), src);
        let e = CorrespondenceFile::parse(&src.replace("X2_0\"", "X2_0 + X1_0\"")).unwrap_err();
        assert_eq!(e.line, 4);
    }
}
