//! Polynomial expressions in the variables `X{j}_{i}`: integer or rational
//! coefficients, `+ - *`, parentheses and `^` with a nonnegative integer
//! exponent.

use arithdeg::dynamics::MultiPoly;
use arithdeg::geometry::ProductSpace;
use arithdeg::Rational;
use num_bigint::BigInt;
use num_traits::Zero;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyParseError {
    /// Byte offset in the expression.
    pub offset: usize,
    pub message: String,
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    space: &'a ProductSpace,
}

type Res<T> = Result<T, PolyParseError>;

pub fn parse_poly(src: &str, space: &ProductSpace) -> Res<MultiPoly<Rational>> {
    let mut p = Parser { src: src.as_bytes(), pos: 0, space };
    p.skip_ws();
    if p.pos == p.src.len() {
        return Err(p.err("empty expression"));
    }
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected character"));
    }
    Ok(e)
}

impl Parser<'_> {
    fn err(&self, m: &str) -> PolyParseError {
        PolyParseError { offset: self.pos, message: m.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn nv(&self) -> usize {
        self.space.num_vars()
    }

    fn expr(&mut self) -> Res<MultiPoly<Rational>> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                self.term()?.neg()
            }
            Some(b'+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Res<MultiPoly<Rational>> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Res<MultiPoly<Rational>> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            let n = self.digits().ok_or_else(|| self.err("expected an exponent"))?;
            let e: u32 = n.parse().map_err(|_| PolyParseError { offset: start, message: "exponent too large".into() })?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn digits(&mut self) -> Option<String> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn atom(&mut self) -> Res<MultiPoly<Rational>> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let num: BigInt = self.digits().unwrap().parse().unwrap();
                let mut value = Rational::from_integer(num);
                // a slash directly after an integer makes a rational literal
                let save = self.pos;
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    self.skip_ws();
                    let at = self.pos;
                    let den: BigInt = self
                        .digits()
                        .ok_or_else(|| self.err("expected a denominator"))?
                        .parse()
                        .unwrap();
                    if den.is_zero() {
                        return Err(PolyParseError { offset: at, message: "zero denominator".into() });
                    }
                    value /= Rational::from_integer(den);
                } else {
                    self.pos = save;
                }
                Ok(MultiPoly::constant(self.nv(), value))
            }
            Some(b'X') => self.variable(),
            Some(_) => Err(self.err("expected a number, variable or '('")),
            None => Err(self.err("unexpected end of expression")),
        }
    }

    fn variable(&mut self) -> Res<MultiPoly<Rational>> {
        let start = self.pos;
        self.pos += 1;
        let bad = |m: &str| PolyParseError { offset: start, message: m.to_string() };
        let j: usize = self.digits().and_then(|s| s.parse().ok()).ok_or_else(|| bad("malformed variable, expected X{j}_{i}"))?;
        if self.src.get(self.pos) != Some(&b'_') {
            return Err(bad("malformed variable, expected X{j}_{i}"));
        }
        self.pos += 1;
        let i: usize = self.digits().and_then(|s| s.parse().ok()).ok_or_else(|| bad("malformed variable, expected X{j}_{i}"))?;
        if j == 0 || j > self.space.factors() {
            return Err(bad(&format!("no factor {j} in {}", self.space)));
        }
        if i > self.space.dims()[j - 1] {
            return Err(bad(&format!("factor {j} is P^{} and has no coordinate {i}", self.space.dims()[j - 1])));
        }
        Ok(MultiPoly::var(self.nv(), self.space.var_offset(j - 1) + i))
    }
}
