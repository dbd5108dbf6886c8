//! Canonical text form of polynomials.
//!
//! Printing: terms from the leading one down, coefficients as reduced
//! fractions, unit coefficients omitted, factors in variable order, e.g.
//! `3/2*g1[1][1]^2*c1[2][2] - 1`. Parsing accepts that form and, more
//! generally, sums/products/powers with parentheses.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{Block, Monomial, Poly, Rational, Ring, VarName};
use crate::error::{Error, Result};

fn write_monomial(f: &mut fmt::Formatter<'_>, ring: &Ring, m: &Monomial) -> fmt::Result {
    for (i, (v, e)) in m.factors().enumerate() {
        if i > 0 {
            write!(f, "*")?;
        }
        match ring.var_name(v) {
            VarName::Entry(bv) => write!(f, "{}[{}][{}]", bv.block, bv.row, bv.col)?,
            VarName::Aux(name) => write!(f, "{name}")?,
        }
        if e > 1 {
            write!(f, "^{e}")?;
        }
    }
    Ok(())
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            match (idx, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let abs = c.abs();
            if m.is_one() {
                write!(f, "{abs}")?;
            } else {
                if !abs.is_one() {
                    write!(f, "{abs}*")?;
                }
                write_monomial(f, self.ring(), m)?;
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    ring: &'a Arc<Ring>,
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, message: impl Into<String>) -> Error {
        let consumed = &self.src[..self.pos.min(self.src.len())];
        let line = consumed.iter().filter(|&&b| b == b'\n').count() + 1;
        let column = self.pos - consumed.iter().rposition(|&b| b == b'\n').map(|p| p + 1).unwrap_or(0) + 1;
        Error::Parse { line, column, message: message.into() }
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

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> Option<&'a str> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| std::str::from_utf8(&self.src[start..self.pos]).unwrap())
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = if self.eat(b'-') { -self.term()? } else {
            self.eat(b'+');
            self.term()?
        };
        loop {
            if self.eat(b'+') {
                acc = acc.try_add(&self.term()?)?;
            } else if self.eat(b'-') {
                acc = acc.try_sub(&self.term()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.power()?;
        while self.eat(b'*') {
            acc = acc.try_mul(&self.power()?)?;
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if self.eat(b'^') {
            self.skip_ws();
            let e: u32 = self
                .digits()
                .and_then(|d| d.parse().ok())
                .ok_or_else(|| self.err("expected a nonnegative exponent"))?;
            return base.pow(e);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let p = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(p)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.power()?)
            }
            Some(c) if c.is_ascii_digit() => {
                let num: BigInt = self.digits().unwrap().parse().unwrap();
                let save = self.pos;
                if self.src.get(self.pos) == Some(&b'/') {
                    self.pos += 1;
                    match self.digits() {
                        Some(d) => {
                            let den: BigInt = d.parse().unwrap();
                            if den.is_zero() {
                                return Err(self.err("zero denominator"));
                            }
                            return Ok(Poly::constant(self.ring, Rational::new(num, den)));
                        }
                        None => self.pos = save,
                    }
                }
                Ok(Poly::constant(self.ring, Rational::from_integer(num)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.variable(),
            Some(c) => Err(self.err(format!("unexpected character `{}`", c as char))),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn variable(&mut self) -> Result<Poly> {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        if self.src.get(self.pos) == Some(&b'[') {
            let block: Block = name.parse().map_err(|_| {
                self.pos = start;
                self.err(format!("`{name}` is not a block name"))
            })?;
            let row = self.index()?;
            let col = self.index()?;
            return Poly::entry(self.ring, block, row, col).map_err(|e| {
                self.pos = start;
                self.err(e.to_string())
            });
        }
        match self.ring.aux_var(name) {
            Some(v) => Ok(Poly::var(self.ring, v)),
            None => {
                self.pos = start;
                Err(self.err(format!("unknown variable `{name}`")))
            }
        }
    }

    fn index(&mut self) -> Result<usize> {
        if self.src.get(self.pos) != Some(&b'[') {
            return Err(self.err("expected `[`"));
        }
        self.pos += 1;
        let v: usize = self
            .digits()
            .and_then(|d| d.parse().ok())
            .ok_or_else(|| self.err("expected an index"))?;
        if self.src.get(self.pos) != Some(&b']') {
            return Err(self.err("expected `]`"));
        }
        self.pos += 1;
        Ok(v)
    }
}

/// Parse a polynomial over `ring`. Errors carry 1-based line/column.
pub fn parse_poly(ring: &Arc<Ring>, text: &str) -> Result<Poly> {
    let mut p = Parser { ring, src: text.as_bytes(), pos: 0 };
    let out = p.expr()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form() {
        let r = Ring::new(2, 1, 1);
        let p = parse_poly(&r, "-1 + 3/2 * c1[2][2] * g1[1][1]^2").unwrap();
        assert_eq!(p.to_string(), "3/2*g1[1][1]^2*c1[2][2] - 1");
        assert_eq!(parse_poly(&r, "6/4").unwrap().to_string(), "3/2");
        assert_eq!(parse_poly(&r, "g1[1][2] - g1[1][2]").unwrap().to_string(), "0");
        assert_eq!(parse_poly(&r, "-g1[2][1]").unwrap().to_string(), "-g1[2][1]");
        assert_eq!(parse_poly(&r, "(g1[1][1] + 1)^2").unwrap().to_string(), "g1[1][1]^2 + 2*g1[1][1] + 1");
    }

    #[test]
    fn diagnostics() {
        let r = Ring::new(2, 1, 0);
        match parse_poly(&r, "g1[1][1] +\n  g2[1][1]") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_poly(&r, "g1[3][1]"), Err(Error::Parse { .. })));
        assert!(matches!(parse_poly(&r, "1/0"), Err(Error::Parse { .. })));
        assert!(matches!(parse_poly(&r, "x"), Err(Error::Parse { column: 1, .. })));
        assert!(matches!(parse_poly(&r, "1 2"), Err(Error::Parse { column: 3, .. })));
    }

    #[test]
    fn aux_names() {
        let r = Ring::scratch(&["x", "y"]);
        assert_eq!(parse_poly(&r, "y*x^2 - x").unwrap().to_string(), "x^2*y - x");
    }
}
