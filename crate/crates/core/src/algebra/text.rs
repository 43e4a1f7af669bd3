//! Canonical text form of polynomials.
//!
//! Terms appear in descending grevlex order joined by ` + ` / ` - `, e.g.
//! `-1/2*x4*y1*y2 + 3*x1^2*y3`. Unit coefficients are omitted except on the
//! constant term. Over `F_p` coefficients are printed as residues in `[0, p)`,
//! so every separator is ` + `. The zero polynomial prints as `0`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};

use super::monomial::{Monomial, Var};
use super::mpoly::MPoly;
use super::scalar::{Domain, Scalar};
use super::AlgebraError;

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let d = self.domain();
        for (i, (m, c)) in self.terms().enumerate() {
            let negative = d.is_negative(c);
            match (i, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let magnitude = match c {
                Scalar::Rational(q) => Scalar::Rational(q.abs()),
                Scalar::Residue(_) => c.clone(),
            };
            if m.is_one() {
                write!(f, "{magnitude}")?;
            } else if d.is_one(&magnitude) {
                write!(f, "{m}")?;
            } else {
                write!(f, "{magnitude}*{m}")?;
            }
        }
        Ok(())
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    text: &'a str,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer { src: text.as_bytes(), pos: 0, text }
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

    fn error(&self, what: &str) -> AlgebraError {
        AlgebraError::Parse(format!("{what} at byte {} in `{}`", self.pos, self.text))
    }

    fn integer(&mut self) -> Result<BigInt, AlgebraError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected integer"));
        }
        self.text[start..self.pos].parse().map_err(|_| self.error("bad integer"))
    }

    fn exponent(&mut self) -> Result<u16, AlgebraError> {
        let n = self.integer()?;
        u16::try_from(n).map_err(|_| self.error("exponent too large"))
    }

    fn factor(&mut self, coeff: &mut BigRational, mono: &mut Monomial) -> Result<(), AlgebraError> {
        match self.peek() {
            Some(b'0'..=b'9') => {
                let num = self.integer()?;
                let den = if self.eat(b'/') { self.integer()? } else { BigInt::one() };
                if den == BigInt::from(0) {
                    return Err(self.error("zero denominator"));
                }
                *coeff *= BigRational::new(num, den);
                Ok(())
            }
            Some(c @ (b'x' | b'y')) => {
                self.pos += 1;
                let idx = self.src.get(self.pos).copied();
                let i = match idx {
                    Some(n @ b'1'..=b'4') => (n - b'0') as usize,
                    _ => return Err(self.error("expected variable index 1..4")),
                };
                self.pos += 1;
                let v = if c == b'x' { Var::x(i) } else { Var::y(i) };
                let e = if self.eat(b'^') { self.exponent()? } else { 1 };
                *mono = mono.mul(&Monomial::var(v).with_exponent(v, e));
                Ok(())
            }
            _ => Err(self.error("expected number or variable")),
        }
    }

    fn term(&mut self) -> Result<(BigRational, Monomial), AlgebraError> {
        let mut coeff = BigRational::one();
        let mut mono = Monomial::ONE;
        self.factor(&mut coeff, &mut mono)?;
        while self.eat(b'*') {
            self.factor(&mut coeff, &mut mono)?;
        }
        Ok((coeff, mono))
    }
}

impl MPoly {
    /// Parses the text form. Any sum of products of rationals and `x1..y4`
    /// powers is accepted; canonical input round-trips byte for byte.
    pub fn parse(domain: Domain, text: &str) -> Result<MPoly, AlgebraError> {
        let mut lx = Lexer::new(text);
        let mut terms = Vec::new();
        let mut negative = if lx.eat(b'-') {
            true
        } else {
            lx.eat(b'+');
            false
        };
        loop {
            let (c, m) = lx.term()?;
            let c = if negative { -c } else { c };
            terms.push((m, domain.from_rational(&c)?));
            if lx.eat(b'+') {
                negative = false;
            } else if lx.eat(b'-') {
                negative = true;
            } else {
                break;
            }
        }
        if lx.peek().is_some() {
            return Err(lx.error("trailing input"));
        }
        MPoly::from_terms(domain, terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_rational_text_roundtrips() {
        let s = "-1/2*x4*y1*y2 + 3*x1^2*y3";
        let f = MPoly::parse(Domain::Rational, s).unwrap();
        assert_eq!(f.to_string(), s);
        // Non-canonical input is normalized into the fixed order.
        let g = MPoly::parse(Domain::Rational, "3*x1^2*y3 - 1/2*x4*y1*y2").unwrap();
        assert_eq!(g, f);
        assert_eq!(g.to_string(), s);
    }

    #[test]
    fn prime_field_text() {
        let f7 = Domain::prime_field(7).unwrap();
        let f = MPoly::parse(f7, "x1 - x2 + 1/2").unwrap();
        assert_eq!(f.to_string(), "x1 + 6*x2 + 4");
        assert_eq!(MPoly::parse(f7, &f.to_string()).unwrap(), f);
    }

    #[test]
    fn special_forms() {
        let q = Domain::Rational;
        assert_eq!(MPoly::parse(q, "0").unwrap().to_string(), "0");
        assert_eq!(MPoly::parse(q, "x1 - x1").unwrap().to_string(), "0");
        assert_eq!(MPoly::parse(q, "-x1").unwrap().to_string(), "-x1");
        assert_eq!(MPoly::parse(q, "2*x1*x1*3").unwrap().to_string(), "6*x1^2");
        assert_eq!(MPoly::parse(q, "-7/3").unwrap().to_string(), "-7/3");
    }

    #[test]
    fn malformed_text_is_rejected() {
        let q = Domain::Rational;
        for bad in ["", "x5", "x1 +", "x1^", "1/0", "x1 y1", "z1"] {
            assert!(MPoly::parse(q, bad).is_err(), "accepted `{bad}`");
        }
        let f5 = Domain::prime_field(5).unwrap();
        assert!(MPoly::parse(f5, "1/5*x1").is_err());
    }
}
