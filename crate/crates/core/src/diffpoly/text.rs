//! Canonical text rendering and its parser.
//!
//! ```text
//! 3 f[3]^(1) + 3 f[2]^(2) + f[1]^(3) + 3 f[1] f[1]^(1)
//! 9/5 w[5] - w[3]^(2) - 1/6 eps^2 v[1] v[1]^(2) + w[1]^3
//! ```
//!
//! A factor is `family[index]`, optionally followed by `^(order)` and then by
//! `^exponent`. `eps^n` is the dispersion parameter. The zero polynomial is
//! rendered as `0`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{DiffPoly, Family, JetVariable, Monomial, Rational};
use crate::error::Error;

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut sep = |f: &mut fmt::Formatter<'_>| {
            if !std::mem::replace(&mut first, false) {
                f.write_str(" ")?;
            }
            Ok::<(), fmt::Error>(())
        };
        if self.eps_power() > 0 {
            sep(f)?;
            if self.eps_power() == 1 {
                f.write_str("eps")?;
            } else {
                write!(f, "eps^{}", self.eps_power())?;
            }
        }
        for (v, e) in self.factors() {
            sep(f)?;
            write!(f, "{v}")?;
            if *e > 1 {
                write!(f, "^{e}")?;
            }
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

fn write_abs_rational(f: &mut fmt::Formatter<'_>, c: &Rational) -> fmt::Result {
    if c.denom().is_one() {
        write!(f, "{}", c.numer().abs())
    } else {
        write!(f, "{}/{}", c.numer().abs(), c.denom())
    }
}

impl fmt::Display for DiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms().enumerate() {
            let negative = c.is_negative();
            match (i, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let unit = c.abs().is_one();
            let bare = m.eps_power() == 0 && m.factors().is_empty();
            if bare {
                write_abs_rational(f, c)?;
            } else {
                if !unit {
                    write_abs_rational(f, c)?;
                    f.write_str(" ")?;
                }
                write!(f, "{m}")?;
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse { pos: self.pos, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_whitespace() || self.src[self.pos] == b'*') {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), Error> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{}'", c as char)))
        }
    }

    fn integer(&mut self) -> Result<BigInt, Error> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(s.parse().unwrap())
    }

    fn small(&mut self) -> Result<u32, Error> {
        let n = self.integer()?;
        u32::try_from(n).map_err(|_| self.err("integer too large"))
    }

    fn starts_with_eps(&mut self) -> bool {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        rest.starts_with(b"eps") && rest.get(3) != Some(&b'[')
    }

    fn term(&mut self) -> Result<(Rational, Monomial), Error> {
        let mut coeff = Rational::one();
        let mut seen = false;
        if matches!(self.peek(), Some(b'0'..=b'9')) {
            let num = self.integer()?;
            let den = if self.eat(b'/') { self.integer()? } else { BigInt::one() };
            if den.is_zero() {
                return Err(self.err("zero denominator"));
            }
            coeff = Rational::new(num, den);
            seen = true;
        }
        let mut mono = Monomial::one();
        loop {
            if self.starts_with_eps() {
                self.pos += 3;
                let e = if self.eat(b'^') { self.small()? } else { 1 };
                mono = mono.mul(&Monomial::from_parts(e, []));
                seen = true;
                continue;
            }
            match self.peek() {
                Some(c) if c.is_ascii_alphabetic() => {
                    self.pos += 1;
                    self.expect(b'[')?;
                    let index = self.small()?;
                    if index == 0 {
                        return Err(self.err("indices start at 1"));
                    }
                    self.expect(b']')?;
                    let mut order = 0;
                    let mut exp = 1;
                    if self.eat(b'^') {
                        if self.eat(b'(') {
                            order = self.small()?;
                            self.expect(b')')?;
                            if self.eat(b'^') {
                                exp = self.small()?;
                            }
                        } else {
                            exp = self.small()?;
                        }
                    }
                    let v = JetVariable::new(Family(c as char), index, order);
                    mono = mono.mul(&Monomial::from_parts(0, [(v, exp)]));
                    seen = true;
                }
                _ => break,
            }
        }
        if !seen {
            return Err(self.err("expected a term"));
        }
        Ok((coeff, mono))
    }
}

impl FromStr for DiffPoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let mut p = Parser { src: s.as_bytes(), pos: 0 };
        let mut out = DiffPoly::zero();
        let mut negative = p.eat(b'-');
        if !negative {
            p.eat(b'+');
        }
        loop {
            let (c, m) = p.term()?;
            out.add_term(m, if negative { -c } else { c });
            if p.eat(b'+') {
                negative = false;
            } else if p.eat(b'-') {
                negative = true;
            } else {
                break;
            }
        }
        if p.peek().is_some() {
            return Err(p.err("trailing input"));
        }
        Ok(out)
    }
}
