//! Recursive-descent reader for rational-function text.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := ('+' | '-') unary | power
//! power := atom ('^' ['-' | '+'] digits)?
//! atom  := digits | 'v' | '(' expr ')'
//! ```

use num_bigint::BigInt;

use super::{RatFunc, Rational};
use crate::error::{Error, Result};

pub fn parse_ratfunc(src: &str) -> Result<RatFunc> {
    let mut p = Parser { s: src.as_bytes(), pos: 0 };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos != p.s.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(out)
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<RatFunc> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = &acc + &self.term()?;
            } else if self.eat(b'-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<RatFunc> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc = &acc * &self.unary()?;
            } else if self.eat(b'/') {
                let at = self.pos;
                let d = self.unary()?;
                acc = acc.checked_div(&d).map_err(|_| Error::Parse { pos: at, msg: "division by zero".into() })?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<RatFunc> {
        if self.eat(b'-') {
            return Ok(-self.unary()?);
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<RatFunc> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let neg = if self.eat(b'-') {
            true
        } else {
            self.eat(b'+');
            false
        };
        let at = self.pos;
        let digits = self.digits()?;
        let mut e: i64 = digits.parse().map_err(|_| Error::Parse { pos: at, msg: "exponent out of range".into() })?;
        if neg {
            e = -e;
        }
        base.pow(e).map_err(|_| Error::Parse { pos: at, msg: "negative power of zero".into() })
    }

    fn atom(&mut self) -> Result<RatFunc> {
        match self.peek() {
            Some(b'v') => {
                self.pos += 1;
                Ok(RatFunc::var())
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let d = self.digits()?;
                let n: BigInt = d.parse().expect("ascii digits");
                Ok(RatFunc::constant(Rational::from_integer(n)))
            }
            Some(_) => Err(self.err("expected a number, 'v' or '('")),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn digits(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        Ok(String::from_utf8_lossy(&self.s[start..self.pos]).into_owned())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_and_signs() {
        assert_eq!(parse_ratfunc("1+2*3").unwrap(), RatFunc::from_int(7));
        assert_eq!(parse_ratfunc("-v^2").unwrap(), -RatFunc::v_pow(2));
        assert_eq!(parse_ratfunc("1/2*v").unwrap(), RatFunc::monomial(Rational::new(1.into(), 2.into()), 1));
        assert_eq!(parse_ratfunc(" v ^ -3 ").unwrap(), RatFunc::v_pow(-3));
        assert_eq!(parse_ratfunc("(v+1)^2").unwrap(), parse_ratfunc("v^2+2*v+1").unwrap());
    }

    #[test]
    fn errors_carry_positions() {
        assert!(matches!(parse_ratfunc("v+"), Err(Error::Parse { pos: 2, .. })));
        assert!(matches!(parse_ratfunc("(v"), Err(Error::Parse { .. })));
        assert!(matches!(parse_ratfunc("1/0"), Err(Error::Parse { pos: 2, .. })));
        assert!(matches!(parse_ratfunc("v w"), Err(Error::Parse { pos: 2, .. })));
    }
}
