//! Polynomial expression parser.
//!
//! Grammar (whitespace is insignificant):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' unary) | ('/' integer))*
//! unary  := '-' unary | '+' unary | power
//! power  := atom ('^' integer)?
//! atom   := integer | variable | '(' expr ')'
//! ```
//!
//! Variables are `x<i>`, `f<j>` and `eps`, resolved against an [`Arena`].
//! Division is only allowed by a nonzero numeric literal.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use super::poly::{Arena, Poly};
use super::scalar::Rational;

/// Exponents above this are rejected to keep parsing bounded on hostile input.
pub const MAX_EXPONENT: u32 = 4096;
const MAX_DEPTH: usize = 256;
/// Upper limit on the (estimated) number of terms produced by `(...)^e`.
pub const MAX_TERMS: u128 = 200_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable `{name}` at byte {pos}")]
    UnknownVariable { pos: usize, name: String },
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    arena: &'a Arc<Arena>,
    depth: usize,
}

pub fn parse_poly(text: &str, arena: &Arc<Arena>) -> Result<Poly, ParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        arena,
        depth: 0,
    };
    p.skip_ws();
    if p.at_end() {
        return Err(p.err("empty expression"));
    }
    let e = p.expr()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> ParseError {
        ParseError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\n' | b'\r')) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.err("expression nested too deeply"));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Poly, ParseError> {
        self.enter()?;
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                let t = self.term()?;
                acc = &acc + &t;
            } else if self.eat(b'-') {
                let t = self.term()?;
                acc = &acc - &t;
            } else {
                break;
            }
        }
        self.depth -= 1;
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                let f = self.unary()?;
                acc = &acc * &f;
            } else if self.eat(b'/') {
                self.skip_ws();
                let at = self.pos;
                let d = self.integer()?;
                if d.is_zero() {
                    self.pos = at;
                    return Err(self.err("division by zero"));
                }
                acc = acc.scale(&Rational::new(BigInt::one(), d));
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Poly, ParseError> {
        self.enter()?;
        let r = if self.eat(b'-') {
            let u = self.unary()?;
            Ok(-&u)
        } else if self.eat(b'+') {
            self.unary()
        } else {
            self.power()
        };
        self.depth -= 1;
        r
    }

    fn power(&mut self) -> Result<Poly, ParseError> {
        let base = self.atom()?;
        if self.eat(b'^') {
            self.skip_ws();
            let at = self.pos;
            let e = self.integer()?;
            let e: u32 = match u32::try_from(e) {
                Ok(e) if e <= MAX_EXPONENT => e,
                _ => {
                    self.pos = at;
                    return Err(self.err("exponent too large"));
                }
            };
            if base.num_terms() > 1 && estimated_terms(&base, e) > MAX_TERMS {
                self.pos = at;
                return Err(self.err("power expands beyond the term budget"));
            }
            Ok(base.pow(e))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Poly, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(Poly::constant(self.arena, Rational::from_integer(n)))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
                match self.arena.index_of(name) {
                    Some(i) => Ok(Poly::var(self.arena, i)),
                    None => Err(ParseError::UnknownVariable {
                        pos: start,
                        name: name.to_string(),
                    }),
                }
            }
            Some(_) => Err(self.err("expected a number, variable or `(`")),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("0");
        s.parse::<BigInt>().map_err(|_| self.err("bad integer"))
    }
}

/// Dense upper estimate `C(k + D, k)` for the term count of `base^e`,
/// `k` the number of variables occurring in `base`, `D` the result degree.
fn estimated_terms(base: &Poly, e: u32) -> u128 {
    let k = (0..base.nvars()).filter(|&i| base.degree_in(i) > 0).count() as u128;
    let d = base.degree() as u128 * e as u128;
    let mut c: u128 = 1;
    for i in 1..=k {
        c = c.saturating_mul(d + i) / i;
        if c > MAX_TERMS {
            return c;
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::Monomial;
    use crate::algebra::scalar::{rat, ratio};

    #[test]
    fn parses_simple_difference() {
        let a = Arena::new(1, 0);
        let p = parse_poly("x1^2 - 1", &a).unwrap();
        assert_eq!(p.num_terms(), 2);
        assert_eq!(p.coeff(&Monomial(vec![2])), rat(1));
        assert_eq!(p.coeff(&Monomial(vec![0])), rat(-1));
    }

    #[test]
    fn mixed_variables_degree_two() {
        let a = Arena::new(1, 2);
        let p = parse_poly("f1*f1 + 2*x1*f2", &a).unwrap();
        assert_eq!(p.degree(), 2);
        assert_eq!(p.coeff(&Monomial(vec![1, 0, 1])), rat(2));
    }

    #[test]
    fn cube_expands_binomially() {
        let a = Arena::new(1, 0);
        let p = parse_poly("(x1+1)^3", &a).unwrap();
        let q = parse_poly("x1^3 + 3*x1^2 + 3*x1 + 1", &a).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn rationals_and_eps() {
        let a = Arena::with_eps(1, 0);
        let p = parse_poly("-3/2*x1*eps + 1/4", &a).unwrap();
        assert_eq!(p.coeff(&Monomial(vec![1, 1])), ratio(-3, 2));
        assert_eq!(p.constant_term(), ratio(1, 4));
    }

    #[test]
    fn errors_carry_positions() {
        let a = Arena::new(2, 0);
        assert_eq!(
            parse_poly("x1 + y", &a),
            Err(ParseError::UnknownVariable { pos: 5, name: "y".into() })
        );
        assert!(matches!(parse_poly("x1 +", &a), Err(ParseError::Syntax { pos: 4, .. })));
        assert!(matches!(parse_poly("(x1", &a), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_poly("x1/0", &a), Err(ParseError::Syntax { pos: 3, .. })));
        assert!(matches!(parse_poly("x1^99999", &a), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_poly("", &a), Err(ParseError::Syntax { pos: 0, .. })));
    }

    #[test]
    fn printed_form_reparses() {
        let a = Arena::new(2, 1);
        let p = parse_poly("(x1 - 2/3*f1)^2*(x2+1) - 5", &a).unwrap();
        let q = parse_poly(&p.to_string(), &a).unwrap();
        assert_eq!(p, q);
    }
}
