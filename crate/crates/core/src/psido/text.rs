//! Text form of symbols.
//!
//! One variable: `3/2 x^-2 d^-2 + -1 x^1 d^0`. Several variables use indexed
//! factors: `1 x1^-1 d1^-1 x2^0 d2^0`. The coefficient may be omitted (it is
//! then 1), missing factors have exponent 0, and `-` works as a separator.
//! Printing always writes every factor, so `parse(print(s))` is exact.

use std::fmt;

use num_traits::One;
use thiserror::Error;

use crate::rational::{self, Rational};

use super::{Monomial, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse symbol at {token:?}: {reason}")]
pub struct ParseError {
    pub token: String,
    pub reason: String,
}

fn err(token: &str, reason: &str) -> ParseError {
    ParseError {
        token: token.to_string(),
        reason: reason.to_string(),
    }
}

/// Splits `x3^-2` into (`'x'`, `Some(3)`, `-2`).
fn factor(token: &str) -> Option<(char, Option<usize>, i32)> {
    let (head, exp) = token.split_once('^')?;
    let mut chars = head.chars();
    let kind = chars.next().filter(|c| *c == 'x' || *c == 'd')?;
    let index = chars.as_str();
    let index = if index.is_empty() {
        None
    } else {
        Some(index.parse().ok().filter(|i| *i >= 1)?)
    };
    Some((kind, index, exp.parse().ok()?))
}

impl Symbol {
    pub fn parse(text: &str, window: &[i32]) -> Result<Symbol, ParseError> {
        let vars = window.len();
        if vars == 0 {
            return Err(err(text, "at least one variable is required"));
        }
        let mut terms = Vec::new();
        let mut current: Option<(Rational, Monomial, bool)> = None;
        let mut sign = Rational::one();
        let blank = || Monomial {
            x: vec![0; vars],
            d: vec![0; vars],
        };
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens == ["0"] {
            return Ok(Symbol::zero(vars, window.to_vec()));
        }
        for tok in tokens {
            match tok {
                "+" | "-" => {
                    let (c, m, _) = current.take().ok_or_else(|| err(tok, "dangling operator"))?;
                    terms.push((m, c));
                    sign = if tok == "-" { -Rational::one() } else { Rational::one() };
                }
                _ => {
                    if let Some((kind, index, exp)) = factor(tok) {
                        let var = match (index, vars) {
                            (None, 1) => 0,
                            (None, _) => return Err(err(tok, "indexed factors required")),
                            (Some(i), _) if i <= vars => i - 1,
                            (Some(_), _) => return Err(err(tok, "variable index out of range")),
                        };
                        let entry = current.get_or_insert_with(|| (sign.clone(), blank(), false));
                        let slot = if kind == 'x' { &mut entry.1.x } else { &mut entry.1.d };
                        slot[var] += exp;
                        entry.2 = true;
                    } else {
                        let c = rational::parse(tok).map_err(|_| err(tok, "expected a coefficient or factor"))?;
                        if current.is_some() {
                            return Err(err(tok, "coefficient must lead its term"));
                        }
                        current = Some((&sign * c, blank(), false));
                    }
                }
            }
        }
        let (c, m, _) = current.ok_or_else(|| err(text, "empty or trailing operator"))?;
        terms.push((m, c));
        Ok(Symbol::from_terms(vars, terms, window.to_vec()))
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", rational::display(c))?;
            for i in 0..self.vars {
                if self.vars == 1 {
                    write!(f, " x^{} d^{}", m.x[i], m.d[i])?;
                } else {
                    write!(f, " x{0}^{1} d{0}^{2}", i + 1, m.x[i], m.d[i])?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn shorthand_forms() {
        let s = Symbol::parse("x^1 - 2 d^3 + 3/2 x^-1 d^-1", &[-5]).unwrap();
        assert_eq!(s.coefficient(&[1], &[0]), Some(int(1)));
        assert_eq!(s.coefficient(&[0], &[3]), Some(int(-2)));
        assert_eq!(s.coefficient(&[-1], &[-1]), Some(rat(3, 2)));
        assert_eq!(s.to_string(), "3/2 x^-1 d^-1 + -2 x^0 d^3 + 1 x^1 d^0");
    }

    #[test]
    fn round_trip_indexed() {
        let s = Symbol::parse("-1/3 x1^2 d2^-1 + 4 x2^-1 d1^1", &[-4, -4]).unwrap();
        let printed = s.to_string();
        assert_eq!(Symbol::parse(&printed, &[-4, -4]).unwrap(), s);
    }

    #[test]
    fn rejects_garbage() {
        assert!(Symbol::parse("x^", &[-3]).is_err());
        assert!(Symbol::parse("x^1 +", &[-3]).is_err());
        assert!(Symbol::parse("x3^1", &[-3, -3]).is_err());
        assert!(Symbol::parse("x^1", &[-3, -3]).is_err());
        assert!(Symbol::parse("x^1 2", &[-3]).is_err());
        assert_eq!(Symbol::parse("0", &[-3]).unwrap().to_string(), "0");
    }
}
