//! Text parser for polynomials.
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := coeff ['*'] factor ('*' factor)* | coeff | factor ('*' factor)*
//! factor := ident ('^' nat)?
//! coeff  := nat
//! ```
//! Whitespace is insignificant.

use super::{Ctx, Monomial, Polynomial, VarContext};
use crate::basep::Prime;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Nat(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '+' => out.push((start, Tok::Plus)),
            '-' => out.push((start, Tok::Minus)),
            '*' => out.push((start, Tok::Star)),
            '^' => out.push((start, Tok::Caret)),
            '0'..='9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((start, Tok::Nat(text[start..i].to_string())));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
                continue;
            }
            other => {
                return Err(Error::Parse {
                    pos: start,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    prime: u64,
    fixed: Option<&'a Ctx>,
    names: Vec<String>,
}

struct RawTerm {
    coeff: u64,
    factors: Vec<(usize, u64)>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.1)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |t| t.0)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn nat_mod(&self, digits: &str) -> u64 {
        digits
            .bytes()
            .fold(0u64, |acc, b| (acc * 10 + (b - b'0') as u64) % self.prime)
    }

    fn nat_exact(&self, digits: &str) -> Result<u64> {
        digits
            .parse::<u32>()
            .map(u64::from)
            .or_else(|_| self.err(format!("exponent `{digits}` too large")))
    }

    fn var_index(&mut self, name: &str) -> Result<usize> {
        match self.fixed {
            Some(ctx) => match ctx.index_of(name) {
                Some(i) => Ok(i),
                None => self.err(format!("unknown variable `{name}`")),
            },
            None => Ok(match self.names.iter().position(|n| n == name) {
                Some(i) => i,
                None => {
                    self.names.push(name.to_string());
                    self.names.len() - 1
                }
            }),
        }
    }

    fn factor(&mut self) -> Result<(usize, u64)> {
        let name = match self.peek() {
            Some(Tok::Ident(n)) => n.clone(),
            _ => return self.err("expected a variable"),
        };
        let idx = self.var_index(&name)?;
        self.at += 1;
        let mut exp = 1;
        if self.peek() == Some(&Tok::Caret) {
            self.at += 1;
            match self.peek() {
                Some(Tok::Nat(d)) => {
                    let d = d.clone();
                    exp = self.nat_exact(&d)?;
                    self.at += 1;
                }
                _ => return self.err("expected an exponent after `^`"),
            }
        }
        Ok((idx, exp))
    }

    fn term(&mut self) -> Result<RawTerm> {
        let mut coeff = 1;
        let mut factors = Vec::new();
        match self.peek() {
            Some(Tok::Nat(d)) => {
                let d = d.clone();
                coeff = self.nat_mod(&d);
                self.at += 1;
                match self.peek() {
                    Some(Tok::Star) => {
                        self.at += 1;
                        factors.push(self.factor()?);
                    }
                    Some(Tok::Ident(_)) => factors.push(self.factor()?),
                    _ => return Ok(RawTerm { coeff, factors }),
                }
            }
            Some(Tok::Ident(_)) => factors.push(self.factor()?),
            _ => return self.err("expected a term"),
        }
        while self.peek() == Some(&Tok::Star) {
            self.at += 1;
            factors.push(self.factor()?);
        }
        Ok(RawTerm { coeff, factors })
    }

    fn expr(&mut self) -> Result<Vec<RawTerm>> {
        let mut terms = Vec::new();
        let mut negate = false;
        match self.peek() {
            Some(Tok::Minus) => {
                negate = true;
                self.at += 1;
            }
            Some(Tok::Plus) => self.at += 1,
            _ => {}
        }
        loop {
            let mut t = self.term()?;
            if negate {
                t.coeff = (self.prime - t.coeff) % self.prime;
            }
            terms.push(t);
            match self.peek() {
                None => break,
                Some(Tok::Plus) => negate = false,
                Some(Tok::Minus) => negate = true,
                Some(_) => return self.err("expected `+`, `-` or end of input"),
            }
            self.at += 1;
        }
        Ok(terms)
    }
}

/// Parses a polynomial over F_p.
///
/// Variables are resolved against `ctx` when given (unknown names are an
/// error); otherwise the context is inferred in first-appearance order.
/// Integer coefficients are reduced mod p.
pub fn parse(text: &str, prime: Prime, ctx: Option<&Ctx>) -> Result<Polynomial> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(Error::Parse {
            pos: 0,
            msg: "empty polynomial".into(),
        });
    }
    let mut parser = Parser {
        toks,
        at: 0,
        end: text.len(),
        prime: prime.as_u64(),
        fixed: ctx,
        names: Vec::new(),
    };
    let raw = parser.expr()?;
    let ctx = match ctx {
        Some(c) => c.clone(),
        None => VarContext::new(parser.names.clone())?,
    };
    let arity = ctx.arity();
    let terms = raw.into_iter().map(|t| {
        let mut exps = vec![0u32; arity];
        for (i, e) in t.factors {
            exps[i] = u32::try_from(exps[i] as u64 + e).expect("exponent overflow");
        }
        (Monomial::new(exps), t.coeff)
    });
    Ok(Polynomial::from_terms(
        prime,
        ctx,
        terms.collect::<Vec<_>>(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn binomial_of_the_p97_example() {
        let g1 = parse("z^7*w^2 + z^5*w^6", p(97), None).unwrap();
        assert_eq!(g1.ctx().names(), &["z".to_string(), "w".to_string()]);
        assert_eq!(g1.len(), 2);
        assert_eq!(g1.terms()[0].0.exps(), &[5, 6]);
    }

    #[test]
    fn zero_and_cancellation() {
        assert!(parse("0", p(7), None).unwrap().is_zero());
        assert!(parse("5*x + 2*x", p(7), None).unwrap().is_zero());
        assert!(parse("x - x", p(3), None).unwrap().is_zero());
        assert_eq!(parse("-x", p(5), None).unwrap().to_string(), "4*x");
    }

    #[test]
    fn optional_star_and_repeated_factors() {
        let a = parse("2x y^2", p(5), None);
        assert!(a.is_err(), "juxtaposed variables need `*`");
        let a = parse("2x*y^2", p(5), None).unwrap();
        let b = parse("2 * x * y * y", p(5), None).unwrap();
        assert_eq!(a, b);
        assert_eq!(parse("12", p(5), None).unwrap().to_string(), "2");
    }

    #[test]
    fn errors_carry_positions() {
        match parse("x + * y", p(5), None) {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("{other:?}"),
        }
        match parse("x^", p(5), None) {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 2),
            other => panic!("{other:?}"),
        }
        let ctx = VarContext::new(["x"]).unwrap();
        match parse("x + y", p(5), Some(&ctx)) {
            Err(Error::Parse { pos, msg }) => {
                assert_eq!(pos, 4);
                assert!(msg.contains("unknown variable"));
            }
            other => panic!("{other:?}"),
        }
        assert!(parse("x $ y", p(5), None).is_err());
        assert!(parse("", p(5), None).is_err());
    }
}
