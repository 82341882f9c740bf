//! Polynomial expressions: `+ - * /`, `^` with integer (possibly negative)
//! exponents, parentheses, rationals, parameters and `zeta`.
//!
//! Division and negative powers are only allowed for monomials with an
//! invertible coefficient.

use std::collections::{BTreeSet, HashMap};

use num_traits::ToPrimitive;

use crate::coeffs::{Coeff, Cyclotomic, ParamCoeff, Rational};
use crate::poly::{LaurentPoly, Vars};

use super::lexer::{tokenize, ParseError, Tok, Token};

pub type Poly = LaurentPoly<ParamCoeff>;

/// Names visible inside an expression.
#[derive(Debug, Clone)]
pub struct ExprContext {
    pub vars: Vars,
    pub params: BTreeSet<String>,
    /// Order of `zeta`, when a group has been declared.
    pub order: Option<u32>,
    pub lets: HashMap<String, Poly>,
}

impl ExprContext {
    pub fn new(vars: Vars) -> Self {
        ExprContext { vars, params: BTreeSet::new(), order: None, lets: HashMap::new() }
    }

    pub fn with_params<S: AsRef<str>>(mut self, params: &[S]) -> Self {
        self.params.extend(params.iter().map(|s| s.as_ref().to_string()));
        self
    }

    pub fn with_order(mut self, e: u32) -> Self {
        self.order = Some(e);
        self
    }

    fn constant(&self, c: ParamCoeff) -> Poly {
        LaurentPoly::constant(self.vars.clone(), c)
    }
}

pub(crate) struct ExprParser<'a> {
    pub toks: &'a [Token],
    pub pos: usize,
    pub line: usize,
    pub ctx: &'a ExprContext,
}

const TERM_START: &[&str] = &["number", "variable", "parameter", "`zeta`", "`(`", "`-`"];

impl<'a> ExprParser<'a> {
    pub fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    pub fn col(&self) -> usize {
        self.toks[self.pos].col
    }

    pub fn err(&self, msg: impl Into<String>, expected: &[&str]) -> ParseError {
        ParseError::new(self.line, self.col(), msg, expected)
    }

    pub fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expr(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.unary()?;
            } else if *self.peek() == Tok::Sym('/') {
                let col = self.col();
                self.pos += 1;
                let d = self.unary()?;
                let inv = d.inverse_monomial().ok_or_else(|| {
                    ParseError::new(self.line, col, "can only divide by a nonzero constant or monomial", &[])
                })?;
                acc = &acc * &inv;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Poly, ParseError> {
        if self.eat('-') {
            return Ok(self.unary()?.neg_poly());
        }
        self.power()
    }

    fn power(&mut self) -> Result<Poly, ParseError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let neg = self.eat('-');
        let col = self.col();
        let k = match self.peek().clone() {
            Tok::Int(k) => {
                self.pos += 1;
                k.to_u32().ok_or_else(|| ParseError::new(self.line, col, "exponent too large", &[]))?
            }
            other => return Err(self.err(format!("unexpected {other} after `^`"), &["integer exponent"])),
        };
        if !neg {
            return Ok(base.pow(k));
        }
        let inv = base
            .inverse_monomial()
            .ok_or_else(|| ParseError::new(self.line, col, "negative powers need a monomial base", &[]))?;
        Ok(inv.pow(k))
    }

    fn atom(&mut self) -> Result<Poly, ParseError> {
        let col = self.col();
        match self.peek().clone() {
            Tok::Int(n) => {
                self.pos += 1;
                let c = Cyclotomic::from_rational(Rational::from_int(n));
                Ok(self.ctx.constant(ParamCoeff::constant(c)))
            }
            Tok::Sym('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(self.err(format!("unexpected {}", self.peek()), &["`)`", "operator"]));
                }
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.pos += 1;
                if let Some(i) = self.ctx.vars.iter().position(|v| *v == name) {
                    return Ok(LaurentPoly::var(self.ctx.vars.clone(), i, ParamCoeff::from_int(1)));
                }
                if self.ctx.params.contains(&name) {
                    return Ok(self.ctx.constant(ParamCoeff::symbol(&name)));
                }
                if let Some(p) = self.ctx.lets.get(&name) {
                    if p.vars() != &self.ctx.vars {
                        return Err(ParseError::new(self.line, col, format!("`{name}` is defined over other variables"), &[]));
                    }
                    return Ok(p.clone());
                }
                if name == "zeta" {
                    return match self.ctx.order {
                        Some(e) => Ok(self.ctx.constant(ParamCoeff::constant(Cyclotomic::zeta(e)))),
                        None => Err(ParseError::new(self.line, col, "`zeta` needs a declared group order", &["group e=<order>"])),
                    };
                }
                Err(ParseError::new(self.line, col, format!("unknown identifier `{name}`"), &["declared variable", "parameter", "let name"]))
            }
            other => Err(self.err(format!("unexpected {other}"), TERM_START)),
        }
    }
}

/// Parses a whole expression occupying `text`.
pub fn parse_expr(ctx: &ExprContext, text: &str) -> Result<Poly, ParseError> {
    let toks = tokenize(1, text)?;
    let mut p = ExprParser { toks: &toks, pos: 0, line: 1, ctx };
    let out = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.err(format!("unexpected {}", p.peek()), &["operator", "end of line"]));
    }
    Ok(out)
}

/// Shorthand for tests and scenarios: variables and parameters by name,
/// `zeta` of order `e` when `e > 1`.
pub fn parse_poly(vars: &Vars, params: &[&str], e: u32, text: &str) -> Result<Poly, ParseError> {
    let mut ctx = ExprContext::new(vars.clone()).with_params(params);
    if e > 1 {
        ctx = ctx.with_order(e);
    }
    parse_expr(&ctx, text)
}

/// Parses an expression free of parameters into cyclotomic coefficients.
pub fn parse_cyclotomic(vars: &Vars, e: u32, text: &str) -> Result<LaurentPoly<Cyclotomic>, ParseError> {
    let p = parse_poly(vars, &[], e, text)?;
    Ok(p.to_cyclotomic().expect("no parameters declared"))
}

/// Parses an expression with rational coefficients.
pub fn parse_rational(vars: &Vars, text: &str) -> Result<LaurentPoly<Rational>, ParseError> {
    let p = parse_cyclotomic(vars, 1, text)?;
    p.to_rational().ok_or_else(|| ParseError::new(1, 1, "coefficients are not rational", &[]))
}

/// Renders a polynomial so that [`parse_expr`] reads it back unchanged.
pub fn render<C: Coeff>(p: &LaurentPoly<C>) -> String {
    p.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::indexed_vars;

    #[test]
    fn parses_and_renders() {
        let v = indexed_vars("x", 5);
        let f = parse_poly(&v, &["t1", "t2"], 3, "t1*x1^3 + t2*x2^3 + x1*x2*x3").unwrap();
        assert_eq!(f.to_string(), "t1*x1^3 + x1*x2*x3 + t2*x2^3");
        let z = parse_poly(&v, &[], 3, "zeta*x1").unwrap();
        assert_eq!(z.to_string(), "zeta*x1");
        let back = parse_poly(&v, &["t1", "t2"], 3, &f.to_string()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn laurent_and_division() {
        let v = indexed_vars("x", 2);
        let f = parse_poly(&v, &[], 1, "x1^2/x2 + x1*x2^-1 - 3/2").unwrap();
        assert_eq!(f.to_string(), "x1^2*x2^-1 + x1*x2^-1 - 3/2");
        assert_eq!(parse_poly(&v, &[], 1, &f.to_string()).unwrap(), f);
        let err = parse_poly(&v, &[], 1, "x1/(x1 + x2)").unwrap_err();
        assert_eq!(err.column, 3);
    }

    #[test]
    fn cyclotomic_round_trip() {
        let v = indexed_vars("x", 2);
        let f = parse_poly(&v, &["t1"], 3, "(zeta^2 + 2)*x1 - zeta*t1*x2 + (1 + zeta)*t1*x1").unwrap();
        let back = parse_poly(&v, &["t1"], 3, &f.to_string()).unwrap();
        assert_eq!(back, f, "{f}");
    }

    #[test]
    fn diagnostics() {
        let v = indexed_vars("x", 2);
        let e = parse_poly(&v, &[], 1, "x1 + y").unwrap_err();
        assert_eq!(e.column, 6);
        assert!(e.expected.iter().any(|s| s.contains("variable")));
        let e = parse_poly(&v, &[], 1, "zeta").unwrap_err();
        assert!(e.message.contains("zeta"));
        let e = parse_poly(&v, &[], 1, "x1 +").unwrap_err();
        assert_eq!(e.column, 5);
        let e = parse_poly(&v, &[], 1, "(x1").unwrap_err();
        assert!(e.expected.contains(&"`)`".to_string()));
    }
}
