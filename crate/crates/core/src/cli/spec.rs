//! Line-oriented problem description.
//!
//! ```text
//! vars x1 x2 x3 x4 x5
//! params t1 t2
//! group e=3 gen [1,2,0,0,0]
//! poly F = t1*x1^3 + t2*x2^3 + x1*x2*x3 + x3^3 + x4^3 + x5^3
//! chart x5
//! basis [1,1,0,0; -1,2,0,0; 0,0,1,0; 0,0,0,1]
//! ```
//!
//! Other declarations: `gen [..]` adds a generator, `subgroup gen [..]`
//! declares a subgroup to quotient first, `set t = <constant>` fixes a
//! parameter for numeric commands, `let name = <expr>` defines a reusable
//! expression, `source y1 y2 ..` and `map [c1; c2; ..]` describe a rational
//! map into the declared coordinates, `step chart x2 [basis [..]]` adds a
//! chain step and `prime p ..` overrides the verification primes.

use std::collections::HashSet;
use std::fmt::Write as _;

use num_traits::ToPrimitive;

use crate::coeffs::{is_prime, Cyclotomic, ParamCoeff};
use crate::poly::{LaurentPoly, Vars};

use super::expr::{render, ExprContext, ExprParser, Poly};
use super::lexer::{tokenize, ParseError, Tok, Token};

#[derive(Debug, Clone, PartialEq)]
pub struct StepSpec {
    pub chart: usize,
    pub basis: Option<Vec<Vec<i64>>>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ProblemSpec {
    pub vars: Vars,
    /// Source coordinates of `map`; empty means the map is a self-map.
    pub source: Vars,
    pub params: Vec<String>,
    /// Order of `zeta` and of every generator.
    pub order: Option<u32>,
    pub gens: Vec<Vec<i64>>,
    pub subgroup: Vec<Vec<i64>>,
    pub sets: Vec<(String, Cyclotomic)>,
    pub lets: Vec<(String, Poly)>,
    pub polys: Vec<(String, Poly)>,
    pub map: Option<Vec<Poly>>,
    pub chart: Option<usize>,
    pub basis: Option<Vec<Vec<i64>>>,
    pub steps: Vec<StepSpec>,
    pub primes: Vec<u64>,
}

impl ProblemSpec {
    pub fn poly(&self, name: &str) -> Option<&Poly> {
        self.polys.iter().find(|(n, _)| n == name).map(|(_, p)| p)
    }

    /// The polynomial commands act on: the first one declared.
    pub fn target(&self) -> Option<(&str, &Poly)> {
        self.polys.first().map(|(n, p)| (n.as_str(), p))
    }

    pub fn map_source(&self) -> &Vars {
        if self.source.is_empty() {
            &self.vars
        } else {
            &self.source
        }
    }
}

struct Parser {
    spec: ProblemSpec,
    names: HashSet<String>,
    ctx: ExprContext,
    source_ctx: Option<ExprContext>,
}

struct Line<'a> {
    toks: &'a [Token],
    pos: usize,
    no: usize,
}

impl<'a> Line<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn col(&self) -> usize {
        self.toks[self.pos].col
    }

    fn err(&self, msg: impl Into<String>, expected: &[&str]) -> ParseError {
        ParseError::new(self.no, self.col(), msg, expected)
    }

    fn at_end(&self) -> bool {
        *self.peek() == Tok::End
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.pos += 1;
                Ok(s)
            }
            other => Err(self.err(format!("unexpected {other}"), &[what])),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        let col = self.col();
        let got = self.ident(&format!("`{kw}`"))?;
        if got != kw {
            return Err(ParseError::new(self.no, col, format!("unexpected `{got}`"), &[&format!("`{kw}`")]));
        }
        Ok(())
    }

    fn sym(&mut self, c: char) -> Result<(), ParseError> {
        if *self.peek() == Tok::Sym(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("unexpected {}", self.peek()), &[&format!("`{c}`")]))
        }
    }

    fn eat(&mut self, c: char) -> bool {
        let hit = *self.peek() == Tok::Sym(c);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn int(&mut self) -> Result<i64, ParseError> {
        let neg = self.eat('-');
        let col = self.col();
        match self.peek().clone() {
            Tok::Int(n) => {
                self.pos += 1;
                let v = n.to_i64().ok_or_else(|| ParseError::new(self.no, col, "integer too large", &[]))?;
                Ok(if neg { -v } else { v })
            }
            other => Err(self.err(format!("unexpected {other}"), &["integer"])),
        }
    }

    /// `[a,b,c]`
    fn row(&mut self) -> Result<Vec<i64>, ParseError> {
        self.sym('[')?;
        let r = self.row_body()?;
        self.sym(']')?;
        Ok(r)
    }

    fn row_body(&mut self) -> Result<Vec<i64>, ParseError> {
        let mut r = vec![self.int()?];
        while self.eat(',') {
            r.push(self.int()?);
        }
        Ok(r)
    }

    /// `[a,b; c,d]`
    fn matrix(&mut self) -> Result<Vec<Vec<i64>>, ParseError> {
        self.sym('[')?;
        let mut rows = vec![self.row_body()?];
        while self.eat(';') {
            rows.push(self.row_body()?);
        }
        self.sym(']')?;
        Ok(rows)
    }

    fn end(&self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.err(format!("unexpected {}", self.peek()), &["end of line"]))
        }
    }

    fn expr(&mut self, ctx: &ExprContext) -> Result<Poly, ParseError> {
        let mut p = ExprParser { toks: self.toks, pos: self.pos, line: self.no, ctx };
        let out = p.expr()?;
        self.pos = p.pos;
        Ok(out)
    }
}

const KEYWORDS: &[&str] =
    &["vars", "params", "group", "gen", "subgroup", "set", "let", "poly", "source", "map", "chart", "basis", "step", "prime"];

impl Parser {
    fn declare(&mut self, line: &Line, name: &str) -> Result<(), ParseError> {
        if name == "zeta" || KEYWORDS.contains(&name) {
            return Err(line.err(format!("`{name}` is reserved"), &["fresh name"]));
        }
        if !self.names.insert(name.to_string()) {
            return Err(line.err(format!("`{name}` is already declared"), &["fresh name"]));
        }
        Ok(())
    }

    fn need_vars(&self, line: &Line) -> Result<(), ParseError> {
        if self.spec.vars.is_empty() {
            return Err(line.err("no variables declared yet", &["`vars` line first"]));
        }
        Ok(())
    }

    fn var_index(&self, line: &mut Line) -> Result<usize, ParseError> {
        let col = line.col();
        let name = line.ident("variable")?;
        self.spec
            .vars
            .iter()
            .position(|v| *v == name)
            .ok_or_else(|| ParseError::new(line.no, col, format!("unknown variable `{name}`"), &["declared variable"]))
    }

    fn generator(&mut self, line: &mut Line, sub: bool) -> Result<(), ParseError> {
        self.need_vars(line)?;
        if self.spec.order.is_none() {
            return Err(line.err("generators need a group order", &["group e=<order>"]));
        }
        let col = line.col();
        let row = line.row()?;
        if row.len() != self.spec.vars.len() {
            return Err(ParseError::new(
                line.no,
                col,
                format!("generator has {} weights but {} variables are declared", row.len(), self.spec.vars.len()),
                &[&format!("{} weights", self.spec.vars.len())],
            ));
        }
        if sub { &mut self.spec.subgroup } else { &mut self.spec.gens }.push(row);
        Ok(())
    }

    fn basis(&self, line: &mut Line) -> Result<Vec<Vec<i64>>, ParseError> {
        let col = line.col();
        let m = line.matrix()?;
        let k = self.spec.vars.len() - 1;
        if m.len() != k || m.iter().any(|r| r.len() != k) {
            return Err(ParseError::new(line.no, col, format!("basis must be {k} rows of {k} integers"), &[&format!("{k}x{k} matrix")]));
        }
        Ok(m)
    }

    fn line(&mut self, no: usize, text: &str) -> Result<(), ParseError> {
        let toks = tokenize(no, text)?;
        let mut line = Line { toks: &toks, pos: 0, no };
        if line.at_end() {
            return Ok(());
        }
        let col = line.col();
        let kw = line.ident("declaration keyword")?;
        match kw.as_str() {
            "vars" => {
                if !self.spec.vars.is_empty() {
                    return Err(ParseError::new(no, col, "variables already declared", &[]));
                }
                let mut vars = Vec::new();
                while !line.at_end() {
                    let v = line.ident("variable name")?;
                    self.declare(&line, &v)?;
                    vars.push(v);
                }
                if vars.len() < 2 {
                    return Err(line.err("need at least two variables", &["variable name"]));
                }
                self.spec.vars = vars.into();
                self.ctx.vars = self.spec.vars.clone();
            }
            "source" => {
                if !self.spec.source.is_empty() {
                    return Err(ParseError::new(no, col, "source variables already declared", &[]));
                }
                let mut vars = Vec::new();
                while !line.at_end() {
                    let v = line.ident("variable name")?;
                    self.declare(&line, &v)?;
                    vars.push(v);
                }
                if vars.is_empty() {
                    return Err(line.err("no source variables", &["variable name"]));
                }
                self.spec.source = vars.into();
                let mut ctx = self.ctx.clone();
                ctx.vars = self.spec.source.clone();
                ctx.lets.clear();
                self.source_ctx = Some(ctx);
            }
            "params" => {
                while !line.at_end() {
                    let v = line.ident("parameter name")?;
                    self.declare(&line, &v)?;
                    self.ctx.params.insert(v.clone());
                    if let Some(s) = &mut self.source_ctx {
                        s.params.insert(v.clone());
                    }
                    self.spec.params.push(v);
                }
            }
            "group" => {
                if self.spec.order.is_some() {
                    return Err(ParseError::new(no, col, "group already declared", &[]));
                }
                line.keyword("e")?;
                line.sym('=')?;
                let ecol = line.col();
                let e = line.int()?;
                let e = u32::try_from(e).ok().filter(|&e| e >= 1).ok_or_else(|| ParseError::new(no, ecol, "group order must be a positive integer", &[]))?;
                self.spec.order = Some(e);
                self.ctx.order = Some(e);
                if let Some(s) = &mut self.source_ctx {
                    s.order = Some(e);
                }
                while !line.at_end() {
                    line.keyword("gen")?;
                    self.generator(&mut line, false)?;
                }
            }
            "gen" => self.generator(&mut line, false)?,
            "subgroup" => loop {
                line.keyword("gen")?;
                self.generator(&mut line, true)?;
                if line.at_end() {
                    break;
                }
            },
            "set" => {
                let pcol = line.col();
                let name = line.ident("parameter")?;
                if !self.ctx.params.contains(&name) {
                    return Err(ParseError::new(no, pcol, format!("`{name}` is not a declared parameter"), &["parameter"]));
                }
                if self.spec.sets.iter().any(|(n, _)| *n == name) {
                    return Err(ParseError::new(no, pcol, format!("`{name}` is already set"), &[]));
                }
                line.sym('=')?;
                let vcol = line.col();
                let value = line.expr(&ExprContext { vars: Vars::default(), params: Default::default(), lets: Default::default(), ..self.ctx.clone() })?;
                let c = value
                    .to_cyclotomic()
                    .and_then(|p| constant_value(&p))
                    .ok_or_else(|| ParseError::new(no, vcol, "parameter values must be numeric constants", &["number", "`zeta`"]))?;
                self.spec.sets.push((name, c));
            }
            "let" => {
                self.need_vars(&line)?;
                let name = line.ident("name")?;
                self.declare(&line, &name)?;
                line.sym('=')?;
                let start = line.pos;
                let value = match line.expr(&self.ctx) {
                    Ok(v) => v,
                    Err(e) => match &self.source_ctx {
                        Some(sctx) => {
                            line.pos = start;
                            line.expr(sctx).map_err(|_| e)?
                        }
                        None => return Err(e),
                    },
                };
                line.end()?;
                let ctx = if value.vars() == &self.spec.vars { &mut self.ctx } else { self.source_ctx.as_mut().expect("parsed over source") };
                ctx.lets.insert(name.clone(), value.clone());
                self.spec.lets.push((name, value));
            }
            "poly" => {
                self.need_vars(&line)?;
                let name = line.ident("polynomial name")?;
                self.declare(&line, &name)?;
                line.sym('=')?;
                let value = line.expr(&self.ctx)?;
                line.end()?;
                self.ctx.lets.insert(name.clone(), value.clone());
                self.spec.polys.push((name, value));
            }
            "map" => {
                self.need_vars(&line)?;
                if self.spec.map.is_some() {
                    return Err(ParseError::new(no, col, "map already declared", &[]));
                }
                let ctx = self.source_ctx.as_ref().unwrap_or(&self.ctx).clone();
                let mcol = line.col();
                line.sym('[')?;
                let mut comps = vec![line.expr(&ctx)?];
                while line.eat(';') {
                    comps.push(line.expr(&ctx)?);
                }
                line.sym(']')?;
                if comps.len() != self.spec.vars.len() {
                    return Err(ParseError::new(
                        no,
                        mcol,
                        format!("map has {} components but {} variables are declared", comps.len(), self.spec.vars.len()),
                        &[&format!("{} components", self.spec.vars.len())],
                    ));
                }
                self.spec.map = Some(comps);
            }
            "chart" => {
                self.need_vars(&line)?;
                if self.spec.chart.is_some() {
                    return Err(ParseError::new(no, col, "chart already declared", &[]));
                }
                self.spec.chart = Some(self.var_index(&mut line)?);
            }
            "basis" => {
                self.need_vars(&line)?;
                if self.spec.basis.is_some() {
                    return Err(ParseError::new(no, col, "basis already declared", &[]));
                }
                self.spec.basis = Some(self.basis(&mut line)?);
            }
            "step" => {
                self.need_vars(&line)?;
                line.keyword("chart")?;
                let chart = self.var_index(&mut line)?;
                let basis = if line.at_end() {
                    None
                } else {
                    line.keyword("basis")?;
                    Some(self.basis(&mut line)?)
                };
                self.spec.steps.push(StepSpec { chart, basis });
            }
            "prime" => {
                loop {
                    let pcol = line.col();
                    let p = line.int()?;
                    let p = u64::try_from(p).ok().filter(|&p| is_prime(p)).ok_or_else(|| ParseError::new(no, pcol, format!("{p} is not a prime"), &["prime"]))?;
                    self.spec.primes.push(p);
                    if line.at_end() {
                        break;
                    }
                }
            }
            _ => return Err(ParseError::new(no, col, format!("unknown declaration `{kw}`"), KEYWORDS)),
        }
        line.end()
    }
}

fn constant_value(p: &LaurentPoly<Cyclotomic>) -> Option<Cyclotomic> {
    match p.num_terms() {
        0 => Some(Cyclotomic::zero()),
        1 => {
            let (e, c) = p.terms().next()?;
            e.0.iter().all(|&k| k == 0).then(|| c.clone())
        }
        _ => None,
    }
}

/// Parses and validates a problem description.
pub fn parse_input(text: &str) -> Result<ProblemSpec, ParseError> {
    let mut p = Parser { spec: ProblemSpec::default(), names: HashSet::new(), ctx: ExprContext::new(Vars::default()), source_ctx: None };
    for (i, line) in text.lines().enumerate() {
        p.line(i + 1, line)?;
    }
    let last = text.lines().count().max(1);
    if p.spec.vars.is_empty() {
        return Err(ParseError::new(last, 1, "no variables declared", &["`vars` line"]));
    }
    Ok(p.spec)
}

fn render_row(r: &[i64]) -> String {
    r.iter().map(i64::to_string).collect::<Vec<_>>().join(",")
}

fn render_matrix(m: &[Vec<i64>]) -> String {
    format!("[{}]", m.iter().map(|r| render_row(r)).collect::<Vec<_>>().join("; "))
}

/// Canonical text that [`parse_input`] reads back to an equal spec.
pub fn render_spec(s: &ProblemSpec) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "vars {}", s.vars.join(" "));
    if !s.source.is_empty() {
        let _ = writeln!(out, "source {}", s.source.join(" "));
    }
    if !s.params.is_empty() {
        let _ = writeln!(out, "params {}", s.params.join(" "));
    }
    if let Some(e) = s.order {
        let _ = write!(out, "group e={e}");
        for g in &s.gens {
            let _ = write!(out, " gen [{}]", render_row(g));
        }
        out.push('\n');
    }
    if !s.subgroup.is_empty() {
        let gens: Vec<String> = s.subgroup.iter().map(|g| format!("gen [{}]", render_row(g))).collect();
        let _ = writeln!(out, "subgroup {}", gens.join(" "));
    }
    for (name, c) in &s.sets {
        let _ = writeln!(out, "set {name} = {}", render(&LaurentPoly::constant(Vars::default(), ParamCoeff::constant(c.clone()))));
    }
    for (name, p) in &s.lets {
        let _ = writeln!(out, "let {name} = {}", render(p));
    }
    for (name, p) in &s.polys {
        let _ = writeln!(out, "poly {name} = {}", render(p));
    }
    if let Some(m) = &s.map {
        let comps: Vec<String> = m.iter().map(render).collect();
        let _ = writeln!(out, "map [{}]", comps.join("; "));
    }
    if let Some(c) = s.chart {
        let _ = writeln!(out, "chart {}", s.vars[c]);
    }
    if let Some(b) = &s.basis {
        let _ = writeln!(out, "basis {}", render_matrix(b));
    }
    for st in &s.steps {
        let _ = write!(out, "step chart {}", s.vars[st.chart]);
        if let Some(b) = &st.basis {
            let _ = write!(out, " basis {}", render_matrix(b));
        }
        out.push('\n');
    }
    if !s.primes.is_empty() {
        let ps: Vec<String> = s.primes.iter().map(u64::to_string).collect();
        let _ = writeln!(out, "prime {}", ps.join(" "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const EX1: &str = "vars x1 x2 x3 x4 x5\nparams t1 t2\ngroup e=3 gen [1,2,0,0,0]\npoly F = t1*x1^3 + t2*x2^3 + x1*x2*x3\nchart x5";

    #[test]
    fn reads_cyclic_example() {
        let s = parse_input(EX1).unwrap();
        assert_eq!(s.vars.len(), 5);
        assert_eq!(s.gens, vec![vec![1, 2, 0, 0, 0]]);
        assert_eq!(s.order, Some(3));
        assert_eq!(s.chart, Some(4));
        assert_eq!(s.target().unwrap().1.num_terms(), 3);
    }

    #[test]
    fn zeta_is_the_declared_root() {
        let s = parse_input("vars x1 x2\ngroup e=3\npoly F = zeta*x1").unwrap();
        let c = s.poly("F").unwrap().terms().next().unwrap().1.clone();
        assert_eq!(c, ParamCoeff::constant(Cyclotomic::zeta(3)));
    }

    #[test]
    fn generator_length_is_checked_at_its_line() {
        let e = parse_input("vars x1 x2 x3 x4 x5\ngroup e=3\ngen [1,2,0]").unwrap_err();
        assert_eq!(e.line, 3);
        assert!(e.message.contains("3 weights but 5"), "{e}");
        assert_eq!(e.expected, vec!["5 weights"]);
    }

    #[test]
    fn diagnostics_carry_positions() {
        let e = parse_input("vars x1 x2\npoly F = x1 + y").unwrap_err();
        assert_eq!((e.line, e.column), (2, 15));
        let e = parse_input("vars x1 x2\nprime 8").unwrap_err();
        assert_eq!((e.line, e.column), (2, 7));
        let e = parse_input("vars x1 x2\nfrobnicate").unwrap_err();
        assert!(e.expected.iter().any(|s| s == "poly"));
        let e = parse_input("vars x1 x2 x3\nbasis [1,0; 0]").unwrap_err();
        assert!(e.message.contains("2 rows"), "{e}");
        let e = parse_input("vars x1 x2\nlet x1 = 3").unwrap_err();
        assert!(e.message.contains("already declared"));
    }

    #[test]
    fn render_round_trips() {
        let text = "vars x1 x2 x3 x4 x5\nsource y1 y2 y3 y4\nparams t1 t2\ngroup e=3 gen [1,2,0,0,0] gen [0,1,2,2,0]\nsubgroup gen [0,1,2,2,0]\nset t1 = 1 + zeta\nset t2 = -3/2\nlet l = x3 + x4\nlet m = y1 - zeta*y3\npoly F = t1*x1^3 + t2*x2^3 + l*x1*x2 + x5^3\nmap [m*y1; y2; y3; y4; m]\nchart x5\nbasis [1,1,0,0; -1,2,0,0; 0,0,1,0; 0,0,0,1]\nstep chart x2\nstep chart x1 basis [1,0,0,0; 0,1,0,1; 0,0,1,0; 0,0,0,1]\nprime 7 13\n";
        let s = parse_input(text).unwrap();
        assert_eq!(s.lets[1].1.vars(), &s.source);
        let again = parse_input(&render_spec(&s)).unwrap();
        assert_eq!(again, s, "{}", render_spec(&s));
    }
}
