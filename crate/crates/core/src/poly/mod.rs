//! Sparse multivariate Laurent polynomials over any [`Coeff`] domain.

mod gcd;

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use thiserror::Error;

use crate::coeffs::{Coeff, CoeffError, Cyclotomic, Fp, ParamCoeff, Rational, TermCoeff, ToPrimeField};

pub use gcd::{div_exact, gcd, gcd_many};

/// Ordered variable names of an ambient polynomial ring.
pub type Vars = Arc<[String]>;

pub fn vars<S: AsRef<str>>(names: &[S]) -> Vars {
    names.iter().map(|s| s.as_ref().to_string()).collect::<Vec<_>>().into()
}

/// `x1, ..., xn`.
pub fn indexed_vars(prefix: &str, n: usize) -> Vars {
    (1..=n).map(|i| format!("{prefix}{i}")).collect::<Vec<_>>().into()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("variable sets differ: [{0}] vs [{1}]")]
    VarMismatch(String, String),
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("polynomial has negative exponents")]
    NegativeExponent,
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("variable index {0} out of range for {1} variables")]
    IndexOutOfRange(usize, usize),
    #[error("point has the wrong number of coordinates: {0} for {1} variables")]
    PointLength(usize, usize),
    #[error("evaluation at a pole (zero coordinate with negative exponent)")]
    Pole,
    #[error("degree in variable {var} is {degree}, expected 1")]
    NotLinear { var: String, degree: i32 },
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

/// Integer exponent vector, ordered graded-lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ExponentVec(pub Vec<i32>);

impl ExponentVec {
    pub fn zero(n: usize) -> Self {
        ExponentVec(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        ExponentVec(v)
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().map(|&e| e as i64).sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        ExponentVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        ExponentVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&e| e >= 0)
    }
}

impl Ord for ExponentVec {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for ExponentVec {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<Vec<i32>> for ExponentVec {
    fn from(v: Vec<i32>) -> Self {
        ExponentVec(v)
    }
}

/// Sparse Laurent polynomial; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LaurentPoly<C> {
    vars: Vars,
    terms: BTreeMap<ExponentVec, C>,
}

fn same_vars(a: &Vars, b: &Vars) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

fn add_into<C: Coeff>(terms: &mut BTreeMap<ExponentVec, C>, e: ExponentVec, c: C) {
    use std::collections::btree_map::Entry;
    match terms.entry(e) {
        Entry::Vacant(v) => {
            if !c.is_zero() {
                v.insert(c);
            }
        }
        Entry::Occupied(mut o) => {
            let s = o.get().plus(&c);
            if s.is_zero() {
                o.remove();
            } else {
                *o.get_mut() = s;
            }
        }
    }
}

impl<C: Coeff> LaurentPoly<C> {
    pub fn zero(vars: Vars) -> Self {
        LaurentPoly { vars, terms: BTreeMap::new() }
    }

    pub fn constant(vars: Vars, c: C) -> Self {
        let n = vars.len();
        Self::monomial(vars, ExponentVec::zero(n), c)
    }

    pub fn monomial(vars: Vars, exps: ExponentVec, c: C) -> Self {
        assert_eq!(exps.len(), vars.len(), "exponent vector length");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        LaurentPoly { vars, terms }
    }

    /// The variable `x_i` with the given unit coefficient.
    pub fn var(vars: Vars, i: usize, one: C) -> Self {
        let n = vars.len();
        Self::monomial(vars, ExponentVec::unit(n, i), one)
    }

    pub fn from_terms(vars: Vars, terms: impl IntoIterator<Item = (ExponentVec, C)>) -> Self {
        let mut map = BTreeMap::new();
        for (e, c) in terms {
            assert_eq!(e.len(), vars.len(), "exponent vector length");
            add_into(&mut map, e, c);
        }
        LaurentPoly { vars, terms: map }
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&ExponentVec, &C)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &ExponentVec) -> Option<&C> {
        self.terms.get(e)
    }

    pub fn leading_term(&self) -> Option<(&ExponentVec, &C)> {
        self.terms.iter().next_back()
    }

    /// Coefficients in term order.
    pub fn coefficients(&self) -> impl Iterator<Item = &C> {
        self.terms.values()
    }

    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(ExponentVec::is_nonnegative)
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn total_degree(&self) -> Option<i64> {
        self.terms.keys().map(ExponentVec::degree).max()
    }

    /// Common degree of all terms, if there is one.
    pub fn homogeneous_degree(&self) -> Option<i64> {
        let mut degs = self.terms.keys().map(ExponentVec::degree);
        let d = degs.next()?;
        degs.all(|e| e == d).then_some(d)
    }

    fn check_vars(&self, rhs: &Self) -> Result<(), PolyError> {
        if same_vars(&self.vars, &rhs.vars) {
            Ok(())
        } else {
            Err(PolyError::VarMismatch(self.vars.join(","), rhs.vars.join(",")))
        }
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self, PolyError> {
        self.check_vars(rhs)?;
        let mut terms = self.terms.clone();
        for (e, c) in &rhs.terms {
            add_into(&mut terms, e.clone(), c.clone());
        }
        Ok(LaurentPoly { vars: self.vars.clone(), terms })
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self, PolyError> {
        self.try_add(&rhs.neg_poly())
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self, PolyError> {
        self.check_vars(rhs)?;
        if self.is_zero() || rhs.is_zero() {
            return Ok(Self::zero(self.vars.clone()));
        }
        let mut acc: HashMap<Vec<i32>, C> = HashMap::with_capacity(self.terms.len() * rhs.terms.len());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let key: Vec<i32> = ea.0.iter().zip(&eb.0).map(|(a, b)| a + b).collect();
                let prod = ca.times(cb);
                match acc.get_mut(&key) {
                    Some(slot) => *slot = slot.plus(&prod),
                    None => {
                        acc.insert(key, prod);
                    }
                }
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).map(|(e, c)| (ExponentVec(e), c)).collect();
        Ok(LaurentPoly { vars: self.vars.clone(), terms })
    }

    pub fn neg_poly(&self) -> Self {
        LaurentPoly { vars: self.vars.clone(), terms: self.terms.iter().map(|(e, c)| (e.clone(), c.negated())).collect() }
    }

    pub fn scale(&self, s: &C) -> Self {
        let terms = self.terms.iter().map(|(e, c)| (e.clone(), c.times(s))).filter(|(_, c)| !c.is_zero()).collect();
        LaurentPoly { vars: self.vars.clone(), terms }
    }

    /// Multiplies by the Laurent monomial `x^m`.
    pub fn shift(&self, m: &ExponentVec) -> Self {
        let terms = self.terms.iter().map(|(e, c)| (e.add(m), c.clone())).collect();
        LaurentPoly { vars: self.vars.clone(), terms }
    }

    pub fn pow(&self, k: u32) -> Self {
        let one = match self.terms.values().next() {
            Some(c) => c.one_like(),
            None => return if k == 0 { panic!("0^0 on the zero polynomial") } else { self.clone() },
        };
        let mut acc = Self::constant(self.vars.clone(), one);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    fn check_index(&self, i: usize) -> Result<(), PolyError> {
        if i < self.nvars() {
            Ok(())
        } else {
            Err(PolyError::IndexOutOfRange(i, self.nvars()))
        }
    }

    /// Sets the chart variable to 1 and drops it from the ambient ring.
    pub fn dehomogenize(&self, chart: usize) -> Result<Self, PolyError> {
        self.check_index(chart)?;
        if self.homogeneous_degree().is_none() && !self.is_zero() {
            return Err(PolyError::NotHomogeneous);
        }
        let names: Vec<String> = self.vars.iter().enumerate().filter(|(i, _)| *i != chart).map(|(_, s)| s.clone()).collect();
        let vars: Vars = names.into();
        let terms = self.terms.iter().map(|(e, c)| {
            let mut v = e.0.clone();
            v.remove(chart);
            (ExponentVec(v), c.clone())
        });
        Ok(Self::from_terms(vars, terms))
    }

    /// Inserts a new variable `name` at position `chart` and homogenizes
    /// with the least power of it, so the result is not divisible by it.
    pub fn homogenize(&self, chart: usize, name: &str) -> Result<(Self, i64), PolyError> {
        if chart > self.nvars() {
            return Err(PolyError::IndexOutOfRange(chart, self.nvars() + 1));
        }
        if !self.is_polynomial() {
            return Err(PolyError::NegativeExponent);
        }
        let d = self.total_degree().ok_or(PolyError::ZeroPolynomial)?;
        let mut names: Vec<String> = self.vars.to_vec();
        names.insert(chart, name.to_string());
        let vars: Vars = names.into();
        let terms = self.terms.iter().map(|(e, c)| {
            let mut v = e.0.clone();
            v.insert(chart, (d - e.degree()) as i32);
            (ExponentVec(v), c.clone())
        });
        Ok((Self::from_terms(vars, terms), d))
    }

    pub fn partial_deriv(&self, i: usize) -> Result<Self, PolyError> {
        self.check_index(i)?;
        let terms = self.terms.iter().filter(|(e, _)| e.0[i] != 0).map(|(e, c)| {
            let mut v = e.0.clone();
            let k = v[i];
            v[i] -= 1;
            (ExponentVec(v), c.times_int(k as i64))
        });
        Ok(Self::from_terms(self.vars.clone(), terms))
    }

    /// Largest exponent of `x_i` over the terms.
    pub fn deg_in_var(&self, i: usize) -> Result<i32, PolyError> {
        self.check_index(i)?;
        self.terms.keys().map(|e| e.0[i]).max().ok_or(PolyError::ZeroPolynomial)
    }

    /// Writes `F = A*x_i + B` with `A`, `B` free of `x_i`.
    pub fn split_linear(&self, i: usize) -> Result<(Self, Self), PolyError> {
        let deg = self.deg_in_var(i)?;
        let lowest = self.terms.keys().map(|e| e.0[i]).min().unwrap_or(0);
        if deg != 1 || lowest < 0 {
            return Err(PolyError::NotLinear { var: self.vars[i].clone(), degree: deg });
        }
        let mut a = BTreeMap::new();
        let mut b = BTreeMap::new();
        for (e, c) in &self.terms {
            if e.0[i] == 1 {
                let mut v = e.0.clone();
                v[i] = 0;
                a.insert(ExponentVec(v), c.clone());
            } else {
                b.insert(e.clone(), c.clone());
            }
        }
        Ok((LaurentPoly { vars: self.vars.clone(), terms: a }, LaurentPoly { vars: self.vars.clone(), terms: b }))
    }

    /// Evaluates at a point of the same coefficient domain.
    pub fn eval(&self, point: &[C]) -> Result<C, PolyError> {
        if point.len() != self.nvars() {
            return Err(PolyError::PointLength(point.len(), self.nvars()));
        }
        let mut acc: Option<C> = None;
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (x, &k) in point.iter().zip(&e.0) {
                if k > 0 {
                    term = term.times(&x.pow_u(k as u64));
                } else if k < 0 {
                    let inv = x.inv().ok_or(PolyError::Pole)?;
                    term = term.times(&inv.pow_u((-k) as u64));
                }
            }
            acc = Some(match acc {
                Some(a) => a.plus(&term),
                None => term,
            });
        }
        match (acc, point.first()) {
            (Some(a), _) => Ok(a),
            (None, Some(x)) => Ok(x.zero_like()),
            (None, None) => Err(PolyError::ZeroPolynomial),
        }
    }

    /// Splits `p = x^m * p_hat` with `m` the componentwise minimum exponent.
    pub fn monomial_content(&self) -> Result<(ExponentVec, Self), PolyError> {
        let mut keys = self.terms.keys();
        let first = keys.next().ok_or(PolyError::ZeroPolynomial)?;
        let mut m = first.0.clone();
        for e in keys {
            for (mi, &ei) in m.iter_mut().zip(&e.0) {
                *mi = (*mi).min(ei);
            }
        }
        let m = ExponentVec(m);
        let terms = self.terms.iter().map(|(e, c)| (e.sub(&m), c.clone())).collect();
        Ok((m, LaurentPoly { vars: self.vars.clone(), terms }))
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> LaurentPoly<D> {
        LaurentPoly::from_terms(self.vars.clone(), self.terms.iter().map(|(e, c)| (e.clone(), f(c))))
    }

    pub fn try_map_coeffs<D: Coeff, E>(&self, f: impl Fn(&C) -> Result<D, E>) -> Result<LaurentPoly<D>, E> {
        let mut out = Vec::with_capacity(self.terms.len());
        for (e, c) in &self.terms {
            out.push((e.clone(), f(c)?));
        }
        Ok(LaurentPoly::from_terms(self.vars.clone(), out))
    }

    /// Same terms over renamed variables (same count).
    pub fn with_vars(&self, vars: Vars) -> Self {
        assert_eq!(vars.len(), self.nvars(), "renaming must keep the variable count");
        LaurentPoly { vars, terms: self.terms.clone() }
    }

    /// Moves the exponents into a new ambient ring: variable `i` becomes `target[i]`.
    pub fn relabel(&self, vars: Vars, target: &[usize]) -> Self {
        assert_eq!(target.len(), self.nvars());
        let n = vars.len();
        let terms = self.terms.iter().map(|(e, c)| {
            let mut v = vec![0; n];
            for (i, &k) in e.0.iter().enumerate() {
                v[target[i]] += k;
            }
            (ExponentVec(v), c.clone())
        });
        Self::from_terms(vars, terms)
    }

    /// Substitutes `x_i -> images[i]`; all images share one ambient ring.
    /// Negative exponents need monomial images with invertible coefficients.
    pub fn substitute(&self, images: &[LaurentPoly<C>]) -> Result<LaurentPoly<C>, PolyError> {
        if images.len() != self.nvars() {
            return Err(PolyError::PointLength(images.len(), self.nvars()));
        }
        let target = images.first().map(|p| p.vars.clone()).unwrap_or_else(|| self.vars.clone());
        for img in images {
            if !same_vars(&img.vars, &target) {
                return Err(PolyError::VarMismatch(img.vars.join(","), target.join(",")));
            }
        }
        let mut powers: Vec<HashMap<i32, LaurentPoly<C>>> = vec![HashMap::new(); images.len()];
        let mut acc = LaurentPoly::zero(target.clone());
        for (e, c) in &self.terms {
            let mut term = LaurentPoly::constant(target.clone(), c.clone());
            for (i, &k) in e.0.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                if !powers[i].contains_key(&k) {
                    let p = if k > 0 {
                        images[i].pow(k as u32)
                    } else {
                        images[i].inverse_monomial().ok_or(PolyError::NegativeExponent)?.pow((-k) as u32)
                    };
                    powers[i].insert(k, p);
                }
                term = &term * &powers[i][&k];
            }
            acc = &acc + &term;
        }
        Ok(acc)
    }

    /// Inverse of a monomial with a unit coefficient.
    pub fn inverse_monomial(&self) -> Option<Self> {
        if !self.is_monomial() {
            return None;
        }
        let (e, c) = self.terms.iter().next()?;
        let inv = c.inv()?;
        Some(Self::monomial(self.vars.clone(), ExponentVec(e.0.iter().map(|k| -k).collect()), inv))
    }

    /// True when every term is divisible by `x_i`.
    pub fn divisible_by_var(&self, i: usize) -> bool {
        !self.is_zero() && self.terms.keys().all(|e| e.0[i] > 0)
    }
}

impl<C: Coeff + ToPrimeField> LaurentPoly<C> {
    pub fn to_prime(&self, p: u64) -> Result<LaurentPoly<Fp>, CoeffError> {
        self.try_map_coeffs(|c| c.to_prime(p))
    }
}

impl LaurentPoly<Fp> {
    /// Evaluation at an `F_p` point given by residues.
    pub fn eval_fp(&self, point: &[Fp]) -> Result<Fp, PolyError> {
        self.eval(point)
    }
}

impl LaurentPoly<ParamCoeff> {
    /// Coefficients as cyclotomic numbers when no parameter occurs.
    pub fn to_cyclotomic(&self) -> Option<LaurentPoly<Cyclotomic>> {
        let mut out = Vec::with_capacity(self.terms.len());
        for (e, c) in &self.terms {
            out.push((e.clone(), c.as_constant()?));
        }
        Some(LaurentPoly::from_terms(self.vars.clone(), out))
    }

    /// Substitutes values for parameters; every parameter must be assigned.
    pub fn specialize(&self, values: &BTreeMap<String, Cyclotomic>) -> Result<LaurentPoly<Cyclotomic>, CoeffError> {
        self.try_map_coeffs(|c| c.specialize_cyclotomic(values))
    }

    /// Substitutes the assigned parameters and keeps the rest symbolic.
    pub fn partial_specialize(&self, values: &BTreeMap<String, Cyclotomic>) -> Result<LaurentPoly<ParamCoeff>, CoeffError> {
        self.try_map_coeffs(|c| c.partial_specialize(values))
    }

    pub fn parameters(&self) -> std::collections::BTreeSet<String> {
        self.terms.values().flat_map(|c| c.symbols()).collect()
    }
}

impl LaurentPoly<Cyclotomic> {
    pub fn to_rational(&self) -> Option<LaurentPoly<Rational>> {
        let mut out = Vec::with_capacity(self.terms.len());
        for (e, c) in &self.terms {
            out.push((e.clone(), c.as_rational()?.clone()));
        }
        Some(LaurentPoly::from_terms(self.vars.clone(), out))
    }

    pub fn to_param(&self) -> LaurentPoly<ParamCoeff> {
        self.map_coeffs(|c| ParamCoeff::constant(c.clone()))
    }
}

impl LaurentPoly<Rational> {
    pub fn to_cyclotomic(&self) -> LaurentPoly<Cyclotomic> {
        self.map_coeffs(|c| Cyclotomic::from_rational(c.clone()))
    }
}

macro_rules! poly_binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl<C: Coeff> $tr for &LaurentPoly<C> {
            type Output = LaurentPoly<C>;
            /// Panics when the variable sets differ; see the `try_*` methods.
            fn $m(self, rhs: &LaurentPoly<C>) -> LaurentPoly<C> {
                self.$checked(rhs).expect("polynomial variable mismatch")
            }
        }
    };
}

poly_binop!(Add, add, try_add);
poly_binop!(Sub, sub, try_sub);
poly_binop!(Mul, mul, try_mul);

impl<C: Coeff> Neg for &LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn neg(self) -> LaurentPoly<C> {
        self.neg_poly()
    }
}

fn fmt_monomial(vars: &[String], e: &ExponentVec) -> String {
    let mut parts = Vec::new();
    for (name, &k) in vars.iter().zip(&e.0) {
        match k {
            0 => {}
            1 => parts.push(name.clone()),
            _ => parts.push(format!("{name}^{k}")),
        }
    }
    parts.join("*")
}

impl<C: Coeff> fmt::Display for LaurentPoly<C> {
    /// Terms in descending graded-lex order, coefficients first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let mono = fmt_monomial(&self.vars, e);
            let (neg, body) = match (c.term_coeff(), mono.is_empty()) {
                (TermCoeff::One, true) => (false, "1".to_string()),
                (TermCoeff::One, false) => (false, mono),
                (TermCoeff::MinusOne, true) => (true, "1".to_string()),
                (TermCoeff::MinusOne, false) => (true, mono),
                (TermCoeff::Simple { negative, body }, true) => (negative, body),
                (TermCoeff::Simple { negative, body }, false) => (negative, format!("{body}*{mono}")),
                (TermCoeff::Compound(s), true) => (false, format!("({s})")),
                (TermCoeff::Compound(s), false) => (false, format!("({s})*{mono}")),
            };
            match (i == 0, neg) {
                (true, true) => write!(f, "-{body}")?,
                (true, false) => write!(f, "{body}")?,
                (false, true) => write!(f, " - {body}")?,
                (false, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type Q = LaurentPoly<Rational>;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    fn xs(n: usize) -> Vars {
        indexed_vars("x", n)
    }

    fn x(v: &Vars, i: usize) -> Q {
        Q::var(v.clone(), i, q(1))
    }

    #[test]
    fn arithmetic_examples() {
        let v = xs(2);
        let (x1, x2) = (x(&v, 0), x(&v, 1));
        let lhs = &(&x1 + &x2) * &(&x1 - &x2);
        let rhs = &(&x1 * &x1) - &(&x2 * &x2);
        assert_eq!(lhs, rhs);
        let inv = Q::monomial(v.clone(), ExponentVec(vec![-1, 0]), q(1));
        assert_eq!(&x1 * &inv, Q::constant(v.clone(), q(1)));

        let pv = xs(2);
        let t1x1 = LaurentPoly::monomial(pv.clone(), ExponentVec(vec![3, 0]), ParamCoeff::symbol("t1"));
        let x2p = LaurentPoly::var(pv.clone(), 1, ParamCoeff::from_int(1));
        assert_eq!((&t1x1 * &x2p).to_string(), "t1*x1^3*x2");
    }

    #[test]
    fn variable_mismatch_is_an_error() {
        let a = x(&xs(2), 0);
        let b = x(&xs(3), 0);
        assert!(matches!(a.try_add(&b), Err(PolyError::VarMismatch(_, _))));
    }

    #[test]
    fn dehomogenize_examples() {
        let v = xs(5);
        let fermat = (0..5).fold(Q::zero(v.clone()), |acc, i| &acc + &x(&v, i).pow(3));
        let f = fermat.dehomogenize(4).unwrap();
        assert_eq!(f.to_string(), "x1^3 + x2^3 + x3^3 + x4^3 + 1");
        let v2 = xs(2);
        let m = &x(&v2, 0).pow(2) * &x(&v2, 1);
        assert_eq!(m.dehomogenize(1).unwrap().to_string(), "x1^2");
        let bad = &x(&v2, 0) + &x(&v2, 1).pow(2);
        assert_eq!(bad.dehomogenize(1), Err(PolyError::NotHomogeneous));
    }

    #[test]
    fn homogenize_examples() {
        let v = xs(1);
        let p = &x(&v, 0) + &Q::constant(v.clone(), q(1));
        let (h, d) = p.homogenize(1, "x2").unwrap();
        assert_eq!((h.to_string(), d), ("x1 + x2".to_string(), 1));
        let p = &x(&v, 0).pow(2) + &x(&v, 0).pow(3);
        let (h, d) = p.homogenize(1, "x2").unwrap();
        assert_eq!((h.to_string(), d), ("x1^3 + x1^2*x2".to_string(), 3));
        assert!(!h.divisible_by_var(1));
        let laurent = Q::monomial(v.clone(), ExponentVec(vec![-1]), q(1));
        assert_eq!(laurent.homogenize(1, "x2"), Err(PolyError::NegativeExponent));
    }

    #[test]
    fn derivative_and_degree() {
        let v = xs(4);
        let x1c = x(&v, 0).pow(3);
        assert_eq!(x1c.partial_deriv(0).unwrap().to_string(), "3*x1^2");
        let t = LaurentPoly::monomial(v.clone(), ExponentVec(vec![2, 1, 0, 0]), ParamCoeff::symbol("t1"));
        assert_eq!(t.partial_deriv(1).unwrap().to_string(), "t1*x1^2");
        assert!((&x(&v, 0) * &x(&v, 1)).partial_deriv(2).unwrap().is_zero());

        let g = &(&x(&v, 0) * &x(&v, 1)) + &x(&v, 2).pow(2);
        assert_eq!(g.deg_in_var(3), Ok(0));
        assert_eq!(x1c.deg_in_var(0), Ok(3));
        assert_eq!(Q::zero(v).deg_in_var(0), Err(PolyError::ZeroPolynomial));
    }

    #[test]
    fn evaluation_examples() {
        let v = xs(5);
        let fermat = (0..5).fold(Q::zero(v.clone()), |acc, i| &acc + &x(&v, i).pow(3));
        assert_eq!(fermat.eval(&[q(1), q(-1), q(0), q(0), q(0)]).unwrap(), q(0));

        let v2 = xs(2);
        let ratio = Q::monomial(v2.clone(), ExponentVec(vec![1, -1]), q(1)).to_prime(7).unwrap();
        let pt = [Fp::new(2, 7).unwrap(), Fp::new(4, 7).unwrap()];
        assert_eq!(ratio.eval_fp(&pt).unwrap().value(), 4);
        let pole = [Fp::new(2, 7).unwrap(), Fp::new(0, 7).unwrap()];
        assert_eq!(ratio.eval_fp(&pole), Err(PolyError::Pole));

        let v1 = xs(1);
        let cube = x(&v1, 0).pow(3).to_prime(7).unwrap();
        assert_eq!(cube.eval_fp(&[Fp::new(2, 7).unwrap()]).unwrap().value(), 1);
    }

    #[test]
    fn monomial_content_examples() {
        let v = xs(2);
        let p = &(&x(&v, 0).pow(2) * &x(&v, 1)) + &(&x(&v, 0) * &x(&v, 1).pow(2));
        let (m, hat) = p.monomial_content().unwrap();
        assert_eq!(m, ExponentVec(vec![1, 1]));
        assert_eq!(hat.to_string(), "x1 + x2");

        let p = Q::from_terms(v.clone(), [(ExponentVec(vec![-1, 1]), q(1)), (ExponentVec(vec![0, 1]), q(1))]);
        let (m, hat) = p.monomial_content().unwrap();
        assert_eq!(m, ExponentVec(vec![-1, 1]));
        assert_eq!(hat.to_string(), "x1 + 1");

        let u = indexed_vars("u", 2);
        let p = LaurentPoly::from_terms(
            u.clone(),
            [
                (ExponentVec(vec![2, -1]), ParamCoeff::symbol("t1")),
                (ExponentVec(vec![1, 1]), ParamCoeff::symbol("t2")),
            ],
        );
        let (m, hat) = p.monomial_content().unwrap();
        assert_eq!(m, ExponentVec(vec![1, -1]));
        assert_eq!(hat.to_string(), "t2*u2^2 + t1*u1");
        assert_eq!(Q::zero(v).monomial_content(), Err(PolyError::ZeroPolynomial));
    }

    #[test]
    fn substitution() {
        let v = xs(2);
        let f = &(&x(&v, 0) * &x(&v, 1)) + &x(&v, 1).pow(2);
        let w = xs(3);
        let imgs = [&x(&w, 0) + &x(&w, 2), x(&w, 1)];
        let g = f.substitute(&imgs).unwrap();
        assert_eq!(g.to_string(), "x1*x2 + x2^2 + x2*x3");
    }
}
