//! Multivariate gcd and exact division over field coefficients.
//!
//! Recursive primitive Euclid: content and primitive part are taken with
//! respect to the lowest-index variable that occurs, and pseudo-remainders
//! are made primitive at every step to keep coefficient growth in check.

use std::collections::BTreeMap;

use super::{ExponentVec, LaurentPoly};
use crate::coeffs::Coeff;

/// `a / b` when `b` divides `a` exactly as polynomials, else `None`.
pub fn div_exact<C: Coeff>(a: &LaurentPoly<C>, b: &LaurentPoly<C>) -> Option<LaurentPoly<C>> {
    let (lb_e, lb_c) = b.leading_term()?;
    let lb_inv = lb_c.inv()?;
    let mut rem = a.clone();
    let mut quot = LaurentPoly::zero(a.vars.clone());
    while let Some((le, lc)) = rem.leading_term() {
        let m = le.sub(lb_e);
        if !m.is_nonnegative() {
            return None;
        }
        let c = lc.times(&lb_inv);
        let t = LaurentPoly::monomial(a.vars.clone(), m, c);
        rem = &rem - &(&t * b);
        quot = &quot + &t;
    }
    Some(quot)
}

fn main_var<C>(p: &LaurentPoly<C>) -> Option<usize> {
    (0..p.vars.len()).find(|&i| p.terms.keys().any(|e| e.0[i] != 0))
}

/// Coefficients of `p` viewed as a univariate polynomial in `x_v`.
fn coeffs_in<C: Coeff>(p: &LaurentPoly<C>, v: usize) -> BTreeMap<i32, LaurentPoly<C>> {
    let mut out: BTreeMap<i32, BTreeMap<ExponentVec, C>> = BTreeMap::new();
    for (e, c) in &p.terms {
        let mut rest = e.0.clone();
        let k = rest[v];
        rest[v] = 0;
        out.entry(k).or_default().insert(ExponentVec(rest), c.clone());
    }
    out.into_iter().map(|(k, terms)| (k, LaurentPoly { vars: p.vars.clone(), terms })).collect()
}

fn deg_in<C>(p: &LaurentPoly<C>, v: usize) -> i32 {
    p.terms.keys().map(|e| e.0[v]).max().unwrap_or(-1)
}

fn monic<C: Coeff>(p: LaurentPoly<C>) -> LaurentPoly<C> {
    match p.leading_term().and_then(|(_, c)| c.inv()) {
        Some(inv) => p.scale(&inv),
        None => p,
    }
}

fn content_in<C: Coeff>(p: &LaurentPoly<C>, v: usize) -> LaurentPoly<C> {
    let mut g: Option<LaurentPoly<C>> = None;
    for c in coeffs_in(p, v).into_values() {
        g = Some(match g {
            None => monic(c),
            Some(g) => gcd(&g, &c),
        });
        if g.as_ref().is_some_and(|g| g.total_degree() == Some(0)) {
            break;
        }
    }
    g.unwrap_or_else(|| p.clone())
}

fn primitive_in<C: Coeff>(p: &LaurentPoly<C>, v: usize) -> LaurentPoly<C> {
    let c = content_in(p, v);
    div_exact(p, &c).expect("content divides")
}

fn prem<C: Coeff>(a: &LaurentPoly<C>, b: &LaurentPoly<C>, v: usize) -> LaurentPoly<C> {
    let n = deg_in(b, v);
    let lc_b = coeffs_in(b, v).remove(&n).expect("leading coefficient");
    let mut r = a.clone();
    loop {
        let m = deg_in(&r, v);
        if r.is_zero() || m < n {
            return r;
        }
        let lc_r = coeffs_in(&r, v).remove(&m).expect("leading coefficient");
        let mut shift = vec![0; r.vars.len()];
        shift[v] = m - n;
        let t = lc_r.shift(&ExponentVec(shift));
        r = &(&lc_b * &r) - &(&t * b);
    }
}

/// Greatest common divisor of two polynomials, normalized so that the
/// graded-lex leading coefficient is 1. Coefficients must form a field.
pub fn gcd<C: Coeff>(a: &LaurentPoly<C>, b: &LaurentPoly<C>) -> LaurentPoly<C> {
    assert!(C::IS_FIELD, "multivariate gcd needs field coefficients");
    assert!(a.is_polynomial() && b.is_polynomial(), "gcd of Laurent polynomials");
    if a.is_zero() {
        return monic(b.clone());
    }
    if b.is_zero() {
        return monic(a.clone());
    }
    let one = || LaurentPoly::constant(a.vars.clone(), a.terms.values().next().unwrap().one_like());
    let v = match (main_var(a), main_var(b)) {
        (None, _) | (_, None) => return one(),
        (Some(x), Some(y)) => x.min(y),
    };
    if deg_in(a, v) == 0 {
        return gcd(a, &content_in(b, v));
    }
    if deg_in(b, v) == 0 {
        return gcd(&content_in(a, v), b);
    }
    let c = gcd(&content_in(a, v), &content_in(b, v));
    let (mut p, mut q) = (primitive_in(a, v), primitive_in(b, v));
    if deg_in(&p, v) < deg_in(&q, v) {
        std::mem::swap(&mut p, &mut q);
    }
    while !q.is_zero() {
        let r = prem(&p, &q, v);
        p = q;
        if r.is_zero() {
            break;
        }
        if deg_in(&r, v) == 0 {
            // A nonzero remainder free of x_v: the primitive parts are coprime.
            p = one();
            break;
        }
        q = primitive_in(&r, v);
    }
    let g = if deg_in(&p, v) == 0 { one() } else { primitive_in(&p, v) };
    monic(&c * &g)
}

pub fn gcd_many<'a, C: Coeff + 'a>(polys: impl IntoIterator<Item = &'a LaurentPoly<C>>) -> Option<LaurentPoly<C>> {
    let mut acc: Option<LaurentPoly<C>> = None;
    for p in polys {
        acc = Some(match acc {
            None => monic(p.clone()),
            Some(g) => gcd(&g, p),
        });
    }
    acc
}
