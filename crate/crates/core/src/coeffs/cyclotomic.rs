use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::rc::Rc;

use super::{root_embed, Coeff, CoeffError, Fp, Rational, TermCoeff, ToPrimeField};

thread_local! {
    static PHI_CACHE: RefCell<HashMap<u32, Rc<Vec<i64>>>> = RefCell::new(HashMap::new());
}

pub fn euler_phi(mut n: u32) -> u32 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

fn phi_cached(e: u32) -> Rc<Vec<i64>> {
    if let Some(hit) = PHI_CACHE.with(|c| c.borrow().get(&e).cloned()) {
        return hit;
    }
    // x^e - 1 divided by every Phi_d with d | e, d < e.
    let mut num = vec![0i64; e as usize + 1];
    num[0] = -1;
    num[e as usize] = 1;
    for d in 1..e {
        if e % d == 0 {
            num = exact_div_monic(&num, &phi_cached(d));
        }
    }
    let rc = Rc::new(num);
    PHI_CACHE.with(|c| c.borrow_mut().insert(e, rc.clone()));
    rc
}

fn exact_div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dn = den.len() - 1;
    let qn = rem.len() - 1 - dn;
    let mut quo = vec![0i64; qn + 1];
    for k in (0..=qn).rev() {
        let c = rem[k + dn];
        quo[k] = c;
        for (j, &dj) in den.iter().enumerate() {
            rem[k + j] -= c * dj;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quo
}

/// Coefficients of the `e`-th cyclotomic polynomial, lowest degree first.
pub fn cyclotomic_polynomial(e: u32) -> Vec<i64> {
    assert!(e > 0, "cyclotomic order must be positive");
    phi_cached(e).as_ref().clone()
}

/// Element of `Q(zeta_e)` in the power basis `1, zeta, ..., zeta^(phi(e)-1)`.
///
/// Rational elements are stored with order 1, so equality is syntactic and
/// a rational combines with an element of any order.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Cyclotomic {
    order: u32,
    coeffs: Vec<Rational>,
}

fn reduce_mod_phi(e: u32, mut v: Vec<Rational>) -> Vec<Rational> {
    let phi = phi_cached(e);
    let deg = phi.len() - 1;
    if v.len() > deg {
        for k in (deg..v.len()).rev() {
            if v[k].is_zero() {
                continue;
            }
            let c = std::mem::take(&mut v[k]);
            for (j, &pj) in phi.iter().enumerate().take(deg) {
                if pj != 0 {
                    let idx = k - deg + j;
                    v[idx] = &v[idx] - &(&c * &Rational::from_int(pj));
                }
            }
        }
        v.truncate(deg);
    }
    v.resize(deg, Rational::zero());
    v
}

impl Cyclotomic {
    pub fn from_rational(r: Rational) -> Self {
        Cyclotomic { order: 1, coeffs: vec![r] }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_int(n))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// Element given by a polynomial in `zeta_e` of any length.
    pub fn from_coeffs(e: u32, coeffs: Vec<Rational>) -> Self {
        assert!(e > 0, "cyclotomic order must be positive");
        Cyclotomic { order: e, coeffs: reduce_mod_phi(e, coeffs) }.canonical()
    }

    /// `zeta_e^k`.
    pub fn zeta_pow(e: u32, k: i64) -> Self {
        let k = k.rem_euclid(e as i64) as usize;
        let mut v = vec![Rational::zero(); k + 1];
        v[k] = Rational::one();
        Self::from_coeffs(e, v)
    }

    pub fn zeta(e: u32) -> Self {
        Self::zeta_pow(e, 1)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_rational(&self) -> bool {
        self.order == 1
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        if self.order == 1 {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    fn canonical(mut self) -> Self {
        if self.order != 1 && self.coeffs.iter().skip(1).all(Rational::is_zero) {
            self.coeffs.truncate(1);
            self.order = 1;
        }
        self
    }

    fn common_order(&self, rhs: &Self) -> Result<u32, CoeffError> {
        match (self.order, rhs.order) {
            (a, b) if a == b => Ok(a),
            (1, b) => Ok(b),
            (a, 1) => Ok(a),
            (a, b) => Err(CoeffError::OrderMismatch(a, b)),
        }
    }

    fn lifted(&self, e: u32) -> Vec<Rational> {
        let mut v = self.coeffs.clone();
        v.resize(euler_phi(e) as usize, Rational::zero());
        v
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self, CoeffError> {
        let e = self.common_order(rhs)?;
        let v = self.lifted(e).iter().zip(rhs.lifted(e).iter()).map(|(a, b)| a + b).collect();
        Ok(Cyclotomic { order: e, coeffs: v }.canonical())
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self, CoeffError> {
        self.checked_add(&-rhs)
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self, CoeffError> {
        let e = self.common_order(rhs)?;
        if self.order == 1 || rhs.order == 1 {
            let (scalar, other) = if self.order == 1 { (&self.coeffs[0], rhs) } else { (&rhs.coeffs[0], self) };
            let v = other.coeffs.iter().map(|c| c * scalar).collect();
            return Ok(Cyclotomic { order: other.order, coeffs: v }.canonical());
        }
        let mut prod = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] = &prod[i + j] + &(a * b);
                }
            }
        }
        Ok(Cyclotomic { order: e, coeffs: reduce_mod_phi(e, prod) }.canonical())
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, CoeffError> {
        self.common_order(rhs)?;
        self.checked_mul(&rhs.inverse()?)
    }

    pub fn inverse(&self) -> Result<Self, CoeffError> {
        if self.is_zero() {
            return Err(CoeffError::DivisionByZero);
        }
        if self.order == 1 {
            return Ok(Self::from_rational(self.coeffs[0].recip()?));
        }
        // Extended Euclid in Q[x] against Phi_e: s*a + t*Phi = 1.
        let phi: Vec<Rational> = phi_cached(self.order).iter().map(|&c| Rational::from_int(c)).collect();
        let (g, s) = ext_gcd(trimmed(self.coeffs.clone()), phi);
        debug_assert_eq!(g.len(), 1);
        let scale = g[0].recip()?;
        let s = s.into_iter().map(|c| &c * &scale).collect();
        Ok(Self::from_coeffs(self.order, s))
    }

    pub fn pow(&self, k: i64) -> Result<Self, CoeffError> {
        if k < 0 {
            Ok(self.inverse()?.pow_u((-k) as u64))
        } else {
            Ok(self.pow_u(k as u64))
        }
    }
}

fn trimmed(mut v: Vec<Rational>) -> Vec<Rational> {
    while v.len() > 1 && v.last().is_some_and(Rational::is_zero) {
        v.pop();
    }
    v
}

fn is_zero_poly(v: &[Rational]) -> bool {
    v.iter().all(Rational::is_zero)
}

fn divrem(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let b = trimmed(b.to_vec());
    let mut r = trimmed(a.to_vec());
    let lead_inv = b.last().unwrap().recip().expect("nonzero divisor");
    if r.len() < b.len() {
        return (vec![Rational::zero()], r);
    }
    let mut q = vec![Rational::zero(); r.len() - b.len() + 1];
    while r.len() >= b.len() && !is_zero_poly(&r) {
        let shift = r.len() - b.len();
        let c = r.last().unwrap() * &lead_inv;
        for (j, bj) in b.iter().enumerate() {
            r[shift + j] = &r[shift + j] - &(&c * bj);
        }
        q[shift] = c;
        r.pop();
        r = trimmed(r);
        if r.is_empty() {
            r.push(Rational::zero());
        }
    }
    (q, r)
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    out
}

fn poly_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_default();
            let y = b.get(i).cloned().unwrap_or_default();
            &x - &y
        })
        .collect()
}

/// Returns `(g, s)` with `s*a = g (mod b)`.
fn ext_gcd(a: Vec<Rational>, b: Vec<Rational>) -> (Vec<Rational>, Vec<Rational>) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (vec![Rational::one()], vec![Rational::zero()]);
    while !is_zero_poly(&r1) {
        let (q, r) = divrem(&r0, &r1);
        let s2 = trimmed(poly_sub(&s0, &poly_mul(&q, &s1)));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
    }
    (trimmed(r0), s0)
}

/// The operation selector for [`Cyclotomic::arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl Cyclotomic {
    pub fn arith(a: &Self, b: &Self, op: ArithOp) -> Result<Self, CoeffError> {
        match op {
            ArithOp::Add => a.checked_add(b),
            ArithOp::Sub => a.checked_sub(b),
            ArithOp::Mul => a.checked_mul(b),
            ArithOp::Div => a.checked_div(b),
        }
    }
}

impl From<Rational> for Cyclotomic {
    fn from(r: Rational) -> Self {
        Cyclotomic::from_rational(r)
    }
}

impl From<i64> for Cyclotomic {
    fn from(n: i64) -> Self {
        Cyclotomic::from_int(n)
    }
}

impl Add for &Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, rhs: &Cyclotomic) -> Cyclotomic {
        self.checked_add(rhs).expect("cyclotomic order mismatch")
    }
}

impl Sub for &Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, rhs: &Cyclotomic) -> Cyclotomic {
        self.checked_sub(rhs).expect("cyclotomic order mismatch")
    }
}

impl Mul for &Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, rhs: &Cyclotomic) -> Cyclotomic {
        self.checked_mul(rhs).expect("cyclotomic order mismatch")
    }
}

impl Neg for &Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        Cyclotomic { order: self.order, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

fn zeta_token(k: usize) -> String {
    match k {
        1 => "zeta".to_string(),
        _ => format!("zeta^{k}"),
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.order == 1 {
            return write!(f, "{}", self.coeffs[0]);
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            let body = match (k, mag.is_one()) {
                (0, _) => mag.to_string(),
                (_, true) => zeta_token(k),
                (_, false) => format!("{}*{}", mag, zeta_token(k)),
            };
            match (first, neg) {
                (true, true) => write!(f, "-{body}")?,
                (true, false) => write!(f, "{body}")?,
                (false, true) => write!(f, " - {body}")?,
                (false, false) => write!(f, " + {body}")?,
            }
            first = false;
        }
        Ok(())
    }
}

impl Coeff for Cyclotomic {
    const IS_FIELD: bool = true;

    fn is_zero(&self) -> bool {
        self.order == 1 && self.coeffs[0].is_zero()
    }
    fn is_one(&self) -> bool {
        self.order == 1 && self.coeffs[0].is_one()
    }
    fn zero_like(&self) -> Self {
        Cyclotomic::zero()
    }
    fn one_like(&self) -> Self {
        Cyclotomic::one()
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn negated(&self) -> Self {
        -self
    }
    fn times_int(&self, n: i64) -> Self {
        self * &Cyclotomic::from_int(n)
    }
    fn inv(&self) -> Option<Self> {
        self.inverse().ok()
    }
    fn term_coeff(&self) -> TermCoeff {
        let nonzero = self.coeffs.iter().filter(|c| !c.is_zero()).count();
        if nonzero <= 1 {
            super::simple_term(self.to_string())
        } else {
            TermCoeff::Compound(self.to_string())
        }
    }
}

impl ToPrimeField for Cyclotomic {
    fn to_prime(&self, p: u64) -> Result<Fp, CoeffError> {
        if self.order == 1 {
            return self.coeffs[0].to_prime(p);
        }
        let z = root_embed(self.order, p)?;
        let mut acc = z.zero_like();
        let mut zk = z.one_like();
        for c in &self.coeffs {
            acc = acc + c.to_prime(p)? * zk;
            zk = zk * z;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Cyclotomic {
        Cyclotomic::from_int(n)
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(3), vec![1, 1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
        for e in 1..40 {
            assert_eq!(cyclotomic_polynomial(e).len() as u32 - 1, euler_phi(e));
        }
    }

    #[test]
    fn zeta3_examples() {
        let z = Cyclotomic::zeta(3);
        let z2 = Cyclotomic::zeta_pow(3, 2);
        assert_eq!(&z * &z2, q(1));
        assert_eq!(&z + &z2, q(-1));
        let a = &q(1) + &z;
        let b = &q(1) + &z2;
        assert_eq!(&a * &b, q(1));
        assert_eq!(Cyclotomic::zeta_pow(3, 3), q(1));
        assert_eq!(Cyclotomic::zeta(2), q(-1));
    }

    #[test]
    fn inverses() {
        for e in [3u32, 4, 5, 7, 8, 9, 12] {
            let a = Cyclotomic::from_coeffs(e, (1..=euler_phi(e) as i64).map(Rational::from_int).collect());
            let inv = a.inverse().unwrap();
            assert_eq!(&a * &inv, q(1), "order {e}");
        }
        assert_eq!(q(0).inverse(), Err(CoeffError::DivisionByZero));
    }

    #[test]
    fn order_mismatch_and_rational_lift() {
        let z3 = Cyclotomic::zeta(3);
        let z5 = Cyclotomic::zeta(5);
        assert_eq!(Cyclotomic::arith(&z3, &z5, ArithOp::Add), Err(CoeffError::OrderMismatch(3, 5)));
        assert_eq!(Cyclotomic::arith(&z3, &q(0), ArithOp::Div), Err(CoeffError::DivisionByZero));
        let sum = Cyclotomic::arith(&z5, &q(2), ArithOp::Add).unwrap();
        assert_eq!(sum.order(), 5);
    }

    #[test]
    fn display() {
        let z = Cyclotomic::zeta(3);
        assert_eq!(z.to_string(), "zeta");
        assert_eq!((-&z).to_string(), "-zeta");
        assert_eq!(Cyclotomic::zeta_pow(3, 2).to_string(), "-1 - zeta");
        assert_eq!(Cyclotomic::zeta_pow(5, 4).to_string(), "-1 - zeta - zeta^2 - zeta^3");
    }

    #[test]
    fn reduction_into_prime_field() {
        // zeta_3 -> 2 in F_7, so zeta^2 -> 4.
        assert_eq!(Cyclotomic::zeta(3).to_prime(7).unwrap().value(), 2);
        assert_eq!(Cyclotomic::zeta_pow(3, 2).to_prime(7).unwrap().value(), 4);
    }
}
