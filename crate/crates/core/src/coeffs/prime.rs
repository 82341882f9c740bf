use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::{Coeff, CoeffError, TermCoeff, ToPrimeField};

/// Element of the prime field `F_p`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Fp {
    p: u64,
    v: u64,
}

/// Deterministic Miller-Rabin, exact for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % small == 0 {
            return n == small;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

impl Fp {
    pub fn new(value: u64, p: u64) -> Result<Self, CoeffError> {
        if !is_prime(p) {
            return Err(CoeffError::NotPrime(p));
        }
        Ok(Fp { p, v: value % p })
    }

    /// Skips the primality check; `p` must already be known prime.
    pub(crate) fn new_unchecked(value: u64, p: u64) -> Self {
        Fp { p, v: value % p }
    }

    pub fn from_i64(value: i64, p: u64) -> Result<Self, CoeffError> {
        let r = value.rem_euclid(p as i64) as u64;
        Fp::new(r, p)
    }

    pub fn value(&self) -> u64 {
        self.v
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn pow(&self, e: u64) -> Fp {
        Fp { p: self.p, v: pow_mod(self.v, e, self.p) }
    }

    pub fn inverse(&self) -> Result<Fp, CoeffError> {
        if self.v == 0 {
            return Err(CoeffError::DivisionByZero);
        }
        Ok(self.pow(self.p - 2))
    }

    fn check(&self, rhs: &Fp) -> Result<(), CoeffError> {
        if self.p != rhs.p {
            Err(CoeffError::ModulusMismatch(self.p, rhs.p))
        } else {
            Ok(())
        }
    }

    pub fn checked_add(&self, rhs: &Fp) -> Result<Fp, CoeffError> {
        self.check(rhs)?;
        Ok(Fp { p: self.p, v: (self.v + rhs.v) % self.p })
    }

    pub fn checked_mul(&self, rhs: &Fp) -> Result<Fp, CoeffError> {
        self.check(rhs)?;
        Ok(Fp { p: self.p, v: mul_mod(self.v, rhs.v, self.p) })
    }

    pub fn checked_div(&self, rhs: &Fp) -> Result<Fp, CoeffError> {
        self.check(rhs)?;
        self.checked_mul(&rhs.inverse()?)
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self) -> Option<u64> {
        if self.v == 0 {
            return None;
        }
        let n = self.p - 1;
        let mut best = n;
        for d in divisors(n) {
            if d < best && self.pow(d).v == 1 {
                best = d;
            }
        }
        Some(best)
    }
}

fn divisors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            if d * d != n {
                out.push(n / d);
            }
        }
        d += 1;
    }
    out.sort_unstable();
    out
}

/// Smallest element of `F_p^*` whose multiplicative order is exactly `e`.
pub fn root_embed(e: u32, p: u64) -> Result<Fp, CoeffError> {
    if !is_prime(p) {
        return Err(CoeffError::NotPrime(p));
    }
    let e64 = e as u64;
    if e == 0 || (p - 1) % e64 != 0 {
        return Err(CoeffError::NoRootOfUnity { e, p });
    }
    (1..p)
        .map(|v| Fp::new_unchecked(v, p))
        .find(|x| x.order() == Some(e64))
        .ok_or(CoeffError::NoRootOfUnity { e, p })
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.v)
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, rhs: Fp) -> Fp {
        self.checked_add(&rhs).expect("F_p modulus mismatch")
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, rhs: Fp) -> Fp {
        self + (-rhs)
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, rhs: Fp) -> Fp {
        self.checked_mul(&rhs).expect("F_p modulus mismatch")
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp { p: self.p, v: (self.p - self.v) % self.p }
    }
}

impl Coeff for Fp {
    const IS_FIELD: bool = true;

    fn is_zero(&self) -> bool {
        self.v == 0
    }
    fn is_one(&self) -> bool {
        self.v == 1
    }
    fn zero_like(&self) -> Self {
        Fp { p: self.p, v: 0 }
    }
    fn one_like(&self) -> Self {
        Fp { p: self.p, v: 1 }
    }
    fn plus(&self, rhs: &Self) -> Self {
        *self + *rhs
    }
    fn minus(&self, rhs: &Self) -> Self {
        *self - *rhs
    }
    fn times(&self, rhs: &Self) -> Self {
        *self * *rhs
    }
    fn negated(&self) -> Self {
        -*self
    }
    fn times_int(&self, n: i64) -> Self {
        *self * Fp::new_unchecked(n.rem_euclid(self.p as i64) as u64, self.p)
    }
    fn inv(&self) -> Option<Self> {
        self.inverse().ok()
    }
    fn term_coeff(&self) -> TermCoeff {
        super::simple_term(self.v.to_string())
    }
}

impl ToPrimeField for Fp {
    fn to_prime(&self, p: u64) -> Result<Fp, CoeffError> {
        if self.p == p {
            Ok(*self)
        } else {
            Err(CoeffError::ModulusMismatch(self.p, p))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality() {
        let primes: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]);
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2,3,5,7
    }

    #[test]
    fn root_embed_examples() {
        assert_eq!(root_embed(3, 7).unwrap().value(), 2);
        assert_eq!(root_embed(1, 5).unwrap().value(), 1);
        assert_eq!(root_embed(5, 11).unwrap().value(), 3);
        assert_eq!(root_embed(3, 5), Err(CoeffError::NoRootOfUnity { e: 3, p: 5 }));
        assert_eq!(root_embed(3, 9), Err(CoeffError::NotPrime(9)));
    }

    #[test]
    fn root_embed_has_exact_order() {
        for p in [7u64, 11, 13, 31, 37, 61] {
            for e in 1..=(p - 1) as u32 {
                if (p - 1) % e as u64 != 0 {
                    continue;
                }
                let z = root_embed(e, p).unwrap();
                assert_eq!(z.pow(e as u64).value(), 1);
                for k in 1..e {
                    assert_ne!(z.pow(k as u64).value(), 1, "e={e} p={p} k={k}");
                }
            }
        }
    }

    #[test]
    fn mismatched_moduli() {
        let a = Fp::new(1, 5).unwrap();
        let b = Fp::new(1, 7).unwrap();
        assert_eq!(a.checked_add(&b), Err(CoeffError::ModulusMismatch(5, 7)));
        assert_eq!(Fp::new(0, 7).unwrap().inverse(), Err(CoeffError::DivisionByZero));
    }
}
