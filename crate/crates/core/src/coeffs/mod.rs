//! Exact coefficient domains.
//!
//! Every polynomial in the crate is generic over [`Coeff`]. The concrete
//! domains are arbitrary-precision rationals, cyclotomic fields `Q(zeta_e)`,
//! prime fields `F_p`, and polynomials in named parameters with cyclotomic
//! coefficients (used for the symbolic families).

mod cyclotomic;
mod param;
mod prime;
mod rational;

use std::fmt;
use std::hash::Hash;

use thiserror::Error;

pub use cyclotomic::{cyclotomic_polynomial, euler_phi, ArithOp, Cyclotomic};
pub use param::{natural_cmp, FieldValue, ParamCoeff, ParamMono};
pub use prime::{is_prime, root_embed, Fp};
pub use rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoeffError {
    #[error("cyclotomic order mismatch: {0} vs {1}")]
    OrderMismatch(u32, u32),
    #[error("prime modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{e} does not divide {p} - 1; F_{p} has no primitive {e}-th root of unity")]
    NoRootOfUnity { e: u32, p: u64 },
    #[error("parameter `{0}` has no assigned value")]
    MissingSymbol(String),
    #[error("assignment mixes values from different fields")]
    MixedFields,
    #[error("denominator divisible by {0}")]
    BadReduction(u64),
}

/// How a coefficient prints in front of a monomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TermCoeff {
    One,
    MinusOne,
    /// A single signed token such as `3`, `-2/5`, `t1^2` or `zeta`.
    Simple { negative: bool, body: String },
    /// A sum that needs parentheses when multiplied.
    Compound(String),
}

/// Ring operations shared by every coefficient domain.
///
/// Binary operations panic when the operands live in incompatible
/// domains (different cyclotomic orders or prime moduli); the concrete
/// types offer checked variants returning [`CoeffError`].
pub trait Coeff: Clone + PartialEq + Eq + Hash + fmt::Debug + fmt::Display + Send + Sync {
    /// True when every nonzero element is invertible via [`Coeff::inv`].
    const IS_FIELD: bool;

    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn plus(&self, rhs: &Self) -> Self;
    fn minus(&self, rhs: &Self) -> Self;
    fn times(&self, rhs: &Self) -> Self;
    fn negated(&self) -> Self;
    fn times_int(&self, n: i64) -> Self;
    /// Multiplicative inverse, when the element is a unit.
    fn inv(&self) -> Option<Self>;
    fn term_coeff(&self) -> TermCoeff;

    fn pow_u(&self, mut k: u64) -> Self {
        let mut base = self.clone();
        let mut acc = self.one_like();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.times(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.times(&base);
            }
        }
        acc
    }
}

/// Reduction of exact coefficients into a prime field.
pub trait ToPrimeField {
    fn to_prime(&self, p: u64) -> Result<Fp, CoeffError>;
}

pub(crate) fn simple_term(s: String) -> TermCoeff {
    match s.strip_prefix('-') {
        Some(rest) if rest == "1" => TermCoeff::MinusOne,
        Some(rest) => TermCoeff::Simple { negative: true, body: rest.to_string() },
        None if s == "1" => TermCoeff::One,
        None => TermCoeff::Simple { negative: false, body: s },
    }
}
