//! Diagonal actions of finite abelian groups on projective space.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coeffs::Coeff;
use crate::lattice::{congruence_kernel, IntMatrix, LatticeBasis, LatticeError};
use crate::poly::{ExponentVec, LaurentPoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActionError {
    #[error("weight row has {got} entries, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("generator order must be positive")]
    ZeroOrder,
    #[error("no coordinate has trivial weight under every generator")]
    NoTrivialCoordinate,
    #[error("chart index {0} out of range")]
    BadChart(usize),
    #[error("the invariant lattice of the larger group is not contained in that of the subgroup")]
    NotSubgroup,
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("degree {0} is below 2")]
    DegreeTooSmall(i64),
    #[error("term {monomial} has nontrivial character {character:?}")]
    NotInvariant { monomial: String, character: Vec<u32> },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// `x_j -> zeta_order^{weights[j]} x_j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Generator {
    pub order: u32,
    pub weights: Vec<u32>,
}

impl Generator {
    pub fn new(order: u32, weights: &[i64]) -> Result<Self, ActionError> {
        if order == 0 {
            return Err(ActionError::ZeroOrder);
        }
        let weights = weights.iter().map(|w| w.rem_euclid(order as i64) as u32).collect();
        Ok(Generator { order, weights })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DiagonalAction {
    n_vars: usize,
    generators: Vec<Generator>,
}

/// Result of an invariance test, with the first term whose character is
/// nontrivial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Invariance {
    pub invariant: bool,
    pub offender: Option<(ExponentVec, Vec<u32>)>,
}

impl DiagonalAction {
    pub fn new(n_vars: usize, generators: Vec<Generator>) -> Result<Self, ActionError> {
        for g in &generators {
            if g.order == 0 {
                return Err(ActionError::ZeroOrder);
            }
            if g.weights.len() != n_vars {
                return Err(ActionError::LengthMismatch { expected: n_vars, got: g.weights.len() });
            }
        }
        let generators: Vec<Generator> = generators
            .into_iter()
            .map(|g| Generator { weights: g.weights.iter().map(|w| w % g.order).collect(), order: g.order })
            .collect();
        let a = DiagonalAction { n_vars, generators };
        if a.trivial_coordinates().is_empty() {
            return Err(ActionError::NoTrivialCoordinate);
        }
        Ok(a)
    }

    /// Convenience constructor from `(order, weights)` pairs.
    pub fn from_weights(n_vars: usize, gens: &[(u32, &[i64])]) -> Result<Self, ActionError> {
        let gens = gens.iter().map(|(o, w)| Generator::new(*o, w)).collect::<Result<Vec<_>, _>>()?;
        Self::new(n_vars, gens)
    }

    pub fn trivial(n_vars: usize) -> Self {
        DiagonalAction { n_vars, generators: Vec::new() }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn orders(&self) -> Vec<u64> {
        self.generators.iter().map(|g| g.order as u64).collect()
    }

    /// Least common multiple of the generator orders.
    pub fn exponent(&self) -> u32 {
        self.generators.iter().fold(1u32, |acc, g| acc.lcm(&g.order))
    }

    /// Coordinates fixed by every generator.
    pub fn trivial_coordinates(&self) -> Vec<usize> {
        (0..self.n_vars).filter(|&j| self.generators.iter().all(|g| g.weights[j] == 0)).collect()
    }

    /// The last coordinate with trivial weight.
    pub fn default_chart(&self) -> usize {
        *self.trivial_coordinates().last().expect("constructor guarantees a trivial coordinate")
    }

    /// Characters of a monomial, one residue per generator.
    pub fn character(&self, m: &[i32]) -> Result<Vec<u32>, ActionError> {
        if m.len() != self.n_vars {
            return Err(ActionError::LengthMismatch { expected: self.n_vars, got: m.len() });
        }
        Ok(self
            .generators
            .iter()
            .map(|g| {
                let s: i64 = g.weights.iter().zip(m).map(|(&w, &a)| w as i64 * a as i64).sum();
                s.rem_euclid(g.order as i64) as u32
            })
            .collect())
    }

    /// Character of an exponent vector on the affine chart `x_chart = 1`,
    /// i.e. of the degree-zero monomial obtained by restoring `x_chart`.
    pub fn character_at(&self, chart: usize, m: &[i32]) -> Result<Vec<u32>, ActionError> {
        if chart >= self.n_vars {
            return Err(ActionError::BadChart(chart));
        }
        if m.len() + 1 != self.n_vars {
            return Err(ActionError::LengthMismatch { expected: self.n_vars - 1, got: m.len() });
        }
        let mut full = m.to_vec();
        full.insert(chart, -m.iter().sum::<i32>());
        self.character(&full)
    }

    pub fn is_invariant<C: Coeff>(&self, f: &LaurentPoly<C>) -> Result<Invariance, ActionError> {
        for (e, _) in f.terms() {
            let ch = self.character(&e.0)?;
            if ch.iter().any(|&c| c != 0) {
                return Ok(Invariance { invariant: false, offender: Some((e.clone(), ch)) });
            }
        }
        Ok(Invariance { invariant: true, offender: None })
    }

    /// Weights relative to the chart coordinate, with that column removed.
    pub fn chart_weights(&self, chart: usize) -> Result<IntMatrix, ActionError> {
        if chart >= self.n_vars {
            return Err(ActionError::BadChart(chart));
        }
        let rows: Vec<Vec<i64>> = self
            .generators
            .iter()
            .map(|g| {
                let wc = g.weights[chart] as i64;
                (0..self.n_vars)
                    .filter(|&j| j != chart)
                    .map(|j| (g.weights[j] as i64 - wc).rem_euclid(g.order as i64))
                    .collect()
            })
            .collect();
        if rows.is_empty() {
            return Ok(IntMatrix::zeros(0, self.n_vars - 1));
        }
        Ok(IntMatrix::from_i64(&rows))
    }

    /// Lattice of exponents of invariant rational monomials on the chart.
    pub fn invariant_lattice_at(&self, chart: usize) -> Result<LatticeBasis, ActionError> {
        let w = self.chart_weights(chart)?;
        if w.rows() == 0 {
            return Ok(LatticeBasis::standard(self.n_vars - 1));
        }
        Ok(congruence_kernel(&w, &self.orders())?)
    }

    pub fn invariant_lattice(&self) -> Result<LatticeBasis, ActionError> {
        self.invariant_lattice_at(self.default_chart())
    }

    /// Order of the group acting on projective space, as a lattice index.
    pub fn group_order(&self) -> Result<u64, ActionError> {
        Ok(self.invariant_lattice()?.index()?.to_u64().expect("group order fits in u64"))
    }

    /// `[G : G1]` for a subgroup `G1` given as its own action.
    pub fn subgroup_index(&self, sub: &DiagonalAction) -> Result<u64, ActionError> {
        if sub.n_vars != self.n_vars {
            return Err(ActionError::LengthMismatch { expected: self.n_vars, got: sub.n_vars });
        }
        let chart = self.default_chart();
        let big = self.invariant_lattice_at(chart)?;
        let small = sub.invariant_lattice_at(chart)?;
        if !small.contains_lattice(&big) {
            return Err(ActionError::NotSubgroup);
        }
        let (ib, is) = (big.index()?, small.index()?);
        let (q, r) = ib.div_rem(&is);
        debug_assert_eq!(r, BigInt::from(0));
        Ok(q.to_u64().expect("index fits in u64"))
    }
}

impl fmt::Display for DiagonalAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.generators.is_empty() {
            return write!(f, "trivial on {} coordinates", self.n_vars);
        }
        let gens: Vec<String> = self
            .generators
            .iter()
            .map(|g| {
                let w: Vec<String> = g.weights.iter().map(u32::to_string).collect();
                format!("Z/{} [{}]", g.order, w.join(","))
            })
            .collect();
        write!(f, "{}", gens.join(", "))
    }
}

/// A homogeneous hypersurface `F = 0` of degree at least 2 preserved by a
/// diagonal action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantHypersurface<C> {
    pub f: LaurentPoly<C>,
    pub action: DiagonalAction,
}

impl<C: Coeff> InvariantHypersurface<C> {
    pub fn new(f: LaurentPoly<C>, action: DiagonalAction) -> Result<Self, ActionError> {
        if f.nvars() != action.n_vars() {
            return Err(ActionError::LengthMismatch { expected: action.n_vars(), got: f.nvars() });
        }
        let d = f.homogeneous_degree().ok_or(ActionError::NotHomogeneous)?;
        if !f.is_polynomial() {
            return Err(ActionError::NotHomogeneous);
        }
        if d < 2 {
            return Err(ActionError::DegreeTooSmall(d));
        }
        if let Some((e, ch)) = action.is_invariant(&f)?.offender {
            let mono = LaurentPoly::monomial(f.vars().clone(), e, f.coefficients().next().unwrap().one_like());
            return Err(ActionError::NotInvariant { monomial: mono.to_string(), character: ch });
        }
        Ok(InvariantHypersurface { f, action })
    }

    pub fn degree(&self) -> i64 {
        self.f.homogeneous_degree().expect("checked at construction")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::Rational;
    use crate::poly::indexed_vars;

    fn ex1() -> DiagonalAction {
        DiagonalAction::from_weights(5, &[(3, &[1, 2, 0, 0, 0])]).unwrap()
    }

    fn two_gen() -> DiagonalAction {
        DiagonalAction::from_weights(5, &[(3, &[1, 0, 2, 0, 0]), (3, &[0, 1, 2, 2, 0])]).unwrap()
    }

    #[test]
    fn characters() {
        assert_eq!(ex1().character(&[1, 1, 0, 0, 0]).unwrap(), vec![0]);
        assert_eq!(ex1().character(&[1, 0, 0, 0, 0]).unwrap(), vec![1]);
        assert_eq!(two_gen().character(&[1, 0, 1, -1, 0]).unwrap(), vec![0, 0]);
        assert_eq!(two_gen().character_at(4, &[1, 0, 1, -1]).unwrap(), vec![0, 0]);
        assert!(ex1().character(&[1, 0]).is_err());
    }

    #[test]
    fn invariance() {
        let v = indexed_vars("x", 5);
        let q = |e: [i32; 5]| LaurentPoly::monomial(v.clone(), ExponentVec(e.to_vec()), Rational::one());
        let f = &(&q([3, 0, 0, 0, 0]) + &q([0, 3, 0, 0, 0])) + &q([1, 1, 1, 0, 0]);
        assert!(ex1().is_invariant(&f).unwrap().invariant);
        let g = q([2, 0, 1, 0, 0]);
        let res = ex1().is_invariant(&g).unwrap();
        assert!(!res.invariant);
        assert_eq!(res.offender, Some((ExponentVec(vec![2, 0, 1, 0, 0]), vec![2])));
        assert!(DiagonalAction::trivial(5).is_invariant(&g).unwrap().invariant);
    }

    #[test]
    fn lattices_and_orders() {
        let l = ex1().invariant_lattice().unwrap();
        let expect = congruence_kernel(&IntMatrix::from_i64(&[[1, 2, 0, 0]]), &[3]).unwrap();
        assert_eq!(l, expect);
        assert_eq!(DiagonalAction::trivial(5).invariant_lattice().unwrap(), LatticeBasis::standard(4));
        let l = two_gen().invariant_lattice().unwrap();
        for row in [[1, 0, 1, -1], [0, 1, 0, 1], [0, 0, 3, 0], [0, 0, 0, 3]] {
            let r: Vec<BigInt> = row.iter().map(|&x| BigInt::from(x)).collect();
            assert!(l.contains(&r));
        }
        assert_eq!(ex1().group_order().unwrap(), 3);
        assert_eq!(two_gen().group_order().unwrap(), 9);
        let five = DiagonalAction::from_weights(5, &[(5, &[1, 3, 4, 2, 0])]).unwrap();
        assert_eq!(five.group_order().unwrap(), 5);
    }

    #[test]
    fn subgroups() {
        let g1 = DiagonalAction::from_weights(5, &[(3, &[0, 1, 2, 2, 0])]).unwrap();
        assert_eq!(two_gen().subgroup_index(&g1).unwrap(), 3);
        assert_eq!(two_gen().subgroup_index(&two_gen()).unwrap(), 1);
        assert_eq!(ex1().subgroup_index(&DiagonalAction::trivial(5)).unwrap(), 3);
        assert_eq!(g1.subgroup_index(&two_gen()), Err(ActionError::NotSubgroup));
    }

    #[test]
    fn constructor_checks() {
        assert_eq!(
            DiagonalAction::from_weights(2, &[(3, &[1, 2])]),
            Err(ActionError::NoTrivialCoordinate)
        );
        let a = DiagonalAction::from_weights(3, &[(3, &[4, -1, 0])]).unwrap();
        assert_eq!(a.generators()[0].weights, vec![1, 2, 0]);
    }
}
