//! Rational maps between projective spaces given by homogeneous components.

use std::fmt;

use crate::coeffs::{Coeff, CoeffError, Fp, ToPrimeField};
use crate::poly::{gcd_many, div_exact, ExponentVec, LaurentPoly, Vars};

use super::NcError;

/// `(c_0 : ... : c_N)` with components in the source coordinates.
///
/// Components share one degree and have no common monomial factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMap<C> {
    target: Vars,
    components: Vec<LaurentPoly<C>>,
}

impl<C: Coeff> RationalMap<C> {
    /// Normalizes away any common monomial factor (including Laurent ones).
    pub fn new(target: Vars, components: Vec<LaurentPoly<C>>) -> Result<Self, NcError> {
        if components.len() != target.len() {
            return Err(NcError::DimensionMismatch { expected: target.len(), got: components.len() });
        }
        let source = components.first().ok_or(NcError::ZeroMap)?.vars().clone();
        if components.iter().any(|c| c.vars() != &source) {
            return Err(NcError::DimensionMismatch { expected: source.len(), got: 0 });
        }
        let nonzero: Vec<&LaurentPoly<C>> = components.iter().filter(|c| !c.is_zero()).collect();
        if nonzero.is_empty() {
            return Err(NcError::ZeroMap);
        }
        let mut m: Option<Vec<i32>> = None;
        for c in &nonzero {
            let (cm, _) = c.monomial_content()?;
            m = Some(match m {
                None => cm.0,
                Some(prev) => prev.iter().zip(&cm.0).map(|(a, b)| *a.min(b)).collect(),
            });
        }
        let shift = ExponentVec(m.unwrap().iter().map(|k| -k).collect());
        let components: Vec<LaurentPoly<C>> = components.iter().map(|c| c.shift(&shift)).collect();
        let mut degree = None;
        for c in components.iter().filter(|c| !c.is_zero()) {
            let d = c.homogeneous_degree().ok_or(NcError::NotHomogeneous)?;
            if *degree.get_or_insert(d) != d {
                return Err(NcError::MixedDegrees);
            }
        }
        Ok(RationalMap { target, components })
    }

    pub fn identity(vars: Vars, one: C) -> Self {
        let components = (0..vars.len()).map(|i| LaurentPoly::var(vars.clone(), i, one.clone())).collect();
        RationalMap { target: vars, components }
    }

    /// Forgets coordinate `drop`.
    pub fn projection(vars: Vars, drop: usize, one: C) -> Result<Self, NcError> {
        if drop >= vars.len() {
            return Err(NcError::DimensionMismatch { expected: vars.len(), got: drop });
        }
        let keep: Vec<usize> = (0..vars.len()).filter(|&i| i != drop).collect();
        let target: Vars = keep.iter().map(|&i| vars[i].clone()).collect::<Vec<_>>().into();
        let components = keep.iter().map(|&i| LaurentPoly::var(vars.clone(), i, one.clone())).collect();
        Ok(RationalMap { target, components })
    }

    /// Monomial map `slot j -> x^{rows[j]}`, normalized.
    pub fn monomial(source: Vars, target: Vars, rows: &[Vec<i32>], one: C) -> Result<Self, NcError> {
        let comps = rows
            .iter()
            .map(|r| {
                if r.len() != source.len() {
                    return Err(NcError::DimensionMismatch { expected: source.len(), got: r.len() });
                }
                Ok(LaurentPoly::monomial(source.clone(), ExponentVec(r.clone()), one.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(target, comps)
    }

    pub fn source(&self) -> &Vars {
        self.components[0].vars()
    }

    pub fn target(&self) -> &Vars {
        &self.target
    }

    pub fn components(&self) -> &[LaurentPoly<C>] {
        &self.components
    }

    /// Projective dimension of the source.
    pub fn source_dim(&self) -> usize {
        self.source().len() - 1
    }

    pub fn target_dim(&self) -> usize {
        self.target.len() - 1
    }

    pub fn degree(&self) -> i64 {
        self.components.iter().find_map(|c| c.homogeneous_degree()).unwrap_or(0)
    }

    /// `F(c_0, ..., c_N)` in the source coordinates.
    pub fn pullback(&self, f: &LaurentPoly<C>) -> Result<LaurentPoly<C>, NcError> {
        if f.nvars() != self.components.len() {
            return Err(NcError::DimensionMismatch { expected: self.components.len(), got: f.nvars() });
        }
        Ok(f.substitute(&self.components)?)
    }

    /// Exponent rows when every component is a monomial with coefficient 1.
    pub fn monomial_exponents(&self) -> Option<Vec<Vec<i32>>> {
        self.components
            .iter()
            .map(|c| match c.terms().next() {
                Some((e, k)) if c.is_monomial() && k.is_one() => Some(e.0.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> RationalMap<D> {
        RationalMap { target: self.target.clone(), components: self.components.iter().map(|c| c.map_coeffs(&f)).collect() }
    }

    pub fn try_map_coeffs<D: Coeff, E>(&self, f: impl Fn(&C) -> Result<D, E>) -> Result<RationalMap<D>, E> {
        let components = self.components.iter().map(|c| c.try_map_coeffs(&f)).collect::<Result<Vec<_>, E>>()?;
        Ok(RationalMap { target: self.target.clone(), components })
    }

    /// Divides out the common polynomial factor of the components; only
    /// available over fields.
    pub fn cancel_common_factor(&self) -> Self {
        if !C::IS_FIELD {
            return self.clone();
        }
        let nonzero: Vec<&LaurentPoly<C>> = self.components.iter().filter(|c| !c.is_zero()).collect();
        let g = gcd_many(nonzero.iter().copied()).expect("map has a nonzero component");
        if g.total_degree() == Some(0) {
            return self.clone();
        }
        let components = self.components.iter().map(|c| if c.is_zero() { c.clone() } else { div_exact(c, &g).expect("gcd divides") }).collect();
        RationalMap { target: self.target.clone(), components }
    }
}

impl<C: Coeff + ToPrimeField> RationalMap<C> {
    pub fn to_prime(&self, p: u64) -> Result<RationalMap<Fp>, CoeffError> {
        self.try_map_coeffs(|c| c.to_prime(p))
    }
}

/// `g o f`: substitutes `f` into `g`, then removes common monomial factors
/// and, over fields, the full common polynomial factor.
pub fn compose_maps<C: Coeff>(g: &RationalMap<C>, f: &RationalMap<C>) -> Result<RationalMap<C>, NcError> {
    if g.source().len() != f.target().len() {
        return Err(NcError::DimensionMismatch { expected: g.source().len(), got: f.target().len() });
    }
    let comps = g.components.iter().map(|c| Ok(c.substitute(&f.components)?)).collect::<Result<Vec<_>, NcError>>()?;
    if comps.iter().all(LaurentPoly::is_zero) {
        return Err(NcError::ZeroComposite);
    }
    Ok(RationalMap::new(g.target.clone(), comps)?.cancel_common_factor())
}

/// Solves `F = A x_i + B` for `x_i`: the map from the hyperplane coordinates
/// `y` (all but `x_i`) to `{F = 0}` sending `y` to `(y A : ... : -B : ... : y A)`.
pub fn parametrize_linear<C: Coeff>(f: &LaurentPoly<C>, i: usize) -> Result<RationalMap<C>, NcError> {
    f.homogeneous_degree().ok_or(NcError::NotHomogeneous)?;
    let (a, b) = f.split_linear(i)?;
    if a.is_zero() {
        return Err(NcError::NoLinearWitness);
    }
    let n = f.nvars();
    let keep: Vec<usize> = (0..n).filter(|&k| k != i).collect();
    let src: Vars = keep.iter().map(|&k| f.vars()[k].clone()).collect::<Vec<_>>().into();
    // Variable k of the ambient ring goes to source slot pos(k); x_i never occurs in A or B.
    let target_of: Vec<usize> = (0..n).map(|k| if k < i { k } else { k.saturating_sub(1) }).collect();
    let a_y = a.relabel(src.clone(), &target_of);
    let b_y = b.relabel(src.clone(), &target_of);
    let one = f.coefficients().next().expect("nonzero").one_like();
    let comps = (0..n)
        .map(|k| {
            if k == i {
                b_y.neg_poly()
            } else {
                &LaurentPoly::var(src.clone(), target_of[k], one.clone()) * &a_y
            }
        })
        .collect();
    RationalMap::new(f.vars().clone(), comps)
}

/// Smallest variable index occurring to degree exactly one.
pub fn linear_witness<C: Coeff>(f: &LaurentPoly<C>) -> Option<usize> {
    (0..f.nvars()).find(|&i| f.deg_in_var(i) == Ok(1) && f.terms().all(|(e, _)| e.0[i] >= 0))
}

impl<C: Coeff> fmt::Display for RationalMap<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.components.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(" : "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::Rational;
    use crate::poly::indexed_vars;

    type Q = LaurentPoly<Rational>;

    fn xv(n: usize, i: usize) -> Q {
        Q::var(indexed_vars("x", n), i, Rational::one())
    }

    fn quadric() -> Q {
        &(&xv(3, 0) * &xv(3, 1)) + &xv(3, 2).pow(2)
    }

    #[test]
    fn parametrize_simple_quadric() {
        let f = quadric();
        assert_eq!(linear_witness(&f), Some(0));
        let phi = parametrize_linear(&f, 1).unwrap();
        assert_eq!(phi.to_string(), "(x1^2 : -x3^2 : x1*x3)");
        assert!(phi.pullback(&f).unwrap().is_zero());
        assert_eq!(phi.degree(), 2);
    }

    #[test]
    fn parametrize_without_free_part() {
        let f = &xv(3, 0) * &xv(3, 1).pow(2);
        let phi = parametrize_linear(&f, 0).unwrap();
        assert!(phi.pullback(&f).unwrap().is_zero());
        assert!(phi.components()[0].is_zero());
    }

    #[test]
    fn witness_absent() {
        let v = indexed_vars("x", 5);
        let fermat = (0..5).fold(Q::zero(v.clone()), |acc, i| &acc + &Q::var(v.clone(), i, Rational::one()).pow(3));
        assert_eq!(linear_witness(&fermat), None);
        assert!(matches!(parametrize_linear(&fermat, 0), Err(NcError::Poly(_))));
    }

    #[test]
    fn compose_with_identity_and_projection() {
        let f = quadric();
        let phi = parametrize_linear(&f, 1).unwrap();
        let id = RationalMap::identity(f.vars().clone(), Rational::one());
        assert_eq!(compose_maps(&id, &phi).unwrap(), phi);
        let proj = RationalMap::projection(f.vars().clone(), 1, Rational::one()).unwrap();
        let round = compose_maps(&proj, &phi).unwrap();
        assert_eq!(round, RationalMap::identity(phi.source().clone(), Rational::one()));
    }

    #[test]
    fn monomial_maps_compose_by_matrix_product() {
        let v = indexed_vars("x", 3);
        let a = RationalMap::monomial(v.clone(), v.clone(), &[vec![2, 0, 0], vec![1, 1, 0], vec![0, 0, 2]], Rational::one()).unwrap();
        let b = RationalMap::monomial(v.clone(), v.clone(), &[vec![1, 1, 0], vec![0, 2, 0], vec![0, 1, 1]], Rational::one()).unwrap();
        let ab = compose_maps(&a, &b).unwrap();
        // rows of A times rows of B: (2,0,0)B = (2,2,0), (1,1,0)B = (1,3,0), (0,0,2)B = (0,2,2)
        let expect = RationalMap::monomial(v.clone(), v.clone(), &[vec![2, 2, 0], vec![1, 3, 0], vec![0, 2, 2]], Rational::one()).unwrap();
        assert_eq!(ab, expect);
    }

    #[test]
    fn laurent_components_are_cleared() {
        let v = indexed_vars("x", 3);
        let m = RationalMap::monomial(v.clone(), v.clone(), &[vec![1, 1, -2], vec![-1, 2, -1], vec![0, 0, 0]], Rational::one()).unwrap();
        assert_eq!(m.to_string(), "(x1^2*x2 : x2^2*x3 : x1*x3^2)");
    }
}
