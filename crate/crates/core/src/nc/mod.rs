//! Noether-Cremona transformations of invariant hypersurfaces.
//!
//! A step dehomogenizes `F` on a chart fixed by the group, rewrites each
//! term in a basis of invariant rational monomials `u_j = x^{B_j}`, clears
//! the minimal monomial denominator and rehomogenizes. Basis row `j` becomes
//! the `j`-th non-chart coordinate of the output and the chart keeps its slot.

mod chain;
mod map;
mod search;

use std::collections::{HashMap, VecDeque};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;
use thiserror::Error;

use crate::action::{ActionError, DiagonalAction, Generator};
use crate::coeffs::Coeff;
use crate::lattice::{solve_in_lattice, IntMatrix, LatticeBasis, LatticeError};
use crate::poly::{ExponentVec, LaurentPoly, PolyError, Vars};

pub use chain::{chain_parametrization, NCChain};
pub use map::{compose_maps, linear_witness, parametrize_linear, RationalMap};
pub use search::{search_basis, SearchConfig, SearchResult};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NcError {
    #[error("invalid basis: {0}")]
    InvalidBasis(BasisDiagnosis),
    #[error("chart {0} is moved by the group")]
    ChartNotFixed(String),
    #[error("chart index {0} out of range")]
    BadChart(usize),
    #[error("F is divisible by the chart variable {0}")]
    ChartDividesF(String),
    #[error("F is zero or a monomial")]
    DegenerateF,
    #[error("F is not homogeneous")]
    NotHomogeneous,
    #[error("terms of F carry different characters, so the group does not preserve F = 0")]
    NotSemiInvariant,
    #[error("term with exponent {0:?} is not in the span of the basis")]
    NotInLattice(Vec<i32>),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("map components are all zero")]
    ZeroMap,
    #[error("composite map is identically zero")]
    ZeroComposite,
    #[error("map components have different degrees")]
    MixedDegrees,
    #[error("no variable occurs to degree one")]
    NoLinearWitness,
    #[error("step {0} does not continue the chain")]
    NotComposable(usize),
    #[error("exponent does not fit in 32 bits")]
    Overflow,
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Why a proposed basis of invariant monomials is rejected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum BasisDiagnosis {
    Ok,
    Shape { rows: usize, cols: usize, expected: usize },
    RankDeficient { rank: usize },
    NonInvariantRow { row: usize, character: Vec<u32> },
    ProperSublattice { index: u64 },
}

impl std::fmt::Display for BasisDiagnosis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BasisDiagnosis::Ok => write!(f, "ok"),
            BasisDiagnosis::Shape { rows, cols, expected } => write!(f, "basis is {rows}x{cols}, expected {expected}x{expected}"),
            BasisDiagnosis::RankDeficient { rank } => write!(f, "rows are dependent (rank {rank})"),
            BasisDiagnosis::NonInvariantRow { row, character } => write!(f, "row {} has character {character:?}", row + 1),
            BasisDiagnosis::ProperSublattice { index } => write!(f, "rows span a sublattice of index {index}"),
        }
    }
}

fn check_chart(action: &DiagonalAction, chart: usize, vars: &Vars) -> Result<(), NcError> {
    if chart >= action.n_vars() {
        return Err(NcError::BadChart(chart));
    }
    if action.generators().iter().any(|g| g.weights[chart] != 0) {
        return Err(NcError::ChartNotFixed(vars.get(chart).cloned().unwrap_or_else(|| chart.to_string())));
    }
    Ok(())
}

/// Checks that `basis` rows are invariant and span the whole invariant
/// lattice on the chart.
pub fn validate_basis(action: &DiagonalAction, chart: usize, basis: &IntMatrix) -> Result<BasisDiagnosis, NcError> {
    let k = action.n_vars() - 1;
    if basis.rows() != k || basis.cols() != k {
        return Ok(BasisDiagnosis::Shape { rows: basis.rows(), cols: basis.cols(), expected: k });
    }
    let rows = basis.to_i32_rows().ok_or(NcError::Overflow)?;
    for (i, r) in rows.iter().enumerate() {
        let ch = action.character_at(chart, r)?;
        if ch.iter().any(|&c| c != 0) {
            return Ok(BasisDiagnosis::NonInvariantRow { row: i, character: ch });
        }
    }
    let det = basis.det()?.abs();
    if det == BigInt::from(0) {
        return Ok(BasisDiagnosis::RankDeficient { rank: basis.rank() });
    }
    let lattice = action.invariant_lattice_at(chart)?;
    let idx = lattice.index()?;
    if det != idx {
        return Ok(BasisDiagnosis::ProperSublattice { index: (det / idx).to_u64().unwrap_or(u64::MAX) });
    }
    Ok(BasisDiagnosis::Ok)
}

/// `f = p(u) / q(u)` with `u_j = x^{B_j}`, `q = u^{a}` a monomial and the
/// denominator cleared minimally. Returns `p` over `u_vars` and `a`.
pub fn rewrite_invariant<C: Coeff>(
    f: &LaurentPoly<C>,
    basis: &LatticeBasis,
    u_vars: Vars,
) -> Result<(LaurentPoly<C>, ExponentVec), NcError> {
    if basis.rank() != u_vars.len() {
        return Err(NcError::DimensionMismatch { expected: basis.rank(), got: u_vars.len() });
    }
    let mut rewritten = Vec::with_capacity(f.num_terms());
    for (e, c) in f.terms() {
        let target: Vec<BigInt> = e.0.iter().map(|&x| BigInt::from(x)).collect();
        let coords = solve_in_lattice(basis, &target).ok_or_else(|| NcError::NotInLattice(e.0.clone()))?;
        let coords = coords.iter().map(|x| x.to_i32().ok_or(NcError::Overflow)).collect::<Result<Vec<_>, _>>()?;
        rewritten.push((ExponentVec(coords), c.clone()));
    }
    let n = u_vars.len();
    let clear: Vec<i32> = (0..n).map(|i| rewritten.iter().map(|(e, _)| -e.0[i]).max().unwrap_or(0).max(0)).collect();
    let clear = ExponentVec(clear);
    let p = LaurentPoly::from_terms(u_vars, rewritten.into_iter().map(|(e, c)| (e.add(&clear), c)));
    Ok((p, clear))
}

/// One Noether-Cremona step with all of its intermediate data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NCStep<C> {
    pub input: LaurentPoly<C>,
    pub action: DiagonalAction,
    pub chart: usize,
    pub basis: IntMatrix,
    /// Monomial multiplied into the chart equation to make it invariant;
    /// zero unless `F` is only semi-invariant.
    pub twist: ExponentVec,
    pub p: LaurentPoly<C>,
    /// Exponents of the monomial denominator `q` in the `u` variables.
    pub q: ExponentVec,
    pub output: LaurentPoly<C>,
    pub d_nc: i64,
    pub forward: RationalMap<C>,
    pub residual: DiagonalAction,
}

fn non_chart(n: usize, chart: usize) -> Vec<usize> {
    (0..n).filter(|&j| j != chart).collect()
}

/// Names `u_{slot+1}` for the non-chart output slots.
pub(crate) fn u_names(n: usize, chart: usize) -> Vars {
    non_chart(n, chart).iter().map(|j| format!("u{}", j + 1)).collect::<Vec<_>>().into()
}

/// A nonnegative exponent vector on the chart with chart-relative
/// character `target`, found by breadth-first search over the character group.
fn monomial_with_character(action: &DiagonalAction, chart: usize, target: &[u32]) -> Result<Vec<i32>, NcError> {
    let k = action.n_vars() - 1;
    let zero = vec![0u32; target.len()];
    let mut seen: HashMap<Vec<u32>, Vec<i32>> = HashMap::from([(zero.clone(), vec![0; k])]);
    let mut queue = VecDeque::from([zero]);
    while let Some(ch) = queue.pop_front() {
        if ch == target {
            return Ok(seen[&ch].clone());
        }
        for j in 0..k {
            let mut unit = vec![0i32; k];
            unit[j] = 1;
            let step = action.character_at(chart, &unit)?;
            let next: Vec<u32> = ch.iter().zip(&step).zip(action.generators()).map(|((a, b), g)| (a + b) % g.order).collect();
            if !seen.contains_key(&next) {
                let mut e = seen[&ch].clone();
                e[j] += 1;
                seen.insert(next.clone(), e);
                queue.push_back(next);
            }
        }
    }
    Err(NcError::NotSemiInvariant)
}

/// `F` on the chart, multiplied by a monomial making it invariant when `F`
/// is only semi-invariant. Returns the equation and that monomial.
pub(crate) fn chart_equation<C: Coeff>(
    f: &LaurentPoly<C>,
    quotient: &DiagonalAction,
    chart: usize,
) -> Result<(LaurentPoly<C>, ExponentVec), NcError> {
    let n = f.nvars();
    let local = f.dehomogenize(chart)?;
    let mut chars = local.terms().map(|(e, _)| quotient.character_at(chart, &e.0));
    let chi0 = chars.next().ok_or(NcError::DegenerateF)??;
    for ch in chars {
        if ch? != chi0 {
            return Err(NcError::NotSemiInvariant);
        }
    }
    let twist = if chi0.iter().all(|&c| c == 0) {
        vec![0; n - 1]
    } else {
        let neg: Vec<u32> = chi0.iter().zip(quotient.generators()).map(|(c, g)| (g.order - c) % g.order).collect();
        monomial_with_character(quotient, chart, &neg)?
    };
    let twist = ExponentVec(twist);
    let local = local.shift(&twist);
    Ok((local, twist))
}

/// Runs one step on `F` with the given action, chart and basis of invariant
/// monomials (rows over the non-chart variables).
///
/// `subgroup`, when given, is the group actually quotiented by: the basis
/// must be valid for it, and the rest of `action` descends to the residual
/// action on the output.
pub fn nc_step<C: Coeff>(
    f: &LaurentPoly<C>,
    action: &DiagonalAction,
    subgroup: Option<&DiagonalAction>,
    chart: usize,
    basis: &IntMatrix,
) -> Result<NCStep<C>, NcError> {
    let n = f.nvars();
    if action.n_vars() != n {
        return Err(NcError::DimensionMismatch { expected: action.n_vars(), got: n });
    }
    let quotient = subgroup.unwrap_or(action);
    if quotient.n_vars() != n {
        return Err(NcError::DimensionMismatch { expected: n, got: quotient.n_vars() });
    }
    check_chart(quotient, chart, f.vars())?;
    f.homogeneous_degree().ok_or(NcError::NotHomogeneous)?;
    if !f.is_polynomial() {
        return Err(NcError::NotHomogeneous);
    }
    if f.num_terms() < 2 {
        return Err(NcError::DegenerateF);
    }
    if f.divisible_by_var(chart) {
        return Err(NcError::ChartDividesF(f.vars()[chart].clone()));
    }
    match validate_basis(quotient, chart, basis)? {
        BasisDiagnosis::Ok => {}
        d => return Err(NcError::InvalidBasis(d)),
    }
    let residual = match subgroup {
        Some(sub) => residual_action(action, sub, chart, basis)?,
        None => DiagonalAction::trivial(n),
    };

    let (local, twist) = chart_equation(f, quotient, chart)?;

    let lattice = LatticeBasis::new(basis.clone())?;
    let (p, q) = rewrite_invariant(&local, &lattice, u_names(n, chart))?;
    let (output, d_nc) = p.with_vars(without(f.vars(), chart)).homogenize(chart, &f.vars()[chart])?;

    let forward = forward_map(f.vars(), chart, basis, f.coefficients().next().unwrap().one_like())?;
    Ok(NCStep {
        input: f.clone(),
        action: quotient.clone(),
        chart,
        basis: basis.clone(),
        twist,
        p,
        q,
        output,
        d_nc,
        forward,
        residual,
    })
}

fn without(vars: &Vars, chart: usize) -> Vars {
    vars.iter().enumerate().filter(|(i, _)| *i != chart).map(|(_, s)| s.clone()).collect::<Vec<_>>().into()
}

/// The monomial map `x -> (x^{B_1} x_c^{-deg B_1} : ... : 1 : ...)`, chart slot 1.
pub fn forward_map<C: Coeff>(vars: &Vars, chart: usize, basis: &IntMatrix, one: C) -> Result<RationalMap<C>, NcError> {
    let n = vars.len();
    let rows = basis.to_i32_rows().ok_or(NcError::Overflow)?;
    let mut full = Vec::with_capacity(n);
    let mut next = rows.iter();
    for slot in 0..n {
        if slot == chart {
            full.push(vec![0; n]);
            continue;
        }
        let r = next.next().ok_or(NcError::DimensionMismatch { expected: n - 1, got: rows.len() })?;
        let mut e = r.clone();
        e.insert(chart, -r.iter().sum::<i32>());
        full.push(e);
    }
    RationalMap::monomial(vars.clone(), vars.clone(), &full, one)
}

/// Action of `G / G1` on the output coordinates of a `G1`-step: output slot
/// `j` carries the `G`-character of basis row `j`, the chart slot is fixed.
pub fn residual_action(
    action: &DiagonalAction,
    subgroup: &DiagonalAction,
    chart: usize,
    basis: &IntMatrix,
) -> Result<DiagonalAction, NcError> {
    action.subgroup_index(subgroup)?;
    let n = action.n_vars();
    let rows = basis.to_i32_rows().ok_or(NcError::Overflow)?;
    let mut gens = Vec::new();
    for g in action.generators() {
        let single = DiagonalAction::new(n, vec![g.clone()])?;
        let mut weights = vec![0u32; n];
        for (slot, row) in non_chart(n, chart).into_iter().zip(&rows) {
            weights[slot] = single.character_at(chart, row)?[0];
        }
        if weights.iter().any(|&w| w != 0) {
            gens.push(Generator { order: g.order, weights });
        }
    }
    Ok(DiagonalAction::new(n, gens)?)
}

/// Coefficients of `f` with multiplicities.
pub fn coefficient_multiset<C: Coeff>(f: &LaurentPoly<C>) -> HashMap<C, usize> {
    let mut out = HashMap::new();
    for c in f.coefficients() {
        *out.entry(c.clone()).or_insert(0) += 1;
    }
    out
}

/// Structured record of a step, with polynomials rendered as text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepReport {
    pub input: String,
    pub group: String,
    pub group_order: u64,
    pub chart: String,
    pub basis: Vec<Vec<i64>>,
    pub twist: Vec<i32>,
    pub p: String,
    pub q: Vec<i32>,
    pub f_nc: String,
    pub d_nc: i64,
    pub forward_exponents: Vec<Vec<i32>>,
    pub residual_group: String,
    pub residual_order: u64,
}

impl<C: Coeff> NCStep<C> {
    pub fn report(&self) -> StepReport {
        StepReport {
            input: self.input.to_string(),
            group: self.action.to_string(),
            group_order: self.action.group_order().unwrap_or(0),
            chart: self.input.vars()[self.chart].clone(),
            basis: self.basis.to_i64_rows().unwrap_or_default(),
            twist: self.twist.0.clone(),
            p: self.p.to_string(),
            q: self.q.0.clone(),
            f_nc: self.output.to_string(),
            d_nc: self.d_nc,
            forward_exponents: self.forward.monomial_exponents().unwrap_or_default(),
            residual_group: self.residual.to_string(),
            residual_order: self.residual.group_order().unwrap_or(0),
        }
    }

    /// Symbolic round trip: `F_NC` on the chart, pulled back along
    /// `u_j = x^{B_j}`, equals `q * x^twist * f`.
    pub fn round_trip_holds(&self) -> Result<bool, NcError> {
        let n = self.input.nvars();
        let x_vars = without(self.input.vars(), self.chart);
        let local_out = self.output.dehomogenize(self.chart)?;
        let one = self.input.coefficients().next().unwrap().one_like();
        let rows = self.basis.to_i32_rows().ok_or(NcError::Overflow)?;
        let images: Vec<LaurentPoly<C>> =
            rows.iter().map(|r| LaurentPoly::monomial(x_vars.clone(), ExponentVec(r.clone()), one.clone())).collect();
        let lhs = local_out.substitute(&images)?;
        let mut qx = vec![0i32; n - 1];
        for (r, &a) in rows.iter().zip(&self.q.0) {
            for (acc, &b) in qx.iter_mut().zip(r) {
                *acc += a * b;
            }
        }
        let rhs = self.input.dehomogenize(self.chart)?.shift(&self.twist).shift(&ExponentVec(qx));
        Ok(lhs == rhs)
    }
}

#[cfg(test)]
mod tests;
