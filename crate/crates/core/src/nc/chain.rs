use crate::action::DiagonalAction;
use crate::coeffs::Coeff;

use super::map::{compose_maps, RationalMap};
use super::{NCStep, NcError};

/// Successive steps, each consuming the previous output together with the
/// residual group left by the previous step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NCChain<C> {
    steps: Vec<NCStep<C>>,
}

fn same_group(a: &DiagonalAction, b: &DiagonalAction) -> bool {
    a.n_vars() == b.n_vars() && a.subgroup_index(b) == Ok(1)
}

impl<C: Coeff> NCChain<C> {
    pub fn new() -> Self {
        NCChain { steps: Vec::new() }
    }

    pub fn from_steps(steps: Vec<NCStep<C>>) -> Result<Self, NcError> {
        let mut chain = Self::new();
        for s in steps {
            chain.push(s)?;
        }
        Ok(chain)
    }

    /// Appends a step whose input is the current output and whose group is
    /// the current residual group.
    pub fn push(&mut self, step: NCStep<C>) -> Result<(), NcError> {
        if let Some(last) = self.steps.last() {
            if last.output != step.input || !same_group(&last.residual, &step.action) {
                return Err(NcError::NotComposable(self.steps.len()));
            }
        }
        self.steps.push(step);
        Ok(())
    }

    pub fn steps(&self) -> &[NCStep<C>] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Product of the orders of the groups quotiented along `steps[start..]`.
    pub fn degree_from(&self, start: usize) -> Result<u64, NcError> {
        let mut d = 1u64;
        for s in &self.steps[start.min(self.steps.len())..] {
            d *= s.action.group_order()?;
        }
        Ok(d)
    }

    pub fn degree(&self) -> Result<u64, NcError> {
        self.degree_from(0)
    }

    pub fn output(&self) -> Option<&crate::poly::LaurentPoly<C>> {
        self.steps.last().map(|s| &s.output)
    }
}

impl<C: Coeff> Default for NCChain<C> {
    fn default() -> Self {
        Self::new()
    }
}

/// Composes `model`, a parametrization of the input of `steps[start]`, with
/// the forward maps of the remaining steps. The degree is the product of the
/// group orders along those steps.
pub fn chain_parametrization<C: Coeff>(
    chain: &NCChain<C>,
    model: &RationalMap<C>,
    start: usize,
) -> Result<(RationalMap<C>, u64), NcError> {
    if start >= chain.len() {
        return Err(NcError::NotComposable(start));
    }
    let mut map = model.clone();
    for step in &chain.steps[start..] {
        map = compose_maps(&step.forward, &map)?;
    }
    Ok((map, chain.degree_from(start)?))
}
