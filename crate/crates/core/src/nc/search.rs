//! Deterministic beam search for a basis of invariant monomials.
//!
//! Starts from the Hermite basis of the invariant lattice and explores
//! elementary unimodular row operations (add or subtract another row,
//! negate a row) with bounded entries. Candidates are ranked by `d_NC`,
//! then the term count of `p`, then the basis matrix in lexicographic order.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::action::DiagonalAction;
use crate::coeffs::Coeff;
use crate::lattice::{IntMatrix, LatticeBasis};
use crate::poly::LaurentPoly;

use super::{chart_equation, rewrite_invariant, u_names, NcError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    pub width: usize,
    pub depth: usize,
    /// Largest absolute value allowed for a basis entry.
    pub max_entry: i64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { width: 8, depth: 6, max_entry: 6 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchResult {
    pub basis: Vec<Vec<i64>>,
    pub d_nc: i64,
    pub terms: usize,
    /// d_NC of the Hermite starting basis, for comparison.
    pub start_d_nc: i64,
    pub evaluated: usize,
}

type Rows = Vec<Vec<i64>>;
type Score = (i64, usize, Rows);

fn score<C: Coeff>(local: &LaurentPoly<C>, rows: &Rows, n: usize, chart: usize) -> Option<Score> {
    let m = IntMatrix::from_i64(rows);
    let lattice = LatticeBasis::new(m).ok()?;
    let (p, _) = rewrite_invariant(local, &lattice, u_names(n, chart)).ok()?;
    Some((p.total_degree()?, p.num_terms(), rows.clone()))
}

fn neighbours(rows: &Rows, bound: i64) -> Vec<Rows> {
    let k = rows.len();
    let mut out = Vec::new();
    for i in 0..k {
        let mut neg = rows.clone();
        neg[i].iter_mut().for_each(|x| *x = -*x);
        out.push(neg);
        for j in 0..k {
            if i == j {
                continue;
            }
            for sign in [1, -1] {
                let mut next = rows.clone();
                for c in 0..rows[i].len() {
                    next[i][c] += sign * rows[j][c];
                }
                if next[i].iter().all(|x| x.abs() <= bound) {
                    out.push(next);
                }
            }
        }
    }
    out
}

/// Best basis found for `F` on `chart` under `action`.
pub fn search_basis<C: Coeff>(
    f: &LaurentPoly<C>,
    action: &DiagonalAction,
    chart: usize,
    config: SearchConfig,
) -> Result<SearchResult, NcError> {
    let n = f.nvars();
    let (local, _) = chart_equation(f, action, chart)?;
    let start = action.invariant_lattice_at(chart)?.hnf().matrix().to_i64_rows().ok_or(NcError::Overflow)?;
    let first = score(&local, &start, n, chart).ok_or(NcError::Overflow)?;
    let start_d_nc = first.0;
    let mut best = first.clone();
    let mut seen: BTreeSet<Rows> = BTreeSet::from([start]);
    let mut beam = vec![first];
    let mut evaluated = 1;
    for _ in 0..config.depth {
        let mut cands: BTreeSet<Rows> = BTreeSet::new();
        for (_, _, rows) in &beam {
            for nb in neighbours(rows, config.max_entry) {
                if !seen.contains(&nb) {
                    cands.insert(nb);
                }
            }
        }
        if cands.is_empty() {
            break;
        }
        let cands: Vec<Rows> = cands.into_iter().collect();
        evaluated += cands.len();
        let mut scored: Vec<Score> = cands.par_iter().filter_map(|r| score(&local, r, n, chart)).collect();
        scored.sort();
        seen.extend(cands);
        scored.truncate(config.width);
        if let Some(top) = scored.first() {
            if *top < best {
                best = top.clone();
            }
        }
        beam = scored;
    }
    Ok(SearchResult { basis: best.2, d_nc: best.0, terms: best.1, start_d_nc, evaluated })
}
