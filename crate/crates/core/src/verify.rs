//! Finite-field verification: exhaustive smoothness scans, exact identities,
//! fiber-degree histograms and quotient-fiber checks.
//!
//! Scans enumerate projective points in normalized form (first nonzero
//! coordinate 1). An empty singular list means no `F_p`-rational singular
//! point exists; that is evidence for smoothness, not a proof.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::action::DiagonalAction;
use crate::coeffs::{is_prime, root_embed, Coeff, CoeffError, ToPrimeField};
use crate::nc::{NCStep, NcError, RationalMap};
use crate::poly::{LaurentPoly, PolyError};

/// Largest number of points any enumeration will visit.
pub const ENUMERATION_GUARD: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("field size {0} is not prime; only prime fields are supported")]
    NotPrime(u64),
    #[error("characteristic {p} divides 6 or the degree {degree}")]
    BadCharacteristic { p: u64, degree: i64 },
    #[error("{points} points exceed the enumeration guard of {ENUMERATION_GUARD}")]
    GuardExceeded { points: u128 },
    #[error("polynomial has negative exponents")]
    NotPolynomial,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("group order {order} does not divide {p} - 1")]
    NoRoots { order: u32, p: u64 },
    #[error(transparent)]
    Coeff(#[from] CoeffError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Nc(#[from] NcError),
}

#[inline]
fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

/// A polynomial reduced mod `p`, flattened for fast repeated evaluation.
#[derive(Debug, Clone)]
pub struct FpPoly {
    p: u64,
    nvars: usize,
    max_deg: Vec<usize>,
    terms: Vec<(Vec<u32>, u64)>,
}

impl FpPoly {
    pub fn new<C: Coeff + ToPrimeField>(f: &LaurentPoly<C>, p: u64) -> Result<Self, VerifyError> {
        if !f.is_polynomial() {
            return Err(VerifyError::NotPolynomial);
        }
        let n = f.nvars();
        let mut terms = Vec::with_capacity(f.num_terms());
        let mut max_deg = vec![0usize; n];
        for (e, c) in f.terms() {
            let c = c.to_prime(p)?.value();
            if c == 0 {
                continue;
            }
            let e: Vec<u32> = e.0.iter().map(|&k| k as u32).collect();
            for (m, &k) in max_deg.iter_mut().zip(&e) {
                *m = (*m).max(k as usize);
            }
            terms.push((e, c));
        }
        Ok(FpPoly { p, nvars: n, max_deg, terms })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn eval(&self, x: &[u64]) -> u64 {
        let p = self.p;
        let powers: Vec<Vec<u64>> = x
            .iter()
            .zip(&self.max_deg)
            .map(|(&v, &d)| {
                let mut row = Vec::with_capacity(d + 1);
                let mut acc = 1 % p;
                for _ in 0..=d {
                    row.push(acc);
                    acc = mulmod(acc, v, p);
                }
                row
            })
            .collect();
        let mut sum = 0u64;
        for (e, c) in &self.terms {
            let mut t = *c;
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = mulmod(t, powers[i][k as usize], p);
                }
            }
            sum = (sum + t) % p;
        }
        sum
    }
}

/// Normalized points of `P^{n-1}(F_p)`, indexed `0..count`.
#[derive(Debug, Clone, Copy)]
pub struct ProjectivePoints {
    pub coords: usize,
    pub p: u64,
}

impl ProjectivePoints {
    pub fn new(coords: usize, p: u64) -> Result<Self, VerifyError> {
        let pts = ProjectivePoints { coords, p };
        let count = pts.count_u128();
        if count > ENUMERATION_GUARD as u128 {
            return Err(VerifyError::GuardExceeded { points: count });
        }
        Ok(pts)
    }

    fn count_u128(&self) -> u128 {
        let q = self.p as u128;
        (0..self.coords as u32).map(|k| q.pow(k)).sum()
    }

    /// `(p^n - 1) / (p - 1)`.
    pub fn count(&self) -> u64 {
        self.count_u128() as u64
    }

    /// Point number `idx`: the leading 1 sits in the first slot for the
    /// first `p^{n-1}` indices, then the second slot, and so on.
    pub fn point(&self, mut idx: u64) -> Vec<u64> {
        let n = self.coords;
        let mut x = vec![0u64; n];
        for lead in 0..n {
            let block = self.p.pow((n - 1 - lead) as u32);
            if idx < block {
                x[lead] = 1;
                for slot in (lead + 1..n).rev() {
                    x[slot] = idx % self.p;
                    idx /= self.p;
                }
                return x;
            }
            idx -= block;
        }
        unreachable!("index below count")
    }
}

/// Scales `x` so its first nonzero coordinate is 1; false for the zero vector.
pub fn normalize(x: &mut [u64], p: u64) -> bool {
    let Some(&lead) = x.iter().find(|&&v| v != 0) else {
        return false;
    };
    let inv = crate::coeffs::Fp::new(lead, p).expect("reduced").inverse().expect("nonzero").value();
    for v in x.iter_mut() {
        *v = mulmod(*v, inv, p);
    }
    true
}

fn require_prime(q: u64) -> Result<(), VerifyError> {
    if is_prime(q) {
        Ok(())
    } else {
        Err(VerifyError::NotPrime(q))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanReport {
    pub prime: u64,
    pub field_size: u64,
    pub scanned: u64,
    pub singular: Vec<Vec<u64>>,
    pub elapsed_ms: u128,
    /// Always true: the scan is a semi-decision over one finite field.
    pub evidence_only: bool,
}

/// Lists the `F_q`-points where `F` and all its partial derivatives vanish.
pub fn smooth_scan<C: Coeff + ToPrimeField>(f: &LaurentPoly<C>, q: u64) -> Result<ScanReport, VerifyError> {
    require_prime(q)?;
    let degree = f.homogeneous_degree().ok_or(PolyError::NotHomogeneous)?;
    if q == 2 || q == 3 || degree % q as i64 == 0 {
        return Err(VerifyError::BadCharacteristic { p: q, degree });
    }
    let start = Instant::now();
    let mut polys = vec![FpPoly::new(f, q)?];
    for i in 0..f.nvars() {
        polys.push(FpPoly::new(&f.partial_deriv(i)?, q)?);
    }
    let pts = ProjectivePoints::new(f.nvars(), q)?;
    let singular: Vec<Vec<u64>> = (0..pts.count())
        .into_par_iter()
        .filter_map(|i| {
            let x = pts.point(i);
            polys.iter().all(|g| g.eval(&x) == 0).then_some(x)
        })
        .collect();
    Ok(ScanReport {
        prime: q,
        field_size: q,
        scanned: pts.count(),
        singular,
        elapsed_ms: start.elapsed().as_millis(),
        evidence_only: true,
    })
}

/// Closed-form smoothness of a diagonal form `sum a_i x_i^d` in
/// characteristic zero: smooth exactly when every variable has its own
/// nonzero pure power. `None` when `F` is not diagonal.
pub fn diagonal_form_smooth<C: Coeff>(f: &LaurentPoly<C>) -> Option<bool> {
    let d = f.homogeneous_degree()?;
    if d < 2 {
        return None;
    }
    let mut covered = vec![false; f.nvars()];
    for (e, _) in f.terms() {
        let support: Vec<usize> = (0..e.len()).filter(|&i| e.0[i] != 0).collect();
        if support.len() != 1 {
            return None;
        }
        covered[support[0]] = true;
    }
    Some(covered.iter().all(|&c| c))
}

/// True when `F_target` pulled back along `map` is identically zero.
pub fn on_variety<C: Coeff>(map: &RationalMap<C>, f_target: &LaurentPoly<C>) -> Result<bool, VerifyError> {
    if map.components().len() != f_target.nvars() {
        return Err(VerifyError::DimensionMismatch { expected: map.components().len(), got: f_target.nvars() });
    }
    Ok(map.pullback(f_target)?.is_zero())
}

/// A rational map with components compiled mod `p`.
#[derive(Debug, Clone)]
pub struct FpMap {
    p: u64,
    comps: Vec<FpPoly>,
}

impl FpMap {
    pub fn new<C: Coeff + ToPrimeField>(map: &RationalMap<C>, p: u64) -> Result<Self, VerifyError> {
        let comps = map.components().iter().map(|c| FpPoly::new(c, p)).collect::<Result<_, _>>()?;
        Ok(FpMap { p, comps })
    }

    /// Normalized image, or `None` at an indeterminacy point.
    pub fn apply(&self, x: &[u64]) -> Option<Vec<u64>> {
        let mut y: Vec<u64> = self.comps.iter().map(|c| c.eval(x)).collect();
        normalize(&mut y, self.p).then_some(y)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiberHistogram {
    pub prime: u64,
    pub source_points: u64,
    /// Source points where every component vanishes.
    pub indeterminacy: u64,
    pub image_points: u64,
    /// Fiber size -> number of image points with that many preimages.
    pub histogram: BTreeMap<usize, u64>,
    /// Most frequent fiber size (smallest size on ties).
    pub degree: usize,
    /// Share of image points whose fiber has size `degree`.
    pub mode_share: f64,
}

/// Maps every source point of `P^m(F_q)` and counts preimages per image.
pub fn fiber_histogram<C: Coeff + ToPrimeField>(map: &RationalMap<C>, q: u64) -> Result<FiberHistogram, VerifyError> {
    require_prime(q)?;
    let fmap = FpMap::new(map, q)?;
    let pts = ProjectivePoints::new(map.source().len(), q)?;
    let (counts, indeterminacy) = (0..pts.count())
        .into_par_iter()
        .fold(
            || (HashMap::<Vec<u64>, usize>::new(), 0u64),
            |(mut acc, bad), i| match fmap.apply(&pts.point(i)) {
                Some(y) => {
                    *acc.entry(y).or_insert(0) += 1;
                    (acc, bad)
                }
                None => (acc, bad + 1),
            },
        )
        .reduce(
            || (HashMap::new(), 0),
            |(mut a, x), (b, y)| {
                for (k, v) in b {
                    *a.entry(k).or_insert(0) += v;
                }
                (a, x + y)
            },
        );
    let mut histogram = BTreeMap::new();
    for &size in counts.values() {
        *histogram.entry(size).or_insert(0u64) += 1;
    }
    let image_points = counts.len() as u64;
    let (degree, top) = histogram
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
        .map(|(&s, &c)| (s, c))
        .unwrap_or((0, 0));
    Ok(FiberHistogram {
        prime: q,
        source_points: pts.count(),
        indeterminacy,
        image_points,
        histogram,
        degree,
        mode_share: if image_points == 0 { 0.0 } else { top as f64 / image_points as f64 },
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuotientFiberReport {
    pub prime: u64,
    pub group_order: u64,
    /// Points of `X` with every coordinate nonzero.
    pub torus_points: u64,
    /// Torus points whose image fails to satisfy `F_NC`.
    pub off_target: u64,
    /// Fibers that differ from the group orbit of their points.
    pub non_orbit_fibers: u64,
    /// Fiber size -> number of image points.
    pub fiber_sizes: BTreeMap<usize, u64>,
    pub generic_fiber: usize,
}

impl QuotientFiberReport {
    pub fn passed(&self) -> bool {
        self.off_target == 0
            && self.non_orbit_fibers == 0
            && self.generic_fiber as u64 == self.group_order
            && self.fiber_sizes.keys().all(|&s| self.group_order % s as u64 == 0)
    }
}

/// Every element of the group as per-coordinate scalars in `F_p`.
fn group_scalars(action: &DiagonalAction, p: u64) -> Result<Vec<Vec<u64>>, VerifyError> {
    let n = action.n_vars();
    let mut elems = vec![vec![1 % p; n]];
    for g in action.generators() {
        let z = root_embed(g.order, p).map_err(|_| VerifyError::NoRoots { order: g.order, p })?.value();
        let step: Vec<u64> = g.weights.iter().map(|&w| crate::coeffs::Fp::new(z, p).unwrap().pow(w as u64).value()).collect();
        let mut next = Vec::with_capacity(elems.len() * g.order as usize);
        for e in &elems {
            let mut cur = e.clone();
            for _ in 0..g.order {
                next.push(cur.clone());
                cur = cur.iter().zip(&step).map(|(&a, &b)| mulmod(a, b, p)).collect();
            }
        }
        elems = next;
    }
    Ok(elems)
}

/// Checks on the torus of `X = {step.input = 0}` that the step's forward map
/// lands on `F_NC` and that its fibers are exactly the orbits of the
/// quotiented group.
pub fn quotient_fiber_check<C: Coeff + ToPrimeField>(step: &NCStep<C>, q: u64) -> Result<QuotientFiberReport, VerifyError> {
    require_prime(q)?;
    let n = step.input.nvars();
    let f = FpPoly::new(&step.input, q)?;
    let target = FpPoly::new(&step.output, q)?;
    let fmap = FpMap::new(&step.forward, q)?;
    let scalars = group_scalars(&step.action, q)?;
    let group_order = step.action.group_order().map_err(NcError::from)?;
    let torus = (q - 1) as u128;
    if torus.pow(n as u32 - 1) > ENUMERATION_GUARD as u128 {
        return Err(VerifyError::GuardExceeded { points: torus.pow(n as u32 - 1) });
    }
    // Torus points with x_0 = 1, indexed in base q-1.
    let count = (q - 1).pow(n as u32 - 1);
    let point = |mut i: u64| {
        let mut x = vec![1u64; n];
        for slot in (1..n).rev() {
            x[slot] = i % (q - 1) + 1;
            i /= q - 1;
        }
        x
    };
    let on_x: Vec<Vec<u64>> = (0..count).into_par_iter().map(point).filter(|x| f.eval(x) == 0).collect();

    let images: Vec<Option<Vec<u64>>> = on_x.par_iter().map(|x| fmap.apply(x)).collect();
    let mut off_target = 0;
    let mut fibers: BTreeMap<Vec<u64>, BTreeSet<Vec<u64>>> = BTreeMap::new();
    for (x, y) in on_x.iter().zip(images) {
        match y {
            Some(y) if target.eval(&y) == 0 => {
                fibers.entry(y).or_default().insert(x.clone());
            }
            _ => off_target += 1,
        }
    }
    let non_orbit_fibers = fibers
        .par_iter()
        .filter(|(_, fiber)| {
            let rep = fiber.iter().next().expect("fibers are nonempty");
            let orbit: BTreeSet<Vec<u64>> = scalars
                .iter()
                .map(|s| {
                    let mut y: Vec<u64> = rep.iter().zip(s).map(|(&a, &b)| mulmod(a, b, q)).collect();
                    normalize(&mut y, q);
                    y
                })
                .collect();
            orbit != **fiber
        })
        .count() as u64;
    let mut fiber_sizes = BTreeMap::new();
    for fiber in fibers.values() {
        *fiber_sizes.entry(fiber.len()).or_insert(0u64) += 1;
    }
    let generic_fiber =
        fiber_sizes.iter().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0))).map(|(&s, _)| s).unwrap_or(0);
    Ok(QuotientFiberReport {
        prime: q,
        group_order,
        torus_points: on_x.len() as u64,
        off_target,
        non_orbit_fibers,
        fiber_sizes,
        generic_fiber,
    })
}

/// Smallest prime `p >= 7` with every order dividing `p - 1`.
pub fn default_prime(orders: &[u32]) -> u64 {
    let l = orders.iter().fold(1u64, |acc, &o| num_integer::lcm(acc, o.max(1) as u64));
    (7u64..).find(|&p| is_prime(p) && (p - 1) % l == 0).expect("primes in progressions are infinite")
}
