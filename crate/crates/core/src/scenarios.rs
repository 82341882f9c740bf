//! Registry of worked examples, each rebuilt from its published inputs and
//! checked against the published outputs plus independent finite-field
//! oracles.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::action::{ActionError, DiagonalAction};
use crate::cli::{parse_expr, ExprContext, ParseError};
use crate::coeffs::{Coeff, CoeffError, Cyclotomic, ParamCoeff, Rational};
use crate::lattice::IntMatrix;
use crate::nc::{
    coefficient_multiset, compose_maps, linear_witness, nc_step, parametrize_linear, validate_basis, BasisDiagnosis,
    NCChain, NCStep, NcError, RationalMap,
};
use crate::poly::{indexed_vars, LaurentPoly, PolyError, Vars};
use crate::verify::{
    default_prime, diagonal_form_smooth, fiber_histogram, on_variety, quotient_fiber_check, smooth_scan, FpMap,
    ProjectivePoints, VerifyError,
};

type PPoly = LaurentPoly<ParamCoeff>;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("unknown scenario `{0}`")]
    Unknown(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Nc(#[from] NcError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

/// Where an expected value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    /// Stated verbatim in the worked example.
    Published,
    /// Computed independently of the engine under test.
    Computed,
    /// Follows from definitions alone.
    Structural,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Origin::Published => "published",
            Origin::Computed => "computed",
            Origin::Structural => "structural",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Assertion {
    pub label: String,
    pub origin: Origin,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub scenario: String,
    pub summary: String,
    pub passed: bool,
    pub assertions: Vec<Assertion>,
    pub objects: BTreeMap<String, serde_json::Value>,
    pub elapsed_ms: u128,
}

impl Report {
    fn new(name: &str) -> Self {
        let summary = SCENARIOS.iter().find(|s| s.name == name).map(|s| s.summary).unwrap_or_default();
        Report {
            scenario: name.to_string(),
            summary: summary.to_string(),
            passed: true,
            assertions: Vec::new(),
            objects: BTreeMap::new(),
            elapsed_ms: 0,
        }
    }

    fn check(&mut self, label: impl Into<String>, origin: Origin, passed: bool, detail: impl FnOnce() -> String) {
        let detail = (!passed).then(detail);
        self.passed &= passed;
        self.assertions.push(Assertion { label: label.into(), origin, passed, detail });
    }

    fn check_poly<C: Coeff>(&mut self, label: &str, origin: Origin, got: &LaurentPoly<C>, expected: &LaurentPoly<C>) {
        let diff = first_difference(got, expected);
        self.check(label, origin, diff.is_none(), || diff.unwrap_or_default());
    }

    fn check_eq<T: PartialEq + fmt::Debug>(&mut self, label: &str, origin: Origin, got: T, expected: T) {
        let ok = got == expected;
        self.check(label, origin, ok, || format!("got {got:?}, expected {expected:?}"));
    }

    fn record(&mut self, key: &str, value: impl Serialize) {
        self.objects.insert(key.to_string(), serde_json::to_value(value).unwrap_or(serde_json::Value::Null));
    }

    pub fn failures(&self) -> impl Iterator<Item = &Assertion> {
        self.assertions.iter().filter(|a| !a.passed)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ok = self.assertions.iter().filter(|a| a.passed).count();
        writeln!(
            f,
            "{}: {} ({}/{} assertions, {} ms)",
            self.scenario,
            if self.passed { "PASS" } else { "FAIL" },
            ok,
            self.assertions.len(),
            self.elapsed_ms
        )?;
        for a in &self.assertions {
            write!(f, "  {:<4} [{}] {}", if a.passed { "ok" } else { "FAIL" }, a.origin, a.label)?;
            if let Some(d) = &a.detail {
                write!(f, ": {d}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// The first monomial, in descending order, where two polynomials differ.
pub fn first_difference<C: Coeff>(got: &LaurentPoly<C>, expected: &LaurentPoly<C>) -> Option<String> {
    if got.vars() != expected.vars() {
        return Some(format!("variables differ: {:?} vs {:?}", got.vars(), expected.vars()));
    }
    let keys: BTreeSet<_> = got.terms().chain(expected.terms()).map(|(e, _)| e.clone()).collect();
    let one = got.coefficients().chain(expected.coefficients()).next()?.one_like();
    for e in keys.into_iter().rev() {
        let (a, b) = (got.coeff(&e), expected.coeff(&e));
        if a != b {
            let show = |c: Option<&C>| c.map_or("0".to_string(), |c| c.to_string());
            let mono = LaurentPoly::monomial(got.vars().clone(), e, one);
            return Some(format!("first mismatch at {mono}: got {}, expected {}", show(a), show(b)));
        }
    }
    None
}

pub struct ScenarioInfo {
    pub name: &'static str,
    pub summary: &'static str,
}

const SCENARIOS: &[ScenarioInfo] = &[
    ScenarioInfo { name: "ex1_chain", summary: "cyclic cubic quotient: quartic model, cubic model, fibers over F_7" },
    ScenarioInfo { name: "ex3_rationality", summary: "two-block cyclic quotient family: quintic model with a linear witness" },
    ScenarioInfo { name: "qfano_40245", summary: "Fermat cubic mod a two-block cyclic group is rational" },
    ScenarioInfo { name: "qfano_40057", summary: "order-5 quotient of a cyclic cubic: quintic model, witness x5" },
    ScenarioInfo { name: "c3c3_chain", summary: "order-9 quotient: quintic, quartic, cubic models in three steps" },
    ScenarioInfo { name: "c3cubic3_rationality", summary: "order-3 subgroup quotients of smooth cubics are rational" },
    ScenarioInfo { name: "main_parametrization", summary: "degree-3 unirational parametrization and its explicit map" },
    ScenarioInfo { name: "fermat_smoothness", summary: "singular-point scans over F_7 and the closed-form diagonal test" },
];

/// Registered scenario names with one-line summaries, in a fixed order.
pub fn list_scenarios() -> &'static [ScenarioInfo] {
    SCENARIOS
}

pub fn run_scenario(name: &str) -> Result<Report, ScenarioError> {
    let start = Instant::now();
    let mut r = Report::new(name);
    match name {
        "ex1_chain" => ex1_chain(&mut r)?,
        "ex3_rationality" => ex3_rationality(&mut r)?,
        "qfano_40245" => qfano_40245(&mut r)?,
        "qfano_40057" => qfano_40057(&mut r)?,
        "c3c3_chain" => c3c3_chain(&mut r)?,
        "c3cubic3_rationality" => c3cubic3_rationality(&mut r)?,
        "main_parametrization" => main_parametrization(&mut r)?,
        "fermat_smoothness" => fermat_smoothness(&mut r)?,
        _ => return Err(ScenarioError::Unknown(name.to_string())),
    }
    r.elapsed_ms = start.elapsed().as_millis();
    Ok(r)
}

// ---- construction helpers ----

/// Parses `text` after evaluating `lets` in order.
fn parse_with(vars: &Vars, params: &[&str], e: u32, lets: &[(&str, &str)], text: &str) -> Result<PPoly, ParseError> {
    let mut ctx = ExprContext::new(vars.clone()).with_params(params);
    if e > 1 {
        ctx = ctx.with_order(e);
    }
    for (name, body) in lets {
        let v = parse_expr(&ctx, body)?;
        ctx.lets.insert(name.to_string(), v);
    }
    parse_expr(&ctx, text)
}

fn parse(vars: &Vars, params: &[&str], e: u32, text: &str) -> Result<PPoly, ParseError> {
    parse_with(vars, params, e, &[], text)
}

fn cyclotomic(f: &PPoly) -> LaurentPoly<Cyclotomic> {
    f.to_cyclotomic().expect("parameter-free by construction")
}

/// Substitutes every parameter, using 1 unless overridden.
fn at(f: &PPoly, overrides: &[(&str, i64)]) -> Result<LaurentPoly<Cyclotomic>, CoeffError> {
    let mut values: BTreeMap<String, Cyclotomic> = f.parameters().into_iter().map(|s| (s, Cyclotomic::one())).collect();
    for (k, v) in overrides {
        values.insert(k.to_string(), Cyclotomic::from_int(*v));
    }
    f.specialize(&values)
}

fn rows(b: &[&[i64]]) -> IntMatrix {
    IntMatrix::from_i64(b)
}

fn action(n: usize, gens: &[(u32, &[i64])]) -> Result<DiagonalAction, ActionError> {
    DiagonalAction::from_weights(n, gens)
}

fn same_projective_group(a: &DiagonalAction, b: &DiagonalAction) -> bool {
    a.subgroup_index(b) == Ok(1) && b.subgroup_index(a) == Ok(1)
}

fn record_step<C: Coeff>(r: &mut Report, key: &str, s: &NCStep<C>) {
    r.record(key, s.report());
}

/// Checks the structural guarantees every step must meet.
fn check_step_invariants<C: Coeff>(r: &mut Report, label: &str, s: &NCStep<C>) -> Result<(), NcError> {
    r.check(format!("{label}: substituting u_j = x^B_j recovers the chart equation"), Origin::Structural, s.round_trip_holds()?, || {
        "round trip identity fails".into()
    });
    let same = coefficient_multiset(&s.output) == coefficient_multiset(&s.input) && s.output.num_terms() == s.input.num_terms();
    r.check(format!("{label}: term count and coefficients preserved"), Origin::Structural, same, || {
        format!("{} terms in, {} out", s.input.num_terms(), s.output.num_terms())
    });
    r.check(format!("{label}: output not divisible by the chart variable"), Origin::Structural, !s.output.divisible_by_var(s.chart), || {
        "chart variable divides the output".into()
    });
    Ok(())
}

/// `(x, y) -> (-(x + y), -zeta (x + zeta y))`, which turns `a^2 b + a b^2`
/// into `x^3 + y^3`, applied to the given pairs of coordinates.
fn cube_block_change(vars: &Vars, pairs: &[(usize, usize)]) -> Result<RationalMap<Cyclotomic>, ScenarioError> {
    let mut comps: Vec<String> = vars.iter().map(|v| v.to_string()).collect();
    for &(i, j) in pairs {
        let (x, y) = (&vars[i], &vars[j]);
        comps[i] = format!("-({x} + {y})");
        comps[j] = format!("-zeta*({x} + zeta*{y})");
    }
    let comps = comps.iter().map(|c| parse(vars, &[], 3, c).map(|p| cyclotomic(&p))).collect::<Result<Vec<_>, _>>()?;
    Ok(RationalMap::new(vars.clone(), comps)?)
}

/// Inverse of [`cube_block_change`] on the same pairs.
fn cube_block_change_inverse(vars: &Vars, pairs: &[(usize, usize)]) -> Result<RationalMap<Cyclotomic>, ScenarioError> {
    let mut comps: Vec<String> = vars.iter().map(|v| v.to_string()).collect();
    for &(i, j) in pairs {
        let (a, b) = (&vars[i], &vars[j]);
        // y = (a - zeta^2 b) / (zeta - 1) and 1/(zeta - 1) = (zeta^2 - 1)/3.
        let y = format!("(zeta^2 - 1)/3*({a} - zeta^2*{b})");
        comps[i] = format!("-{a} - {y}");
        comps[j] = y;
    }
    let comps = comps.iter().map(|c| parse(vars, &[], 3, c).map(|p| cyclotomic(&p))).collect::<Result<Vec<_>, _>>()?;
    Ok(RationalMap::new(vars.clone(), comps)?)
}

/// Linear maps send each coordinate to a form of the same character.
fn commutes_with(map: &RationalMap<Cyclotomic>, a: &DiagonalAction) -> bool {
    map.components().iter().enumerate().all(|(slot, c)| {
        let mut unit = vec![0i32; a.n_vars()];
        unit[slot] = 1;
        let want = a.character(&unit);
        c.terms().all(|(e, _)| a.character(&e.0) == want)
    })
}

/// Basis of the two-block family: u1 = x2 x3, u2 = x2 x4, u3 = x1 x3,
/// u4 = x3^2 x4 and u_i = x_i for the remaining non-chart coordinates.
fn two_block_basis(n_vars: usize) -> IntMatrix {
    let k = n_vars - 1;
    let mut b = vec![vec![0i64; k]; k];
    b[0][1] = 1;
    b[0][2] = 1;
    b[1][1] = 1;
    b[1][3] = 1;
    b[2][0] = 1;
    b[2][2] = 1;
    b[3][2] = 2;
    b[3][3] = 1;
    for (i, row) in b.iter_mut().enumerate().skip(4) {
        row[i] = 1;
    }
    IntMatrix::from_i64(&b)
}

fn two_block_action(n_vars: usize) -> Result<DiagonalAction, ActionError> {
    let mut w = vec![0i64; n_vars];
    w[..4].copy_from_slice(&[1, 1, 2, 2]);
    DiagonalAction::from_weights(n_vars, &[(3, &w)])
}

/// Fraction of points of `P^m(F_p)` where `back(forth(x)) = x`, among
/// points where both maps are defined.
fn round_trip_share<C: Coeff + crate::coeffs::ToPrimeField>(
    forth: &RationalMap<C>,
    back: &RationalMap<C>,
    p: u64,
) -> Result<(u64, u64), VerifyError> {
    let f = FpMap::new(forth, p)?;
    let g = FpMap::new(back, p)?;
    let pts = ProjectivePoints::new(forth.source().len(), p)?;
    let (mut defined, mut equal) = (0, 0);
    for i in 0..pts.count() {
        let x = pts.point(i);
        if let Some(y) = f.apply(&x) {
            if let Some(z) = g.apply(&y) {
                defined += 1;
                equal += u64::from(z == x);
            }
        }
    }
    Ok((equal, defined))
}

// ---- scenarios ----

const EX1_PARAMS: &[&str] = &["t1", "t2", "t3", "t4", "t5"];

fn ex1_chain(r: &mut Report) -> Result<(), ScenarioError> {
    let x = indexed_vars("x", 5);
    let lets = [("l", "t3*x3 + t4*x4 + t5*x5"), ("h", "x3^3 + x4^3 + x5^3")];
    let f = parse_with(&x, EX1_PARAMS, 3, &lets, "t1*x1^3 + t2*x2^3 + l*x1*x2 + h")?;
    let g = action(5, &[(3, &[1, 2, 0, 0, 0])])?;
    r.check_eq("group order", Origin::Published, g.group_order()?, 3);

    let basis = rows(&[&[1, 1, 0, 0], &[-1, 2, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]]);
    r.check_eq("u1 = x1 x2, u2 = x2^2/x1, u3 = x3, u4 = x4 is a valid basis", Origin::Published, validate_basis(&g, 4, &basis)?, BasisDiagnosis::Ok);
    let cubes = rows(&[&[3, 0, 0, 0], &[0, 3, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]]);
    r.check_eq(
        "x1^3, x2^3, x3, x4 span a sublattice of index 3",
        Origin::Computed,
        validate_basis(&g, 4, &cubes)?,
        BasisDiagnosis::ProperSublattice { index: 3 },
    );

    let s1 = nc_step(&f, &g, None, 4, &basis)?;
    let u = indexed_vars("u", 4);
    let p_expected = parse(&u, EX1_PARAMS, 3, "t1*u1^2 + t2*u1*u2^2 + (t3*u3 + t4*u4 + t5)*u1*u2 + u2*(u3^3 + u4^3 + 1)")?;
    r.check_poly("chart equation rewritten as p(u)", Origin::Published, &s1.p, &p_expected);
    r.check_eq("denominator q = u2", Origin::Published, s1.q.0.clone(), vec![0, 1, 0, 0]);
    let quartic = parse_with(&x, EX1_PARAMS, 3, &lets, "t1*x1^2*x5^2 + t2*x1*x2^2*x5 + l*x1*x2*x5 + x2*h")?;
    r.check_poly("first step gives the quartic model", Origin::Published, &s1.output, &quartic);
    r.check_eq("d_NC of the first step", Origin::Published, s1.d_nc, 4);
    check_step_invariants(r, "first step", &s1)?;

    let b2 = rows(&[&[1, 0, 0, 1], &[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]]);
    let s2 = nc_step(&s1.output, &DiagonalAction::trivial(5), None, 1, &b2)?;
    let cubic = parse_with(&x, EX1_PARAMS, 3, &lets, "t1*x1^2*x2 + t2*x1*x2^2 + l*x1*x2 + h")?;
    r.check_poly("second step gives the cubic model", Origin::Published, &s2.output, &cubic);
    r.check_eq("d_NC of the second step", Origin::Published, s2.d_nc, 3);
    check_step_invariants(r, "second step", &s2)?;
    record_step(r, "step1", &s1);
    record_step(r, "step2", &s2);

    let chain = NCChain::from_steps(vec![s1, s2])?;
    r.check_eq("chain degree", Origin::Structural, chain.degree()?, 3);

    // Finite-field fibers at t = 1.
    let f1 = at(&f, &[])?;
    let s1_num = nc_step(&f1, &g, None, 4, &basis)?;
    let q = default_prime(&[3]);
    let fib = quotient_fiber_check(&s1_num, q)?;
    r.check(format!("over F_{q}: torus points land on the quartic, fibers are orbits, generic fiber 3"), Origin::Computed, fib.passed() && fib.generic_fiber == 3, || {
        format!("{fib:?}")
    });
    r.record("fibers_step1", &fib);
    let s2_num = nc_step(&s1_num.output, &DiagonalAction::trivial(5), None, 1, &b2)?;
    let fib2 = quotient_fiber_check(&s2_num, q)?;
    r.check("trivial-group step has fibers of size 1", Origin::Structural, fib2.passed() && fib2.fiber_sizes.keys().all(|&k| k == 1), || {
        format!("{fib2:?}")
    });
    Ok(())
}

/// Parameters of the two-block family with `l_i = sum_j t_ij x_j`.
fn two_block_params(extra: &[usize]) -> Vec<String> {
    let mut out: Vec<String> = (1..=4).map(|i| format!("t{i}")).collect();
    for i in 1..=4 {
        for j in extra {
            out.push(format!("t{i}{j}"));
        }
    }
    out
}

fn ex3_rationality(r: &mut Report) -> Result<(), ScenarioError> {
    // Six coordinates: the chart x6 keeps h = x5^3 + x6^3 coprime to it.
    let x = indexed_vars("x", 6);
    let params = two_block_params(&[5, 6]);
    let params: Vec<&str> = params.iter().map(String::as_str).collect();
    let lets = [
        ("l1", "t15*x5 + t16*x6"),
        ("l2", "t25*x5 + t26*x6"),
        ("l3", "t35*x5 + t36*x6"),
        ("l4", "t45*x5 + t46*x6"),
        ("h", "x5^3 + x6^3"),
    ];
    let f = parse_with(&x, &params, 3, &lets, "t1*x1^2*x2 + t2*x2^2*x1 + t3*x3^2*x4 + t4*x4^2*x3 + l1*x1*x3 + l2*x1*x4 + l3*x2*x3 + l4*x2*x4 + h")?;
    let g = two_block_action(6)?;
    let basis = two_block_basis(6);
    r.check_eq("two-block basis is valid", Origin::Published, validate_basis(&g, 5, &basis)?, BasisDiagnosis::Ok);
    let s = nc_step(&f, &g, None, 5, &basis)?;
    let p1 = parse_with(
        &x,
        &params,
        3,
        &lets,
        "t1*x1*x2*x3^2*x6 + t2*x1^2*x2*x3*x6 + t3*x1*x4^2*x6^2 + t4*x2*x4^2*x6^2 + l1*x1*x3*x4*x6 + l2*x2*x3*x4*x6 + l3*x1^2*x4*x6 + l4*x1*x2*x4*x6 + x1*x4*h",
    )?;
    r.check_poly("quintic model p1 in six coordinates", Origin::Published, &s.output, &p1);
    r.check_eq("q = u1 u4", Origin::Computed, s.q.0.clone(), vec![1, 0, 0, 1, 0]);
    check_step_invariants(r, "six-coordinate step", &s)?;
    r.check_eq("linear witness of p1", Origin::Published, linear_witness(&s.output).map(|i| x[i].to_string()), Some("x2".into()));
    let param = parametrize_linear(&s.output, 1)?;
    r.check("parametrization solving for x2 lies on p1", Origin::Structural, on_variety(&param, &s.output)?, String::new);
    record_step(r, "step", &s);

    // Five coordinates (threefolds): every term of the published p1 carries x5 once more than needed.
    let y = indexed_vars("x", 5);
    let params5 = two_block_params(&[5]);
    let params5: Vec<&str> = params5.iter().map(String::as_str).collect();
    let lets5 = [("l1", "t15*x5"), ("l2", "t25*x5"), ("l3", "t35*x5"), ("l4", "t45*x5"), ("h", "x5^3")];
    let f5 = parse_with(&y, &params5, 3, &lets5, "t1*x1^2*x2 + t2*x2^2*x1 + t3*x3^2*x4 + t4*x4^2*x3 + l1*x1*x3 + l2*x1*x4 + l3*x2*x3 + l4*x2*x4 + h")?;
    let s5 = nc_step(&f5, &two_block_action(5)?, None, 4, &two_block_basis(5))?;
    let p1_5 = parse_with(
        &y,
        &params5,
        3,
        &lets5,
        "(t1*x1*x2*x3^2*x5 + t2*x1^2*x2*x3*x5 + t3*x1*x4^2*x5^2 + t4*x2*x4^2*x5^2 + l1*x1*x3*x4*x5 + l2*x2*x3*x4*x5 + l3*x1^2*x4*x5 + l4*x1*x2*x4*x5 + x1*x4*h)/x5",
    )?;
    r.check_poly("five-coordinate model is the published p1 divided by x5", Origin::Computed, &s5.output, &p1_5);
    r.check_eq("five-coordinate d_NC", Origin::Computed, s5.d_nc, 4);
    r.check_eq("linear witness of the five-coordinate model", Origin::Published, linear_witness(&s5.output).map(|i| y[i].to_string()), Some("x2".into()));
    let param5 = parametrize_linear(&s5.output, 1)?;
    r.check("symbolic parametrization lies on the model", Origin::Structural, on_variety(&param5, &s5.output)?, String::new);

    // Concrete instance for the round trip through the projection.
    let num = at(&s5.output, &[("t25", 2), ("t35", -1), ("t45", 3)])?;
    let param_num = parametrize_linear(&num, 1)?;
    let proj = RationalMap::projection(y.clone(), 1, Cyclotomic::one())?;
    let composite = compose_maps(&proj, &param_num)?;
    let id = RationalMap::identity(param_num.source().clone(), Cyclotomic::one());
    r.check_eq("projection after parametrization is the identity", Origin::Structural, composite == id, true);
    let (equal, defined) = round_trip_share(&param_num, &proj, 7)?;
    let share = equal as f64 / defined.max(1) as f64;
    r.check(format!("pointwise round trip over P^3(F_7): {equal}/{defined}"), Origin::Computed, share >= 0.95, || format!("share {share:.3}"));
    r.record("round_trip", serde_json::json!({ "equal": equal, "defined": defined }));
    Ok(())
}

fn qfano_40245(r: &mut Report) -> Result<(), ScenarioError> {
    let x = indexed_vars("x", 5);
    let fermat = cyclotomic(&parse(&x, &[], 3, "x1^3 + x2^3 + x3^3 + x4^3 + x5^3")?);
    let g = two_block_action(5)?;
    r.check_eq("group order", Origin::Published, g.group_order()?, 3);
    r.check("Fermat cubic is invariant", Origin::Published, g.is_invariant(&fermat)?.invariant, String::new);

    // In coordinates z = L(x) the Fermat cubic is the two-block normal form.
    let change = cube_block_change(&x, &[(0, 1), (2, 3)])?;
    r.check("block change commutes with the group", Origin::Structural, commutes_with(&change, &g), String::new);
    let normal = cyclotomic(&parse(&x, &[], 3, "x1^2*x2 + x1*x2^2 + x3^2*x4 + x3*x4^2 + x5^3")?);
    r.check_poly("normal form pulled back along the block change is the Fermat cubic", Origin::Computed, &change.pullback(&normal)?, &fermat);
    let inverse = cube_block_change_inverse(&x, &[(0, 1), (2, 3)])?;
    let id = RationalMap::identity(x.clone(), Cyclotomic::one());
    r.check_eq("block change is invertible", Origin::Computed, compose_maps(&change, &inverse)? == id, true);

    let s = nc_step(&normal, &g, None, 4, &two_block_basis(5))?;
    check_step_invariants(r, "two-block step", &s)?;
    let w = linear_witness(&s.output);
    r.check_eq("model has a linear witness", Origin::Published, w.map(|i| x[i].to_string()), Some("x2".into()));
    if let Some(i) = w {
        r.check("parametrization lies on the model", Origin::Structural, on_variety(&parametrize_linear(&s.output, i)?, &s.output)?, String::new);
    }
    record_step(r, "step", &s);
    Ok(())
}

fn qfano_40057(r: &mut Report) -> Result<(), ScenarioError> {
    let x = indexed_vars("x", 5);
    let f = cyclotomic(&parse(&x, &[], 5, "x1^2*x2 + x2^2*x3 + x3^2*x4 + x4^2*x1 + x5^3")?);
    let g = action(5, &[(5, &[1, 3, 4, 2, 0])])?;
    r.check_eq("group order", Origin::Published, g.group_order()?, 5);
    let basis = rows(&[&[0, 1, 0, 1], &[0, 1, 3, 0], &[0, 0, 2, 1], &[1, 0, 0, 2]]);
    r.check_eq("u1 = x2 x4, u2 = x2 x3^3, u3 = x3^2 x4, u4 = x1 x4^2 is a valid basis", Origin::Published, validate_basis(&g, 4, &basis)?, BasisDiagnosis::Ok);
    let s = nc_step(&f, &g, None, 4, &basis)?;
    let expected = cyclotomic(&parse(&x, &[], 5, "x2^2*x4^2*x5 + x1^2*x2*x3^2 + x1*x3^4 + x1*x3^3*x4 + x1*x3^3*x5")?);
    r.check_poly("quintic model", Origin::Published, &s.output, &expected);
    check_step_invariants(r, "order-5 step", &s)?;
    r.check_eq("linear witness", Origin::Published, linear_witness(&s.output).map(|i| x[i].to_string()), Some("x5".into()));
    let param = parametrize_linear(&s.output, 4)?;
    r.check("parametrization lies on the model", Origin::Structural, on_variety(&param, &s.output)?, String::new);
    let q = default_prime(&[5]);
    let fib = quotient_fiber_check(&s, q)?;
    r.check(format!("over F_{q}: fibers are orbits of size 5"), Origin::Computed, fib.passed(), || format!("{fib:?}"));
    record_step(r, "step", &s);
    r.record("fibers", &fib);
    Ok(())
}

const C3C3_PARAMS: &[&str] = &["t1", "t2", "t3", "t4", "t5", "t6", "t7"];

fn c3c3_cubic(x: &Vars) -> Result<PPoly, ParseError> {
    parse(x, C3C3_PARAMS, 3, "t1*x1^3 + t2*x2^3 + t3*x3^3 + t4*x4^3 + t5*x5^3 + t6*x1*x2*x3 + t7*x2*x4*x5")
}

fn c3c3_group() -> Result<DiagonalAction, ActionError> {
    action(5, &[(3, &[1, 0, 2, 0, 0]), (3, &[0, 1, 2, 2, 0])])
}

fn c3c3_chain(r: &mut Report) -> Result<(), ScenarioError> {
    let x = indexed_vars("x", 5);
    let f = c3c3_cubic(&x)?;
    let g = c3c3_group()?;
    r.check_eq("group order", Origin::Published, g.group_order()?, 9);
    let b1 = rows(&[&[1, 0, 1, -1], &[0, 1, 0, 1], &[0, 0, 3, 0], &[0, 0, 0, 3]]);
    r.check_eq("u1 = x1 x3/x4, u2 = x2 x4, u3 = x3^3, u4 = x4^3 is a valid basis", Origin::Published, validate_basis(&g, 4, &b1)?, BasisDiagnosis::Ok);
    let s1 = nc_step(&f, &g, None, 4, &b1)?;
    let quintic = parse(&x, C3C3_PARAMS, 3, "t1*x1^3*x4^2 + t2*x2^3*x3*x5 + t3*x3^2*x4*x5^2 + t4*x3*x4^2*x5^2 + t5*x3*x4*x5^3 + t6*x1*x2*x3*x4*x5 + t7*x2*x3*x4*x5^2")?;
    r.check_poly("first step gives the quintic", Origin::Published, &s1.output, &quintic);

    let triv = DiagonalAction::trivial(5);
    let b2 = rows(&[&[1, 0, 0, 0], &[0, 1, 0, 1], &[0, 0, 1, 0], &[0, 0, 0, 1]]);
    let s2 = nc_step(&s1.output, &triv, None, 0, &b2)?;
    let quartic = parse(&x, C3C3_PARAMS, 3, "t1*x1^2*x4^2 + t2*x2^3*x3 + t3*x1*x3^2*x4 + t4*x3*x4^2*x5 + t5*x3*x4*x5^2 + t6*x1*x2*x3*x4 + t7*x2*x3*x4*x5")?;
    r.check_poly("second step gives the quartic", Origin::Published, &s2.output, &quartic);

    let b3 = rows(&[&[1, 0, 1, 0], &[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]]);
    let s3 = nc_step(&s2.output, &triv, None, 2, &b3)?;
    let cubic = parse(&x, C3C3_PARAMS, 3, "t1*x1^2*x3 + t2*x2^3 + t3*x1*x3^2 + t4*x4^2*x5 + t5*x4*x5^2 + t6*x1*x2*x3 + t7*x2*x4*x5")?;
    r.check_poly("third step gives the cubic", Origin::Published, &s3.output, &cubic);
    for (label, s) in [("first step", &s1), ("second step", &s2), ("third step", &s3)] {
        check_step_invariants(r, label, s)?;
        record_step(r, label, s);
    }
    let chain = NCChain::from_steps(vec![s1, s2, s3])?;
    r.check_eq("chain degree", Origin::Structural, chain.degree()?, 9);

    let s1_num = nc_step(&at(&f, &[])?, &g, None, 4, &b1)?;
    let fib = quotient_fiber_check(&s1_num, 7)?;
    r.check("over F_7: fibers of the first step are orbits, generic fiber 9", Origin::Computed, fib.passed() && fib.generic_fiber == 9, || {
        format!("{fib:?}")
    });
    r.record("fibers_step1", &fib);

    // With t = (1,1,1,1,1,0,0) the final cubic is the Fermat cubic after the block change.
    let fermat_model = at(&cubic, &[("t6", 0), ("t7", 0)])?;
    let change = cube_block_change(&x, &[(0, 2), (3, 4)])?;
    let fermat = cyclotomic(&parse(&x, &[], 3, "x1^3 + x2^3 + x3^3 + x4^3 + x5^3")?);
    r.check_poly("at t6 = t7 = 0 a block change identifies the model with the Fermat cubic", Origin::Computed, &change.pullback(&fermat_model)?, &fermat);
    Ok(())
}

/// The smooth normal form for the two-block group, t1..t9 symbolic.
fn normalized_two_block_cubic(x: &Vars) -> Result<PPoly, ParseError> {
    let params = ["t1", "t2", "t3", "t4", "t5", "t6", "t7", "t8", "t9"];
    parse(x, &params, 3, "t1*x1^2*x2 + t2*x1*x2^2 + t3*x3^2*x4 + t4*x3*x4^2 + t5*x1*x3*x5 + t6*x2*x3*x5 + t7*x1*x4*x5 + t8*x2*x4*x5 + t9*x5^3")
}

fn c3cubic3_rationality(r: &mut Report) -> Result<(), ScenarioError> {
    let x = indexed_vars("x", 5);
    let g1 = action(5, &[(3, &[0, 1, 2, 2, 0])])?;
    let shifted = action(5, &[(3, &[2, 0, 1, 1, 2])])?;
    r.check("diag(1,z,z^2,z^2,1) and diag(z^2,1,z,z,z^2) generate the same projective group", Origin::Published, same_projective_group(&g1, &shifted), String::new);
    // Swapping x2 and x5 turns the shifted generator into the square of (1,1,2,2,0).
    let swapped = action(5, &[(3, &[2, 2, 1, 1, 0])])?;
    let normal_group = two_block_action(5)?;
    r.check("after swapping x2 and x5 the group is generated by diag(z,z,z^2,z^2,1)", Origin::Computed, same_projective_group(&swapped, &normal_group), String::new);

    let f = normalized_two_block_cubic(&x)?;
    let inv = normal_group.is_invariant(&f)?;
    r.check("normal form is invariant", Origin::Published, inv.invariant, || format!("{:?}", inv.offender));
    let s = nc_step(&f, &normal_group, None, 4, &two_block_basis(5))?;
    check_step_invariants(r, "two-block step", &s)?;
    let w = linear_witness(&s.output);
    r.check_eq("model has a linear witness", Origin::Computed, w.map(|i| x[i].to_string()), Some("x2".into()));
    if let Some(i) = w {
        r.check("parametrization lies on the model", Origin::Structural, on_variety(&parametrize_linear(&s.output, i)?, &s.output)?, String::new);
    }
    record_step(r, "step", &s);
    Ok(())
}

/// Builds the explicit degree-3 map from `P^3` to the Fermat cubic.
pub fn explicit_fermat_map() -> Result<RationalMap<Cyclotomic>, ScenarioError> {
    let x = indexed_vars("x", 4);
    let lets = [
        ("l1", "x1 - zeta*x3"),
        ("l2", "x2 + x4"),
        ("l3", "x1 - zeta^2*x3"),
        ("h1", "x1^2*x3 + x1*x3^2 + zeta^2*x2^2*x4 - zeta*x2*x4^2"),
        ("h2", "x1^2*x2*x3 + x1*x2*x3^2 + x2^2*x4^2"),
        ("h3", "x1^2*x3 + x1*x3^2 + zeta*x2^2*x4 - zeta^2*x2*x4^2"),
    ];
    let comps = [
        "h1*h2*l1*l2^2*l3^3 + zeta*h1*h3^3*l1",
        "3*h1*h2*h3*l1*l2*l3",
        "-zeta*h1*h2*l1*l2^2*l3^3 - h1*h3^3*l1",
        "h1^3*h3*l3 + zeta*h2*h3*l1^3*l2^2*l3",
        "-zeta*h1^3*h3*l3 - h2*h3*l1^3*l2^2*l3",
    ];
    let comps = comps.iter().map(|c| parse_with(&x, &[], 3, &lets, c).map(|p| cyclotomic(&p))).collect::<Result<Vec<_>, _>>()?;
    Ok(RationalMap::new(indexed_vars("x", 5), comps)?)
}

fn main_parametrization(r: &mut Report) -> Result<(), ScenarioError> {
    let x = indexed_vars("x", 5);
    let g = c3c3_group()?;
    let g1 = action(5, &[(3, &[0, 1, 2, 2, 0])])?;
    r.check_eq("[G : G1]", Origin::Published, g.subgroup_index(&g1)?, 3);

    // X/G1 is rational: after a coordinate swap and a block change the
    // cubic (t1..t5 = 1) is in the two-block normal form.
    let f = c3c3_cubic(&x)?;
    let f_sym = {
        let mut v: BTreeMap<String, Cyclotomic> = BTreeMap::new();
        for t in ["t1", "t2", "t3", "t4", "t5"] {
            v.insert(t.into(), Cyclotomic::one());
        }
        f.partial_specialize(&v)?
    };
    // y = (x3, x4, x1, x5, x2) carries the weights (1,1,2,2,0); x_i = y_perm[i].
    let perm = [2usize, 4, 0, 1, 3];
    let y_of_x: Vec<PPoly> = perm.iter().map(|&k| PPoly::var(x.clone(), k, ParamCoeff::from_int(1))).collect();
    let f_y = f_sym.substitute(&y_of_x)?;
    let swapped_group = action(5, &[(3, &[1, 1, 2, 2, 0])])?;
    r.check("permuted cubic is invariant under diag(z,z,z^2,z^2,1)", Origin::Computed, swapped_group.is_invariant(&f_y)?.invariant, String::new);
    let inverse = cube_block_change_inverse(&x, &[(0, 1), (2, 3)])?.map_coeffs(|c| ParamCoeff::constant(c.clone()));
    let f_z = inverse.pullback(&f_y)?;
    let allowed = |e: &[i32]| {
        let block_a = e[0] + e[1];
        let block_b = e[2] + e[3];
        match (block_a, block_b, e[4]) {
            (3, 0, 0) => e[0] != 3 && e[1] != 3,
            (0, 3, 0) => e[2] != 3 && e[3] != 3,
            (1, 1, 1) | (0, 0, 3) => true,
            _ => false,
        }
    };
    r.check("cubic in block coordinates has the two-block normal shape", Origin::Computed, f_z.terms().all(|(e, _)| allowed(&e.0)), || f_z.to_string());
    let s_z = nc_step(&f_z, &swapped_group, None, 4, &two_block_basis(5))?;
    let w = linear_witness(&s_z.output);
    r.check_eq("G1 model in block coordinates has linear witness x2", Origin::Computed, w, Some(1));
    if let Some(i) = w {
        let param = parametrize_linear(&s_z.output, i)?;
        r.check("rational parametrization of the G1 model", Origin::Structural, on_variety(&param, &s_z.output)?, String::new);
    }

    // The chain in the original coordinates: G1 step, then the residual group.
    let b_a = g1.invariant_lattice_at(4)?.hnf().matrix().clone();
    let step_a = nc_step(&f, &g, Some(&g1), 4, &b_a)?;
    r.check_eq("residual group order equals [G : G1]", Origin::Structural, step_a.residual.group_order()?, 3);
    let chart_b = step_a.residual.default_chart();
    let b_b = step_a.residual.invariant_lattice_at(chart_b)?.hnf().matrix().clone();
    let step_b = nc_step(&step_a.output, &step_a.residual, None, chart_b, &b_b)?;
    check_step_invariants(r, "G1 step", &step_a)?;
    check_step_invariants(r, "residual step", &step_b)?;
    record_step(r, "g1_step", &step_a);
    record_step(r, "residual_step", &step_b);
    let chain = NCChain::from_steps(vec![step_a.clone(), step_b])?;
    r.check_eq("degree bookkeeping after the rational G1 model", Origin::Published, chain.degree_from(1)?, 3);
    r.check_eq("total quotient order", Origin::Structural, chain.degree()?, 9);
    let fib = quotient_fiber_check(&nc_step(&at(&f, &[])?, &g, Some(&g1), 4, &b_a)?, 7)?;
    r.check("over F_7: G1 step fibers are orbits of size 3", Origin::Computed, fib.passed() && fib.generic_fiber == 3, || format!("{fib:?}"));

    // The explicit map.
    let map = explicit_fermat_map()?;
    r.check_eq("explicit map components have degree 13", Origin::Computed, map.degree(), 13);
    let fermat = cyclotomic(&parse(&x, &[], 3, "x1^3 + x2^3 + x3^3 + x4^3 + x5^3")?);
    let start = Instant::now();
    let on = on_variety(&map, &fermat)?;
    r.check("sum of cubes of the components vanishes identically", Origin::Published, on, String::new);
    r.record("identity_ms", start.elapsed().as_millis());
    let hist = fiber_histogram(&map, 7)?;
    r.check_eq("explicit map degree over F_7 (mode of fiber sizes)", Origin::Published, hist.degree, 3);
    let share3 = hist.histogram.get(&3).copied().unwrap_or(0) as f64 / hist.image_points.max(1) as f64;
    r.check(format!("over F_7: fiber size 3 on a majority of image points ({share3:.2})"), Origin::Computed, share3 > 0.5, || {
        format!("{:?}", hist.histogram)
    });
    let mass: u64 = hist.histogram.iter().map(|(s, c)| *s as u64 * c).sum::<u64>() + hist.indeterminacy;
    r.check_eq("fiber mass equals the 400 source points", Origin::Structural, mass, 400);
    r.record("histogram", &hist);
    // Over F_7 most of the 400 points sit on the indeterminacy or exceptional loci; F_13 leaves room for generic fibers.
    let hist13 = fiber_histogram(&map, 13)?;
    r.check(
        format!("over F_13: degree {} with share {:.2}", hist13.degree, hist13.mode_share),
        Origin::Computed,
        hist13.degree == 3 && hist13.mode_share > 0.5,
        || format!("{:?}", hist13.histogram),
    );
    r.record("histogram_13", &hist13);
    Ok(())
}

fn fermat_smoothness(r: &mut Report) -> Result<(), ScenarioError> {
    let x = indexed_vars("x", 5);
    let fermat = parse(&x, &[], 1, "x1^3 + x2^3 + x3^3 + x4^3 + x5^3")?.to_cyclotomic().expect("rational").to_rational().expect("rational");
    let scan = smooth_scan(&fermat, 7)?;
    r.check(format!("Fermat cubic: {} singular points / {} scanned over F_7", scan.singular.len(), scan.scanned), Origin::Computed, scan.singular.is_empty() && scan.scanned == 2801, String::new);
    let scan13 = smooth_scan(&fermat, 13)?;
    r.check("Fermat cubic: no singular points over F_13", Origin::Computed, scan13.singular.is_empty(), String::new);
    r.check_eq("Fermat cubic: closed-form diagonal test", Origin::Structural, diagonal_form_smooth(&fermat), Some(true));

    let family = parse(&x, C3C3_PARAMS, 1, "t1*x1^2*x3 + t2*x2^3 + t3*x1*x3^2 + t4*x4^2*x5 + t5*x4*x5^2 + t6*x1*x2*x3 + t7*x2*x4*x5")?;
    let inst = at(&family, &[("t6", 0), ("t7", 0)])?;
    let scan = smooth_scan(&inst, 7)?;
    r.check("cubic family at t = (1,1,1,1,1,0,0): no singular points over F_7", Origin::Computed, scan.singular.is_empty(), || {
        format!("{:?}", scan.singular)
    });

    let cone = parse(&x, &[], 1, "x1^3 + x2^3 + x3^3")?.to_cyclotomic().expect("rational").to_rational().expect("rational");
    let scan = smooth_scan(&cone, 7)?;
    let expect = [vec![0, 0, 0, 1, 0], vec![0, 0, 0, 0, 1], vec![0, 0, 0, 1, 1]];
    r.check(format!("cone: {} singular points over F_7, including the vertex line", scan.singular.len()), Origin::Structural, expect.iter().all(|p| scan.singular.contains(p)), || {
        format!("{:?}", scan.singular)
    });
    r.check_eq("cone: closed-form diagonal test", Origin::Structural, diagonal_form_smooth(&cone), Some(false));
    r.record("fermat_scan", &scan13);
    let _ = Rational::one();
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_is_stable_and_complete() {
        let names: Vec<&str> = list_scenarios().iter().map(|s| s.name).collect();
        for n in ["ex1_chain", "ex3_rationality", "qfano_40245", "qfano_40057", "c3c3_chain", "c3cubic3_rationality", "main_parametrization", "fermat_smoothness"] {
            assert!(names.contains(&n), "{n}");
        }
        let again: Vec<&str> = list_scenarios().iter().map(|s| s.name).collect();
        assert_eq!(names, again);
        assert!(matches!(run_scenario("nope"), Err(ScenarioError::Unknown(_))));
    }

    #[test]
    fn diff_names_first_mismatch() {
        let x = indexed_vars("x", 2);
        let a = parse(&x, &[], 1, "x1^2 + 2*x2^2").unwrap();
        let b = parse(&x, &[], 1, "x1^2 + 3*x2^2 + x1*x2").unwrap();
        assert_eq!(first_difference(&a, &b).unwrap(), "first mismatch at x1*x2: got 0, expected 1");
        assert!(first_difference(&a, &a).is_none());
    }

    #[test]
    fn block_change_round_trips() {
        let x = indexed_vars("x", 2);
        let f = cube_block_change(&x, &[(0, 1)]).unwrap();
        let g = cube_block_change_inverse(&x, &[(0, 1)]).unwrap();
        let id = RationalMap::identity(x, Cyclotomic::one());
        assert_eq!(compose_maps(&g, &f).unwrap(), id);
    }
}
