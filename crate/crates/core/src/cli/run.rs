//! Command dispatch. Every command returns an [`Outcome`] carrying the exit
//! status, a human-readable text and one JSON document.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::action::DiagonalAction;
use crate::coeffs::Cyclotomic;
use crate::lattice::IntMatrix;
use crate::nc::{nc_step, search_basis, NCChain, NCStep, RationalMap, SearchConfig};
use crate::poly::LaurentPoly;
use crate::scenarios::{list_scenarios, run_scenario};
use crate::verify::{default_prime, diagonal_form_smooth, fiber_histogram, on_variety, smooth_scan};

use super::expr::Poly;
use super::lexer::ParseError;
use super::spec::ProblemSpec;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyKind {
    Smooth,
    MapDegree,
    Identity,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Invariants,
    Transform { search: bool },
    Chain,
    SearchBasis,
    Verify(VerifyKind),
    /// `None` runs every registered scenario.
    Reproduce(Option<String>),
    ListScenarios,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Invariants => "invariants",
            Command::Transform { .. } => "transform",
            Command::Chain => "chain",
            Command::SearchBasis => "search-basis",
            Command::Verify(VerifyKind::Smooth) => "verify smooth",
            Command::Verify(VerifyKind::MapDegree) => "verify map-degree",
            Command::Verify(VerifyKind::Identity) => "verify identity",
            Command::Reproduce(_) => "reproduce",
            Command::ListScenarios => "list-scenarios",
        }
    }

    pub fn needs_spec(&self) -> bool {
        !matches!(self, Command::Reproduce(_) | Command::ListScenarios)
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub status: i32,
    pub text: String,
    pub json: Value,
}

impl Outcome {
    fn usage(msg: impl Into<String>) -> Self {
        let msg = msg.into();
        Outcome { status: EXIT_USAGE, json: json!({ "error": msg, "kind": "usage" }), text: format!("error: {msg}\n") }
    }

    fn engine(err: impl std::fmt::Display) -> Self {
        let msg = err.to_string();
        Outcome { status: EXIT_FAILED, json: json!({ "error": msg, "kind": "engine" }), text: format!("error: {msg}\n") }
    }
}

type Res = Result<Outcome, Outcome>;

pub fn dispatch(cmd: &Command, spec: Option<&ProblemSpec>) -> Outcome {
    let out = match (cmd, spec) {
        (Command::ListScenarios, _) => Ok(list()),
        (Command::Reproduce(name), _) => reproduce(name.as_deref()),
        (_, None) => Err(Outcome::usage(format!("`{}` needs an input file", cmd.name()))),
        (Command::Invariants, Some(s)) => invariants(s),
        (Command::Transform { search }, Some(s)) => transform(s, *search),
        (Command::Chain, Some(s)) => chain(s),
        (Command::SearchBasis, Some(s)) => search(s),
        (Command::Verify(VerifyKind::Smooth), Some(s)) => verify_smooth(s),
        (Command::Verify(VerifyKind::MapDegree), Some(s)) => map_degree(s),
        (Command::Verify(VerifyKind::Identity), Some(s)) => identity(s),
    };
    let mut out = out.unwrap_or_else(|e| e);
    if let Value::Object(m) = &mut out.json {
        m.insert("command".into(), json!(cmd.name()));
        m.insert("status".into(), json!(out.status));
    }
    out
}

/// Outcome for input that failed to parse; `source` names the input in the text form.
pub fn parse_failure(cmd: &Command, source: &str, e: &ParseError) -> Outcome {
    Outcome {
        status: EXIT_USAGE,
        text: format!("{source}:{e}\n"),
        json: json!({
            "command": cmd.name(),
            "status": EXIT_USAGE,
            "kind": "parse",
            "line": e.line,
            "column": e.column,
            "error": e.message,
            "expected": e.expected,
        }),
    }
}

fn ok(text: String, json: Value) -> Res {
    Ok(Outcome { status: EXIT_OK, text, json })
}

fn action_of(s: &ProblemSpec, rows: &[Vec<i64>]) -> Result<DiagonalAction, Outcome> {
    let e = s.order.unwrap_or(1);
    let gens: Vec<(u32, &[i64])> = rows.iter().map(|r| (e, r.as_slice())).collect();
    DiagonalAction::from_weights(s.vars.len(), &gens).map_err(Outcome::engine)
}

fn group(s: &ProblemSpec) -> Result<DiagonalAction, Outcome> {
    action_of(s, &s.gens)
}

fn subgroup(s: &ProblemSpec) -> Result<Option<DiagonalAction>, Outcome> {
    if s.subgroup.is_empty() {
        Ok(None)
    } else {
        action_of(s, &s.subgroup).map(Some)
    }
}

fn target(s: &ProblemSpec) -> Result<(&str, &Poly), Outcome> {
    s.target().ok_or_else(|| Outcome::usage("no `poly` declared"))
}

/// Substitutes the `set` values; every parameter the polynomial uses must have one.
fn numeric(s: &ProblemSpec, p: &Poly) -> Result<LaurentPoly<Cyclotomic>, Outcome> {
    let values: BTreeMap<String, Cyclotomic> = s.sets.iter().cloned().collect();
    if let Some(missing) = p.parameters().into_iter().find(|t| !values.contains_key(t)) {
        return Err(Outcome::usage(format!("parameter `{missing}` has no value; add `set {missing} = <number>`")));
    }
    p.specialize(&values).map_err(Outcome::engine)
}

fn primes(s: &ProblemSpec, g: &DiagonalAction) -> Vec<u64> {
    if s.primes.is_empty() {
        let orders: Vec<u32> = g.orders().iter().map(|&o| o as u32).chain(s.order).collect();
        vec![default_prime(&orders)]
    } else {
        s.primes.clone()
    }
}

fn rows_text(m: &[Vec<i64>]) -> String {
    m.iter().map(|r| format!("  [{}]\n", r.iter().map(i64::to_string).collect::<Vec<_>>().join(", "))).collect()
}

fn invariants(s: &ProblemSpec) -> Res {
    let g = group(s)?;
    let order = g.group_order().map_err(Outcome::engine)?;
    let chart = s.chart.unwrap_or_else(|| g.default_chart());
    let basis = g.invariant_lattice_at(chart).map_err(Outcome::engine)?.hnf();
    let rows = basis.matrix().to_i64_rows().ok_or_else(|| Outcome::engine("basis entries overflow i64"))?;
    let mut text = format!("group: {g}\norder: {order}\nchart: {}\ninvariant lattice (Hermite basis):\n{}", s.vars[chart], rows_text(&rows));
    let mut doc = json!({ "group": g.to_string(), "order": order, "chart": s.vars[chart], "basis": rows });
    if let Some((name, f)) = s.target() {
        let inv = g.is_invariant(f).map_err(Outcome::engine)?;
        let _ = writeln!(text, "{name} invariant: {}", inv.invariant);
        doc["invariant"] = json!(inv.invariant);
    }
    ok(text, doc)
}

/// Runs the first step from the spec's group, chart and basis.
fn first_step(s: &ProblemSpec, search: bool) -> Result<(NCStep<crate::coeffs::ParamCoeff>, Option<Value>), Outcome> {
    let (_, f) = target(s)?;
    let g = group(s)?;
    let sub = subgroup(s)?;
    let quotient = sub.as_ref().unwrap_or(&g);
    let chart = s.chart.unwrap_or_else(|| quotient.default_chart());
    let (basis, found) = match (&s.basis, search) {
        (Some(b), false) => (b.clone(), None),
        (_, true) => {
            let r = search_basis(f, quotient, chart, SearchConfig::default()).map_err(Outcome::engine)?;
            let doc = json!({ "d_nc": r.d_nc, "start_d_nc": r.start_d_nc, "evaluated": r.evaluated });
            (r.basis, Some(doc))
        }
        (None, false) => hermite(quotient, chart)?,
    };
    let step = nc_step(f, &g, sub.as_ref(), chart, &IntMatrix::from_i64(&basis)).map_err(Outcome::engine)?;
    Ok((step, found))
}

fn hermite(g: &DiagonalAction, chart: usize) -> Result<(Vec<Vec<i64>>, Option<Value>), Outcome> {
    let rows = g.invariant_lattice_at(chart).map_err(Outcome::engine)?.hnf().matrix().to_i64_rows();
    Ok((rows.ok_or_else(|| Outcome::engine("basis entries overflow i64"))?, None))
}

fn step_text(i: usize, st: &NCStep<crate::coeffs::ParamCoeff>) -> String {
    let r = st.report();
    let mut t = format!("step {i}: group {} (order {}), chart {}\n", r.group, r.group_order, r.chart);
    let _ = write!(t, "basis:\n{}", rows_text(&r.basis));
    if r.twist.iter().any(|&k| k != 0) {
        let _ = writeln!(t, "twist: {:?}", r.twist);
    }
    let _ = writeln!(t, "p = {}", r.p);
    let _ = writeln!(t, "q exponents = {:?}", r.q);
    let _ = writeln!(t, "F_NC = {}", r.f_nc);
    let _ = writeln!(t, "d_NC = {}", r.d_nc);
    let _ = writeln!(t, "residual group: {} (order {})", r.residual_group, r.residual_order);
    t
}

fn transform(s: &ProblemSpec, search: bool) -> Res {
    let (step, found) = first_step(s, search)?;
    let mut text = step_text(1, &step);
    if let Some(f) = &found {
        let _ = writeln!(text, "search: start d_NC {}, best d_NC {}", f["start_d_nc"], f["d_nc"]);
    }
    ok(text, json!({ "step": step.report(), "search": found }))
}

fn chain(s: &ProblemSpec) -> Res {
    let (first, _) = first_step(s, false)?;
    let mut steps = vec![first];
    for st in &s.steps {
        let prev = steps.last().expect("nonempty");
        let basis = match &st.basis {
            Some(b) => b.clone(),
            None => hermite(&prev.residual, st.chart)?.0,
        };
        let next = nc_step(&prev.output, &prev.residual, None, st.chart, &IntMatrix::from_i64(&basis)).map_err(Outcome::engine)?;
        steps.push(next);
    }
    let mut text: String = steps.iter().enumerate().map(|(i, st)| step_text(i + 1, st)).collect::<Vec<_>>().join("\n");
    let reports: Vec<_> = steps.iter().map(NCStep::report).collect();
    let chain = NCChain::from_steps(steps).map_err(Outcome::engine)?;
    let degree = chain.degree().map_err(Outcome::engine)?;
    let _ = writeln!(text, "\nchain degree (product of group orders): {degree}");
    ok(text, json!({ "steps": reports, "degree": degree }))
}

fn search(s: &ProblemSpec) -> Res {
    let (_, f) = target(s)?;
    let g = group(s)?;
    let sub = subgroup(s)?;
    let quotient = sub.as_ref().unwrap_or(&g);
    let chart = s.chart.unwrap_or_else(|| quotient.default_chart());
    let r = search_basis(f, quotient, chart, SearchConfig::default()).map_err(Outcome::engine)?;
    let text = format!(
        "chart {}\nbest basis (d_NC {}, {} terms):\n{}Hermite start d_NC {}; {} bases evaluated\n",
        s.vars[chart],
        r.d_nc,
        r.terms,
        rows_text(&r.basis),
        r.start_d_nc,
        r.evaluated
    );
    ok(text, json!({ "chart": s.vars[chart], "basis": r.basis, "d_nc": r.d_nc, "terms": r.terms, "start_d_nc": r.start_d_nc, "evaluated": r.evaluated }))
}

fn verify_smooth(s: &ProblemSpec) -> Res {
    let (name, f) = target(s)?;
    let f = numeric(s, f)?;
    let g = group(s)?;
    let mut text = String::new();
    let mut scans = Vec::new();
    let mut smooth = true;
    for q in primes(s, &g) {
        let r = smooth_scan(&f, q).map_err(Outcome::engine)?;
        let _ = writeln!(text, "{name} over F_{q}: {} singular points / {} scanned ({} ms)", r.singular.len(), r.scanned, r.elapsed_ms);
        for p in r.singular.iter().take(10) {
            let _ = writeln!(text, "  singular: {p:?}");
        }
        smooth &= r.singular.is_empty();
        scans.push(r);
    }
    let closed = diagonal_form_smooth(&f);
    if let Some(c) = closed {
        let _ = writeln!(text, "diagonal closed-form test: {}", if c { "smooth" } else { "singular" });
        smooth &= c;
    }
    let status = if smooth { EXIT_OK } else { EXIT_FAILED };
    Ok(Outcome { status, text, json: json!({ "scans": scans, "diagonal_smooth": closed, "smooth": smooth }) })
}

fn numeric_map(s: &ProblemSpec) -> Result<RationalMap<Cyclotomic>, Outcome> {
    let comps = s.map.as_ref().ok_or_else(|| Outcome::usage("no `map` declared"))?;
    let comps = comps.iter().map(|c| numeric(s, c)).collect::<Result<Vec<_>, _>>()?;
    RationalMap::new(s.vars.clone(), comps).map_err(Outcome::engine)
}

fn map_degree(s: &ProblemSpec) -> Res {
    let map = numeric_map(s)?;
    let g = group(s)?;
    let mut text = String::new();
    let mut hists = Vec::new();
    for q in primes(s, &g) {
        let h = fiber_histogram(&map, q).map_err(Outcome::engine)?;
        let _ = writeln!(
            text,
            "over F_{q}: {} source points, {} indeterminate, {} image points; degree {} (share {:.2})",
            h.source_points, h.indeterminacy, h.image_points, h.degree, h.mode_share
        );
        let _ = writeln!(text, "  {:>10}  {:>10}", "fiber size", "points");
        for (size, count) in &h.histogram {
            let _ = writeln!(text, "  {size:>10}  {count:>10}");
        }
        hists.push(h);
    }
    ok(text, json!({ "histograms": hists }))
}

fn identity(s: &ProblemSpec) -> Res {
    let (name, f) = target(s)?;
    let f = numeric(s, f)?;
    let map = numeric_map(s)?;
    let holds = on_variety(&map, &f).map_err(Outcome::engine)?;
    let text = format!("{name} vanishes on the image of the map: {holds}\n");
    Ok(Outcome { status: if holds { EXIT_OK } else { EXIT_FAILED }, text, json: json!({ "on_variety": holds }) })
}

fn list() -> Outcome {
    let mut text = String::new();
    let width = list_scenarios().iter().map(|s| s.name.len()).max().unwrap_or(0);
    for s in list_scenarios() {
        let _ = writeln!(text, "{:<width$}  {}", s.name, s.summary);
    }
    let docs: Vec<Value> = list_scenarios().iter().map(|s| json!({ "name": s.name, "summary": s.summary })).collect();
    Outcome { status: EXIT_OK, text, json: json!({ "scenarios": docs }) }
}

fn reproduce(name: Option<&str>) -> Res {
    let names: Vec<&str> = match name {
        Some(n) => vec![n],
        None => list_scenarios().iter().map(|s| s.name).collect(),
    };
    let mut text = String::new();
    let mut reports = Vec::new();
    let mut passed = true;
    for n in names {
        let r = run_scenario(n).map_err(|e| match e {
            crate::scenarios::ScenarioError::Unknown(_) => Outcome::usage(e.to_string()),
            other => Outcome::engine(format!("{n}: {other}")),
        })?;
        passed &= r.passed;
        text.push_str(&r.to_string());
        reports.push(r);
    }
    let ok_count = reports.iter().filter(|r| r.passed).count();
    let _ = writeln!(text, "{ok_count}/{} scenarios passed", reports.len());
    Ok(Outcome { status: if passed { EXIT_OK } else { EXIT_FAILED }, text, json: json!({ "reports": reports, "passed": passed }) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::spec::parse_input;

    const EX1: &str = "vars x1 x2 x3 x4 x5
params t1 t2
group e=3 gen [1,2,0,0,0]
poly F = t1*x1^3 + t2*x2^3 + (x3 + x4 + x5)*x1*x2 + x3^3 + x4^3 + x5^3
chart x5
basis [1,1,0,0; -1,2,0,0; 0,0,1,0; 0,0,0,1]
step chart x2 basis [1,0,0,1; 0,1,0,0; 0,0,1,0; 0,0,0,1]
set t1 = 1
set t2 = 1
";

    #[test]
    fn transform_prints_quartic() {
        let s = parse_input(EX1).unwrap();
        let out = dispatch(&Command::Transform { search: false }, Some(&s));
        assert_eq!(out.status, 0, "{}", out.text);
        assert!(out.text.contains("d_NC = 4"), "{}", out.text);
        assert_eq!(out.json["step"]["d_nc"], 4);
        assert_eq!(out.json["command"], "transform");
    }

    #[test]
    fn chain_and_invariants() {
        let s = parse_input(EX1).unwrap();
        let out = dispatch(&Command::Chain, Some(&s));
        assert_eq!(out.status, 0, "{}", out.text);
        assert_eq!(out.json["degree"], 3);
        assert_eq!(out.json["steps"][1]["d_nc"], 3);
        let inv = dispatch(&Command::Invariants, Some(&s));
        assert_eq!(inv.json["order"], 3);
        assert_eq!(inv.json["invariant"], true);
    }

    #[test]
    fn smooth_scan_reports_counts() {
        let s = parse_input("vars x1 x2 x3 x4 x5\npoly F = x1^3 + x2^3 + x3^3 + x4^3 + x5^3\nprime 7").unwrap();
        let out = dispatch(&Command::Verify(VerifyKind::Smooth), Some(&s));
        assert_eq!(out.status, 0);
        assert!(out.text.contains("0 singular points / 2801 scanned"), "{}", out.text);
        let cone = parse_input("vars x1 x2 x3 x4 x5\npoly F = x1^3 + x2^3 + x3^3\nprime 7").unwrap();
        assert_eq!(dispatch(&Command::Verify(VerifyKind::Smooth), Some(&cone)).status, EXIT_FAILED);
    }

    #[test]
    fn usage_errors() {
        let out = dispatch(&Command::Chain, None);
        assert_eq!(out.status, EXIT_USAGE);
        let s = parse_input("vars x1 x2 x3\nparams t\npoly F = t*x1^3 + x2^3 + x3^3").unwrap();
        let out = dispatch(&Command::Verify(VerifyKind::Smooth), Some(&s));
        assert_eq!(out.status, EXIT_USAGE);
        assert!(out.text.contains("set t"), "{}", out.text);
        assert_eq!(dispatch(&Command::Reproduce(Some("nope".into())), None).status, EXIT_USAGE);
    }

    #[test]
    fn map_commands() {
        let text = "vars x1 x2 x3\nsource y1 y2\npoly F = x1*x3 - x2^2\nmap [y1^2; y1*y2; y2^2]\nprime 7";
        let s = parse_input(text).unwrap();
        let id = dispatch(&Command::Verify(VerifyKind::Identity), Some(&s));
        assert_eq!(id.status, 0, "{}", id.text);
        let deg = dispatch(&Command::Verify(VerifyKind::MapDegree), Some(&s));
        assert_eq!(deg.json["histograms"][0]["degree"], 1, "{}", deg.text);
    }
}
