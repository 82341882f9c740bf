use super::*;
use crate::cli::parse_poly;
use crate::coeffs::ParamCoeff;
use crate::poly::indexed_vars;

fn x5() -> Vars {
    indexed_vars("x", 5)
}

const T7: &[&str] = &["t1", "t2", "t3", "t4", "t5", "t6", "t7"];

fn p(text: &str) -> LaurentPoly<ParamCoeff> {
    parse_poly(&x5(), T7, 3, text).unwrap()
}

fn basis(rows: &[Vec<i64>]) -> IntMatrix {
    IntMatrix::from_i64(rows)
}

fn ex1_f() -> LaurentPoly<ParamCoeff> {
    p("t1*x1^3 + t2*x2^3 + (t3*x3 + t4*x4 + t5*x5)*x1*x2 + x3^3 + x4^3 + x5^3")
}

fn ex1_action() -> DiagonalAction {
    DiagonalAction::from_weights(5, &[(3, &[1, 2, 0, 0, 0])]).unwrap()
}

fn cubic_c3c3() -> LaurentPoly<ParamCoeff> {
    p("t1*x1^3 + t2*x2^3 + t3*x3^3 + t4*x4^3 + t5*x5^3 + t6*x1*x2*x3 + t7*x2*x4*x5")
}

fn c3c3_action() -> DiagonalAction {
    DiagonalAction::from_weights(5, &[(3, &[1, 0, 2, 0, 0]), (3, &[0, 1, 2, 2, 0])]).unwrap()
}

#[test]
fn cyclic_quotient_of_cubic() {
    let b = basis(&[vec![1, 1, 0, 0], vec![-1, 2, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]]);
    let step = nc_step(&ex1_f(), &ex1_action(), None, 4, &b).unwrap();
    let expected = p("t1*x1^2*x5^2 + t2*x1*x2^2*x5 + (t3*x3 + t4*x4 + t5*x5)*x1*x2*x5 + x2*(x3^3 + x4^3 + x5^3)");
    assert_eq!(step.output, expected, "{}", step.output);
    assert_eq!(step.d_nc, 4);
    assert_eq!(step.q.0, vec![0, 1, 0, 0]);
    assert_eq!(step.action.group_order().unwrap(), 3);
    assert!(step.round_trip_holds().unwrap());

    let b2 = basis(&[vec![1, 0, 0, 1], vec![0, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]]);
    let second = nc_step(&step.output, &DiagonalAction::trivial(5), None, 1, &b2).unwrap();
    let expected = p("t1*x1^2*x2 + t2*x1*x2^2 + (t3*x3 + t4*x4 + t5*x5)*x1*x2 + x3^3 + x4^3 + x5^3");
    assert_eq!(second.output, expected);
    assert_eq!(second.d_nc, 3);
    let chain = NCChain::from_steps(vec![step, second]).unwrap();
    assert_eq!(chain.degree().unwrap(), 3);
}

#[test]
fn three_step_chain_for_two_generator_group() {
    let b1 = basis(&[vec![1, 0, 1, -1], vec![0, 1, 0, 1], vec![0, 0, 3, 0], vec![0, 0, 0, 3]]);
    let s1 = nc_step(&cubic_c3c3(), &c3c3_action(), None, 4, &b1).unwrap();
    let quintic = p("t1*x1^3*x4^2 + t2*x2^3*x3*x5 + t3*x3^2*x4*x5^2 + t4*x3*x4^2*x5^2 + t5*x3*x4*x5^3 + t6*x1*x2*x3*x4*x5 + t7*x2*x3*x4*x5^2");
    assert_eq!(s1.output, quintic, "{}", s1.output);
    assert_eq!(s1.d_nc, 5);
    assert_eq!(s1.action.group_order().unwrap(), 9);

    let triv = DiagonalAction::trivial(5);
    let b2 = basis(&[vec![1, 0, 0, 0], vec![0, 1, 0, 1], vec![0, 0, 1, 0], vec![0, 0, 0, 1]]);
    let s2 = nc_step(&s1.output, &triv, None, 0, &b2).unwrap();
    let quartic = p("t1*x1^2*x4^2 + t2*x2^3*x3 + t3*x1*x3^2*x4 + t4*x3*x4^2*x5 + t5*x3*x4*x5^2 + t6*x1*x2*x3*x4 + t7*x2*x3*x4*x5");
    assert_eq!(s2.output, quartic, "{}", s2.output);

    let b3 = basis(&[vec![1, 0, 1, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]]);
    let s3 = nc_step(&s2.output, &triv, None, 2, &b3).unwrap();
    let cubic = p("t1*x1^2*x3 + t2*x2^3 + t3*x1*x3^2 + t4*x4^2*x5 + t5*x4*x5^2 + t6*x1*x2*x3 + t7*x2*x4*x5");
    assert_eq!(s3.output, cubic, "{}", s3.output);
    assert_eq!(s3.d_nc, 3);

    for s in [&s1, &s2, &s3] {
        assert!(s.round_trip_holds().unwrap());
        // Coefficients survive every step unchanged.
        assert_eq!(coefficient_multiset(&s.output), coefficient_multiset(&s.input));
    }
    let chain = NCChain::from_steps(vec![s1, s2, s3]).unwrap();
    assert_eq!(chain.degree().unwrap(), 9);
}

#[test]
fn basis_diagnostics() {
    let a = ex1_action();
    let good = basis(&[vec![1, 1, 0, 0], vec![-1, 2, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]]);
    assert_eq!(validate_basis(&a, 4, &good).unwrap(), BasisDiagnosis::Ok);
    let short = basis(&[vec![1, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]]);
    assert!(matches!(validate_basis(&a, 4, &short).unwrap(), BasisDiagnosis::Shape { rows: 3, .. }));
    let moved = basis(&[vec![1, 0, 0, 0], vec![-1, 2, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]]);
    assert_eq!(
        validate_basis(&a, 4, &moved).unwrap(),
        BasisDiagnosis::NonInvariantRow { row: 0, character: vec![1] }
    );
    let thin = basis(&[vec![3, 0, 0, 0], vec![0, 3, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]]);
    assert_eq!(validate_basis(&a, 4, &thin).unwrap(), BasisDiagnosis::ProperSublattice { index: 3 });
    let flat = basis(&[vec![1, 1, 0, 0], vec![2, 2, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]]);
    assert!(matches!(validate_basis(&a, 4, &flat).unwrap(), BasisDiagnosis::RankDeficient { .. }));

    let err = nc_step(&ex1_f(), &a, None, 0, &good).unwrap_err();
    assert!(matches!(err, NcError::ChartNotFixed(ref v) if v == "x1"));
    let err = nc_step(&ex1_f(), &a, None, 4, &thin).unwrap_err();
    assert!(matches!(err, NcError::InvalidBasis(BasisDiagnosis::ProperSublattice { index: 3 })));
}

#[test]
fn rewrite_clears_minimal_denominator() {
    let v = indexed_vars("x", 2);
    let f = parse_poly(&v, &[], 1, "x1^3 + x2^3 + x1*x2").unwrap();
    let lattice = LatticeBasis::from_i64(&[vec![1, 1], vec![-1, 2]]).unwrap();
    let (p, q) = rewrite_invariant(&f, &lattice, indexed_vars("u", 2)).unwrap();
    let u = indexed_vars("u", 2);
    assert_eq!(p, parse_poly(&u, &[], 1, "u1^2 + u1*u2^2 + u1*u2").unwrap());
    assert_eq!(q.0, vec![0, 1]);

    let g = parse_poly(&v, &[], 1, "x1 + x2").unwrap();
    assert!(matches!(rewrite_invariant(&g, &lattice, u), Err(NcError::NotInLattice(_))));
}

#[test]
fn residual_group_after_partial_quotient() {
    let g = c3c3_action();
    let g1 = DiagonalAction::from_weights(5, &[(3, &[0, 1, 2, 2, 0])]).unwrap();
    assert_eq!(g.subgroup_index(&g1).unwrap(), 3);
    let b = g1.invariant_lattice_at(4).unwrap().hnf().matrix().clone();
    let step = nc_step(&cubic_c3c3(), &g, Some(&g1), 4, &b).unwrap();
    assert_eq!(step.action.group_order().unwrap(), 3);
    assert_eq!(step.residual.group_order().unwrap(), 3);
    assert!(step.round_trip_holds().unwrap());
    // The residual group preserves the output up to a character.
    let chart = step.residual.default_chart();
    let chars: std::collections::BTreeSet<Vec<u32>> =
        step.output.terms().map(|(e, _)| step.residual.character(&e.0).unwrap()).collect();
    assert_eq!(chars.len(), 1, "chart {chart}");
}

#[test]
fn semi_invariant_equation_gets_twisted() {
    let v = indexed_vars("x", 3);
    let f = parse_poly(&v, &[], 1, "x1*x3^2 + x2^3 + x1^2*x2").unwrap();
    let a = DiagonalAction::from_weights(3, &[(2, &[1, 1, 0])]).unwrap();
    let b = IntMatrix::from_i64(&[vec![2, 0], vec![1, 1]]);
    let step = nc_step(&f, &a, None, 2, &b).unwrap();
    assert_eq!(step.twist.0, vec![1, 0]);
    assert_eq!(step.output, parse_poly(&v, &[], 1, "x1^2*x3 + x2^3 + x1^2*x2").unwrap());
    assert!(step.round_trip_holds().unwrap());
}

#[test]
fn chain_rejects_mismatched_steps() {
    let b = basis(&[vec![1, 1, 0, 0], vec![-1, 2, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]]);
    let s = nc_step(&ex1_f(), &ex1_action(), None, 4, &b).unwrap();
    let again = s.clone();
    assert!(matches!(NCChain::from_steps(vec![s, again]), Err(NcError::NotComposable(1))));
}

#[test]
fn step_report_serializes() {
    let b = basis(&[vec![1, 1, 0, 0], vec![-1, 2, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]]);
    let s = nc_step(&ex1_f(), &ex1_action(), None, 4, &b).unwrap();
    let r = s.report();
    assert_eq!(r.chart, "x5");
    assert_eq!(r.group_order, 3);
    let json = serde_json::to_string(&r).unwrap();
    assert!(json.contains("\"d_nc\":4"));
}

#[test]
fn search_does_not_worsen_hermite_start() {
    let r = search_basis(&ex1_f(), &ex1_action(), 4, SearchConfig::default()).unwrap();
    assert!(r.d_nc <= r.start_d_nc);
    // The beam finds a cubic model, one degree below the worked basis.
    assert_eq!(r.d_nc, 3);
    let m = IntMatrix::from_i64(&r.basis);
    assert_eq!(validate_basis(&ex1_action(), 4, &m).unwrap(), BasisDiagnosis::Ok);
}
