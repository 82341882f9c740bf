//! Randomized checks of algebraic laws and structural invariants.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use nc_core::action::DiagonalAction;
use nc_core::coeffs::{Coeff, Cyclotomic, Rational};
use nc_core::lattice::{hermite_normal_form, smith_normal_form, IntMatrix};
use nc_core::nc::{coefficient_multiset, nc_step};
use nc_core::poly::{indexed_vars, ExponentVec, LaurentPoly};

// ---- generators ----

fn rational() -> impl Strategy<Value = Rational> {
    (-30i64..=30, 1i64..=12).prop_map(|(n, d)| Rational::new(n, d).unwrap())
}

fn cyclotomic() -> impl Strategy<Value = Cyclotomic> {
    (prop::sample::select(vec![1u32, 3, 4, 5, 6, 9]), prop::collection::vec(rational(), 9))
        .prop_map(|(e, c)| Cyclotomic::from_coeffs(e, c[..e as usize].to_vec()))
}

/// Cyclotomics of one fixed order, so that mixing orders is not the thing under test.
fn cyclotomic_triple() -> impl Strategy<Value = (Cyclotomic, Cyclotomic, Cyclotomic)> {
    prop::sample::select(vec![1u32, 3, 5, 9]).prop_flat_map(|e| {
        let one = move || prop::collection::vec(rational(), e as usize).prop_map(move |c| Cyclotomic::from_coeffs(e, c));
        (one(), one(), one())
    })
}

fn poly(nvars: usize) -> impl Strategy<Value = LaurentPoly<Rational>> {
    prop::collection::vec((prop::collection::vec(0i32..4, nvars), rational()), 0..8).prop_map(move |terms| {
        LaurentPoly::from_terms(indexed_vars("x", nvars), terms.into_iter().map(|(e, c)| (ExponentVec(e), c)))
    })
}

/// Homogeneous of degree `d`, possibly zero.
fn homogeneous(nvars: usize, d: i32) -> impl Strategy<Value = LaurentPoly<Rational>> {
    prop::collection::vec((prop::collection::vec(0i32..=d, nvars - 1), rational()), 1..8).prop_map(move |terms| {
        let terms = terms.into_iter().filter_map(|(mut e, c)| {
            let s: i32 = e.iter().sum();
            (s <= d).then(|| {
                e.push(d - s);
                (ExponentVec(e), c)
            })
        });
        LaurentPoly::from_terms(indexed_vars("x", nvars), terms)
    })
}

fn matrix(max_dim: usize, bound: i64) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(move |(r, c)| prop::collection::vec(prop::collection::vec(-bound..=bound, c), r))
}

// ---- independent integer helpers ----

fn big(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    m.row_vecs()
}

fn matmul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| (0..cols).map(|j| (0..inner).map(|k| &row[k] * &b[k][j]).sum()).collect())
        .collect()
}

/// Laplace expansion; fine for the dimensions used here.
fn det(m: &[Vec<BigInt>]) -> BigInt {
    match m.len() {
        0 => BigInt::one(),
        1 => m[0][0].clone(),
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<BigInt>> =
                    m[1..].iter().map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, v)| v.clone()).collect()).collect();
                let t = &m[0][j] * det(&minor);
                if j % 2 == 0 {
                    t
                } else {
                    -t
                }
            })
            .sum(),
    }
}

fn content(m: &[Vec<i64>]) -> BigInt {
    m.iter().flatten().fold(BigInt::zero(), |g, &v| g.gcd(&BigInt::from(v)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rationals_form_a_field(a in rational(), b in rational(), c in rational()) {
        prop_assert_eq!(a.plus(&b), b.plus(&a));
        prop_assert_eq!(a.times(&b.plus(&c)), a.times(&b).plus(&a.times(&c)));
        prop_assert_eq!(a.times(&b).times(&c), a.times(&b.times(&c)));
        prop_assert_eq!(a.minus(&a), Rational::zero());
        if !a.is_zero() {
            prop_assert_eq!(a.times(&a.inv().unwrap()), Rational::one());
        }
    }

    #[test]
    fn cyclotomics_form_a_field((a, b, c) in cyclotomic_triple()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a - &a, Cyclotomic::zero());
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.inverse().unwrap(), Cyclotomic::one());
        }
    }

    #[test]
    fn zeta_has_its_order(e in 1u32..13) {
        let z = Cyclotomic::zeta(e);
        prop_assert_eq!(z.pow(e as i64).unwrap(), Cyclotomic::one());
        for k in 1..e {
            prop_assert_ne!(z.pow(k as i64).unwrap(), Cyclotomic::one());
        }
    }

    #[test]
    fn mixed_orders_agree_on_rationals(a in cyclotomic(), r in rational()) {
        let lifted = Cyclotomic::from_rational(r.clone());
        prop_assert_eq!(&(&a + &lifted) - &a, lifted);
    }

    #[test]
    fn polynomials_form_a_ring(f in poly(3), g in poly(3), h in poly(3)) {
        prop_assert_eq!(&f + &g, &g + &f);
        prop_assert_eq!(&f * &g, &g * &f);
        prop_assert_eq!(&(&f * &g) * &h, &f * &(&g * &h));
        prop_assert_eq!(&f * &(&g + &h), &(&f * &g) + &(&f * &h));
        prop_assert!((&f - &f).is_zero());
    }

    #[test]
    fn product_evaluates_pointwise(f in poly(3), g in poly(3), p in prop::collection::vec(rational(), 3)) {
        let lhs = (&f * &g).eval(&p).unwrap();
        prop_assert_eq!(lhs, f.eval(&p).unwrap().times(&g.eval(&p).unwrap()));
    }

    #[test]
    fn euler_relation(f in homogeneous(4, 3)) {
        // sum_i x_i df/dx_i = deg(f) f
        let vars = f.vars().clone();
        let mut lhs = LaurentPoly::zero(vars.clone());
        for i in 0..4 {
            let xi = LaurentPoly::var(vars.clone(), i, Rational::one());
            lhs = &lhs + &(&xi * &f.partial_deriv(i).unwrap());
        }
        prop_assert_eq!(lhs, f.scale(&Rational::from_int(3)));
    }

    #[test]
    fn dehomogenize_then_homogenize(f in homogeneous(4, 3), chart in 0usize..4) {
        prop_assume!(!f.is_zero() && !f.divisible_by_var(chart));
        let local = f.dehomogenize(chart).unwrap();
        let (back, d) = local.homogenize(chart, &f.vars()[chart]).unwrap();
        prop_assert_eq!(d, 3);
        prop_assert_eq!(back, f);
    }

    #[test]
    fn homogenize_then_dehomogenize(g in poly(3), chart in 0usize..4) {
        prop_assume!(!g.is_zero());
        let (h, d) = g.homogenize(chart, "w").unwrap();
        prop_assert_eq!(h.homogeneous_degree(), Some(d));
        prop_assert!(!h.divisible_by_var(chart));
        prop_assert_eq!(h.dehomogenize(chart).unwrap(), g);
    }

    #[test]
    fn characters_are_additive(
        w in prop::collection::vec(-10i64..10, 4),
        e in 2u32..10,
        a in prop::collection::vec(-5i32..6, 5),
        b in prop::collection::vec(-5i32..6, 5),
    ) {
        // Actions are normalized to fix one coordinate.
        let w: Vec<i64> = w.into_iter().chain([0]).collect();
        let g = DiagonalAction::from_weights(5, &[(e, &w)]).unwrap();
        let sum: Vec<i32> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        let (ca, cb, cs) = (g.character(&a).unwrap(), g.character(&b).unwrap(), g.character(&sum).unwrap());
        prop_assert_eq!(cs[0], (ca[0] + cb[0]) % e);
        let direct: i64 = w.iter().zip(&a).map(|(&wi, &ai)| wi * ai as i64).sum();
        prop_assert_eq!(ca[0] as i64, direct.rem_euclid(e as i64));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn hermite_form_is_canonical(rows in matrix(6, 100), mix in matrix(6, 3)) {
        let m = IntMatrix::from_i64(&rows);
        let (h, u) = hermite_normal_form(&m);
        let (hb, ub, mb) = (big(&h), big(&u), big(&m));
        prop_assert_eq!(matmul(&ub, &mb), hb.clone());
        prop_assert!(det(&ub).abs().is_one());
        // Echelon shape with positive pivots and reduced entries above them.
        let mut last: Option<usize> = None;
        let mut seen_zero = false;
        for (i, row) in hb.iter().enumerate() {
            match row.iter().position(|v| !v.is_zero()) {
                None => seen_zero = true,
                Some(j) => {
                    prop_assert!(!seen_zero, "nonzero row below a zero row");
                    prop_assert!(last.map_or(true, |l| j > l));
                    prop_assert!(row[j].is_positive());
                    for above in &hb[..i] {
                        prop_assert!(!above[j].is_negative() && above[j] < row[j]);
                    }
                    last = Some(j);
                }
            }
        }
        // Same Hermite form after a random change of basis on the left.
        let n = rows.len();
        let mut t = IntMatrix::identity(n);
        for (k, r) in mix.iter().enumerate() {
            let (a, b) = (k % n, (k + 1) % n);
            if a != b {
                let f = BigInt::from(r[0]);
                for j in 0..n {
                    let v = t.get(b, j) * &f + t.get(a, j);
                    t.set(a, j, v);
                }
            }
        }
        let shuffled = t.mul(&m).unwrap();
        prop_assert_eq!(hermite_normal_form(&shuffled).0, h);
    }

    #[test]
    fn smith_form_divisibility(rows in matrix(6, 100)) {
        let m = IntMatrix::from_i64(&rows);
        let (s, u, v) = smith_normal_form(&m);
        let (sb, ub, vb, mb) = (big(&s), big(&u), big(&v), big(&m));
        prop_assert_eq!(matmul(&matmul(&ub, &mb), &vb), sb.clone());
        prop_assert!(det(&ub).abs().is_one());
        prop_assert!(det(&vb).abs().is_one());
        let diag: Vec<BigInt> = (0..sb.len().min(sb[0].len())).map(|i| sb[i][i].clone()).collect();
        for (i, r) in sb.iter().enumerate() {
            for (j, x) in r.iter().enumerate() {
                if i != j {
                    prop_assert!(x.is_zero());
                }
            }
        }
        for w in diag.windows(2) {
            prop_assert!(!w[0].is_negative());
            if !w[0].is_zero() {
                prop_assert!((&w[1] % &w[0]).is_zero());
            } else {
                prop_assert!(w[1].is_zero());
            }
        }
        // First divisor is the gcd of all entries; the product is |det| for square input.
        prop_assert_eq!(diag[0].abs(), content(&rows));
        if rows.len() == rows[0].len() {
            let prod: BigInt = diag.iter().product();
            prop_assert_eq!(prod.abs(), det(&mb).abs());
        }
    }
}

// ---- coefficient preservation ----

/// A diagonal action on `n` coordinates that fixes the last one, of order at most 27.
fn small_action() -> impl Strategy<Value = (usize, Vec<(u32, Vec<i64>)>)> {
    (3usize..=6)
        .prop_flat_map(|n| {
            let gens = prop::sample::select(vec![vec![2u32], vec![3], vec![4], vec![5], vec![7], vec![9], vec![2, 2], vec![3, 3], vec![2, 3], vec![3, 9], vec![3, 3, 3]]);
            (Just(n), gens)
        })
        .prop_flat_map(|(n, orders)| {
            let weights: Vec<_> = orders
                .iter()
                .map(|&o| prop::collection::vec(0i64..o as i64, n - 1).prop_map(move |w| (o, w)))
                .collect();
            (Just(n), weights)
        })
        .prop_map(|(n, gens)| {
            let gens = gens
                .into_iter()
                .map(|(o, mut w)| {
                    w.push(0);
                    (o, w)
                })
                .collect();
            (n, gens)
        })
}

fn monomials(n: usize, d: i32) -> Vec<Vec<i32>> {
    if n == 1 {
        return vec![vec![d]];
    }
    (0..=d)
        .flat_map(|a| {
            monomials(n - 1, d - a).into_iter().map(move |mut rest| {
                rest.insert(0, a);
                rest
            })
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn transformation_preserves_coefficients(
        (n, gens) in small_action(),
        d in 2i32..=4,
        picks in prop::collection::vec(any::<prop::sample::Index>(), 1..12),
        coeffs in prop::collection::vec(-20i64..=20, 12),
    ) {
        let g = DiagonalAction::from_weights(n, &gens.iter().map(|(o, w)| (*o, w.as_slice())).collect::<Vec<_>>()).unwrap();
        prop_assume!(g.group_order().unwrap() <= 27);
        let chart = n - 1;
        let invariant: Vec<Vec<i32>> = monomials(n, d)
            .into_iter()
            .filter(|m| m[chart] < d && g.character(m).unwrap().iter().all(|&c| c == 0))
            .collect();
        prop_assume!(!invariant.is_empty());
        // x_chart^d plus random invariant monomials.
        let mut terms: HashMap<Vec<i32>, Rational> = HashMap::new();
        let mut top = vec![0; n];
        top[chart] = d;
        terms.insert(top, Rational::one());
        for (k, idx) in picks.iter().enumerate() {
            let c = if coeffs[k] == 0 { 1 } else { coeffs[k] };
            terms.insert(idx.get(&invariant).clone(), Rational::from_int(c));
        }
        let f = LaurentPoly::from_terms(indexed_vars("x", n), terms.into_iter().map(|(e, c)| (ExponentVec(e), c)));
        prop_assume!(f.num_terms() >= 2 && !f.divisible_by_var(chart));
        let basis = g.invariant_lattice_at(chart).unwrap().hnf().matrix().clone();
        let step = nc_step(&f, &g, None, chart, &basis).unwrap();
        prop_assert_eq!(step.output.num_terms(), f.num_terms());
        prop_assert_eq!(coefficient_multiset(&step.output), coefficient_multiset(&f));
        prop_assert!(step.round_trip_holds().unwrap());
        prop_assert!(!step.output.divisible_by_var(chart));
    }
}
