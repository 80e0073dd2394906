use std::collections::BTreeMap;

use curvlab::curvature::CurvaturePack;
use curvlab::exprdsl::Expr;
use curvlab::geometry::{apply_change_jets, check_compatibility, ChangeKind};
use curvlab::jets::Jet;
use curvlab::subject::{evaluate, Subject};
use curvlab::tensor::Tensor;
use curvlab::{catalog, reference};
use proptest::prelude::*;
use proptest::strategy::ValueTree;

fn subject(id: &str) -> Subject {
    catalog::subject(id, &BTreeMap::new()).unwrap()
}

fn with_params(id: &str, params: &[(&str, f64)]) -> Subject {
    let overrides = params.iter().map(|&(k, v)| (k.to_string(), v)).collect();
    catalog::subject(id, &overrides).unwrap()
}

fn in_box(s: &Subject) -> impl Strategy<Value = Vec<f64>> {
    s.sample_box.iter().map(|&(a, b)| a..b).collect::<Vec<_>>()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

#[test]
fn riemann_matches_finite_difference_commutator() {
    let cases: &[(&str, &[f64])] = &[
        ("sphere2", &[0.3, -0.4]),
        ("sphere4", &[0.2, -0.1, 0.5, 0.3]),
        ("hyperbolic4", &[0.1, 0.2, -0.15, 0.05]),
        ("schwarzschild", &[0.5, 4.0, 1.1, 2.0]),
        ("aniso4", &[0.4, -0.7, 0.3, 0.9]),
        ("flrw4", &[1.3, 0.2, -0.4, 0.1]),
        ("desitter_like5", &[0.2, 0.1, -0.3, 0.4, 0.5]),
        ("generic3", &[0.5, -0.3, 0.8]),
    ];
    for &(id, x) in cases {
        let s = subject(id);
        let pack = evaluate(&s.structure, x).unwrap().pack;
        let fd = reference::riemann(s.structure.metric(), x).unwrap();
        let scale = pack.riemann.max_abs().max(1.0);
        let err = pack
            .riemann
            .data()
            .iter()
            .zip(&fd)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(
            err <= 1e-5 * scale,
            "{id}: max deviation {err:e} (scale {scale:e})"
        );
    }
}

#[test]
fn sphere_scalar_curvature_is_n_times_n_minus_one() {
    for (id, n) in [("sphere2", 2usize), ("sphere3", 3), ("sphere4", 4)] {
        let s = subject(id);
        let mut runner = proptest::test_runner::TestRunner::deterministic();
        for _ in 0..20 {
            let x = in_box(&s).new_tree(&mut runner).unwrap().current();
            let p = evaluate(&s.structure, &x).unwrap().pack;
            let nf = n as f64;
            assert!(
                rel(p.scalar, nf * (nf - 1.0)) <= 1e-8,
                "{id} R = {}",
                p.scalar
            );
            for j in 0..n {
                for l in 0..n {
                    let want = (nf - 1.0) * p.g.get(&[j, l]);
                    assert!((p.ricci.get(&[j, l]) - want).abs() <= 1e-8 * p.scale(&[]));
                }
            }
        }
    }
}

#[test]
fn hyperbolic_scalar_curvature_is_negative() {
    let p = evaluate(&subject("hyperbolic4").structure, &[0.1, -0.2, 0.05, 0.2])
        .unwrap()
        .pack;
    assert!(rel(p.scalar, -12.0) <= 1e-8, "R = {}", p.scalar);
}

#[test]
fn schwarzschild_is_ricci_flat_with_known_kretschmann() {
    for mass in [1.0, 0.5] {
        let s = with_params("schwarzschild", &[("M", mass)]);
        let mut runner = proptest::test_runner::TestRunner::deterministic();
        for _ in 0..20 {
            let x = in_box(&s).new_tree(&mut runner).unwrap().current();
            let p = evaluate(&s.structure, &x).unwrap().pack;
            assert!(
                p.ricci.max_abs() <= 1e-8 * p.scale(&[]),
                "Ricci {:e}",
                p.ricci.max_abs()
            );
            let r = x[1];
            let want = 48.0 * mass * mass / r.powi(6);
            let k = reference::kretschmann(&p);
            assert!((k - want).abs() <= 1e-8 * want, "K = {k}, expected {want}");
        }
    }
}

#[test]
fn flat_space_has_vanishing_curvature() {
    let p = evaluate(&subject("euclidean4").structure, &[0.1, 0.2, 0.3, 0.4])
        .unwrap()
        .pack;
    assert_eq!(p.riemann.max_abs(), 0.0);
    assert_eq!(p.w.max_abs(), 0.0);
    assert_eq!(p.c.max_abs(), 0.0);
}

fn identity_residual(g: &Tensor<Jet>, gi: &Tensor<Jet>) -> f64 {
    let n = g.dim();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let mut acc = Jet::zero(n, g.data()[0].order());
            for k in 0..n {
                acc = &acc + &(g.get(&[i, k]) * gi.get(&[k, j]));
            }
            let acc = acc.add_constant(if i == j { -1.0 } else { 0.0 });
            worst = worst.max(acc.max_abs());
        }
    }
    worst
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inverse_metric_is_exact_at_every_jet_order(x in in_box(&subject("generic3"))) {
        let m = subject("generic3").structure.metric().at(&x, 3).unwrap();
        prop_assert!(identity_residual(&m.g, &m.g_inv) <= 1e-12);
    }

    #[test]
    fn levi_civita_ricci_is_symmetric(x in in_box(&subject("aniso4"))) {
        let p = evaluate(&subject("aniso4").structure, &x).unwrap().pack;
        prop_assert!(p.varphi.max_abs() <= 1e-12 * p.scale(&[]));
        for i in 0..4 {
            for j in 0..4 {
                prop_assert!((p.ricci.get(&[i, j]) - p.ricci.get(&[j, i])).abs() <= 1e-12 * p.scale(&[]));
            }
        }
    }

    #[test]
    fn weyl_connection_is_compatible(x in in_box(&subject("weyl_nonclosed4"))) {
        let s = subject("weyl_nonclosed4");
        let e = evaluate(&s.structure, &x).unwrap();
        prop_assert!(check_compatibility(&e.connection, &s.structure, &x).unwrap() <= 1e-12);
        // df = dx1 ∧ dx2 ≠ 0, so the skew Ricci part cannot vanish.
        prop_assert!(e.pack.varphi.max_abs() > 0.1);
    }

    #[test]
    fn zero_change_leaves_the_pack_unchanged(x in in_box(&subject("flrw4"))) {
        let s = subject("flrw4");
        let e = evaluate(&s.structure, &x).unwrap();
        for kind in [ChangeKind::Projective, ChangeKind::Conformal] {
            let zero = vec![Jet::zero(4, e.connection.order()); 4];
            let changed = apply_change_jets(&e.connection, kind, &zero, &e.metric);
            let p = CurvaturePack::compute(&changed, &e.metric).unwrap();
            prop_assert_eq!(p.riemann.data(), e.pack.riemann.data());
            prop_assert_eq!(p.w.data(), e.pack.w.data());
            prop_assert_eq!(p.c.data(), e.pack.c.data());
        }
    }

    #[test]
    fn weyl_tensors_are_trace_free(x in in_box(&subject("generic3"))) {
        let p = evaluate(&subject("generic3").structure, &x).unwrap().pack;
        prop_assert!(CurvaturePack::first_trace(&p.w).max_abs() <= 1e-12 * p.scale(&[]));
        prop_assert!(CurvaturePack::first_trace(&p.c).max_abs() <= 1e-12 * p.scale(&[]));
    }
}

#[test]
fn metric_rescaling_by_a_constant_keeps_the_weyl_tensors() {
    let s = subject("aniso4");
    let x = [0.3, -0.2, 0.6, 0.1];
    let base = evaluate(&s.structure, &x).unwrap().pack;
    let scaled = curvlab::geometry::WeylStructure::levi_civita(
        s.structure.metric().rescaled(&Expr::num(2.5)),
    );
    let p = evaluate(&scaled, &x).unwrap().pack;
    assert!(p.w.max_abs_diff(&base.w) <= 1e-12 * base.scale(&[]));
    assert!(p.c.max_abs_diff(&base.c) <= 1e-12 * base.scale(&[]));
}
