use std::collections::BTreeMap;

use curvlab::exprdsl::{eval_f64, eval_jet, parse, BinaryOp, EvalEnv, Expr};
use curvlab::jets::{Elementary, Jet};
use proptest::prelude::*;

const DIM: usize = 3;
const NAMES: [&str; DIM] = ["x", "y", "z"];

fn names() -> Vec<String> {
    NAMES.iter().map(|s| s.to_string()).collect()
}

fn point() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, DIM)
}

/// A random order-3 jet with O(1) coefficients.
fn jet() -> impl Strategy<Value = Jet> {
    prop::collection::vec(-2.0f64..2.0, 20).prop_map(|c| Jet::from_coeffs(DIM, 3, c).unwrap())
}

fn close(a: &Jet, b: &Jet, tol: f64) -> bool {
    a.coeffs()
        .iter()
        .zip(b.coeffs())
        .all(|(x, y)| (x - y).abs() <= tol * (1.0 + x.abs().max(y.abs())))
}

/// Expressions that are smooth and finite on [-1, 1]^3: every division and
/// logarithm sees an argument of the form `1 + u^2` or `exp(u)`.
fn safe_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0.25f64..2.0).prop_map(Expr::num),
        prop::sample::select(NAMES.to_vec()).prop_map(Expr::sym),
    ];
    leaf.prop_recursive(3, 24, 2, |inner| {
        let one_plus_sq = |u: Expr| {
            Expr::binary(
                BinaryOp::Add,
                Expr::num(1.0),
                Expr::binary(BinaryOp::Pow, u, Expr::num(2.0)),
            )
        };
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::binary(BinaryOp::Add, a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::binary(BinaryOp::Sub, a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::binary(BinaryOp::Mul, a, b)),
            (inner.clone(), inner.clone()).prop_map(move |(a, b)| Expr::binary(
                BinaryOp::Div,
                a,
                one_plus_sq(b)
            )),
            inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
            inner
                .clone()
                .prop_map(|a| Expr::binary(BinaryOp::Pow, a, Expr::num(3.0))),
            (
                prop::sample::select(vec![
                    Elementary::Sin,
                    Elementary::Cos,
                    Elementary::Tanh,
                    Elementary::Sinh,
                    Elementary::Cosh
                ]),
                inner.clone()
            )
                .prop_map(|(f, a)| Expr::Call(
                    f,
                    Box::new(Expr::binary(BinaryOp::Mul, Expr::num(0.5), a))
                )),
            inner
                .clone()
                .prop_map(move |a| Expr::Call(Elementary::Log, Box::new(one_plus_sq(a)))),
            inner
                .clone()
                .prop_map(move |a| Expr::Call(Elementary::Sqrt, Box::new(one_plus_sq(a)))),
            inner.prop_map(|a| Expr::Call(
                Elementary::Exp,
                Box::new(Expr::Call(Elementary::Tanh, Box::new(a)))
            )),
        ]
    })
}

fn env(p: &[f64]) -> EvalEnv {
    EvalEnv::at_point(&names(), p, 3, &BTreeMap::new()).unwrap()
}

fn coords(p: &[f64]) -> BTreeMap<String, f64> {
    names().into_iter().zip(p.iter().copied()).collect()
}

fn f64_at(e: &Expr, p: &[f64]) -> f64 {
    eval_f64(e, &coords(p), &BTreeMap::new()).unwrap()
}

/// Fourth-order central difference of `f` along `axis`.
fn central(f: &dyn Fn(&[f64]) -> f64, p: &[f64], axis: usize, h: f64) -> f64 {
    let at = |s: f64| {
        let mut q = p.to_vec();
        q[axis] += s * h;
        f(&q)
    };
    (-at(2.0) + 8.0 * at(1.0) - 8.0 * at(-1.0) + at(-2.0)) / (12.0 * h)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn addition_commutes_and_associates(a in jet(), b in jet(), c in jet()) {
        prop_assert!(close(&(&a + &b), &(&b + &a), 0.0));
        prop_assert!(close(&(&(&a + &b) + &c), &(&a + &(&b + &c)), 1e-15));
    }

    #[test]
    fn multiplication_is_a_commutative_ring(a in jet(), b in jet(), c in jet()) {
        prop_assert!(close(&(&a * &b), &(&b * &a), 1e-14));
        prop_assert!(close(&(&(&a * &b) * &c), &(&a * &(&b * &c)), 1e-12));
        prop_assert!(close(&(&a * &(&b + &c)), &(&(&a * &b) + &(&a * &c)), 1e-12));
        let one = Jet::constant(DIM, 3, 1.0);
        prop_assert!(close(&(&a * &one), &a, 0.0));
        prop_assert!(close(&(&a - &a), &Jet::zero(DIM, 3), 0.0));
    }

    #[test]
    fn division_inverts_multiplication(a in jet(), b in jet()) {
        let b = b.add_constant(if b.value() >= 0.0 { 3.0 } else { -3.0 });
        let q = a.div(&b).unwrap();
        prop_assert!(close(&(&q * &b), &a, 1e-12));
    }

    #[test]
    fn log_inverts_exp(a in jet()) {
        let back = a.apply(Elementary::Exp).unwrap().apply(Elementary::Log).unwrap();
        prop_assert!(close(&back, &a, 1e-12));
    }

    #[test]
    fn exp_turns_sums_into_products(a in jet(), b in jet()) {
        let lhs = (&a + &b).apply(Elementary::Exp).unwrap();
        let rhs = &a.apply(Elementary::Exp).unwrap() * &b.apply(Elementary::Exp).unwrap();
        prop_assert!(close(&lhs, &rhs, 1e-11));
    }

    #[test]
    fn pythagorean_identity(a in jet()) {
        let s = a.apply(Elementary::Sin).unwrap();
        let c = a.apply(Elementary::Cos).unwrap();
        prop_assert!(close(&(&(&s * &s) + &(&c * &c)), &Jet::constant(DIM, 3, 1.0), 1e-13));
    }

    #[test]
    fn sqrt_squares_back(a in jet()) {
        let a = a.add_constant(if a.value() >= 0.0 { 3.0 } else { -3.0 });
        let a = &a * &a;
        let r = a.apply(Elementary::Sqrt).unwrap();
        prop_assert!(close(&(&r * &r), &a, 1e-12));
    }

    #[test]
    fn differentiation_commutes(a in jet(), i in 0..DIM, j in 0..DIM) {
        let ij = a.differentiate(i).unwrap().differentiate(j).unwrap();
        let ji = a.differentiate(j).unwrap().differentiate(i).unwrap();
        prop_assert!(close(&ij, &ji, 0.0));
    }

    #[test]
    fn product_rule(a in jet(), b in jet(), i in 0..DIM) {
        let lhs = (&a * &b).differentiate(i).unwrap();
        let rhs = &(&a.differentiate(i).unwrap() * &b.truncate(2))
            + &(&a.truncate(2) * &b.differentiate(i).unwrap());
        prop_assert!(close(&lhs, &rhs, 1e-12));
    }

    #[test]
    fn printed_expressions_parse_back(e in safe_expr()) {
        let text = e.to_string();
        prop_assert_eq!(parse(&text).unwrap(), e);
    }

    #[test]
    fn jet_value_matches_plain_evaluation(e in safe_expr(), p in point()) {
        let j = eval_jet(&e, &env(&p)).unwrap();
        let v = f64_at(&e, &p);
        prop_assert!((j.value() - v).abs() <= 1e-13 * (1.0 + v.abs()));
    }

    #[test]
    fn jet_gradient_matches_finite_differences(e in safe_expr(), p in point()) {
        let j = eval_jet(&e, &env(&p)).unwrap();
        let f = |q: &[f64]| f64_at(&e, q);
        for axis in 0..DIM {
            let h = 1e-3 * p[axis].abs().max(1.0);
            let fd = central(&f, &p, axis, h);
            let d = j.derivative(&[axis]).unwrap();
            prop_assert!((d - fd).abs() <= 1e-5 * d.abs().max(1.0), "axis {} jet {} fd {}", axis, d, fd);
        }
    }
}

#[test]
fn seeded_coordinate_has_unit_gradient() {
    let p = [0.3, -0.2, 0.7];
    for v in 0..DIM {
        let j = Jet::seed(&p, v, 3).unwrap();
        assert_eq!(j.value(), p[v]);
        for w in 0..DIM {
            assert_eq!(j.derivative(&[w]).unwrap(), if v == w { 1.0 } else { 0.0 });
            assert_eq!(j.derivative(&[v, w]).unwrap(), 0.0);
        }
    }
}

#[test]
fn third_derivatives_of_a_known_polynomial() {
    // f = x^2 y z + y^3: ∂x∂x∂y = 2z, ∂y∂y∂y = 6, ∂x∂y∂z = 2x.
    let e = parse("x^2*y*z + y^3").unwrap();
    let p = [0.4, -0.6, 1.5];
    let j = eval_jet(&e, &env(&p)).unwrap();
    assert!((j.derivative(&[0, 0, 1]).unwrap() - 2.0 * p[2]).abs() < 1e-14);
    assert!((j.derivative(&[1, 1, 1]).unwrap() - 6.0).abs() < 1e-14);
    assert!((j.derivative(&[0, 1, 2]).unwrap() - 2.0 * p[0]).abs() < 1e-14);
    assert_eq!(
        j.partial(&[1, 1, 1]).unwrap(),
        j.derivative(&[0, 1, 2]).unwrap()
    );
}
