use abel_core::fracops::{eval_terms, frac_jacobi, frac_power, frac_quadrature};
use abel_core::{FracOrder, JacobiBasis, PowerTerm, Side};
use proptest::prelude::*;

const EXPONENTS: [f64; 3] = [-0.4, 0.0, 0.5];

#[test]
fn closed_form_images_match_quadrature() {
    for side in [Side::Right, Side::Left] {
        for mu in [0.25, 0.5, 0.75] {
            let order = FracOrder::new(mu, side).unwrap();
            for beta in EXPONENTS {
                for gamma in EXPONENTS {
                    let basis = JacobiBasis::new(0.0, 1.0, beta, gamma).unwrap();
                    for n in 0..=10 {
                        let terms = frac_jacobi(&basis, n, &order);
                        let p = |x: f64| basis.evaluate(n, x).unwrap();
                        let xs: Vec<f64> = (1..=20).map(|i| i as f64 / 21.0).collect();
                        let closed: Vec<f64> = xs
                            .iter()
                            .map(|&x| eval_terms(&terms, 0.0, 1.0, x))
                            .collect();
                        let scale = 1.0 + closed.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                        for (&x, c) in xs.iter().zip(&closed) {
                            let q = frac_quadrature(&p, &order, 0.0, 1.0, x).unwrap();
                            assert!(
                                (c - q).abs() <= 1e-6 * scale,
                                "{side:?} μ={mu} β={beta} γ={gamma} n={n} x={x}: {c} vs {q}"
                            );
                        }
                    }
                }
            }
        }
    }
}

/// Rounding floor of a power-term sum: the terms cancel, so the achievable
/// accuracy is set by their absolute sum.
fn cancellation_floor(terms: &[PowerTerm], a: f64, b: f64, x: f64) -> f64 {
    64.0 * f64::EPSILON * terms.iter().map(|t| t.eval(a, b, x).abs()).sum::<f64>()
}

#[test]
fn identity_order_images_reproduce_polynomials() {
    for (a, b) in [(0.0, 1.0), (-2.0, 3.0)] {
        for beta in EXPONENTS {
            for gamma in EXPONENTS {
                let basis = JacobiBasis::new(a, b, beta, gamma).unwrap();
                for side in [Side::Left, Side::Right] {
                    let order = FracOrder::new(0.0, side).unwrap();
                    for n in 0..=12 {
                        let terms = frac_jacobi(&basis, n, &order);
                        for i in 0..=40 {
                            let x = a + (b - a) * i as f64 / 40.0;
                            let want = basis.evaluate(n, x).unwrap();
                            let got = eval_terms(&terms, a, b, x);
                            let tol =
                                1e-9 * (1.0 + want.abs()) + cancellation_floor(&terms, a, b, x);
                            assert!((got - want).abs() <= tol, "({a},{b}) {side:?} n={n} x={x}");
                        }
                    }
                }
            }
        }
    }
}

fn anchor() -> impl Strategy<Value = Side> {
    prop_oneof![Just(Side::Left), Just(Side::Right)]
}

proptest! {
    #[test]
    fn semigroup_on_powers(k in -0.2f64..6.0, c in -10.0f64..10.0, mu in 0.01f64..0.99, side in anchor()) {
        let t = PowerTerm::new(k, c, side).unwrap();
        let up = frac_power(&t, &FracOrder::new(mu, side).unwrap()).unwrap();
        let back = frac_power(&up, &FracOrder::new(-mu, side).unwrap()).unwrap();
        prop_assert!((back.exponent - k).abs() < 1e-12);
        prop_assert!((back.coefficient - c).abs() <= 1e-12 * c.abs().max(1.0));
    }

    #[test]
    fn images_are_linear(
        k1 in 0.0f64..4.0, k2 in 0.0f64..4.0, c1 in -3.0f64..3.0, c2 in -3.0f64..3.0,
        alpha in -0.9f64..0.9, x in 0.01f64..0.99, side in anchor(),
    ) {
        let order = FracOrder::new(alpha, side).unwrap();
        let f1 = frac_power(&PowerTerm::new(k1, 1.0, side).unwrap(), &order).unwrap();
        let f2 = frac_power(&PowerTerm::new(k2, 1.0, side).unwrap(), &order).unwrap();
        let g1 = frac_power(&PowerTerm::new(k1, c1, side).unwrap(), &order).unwrap();
        let g2 = frac_power(&PowerTerm::new(k2, c2, side).unwrap(), &order).unwrap();
        let combined = eval_terms(&[g1, g2], 0.0, 1.0, x);
        let separate = c1 * f1.eval(0.0, 1.0, x) + c2 * f2.eval(0.0, 1.0, x);
        prop_assert!((combined - separate).abs() <= 1e-13 * (1.0 + separate.abs()));
    }

    #[test]
    fn jacobi_images_compose(n in 0usize..8, mu in 0.05f64..0.95, side in anchor(), x in 0.02f64..0.98) {
        // I^{−μ} I^{μ} p_n = p_n, applied term by term
        let basis = JacobiBasis::new(0.0, 1.0, 0.2, -0.3).unwrap();
        let up = frac_jacobi(&basis, n, &FracOrder::new(mu, side).unwrap());
        let down: Vec<PowerTerm> = up
            .iter()
            .map(|t| frac_power(t, &FracOrder::new(-mu, side).unwrap()).unwrap())
            .collect();
        let want = basis.evaluate(n, x).unwrap();
        let tol = 1e-10 * (1.0 + want.abs()) + cancellation_floor(&down, 0.0, 1.0, x);
        prop_assert!((eval_terms(&down, 0.0, 1.0, x) - want).abs() <= tol);
    }
}
