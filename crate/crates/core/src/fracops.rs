//! Riemann–Liouville fractional integrals (`α > 0`) and derivatives (`α < 0`)
//! of power functions and Jacobi polynomials, kept in symbolic power-term form.

use crate::error::{Error, Result};
use crate::jacobi::{gauss_jacobi, ln_delta_prime, ln_factorial, sign_pow, JacobiBasis, Side};
use crate::specfun::{self, SignedLog};
use serde::{Deserialize, Serialize};
use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

/// `I^α` on the given side; `α < 0` is the derivative of order `|α|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FracOrder {
    alpha: f64,
    side: Side,
}

impl FracOrder {
    pub fn new(alpha: f64, side: Side) -> Result<Self> {
        if !(alpha.abs() < 1.0) {
            return Err(Error::domain(
                "FracOrder",
                format!("order {alpha} must satisfy |alpha| < 1"),
            ));
        }
        Ok(FracOrder { alpha, side })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn side(&self) -> Side {
        self.side
    }
    pub fn inverse(&self) -> FracOrder {
        FracOrder {
            alpha: -self.alpha,
            side: self.side,
        }
    }
}

/// `coefficient · (x−a)^exponent` (left anchor) or `coefficient · (b−x)^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerTerm {
    pub exponent: f64,
    pub coefficient: f64,
    pub anchor: Side,
}

impl PowerTerm {
    pub fn new(exponent: f64, coefficient: f64, anchor: Side) -> Result<Self> {
        let t = PowerTerm {
            exponent,
            coefficient,
            anchor,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.exponent > -1.0) || !self.exponent.is_finite() || !self.coefficient.is_finite() {
            return Err(Error::domain(
                "PowerTerm",
                format!(
                    "exponent {} must exceed -1 and the coefficient {} must be finite",
                    self.exponent, self.coefficient
                ),
            ));
        }
        Ok(())
    }

    pub fn eval(&self, a: f64, b: f64, x: f64) -> f64 {
        let d = match self.anchor {
            Side::Left => x - a,
            Side::Right => b - x,
        };
        if self.exponent == 0.0 {
            self.coefficient
        } else {
            self.coefficient * d.powf(self.exponent)
        }
    }
}

/// `Σ terms(x)`.
pub fn eval_terms(terms: &[PowerTerm], a: f64, b: f64, x: f64) -> f64 {
    terms.iter().map(|t| t.eval(a, b, x)).sum()
}

/// Image of a power term: `I^α d^k = Γ(k+1)/Γ(k+1+α) d^{k+α}`.
pub fn frac_power(term: &PowerTerm, order: &FracOrder) -> Result<PowerTerm> {
    if term.anchor != order.side {
        return Err(Error::contract(
            "frac_power",
            format!(
                "{} anchor cannot be used with the {} operator",
                term.anchor.as_str(),
                order.side.as_str()
            ),
        ));
    }
    let k = term.exponent;
    let e = k + order.alpha;
    if !(e > -1.0) {
        return Err(Error::domain(
            "frac_power",
            format!("image exponent {e} must exceed -1"),
        ));
    }
    if order.alpha == 0.0 {
        return Ok(*term);
    }
    let ratio = specfun::gamma_ratio(k + 1.0, order.alpha)?;
    Ok(PowerTerm {
        exponent: e,
        coefficient: term.coefficient / ratio,
        anchor: term.anchor,
    })
}

/// `I^α p_n` as `n+1` power terms anchored at the operator's endpoint.
pub fn frac_jacobi(basis: &JacobiBasis, n: usize, order: &FracOrder) -> Vec<PowerTerm> {
    basis
        .ln_taylor_coefficients(n, order.side)
        .into_iter()
        .enumerate()
        .map(|(k, c)| {
            let kf = k as f64;
            let ln = c.ln_abs + ln_factorial(k) - libm::lgamma_r(kf + 1.0 + order.alpha).0;
            PowerTerm {
                exponent: kf + order.alpha,
                coefficient: c.sign * ln.exp(),
                anchor: order.side,
            }
        })
        .collect()
}

/// Closed-form Jacobi coefficient `∫ term · p_n ω` of a single power term.
///
/// For the left anchor `(x−a)^e` this is
/// `δ'_n (e)↓n (b−a)^(e+(β+γ+1)/2) B(β+e+1, γ+n+1)` with the falling factorial
/// `(e)↓n`; the right anchor mirrors it with an extra `(−1)^n`.
pub fn power_coefficient(basis: &JacobiBasis, term: &PowerTerm, n: usize) -> Result<f64> {
    term.validate()?;
    let (near, far) = match term.anchor {
        Side::Left => (basis.beta(), basis.gamma()),
        Side::Right => (basis.gamma(), basis.beta()),
    };
    let e = term.exponent;
    if !(near + e > -1.0) {
        return Err(Error::domain(
            "power_coefficient",
            format!("term exponent {e} is not integrable against the weight"),
        ));
    }
    let falling = ln_falling(e, n);
    if falling.is_zero() || term.coefficient == 0.0 {
        return Ok(0.0);
    }
    let ln = ln_delta_prime(basis.beta(), basis.gamma(), n)
        + falling.ln_abs
        + (e + 0.5 * (basis.beta() + basis.gamma() + 1.0)) * basis.length().ln()
        + specfun::ln_beta(near + e + 1.0, far + n as f64 + 1.0)?;
    let sign = falling.sign
        * term.coefficient.signum()
        * if term.anchor == Side::Right {
            sign_pow(n)
        } else {
            1.0
        };
    Ok(sign * (ln + term.coefficient.abs().ln()).exp())
}

/// `e (e−1) ... (e−n+1)`, exactly zero for integer `0 ≤ e < n`.
fn ln_falling(e: f64, n: usize) -> SignedLog {
    if e == e.trunc() && e >= 0.0 && (e as usize) < n {
        return SignedLog::ZERO;
    }
    // e↓n = Γ(e+1)/Γ(e−n+1)
    let num = specfun::ln_gamma_signed(e + 1.0).expect("e > -1");
    let den = specfun::reciprocal_gamma_split(e.fract(), e.trunc() as i64 - n as i64 + 1);
    num * den
}

/// Coefficients `0..=n_max` of a sum of power terms, in closed form.
pub fn project_power_terms(
    basis: &JacobiBasis,
    terms: &[PowerTerm],
    n_max: usize,
) -> Result<Vec<f64>> {
    (0..=n_max)
        .map(|n| {
            terms
                .iter()
                .map(|t| power_coefficient(basis, t, n))
                .sum::<Result<f64>>()
        })
        .collect()
}

const QUAD_START: usize = 64;
const QUAD_MAX: usize = 4096;
const QUAD_AGREE: f64 = 1e-9;

/// `I^μ f(x)` for `μ ∈ (0, 1)` by direct quadrature of the Abel kernel.
///
/// With `t = x + (b−x)s` (right side) the kernel `(t−x)^(μ−1)` becomes the
/// weight `s^(μ−1)` of a Gauss–Jacobi rule on `(0, 1)`. The node count starts
/// at 64 and doubles until two results agree to 1e-9.
pub fn frac_quadrature(
    f: &dyn Fn(f64) -> f64,
    order: &FracOrder,
    a: f64,
    b: f64,
    x: f64,
) -> Result<f64> {
    let mu = order.alpha;
    if !(mu > 0.0 && mu < 1.0) {
        return Err(Error::contract(
            "frac_quadrature",
            format!("order {mu} must lie in (0, 1)"),
        ));
    }
    if !(a <= x && x <= b) {
        return Err(Error::domain(
            "frac_quadrature",
            format!("x = {x} lies outside [{a}, {b}]"),
        ));
    }
    let span = match order.side {
        Side::Right => b - x,
        Side::Left => x - a,
    };
    if span == 0.0 {
        return Ok(0.0);
    }
    let scale = span.powf(mu) / specfun::log_gamma(mu)?.exp();
    let at = |s: f64| match order.side {
        Side::Right => x + span * s,
        Side::Left => x - span * s,
    };
    let mut nodes = QUAD_START;
    let mut prev: Option<f64> = None;
    loop {
        let rule = kernel_rule(mu, nodes)?;
        let v = scale
            * rule
                .0
                .iter()
                .zip(&rule.1)
                .map(|(&s, &w)| w * f(at(s)))
                .sum::<f64>();
        if let Some(p) = prev {
            if (v - p).abs() <= QUAD_AGREE * v.abs().max(1.0) || nodes >= QUAD_MAX {
                return Ok(v);
            }
        }
        prev = Some(v);
        nodes *= 2;
    }
}

type Rule = Rc<(Vec<f64>, Vec<f64>)>;

thread_local! {
    static KERNEL_RULES: RefCell<HashMap<(u64, usize), Rule>> = RefCell::new(HashMap::new());
}

/// Gauss–Jacobi rule on `(0, 1)` with weight `s^(μ−1)`, cached per thread.
fn kernel_rule(mu: f64, nodes: usize) -> Result<Rule> {
    let key = (mu.to_bits(), nodes);
    if let Some(r) = KERNEL_RULES.with(|c| c.borrow().get(&key).cloned()) {
        return Ok(r);
    }
    let rule = Rc::new(gauss_jacobi(
        &JacobiBasis::new(0.0, 1.0, mu - 1.0, 0.0)?,
        nodes,
    )?);
    KERNEL_RULES.with(|c| c.borrow_mut().insert(key, rule.clone()));
    Ok(rule)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(beta: f64, gamma: f64) -> JacobiBasis {
        JacobiBasis::new(0.0, 1.0, beta, gamma).unwrap()
    }

    #[test]
    fn order_validation() {
        assert!(FracOrder::new(1.0, Side::Left).is_err());
        assert!(FracOrder::new(-1.0, Side::Left).is_err());
        assert!(FracOrder::new(f64::NAN, Side::Left).is_err());
        assert!(PowerTerm::new(-1.0, 1.0, Side::Left).is_err());
    }

    #[test]
    fn integral_of_constant() {
        let t = PowerTerm::new(0.0, 1.0, Side::Right).unwrap();
        let img = frac_power(&t, &FracOrder::new(0.5, Side::Right).unwrap()).unwrap();
        assert_eq!(img.exponent, 0.5);
        let want = 1.0 / specfun::log_gamma(1.5).unwrap().exp();
        assert!((img.coefficient - want).abs() < 1e-15);
    }

    #[test]
    fn identity_order_and_mismatch() {
        let t = PowerTerm::new(1.3, -2.0, Side::Left).unwrap();
        assert_eq!(
            frac_power(&t, &FracOrder::new(0.0, Side::Left).unwrap()).unwrap(),
            t
        );
        let err = frac_power(&t, &FracOrder::new(0.3, Side::Right).unwrap()).unwrap_err();
        assert!(matches!(err, Error::Contract { .. }));
        let t = PowerTerm::new(-0.2, 1.0, Side::Left).unwrap();
        assert!(frac_power(&t, &FracOrder::new(-0.9, Side::Left).unwrap()).is_err());
    }

    #[test]
    fn semigroup_on_powers() {
        let t = PowerTerm::new(1.0, 1.0, Side::Right).unwrap();
        let d = frac_power(&t, &FracOrder::new(-0.5, Side::Right).unwrap()).unwrap();
        let back = frac_power(&d, &FracOrder::new(0.5, Side::Right).unwrap()).unwrap();
        assert!((back.exponent - 1.0).abs() < 1e-12);
        assert!((back.coefficient - 1.0).abs() < 1e-12);
    }

    #[test]
    fn alpha_zero_image_reproduces_polynomial() {
        let b = JacobiBasis::new(-2.0, 3.0, 0.5, -0.4).unwrap();
        for side in [Side::Left, Side::Right] {
            let ord = FracOrder::new(0.0, side).unwrap();
            for n in 0..=12 {
                let terms = frac_jacobi(&b, n, &ord);
                assert_eq!(terms.len(), n + 1);
                for i in 0..=10 {
                    let x = -2.0 + 0.5 * i as f64;
                    let v = b.evaluate(n, x).unwrap();
                    let s = eval_terms(&terms, b.a(), b.b(), x);
                    let mag: f64 = terms.iter().map(|t| t.eval(b.a(), b.b(), x).abs()).sum();
                    assert!((s - v).abs() < 1e-9 * (1.0 + v.abs()) + 64.0 * f64::EPSILON * mag);
                }
            }
        }
    }

    #[test]
    fn n_zero_image_is_single_term() {
        let b = unit(0.2, 0.3);
        let ord = FracOrder::new(0.4, Side::Right).unwrap();
        let t = frac_jacobi(&b, 0, &ord);
        assert_eq!(t.len(), 1);
        let p0 = b.evaluate(0, 0.5).unwrap();
        let want = p0 / specfun::log_gamma(1.4).unwrap().exp();
        assert!((t[0].coefficient - want).abs() < 1e-14);
        assert_eq!(t[0].exponent, 0.4);
    }

    #[test]
    fn quadrature_of_constant() {
        let ord = FracOrder::new(0.3, Side::Right).unwrap();
        for x in [0.0, 0.25, 0.9] {
            let q = frac_quadrature(&|_| 1.0, &ord, 0.0, 1.0, x).unwrap();
            let want = (1.0 - x).powf(0.3) / specfun::log_gamma(1.3).unwrap().exp();
            assert!((q - want).abs() < 1e-10);
        }
        assert_eq!(frac_quadrature(&|_| 1.0, &ord, 0.0, 1.0, 1.0).unwrap(), 0.0);
        let near = frac_quadrature(&|_| 1.0, &ord, 0.0, 1.0, 1.0 - 1e-12).unwrap();
        assert!(near < 1e-3);
        assert!(frac_quadrature(
            &|_| 1.0,
            &FracOrder::new(-0.3, Side::Right).unwrap(),
            0.0,
            1.0,
            0.5
        )
        .is_err());
    }

    #[test]
    fn quadrature_matches_power_closed_form() {
        let ord = FracOrder::new(0.5, Side::Right).unwrap();
        let img = frac_power(&PowerTerm::new(2.0, 1.0, Side::Right).unwrap(), &ord).unwrap();
        for x in [0.1, 0.5, 0.8] {
            let q = frac_quadrature(&|t: f64| (1.0 - t).powi(2), &ord, 0.0, 1.0, x).unwrap();
            assert!((q - img.eval(0.0, 1.0, x)).abs() < 1e-9);
        }
        let ord = FracOrder::new(0.5, Side::Left).unwrap();
        let img = frac_power(&PowerTerm::new(2.0, 1.0, Side::Left).unwrap(), &ord).unwrap();
        let q = frac_quadrature(&|t: f64| (t - 0.0).powi(2), &ord, 0.0, 1.0, 0.7).unwrap();
        assert!((q - img.eval(0.0, 1.0, 0.7)).abs() < 1e-9);
    }

    #[test]
    fn jacobi_image_matches_quadrature() {
        let b = unit(0.2, -0.4);
        let ord = FracOrder::new(0.5, Side::Right).unwrap();
        let terms = frac_jacobi(&b, 4, &ord);
        for i in 1..=20 {
            let x = i as f64 / 21.0;
            let q = frac_quadrature(&|t| b.values_upto(4, t)[4], &ord, 0.0, 1.0, x).unwrap();
            let c = eval_terms(&terms, 0.0, 1.0, x);
            assert!((q - c).abs() < 1e-7 * (1.0 + c.abs()), "x={x}");
        }
    }

    #[test]
    fn power_coefficient_matches_reference() {
        let b = unit(0.0, 0.0);
        let g = specfun::log_gamma(1.5).unwrap().exp();
        let t = PowerTerm::new(0.5, 1.0 / g, Side::Right).unwrap();
        let want = [
            0.752_252_778_063_675_05,
            -0.260_588_006_348_223_96,
            -0.048_059_667_086_098_287,
            -0.018_954_988_322_037_607,
            -0.009_769_516_598_229_546,
            -0.005_815_711_450_675_299,
        ];
        let got = project_power_terms(&b, &[t], 5).unwrap();
        for (g, w) in got.iter().zip(want) {
            assert!(((g - w) / w).abs() < 1e-13, "{g} vs {w}");
        }
    }

    #[test]
    fn power_coefficient_matches_quadrature_projection() {
        let b = JacobiBasis::new(-2.0, 3.0, 0.3, -0.4).unwrap();
        for t in [
            PowerTerm::new(2.0, 0.7, Side::Left).unwrap(),
            PowerTerm::new(1.0, -1.3, Side::Right).unwrap(),
        ] {
            let closed = project_power_terms(&b, &[t], 6).unwrap();
            let quad = b.project(&|x| t.eval(b.a(), b.b(), x), 6).unwrap();
            for (c, q) in closed.iter().zip(quad.values()) {
                assert!((c - q).abs() < 1e-11, "{c} vs {q}");
            }
            // integer exponent: exactly zero beyond the degree
            assert_eq!(closed[5], 0.0);
        }
    }
}
