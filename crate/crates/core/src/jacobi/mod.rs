//! Orthonormal Jacobi polynomials on a finite interval `(a, b)` with weight
//! `ω(x) = (x−a)^β (b−x)^γ`.
//!
//! Values come from the three-term recurrence. The closed forms for endpoint
//! derivatives and Taylor coefficients are exact but cancel badly at high
//! degree, so they serve as a second, independent description of the same
//! polynomials.

mod quadrature;

pub use quadrature::gauss_jacobi;

use crate::ddouble::DD;
use crate::error::{Error, Result};
use crate::specfun::{self, SignedLog};
use serde::{Deserialize, Serialize};

/// An interval endpoint, also used as the side of a fractional operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

impl std::str::FromStr for Side {
    type Err = Error;
    fn from_str(s: &str) -> Result<Side> {
        match s {
            "left" | "a+" => Ok(Side::Left),
            "right" | "b-" => Ok(Side::Right),
            other => Err(Error::Input(format!(
                "side must be `left` or `right`, got `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JacobiBasis {
    a: f64,
    b: f64,
    beta: f64,
    gamma: f64,
}

impl JacobiBasis {
    pub fn new(a: f64, b: f64, beta: f64, gamma: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::domain(
                "JacobiBasis",
                format!("interval ({a}, {b}) must be finite with a < b"),
            ));
        }
        if !(beta > -1.0 && gamma > -1.0 && beta.is_finite() && gamma.is_finite()) {
            return Err(Error::domain(
                "JacobiBasis",
                format!("weight exponents ({beta}, {gamma}) must exceed -1"),
            ));
        }
        Ok(JacobiBasis { a, b, beta, gamma })
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    /// Whether both exponents lie in `[−1/2, 1/2]`.
    pub fn in_theorem_scope(&self) -> bool {
        (-0.5..=0.5).contains(&self.beta) && (-0.5..=0.5).contains(&self.gamma)
    }

    /// The same interval with the weight exponents exchanged.
    pub fn swapped(&self) -> JacobiBasis {
        JacobiBasis {
            beta: self.gamma,
            gamma: self.beta,
            ..*self
        }
    }

    /// Total mass `∫ ω = (b−a)^(β+γ+1) B(β+1, γ+1)`.
    pub fn mass(&self) -> f64 {
        (self.ln_mass()).exp()
    }

    fn ln_mass(&self) -> f64 {
        (self.beta + self.gamma + 1.0) * self.length().ln()
            + specfun::ln_beta(self.beta + 1.0, self.gamma + 1.0).expect("exponents exceed -1")
    }

    /// Weight function value; only for use away from the endpoints.
    pub fn weight(&self, x: f64) -> f64 {
        (x - self.a).powf(self.beta) * (self.b - x).powf(self.gamma)
    }

    /// Recurrence coefficients `(a_n, b_n)` of `x p_n = b_{n+1} p_{n+1} + a_n p_n + b_n p_{n−1}`.
    /// `b_0` is unused and set to zero.
    pub fn recurrence(&self, n: usize) -> (f64, f64) {
        // (1−t)^A (1+t)^B on (−1, 1), t = (2x − a − b)/(b − a)
        let (aa, bb) = (self.gamma, self.beta);
        let s = aa + bb;
        let nf = n as f64;
        let a_t = if n == 0 {
            (bb - aa) / (s + 2.0)
        } else {
            (bb - aa) * (bb + aa) / ((2.0 * nf + s) * (2.0 * nf + s + 2.0))
        };
        let b_t = if n == 0 {
            0.0
        } else if n == 1 {
            (4.0 * (1.0 + aa) * (1.0 + bb) / ((2.0 + s).powi(2) * (3.0 + s))).sqrt()
        } else {
            let t = 2.0 * nf + s;
            (4.0 * nf * (nf + aa) * (nf + bb) * (nf + s) / (t * t * (t + 1.0) * (t - 1.0))).sqrt()
        };
        let half = 0.5 * self.length();
        (0.5 * (self.a + self.b) + half * a_t, half * b_t)
    }

    fn check_point(&self, x: f64) -> Result<()> {
        if !(self.a <= x && x <= self.b) {
            return Err(Error::domain(
                "evaluate",
                format!("x = {x} lies outside [{}, {}]", self.a, self.b),
            ));
        }
        Ok(())
    }

    /// `p_n(x)`.
    pub fn evaluate(&self, n: usize, x: f64) -> Result<f64> {
        self.check_point(x)?;
        Ok(*self.values_upto(n, x).last().expect("nonempty"))
    }

    /// `[p_0(x), ..., p_n(x)]` without the domain check.
    pub fn values_upto(&self, n: usize, x: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(n + 1);
        let p0 = (-0.5 * self.ln_mass()).exp();
        out.push(p0);
        if n == 0 {
            return out;
        }
        let (a0, _) = self.recurrence(0);
        let (_, b1) = self.recurrence(1);
        out.push((x - a0) * p0 / b1);
        for k in 1..n {
            let (ak, bk) = self.recurrence(k);
            let (_, bk1) = self.recurrence(k + 1);
            let next = ((x - ak) * out[k] - bk * out[k - 1]) / bk1;
            out.push(next);
        }
        out
    }

    /// `Σ c_n p_n(x)`.
    pub fn sum_series(&self, coeffs: &[f64], x: f64) -> f64 {
        if coeffs.is_empty() {
            return 0.0;
        }
        let vals = self.values_upto(coeffs.len() - 1, x);
        coeffs.iter().zip(vals).map(|(c, p)| c * p).sum()
    }

    /// `δ'_n`, the positive part of the normalization.
    pub fn delta_prime(&self, n: usize) -> f64 {
        ln_delta_prime(self.beta, self.gamma, n).exp()
    }

    /// The signed multiplier `δ_n = (−1)^n δ'_n (b−a)^(−n−(β+γ+1)/2)`.
    pub fn delta_n(&self, n: usize) -> f64 {
        let sb = self.beta + self.gamma + 1.0;
        let mag = if n == 0 && sb == 0.0 {
            -0.5 * (specfun::log_gamma(self.beta + 1.0).unwrap()
                + specfun::log_gamma(self.gamma + 1.0).unwrap())
        } else {
            ln_delta_prime(self.beta, self.gamma, n) - (n as f64 + 0.5 * sb) * self.length().ln()
        };
        sign_pow(n) * mag.exp()
    }

    /// `p_n^{(k)}` at an endpoint.
    pub fn endpoint_derivative(&self, n: usize, k: usize, end: Side) -> Result<f64> {
        Ok(self.ln_endpoint_derivative(n, k, end)?.value())
    }

    pub(crate) fn ln_endpoint_derivative(
        &self,
        n: usize,
        k: usize,
        end: Side,
    ) -> Result<SignedLog> {
        let (be, ga, sign) = match end {
            Side::Left => (self.beta, self.gamma, sign_pow(n + k)),
            Side::Right => (self.gamma, self.beta, 1.0),
        };
        let c = ln_tilde_c(n, k, be, ga)?;
        let ln = ln_delta_prime(self.beta, self.gamma, n) + c
            - (k as f64 + 0.5 * (self.beta + self.gamma + 1.0)) * self.length().ln();
        Ok(SignedLog { ln_abs: ln, sign })
    }

    /// Taylor coefficients of `p_n` in powers of `(x−a)` (left) or `(b−x)` (right).
    pub fn taylor_coefficients(&self, n: usize, about: Side) -> Vec<f64> {
        self.ln_taylor_coefficients(n, about)
            .into_iter()
            .map(|c| c.value())
            .collect()
    }

    pub(crate) fn ln_taylor_coefficients(&self, n: usize, about: Side) -> Vec<SignedLog> {
        (0..=n)
            .map(|k| {
                let d = self
                    .ln_endpoint_derivative(n, k, about)
                    .expect("k <= n by construction");
                let flip = if about == Side::Right {
                    sign_pow(k)
                } else {
                    1.0
                };
                SignedLog {
                    ln_abs: d.ln_abs - ln_factorial(k),
                    sign: d.sign * flip,
                }
            })
            .collect()
    }

    /// Evaluates the Taylor form about `about` in double-double arithmetic.
    ///
    /// The rounded coefficient list of [`Self::taylor_coefficients`] loses
    /// roughly `ε Σ|c_k||x−x0|^k`, which reaches 1e-5 at degree 15; this keeps
    /// the ratios of consecutive coefficients exact instead.
    pub fn taylor_evaluate(&self, n: usize, about: Side, x: f64) -> f64 {
        let (be, ga, dist) = match about {
            Side::Left => (
                self.beta,
                self.gamma,
                DD::from_f64(x) - DD::from_f64(self.a),
            ),
            Side::Right => (
                self.gamma,
                self.beta,
                DD::from_f64(self.b) - DD::from_f64(x),
            ),
        };
        let u = dist / (DD::from_f64(self.b) - DD::from_f64(self.a));
        // c_k / c_0 = (−1)^k [n!/((n−k)! k!)] (n+β+γ+1)_k / (β+1)_k u^k for both ends
        let mut term = DD::ONE;
        let mut acc = DD::ONE;
        for k in 0..n {
            let num =
                DD::from_f64((k as f64) - (n as f64)) * DD::sum_of(&[(n + 1 + k) as f64, be, ga]);
            let den = DD::from_f64((k + 1) as f64) * DD::sum_of(&[(k + 1) as f64, be]);
            term = term * num / den * u;
            acc = acc + term;
        }
        let nf = n as f64;
        let ln_c0 = ln_delta_prime(self.beta, self.gamma, n) + lg(be + 1.0 + nf)
            - lg(be + 1.0)
            - 0.5 * (self.beta + self.gamma + 1.0) * self.length().ln();
        let sign = if about == Side::Left {
            sign_pow(n)
        } else {
            1.0
        };
        sign * ln_c0.exp() * acc.to_f64()
    }

    /// Jacobi coefficients `f_n = ∫ f p_n ω`, `n = 0..=n_max`, using the default
    /// node count `2(n_max+1) + 32`.
    pub fn project(&self, f: &dyn Fn(f64) -> f64, n_max: usize) -> Result<CoefficientSequence> {
        self.project_with_nodes(f, n_max, 2 * (n_max + 1) + 32)
    }

    pub fn project_with_nodes(
        &self,
        f: &dyn Fn(f64) -> f64,
        n_max: usize,
        nodes: usize,
    ) -> Result<CoefficientSequence> {
        let (xs, ws) = gauss_jacobi(self, nodes)?;
        let mut acc = vec![0.0; n_max + 1];
        for (&x, &w) in xs.iter().zip(&ws) {
            let fx = f(x);
            if !fx.is_finite() {
                return Err(Error::Input(format!(
                    "right-hand side is not finite at node x = {x:e}"
                )));
            }
            for (c, p) in acc.iter_mut().zip(self.values_upto(n_max, x)) {
                *c += w * fx * p;
            }
        }
        CoefficientSequence::new(*self, acc)
    }
}

/// Jacobi coefficients tied to the basis they refer to.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientSequence {
    basis: JacobiBasis,
    values: Vec<f64>,
}

impl CoefficientSequence {
    pub fn new(basis: JacobiBasis, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Input("coefficient sequence is empty".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Input(format!(
                "coefficient {i} is not finite ({})",
                values[i]
            )));
        }
        Ok(CoefficientSequence { basis, values })
    }

    pub fn basis(&self) -> &JacobiBasis {
        &self.basis
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn len(&self) -> usize {
        self.values.len()
    }
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        self.basis.sum_series(&self.values, x)
    }
}

pub(crate) fn sign_pow(n: usize) -> f64 {
    if n.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

pub(crate) fn ln_factorial(n: usize) -> f64 {
    libm::lgamma_r(n as f64 + 1.0).0
}

fn lg(x: f64) -> f64 {
    libm::lgamma_r(x).0
}

/// `ln δ'_n(β, γ)`; continuous through `β+γ+1 = 0` at `n = 0`.
pub(crate) fn ln_delta_prime(beta: f64, gamma: f64, n: usize) -> f64 {
    let nf = n as f64;
    let s = beta + gamma;
    let num = if n == 0 {
        lg(s + 2.0)
    } else {
        (s + 2.0 * nf + 1.0).ln() + lg(s + nf + 1.0)
    };
    0.5 * (num - ln_factorial(n) - lg(beta + nf + 1.0) - lg(gamma + nf + 1.0))
}

pub fn delta_prime(basis: &JacobiBasis, n: usize) -> f64 {
    basis.delta_prime(n)
}

pub fn delta_n(basis: &JacobiBasis, n: usize) -> f64 {
    basis.delta_n(n)
}

/// `ln C̃_n^k(β, γ)` through the product form
/// `(β+1)_n · n!/(n−k)! · (n+β+γ+1)_k / (β+1)_k`.
pub(crate) fn ln_tilde_c(n: usize, k: usize, beta: f64, gamma: f64) -> Result<f64> {
    if k > n {
        return Err(Error::contract(
            "tilde_C",
            format!("k = {k} exceeds n = {n}"),
        ));
    }
    let nf = n as f64;
    let kf = k as f64;
    let mut ln = lg(beta + 1.0 + nf) - lg(beta + 1.0) + ln_factorial(n) - ln_factorial(n - k);
    if k > 0 {
        ln += lg(nf + beta + gamma + 1.0 + kf) - lg(nf + beta + gamma + 1.0);
        ln -= lg(beta + 1.0 + kf) - lg(beta + 1.0);
    }
    Ok(ln)
}

/// The endpoint-derivative coefficient `C̃_n^k(β, γ)`.
pub fn tilde_c(n: usize, k: usize, beta: f64, gamma: f64) -> Result<f64> {
    Ok(ln_tilde_c(n, k, beta, gamma)?.exp())
}

/// `C̃_n^k(β, γ)` as the explicit sum over `i`, every term positive.
pub fn tilde_c_sum(n: usize, k: usize, beta: f64, gamma: f64) -> Result<f64> {
    if k > n {
        return Err(Error::contract(
            "tilde_C",
            format!("k = {k} exceeds n = {n}"),
        ));
    }
    let nf = n as f64;
    let head = ln_factorial(n) + ln_factorial(k) - ln_factorial(n - k)
        + lg(nf + beta + 1.0)
        + lg(nf + gamma + 1.0);
    let total: f64 = (0..=k)
        .map(|i| {
            let fi = i as f64;
            (head
                - ln_factorial(i)
                - ln_factorial(k - i)
                - lg(beta + fi + 1.0)
                - lg(nf + gamma - fi + 1.0))
            .exp()
        })
        .sum();
    Ok(total)
}
