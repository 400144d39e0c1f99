//! Hypothesis checks and the smoothness classification.

use crate::coupling::lemma3_c_n;
use crate::error::{Error, Result};
use crate::jacobi::{CoefficientSequence, JacobiBasis};
use serde::Serialize;

/// Open interval of admissible Lebesgue indices `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PollardInterval {
    pub lo: f64,
    pub hi: f64,
    /// `(2s−1)/s`, which must coincide with `lo`.
    pub lower_identity: f64,
}

impl PollardInterval {
    pub fn contains(&self, p: f64) -> bool {
        self.lo < p && p < self.hi
    }

    /// Geometric midpoint, or `2·lo` when the interval is unbounded above.
    pub fn midpoint(&self) -> f64 {
        if self.hi.is_finite() {
            (self.lo * self.hi).sqrt()
        } else {
            2.0 * self.lo
        }
    }
}

/// `s = 3/2 + max{β, γ}`.
pub fn s_index(basis: &JacobiBasis) -> f64 {
    1.5 + basis.beta().max(basis.gamma())
}

/// `4 max{(β+1)/(2β+3), (γ+1)/(2γ+3)} < p < 4 min{(β+1)/(2β+1), (γ+1)/(2γ+1)}`.
pub fn pollard_interval(basis: &JacobiBasis) -> Result<PollardInterval> {
    let lower = |e: f64| 4.0 * (e + 1.0) / (2.0 * e + 3.0);
    let upper = |e: f64| {
        if 2.0 * e + 1.0 <= 0.0 {
            f64::INFINITY
        } else {
            4.0 * (e + 1.0) / (2.0 * e + 1.0)
        }
    };
    let (be, ga) = (basis.beta(), basis.gamma());
    let s = s_index(basis);
    let iv = PollardInterval {
        lo: lower(be).max(lower(ga)),
        hi: upper(be).min(upper(ga)),
        lower_identity: (2.0 * s - 1.0) / s,
    };
    if !(iv.lo < iv.hi) {
        return Err(Error::domain(
            "pollard_interval",
            format!(
                "empty interval ({}, {}) for β = {be}, γ = {ga}",
                iv.lo, iv.hi
            ),
        ));
    }
    Ok(iv)
}

/// The three cases for the integrability index `q` of the solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "branch", rename_all = "kebab-case")]
pub enum QClass {
    /// `0 ≤ λ ≤ 1/2`: `q = p`.
    EqualsP { q: f64 },
    /// `1/2 < λ < s`: `q = max{p, t}` for any `t < t_sup = (2s−1)/(s−λ)`.
    MaxPT { p: f64, t_sup: f64 },
    /// `λ ≥ s`: `q` arbitrarily large.
    Unbounded,
}

impl QClass {
    pub fn label(&self) -> &'static str {
        match self {
            QClass::EqualsP { .. } => "q=p",
            QClass::MaxPT { .. } => "q=max{p,t}",
            QClass::Unbounded => "unbounded",
        }
    }
}

pub fn classify_smoothness(lambda: f64, basis: &JacobiBasis, p: f64) -> Result<QClass> {
    if !(lambda >= 0.0) {
        return Err(Error::domain(
            "classify_smoothness",
            format!("λ = {lambda} must be nonnegative"),
        ));
    }
    let iv = pollard_interval(basis)?;
    if !iv.contains(p) {
        return Err(Error::contract(
            "classify_smoothness",
            format!(
                "p = {p} lies outside the Pollard interval ({}, {})",
                iv.lo, iv.hi
            ),
        ));
    }
    let s = s_index(basis);
    Ok(if lambda <= 0.5 {
        QClass::EqualsP { q: p }
    } else if lambda < s {
        QClass::MaxPT {
            p,
            t_sup: (2.0 * s - 1.0) / (s - lambda),
        }
    } else {
        QClass::Unbounded
    })
}

/// The index `q ≥ 2` at which the partial-sum bound is evaluated: inside
/// `[2, (2s−1)/(s−λ))`, midway when there is room.
pub fn partial_sum_q(lambda: f64, basis: &JacobiBasis) -> f64 {
    let s = s_index(basis);
    if lambda >= s {
        return 4.0;
    }
    let t_sup = (2.0 * s - 1.0) / (s - lambda);
    if t_sup <= 2.0 {
        2.0
    } else {
        0.5 * (2.0 + t_sup)
    }
}

/// `Ω_q(c) = (Σ_{n≥1} |c_n|^q n^{(max{β,γ}+3/2)(q−2)})^{1/q}`.
pub fn omega_q(c: &[f64], q: f64, basis: &JacobiBasis) -> Result<f64> {
    if !(q >= 2.0) {
        return Err(Error::contract(
            "omega_q",
            format!("q = {q} must be at least 2"),
        ));
    }
    let top = basis.beta().max(basis.gamma());
    if top < -0.5 {
        return Err(Error::domain(
            "omega_q",
            format!("max{{β, γ}} = {top} must be at least -1/2"),
        ));
    }
    let w = (top + 1.5) * (q - 2.0);
    let lns: Vec<f64> = c
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, v)| **v != 0.0)
        .map(|(n, v)| q * v.abs().ln() + w * (n as f64).ln())
        .collect();
    Ok(log_sum_exp(&lns).map_or(0.0, |l| (l / q).exp()))
}

fn log_sum_exp(lns: &[f64]) -> Option<f64> {
    let top = lns.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return None;
    }
    Some(top + lns.iter().map(|l| (l - top).exp()).sum::<f64>().ln())
}

/// Outcome of the absolute-convergence test for `Σ |f_n| c_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceCheck {
    pub verdict: bool,
    /// Log of the last term ratio; `−∞` for a finite sum, `+∞` on overflow.
    pub margin: f64,
    /// `ln Σ |f_n| c_n` over the available terms.
    pub ln_sum: f64,
}

/// Tests whether `|f_n| c_n` is finitely supported or decreasing over the
/// last quarter of the available indices.
pub fn check_absolute_convergence(f: &CoefficientSequence) -> ConvergenceCheck {
    let basis = f.basis();
    let lns: Vec<f64> = f
        .values()
        .iter()
        .enumerate()
        .map(|(n, v)| {
            if *v == 0.0 {
                f64::NEG_INFINITY
            } else {
                v.abs().ln() + lemma3_c_n(basis, n).ln
            }
        })
        .collect();
    let ln_sum = log_sum_exp(&lns).unwrap_or(f64::NEG_INFINITY);
    if lns.iter().any(|l| *l > f64::MAX.ln()) {
        return ConvergenceCheck {
            verdict: false,
            margin: f64::INFINITY,
            ln_sum,
        };
    }
    let len = lns.len();
    let quarter = len.div_ceil(4).max(1);
    if lns[len - quarter..].iter().all(|l| *l == f64::NEG_INFINITY) {
        return ConvergenceCheck {
            verdict: true,
            margin: f64::NEG_INFINITY,
            ln_sum,
        };
    }
    let window = &lns[len - quarter.max(4).min(len)..];
    let ratios: Vec<f64> = window
        .windows(2)
        .filter(|w| w[0].is_finite() && w[1].is_finite())
        .map(|w| w[1] - w[0])
        .collect();
    match ratios.last() {
        None => ConvergenceCheck {
            verdict: true,
            margin: f64::NEG_INFINITY,
            ln_sum,
        },
        Some(&last) => ConvergenceCheck {
            verdict: ratios.iter().all(|r| *r < 0.0),
            margin: last,
            ln_sum,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(beta: f64, gamma: f64) -> JacobiBasis {
        JacobiBasis::new(0.0, 1.0, beta, gamma).unwrap()
    }

    #[test]
    fn pollard_examples() {
        let iv = pollard_interval(&unit(0.0, 0.0)).unwrap();
        assert!((iv.lo - 4.0 / 3.0).abs() < 1e-15 && (iv.hi - 4.0).abs() < 1e-15);
        let iv = pollard_interval(&unit(0.5, 0.5)).unwrap();
        assert!((iv.lo - 1.5).abs() < 1e-15 && (iv.hi - 3.0).abs() < 1e-15);
        let iv = pollard_interval(&unit(0.0, 0.5)).unwrap();
        assert!((iv.lo - 1.5).abs() < 1e-15 && (iv.hi - 3.0).abs() < 1e-15);
        let iv = pollard_interval(&unit(-0.5, 0.0)).unwrap();
        assert_eq!(iv.hi, 4.0);
        let iv = pollard_interval(&unit(-0.5, -0.5)).unwrap();
        assert_eq!(iv.hi, f64::INFINITY);
        assert_eq!(iv.midpoint(), 2.0 * iv.lo);
    }

    #[test]
    fn lower_end_matches_s_form() {
        for &(b, g) in &[(-0.5, 0.5), (0.1, -0.3), (0.5, 0.2), (-0.4, -0.4)] {
            let iv = pollard_interval(&unit(b, g)).unwrap();
            assert!((iv.lo - iv.lower_identity).abs() < 1e-15);
        }
    }

    #[test]
    fn classification_examples() {
        let b = unit(0.0, 0.0);
        assert_eq!(
            classify_smoothness(0.3, &b, 2.0).unwrap(),
            QClass::EqualsP { q: 2.0 }
        );
        assert_eq!(
            classify_smoothness(1.0, &b, 2.0).unwrap(),
            QClass::MaxPT { p: 2.0, t_sup: 4.0 }
        );
        assert_eq!(
            classify_smoothness(2.0, &b, 2.0).unwrap(),
            QClass::Unbounded
        );
        assert_eq!(
            classify_smoothness(1.5, &b, 2.0).unwrap(),
            QClass::Unbounded
        );
        assert!(matches!(
            classify_smoothness(0.5, &b, 2.0),
            Ok(QClass::EqualsP { .. })
        ));
        assert!(matches!(
            classify_smoothness(1.0, &b, 4.0),
            Err(Error::Contract { .. })
        ));
        assert!(matches!(
            classify_smoothness(-0.1, &b, 2.0),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn omega_examples() {
        let b = unit(0.0, 0.0);
        let c = [7.0, 3.0, 4.0];
        assert!((omega_q(&c, 2.0, &b).unwrap() - 5.0).abs() < 1e-15);
        for q in [2.0, 3.0, 7.5] {
            assert!((omega_q(&[0.0, 1.0], q, &b).unwrap() - 1.0).abs() < 1e-15);
        }
        let c: Vec<f64> = (0..200_000)
            .map(|n| if n == 0 { 0.0 } else { (n as f64).powi(-2) })
            .collect();
        let want = 1.036_927_755_143_37_f64.powf(0.25);
        assert!((omega_q(&c, 4.0, &b).unwrap() - want).abs() < 1e-12);
        assert!(omega_q(&c, 1.5, &b).is_err());
        assert_eq!(omega_q(&[1.0, 0.0], 3.0, &b).unwrap(), 0.0);
    }

    #[test]
    fn convergence_examples() {
        let b = unit(0.0, 0.0);
        let poly =
            CoefficientSequence::new(b, vec![1.0, -0.5, 0.25, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let c = check_absolute_convergence(&poly);
        assert!(c.verdict && c.margin == f64::NEG_INFINITY);
        let zero = CoefficientSequence::new(b, vec![0.0; 5]).unwrap();
        assert!(check_absolute_convergence(&zero).verdict);
        let slow: Vec<f64> = (0..64).map(|n| 1.0 / ((n + 1) as f64).powi(2)).collect();
        let c = check_absolute_convergence(&CoefficientSequence::new(b, slow).unwrap());
        assert!(!c.verdict && c.margin > 0.0);
    }

    #[test]
    fn convergence_overflow_is_diagnostic() {
        let b = unit(0.0, 0.0);
        let mut v = vec![1.0; 400];
        v[399] = 1e300;
        let c = check_absolute_convergence(&CoefficientSequence::new(b, v).unwrap());
        assert!(!c.verdict);
        assert_eq!(c.margin, f64::INFINITY);
    }

    #[test]
    fn partial_sum_q_stays_in_window() {
        let b = unit(0.0, 0.0);
        assert_eq!(partial_sum_q(0.5, &b), 2.0);
        assert_eq!(partial_sum_q(1.0, &b), 3.0);
        assert_eq!(partial_sum_q(1.5, &b), 4.0);
    }
}
