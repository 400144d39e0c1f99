use super::theorem::{ConvergenceCheck, PollardInterval, QClass};
use crate::coupling::DecayDiagnostic;
use crate::jacobi::{JacobiBasis, Side};
use serde_json::{json, Value};

/// Everything `solve` learned about a problem.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionReport {
    pub side: Side,
    pub alpha: f64,
    pub basis: JacobiBasis,
    pub rhs_kind: &'static str,
    /// Highest row index `M`.
    pub rows: usize,
    /// Coefficient cutoff `N`.
    pub cutoff: usize,
    pub rhs_coefficients: Vec<f64>,
    /// `ψ_0..=ψ_M`.
    pub solution: Vec<f64>,
    /// `ρ_m`, the oriented row sums of the truncated right-hand side.
    pub row_sums: Vec<f64>,
    pub lambda_theoretical: f64,
    pub lambda_empirical: Option<DecayDiagnostic>,
    pub pollard_interval: PollardInterval,
    pub p: f64,
    pub s: f64,
    pub q_classification: Option<QClass>,
    pub convergence: ConvergenceCheck,
    pub partial_sum_q: f64,
    /// `Ω_q` of the partial row sums for `k = 0..=N`.
    pub partial_sum_bounds: Vec<f64>,
    pub residual_norm: f64,
    pub residual_ok: bool,
    /// `max_m |ψ_m − ψ^series_m|` for `m ≤ N` when `ψ` came from exact power terms.
    pub truncation_gap: Option<f64>,
    pub exact_route: bool,
    pub diagnostic_mode: bool,
    pub degenerate: bool,
    pub representation_certified: bool,
    pub notes: Vec<String>,
}

/// Finite numbers as JSON numbers, the rest as strings.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("NaN")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|x| num(*x)).collect())
}

impl SolutionReport {
    pub fn to_json(&self) -> Value {
        let decay = self.lambda_empirical.map(|d| {
            json!({
                "exponent_fit": num(d.exponent_fit),
                "constant_fit": num(d.constant_fit),
                "fit_window": [d.fit_window.0, d.fit_window.1],
                "residual": num(d.residual),
            })
        });
        let q = self.q_classification.map(|c| match c {
            QClass::EqualsP { q } => json!({"branch": c.label(), "q": num(q)}),
            QClass::MaxPT { p, t_sup } => {
                json!({"branch": c.label(), "p": num(p), "t_sup": num(t_sup)})
            }
            QClass::Unbounded => json!({"branch": c.label()}),
        });
        json!({
            "side": self.side.as_str(),
            "alpha": num(self.alpha),
            "a": num(self.basis.a()),
            "b": num(self.basis.b()),
            "beta": num(self.basis.beta()),
            "gamma": num(self.basis.gamma()),
            "rhs_kind": self.rhs_kind,
            "M": self.rows,
            "N": self.cutoff,
            "lambda_theoretical": num(self.lambda_theoretical),
            "lambda_empirical": decay,
            "pollard_interval": {
                "lo": num(self.pollard_interval.lo),
                "hi": num(self.pollard_interval.hi),
                "lower_identity": num(self.pollard_interval.lower_identity),
            },
            "p": num(self.p),
            "s": num(self.s),
            "q_classification": q,
            "convergence": {
                "verdict": self.convergence.verdict,
                "margin": num(self.convergence.margin),
                "ln_sum": num(self.convergence.ln_sum),
            },
            "partial_sum_q": num(self.partial_sum_q),
            "partial_sum_bounds": nums(&self.partial_sum_bounds),
            "residual_norm": num(self.residual_norm),
            "residual_ok": self.residual_ok,
            "truncation_gap": self.truncation_gap.map(num),
            "exact_route": self.exact_route,
            "diagnostic_mode": self.diagnostic_mode,
            "degenerate": self.degenerate,
            "representation_certified": self.representation_certified,
            "notes": self.notes,
            "rhs_coefficients": nums(&self.rhs_coefficients),
            "solution": nums(&self.solution),
        })
    }
}
