//! Problem description and its JSON file format.

use crate::error::{Error, Result};
use crate::fracops::{eval_terms, FracOrder, PowerTerm};
use crate::jacobi::{CoefficientSequence, JacobiBasis, Side};
use serde::{Deserialize, Serialize};

/// Right-hand side of the equation.
#[derive(Debug, Clone, PartialEq)]
pub enum Rhs {
    /// Jacobi coefficients `f_0, f_1, ...` in the problem's basis.
    Coefficients(CoefficientSequence),
    /// A finite sum of power terms, kept exact.
    PowerTerms(Vec<PowerTerm>),
    /// Point samples, linearly interpolated and held constant beyond the ends.
    Samples(Samples),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Samples {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl Samples {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() || x.len() < 2 {
            return Err(Error::Input(format!(
                "samples need matching x and y of length at least 2, got {} and {}",
                x.len(),
                y.len()
            )));
        }
        if let Some(i) = x.iter().chain(&y).position(|v| !v.is_finite()) {
            return Err(Error::Input(format!("sample value {i} is not finite")));
        }
        if let Some(i) = x.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::Input(format!(
                "sample abscissae must increase strictly (x[{i}] = {}, x[{}] = {})",
                x[i],
                i + 1,
                x[i + 1]
            )));
        }
        Ok(Samples { x, y })
    }

    pub fn interpolate(&self, t: f64) -> f64 {
        let (x, y) = (&self.x, &self.y);
        let last = x.len() - 1;
        if t <= x[0] {
            return y[0];
        }
        if t >= x[last] {
            return y[last];
        }
        let i = x.partition_point(|&v| v <= t) - 1;
        let s = (t - x[i]) / (x[i + 1] - x[i]);
        y[i] + s * (y[i + 1] - y[i])
    }
}

impl Rhs {
    pub fn kind(&self) -> &'static str {
        match self {
            Rhs::Coefficients(_) => "coefficients",
            Rhs::PowerTerms(_) => "power-terms",
            Rhs::Samples(_) => "samples",
        }
    }

    /// Pointwise value of the right-hand side.
    pub fn eval(&self, basis: &JacobiBasis, x: f64) -> f64 {
        match self {
            Rhs::Coefficients(c) => c.evaluate(x),
            Rhs::PowerTerms(t) => eval_terms(t, basis.a(), basis.b(), x),
            Rhs::Samples(s) => s.interpolate(x),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Truncation {
    /// Highest row index `M` of the coupling matrix; `max(4N, 256)` when unset.
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
    /// Coefficient cutoff `N`; chosen from the data when unset.
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub cols: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub projection: f64,
    pub convergence: f64,
    pub residual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            projection: 1e-12,
            convergence: 1e-10,
            residual: 1e-6,
        }
    }
}

/// `I^{−α} φ = f` on the given side, for the unknown `φ`.
#[derive(Debug, Clone, PartialEq)]
pub struct AbelProblem {
    order: FracOrder,
    basis: JacobiBasis,
    rhs: Rhs,
    pub truncation: Truncation,
    pub tolerances: Tolerances,
    /// Lebesgue index used for the classification; the geometric midpoint of
    /// the Pollard interval when unset.
    pub p: Option<f64>,
}

impl AbelProblem {
    /// `order.alpha()` must lie in `(−1, 0]`.
    pub fn new(order: FracOrder, basis: JacobiBasis, rhs: Rhs) -> Result<Self> {
        let alpha = order.alpha();
        if !(alpha > -1.0 && alpha <= 0.0) {
            return Err(Error::domain(
                "AbelProblem",
                format!("alpha = {alpha} must lie in (-1, 0]"),
            ));
        }
        if let Rhs::Coefficients(c) = &rhs {
            if c.basis() != &basis {
                return Err(Error::contract(
                    "AbelProblem",
                    "coefficient sequence refers to a different basis",
                ));
            }
        }
        if let Rhs::PowerTerms(terms) = &rhs {
            for t in terms {
                t.validate()?;
            }
        }
        Ok(AbelProblem {
            order,
            basis,
            rhs,
            truncation: Truncation::default(),
            tolerances: Tolerances::default(),
            p: None,
        })
    }

    pub fn order(&self) -> &FracOrder {
        &self.order
    }
    pub fn basis(&self) -> &JacobiBasis {
        &self.basis
    }
    pub fn rhs(&self) -> &Rhs {
        &self.rhs
    }
    pub fn alpha(&self) -> f64 {
        self.order.alpha()
    }
    pub fn side(&self) -> Side {
        self.order.side()
    }

    /// The weight exponent at the operator's endpoint: `γ` for `b−`, `β` for `a+`.
    pub fn near_exponent(&self) -> f64 {
        match self.side() {
            Side::Right => self.basis.gamma(),
            Side::Left => self.basis.beta(),
        }
    }

    /// `λ = 2α + γ + 3/2`, with `β` in place of `γ` for the left side.
    pub fn lambda(&self) -> f64 {
        2.0 * self.alpha() + self.near_exponent() + 1.5
    }

    /// Both exponents in `[−1/2, 1/2]` and `2α + γ + 1 ≥ 0`. The boundary case
    /// `λ = 1/2` is admitted; `solve` flags its series representation as uncertified.
    pub fn in_theorem_scope(&self) -> bool {
        self.basis.in_theorem_scope() && 2.0 * self.alpha() + self.near_exponent() + 1.0 >= 0.0
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ProblemFile =
            serde_json::from_str(text).map_err(|e| Error::Input(format!("problem file: {e}")))?;
        file.into_problem()
    }
}

/// On-disk problem layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub side: Side,
    pub rhs: RhsFile,
    #[serde(default)]
    pub truncation: Truncation,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "kebab-case")]
pub enum RhsFile {
    Coefficients(Vec<f64>),
    PowerTerms(Vec<PowerTerm>),
    Samples(Samples),
}

impl ProblemFile {
    pub fn into_problem(self) -> Result<AbelProblem> {
        let basis = JacobiBasis::new(self.a, self.b, self.beta, self.gamma)?;
        let order = FracOrder::new(self.alpha, self.side)?;
        let rhs = match self.rhs {
            RhsFile::Coefficients(v) => Rhs::Coefficients(CoefficientSequence::new(basis, v)?),
            RhsFile::PowerTerms(t) => Rhs::PowerTerms(t),
            RhsFile::Samples(s) => Rhs::Samples(Samples::new(s.x, s.y)?),
        };
        let mut problem = AbelProblem::new(order, basis, rhs)?;
        problem.truncation = self.truncation;
        problem.tolerances = self.tolerances;
        problem.p = self.p;
        Ok(problem)
    }
}
