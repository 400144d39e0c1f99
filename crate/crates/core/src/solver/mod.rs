//! End-to-end solution of `I^{−α} φ = f` in Jacobi coefficients, with the
//! hypothesis checks, decay fit, classification and residual that certify it.
//!
//! `ψ_m = (p_m, φ) = Σ_n s_{mn} f_n A_{mn}` with `s_{mn} = (−1)^m` for the
//! right side and `(−1)^n` for the left.

mod problem;
mod report;
mod theorem;

pub use problem::{AbelProblem, ProblemFile, Rhs, RhsFile, Samples, Tolerances, Truncation};
pub use report::{num, SolutionReport};
pub use theorem::{
    check_absolute_convergence, classify_smoothness, omega_q, partial_sum_q, pollard_interval,
    s_index, ConvergenceCheck, PollardInterval, QClass,
};

use crate::coupling::{
    assemble, decay_fit, lemma3_c_n, upper_half, CouplingMatrix, DecayDiagnostic,
};
use crate::ddouble::CompensatedSum;
use crate::error::{Error, Result};
use crate::fracops::{frac_power, frac_quadrature, project_power_terms, PowerTerm};
use crate::jacobi::{gauss_jacobi, sign_pow, CoefficientSequence, JacobiBasis, Side};

/// Upper limit for an automatically chosen coefficient cutoff.
pub const MAX_AUTO_CUTOFF: usize = 48;
/// Minimum number of rows for a decay fit.
pub const MIN_DECAY_ROWS: usize = 64;
/// Quadrature points of the residual grid.
pub const RESIDUAL_NODES: usize = 64;
/// Empirical and theoretical decay exponents further apart than this raise a warning.
pub const LAMBDA_WARN_GAP: f64 = 0.25;

/// `ρ_m = Σ_n f_n A_{mn}` (right side) or `Σ_n (−1)^n f_n A_{mn}` (left side),
/// summing `n ≤ k`. Then `ψ_m = (−1)^m ρ_m` on the right and `ψ_m = ρ_m` on the left.
pub fn row_sums_upto(a: &CouplingMatrix, f: &[f64], k: usize) -> Vec<f64> {
    match a.order().side() {
        Side::Right => a.row_sums_upto(f, k),
        Side::Left => {
            let g: Vec<f64> = f.iter().enumerate().map(|(n, v)| sign_pow(n) * v).collect();
            a.row_sums_upto(&g, k)
        }
    }
}

fn psi_from_rows(side: Side, rows: &[f64]) -> Vec<f64> {
    rows.iter()
        .enumerate()
        .map(|(m, r)| {
            if side == Side::Right {
                sign_pow(m) * r
            } else {
                *r
            }
        })
        .collect()
}

/// Solution coefficients `ψ_m`, `m < A.rows()`, from the truncated right-hand side.
pub fn synthesize(f: &CoefficientSequence, a: &CouplingMatrix) -> Result<CoefficientSequence> {
    if f.len() > a.cols() {
        return Err(Error::contract(
            "synthesize",
            format!(
                "{} coefficients but only {} matrix columns",
                f.len(),
                a.cols()
            ),
        ));
    }
    if f.basis() != a.basis() {
        return Err(Error::contract(
            "synthesize",
            "matrix and coefficients use different bases",
        ));
    }
    let rows = row_sums_upto(a, f.values(), f.len() - 1);
    CoefficientSequence::new(*f.basis(), psi_from_rows(a.order().side(), &rows))
}

/// Power-law fit of `|ρ_m|` over the upper half of the available rows.
pub fn decay_exponent(row_sums: &[f64]) -> Result<DecayDiagnostic> {
    if row_sums.len() < MIN_DECAY_ROWS {
        return Err(Error::contract(
            "decay_exponent",
            format!(
                "{} rows available, at least {MIN_DECAY_ROWS} needed",
                row_sums.len()
            ),
        ));
    }
    let points: Vec<(usize, f64)> = upper_half(row_sums.len())
        .map(|m| (m, row_sums[m].abs()))
        .filter(|(_, v)| *v > 0.0)
        .collect();
    if points.len() < 8 {
        return Err(Error::Input(
            "row sums vanish over the fit window; decay is degenerate".into(),
        ));
    }
    decay_fit(&points)
}

/// `Ω_q` of the partial row sums `c_{mk}`, `n ≤ k`.
pub fn partial_sum_bound(a: &CouplingMatrix, f: &[f64], k: usize, q: f64) -> Result<f64> {
    omega_q(&row_sums_upto(a, f, k), q, a.basis())
}

/// Weighted `L_2` norm of `I^{−α} ψ − f` on a Gauss–Jacobi grid of the weight.
///
/// The fractional integral of the synthesized `ψ` is taken by direct Abel-kernel
/// quadrature, which stays accurate for long coefficient sequences.
pub fn residual(problem: &AbelProblem, psi: &CoefficientSequence) -> Result<f64> {
    let basis = problem.basis();
    let (xs, ws) = gauss_jacobi(basis, RESIDUAL_NODES)?;
    let mu = problem.order().inverse();
    let phi = |x: f64| psi.evaluate(x);
    let mut acc = CompensatedSum::new();
    for (&x, &w) in xs.iter().zip(&ws) {
        let image = if mu.alpha() == 0.0 {
            phi(x)
        } else {
            frac_quadrature(&phi, &mu, basis.a(), basis.b(), x)?
        };
        let f = problem.rhs().eval(basis, x);
        if !f.is_finite() {
            return Err(Error::Input(format!(
                "right-hand side is not finite at x = {x:e}"
            )));
        }
        acc.add(w * (image - f).powi(2));
    }
    Ok(acc.value().max(0.0).sqrt())
}

/// Jacobi coefficients `f_0..=f_N` of the right-hand side and the cutoff `N`.
fn rhs_coefficients(problem: &AbelProblem) -> Result<CoefficientSequence> {
    let basis = *problem.basis();
    let fixed = problem.truncation.cols;
    let scan = |f: CoefficientSequence| -> Result<CoefficientSequence> {
        if fixed.is_some() {
            return Ok(f);
        }
        let n = auto_cutoff(&f, problem.tolerances);
        CoefficientSequence::new(basis, f.values()[..=n].to_vec())
    };
    match problem.rhs() {
        Rhs::Coefficients(c) => {
            let mut v = c.values().to_vec();
            match fixed {
                Some(n) => v.resize(n + 1, 0.0),
                None => {
                    let last = v.iter().rposition(|x| *x != 0.0).unwrap_or(0);
                    v.truncate(last + 1);
                }
            }
            CoefficientSequence::new(basis, v)
        }
        Rhs::PowerTerms(terms) => {
            let n = fixed.unwrap_or(MAX_AUTO_CUTOFF);
            scan(CoefficientSequence::new(
                basis,
                project_power_terms(&basis, terms, n)?,
            )?)
        }
        Rhs::Samples(s) => {
            let n = fixed.unwrap_or(MAX_AUTO_CUTOFF);
            scan(basis.project(&|x| s.interpolate(x), n)?)
        }
    }
}

/// Smallest `N` opening a run of five indices with `|f_n| c_n` below the
/// convergence tolerance; otherwise the last index above the projection tolerance.
fn auto_cutoff(f: &CoefficientSequence, tol: Tolerances) -> usize {
    let ln_tol = tol.convergence.ln();
    let small: Vec<bool> = f
        .values()
        .iter()
        .enumerate()
        .map(|(n, v)| *v == 0.0 || v.abs().ln() + lemma3_c_n(f.basis(), n).ln < ln_tol)
        .collect();
    if let Some(n) = small.windows(5).position(|w| w.iter().all(|s| *s)) {
        return n;
    }
    f.values()
        .iter()
        .rposition(|v| v.abs() > tol.projection)
        .unwrap_or(0)
}

/// `φ = I^α f` term by term, when every term is anchored at the operator's endpoint.
fn exact_solution_terms(problem: &AbelProblem) -> Option<Vec<PowerTerm>> {
    let Rhs::PowerTerms(terms) = problem.rhs() else {
        return None;
    };
    terms
        .iter()
        .map(|t| frac_power(t, problem.order()).ok())
        .collect()
}

pub fn solve(problem: &AbelProblem) -> Result<SolutionReport> {
    let basis = *problem.basis();
    let side = problem.side();
    let lambda = problem.lambda();
    let mut notes = Vec::new();
    let diagnostic_mode = !problem.in_theorem_scope();
    if diagnostic_mode {
        notes.push(format!(
            "outside theorem scope (β = {}, γ = {}, 2α+γ+1 = {}); results are diagnostic",
            basis.beta(),
            basis.gamma(),
            2.0 * problem.alpha() + problem.near_exponent() + 1.0
        ));
    }
    let representation_certified = lambda > 0.5;
    if !representation_certified {
        notes.push(format!(
            "λ = {lambda} ≤ 1/2: series representation is not certified"
        ));
    }

    let f = rhs_coefficients(problem).map_err(|e| e.in_stage("project"))?;
    let cutoff = f.len() - 1;
    let rows = problem.truncation.rows.unwrap_or((4 * cutoff).max(256));
    // a coefficient rhs is checked as given, so trailing zeros mark its support
    let convergence = match problem.rhs() {
        Rhs::Coefficients(c) => check_absolute_convergence(c),
        _ => check_absolute_convergence(&f),
    };
    if !convergence.verdict {
        notes.push(format!(
            "Σ |f_n| c_n is not certified absolutely convergent (log tail ratio {:e})",
            convergence.margin
        ));
    }

    let pollard = pollard_interval(&basis).map_err(|e| e.in_stage("pollard"))?;
    let p = problem.p.unwrap_or_else(|| pollard.midpoint());
    let q_classification = if lambda >= 0.0 {
        Some(classify_smoothness(lambda, &basis, p).map_err(|e| e.in_stage("classify"))?)
    } else {
        notes.push(format!("λ = {lambda} < 0 has no smoothness class"));
        None
    };

    let degenerate = f
        .values()
        .iter()
        .all(|v| v.abs() <= problem.tolerances.projection);
    let mut report = SolutionReport {
        side,
        alpha: problem.alpha(),
        basis,
        rhs_kind: problem.rhs().kind(),
        rows,
        cutoff,
        rhs_coefficients: f.values().to_vec(),
        solution: vec![0.0; rows + 1],
        row_sums: vec![0.0; rows + 1],
        lambda_theoretical: lambda,
        lambda_empirical: None,
        pollard_interval: pollard,
        p,
        s: s_index(&basis),
        q_classification,
        convergence,
        partial_sum_q: partial_sum_q(lambda.max(0.0), &basis),
        partial_sum_bounds: vec![0.0; cutoff + 1],
        residual_norm: 0.0,
        residual_ok: true,
        truncation_gap: None,
        exact_route: false,
        diagnostic_mode,
        degenerate,
        representation_certified,
        notes,
    };
    if degenerate {
        report
            .notes
            .push("right-hand side vanishes to tolerance; ψ = 0".into());
        return Ok(report);
    }

    let order = *problem.order();
    let a = assemble(&order, &basis, rows + 1, cutoff + 1).map_err(|e| e.in_stage("assemble"))?;
    let rho = row_sums_upto(&a, f.values(), cutoff);
    let psi_series = psi_from_rows(side, &rho);
    report.row_sums = rho;

    let exact = exact_solution_terms(problem)
        .map(|terms| project_power_terms(&basis, &terms, rows))
        .and_then(|r| r.ok());
    report.solution = match exact {
        Some(psi) => {
            let gap = psi
                .iter()
                .zip(&psi_series)
                .take(cutoff + 1)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            report.truncation_gap = Some(gap);
            report.exact_route = true;
            psi
        }
        None => psi_series,
    };
    let psi = CoefficientSequence::new(basis, report.solution.clone())
        .map_err(|e| e.in_stage("synthesize"))?;

    if rows + 1 >= MIN_DECAY_ROWS {
        match decay_exponent(&report.row_sums) {
            Ok(d) => {
                if (d.exponent_fit - lambda).abs() > LAMBDA_WARN_GAP {
                    report.notes.push(format!(
                        "empirical decay exponent {:.4} differs from λ = {lambda:.4} by more than {LAMBDA_WARN_GAP}",
                        d.exponent_fit
                    ));
                }
                report.lambda_empirical = Some(d);
            }
            Err(e) => report.notes.push(format!("no decay fit: {e}")),
        }
    } else {
        report
            .notes
            .push(format!("{} rows are too few for a decay fit", rows + 1));
    }

    let q = report.partial_sum_q;
    report.partial_sum_bounds = (0..=cutoff)
        .map(|k| partial_sum_bound(&a, f.values(), k, q))
        .collect::<Result<_>>()
        .map_err(|e| e.in_stage("partial-sums"))?;

    report.residual_norm = residual(problem, &psi).map_err(|e| e.in_stage("residual"))?;
    report.residual_ok = report.residual_norm <= problem.tolerances.residual;
    if !report.residual_ok {
        report.notes.push(format!(
            "residual {:e} exceeds tolerance {:e}",
            report.residual_norm, problem.tolerances.residual
        ));
    }
    Ok(report)
}

/// `(b−x)^e` or `(x−a)^e` image of `φ = 1`: `f = I^μ 1 = d^μ / Γ(1+μ)`.
pub fn constant_solution_rhs(mu: f64, side: Side) -> Result<Vec<PowerTerm>> {
    let one = PowerTerm::new(0.0, 1.0, side)?;
    let order = crate::fracops::FracOrder::new(mu, side)?;
    Ok(vec![frac_power(&one, &order)?])
}

/// The rhs `I^μ φ` for `φ = Σ c_n p_n`, as a power-term list.
pub fn polynomial_rhs(
    basis: &JacobiBasis,
    coeffs: &[f64],
    mu: f64,
    side: Side,
) -> Result<Vec<PowerTerm>> {
    let order = crate::fracops::FracOrder::new(mu, side)?;
    let mut terms: Vec<PowerTerm> = Vec::new();
    for (n, c) in coeffs.iter().enumerate() {
        if *c == 0.0 {
            continue;
        }
        for (k, t) in crate::fracops::frac_jacobi(basis, n, &order)
            .into_iter()
            .enumerate()
        {
            if let Some(slot) = terms.get_mut(k) {
                slot.coefficient += c * t.coefficient;
            } else {
                terms.push(PowerTerm {
                    coefficient: c * t.coefficient,
                    ..t
                });
            }
        }
    }
    Ok(terms)
}
