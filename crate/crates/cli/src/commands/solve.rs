use crate::output::{fmt, OutDir};
use crate::params::Common;
use crate::Status;
use abel_core::solve;
use anyhow::{Context, Result};
use serde_json::json;

pub fn run(common: &Common) -> Result<Status> {
    let problem = common
        .load_problem()?
        .into_problem()
        .context("invalid problem")?;
    let report = solve(&problem)?;

    let mut out = OutDir::create(&common.out_dir, "solve", common.seed)?;
    out.json("report.json", report.to_json())?;
    let rows: Vec<Vec<String>> = report
        .solution
        .iter()
        .zip(&report.row_sums)
        .enumerate()
        .map(|(m, (psi, rho))| vec![m.to_string(), fmt(*psi), fmt(*rho)])
        .collect();
    out.csv("coefficients.csv", &["m", "psi_m", "row_sum_m"], &rows)?;

    let status = if report.diagnostic_mode || report.degenerate {
        Status::Diagnostic
    } else {
        Status::Ok
    };
    for note in &report.notes {
        eprintln!("note: {note}");
    }
    println!(
        "solved {} rows, cutoff N = {}, residual {}, λ = {}",
        report.rows + 1,
        report.cutoff,
        fmt(report.residual_norm),
        report.lambda_theoretical
    );
    let summary = json!({
        "residual_norm": abel_core::solver::num(report.residual_norm),
        "residual_ok": report.residual_ok,
        "diagnostic_mode": report.diagnostic_mode,
        "degenerate": report.degenerate,
    });
    out.manifest(common.input.as_deref(), common.overrides(), status, summary)?;
    Ok(status)
}
