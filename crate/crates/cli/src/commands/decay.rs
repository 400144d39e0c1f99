use crate::output::{fmt, OutDir};
use crate::params::Common;
use crate::Status;
use abel_core::solver::decay_exponent;
use abel_core::{solve, Error};
use anyhow::{bail, Result};
use serde_json::json;

const SYNTHETIC_ROWS: usize = 1024;

pub fn run(common: &Common, synthetic: Option<f64>) -> Result<Status> {
    let (rows, lambda) = match synthetic {
        Some(e) => {
            if !e.is_finite() {
                bail!("--synthetic-rows-exponent must be finite, got {e}");
            }
            let m_max = common.rows.unwrap_or(SYNTHETIC_ROWS);
            let rows: Vec<f64> = (0..=m_max)
                .map(|m| if m == 0 { 1.0 } else { (m as f64).powf(-e) })
                .collect();
            (rows, Some(e))
        }
        None => {
            let problem = common.load_problem()?.into_problem()?;
            let report = solve(&problem)?;
            if report.degenerate {
                return degenerate(common, "right-hand side vanishes; all row sums are zero");
            }
            (report.row_sums, Some(report.lambda_theoretical))
        }
    };
    let fit = match decay_exponent(&rows) {
        Ok(fit) => fit,
        Err(Error::Input(msg)) => return degenerate(common, &msg),
        Err(e) => return Err(e.into()),
    };

    let slope = -fit.exponent_fit;
    let intercept = fit.constant_fit.ln();
    let line = |m: usize| fit.constant_fit * (m as f64).powf(-fit.exponent_fit);
    let csv: Vec<Vec<String>> = (1..rows.len())
        .map(|m| vec![m.to_string(), fmt(rows[m]), fmt(line(m))])
        .collect();
    let dat: Vec<Vec<String>> = (1..rows.len())
        .filter(|&m| rows[m] != 0.0)
        .map(|m| {
            let x = (m as f64).ln();
            vec![fmt(x), fmt(rows[m].abs().ln()), fmt(intercept + slope * x)]
        })
        .collect();

    let mut out = OutDir::create(&common.out_dir, "decay-report", common.seed)?;
    out.csv("decay.csv", &["m", "row_sum", "fit"], &csv)?;
    out.dat(
        "decay.dat",
        &[
            format!("slope {}", fmt(slope)),
            format!("intercept {}", fmt(intercept)),
            format!("fit_window {} {}", fit.fit_window.0, fit.fit_window.1),
            format!("lambda {}", lambda.map_or("none".into(), fmt)),
            "columns: ln(m) ln|row_sum| ln(fit)".into(),
            "plot 'decay.dat' using 1:2 with points, '' using 1:3 with lines".into(),
        ],
        &dat,
    )?;
    println!(
        "fitted decay exponent {} over m in [{}, {}], max log residual {}",
        fmt(fit.exponent_fit),
        fit.fit_window.0,
        fit.fit_window.1,
        fmt(fit.residual)
    );
    let summary = json!({
        "exponent_fit": fit.exponent_fit,
        "slope": slope,
        "intercept": intercept,
        "fit_window": fit.fit_window,
        "lambda": lambda,
        "synthetic": synthetic.is_some(),
    });
    out.manifest(
        common.input.as_deref(),
        common.overrides(),
        Status::Ok,
        summary,
    )?;
    Ok(Status::Ok)
}

fn degenerate(common: &Common, note: &str) -> Result<Status> {
    eprintln!("note: {note}");
    let out = OutDir::create(&common.out_dir, "decay-report", common.seed)?;
    out.manifest(
        common.input.as_deref(),
        common.overrides(),
        Status::Diagnostic,
        json!({ "degenerate": true, "note": note }),
    )?;
    Ok(Status::Diagnostic)
}
