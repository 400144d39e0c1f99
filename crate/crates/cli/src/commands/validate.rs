//! Closed-form coupling entries against the Legendre-image quadrature oracle.

use crate::output::{fmt, OutDir};
use crate::params::{parse_pair, Common};
use crate::Status;
use abel_core::coupling::{assemble, oracle_entry};
use abel_core::{FracOrder, JacobiBasis, Side};
use anyhow::{Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

const MAX_INDEX: usize = 12;
const TOLERANCE: f64 = 1e-6;
const ALPHAS: [f64; 3] = [-0.75, -0.5, -0.25];
const EXPONENTS: [f64; 3] = [-0.4, 0.0, 0.5];
const CORRUPTION: f64 = 1.0;

struct Case {
    alpha: f64,
    beta: f64,
    gamma: f64,
    side: Side,
    interval: (f64, f64),
}

fn grid(common: &Common, draws: usize) -> Result<Vec<Case>> {
    let alphas = common.alpha.map_or(ALPHAS.to_vec(), |v| vec![v]);
    let betas = common.beta.map_or(EXPONENTS.to_vec(), |v| vec![v]);
    let gammas = common.gamma.map_or(EXPONENTS.to_vec(), |v| vec![v]);
    let sides = common
        .side
        .map_or(vec![Side::Left, Side::Right], |s| vec![s]);
    let interval = common.interval()?.unwrap_or((0.0, 1.0));
    let mut cases = Vec::new();
    for &side in &sides {
        for &alpha in &alphas {
            for &beta in &betas {
                for &gamma in &gammas {
                    cases.push(Case {
                        alpha,
                        beta,
                        gamma,
                        side,
                        interval,
                    });
                }
            }
        }
    }
    // random draws only widen the default grid
    if common.overrides().is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
        let grid_len = cases.len();
        while cases.len() < grid_len + draws {
            let a = rng.gen_range(-2.0..2.0);
            let case = Case {
                alpha: rng.gen_range(-0.9..-0.05),
                beta: rng.gen_range(-0.45..0.5),
                gamma: rng.gen_range(-0.45..0.5),
                side: if rng.gen_bool(0.5) {
                    Side::Left
                } else {
                    Side::Right
                },
                interval: (a, a + rng.gen_range(0.5..3.0)),
            };
            // keep away from the pole at α + β' + 1 = 0
            if (case.alpha + case.beta.min(case.gamma) + 1.0).abs() > 0.05 {
                cases.push(case);
            }
        }
    }
    Ok(cases)
}

pub fn run(common: &Common, corrupt: Option<&str>, draws: usize) -> Result<Status> {
    let corrupt = corrupt
        .map(|s| parse_pair::<usize>(s, "--corrupt-entry"))
        .transpose()?;
    if let Some((m, n)) = corrupt {
        anyhow::ensure!(
            m <= MAX_INDEX && n <= MAX_INDEX,
            "--corrupt-entry ({m}, {n}) lies outside the {MAX_INDEX}x{MAX_INDEX} sweep"
        );
    }
    let cases = grid(common, draws)?;

    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    let mut failures = 0usize;
    for case in &cases {
        anyhow::ensure!(
            case.alpha > -1.0 && case.alpha <= 0.0,
            "order α = {} must lie in (−1, 0]",
            case.alpha
        );
        let order = FracOrder::new(case.alpha, case.side)?;
        let basis = JacobiBasis::new(case.interval.0, case.interval.1, case.beta, case.gamma)?;
        let mut matrix =
            assemble(&order, &basis, MAX_INDEX + 1, MAX_INDEX + 1).with_context(|| {
                format!("α = {}, β = {}, γ = {}", case.alpha, case.beta, case.gamma)
            })?;
        if let Some((m, n)) = corrupt {
            matrix.set(m, n, matrix.get(m, n) + CORRUPTION);
        }
        for m in 0..=MAX_INDEX {
            for n in 0..=MAX_INDEX {
                let closed = matrix.get(m, n);
                let oracle = oracle_entry(&order, &basis, m, n)?;
                let diff = (closed - oracle).abs();
                worst = worst.max(diff);
                if diff.is_nan() || diff > TOLERANCE {
                    failures += 1;
                }
                rows.push(vec![
                    case.side.as_str().to_string(),
                    fmt(case.alpha),
                    fmt(case.beta),
                    fmt(case.gamma),
                    fmt(case.interval.0),
                    fmt(case.interval.1),
                    m.to_string(),
                    n.to_string(),
                    fmt(closed),
                    fmt(oracle),
                    fmt(diff),
                ]);
            }
        }
    }

    let mut out = OutDir::create(&common.out_dir, "validate-matrix", common.seed)?;
    out.csv(
        "validate.csv",
        &[
            "side",
            "alpha",
            "beta",
            "gamma",
            "a",
            "b",
            "m",
            "n",
            "closed_form",
            "oracle",
            "abs_diff",
        ],
        &rows,
    )?;
    let status = if failures == 0 {
        Status::Ok
    } else {
        Status::ValidationFailed
    };
    println!(
        "{} parameter sets, {} entries, max |closed − oracle| {}, {} above {}",
        cases.len(),
        rows.len(),
        fmt(worst),
        failures,
        fmt(TOLERANCE)
    );
    let summary = json!({
        "parameter_sets": cases.len(),
        "entries": rows.len(),
        "max_abs_diff": worst,
        "failures": failures,
        "tolerance": TOLERANCE,
        "corrupt_entry": corrupt,
    });
    out.manifest(None, common.overrides(), status, summary)?;
    Ok(status)
}
