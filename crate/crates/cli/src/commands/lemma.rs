//! Property sweeps for `I_mk` (boundedness of `I_mk m^λ`) and `d_k(η)`
//! (eventual strict decrease).

use crate::output::{fmt, OutDir};
use crate::params::Common;
use crate::Status;
use abel_core::coupling::{lemma1_i_mk, lemma2_d_k};
use abel_core::{FracOrder, JacobiBasis, Side};
use anyhow::Result;
use serde_json::json;

const ALPHAS: [f64; 3] = [-0.75, -0.5, -0.25];
const EXPONENTS: [f64; 3] = [-0.4, 0.0, 0.5];
const M_RANGE: (usize, usize) = (16, 2048);
const K_MAX: usize = 2;
const ETAS: [u32; 3] = [1, 2, 3];
const D_K_MAX: usize = 256;
/// Largest admissible ratio of successive dyadic increments.
const DYADIC_RATIO: f64 = 0.75;
const THRESHOLD_BOUND: usize = 64;

fn tabulated(m: usize) -> bool {
    m <= 128 || m.is_multiple_of(16)
}

pub fn run(common: &Common) -> Result<Status> {
    let alphas = common.alpha.map_or(ALPHAS.to_vec(), |v| vec![v]);
    let betas = common.beta.map_or(EXPONENTS.to_vec(), |v| vec![v]);
    let gammas = common.gamma.map_or(EXPONENTS.to_vec(), |v| vec![v]);
    let (a, b) = common.interval()?.unwrap_or((0.0, 1.0));

    let mut lemma1 = Vec::new();
    let mut worst_ratio = 0.0f64;
    let mut sup = 0.0f64;
    for &alpha in &alphas {
        let order = FracOrder::new(alpha, Side::Right)?;
        for &beta in &betas {
            for &gamma in &gammas {
                let basis = JacobiBasis::new(a, b, beta, gamma)?;
                let lambda = 2.0 * alpha + gamma + 1.5;
                for k in 0..=K_MAX {
                    let scaled = |m: usize| -> Result<(f64, f64)> {
                        let v = lemma1_i_mk(&basis, &order, m, k)?;
                        Ok((v, v * (m as f64).powf(lambda)))
                    };
                    for m in M_RANGE.0..=M_RANGE.1 {
                        let (v, s) = scaled(m)?;
                        sup = sup.max(s);
                        if tabulated(m) {
                            lemma1.push(vec![
                                fmt(alpha),
                                fmt(beta),
                                fmt(gamma),
                                m.to_string(),
                                k.to_string(),
                                fmt(v),
                                fmt(s),
                            ]);
                        }
                    }
                    let lo = M_RANGE.0.ilog2();
                    let hi = M_RANGE.1.ilog2();
                    let dyadic: Vec<f64> = (lo..=hi)
                        .map(|j| scaled(1 << j).map(|p| p.1))
                        .collect::<Result<_>>()?;
                    let inc: Vec<f64> = dyadic.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
                    for w in inc.windows(2) {
                        if w[0] > 0.0 {
                            worst_ratio = worst_ratio.max(w[1] / w[0]);
                        }
                    }
                }
            }
        }
    }

    let mut lemma2 = Vec::new();
    let mut thresholds = Vec::new();
    let mut worst_threshold = 0usize;
    let mut reference = None;
    for &eta in &ETAS {
        for &gamma in &gammas {
            let d = (0..=D_K_MAX)
                .map(|k| lemma2_d_k(k, eta, gamma))
                .collect::<abel_core::Result<Vec<_>>>()?;
            for (k, v) in d.iter().enumerate() {
                lemma2.push(vec![
                    eta.to_string(),
                    fmt(gamma),
                    k.to_string(),
                    fmt(v.value),
                    fmt(v.ln),
                ]);
            }
            // first N with d_{k+1} < d_k for every k ≥ N
            let n = (0..D_K_MAX)
                .rev()
                .find(|&k| d[k + 1].ln >= d[k].ln)
                .map_or(0, |k| k + 1);
            worst_threshold = worst_threshold.max(n);
            if eta == 1 && gamma == 0.0 {
                reference = Some(n);
            }
            thresholds.push(vec![eta.to_string(), fmt(gamma), n.to_string()]);
        }
    }

    let mut out = OutDir::create(&common.out_dir, "lemma-sweep", common.seed)?;
    out.csv(
        "lemma1.csv",
        &["alpha", "beta", "gamma", "m", "k", "i_mk", "i_mk_scaled"],
        &lemma1,
    )?;
    out.csv(
        "lemma2.csv",
        &["eta", "gamma", "k", "d_k", "ln_d_k"],
        &lemma2,
    )?;
    out.csv("lemma2_thresholds.csv", &["eta", "gamma", "n"], &thresholds)?;

    let bounded = worst_ratio <= DYADIC_RATIO;
    let decreasing = worst_threshold <= THRESHOLD_BOUND;
    println!(
        "I_mk m^λ: sup {}, worst dyadic increment ratio {} (bound {DYADIC_RATIO}): {}",
        fmt(sup),
        fmt(worst_ratio),
        if bounded { "bounded" } else { "NOT certified" }
    );
    println!(
        "d_k(η): strictly decreasing from k = {worst_threshold} at the latest (bound {THRESHOLD_BOUND}): {}",
        if decreasing { "ok" } else { "FAILED" }
    );
    if let Some(n) = reference {
        println!("η = 1, γ = 0: N = {n}");
    }
    let status = if bounded && decreasing {
        Status::Ok
    } else {
        Status::ValidationFailed
    };
    let summary = json!({
        "lemma1_sup_scaled": sup,
        "lemma1_worst_dyadic_ratio": worst_ratio,
        "lemma1_bounded": bounded,
        "lemma2_worst_threshold": worst_threshold,
        "lemma2_threshold_eta1_gamma0": reference,
        "lemma2_decreasing": decreasing,
    });
    out.manifest(None, common.overrides(), status, summary)?;
    Ok(status)
}
