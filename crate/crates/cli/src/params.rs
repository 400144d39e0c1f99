use abel_core::solver::ProblemFile;
use abel_core::Side;
use anyhow::{bail, Context, Result};
use clap::Args;
use std::collections::BTreeMap;
use std::path::PathBuf;

/// Flags shared by every subcommand.
#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Problem file (JSON)
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Directory for all outputs
    #[arg(long, global = true, env = "ABEL_OUT_DIR", default_value = "abel-out")]
    pub out_dir: PathBuf,
    /// Seed for randomized sweeps
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    /// Interval as `a,b`
    #[arg(long, global = true, allow_hyphen_values = true, value_name = "A,B")]
    pub interval: Option<String>,
    #[arg(long, global = true)]
    pub side: Option<Side>,
    /// Highest row index of the coupling matrix
    #[arg(long = "M", global = true)]
    pub rows: Option<usize>,
    /// Coefficient cutoff
    #[arg(long = "N", global = true)]
    pub cols: Option<usize>,
    /// Lebesgue index for the classification
    #[arg(long, global = true)]
    pub p: Option<f64>,
    #[arg(long, global = true)]
    pub tol_projection: Option<f64>,
    #[arg(long, global = true)]
    pub tol_convergence: Option<f64>,
    #[arg(long, global = true)]
    pub tol_residual: Option<f64>,
}

pub fn parse_pair<T: std::str::FromStr>(s: &str, what: &str) -> Result<(T, T)>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    let Some((x, y)) = s.split_once(',') else {
        bail!("{what} must be given as two comma-separated values, got `{s}`");
    };
    Ok((
        x.trim().parse().with_context(|| format!("{what}: `{x}`"))?,
        y.trim().parse().with_context(|| format!("{what}: `{y}`"))?,
    ))
}

impl Common {
    pub fn interval(&self) -> Result<Option<(f64, f64)>> {
        self.interval
            .as_deref()
            .map(|s| parse_pair(s, "--interval"))
            .transpose()
    }

    /// Flags that were given explicitly, for the run manifest.
    pub fn overrides(&self) -> BTreeMap<&'static str, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &'static str, v: Option<String>| {
            if let Some(v) = v {
                m.insert(k, v);
            }
        };
        put("alpha", self.alpha.map(|v| v.to_string()));
        put("beta", self.beta.map(|v| v.to_string()));
        put("gamma", self.gamma.map(|v| v.to_string()));
        put("interval", self.interval.clone());
        put("side", self.side.map(|s| s.as_str().to_string()));
        put("M", self.rows.map(|v| v.to_string()));
        put("N", self.cols.map(|v| v.to_string()));
        put("p", self.p.map(|v| v.to_string()));
        put("tol_projection", self.tol_projection.map(|v| v.to_string()));
        put(
            "tol_convergence",
            self.tol_convergence.map(|v| v.to_string()),
        );
        put("tol_residual", self.tol_residual.map(|v| v.to_string()));
        m
    }

    /// Reads `--input` and applies the parameter flags on top of it.
    pub fn load_problem(&self) -> Result<ProblemFile> {
        let Some(path) = &self.input else {
            bail!("--input is required");
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read problem file {}", path.display()))?;
        let mut file: ProblemFile = serde_json::from_str(&text)
            .with_context(|| format!("malformed problem file {}", path.display()))?;
        if let Some((a, b)) = self.interval()? {
            file.a = a;
            file.b = b;
        }
        if let Some(v) = self.alpha {
            file.alpha = v;
        }
        if let Some(v) = self.beta {
            file.beta = v;
        }
        if let Some(v) = self.gamma {
            file.gamma = v;
        }
        if let Some(v) = self.side {
            file.side = v;
        }
        if self.rows.is_some() {
            file.truncation.rows = self.rows;
        }
        if self.cols.is_some() {
            file.truncation.cols = self.cols;
        }
        if self.p.is_some() {
            file.p = self.p;
        }
        if let Some(v) = self.tol_projection {
            file.tolerances.projection = v;
        }
        if let Some(v) = self.tol_convergence {
            file.tolerances.convergence = v;
        }
        if let Some(v) = self.tol_residual {
            file.tolerances.residual = v;
        }
        Ok(file)
    }
}
