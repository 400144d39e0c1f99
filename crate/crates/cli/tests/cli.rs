use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn abel(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_abel"))
        .args(args)
        .arg("--out-dir")
        .arg(out)
        .env_remove("ABEL_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn read_json(path: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Data rows of a CSV written by the CLI, after the comment and header lines.
fn csv(path: PathBuf) -> (Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, rows)
}

#[test]
fn solve_phi_one_fixture() {
    let dir = TempDir::new().unwrap();
    let input = fixture("phi_one.json");
    let o = abel(
        dir.path(),
        &["solve", "--input", input.to_str().unwrap(), "--seed", "7"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = read_json(dir.path().join("report.json"));
    assert!(report["residual_norm"].as_f64().unwrap() <= 1e-6);
    assert_eq!(report["diagnostic_mode"], false);
    assert_eq!(report["seed"], 7);
    let (header, rows) = csv(dir.path().join("coefficients.csv"));
    assert_eq!(header, ["m", "psi_m", "row_sum_m"]);
    let psi0: f64 = rows[0][1].parse().unwrap();
    assert!((psi0 - 1.0).abs() < 1e-9);
    let manifest = read_json(dir.path().join("manifest.json"));
    assert_eq!(manifest["seed"], 7);
    assert_eq!(manifest["exit_status"], 0);
}

#[test]
fn solve_out_of_scope_is_diagnostic() {
    let dir = TempDir::new().unwrap();
    let input = fixture("out_of_scope.json");
    let o = abel(dir.path(), &["solve", "--input", input.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let report = read_json(dir.path().join("report.json"));
    assert_eq!(report["diagnostic_mode"], true);
}

#[test]
fn overrides_apply_on_top_of_the_file() {
    let dir = TempDir::new().unwrap();
    let input = fixture("out_of_scope.json");
    let o = abel(
        dir.path(),
        &[
            "solve",
            "--input",
            input.to_str().unwrap(),
            "--alpha",
            "-0.3",
            "--M",
            "80",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = read_json(dir.path().join("report.json"));
    assert_eq!(report["alpha"], -0.3);
    let manifest = read_json(dir.path().join("manifest.json"));
    assert_eq!(manifest["overrides"]["alpha"], "-0.3");
    assert_eq!(manifest["overrides"]["M"], "80");
}

#[test]
fn solve_input_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    let o = abel(
        dir.path(),
        &["solve", "--input", "/nonexistent/problem.json"],
    );
    assert_eq!(code(&o), 1);

    let input = fixture("missing_field.json");
    let o = abel(dir.path(), &["solve", "--input", input.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("alpha") && err.contains("line"), "{err}");

    let input = fixture("phi_one.json");
    let o = abel(
        dir.path(),
        &[
            "solve",
            "--input",
            input.to_str().unwrap(),
            "--alpha",
            "0.5",
        ],
    );
    assert_eq!(code(&o), 1);
}

#[test]
fn unknown_arguments_exit_one() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&abel(dir.path(), &["frobnicate"])), 1);
    assert_eq!(code(&abel(dir.path(), &["solve", "--interval", "0;1"])), 1);
}

#[test]
fn validate_matrix_default_grid_passes() {
    let dir = TempDir::new().unwrap();
    let o = abel(dir.path(), &["validate-matrix"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let (header, rows) = csv(dir.path().join("validate.csv"));
    assert_eq!(
        header,
        [
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
            "abs_diff"
        ]
    );
    // 54 grid points plus 4 random draws, 13 × 13 entries each
    assert_eq!(rows.len(), 58 * 169);
}

#[test]
fn validate_matrix_alpha_zero_is_exact() {
    let dir = TempDir::new().unwrap();
    let o = abel(dir.path(), &["validate-matrix", "--alpha", "0"]);
    assert_eq!(code(&o), 0);
    let (_, rows) = csv(dir.path().join("validate.csv"));
    for row in rows {
        let diff: f64 = row[10].parse().unwrap();
        assert!(diff <= 1e-10, "{row:?}");
    }
}

#[test]
fn validate_matrix_failure_paths() {
    let dir = TempDir::new().unwrap();
    assert_eq!(
        code(&abel(
            dir.path(),
            &["validate-matrix", "--corrupt-entry", "3,4"]
        )),
        3
    );
    assert_eq!(
        code(&abel(dir.path(), &["validate-matrix", "--alpha", "0.5"])),
        1
    );
    assert_eq!(
        code(&abel(dir.path(), &["validate-matrix", "--beta", "-1.5"])),
        1
    );
}

#[test]
fn validate_matrix_is_deterministic_per_seed() {
    let runs: Vec<(TempDir, Vec<u8>)> = ["11", "11", "12"]
        .iter()
        .map(|seed| {
            let dir = TempDir::new().unwrap();
            assert_eq!(
                code(&abel(dir.path(), &["validate-matrix", "--seed", seed])),
                0
            );
            let bytes = std::fs::read(dir.path().join("validate.csv")).unwrap();
            (dir, bytes)
        })
        .collect();
    assert_eq!(runs[0].1, runs[1].1);
    assert_ne!(runs[0].1, runs[2].1);
}

#[test]
fn lemma_sweep_default() {
    let dir = TempDir::new().unwrap();
    let o = abel(dir.path(), &["lemma-sweep"]);
    assert_eq!(code(&o), 0);
    let stdout = String::from_utf8_lossy(&o.stdout);
    let line = stdout
        .lines()
        .find(|l| l.starts_with("η = 1, γ = 0"))
        .unwrap();
    let n: usize = line.rsplit(' ').next().unwrap().parse().unwrap();
    assert!(n <= 64);

    let (header, rows) = csv(dir.path().join("lemma1.csv"));
    assert_eq!(
        header,
        ["alpha", "beta", "gamma", "m", "k", "i_mk", "i_mk_scaled"]
    );
    let (header2, rows2) = csv(dir.path().join("lemma2.csv"));
    assert_eq!(header2, ["eta", "gamma", "k", "d_k", "ln_d_k"]);
    for row in rows.iter().chain(&rows2) {
        for cell in row {
            assert!(cell.parse::<f64>().unwrap().is_finite(), "{row:?}");
        }
    }
    let (_, thresholds) = csv(dir.path().join("lemma2_thresholds.csv"));
    let reference = thresholds
        .iter()
        .find(|r| r[0] == "1" && r[1] == "0e0")
        .unwrap();
    assert_eq!(reference[2], n.to_string());
}

#[test]
fn decay_report_phi_one_slope() {
    let dir = TempDir::new().unwrap();
    let input = fixture("phi_one.json");
    let o = abel(
        dir.path(),
        &["decay-report", "--input", input.to_str().unwrap()],
    );
    assert_eq!(code(&o), 0);
    let (header, rows) = csv(dir.path().join("decay.csv"));
    assert_eq!(header, ["m", "row_sum", "fit"]);
    assert!(!rows.is_empty());
    let dat = std::fs::read_to_string(dir.path().join("decay.dat")).unwrap();
    let slope: f64 = dat
        .lines()
        .find_map(|l| l.strip_prefix("# slope "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((-slope - 0.5).abs() <= 0.15, "slope {slope}");
}

#[test]
fn decay_report_synthetic_rows() {
    let dir = TempDir::new().unwrap();
    let o = abel(
        dir.path(),
        &["decay-report", "--synthetic-rows-exponent", "1.0"],
    );
    assert_eq!(code(&o), 0);
    let manifest = read_json(dir.path().join("manifest.json"));
    let fit = manifest["summary"]["exponent_fit"].as_f64().unwrap();
    assert!((fit - 1.0).abs() <= 1e-6);
}

#[test]
fn decay_report_zero_rhs_is_degenerate() {
    let dir = TempDir::new().unwrap();
    let input = fixture("zero_rhs.json");
    let o = abel(
        dir.path(),
        &["decay-report", "--input", input.to_str().unwrap()],
    );
    assert_eq!(code(&o), 2);
    let manifest = read_json(dir.path().join("manifest.json"));
    assert_eq!(manifest["summary"]["degenerate"], true);
    assert!(!dir.path().join("decay.csv").exists());
}

#[test]
fn out_dir_from_environment() {
    let dir = TempDir::new().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_abel"))
        .arg("lemma-sweep")
        .env("ABEL_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(dir.path().join("lemma1.csv").exists());
}
