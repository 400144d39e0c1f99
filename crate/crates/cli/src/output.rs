//! Output files: CSV and gnuplot tables in round-trip scientific notation, JSON
//! reports and the run manifest.

use anyhow::{Context, Result};
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Round-trip scientific notation.
pub fn fmt(x: f64) -> String {
    format!("{x:e}")
}

pub struct OutDir {
    dir: PathBuf,
    command: &'static str,
    seed: u64,
    written: Vec<String>,
}

impl OutDir {
    pub fn create(dir: &Path, command: &'static str, seed: u64) -> Result<Self> {
        std::fs::create_dir_all(dir)
            .with_context(|| format!("cannot create output directory {}", dir.display()))?;
        Ok(OutDir {
            dir: dir.to_path_buf(),
            command,
            seed,
            written: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, body: &str) -> Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, body).with_context(|| format!("cannot write {}", path.display()))?;
        self.written.push(name.to_string());
        Ok(())
    }

    /// CSV with a leading `# command seed=...` comment line.
    pub fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let mut body = format!(
            "# abel {} seed={}\n{}\n",
            self.command,
            self.seed,
            header.join(",")
        );
        for row in rows {
            body.push_str(&row.join(","));
            body.push('\n');
        }
        self.write(name, &body)
    }

    /// Whitespace-separated columns with `#` comments, as gnuplot reads them.
    pub fn dat(&mut self, name: &str, comments: &[String], rows: &[Vec<String>]) -> Result<()> {
        let mut body = format!("# abel {} seed={}\n", self.command, self.seed);
        for c in comments {
            let _ = writeln!(body, "# {c}");
        }
        for row in rows {
            body.push_str(&row.join(" "));
            body.push('\n');
        }
        self.write(name, &body)
    }

    pub fn json(&mut self, name: &str, mut value: Value) -> Result<()> {
        if let Value::Object(map) = &mut value {
            map.insert("seed".into(), json!(self.seed));
        }
        self.write(name, &(serde_json::to_string_pretty(&value)? + "\n"))
    }

    pub fn manifest(
        mut self,
        input: Option<&Path>,
        overrides: impl serde::Serialize,
        status: crate::Status,
        summary: Value,
    ) -> Result<()> {
        let mut outputs = self.written.clone();
        outputs.push("manifest.json".into());
        let value = json!({
            "command": self.command,
            "input": input.map(|p| p.display().to_string()),
            "out_dir": self.dir.display().to_string(),
            "overrides": overrides,
            "outputs": outputs,
            "exit_status": status as u8,
            "summary": summary,
        });
        self.json("manifest.json", value)
    }
}
