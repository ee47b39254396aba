//! CSV and JSON writers with provenance headers.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use super::ScenarioError;

pub const UNITS: &str = "SI; angular frequencies and rates in s^-1 (rad/s); times in s; \
                         coupling densities rho in s^-1 (integral over omega = Omega^2 in s^-2)";

/// Writes files into one output directory and records what was written.
#[derive(Debug)]
pub struct Sink {
    dir: PathBuf,
    hash: String,
    pub written: Vec<PathBuf>,
}

fn io(path: &Path, e: std::io::Error) -> ScenarioError {
    ScenarioError::Io(format!("{}: {e}", path.display()))
}

/// Fixed-width scientific notation with 17 significant digits.
pub fn fmt(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:.16e}")
    }
}

impl Sink {
    pub fn new(dir: &Path, hash: &str) -> Result<Self, ScenarioError> {
        fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        Ok(Sink {
            dir: dir.to_path_buf(),
            hash: hash.to_string(),
            written: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn put(&mut self, name: &str, contents: &str) -> Result<PathBuf, ScenarioError> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| io(&path, e))?;
        self.written.push(path.clone());
        Ok(path)
    }

    /// Comma-separated table preceded by `#` metadata lines.
    pub fn csv(
        &mut self,
        name: &str,
        kind: &str,
        meta: &[(&str, String)],
        columns: &[&str],
        rows: &[Vec<f64>],
    ) -> Result<PathBuf, ScenarioError> {
        let mut s = String::new();
        let _ = writeln!(s, "# nanobec {kind}");
        let _ = writeln!(s, "# config_sha256: {}", self.hash);
        let _ = writeln!(s, "# units: {UNITS}");
        for (k, v) in meta {
            let _ = writeln!(s, "# {k}: {v}");
        }
        let _ = writeln!(s, "{}", columns.join(","));
        for row in rows {
            let cells: Vec<String> = row.iter().map(|v| fmt(*v)).collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        self.put(name, &s)
    }

    /// Pretty JSON object with `config_sha256` and `units` added at the top level.
    pub fn json(&mut self, name: &str, kind: &str, body: Value) -> Result<PathBuf, ScenarioError> {
        let mut root = json!({ "kind": kind, "config_sha256": self.hash, "units": UNITS });
        if let (Value::Object(dst), Value::Object(src)) = (&mut root, body) {
            dst.extend(src);
        }
        let mut text = serde_json::to_string_pretty(&root).expect("json serializes");
        text.push('\n');
        self.put(name, &text)
    }

    pub fn text(&mut self, name: &str, body: &str) -> Result<PathBuf, ScenarioError> {
        let mut s = format!("# config_sha256: {}\n# units: {UNITS}\n", self.hash);
        s.push_str(body);
        self.put(name, &s)
    }

    /// Echo of the validated configuration with defaults filled in.
    pub fn config(&mut self, config_json: &str) -> Result<PathBuf, ScenarioError> {
        let mut s = config_json.to_string();
        s.push('\n');
        self.put("config.resolved.json", &s)
    }
}
