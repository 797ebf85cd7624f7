//! Run directories: a target document, the minimal points, derived artifacts, and a
//! manifest listing every file with its SHA-256.

use std::fs;
use std::path::{Path, PathBuf};

use dlab_core::minpoints::{read_csv_points, MinimalPointSequence};
use dlab_core::model::{load_target, parse_rational};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const MANIFEST: &str = "manifest.json";
pub const TARGET: &str = "target.json";
pub const POINTS: &str = "minimal_points.csv";

pub struct RunDir {
    pub path: PathBuf,
    manifest: Map<String, Value>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn to_pretty(v: &impl serde::Serialize) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

impl RunDir {
    /// A fresh run directory; an existing manifest in it is replaced.
    pub fn create(path: &Path, command: &str, parameters: Value) -> Result<Self, CliError> {
        fs::create_dir_all(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
        let mut manifest = Map::new();
        manifest.insert("tool".into(), json!("dlab"));
        manifest.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        manifest.insert("command".into(), json!(command));
        manifest.insert("parameters".into(), parameters);
        manifest.insert("files".into(), json!({}));
        manifest.insert("steps".into(), json!({}));
        Ok(RunDir { path: path.to_path_buf(), manifest })
    }

    pub fn open(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path.join(MANIFEST))
            .map_err(|e| CliError::io(format!("{}: {e}", path.join(MANIFEST).display())))?;
        let manifest: Map<String, Value> =
            serde_json::from_str(&text).map_err(|e| CliError::schema(format!("bad manifest: {e}")))?;
        Ok(RunDir { path: path.to_path_buf(), manifest })
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.manifest.get(key)
    }

    pub fn set(&mut self, key: &str, value: Value) {
        self.manifest.insert(key.into(), value);
    }

    /// Writes an artifact and records its hash.
    pub fn write(&mut self, name: &str, contents: &str) -> Result<PathBuf, CliError> {
        let p = self.path.join(name);
        fs::write(&p, contents).map_err(|e| CliError::io(format!("{}: {e}", p.display())))?;
        let files = self.manifest.entry("files").or_insert_with(|| json!({}));
        if let Value::Object(m) = files {
            m.insert(name.into(), json!({ "sha256": sha256_hex(contents.as_bytes()), "bytes": contents.len() }));
        }
        Ok(p)
    }

    /// Records a derived step under its command name; reruns replace the entry.
    pub fn record_step(&mut self, command: &str, parameters: Value, outputs: &[&str]) {
        let steps = self.manifest.entry("steps").or_insert_with(|| json!({}));
        if let Value::Object(m) = steps {
            m.insert(command.into(), json!({ "parameters": parameters, "outputs": outputs }));
        }
    }

    pub fn save(&self) -> Result<(), CliError> {
        let p = self.path.join(MANIFEST);
        let text = to_pretty(&self.manifest)?;
        fs::write(&p, text).map_err(|e| CliError::io(format!("{}: {e}", p.display())))
    }

    pub fn read(&self, name: &str) -> Result<String, CliError> {
        let p = self.path.join(name);
        fs::read_to_string(&p).map_err(|e| CliError::io(format!("{}: {e}", p.display())))
    }

    /// Rebuilds the minimal-point sequence stored in the run.
    pub fn sequence(&self, cap: u64) -> Result<MinimalPointSequence, CliError> {
        let doc = self.read(TARGET)?;
        let (xi, set) = load_target(&doc)?;
        let points = read_csv_points(&self.read(POINTS)?)?;
        let x_max = self
            .manifest
            .get("x_max")
            .and_then(|v| v.as_str())
            .ok_or_else(|| CliError::schema("manifest has no x_max".into()))?;
        let x_max = parse_rational(x_max)?;
        Ok(MinimalPointSequence::from_points(&xi, &set, points, x_max, cap)?)
    }
}

/// Checks every hash in a run's manifest against the files on disk.
pub fn verify(path: &Path) -> Result<Vec<(String, bool)>, CliError> {
    let run = RunDir::open(path)?;
    let mut out = Vec::new();
    if let Some(Value::Object(files)) = run.get("files") {
        for (name, meta) in files {
            let expected = meta.get("sha256").and_then(|v| v.as_str()).unwrap_or("");
            let ok = fs::read(path.join(name)).map(|b| sha256_hex(&b) == expected).unwrap_or(false);
            out.push((name.clone(), ok));
        }
    }
    Ok(out)
}
