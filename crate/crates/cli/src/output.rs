//! Artifact writing and the per-run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::fail::Fail;

#[derive(Debug, Serialize)]
struct Artifact {
    path: String,
    bytes: usize,
    sha256: String,
}

pub struct Run {
    out: PathBuf,
    command: &'static str,
    config: Value,
    artifacts: Vec<Artifact>,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

impl Run {
    pub fn new(out: &Path, command: &'static str, config: Value) -> Self {
        Run {
            out: out.to_path_buf(),
            command,
            config,
            artifacts: Vec::new(),
        }
    }

    fn tool(&self) -> Value {
        json!({
            "name": "resil",
            "version": resil_core::VERSION,
            "command": self.command,
            "config": self.config,
        })
    }

    /// Writes raw bytes under the output directory.
    pub fn bytes(&mut self, name: &str, data: &[u8]) -> Result<(), Fail> {
        let path = self.out.join(name);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(|e| Fail::io(dir, e))?;
        }
        fs::write(&path, data).map_err(|e| Fail::io(&path, e))?;
        self.artifacts.push(Artifact {
            path: name.into(),
            bytes: data.len(),
            sha256: hex(&Sha256::digest(data)),
        });
        Ok(())
    }

    /// Writes `body` as pretty JSON with a `tool` block (version, command,
    /// resolved config) added at the top level. Non-object bodies are
    /// wrapped as `{"result": body}`.
    pub fn json<T: Serialize>(&mut self, name: &str, body: &T) -> Result<(), Fail> {
        let mut v = serde_json::to_value(body).map_err(Fail::internal)?;
        if !v.is_object() {
            v = json!({ "result": v });
        }
        v.as_object_mut()
            .expect("object")
            .insert("tool".into(), self.tool());
        let mut text = serde_json::to_string_pretty(&v).map_err(Fail::internal)?;
        text.push('\n');
        self.bytes(name, text.as_bytes())
    }

    /// Writes `rows` as CSV with a header from the first row's fields.
    pub fn csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<(), Fail> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r).map_err(Fail::internal)?;
        }
        let data = w.into_inner().map_err(|e| Fail::internal(e.to_string()))?;
        self.bytes(name, &data)
    }

    /// Writes `run.json` listing every artifact with its digest.
    pub fn finish(mut self) -> Result<(), Fail> {
        let artifacts = std::mem::take(&mut self.artifacts);
        let manifest = json!({
            "tool": self.tool(),
            "artifacts": artifacts,
        });
        let mut text = serde_json::to_string_pretty(&manifest).map_err(Fail::internal)?;
        text.push('\n');
        let path = self.out.join("run.json");
        fs::create_dir_all(&self.out).map_err(|e| Fail::io(&self.out, e))?;
        fs::write(&path, text).map_err(|e| Fail::io(&path, e))
    }
}
