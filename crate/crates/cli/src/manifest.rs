//! Reproducibility manifest written next to every experiment output file.
//!
//! The manifest echoes every flag of the run plus the seed, so re-running the
//! same tool version with the recorded configuration reproduces the output
//! byte for byte (checked against `output_sha256`).

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{json, Value};

pub struct RunManifest {
    pub tool_version: String,
    pub command: String,
    pub seed: u64,
    pub config: BTreeMap<String, Value>,
    pub started_at: String,
    pub finished_at: String,
    pub rows: u64,
    pub output_bytes: u64,
    pub output_path: String,
    pub output_sha256: String,
}

impl RunManifest {
    pub fn to_json(&self) -> Value {
        json!({
            "tool_version": self.tool_version,
            "command": self.command,
            "seed": self.seed,
            "config": self.config,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "rows": self.rows,
            "output_bytes": self.output_bytes,
            "output_path": self.output_path,
            "output_sha256": self.output_sha256,
        })
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        let text = serde_json::to_string_pretty(&self.to_json())?;
        std::fs::write(path, text + "\n")
    }
}
