//! One JSON line per run, appended to a log file.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub wall_seconds: f64,
    /// Peak live heap seen by the allocator; approximate.
    pub peak_heap_bytes: usize,
    pub exit_code: u8,
    pub version: &'static str,
}

impl RunManifest {
    pub fn append(&self, path: &Path) -> std::io::Result<()> {
        let mut line = serde_json::to_string(self).expect("serialisable");
        line.push('\n');
        let mut f = OpenOptions::new().create(true).append(true).open(path)?;
        // one write call per line keeps concurrent appends whole
        f.write_all(line.as_bytes())
    }
}
