use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::failure::CliResult;

/// Output directory plus the metadata accumulated for `metadata.json`.
pub struct Run {
    pub out_dir: PathBuf,
    pub seed: u64,
    command: String,
    params: Map<String, Value>,
    artifacts: Vec<String>,
    config: Option<PathBuf>,
}

impl Run {
    pub fn new(out_dir: &Path, seed: u64, command: &str, config: Option<&Path>) -> CliResult<Self> {
        fs::create_dir_all(out_dir)?;
        Ok(Self {
            out_dir: out_dir.to_path_buf(),
            seed,
            command: command.to_string(),
            params: Map::new(),
            artifacts: Vec::new(),
            config: config.map(Path::to_path_buf),
        })
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) {
        self.params.insert(key.to_string(), value.into());
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    pub fn artifact(&mut self, name: &str) {
        self.artifacts.push(name.to_string());
    }

    pub fn write(&mut self, name: &str, bytes: impl AsRef<[u8]>) -> CliResult<()> {
        fs::write(self.path(name), bytes)?;
        self.artifact(name);
        Ok(())
    }

    pub fn write_csv<I, R>(&mut self, name: &str, header: &[&str], rows: I) -> CliResult<()>
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator<Item = String>,
    {
        let mut w = csv::Writer::from_path(self.path(name))?;
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
        self.artifact(name);
        Ok(())
    }

    /// Writes `metadata.json`; keys are sorted and nothing depends on the clock.
    pub fn finish(self) -> CliResult<()> {
        let meta = json!({
            "command": self.command,
            "version": env!("CARGO_PKG_VERSION"),
            "seed": self.seed,
            "config": self.config.map(|p| p.display().to_string()),
            "parameters": Value::Object(self.params),
            "artifacts": self.artifacts,
        });
        let mut text = serde_json::to_string_pretty(&meta)?;
        text.push('\n');
        fs::write(self.out_dir.join("metadata.json"), text)?;
        Ok(())
    }
}
