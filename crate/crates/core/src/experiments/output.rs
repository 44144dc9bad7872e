use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TOOL: &str = "backhaul";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const MANIFEST_FILE: &str = "manifest.json";

/// Record written next to every result file. Passing it back as `--config`
/// reproduces the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    /// Subcommand, e.g. `sweep n1`.
    pub command: String,
    /// Fully resolved configuration, flags already applied.
    pub config: serde_json::Value,
    pub seed: u64,
    pub outputs: Vec<String>,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl Manifest {
    pub fn new<C: Serialize>(command: &str, config: &C, seed: u64) -> Result<Self> {
        Ok(Manifest {
            tool: TOOL.into(),
            version: VERSION.into(),
            command: command.into(),
            config: serde_json::to_value(config)?,
            seed,
            outputs: Vec::new(),
            notes: Vec::new(),
        })
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(MANIFEST_FILE);
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }
}

/// Reads a configuration from `path`, which holds either the configuration
/// itself or a manifest wrapping it.
pub fn load_config<C: DeserializeOwned>(path: &Path) -> Result<C> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::parse(path, &e))?;
    let is_manifest = value
        .as_object()
        .is_some_and(|o| o.get("tool").and_then(|t| t.as_str()) == Some(TOOL) && o.contains_key("config"));
    let inner = if is_manifest {
        let m: Manifest = serde_json::from_value(value)?;
        m.config
    } else {
        value
    };
    serde_json::from_value(inner).map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))
}

/// Creates `dir` if needed and opens `dir/name` for buffered writing.
pub fn create_output(dir: &Path, name: &str) -> Result<BufWriter<fs::File>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(name);
    let file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    Ok(BufWriter::new(file))
}
