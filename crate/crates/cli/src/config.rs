//! Run configuration shared by the subcommands, overridable through a
//! line-oriented `key=value` file.

use std::fmt;
use std::path::{Path, PathBuf};

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub n: usize,
    pub seed: u64,
    pub trials: usize,
    pub steps: usize,
    pub grid: String,
    pub out: PathBuf,
    pub format: Vec<OutputFormat>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 4,
            seed: 7,
            trials: 100,
            steps: 200,
            grid: "default".into(),
            out: PathBuf::from("."),
            format: vec![OutputFormat::Csv, OutputFormat::Json, OutputFormat::Svg],
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
    Svg,
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OutputFormat::Csv => write!(f, "csv"),
            OutputFormat::Json => write!(f, "json"),
            OutputFormat::Svg => write!(f, "svg"),
        }
    }
}

/// Parses a `key=value` config file (`#` starts a comment). Recognized keys:
/// `N`, `seed`, `trials`, `steps`, `grid`, `out`, `format` (comma list).
pub fn load_config_file(path: &Path, base: RunConfig) -> Result<RunConfig, String> {
    let text =
        std::fs::read_to_string(path).map_err(|e| format!("cannot read {path:?}: {e}"))?;
    let mut config = base;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key=value", lineno + 1))?;
        let (key, value) = (key.trim(), value.trim());
        let bad = |e: &dyn fmt::Display| format!("line {}: bad {key}: {e}", lineno + 1);
        match key {
            "N" | "n" => config.n = value.parse().map_err(|e| bad(&e))?,
            "seed" => config.seed = value.parse().map_err(|e| bad(&e))?,
            "trials" => config.trials = value.parse().map_err(|e| bad(&e))?,
            "steps" => config.steps = value.parse().map_err(|e| bad(&e))?,
            "grid" => config.grid = value.to_string(),
            "out" => config.out = PathBuf::from(value),
            "format" => {
                let mut formats = Vec::new();
                for item in value.split(',') {
                    formats.push(match item.trim() {
                        "csv" => OutputFormat::Csv,
                        "json" => OutputFormat::Json,
                        "svg" => OutputFormat::Svg,
                        other => return Err(format!("line {}: bad format {other:?}", lineno + 1)),
                    });
                }
                config.format = formats;
            }
            other => return Err(format!("line {}: unknown key {other:?}", lineno + 1)),
        }
    }
    Ok(config)
}
