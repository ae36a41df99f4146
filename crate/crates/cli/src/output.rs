use crate::CliError;
use chrono::{DateTime, SecondsFormat, Utc};
use poisson_waves::mc::{FloorCalibration, SlopeFit};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const TOOL: &str = "poisson-waves";

/// SHA-256 of the compact JSON encoding of `config`.
pub fn config_hash<C: Serialize>(config: &C) -> String {
    let bytes = serde_json::to_vec(config).expect("configs serialize");
    hex::encode(Sha256::digest(bytes))
}

/// The `config_sha256=` value from the first line of a CSV written by this
/// tool, if present.
pub fn csv_config_hash(csv: &str) -> Option<&str> {
    csv.lines().next()?.strip_prefix("# config_sha256=")
}

/// Outcome of one verification check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Worst deviation seen (or violation count for counting checks).
    pub measured: f64,
    pub tolerance: f64,
    pub detail: String,
}

/// Provenance record written next to every result file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: serde_json::Value,
    pub config_sha256: String,
    pub seed: u64,
    pub started: String,
    pub finished: String,
    pub wall_seconds: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckResult>,
    /// Conjunction of all checks; `true` when there are none.
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub floor: Option<FloorCalibration>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub slopes: Vec<SlopeFit>,
    #[serde(default)]
    pub outputs: Vec<PathBuf>,
}

/// Wall-clock bracket for a manifest.
pub struct Clock {
    started: DateTime<Utc>,
    instant: Instant,
}

impl Clock {
    pub fn start() -> Self {
        Self { started: Utc::now(), instant: Instant::now() }
    }

    pub fn manifest<C: Serialize>(&self, command: &str, config: &C, seed: u64) -> RunManifest {
        RunManifest {
            tool: TOOL.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config: serde_json::to_value(config).expect("configs serialize"),
            config_sha256: config_hash(config),
            seed,
            started: self.started.to_rfc3339_opts(SecondsFormat::Millis, true),
            finished: Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true),
            wall_seconds: self.instant.elapsed().as_secs_f64(),
            checks: Vec::new(),
            passed: true,
            floor: None,
            slopes: Vec::new(),
            outputs: Vec::new(),
        }
    }
}

impl RunManifest {
    pub fn with_checks(mut self, checks: Vec<CheckResult>) -> Self {
        self.passed = checks.iter().all(|c| c.passed);
        self.checks = checks;
        self
    }

    pub fn failed_checks(&self) -> Vec<String> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }
}

pub fn io_error(path: &Path, source: std::io::Error) -> CliError {
    CliError::Io { path: path.to_path_buf(), source }
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| io_error(path, e))
}

pub fn read_config<C: for<'de> Deserialize<'de>>(path: &Path) -> Result<C, CliError> {
    let fail = |reason: String| CliError::Config { path: path.to_path_buf(), reason };
    let text = fs::read_to_string(path).map_err(|e| fail(e.to_string()))?;
    serde_json::from_str(&text).map_err(|e| fail(e.to_string()))
}
