//! Profiles on disk: a two-column `r,value` CSV plus a JSON sidecar.
//!
//! Numbers are written in shortest round-trip form, so loading reproduces
//! the values bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radial::{RadialGrid, RadialProfile};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const PROFILE_HEADER: &str = "r,value";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileMetadata {
    pub kind: String,
    pub n: usize,
    pub r_max: f64,
    pub eigenvalue: f64,
    pub mass: f64,
    pub residual: f64,
    pub tool_version: String,
    pub config_hash: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProfileRecord {
    pub profile: RadialProfile,
    pub metadata: ProfileMetadata,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LoadWarning {
    /// The sidecar names a different producing configuration.
    HashMismatch { expected: String, found: String },
    /// Written by another tool version.
    VersionMismatch { found: String },
}

#[derive(Clone, Debug)]
pub struct LoadedProfile {
    pub record: ProfileRecord,
    pub warnings: Vec<LoadWarning>,
}

impl LoadedProfile {
    /// Converts warnings into errors.
    pub fn strict(self) -> Result<ProfileRecord> {
        for w in &self.warnings {
            if let LoadWarning::HashMismatch { expected, found } = w {
                return Err(Error::HashMismatch { expected: expected.clone(), found: found.clone() });
            }
        }
        Ok(self.record)
    }
}

/// Path of the JSON sidecar for a profile CSV.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

/// `header` then one `x,y` row per pair.
pub fn two_column_csv(header: &str, xs: &[f64], ys: &[f64]) -> String {
    let mut s = String::with_capacity(32 * xs.len());
    s.push_str(header);
    s.push('\n');
    for (x, y) in xs.iter().zip(ys) {
        let _ = writeln!(s, "{x:e},{y:e}");
    }
    s
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Writes the CSV body and, if `sidecar` is set, the JSON metadata next to it.
pub fn save_profile_with(record: &ProfileRecord, path: &Path, sidecar: bool) -> Result<()> {
    let body = two_column_csv(PROFILE_HEADER, record.profile.grid().nodes(), record.profile.values());
    fs::write(path, body)?;
    if sidecar {
        write_json(&sidecar_path(path), &record.metadata)?;
    }
    Ok(())
}

pub fn save_profile(record: &ProfileRecord, path: &Path) -> Result<()> {
    save_profile_with(record, path, true)
}

fn format_error(path: &Path, message: impl Into<String>) -> Error {
    Error::Format { path: path.display().to_string(), message: message.into() }
}

/// Loads a profile and its sidecar, checking the header, row count and nodes.
///
/// When `expected_hash` is given, a differing `config_hash` is reported as a warning.
pub fn load_profile(path: &Path, expected_hash: Option<&str>) -> Result<LoadedProfile> {
    let meta_text = fs::read_to_string(sidecar_path(path))?;
    let metadata: ProfileMetadata =
        serde_json::from_str(&meta_text).map_err(|e| format_error(&sidecar_path(path), e.to_string()))?;
    let grid = RadialGrid::new(metadata.n, metadata.r_max).map_err(|e| format_error(path, e.to_string()))?;

    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == PROFILE_HEADER => {}
        Some(h) => return Err(format_error(path, format!("expected header {PROFILE_HEADER:?}, found {h:?}"))),
        None => return Err(format_error(path, "empty file")),
    }
    let mut values = Vec::with_capacity(metadata.n);
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row = i + 2;
        let (r, v) = line.split_once(',').ok_or_else(|| format_error(path, format!("row {row}: expected two columns")))?;
        let r: f64 = r.trim().parse().map_err(|e| format_error(path, format!("row {row}: {e}")))?;
        let v: f64 = v.trim().parse().map_err(|e| format_error(path, format!("row {row}: {e}")))?;
        if let Some(node) = grid.nodes().get(values.len()) {
            if (r - node).abs() > 1e-9 * grid.r_max() {
                return Err(format_error(path, format!("row {row}: radius {r} is not grid node {node}")));
            }
        }
        values.push(v);
    }
    if values.len() != metadata.n {
        return Err(format_error(path, format!("expected {} rows, found {}", metadata.n, values.len())));
    }
    let profile = RadialProfile::new(&grid, values).map_err(|e| format_error(path, e.to_string()))?;

    let mut warnings = Vec::new();
    if let Some(expected) = expected_hash {
        if expected != metadata.config_hash {
            warnings.push(LoadWarning::HashMismatch { expected: expected.into(), found: metadata.config_hash.clone() });
        }
    }
    if metadata.tool_version != TOOL_VERSION {
        warnings.push(LoadWarning::VersionMismatch { found: metadata.tool_version.clone() });
    }
    Ok(LoadedProfile { record: ProfileRecord { profile, metadata }, warnings })
}
