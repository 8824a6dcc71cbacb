//! `--config` files: one JSON object whose keys mirror the long flags.
//! Flags given on the command line win over values read from the file.

use std::fs;
use std::path::Path;

use serde::Deserialize;
use tongue_lab::circle_map::{FamilyConfig, FamilyKind, FamilySpec};

use crate::CliError;

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub family: Option<FamilyConfig>,
    pub t: Option<f64>,
    pub a: Option<f64>,
    pub n: Option<u64>,
    pub p: Option<i64>,
    pub q: Option<i64>,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub a_min: Option<f64>,
    pub a_max: Option<f64>,
    pub a_values: Option<Vec<f64>>,
    pub count: Option<usize>,
    pub steps: Option<usize>,
    pub grid: Option<usize>,
    pub order: Option<usize>,
    pub guide: Option<String>,
    pub tol: Option<f64>,
    pub width: Option<usize>,
    pub height: Option<usize>,
    pub mode: Option<String>,
    pub tongues: Option<Vec<String>>,
    pub threads: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }
}

pub fn parse_kind(s: &str) -> Result<FamilyKind, String> {
    serde_json::from_value(serde_json::Value::String(s.to_ascii_lowercase()))
        .map_err(|_| format!("unknown family `{s}` (expected standard, blaschke, angle or fourier)"))
}

/// Parses a `K,RE,IM` Fourier term.
pub fn parse_term(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let nums: Result<Vec<f64>, _> = parts.iter().map(|p| p.parse::<f64>()).collect();
    match nums {
        Ok(v) if v.len() == 3 => Ok([v[0], v[1], v[2]]),
        _ => Err(format!("expected K,RE,IM, got `{s}`")),
    }
}

/// Merges family flags over the file's family record.
pub fn family(
    file: &FileConfig,
    kind: Option<FamilyKind>,
    terms: &[[f64; 3]],
    angle_terms: Option<usize>,
) -> Result<FamilySpec, CliError> {
    let mut cfg = file.family.clone().unwrap_or_default();
    if kind.is_some() {
        cfg.kind = kind;
    }
    if !terms.is_empty() {
        cfg.fourier = Some(terms.to_vec());
    }
    if angle_terms.is_some() {
        cfg.angle_terms = angle_terms;
    }
    if cfg.kind.is_none() {
        cfg.kind = Some(if cfg.fourier.is_some() { FamilyKind::Fourier } else { FamilyKind::Standard });
    }
    Ok(FamilySpec::from_config(&cfg)?)
}
