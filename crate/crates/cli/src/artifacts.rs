//! File names, hashing and the run manifest.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use nalgebra::DMatrix;
use qfe_core::qsim::FeatureLayout;
use qfe_core::surrogate::CoverageFlag;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::LoadedConfig;

pub const SUBSAMPLE_IDX: &str = "subsample.idx";
pub const SUBSAMPLE_SUMMARY: &str = "subsample.json";
pub const COUPLING: &str = "coupling.txt";
pub const FEATURES: &str = "features.csv";
pub const MODEL: &str = "surrogate.model";
pub const SURROGATE_SUMMARY: &str = "surrogate.json";
pub const REPLAY: &str = "replay.csv";
pub const CLASSIFIER: &str = "classifier.txt";
pub const EVAL_JSON: &str = "eval.json";
pub const EVAL_TXT: &str = "eval.txt";
pub const REPORT_JSON: &str = "report.json";
pub const REPORT_TXT: &str = "report.txt";
pub const MANIFEST: &str = "manifest.json";

/// Every artifact a run can produce, in pipeline order (manifest excluded).
pub const ALL: [&str; 12] = [
    SUBSAMPLE_IDX,
    SUBSAMPLE_SUMMARY,
    COUPLING,
    FEATURES,
    MODEL,
    SURROGATE_SUMMARY,
    REPLAY,
    CLASSIFIER,
    EVAL_JSON,
    EVAL_TXT,
    REPORT_JSON,
    REPORT_TXT,
];

const COVERAGE_COLUMNS: [&str; 2] = ["in_coverage", "coverage_distance"];

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

pub fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn write(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write(path, &text)
}

#[derive(Serialize)]
struct InputRecord {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    config: &'a crate::config::PipelineConfig,
    dataset: InputRecord,
    artifacts: BTreeMap<&'static str, String>,
}

/// Rewrite the manifest from whatever artifacts are currently on disk.
pub fn update_manifest(loaded: &LoadedConfig, out: &Path) -> Result<()> {
    let mut artifacts = BTreeMap::new();
    for name in ALL {
        let p = out.join(name);
        if p.is_file() {
            artifacts.insert(name, sha256_file(&p)?);
        }
    }
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        config: &loaded.config,
        dataset: InputRecord {
            path: loaded.config.dataset.path.display().to_string(),
            sha256: sha256_file(&loaded.dataset_path())?,
        },
        artifacts,
    };
    write_json(&out.join(MANIFEST), &manifest)
}

/// Surrogate features followed by the two coverage columns.
pub fn replay_to_csv(layout: &FeatureLayout, features: &DMatrix<f64>, flags: &[CoverageFlag]) -> String {
    let mut header = layout.descriptors();
    header.extend(COVERAGE_COLUMNS.iter().map(|s| s.to_string()));
    let mut s = header.join(",");
    s.push('\n');
    for (i, flag) in flags.iter().enumerate() {
        for v in features.row(i).iter() {
            s.push_str(&v.to_string());
            s.push(',');
        }
        s.push_str(if flag.in_coverage { "1" } else { "0" });
        s.push(',');
        s.push_str(&flag.distance.to_string());
        s.push('\n');
    }
    s
}

/// Feature columns of a feature or replay CSV; coverage columns are dropped.
pub fn read_feature_table(text: &str) -> Result<(FeatureLayout, DMatrix<f64>)> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap_or_default().split(',').collect();
    let keep = header.iter().take_while(|h| !COVERAGE_COLUMNS.contains(h)).count();
    if keep == 0 {
        bail!("feature table has no feature columns");
    }
    let mut trimmed = header[..keep].join(",");
    trimmed.push('\n');
    for line in lines.filter(|l| !l.trim().is_empty()) {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != header.len() {
            bail!(
                "feature table row has {} fields, header has {}",
                cells.len(),
                header.len()
            );
        }
        trimmed.push_str(&cells[..keep].join(","));
        trimmed.push('\n');
    }
    Ok(qfe_core::qsim::features_from_csv(&trimmed)?)
}
