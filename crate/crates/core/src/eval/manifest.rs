//! Subjective-score manifests and batch evaluation.
//!
//! A manifest is a UTF-8 CSV with header `path,subjective,group`. Paths are
//! relative to the manifest's directory; `group` may be empty.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::eval::report::{correlate, CorrelationReport};
use crate::fmt::sig6;
use crate::image::load_image;
use crate::sharpness::{score, SharpnessConfig};

/// One manifest row with its path resolved against the manifest directory.
#[derive(Clone, Debug, PartialEq)]
pub struct ManifestEntry {
    /// Path as written in the manifest.
    pub listed: String,
    pub resolved: PathBuf,
    pub subjective: f64,
    pub group: Option<String>,
}

/// Parses a manifest file.
pub fn read_manifest(path: impl AsRef<Path>) -> Result<Vec<ManifestEntry>> {
    let path = path.as_ref();
    let invalid = |message: String| Error::Manifest {
        path: path.to_path_buf(),
        message,
    };
    let file = File::open(path).map_err(|e| invalid(e.to_string()))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(file);
    let headers = rdr.headers().map_err(|e| invalid(e.to_string()))?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim_start_matches('\u{feff}') == name)
    };
    let path_col = find("path").ok_or_else(|| invalid("missing `path` column".into()))?;
    let subj_col =
        find("subjective").ok_or_else(|| invalid("missing `subjective` column".into()))?;
    let group_col = find("group");

    let mut entries = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| invalid(format!("line {line}: {e}")))?;
        let listed = row.get(path_col).unwrap_or("").to_string();
        if listed.is_empty() {
            return Err(invalid(format!("line {line}: empty path")));
        }
        let raw = row.get(subj_col).unwrap_or("");
        let subjective: f64 = raw
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| invalid(format!("line {line}: bad subjective score `{raw}`")))?;
        let group = group_col
            .and_then(|c| row.get(c))
            .filter(|g| !g.is_empty())
            .map(str::to_string);
        entries.push(ManifestEntry {
            resolved: base.join(&listed),
            listed,
            subjective,
            group,
        });
    }
    if entries.is_empty() {
        return Err(invalid("manifest lists no images".into()));
    }
    Ok(entries)
}

/// A successfully scored manifest row.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoredImage {
    pub path: String,
    pub objective: f64,
    pub subjective: f64,
    /// Logistic-mapped objective score.
    pub fitted: f64,
    pub group: Option<String>,
}

/// A manifest row that could not be scored.
#[derive(Clone, Debug, PartialEq)]
pub struct SkippedImage {
    pub path: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ManifestEvaluation {
    pub report: CorrelationReport,
    /// Scored rows in manifest order.
    pub images: Vec<ScoredImage>,
    pub skipped: Vec<SkippedImage>,
}

/// Scores every manifest image and correlates against the subjective scores.
pub fn evaluate_manifest(
    manifest: impl AsRef<Path>,
    cfg: &SharpnessConfig,
) -> Result<ManifestEvaluation> {
    evaluate_entries(&read_manifest(manifest)?, cfg)
}

/// As [`evaluate_manifest`] for already-parsed entries. Images are scored in
/// parallel; output order follows the entries. Unreadable images are
/// skipped and listed.
pub fn evaluate_entries(
    entries: &[ManifestEntry],
    cfg: &SharpnessConfig,
) -> Result<ManifestEvaluation> {
    cfg.validate()?;
    let scored: Vec<std::result::Result<f64, String>> = entries
        .par_iter()
        .map(|e| {
            load_image(&e.resolved)
                .and_then(|img| score(&img, cfg))
                .map_err(|err| err.to_string())
        })
        .collect();

    let mut kept = Vec::new();
    let mut skipped = Vec::new();
    for (entry, outcome) in entries.iter().zip(scored) {
        match outcome {
            Ok(q) => kept.push((entry, q)),
            Err(reason) => skipped.push(SkippedImage {
                path: entry.listed.clone(),
                reason,
            }),
        }
    }
    let objective: Vec<f64> = kept.iter().map(|(_, q)| *q).collect();
    let subjective: Vec<f64> = kept.iter().map(|(e, _)| e.subjective).collect();
    let (report, fitted) = correlate(&objective, &subjective)?;
    let images = kept
        .iter()
        .zip(fitted)
        .map(|((e, q), f)| ScoredImage {
            path: e.listed.clone(),
            objective: *q,
            subjective: e.subjective,
            fitted: f,
            group: e.group.clone(),
        })
        .collect();
    Ok(ManifestEvaluation {
        report,
        images,
        skipped,
    })
}

/// Writes `path,objective,subjective,fitted`.
pub fn write_per_image_csv<W: Write>(images: &[ScoredImage], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(["path", "objective", "subjective", "fitted"])?;
    for img in images {
        w.write_record([
            img.path.clone(),
            sig6(img.objective),
            sig6(img.subjective),
            sig6(img.fitted),
        ])?;
    }
    w.flush()?;
    Ok(())
}
