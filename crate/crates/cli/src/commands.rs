use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use rayon::prelude::*;
use sharpmark::eval::{
    aggregate_reports, evaluate_entries, read_manifest, read_report_csv, write_alpha_sweep_csv,
    write_per_image_csv, write_report_csv, write_summary_csv, ManifestEntry, ManifestEvaluation,
};
use sharpmark::fmt::sig6;
use sharpmark::sweep::write_sweep_csv;
use sharpmark::{blur_sweep, load_image, score, score_and_maps, Error, SharpnessConfig};

use crate::args::{Command, MetricArgs};

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_PARTIAL: u8 = 2;
pub const EXIT_BAD_MANIFEST: u8 = 3;

const THREADS_VAR: &str = "SHARPMARK_THREADS";
const MIN_MANIFEST_ROWS: usize = sharpmark::eval::logistic::MIN_POINTS;

/// Sizes the global thread pool from `SHARPMARK_THREADS` (0 or unset = auto).
pub fn configure_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .with_context(|| format!("{THREADS_VAR} must be a non-negative integer, got `{raw}`"))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    Ok(())
}

pub fn exit_code_for(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Manifest { .. }) => EXIT_BAD_MANIFEST,
        _ => EXIT_ERROR,
    }
}

pub fn run(command: Command) -> anyhow::Result<u8> {
    match command {
        Command::Score { paths, metric } => cmd_score(&paths, &metric),
        Command::Map { path, metric, out } => cmd_map(&path, &metric, &out),
        Command::Sweep {
            path,
            sigmas,
            metric,
            out,
        } => cmd_sweep(&path, &sigmas, &metric, out.as_deref()),
        Command::Eval {
            manifest,
            metric,
            alphas,
            out,
        } => cmd_eval(&manifest, &metric, alphas.as_deref(), &out),
        Command::Aggregate {
            reports,
            weights,
            out,
        } => cmd_aggregate(&reports, weights.as_deref(), out.as_deref()),
    }
}

fn cmd_score(paths: &[PathBuf], metric: &MetricArgs) -> anyhow::Result<u8> {
    let cfg = metric.config()?;
    let results: Vec<_> = paths
        .par_iter()
        .map(|p| load_image(p).and_then(|img| score(&img, &cfg)))
        .collect();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let mut code = EXIT_OK;
    for (path, result) in paths.iter().zip(results) {
        match result {
            Ok(q) => writeln!(out, "{}\t{}\t{}", path.display(), sig6(q), cfg.backend)?,
            Err(e) => {
                eprintln!("{}: {e}", path.display());
                code = EXIT_PARTIAL;
            }
        }
    }
    out.flush()?;
    Ok(code)
}

fn stem(path: &Path) -> anyhow::Result<String> {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .with_context(|| format!("{} has no file name", path.display()))
}

fn output_dir(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn cmd_map(path: &Path, metric: &MetricArgs, out: &Path) -> anyhow::Result<u8> {
    let cfg = metric.config()?;
    let stem = stem(path)?;
    let img = load_image(path).with_context(|| format!("cannot score {}", path.display()))?;
    let result = score_and_maps(&img, &cfg)?;
    output_dir(out)?;
    for (suffix, map) in [("smap", &result.bs_map), ("lbsmap", &result.lbs_map)] {
        let target = out.join(format!("{stem}.{suffix}.pgm"));
        map.write_pgm(&target)
            .with_context(|| format!("cannot write {}", target.display()))?;
    }
    Ok(EXIT_OK)
}

fn cmd_sweep(
    path: &Path,
    sigmas: &[f64],
    metric: &MetricArgs,
    out: Option<&Path>,
) -> anyhow::Result<u8> {
    let cfg = metric.config()?;
    if let Some(s) = sigmas.iter().find(|s| !(**s >= 0.0 && s.is_finite())) {
        bail!("blur sigma must be non-negative, got {s}");
    }
    let img = load_image(path)?;
    let rows = blur_sweep(&img, sigmas, &cfg)?;
    match out {
        Some(dir) => {
            output_dir(dir)?;
            write_sweep_csv(
                &rows,
                create(&dir.join(format!("{}.sweep.csv", stem(path)?)))?,
            )?;
        }
        None => write_sweep_csv(&rows, io::stdout().lock())?,
    }
    Ok(EXIT_OK)
}

fn evaluate(
    entries: &[ManifestEntry],
    cfg: &SharpnessConfig,
) -> anyhow::Result<ManifestEvaluation> {
    let eval = evaluate_entries(entries, cfg)?;
    for s in &eval.skipped {
        eprintln!("skipped {}: {}", s.path, s.reason);
    }
    Ok(eval)
}

fn cmd_eval(
    manifest: &Path,
    metric: &MetricArgs,
    alphas: Option<&[f64]>,
    out: &Path,
) -> anyhow::Result<u8> {
    let cfg = metric.config()?;
    let alpha_cfgs = alphas
        .unwrap_or_default()
        .iter()
        .map(|&a| {
            let c = cfg.clone().with_alpha(a);
            c.validate().map(|_| (a, c))
        })
        .collect::<sharpmark::Result<Vec<_>>>()?;
    let entries = read_manifest(manifest)?;
    if entries.len() < MIN_MANIFEST_ROWS {
        return Err(Error::Manifest {
            path: manifest.to_path_buf(),
            message: format!(
                "needs at least {MIN_MANIFEST_ROWS} images, lists {}",
                entries.len()
            ),
        }
        .into());
    }
    output_dir(out)?;

    let partial = if alphas.is_none() {
        let eval = evaluate(&entries, &cfg)?;
        write_report_csv(&eval.report, create(&out.join("report.csv"))?)?;
        write_per_image_csv(&eval.images, create(&out.join("per_image.csv"))?)?;
        !eval.skipped.is_empty()
    } else {
        let mut rows = Vec::new();
        let mut partial = false;
        for (alpha, c) in &alpha_cfgs {
            // One alpha whose scores all tie must not sink the whole sweep.
            let eval = match evaluate(&entries, c) {
                Err(e) if matches!(e.downcast_ref::<Error>(), Some(Error::Degenerate(_))) => {
                    eprintln!("alpha {alpha}: no report: {e:#}");
                    partial = true;
                    continue;
                }
                other => other?,
            };
            write_per_image_csv(
                &eval.images,
                create(&out.join(format!("per_image_alpha_{alpha}.csv")))?,
            )?;
            partial |= !eval.skipped.is_empty();
            rows.push((*alpha, eval.report));
        }
        write_alpha_sweep_csv(&rows, create(&out.join("report.csv"))?)?;
        partial
    };
    Ok(if partial { EXIT_PARTIAL } else { EXIT_OK })
}

fn cmd_aggregate(
    paths: &[PathBuf],
    weights: Option<&[u64]>,
    out: Option<&Path>,
) -> anyhow::Result<u8> {
    if let Some(w) = weights {
        if w.len() != paths.len() {
            bail!("{} weights given for {} reports", w.len(), paths.len());
        }
    }
    let mut weighted = Vec::new();
    for (i, path) in paths.iter().enumerate() {
        let file = File::open(path).with_context(|| format!("cannot read {}", path.display()))?;
        let reports =
            read_report_csv(file).with_context(|| format!("bad report {}", path.display()))?;
        if reports.is_empty() {
            bail!("{} contains no report rows", path.display());
        }
        for r in reports {
            let w = weights.map_or(r.n as u64, |w| w[i]);
            weighted.push((r, w));
        }
    }
    let summary = aggregate_reports(&weighted)?;
    match out {
        Some(dir) => {
            output_dir(dir)?;
            write_summary_csv(&summary, create(&dir.join("summary.csv"))?)?;
        }
        None => write_summary_csv(&summary, io::stdout().lock())?,
    }
    Ok(EXIT_OK)
}
