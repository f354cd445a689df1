use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use sharpmark::{Backend, GrayMode, SharpnessConfig};

#[derive(Debug, Parser)]
#[command(
    name = "sharpmark",
    version,
    about = "No-reference perceptual sharpness metric"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print `<path>\t<score>\t<backend>` for each image.
    Score {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        #[command(flatten)]
        metric: MetricArgs,
    },
    /// Write `<stem>.smap.pgm` and `<stem>.lbsmap.pgm` into the output directory.
    Map {
        path: PathBuf,
        #[command(flatten)]
        metric: MetricArgs,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Score an image under increasing Gaussian blur with both backends.
    Sweep {
        path: PathBuf,
        /// Comma-separated blur sigmas.
        #[arg(
            long,
            value_delimiter = ',',
            allow_negative_numbers = true,
            default_value = "0,0.5,1,2,4"
        )]
        sigmas: Vec<f64>,
        #[command(flatten)]
        metric: MetricArgs,
        /// Write `<stem>.sweep.csv` here instead of printing.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score a manifest and correlate against its subjective scores.
    Eval {
        manifest: PathBuf,
        #[command(flatten)]
        metric: MetricArgs,
        /// Repeat the evaluation for each alpha in this comma-separated list.
        #[arg(long, value_delimiter = ',', conflicts_with = "alpha")]
        alphas: Option<Vec<f64>>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Average several report CSVs, directly and weighted.
    Aggregate {
        #[arg(required = true)]
        reports: Vec<PathBuf>,
        /// One positive weight per report file; defaults to each report's `n`.
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<u64>>,
        /// Write `summary.csv` here instead of printing.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct MetricArgs {
    #[arg(long, default_value = "hpf")]
    pub backend: Backend,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Odd block size for the stimulus and contrast windows.
    #[arg(long)]
    pub block: Option<usize>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Frame cropped from the sharpness map; defaults to the block size.
    #[arg(long)]
    pub border: Option<usize>,
    #[arg(long, default_value = "single")]
    pub gray_mode: GrayMode,
}

impl MetricArgs {
    pub fn config(&self) -> sharpmark::Result<SharpnessConfig> {
        let defaults = SharpnessConfig::default();
        let cfg = SharpnessConfig {
            alpha: self.alpha.unwrap_or(defaults.alpha),
            block: self.block.unwrap_or(defaults.block),
            epsilon: self.epsilon.unwrap_or(defaults.epsilon),
            backend: self.backend,
            border: self.border,
            gray_mode: self.gray_mode,
            ..defaults
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
