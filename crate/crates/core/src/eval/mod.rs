//! Validation of objective scores against subjective ratings.

pub mod logistic;
pub mod manifest;
pub mod psnr;
pub mod report;
pub mod stats;

pub use logistic::{fit_logistic5, LogisticFit, LogisticParams};
pub use manifest::{
    evaluate_entries, evaluate_manifest, read_manifest, write_per_image_csv, ManifestEntry,
    ManifestEvaluation, ScoredImage, SkippedImage,
};
pub use psnr::psnr;
pub use report::{
    aggregate_reports, correlate, evaluate_records, read_report_csv, write_alpha_sweep_csv,
    write_report_csv, write_summary_csv, AggregateSummary, CorrelationReport, EvalRecord,
    SummaryRow,
};
pub use stats::{average_ranks, krocc, plcc, rmse, srocc};
