use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::eval::logistic::{fit_logistic5, LogisticParams, MIN_POINTS};
use crate::eval::stats::{krocc, plcc, rmse, srocc};
use crate::fmt::sig6;

/// One objective/subjective pair.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalRecord {
    pub image_path: std::path::PathBuf,
    pub subjective: f64,
    pub objective: f64,
    pub group: Option<String>,
}

/// Correlation statistics of one evaluation run.
///
/// `srocc` and `krocc` are computed on the raw objective scores, `plcc` and
/// `rmse` on the logistic-mapped scores. Correlations keep their sign, so
/// a metric scored against DMOS comes out negative.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationReport {
    pub n: usize,
    pub srocc: f64,
    pub krocc: f64,
    pub plcc: f64,
    pub rmse: f64,
    pub logistic: LogisticParams,
    /// False when the logistic fit hit its iteration budget.
    pub fit_converged: bool,
}

pub const REPORT_HEADER: [&str; 10] = [
    "n", "srocc", "krocc", "plcc", "rmse", "b1", "b2", "b3", "b4", "b5",
];

/// Fits the logistic and computes the four statistics. Also returns the
/// mapped objective scores, in input order.
pub fn correlate(objective: &[f64], subjective: &[f64]) -> Result<(CorrelationReport, Vec<f64>)> {
    if objective.len() < MIN_POINTS {
        return Err(Error::Degenerate(format!(
            "need at least {MIN_POINTS} scored images, got {}",
            objective.len()
        )));
    }
    let fit = fit_logistic5(objective, subjective)?;
    let fitted = fit.params.apply(objective);
    let report = CorrelationReport {
        n: objective.len(),
        srocc: srocc(objective, subjective)?,
        krocc: krocc(objective, subjective)?,
        plcc: plcc(&fitted, subjective)?,
        rmse: rmse(&fitted, subjective)?,
        logistic: fit.params,
        fit_converged: fit.converged,
    };
    Ok((report, fitted))
}

/// [`correlate`] over a set of records.
pub fn evaluate_records(records: &[EvalRecord]) -> Result<(CorrelationReport, Vec<f64>)> {
    let objective: Vec<f64> = records.iter().map(|r| r.objective).collect();
    let subjective: Vec<f64> = records.iter().map(|r| r.subjective).collect();
    correlate(&objective, &subjective)
}

impl CorrelationReport {
    pub fn csv_fields(&self) -> Vec<String> {
        let b = self.logistic.to_array();
        let mut fields = vec![
            self.n.to_string(),
            sig6(self.srocc),
            sig6(self.krocc),
            sig6(self.plcc),
            sig6(self.rmse),
        ];
        fields.extend(b.iter().map(|&v| sig6(v)));
        fields
    }
}

/// Writes the single-row report CSV (`n,srocc,krocc,plcc,rmse,b1..b5`).
pub fn write_report_csv<W: Write>(report: &CorrelationReport, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(REPORT_HEADER)?;
    w.write_record(report.csv_fields())?;
    w.flush()?;
    Ok(())
}

/// Writes one report row per alpha: `alpha,n,srocc,krocc,plcc,rmse,b1..b5`.
pub fn write_alpha_sweep_csv<W: Write>(rows: &[(f64, CorrelationReport)], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let mut header = vec!["alpha"];
    header.extend(REPORT_HEADER);
    w.write_record(header)?;
    for (alpha, report) in rows {
        let mut fields = vec![sig6(*alpha)];
        fields.extend(report.csv_fields());
        w.write_record(fields)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads every row of a report CSV written by [`write_report_csv`].
pub fn read_report_csv<R: Read>(input: R) -> Result<Vec<CorrelationReport>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::InvalidParameter(format!("report CSV lacks a `{name}` column")))
    };
    let idx: Vec<usize> = REPORT_HEADER
        .iter()
        .map(|h| col(h))
        .collect::<Result<_>>()?;
    let mut reports = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let num = |k: usize| -> Result<f64> {
            let raw = row.get(idx[k]).unwrap_or("");
            raw.parse::<f64>().map_err(|_| {
                Error::InvalidParameter(format!("bad `{}` value `{raw}`", REPORT_HEADER[k]))
            })
        };
        let n_raw = row.get(idx[0]).unwrap_or("");
        let n = n_raw
            .parse::<usize>()
            .map_err(|_| Error::InvalidParameter(format!("bad `n` value `{n_raw}`")))?;
        reports.push(CorrelationReport {
            n,
            srocc: num(1)?,
            krocc: num(2)?,
            plcc: num(3)?,
            rmse: num(4)?,
            logistic: LogisticParams::from_array([num(5)?, num(6)?, num(7)?, num(8)?, num(9)?]),
            fit_converged: true,
        });
    }
    Ok(reports)
}

/// Averaged statistics across several reports.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SummaryRow {
    pub srocc: f64,
    pub krocc: f64,
    pub plcc: f64,
    pub rmse: f64,
}

/// Direct and weighted averages from [`aggregate_reports`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AggregateSummary {
    pub direct: SummaryRow,
    pub weighted: SummaryRow,
    pub reports: usize,
    pub total_weight: u64,
}

/// Plain and weight-proportional means of each statistic. Weights are
/// typically the number of relevant images per database.
pub fn aggregate_reports(reports: &[(CorrelationReport, u64)]) -> Result<AggregateSummary> {
    if reports.is_empty() {
        return Err(Error::InvalidParameter("nothing to aggregate".into()));
    }
    if reports.iter().any(|(_, w)| *w == 0) {
        return Err(Error::InvalidParameter(
            "aggregation weights must be positive".into(),
        ));
    }
    let total_weight: u64 = reports.iter().map(|(_, w)| w).sum();
    let k = reports.len() as f64;
    let tw = total_weight as f64;
    let avg = |stat: fn(&CorrelationReport) -> f64| -> (f64, f64) {
        let direct = reports.iter().map(|(r, _)| stat(r)).sum::<f64>() / k;
        let weighted = reports
            .iter()
            .map(|(r, w)| stat(r) * *w as f64)
            .sum::<f64>()
            / tw;
        (direct, weighted)
    };
    let (ds, ws) = avg(|r| r.srocc);
    let (dk, wk) = avg(|r| r.krocc);
    let (dp, wp) = avg(|r| r.plcc);
    let (dr, wr) = avg(|r| r.rmse);
    Ok(AggregateSummary {
        direct: SummaryRow {
            srocc: ds,
            krocc: dk,
            plcc: dp,
            rmse: dr,
        },
        weighted: SummaryRow {
            srocc: ws,
            krocc: wk,
            plcc: wp,
            rmse: wr,
        },
        reports: reports.len(),
        total_weight,
    })
}

/// Writes `summary,reports,weight,srocc,krocc,plcc,rmse` with a `direct`
/// and a `weighted` row.
pub fn write_summary_csv<W: Write>(summary: &AggregateSummary, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record([
        "summary", "reports", "weight", "srocc", "krocc", "plcc", "rmse",
    ])?;
    for (label, row) in [("direct", summary.direct), ("weighted", summary.weighted)] {
        w.write_record([
            label.to_string(),
            summary.reports.to_string(),
            summary.total_weight.to_string(),
            sig6(row.srocc),
            sig6(row.krocc),
            sig6(row.plcc),
            sig6(row.rmse),
        ])?;
    }
    w.flush()?;
    Ok(())
}
