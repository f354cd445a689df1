//! Scores of one image over a ladder of Gaussian blur strengths.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fmt::sig6;
use crate::image::InputImage;
use crate::sharpness::{score, Backend, SharpnessConfig};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub sigma: f64,
    pub qs_hpf: f64,
    pub qs_uwt: f64,
}

/// Blurs the pristine image independently for every sigma and scores the
/// result with both backends. `cfg.backend` is ignored.
pub fn blur_sweep(
    img: &InputImage,
    sigmas: &[f64],
    cfg: &SharpnessConfig,
) -> Result<Vec<SweepRow>> {
    if let Some(s) = sigmas.iter().find(|s| !(**s >= 0.0 && s.is_finite())) {
        return Err(Error::InvalidParameter(format!(
            "blur sigma must be non-negative, got {s}"
        )));
    }
    cfg.validate()?;
    sigmas
        .par_iter()
        .map(|&sigma| {
            let blurred = crate::blur_image(img, sigma)?;
            let hpf = score(&blurred, &cfg.clone().with_backend(Backend::Hpf))?;
            let uwt = score(&blurred, &cfg.clone().with_backend(Backend::Uwt))?;
            Ok(SweepRow {
                sigma,
                qs_hpf: hpf,
                qs_uwt: uwt,
            })
        })
        .collect()
}

/// Writes `sigma,qs_hpf,qs_uwt`.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(["sigma", "qs_hpf", "qs_uwt"])?;
    for r in rows {
        w.write_record([sig6(r.sigma), sig6(r.qs_hpf), sig6(r.qs_uwt)])?;
    }
    w.flush()?;
    Ok(())
}
