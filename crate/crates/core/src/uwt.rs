//! Single-level undecimated (stationary) Haar wavelet transform.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::image::ImagePlane;

/// Haar analysis low-pass taps.
pub const HAAR_LOW: [f64; 2] = [FRAC_1_SQRT_2, FRAC_1_SQRT_2];
/// Haar analysis high-pass taps.
pub const HAAR_HIGH: [f64; 2] = [FRAC_1_SQRT_2, -FRAC_1_SQRT_2];

/// The four full-size subbands of one decomposition level.
///
/// `lh` is low-pass along rows and high-pass along columns (horizontal
/// detail), `hl` the transpose (vertical detail), `hh` high-pass in both
/// directions (diagonal detail).
#[derive(Clone, Debug, PartialEq)]
pub struct UwtSubbands {
    pub ll: ImagePlane,
    pub lh: ImagePlane,
    pub hl: ImagePlane,
    pub hh: ImagePlane,
}

#[derive(Clone, Copy)]
enum Axis {
    Rows,
    Cols,
}

#[derive(Clone, Copy)]
enum Band {
    Low,
    High,
}

// out(i) = f[0] x(i) + f[1] x(i - 1), indices wrapped modulo the length.
// Evaluated as (x(i) +/- x(i - 1)) / sqrt(2) so a constant offset cancels
// before the scaling.
fn filter_axis(img: &ImagePlane, band: Band, axis: Axis) -> ImagePlane {
    let (h, w) = img.dims();
    let mut out = Vec::with_capacity(h * w);
    for r in 0..h {
        for c in 0..w {
            let prev = match axis {
                Axis::Rows => img.get(r, (c + w - 1) % w),
                Axis::Cols => img.get((r + h - 1) % h, c),
            };
            let x = img.get(r, c);
            out.push(match band {
                Band::Low => FRAC_1_SQRT_2 * (x + prev),
                Band::High => FRAC_1_SQRT_2 * (x - prev),
            });
        }
    }
    ImagePlane::from_raw(h, w, out)
}

/// Level-1 stationary Haar decomposition with periodic extension. Rows are
/// filtered first, then columns; nothing is downsampled.
pub fn uwt_haar_level1(img: &ImagePlane) -> Result<UwtSubbands> {
    let (h, w) = img.dims();
    if h < 2 || w < 2 {
        return Err(Error::ImageTooSmall {
            height: h,
            width: w,
            reason: "the wavelet transform needs at least 2x2 samples".into(),
        });
    }
    let row_low = filter_axis(img, Band::Low, Axis::Rows);
    let row_high = filter_axis(img, Band::High, Axis::Rows);
    Ok(UwtSubbands {
        ll: filter_axis(&row_low, Band::Low, Axis::Cols),
        lh: filter_axis(&row_low, Band::High, Axis::Cols),
        hl: filter_axis(&row_high, Band::Low, Axis::Cols),
        hh: filter_axis(&row_high, Band::High, Axis::Cols),
    })
}

/// Only the diagonal subband; skips the three unused passes.
pub fn uwt_haar_diagonal(img: &ImagePlane) -> Result<ImagePlane> {
    let (h, w) = img.dims();
    if h < 2 || w < 2 {
        return Err(Error::ImageTooSmall {
            height: h,
            width: w,
            reason: "the wavelet transform needs at least 2x2 samples".into(),
        });
    }
    let row_high = filter_axis(img, Band::High, Axis::Rows);
    Ok(filter_axis(&row_high, Band::High, Axis::Cols))
}
