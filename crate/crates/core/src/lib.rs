//! No-reference perceptual sharpness assessment.
//!
//! The metric filters each YCbCr channel for high-frequency content, weights
//! it by local standard deviation and condenses the result into a log-ratio
//! sharpness map; the maximum of that map (minus a border frame) is the
//! score. Higher is sharper, and a featureless image scores exactly 1.
//!
//! ```no_run
//! use sharpmark::{load_image, score_and_maps, SharpnessConfig};
//!
//! let img = load_image("photo.png")?;
//! let result = score_and_maps(&img, &SharpnessConfig::default())?;
//! println!("{}", result.score);
//! # Ok::<(), sharpmark::Error>(())
//! ```
//!
//! The [`eval`] module holds the statistics used to validate scores against
//! subjective ratings: rank correlations, a five-parameter logistic fit and
//! manifest-driven batch evaluation.

pub mod error;
pub mod eval;
pub mod filters;
pub mod fmt;
pub mod image;
pub mod sharpness;
pub mod sweep;
pub mod uwt;

pub use error::{Error, Result};
pub use filters::{gaussian_blur, Kernel2D};
pub use image::{load_image, to_ycbcr, BitDepth, ImageKind, ImagePlane, InputImage, YCbCrImage};
pub use sharpness::{score, score_and_maps, Backend, GrayMode, SharpnessConfig, SharpnessResult};
pub use sweep::{blur_sweep, SweepRow};
pub use uwt::{uwt_haar_level1, UwtSubbands};

/// Blurs every plane of `img` with [`gaussian_blur`]. Rounding overshoot is
/// clamped back into `[0, 1]`.
pub fn blur_image(img: &InputImage, sigma: f64) -> Result<InputImage> {
    let planes = img
        .planes()
        .iter()
        .map(|p| gaussian_blur(p, sigma).map(|b| b.map(|v| v.clamp(0.0, 1.0))))
        .collect::<Result<Vec<_>>>()?;
    img.with_planes(planes)
}
