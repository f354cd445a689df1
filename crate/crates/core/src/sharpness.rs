//! The sharpness metric: high-frequency stimulus weighted by local contrast,
//! turned into a log-ratio map whose maximum is the image score.
//!
//! Pipeline per channel `c` of the YCbCr image:
//!
//! ```text
//! H_c  = stimulus(I_c)                        high-pass or UWT diagonal
//! MH_c = |H_c - blockmean(H_c, b)|
//! S_c  = local_std(I_c, b)
//! T_c  = MH_c^alpha * S_c / (sum(S_c) + eps)
//! TS   = (mean_c T_c)^(1/alpha)
//! S    = |ln eps + eps| / |ln(TS + eps) + eps|
//! ```
//!
//! The score is the maximum of `S` after dropping a `border`-pixel frame.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::filters::{
    block_mean_nonoverlap, block_median_overlap, convolve2d, highpass_from_gaussian, local_std,
};
use crate::image::{to_ycbcr, ImageKind, ImagePlane, InputImage};
use crate::uwt::uwt_haar_diagonal;

/// Source of the high-frequency stimulus.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Backend {
    /// All-pass minus a small Gaussian.
    #[default]
    Hpf,
    /// Diagonal subband of a one-level stationary Haar transform.
    Uwt,
}

impl Backend {
    pub const ALL: [Backend; 2] = [Backend::Hpf, Backend::Uwt];

    pub fn as_str(self) -> &'static str {
        match self {
            Backend::Hpf => "hpf",
            Backend::Uwt => "uwt",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hpf" => Ok(Backend::Hpf),
            "uwt" => Ok(Backend::Uwt),
            other => Err(Error::InvalidParameter(format!(
                "unknown backend `{other}`"
            ))),
        }
    }
}

/// How a single-channel image forms the total stimulus.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum GrayMode {
    /// `TS = T_Y^(1/alpha)`
    #[default]
    Single,
    /// `TS = (T_Y / 3)^(1/alpha)`, as if the chroma channels were empty.
    Third,
}

impl FromStr for GrayMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "single" => Ok(GrayMode::Single),
            "third" => Ok(GrayMode::Third),
            other => Err(Error::InvalidParameter(format!(
                "unknown gray mode `{other}`"
            ))),
        }
    }
}

/// Parameters of the metric. The defaults are the published settings.
#[derive(Clone, Debug, PartialEq)]
pub struct SharpnessConfig {
    /// Stimulus exponent.
    pub alpha: f64,
    /// Block size for bias removal, local contrast and the median window.
    pub block: usize,
    /// Stabilizer inside the logarithms and divisions.
    pub epsilon: f64,
    pub backend: Backend,
    pub hpf_sigma: f64,
    pub hpf_size: usize,
    /// Width of the frame dropped from the raw map; `None` means `block`.
    pub border: Option<usize>,
    pub gray_mode: GrayMode,
}

impl Default for SharpnessConfig {
    fn default() -> Self {
        Self {
            alpha: 2.0,
            block: 7,
            epsilon: 1e-4,
            backend: Backend::Hpf,
            hpf_sigma: 0.25,
            hpf_size: 3,
            border: None,
            gray_mode: GrayMode::Single,
        }
    }
}

impl SharpnessConfig {
    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn border(&self) -> usize {
        self.border.unwrap_or(self.block)
    }

    /// Median window for the localized map: `block + 2`, bumped to the next
    /// odd size if needed.
    pub fn median_window(&self) -> usize {
        let n = self.block + 2;
        if n.is_multiple_of(2) {
            n + 1
        } else {
            n
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be positive, got {}", self.alpha));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if self.block < 3 || self.block.is_multiple_of(2) {
            return bad(format!("block must be odd and >= 3, got {}", self.block));
        }
        if self.hpf_size.is_multiple_of(2) {
            return bad(format!("hpf size must be odd, got {}", self.hpf_size));
        }
        if !(self.hpf_sigma > 0.0 && self.hpf_sigma.is_finite()) {
            return bad(format!(
                "hpf sigma must be positive, got {}",
                self.hpf_sigma
            ));
        }
        Ok(())
    }
}

/// Output of [`score_and_maps`].
#[derive(Clone, Debug, PartialEq)]
pub struct SharpnessResult {
    /// Maximum of `bs_map`.
    pub score: f64,
    /// Full-size raw map.
    pub s_map: ImagePlane,
    /// `s_map` without its border frame.
    pub bs_map: ImagePlane,
    /// Median-smoothed, exponentiated map for display.
    pub lbs_map: ImagePlane,
    /// `(max + eps) / (mean + eps)` of `bs_map`.
    pub gamma: f64,
}

/// High-frequency content of one channel.
pub fn stimulus(channel: &ImagePlane, cfg: &SharpnessConfig) -> Result<ImagePlane> {
    match cfg.backend {
        Backend::Hpf => convolve2d(
            channel,
            &highpass_from_gaussian(cfg.hpf_size, cfg.hpf_sigma)?,
        ),
        Backend::Uwt => uwt_haar_diagonal(channel),
    }
}

/// `|h - blockmean(h, b)|`
pub fn mean_bias_removal(h: &ImagePlane, b: usize) -> Result<ImagePlane> {
    let means = block_mean_nonoverlap(h, b)?;
    h.zip_map(&means, |v, m| (v - m).abs())
}

/// `mh^alpha * s / (sum(s) + eps)`
pub fn weighted_channel(
    mh: &ImagePlane,
    s: &ImagePlane,
    cfg: &SharpnessConfig,
) -> Result<ImagePlane> {
    let norm = s.sum() + cfg.epsilon;
    let alpha = cfg.alpha;
    mh.zip_map(s, |m, sd| m.powf(alpha) * sd / norm)
}

/// Channel-averaged total stimulus. `weighted` holds one plane (gray) or
/// three (Y, Cb, Cr).
pub fn total_stimulus(weighted: &[ImagePlane], cfg: &SharpnessConfig) -> Result<ImagePlane> {
    let divisor = match weighted.len() {
        3 => 3.0,
        1 => match cfg.gray_mode {
            GrayMode::Single => 1.0,
            GrayMode::Third => 3.0,
        },
        n => {
            return Err(Error::InvalidParameter(format!(
                "total stimulus needs 1 or 3 channels, got {n}"
            )))
        }
    };
    let first = &weighted[0];
    for p in &weighted[1..] {
        first.ensure_same_dims(p)?;
    }
    let root = 1.0 / cfg.alpha;
    let samples = (0..first.len())
        .map(|i| {
            let sum: f64 = weighted.iter().map(|p| p.samples()[i]).sum();
            (sum / divisor).powf(root)
        })
        .collect();
    ImagePlane::new(first.height(), first.width(), samples)
}

/// Log-ratio sharpness map. Equals 1 where the stimulus is zero and grows
/// as `ts + eps` approaches `exp(-eps)`.
pub fn raw_map(ts: &ImagePlane, cfg: &SharpnessConfig) -> ImagePlane {
    let eps = cfg.epsilon;
    let numerator = (eps.ln() + eps).abs();
    // The denominator vanishes only at ts + eps == exp(-eps); the floor keeps
    // the map finite there.
    let floor = eps * eps;
    ts.map(|t| numerator / ((t + eps).ln() + eps).abs().max(floor))
}

/// Per-channel weighted stimulus planes for `img`.
fn weighted_planes(img: &InputImage, cfg: &SharpnessConfig) -> Result<Vec<ImagePlane>> {
    let ycc = to_ycbcr(img);
    let channels: Vec<&ImagePlane> = match img.kind() {
        ImageKind::Gray => vec![&ycc.y],
        ImageKind::Rgb => vec![&ycc.y, &ycc.cb, &ycc.cr],
    };
    channels
        .into_iter()
        .map(|ch| {
            let mh = mean_bias_removal(&stimulus(ch, cfg)?, cfg.block)?;
            let s = local_std(ch, cfg.block)?;
            weighted_channel(&mh, &s, cfg)
        })
        .collect()
}

/// Total stimulus plane `TS` for a whole image.
pub fn total_stimulus_map(img: &InputImage, cfg: &SharpnessConfig) -> Result<ImagePlane> {
    cfg.validate()?;
    total_stimulus(&weighted_planes(img, cfg)?, cfg)
}

/// Drops a `border`-pixel frame from every side.
pub fn crop_border(map: &ImagePlane, border: usize) -> Result<ImagePlane> {
    let (h, w) = map.dims();
    if h <= 2 * border || w <= 2 * border {
        return Err(Error::ImageTooSmall {
            height: h,
            width: w,
            reason: format!("nothing left after removing a {border}-pixel border"),
        });
    }
    map.crop(border, border, h - 2 * border, w - 2 * border)
}

// exp() of anything larger overflows f64.
const MAX_EXP_ARG: f64 = 709.0;

/// Returns `(gamma, lbs_map)` for a cropped map.
pub fn localized_map(bs_map: &ImagePlane, cfg: &SharpnessConfig) -> Result<(f64, ImagePlane)> {
    let eps = cfg.epsilon;
    let gamma = (bs_map.max() + eps) / (bs_map.mean() + eps);
    let median = block_median_overlap(bs_map, cfg.median_window())?;
    Ok((gamma, median.map(|m| (gamma * m).min(MAX_EXP_ARG).exp())))
}

/// Runs the full metric on one image.
pub fn score_and_maps(img: &InputImage, cfg: &SharpnessConfig) -> Result<SharpnessResult> {
    cfg.validate()?;
    let (h, w) = img.dims();
    let border = cfg.border();
    let min_side = 2 * border + 2;
    if h <= min_side || w <= min_side {
        return Err(Error::ImageTooSmall {
            height: h,
            width: w,
            reason: format!("both sides must exceed {min_side} for border {border}"),
        });
    }
    let ts = total_stimulus(&weighted_planes(img, cfg)?, cfg)?;
    let s_map = raw_map(&ts, cfg);
    let bs_map = crop_border(&s_map, border)?;
    let score = bs_map.max();
    let (gamma, lbs_map) = localized_map(&bs_map, cfg)?;
    Ok(SharpnessResult {
        score,
        s_map,
        bs_map,
        lbs_map,
        gamma,
    })
}

/// Just the scalar score.
pub fn score(img: &InputImage, cfg: &SharpnessConfig) -> Result<f64> {
    score_and_maps(img, cfg).map(|r| r.score)
}
