//! Spatial kernels and windowed statistics.
//!
//! Every windowed operation extends the plane by replicating its edge
//! samples and returns a plane of the input's size. Rows are processed in
//! parallel, but each output sample is accumulated in a fixed row-major tap
//! order, so results do not depend on the thread count.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::ImagePlane;

/// Square convolution kernel with odd side length.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel2D {
    size: usize,
    taps: Vec<f64>,
}

impl Kernel2D {
    pub fn new(size: usize, taps: Vec<f64>) -> Result<Self> {
        if size.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "kernel size must be odd, got {size}"
            )));
        }
        if taps.len() != size * size {
            return Err(Error::InvalidParameter(format!(
                "kernel of size {size} needs {} taps, got {}",
                size * size,
                taps.len()
            )));
        }
        if taps.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidParameter("kernel taps must be finite".into()));
        }
        Ok(Self { size, taps })
    }

    /// The 1x1 kernel `{1}`.
    pub fn identity() -> Self {
        Self {
            size: 1,
            taps: vec![1.0],
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn radius(&self) -> usize {
        self.size / 2
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    #[inline]
    pub fn tap(&self, row: usize, col: usize) -> f64 {
        self.taps[row * self.size + col]
    }

    pub fn sum(&self) -> f64 {
        self.taps.iter().sum()
    }
}

fn check_gaussian_params(size: usize, sigma: f64) -> Result<()> {
    if size.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "kernel size must be odd, got {size}"
        )));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "sigma must be positive and finite, got {sigma}"
        )));
    }
    Ok(())
}

/// Normalized `size x size` Gaussian sampled on the integer grid.
pub fn gaussian_kernel(size: usize, sigma: f64) -> Result<Kernel2D> {
    check_gaussian_params(size, sigma)?;
    let r = (size / 2) as isize;
    let denom = 2.0 * sigma * sigma;
    let mut taps = Vec::with_capacity(size * size);
    for y in -r..=r {
        for x in -r..=r {
            taps.push((-((x * x + y * y) as f64) / denom).exp());
        }
    }
    let total: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= total);
    Kernel2D::new(size, taps)
}

/// All-pass minus Gaussian: `delta - gaussian_kernel(size, sigma)`.
pub fn highpass_from_gaussian(size: usize, sigma: f64) -> Result<Kernel2D> {
    let mut k = gaussian_kernel(size, sigma)?;
    let center = k.taps.len() / 2;
    for (i, t) in k.taps.iter_mut().enumerate() {
        *t = if i == center { 1.0 - *t } else { -*t };
    }
    Ok(k)
}

/// Copy of `img` extended by `pad` replicated samples on every side.
fn replicate_pad(img: &ImagePlane, pad: usize) -> (Vec<f64>, usize) {
    let pw = img.width() + 2 * pad;
    let ph = img.height() + 2 * pad;
    let mut out = Vec::with_capacity(ph * pw);
    for r in 0..ph {
        let src = img.row((r as isize - pad as isize).clamp(0, img.height() as isize - 1) as usize);
        let (first, last) = (src[0], src[src.len() - 1]);
        out.extend(std::iter::repeat_n(first, pad));
        out.extend_from_slice(src);
        out.extend(std::iter::repeat_n(last, pad));
    }
    (out, pw)
}

/// Same-size 2-D convolution (kernel flipped) with replicate-edge padding.
///
/// Kernels wider than `2 min(h, w) + 1` are rejected.
pub fn convolve2d(img: &ImagePlane, kernel: &Kernel2D) -> Result<ImagePlane> {
    let limit = 2 * img.height().min(img.width()) + 1;
    if kernel.size() > limit {
        return Err(Error::InvalidParameter(format!(
            "kernel size {} exceeds {limit} for a {}x{} plane",
            kernel.size(),
            img.height(),
            img.width()
        )));
    }
    Ok(convolve_replicate(img, kernel))
}

pub(crate) fn convolve_replicate(img: &ImagePlane, kernel: &Kernel2D) -> ImagePlane {
    let (h, w) = img.dims();
    let n = kernel.size();
    let r = kernel.radius();
    let (padded, pw) = replicate_pad(img, r);
    let mut out = vec![0.0; h * w];
    out.par_chunks_mut(w).enumerate().for_each(|(i, row)| {
        for (j, dst) in row.iter_mut().enumerate() {
            let mut acc = 0.0;
            for u in 0..n {
                // Padded row of input row i + r - u.
                let base = (i + 2 * r - u) * pw + j + 2 * r;
                for v in 0..n {
                    acc += kernel.tap(u, v) * padded[base - v];
                }
            }
            *dst = acc;
        }
    });
    ImagePlane::from_raw(h, w, out)
}

/// Kernel side length used by [`gaussian_blur`]: `2 ceil(3 sigma) + 1`.
pub fn blur_kernel_size(sigma: f64) -> usize {
    2 * (3.0 * sigma).ceil() as usize + 1
}

/// Gaussian blur truncated at 3 sigma; `sigma == 0` returns a copy.
pub fn gaussian_blur(img: &ImagePlane, sigma: f64) -> Result<ImagePlane> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "blur sigma must be finite and non-negative, got {sigma}"
        )));
    }
    if sigma == 0.0 {
        return Ok(img.clone());
    }
    let kernel = gaussian_kernel(blur_kernel_size(sigma), sigma)?;
    Ok(convolve_replicate(img, &kernel))
}

/// Tiles the plane into `b x b` blocks and replaces every sample by the mean
/// of its block. Partial blocks at the right and bottom edges average over
/// the pixels they actually contain.
pub fn block_mean_nonoverlap(img: &ImagePlane, b: usize) -> Result<ImagePlane> {
    if b == 0 {
        return Err(Error::InvalidParameter("block size must be >= 1".into()));
    }
    let (h, w) = img.dims();
    let mut out = vec![0.0; h * w];
    for top in (0..h).step_by(b) {
        let bottom = (top + b).min(h);
        for left in (0..w).step_by(b) {
            let right = (left + b).min(w);
            let mut acc = 0.0;
            for r in top..bottom {
                for c in left..right {
                    acc += img.get(r, c);
                }
            }
            let mean = acc / ((bottom - top) * (right - left)) as f64;
            for r in top..bottom {
                out[r * w + left..r * w + right].fill(mean);
            }
        }
    }
    Ok(ImagePlane::from_raw(h, w, out))
}

fn check_odd_window(b: usize) -> Result<()> {
    if b == 0 || b.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "window size must be odd and >= 1, got {b}"
        )));
    }
    Ok(())
}

/// Population standard deviation over the centred `b x b` window.
pub fn local_std(img: &ImagePlane, b: usize) -> Result<ImagePlane> {
    check_odd_window(b)?;
    let (h, w) = img.dims();
    let r = b / 2;
    let (padded, pw) = replicate_pad(img, r);
    let count = (b * b) as f64;
    let mut out = vec![0.0; h * w];
    out.par_chunks_mut(w).enumerate().for_each(|(i, row)| {
        for (j, dst) in row.iter_mut().enumerate() {
            let padded = &padded;
            let window =
                || (0..b).flat_map(move |u| padded[(i + u) * pw + j..(i + u) * pw + j + b].iter());
            // Two passes over samples shifted by the window's first value, so
            // a flat window gives exactly zero.
            let shift = padded[i * pw + j];
            let mean = window().map(|&x| x - shift).sum::<f64>() / count;
            let var = window()
                .map(|&x| {
                    let d = x - shift - mean;
                    d * d
                })
                .sum::<f64>()
                / count;
            *dst = var.sqrt();
        }
    });
    Ok(ImagePlane::from_raw(h, w, out))
}

/// Median over the centred `n x n` window.
pub fn block_median_overlap(img: &ImagePlane, n: usize) -> Result<ImagePlane> {
    check_odd_window(n)?;
    let (h, w) = img.dims();
    let r = n / 2;
    let (padded, pw) = replicate_pad(img, r);
    let mid = n * n / 2;
    let mut out = vec![0.0; h * w];
    out.par_chunks_mut(w).enumerate().for_each(|(i, row)| {
        let mut window = Vec::with_capacity(n * n);
        for (j, dst) in row.iter_mut().enumerate() {
            window.clear();
            for u in 0..n {
                let start = (i + u) * pw + j;
                window.extend_from_slice(&padded[start..start + n]);
            }
            let (_, median, _) = window.select_nth_unstable_by(mid, f64::total_cmp);
            *dst = *median;
        }
    });
    Ok(ImagePlane::from_raw(h, w, out))
}
