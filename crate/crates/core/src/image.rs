//! Image planes, raster I/O and the RGB to YCbCr conversion.

use std::fs;
use std::io::Write;
use std::path::Path;

use image::{DynamicImage, ImageBuffer, Luma, Rgb};

use crate::error::{Error, Result};

/// A row-major grid of real samples.
///
/// Channel data lives in `[0, 1]`; filtered planes and sharpness maps may
/// leave that range but are always finite.
#[derive(Clone, Debug, PartialEq)]
pub struct ImagePlane {
    height: usize,
    width: usize,
    samples: Vec<f64>,
}

impl ImagePlane {
    pub fn new(height: usize, width: usize, samples: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::EmptyPlane { height, width });
        }
        if samples.len() != height * width {
            return Err(Error::SampleCount {
                height,
                width,
                expected: height * width,
                got: samples.len(),
            });
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self {
            height,
            width,
            samples,
        })
    }

    /// A plane where every sample equals `value`.
    pub fn filled(height: usize, width: usize, value: f64) -> Result<Self> {
        Self::new(height, width, vec![value; height * width])
    }

    /// Builds a plane by evaluating `f(row, col)` in row-major order.
    pub fn from_fn(
        height: usize,
        width: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut samples = Vec::with_capacity(height * width);
        for r in 0..height {
            for c in 0..width {
                samples.push(f(r, c));
            }
        }
        Self::new(height, width, samples)
    }

    /// Skips validation; callers guarantee shape and finiteness.
    pub(crate) fn from_raw(height: usize, width: usize, samples: Vec<f64>) -> Self {
        debug_assert_eq!(samples.len(), height * width);
        Self {
            height,
            width,
            samples,
        }
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    /// `(height, width)`
    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    #[inline]
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.samples[row * self.width + col]
    }

    /// Sample at `(row, col)` with coordinates clamped to the plane, i.e.
    /// replicate-edge extension.
    #[inline]
    pub fn get_clamped(&self, row: isize, col: isize) -> f64 {
        let r = row.clamp(0, self.height as isize - 1) as usize;
        let c = col.clamp(0, self.width as isize - 1) as usize;
        self.samples[r * self.width + c]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.samples[row * self.width..(row + 1) * self.width]
    }

    /// Applies `f` to every sample. `f` must keep samples finite.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_raw(
            self.height,
            self.width,
            self.samples.iter().map(|&v| f(v)).collect(),
        )
    }

    /// Combines two equally sized planes sample by sample.
    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.ensure_same_dims(other)?;
        Ok(Self::from_raw(
            self.height,
            self.width,
            self.samples
                .iter()
                .zip(&other.samples)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        ))
    }

    pub fn ensure_same_dims(&self, other: &Self) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::ShapeMismatch(self.dims(), other.dims()));
        }
        Ok(())
    }

    /// Sum in row-major order.
    pub fn sum(&self) -> f64 {
        self.samples.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.sum() / self.samples.len() as f64
    }

    pub fn max(&self) -> f64 {
        self.samples
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.samples.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// The `height x width` window whose top-left corner is `(top, left)`.
    pub fn crop(&self, top: usize, left: usize, height: usize, width: usize) -> Result<Self> {
        if top + height > self.height || left + width > self.width {
            return Err(Error::InvalidParameter(format!(
                "crop {height}x{width} at ({top},{left}) exceeds {}x{}",
                self.height, self.width
            )));
        }
        let mut samples = Vec::with_capacity(height * width);
        for r in top..top + height {
            let start = r * self.width + left;
            samples.extend_from_slice(&self.samples[start..start + width]);
        }
        Self::new(height, width, samples)
    }

    /// Min-max normalization to 8 bits: `round(255 (v - min) / (max - min))`,
    /// constant planes map to 0.
    pub fn to_u8_normalized(&self) -> Vec<u8> {
        let (lo, hi) = (self.min(), self.max());
        let range = hi - lo;
        self.samples
            .iter()
            .map(|&v| {
                if range > 0.0 {
                    (255.0 * (v - lo) / range).round().clamp(0.0, 255.0) as u8
                } else {
                    0
                }
            })
            .collect()
    }

    /// Writes the plane as a binary 8-bit PGM using [`Self::to_u8_normalized`].
    pub fn write_pgm(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut buf = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        buf.extend_from_slice(&self.to_u8_normalized());
        let mut file = fs::File::create(path)?;
        file.write_all(&buf)?;
        Ok(())
    }
}

/// Colour layout of a loaded raster.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ImageKind {
    Rgb,
    Gray,
}

/// A decoded raster scaled to `[0, 1]`: three planes for RGB, one for gray.
#[derive(Clone, Debug, PartialEq)]
pub struct InputImage {
    kind: ImageKind,
    planes: Vec<ImagePlane>,
}

impl InputImage {
    pub fn gray(plane: ImagePlane) -> Result<Self> {
        Self::validated(ImageKind::Gray, vec![plane])
    }

    pub fn rgb(r: ImagePlane, g: ImagePlane, b: ImagePlane) -> Result<Self> {
        Self::validated(ImageKind::Rgb, vec![r, g, b])
    }

    /// Rebuilds an image of the same kind from new planes, e.g. after blurring.
    pub fn with_planes(&self, planes: Vec<ImagePlane>) -> Result<Self> {
        Self::validated(self.kind, planes)
    }

    fn validated(kind: ImageKind, planes: Vec<ImagePlane>) -> Result<Self> {
        let expected = match kind {
            ImageKind::Rgb => 3,
            ImageKind::Gray => 1,
        };
        if planes.len() != expected {
            return Err(Error::InvalidParameter(format!(
                "{kind:?} image needs {expected} planes, got {}",
                planes.len()
            )));
        }
        for p in &planes[1..] {
            planes[0].ensure_same_dims(p)?;
        }
        for p in &planes {
            if p.samples().iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(Error::InvalidParameter(
                    "input samples must lie in [0, 1]".into(),
                ));
            }
        }
        Ok(Self { kind, planes })
    }

    pub fn kind(&self) -> ImageKind {
        self.kind
    }

    pub fn planes(&self) -> &[ImagePlane] {
        &self.planes
    }

    pub fn channel_count(&self) -> usize {
        self.planes.len()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.planes[0].dims()
    }

    pub fn height(&self) -> usize {
        self.planes[0].height()
    }

    pub fn width(&self) -> usize {
        self.planes[0].width()
    }

    /// Quantizes to 8 or 16 bits and writes a PNG.
    pub fn save_png(&self, path: impl AsRef<Path>, depth: BitDepth) -> Result<()> {
        let path = path.as_ref();
        let (h, w) = self.dims();
        let (wu, hu) = (w as u32, h as u32);
        let dynamic = match (self.kind, depth) {
            (ImageKind::Gray, BitDepth::Eight) => {
                let data = quantize::<u8>(self.planes[0].samples().iter().copied(), 255.0);
                DynamicImage::ImageLuma8(
                    ImageBuffer::<Luma<u8>, _>::from_raw(wu, hu, data).unwrap(),
                )
            }
            (ImageKind::Gray, BitDepth::Sixteen) => {
                let data = quantize::<u16>(self.planes[0].samples().iter().copied(), 65535.0);
                DynamicImage::ImageLuma16(
                    ImageBuffer::<Luma<u16>, _>::from_raw(wu, hu, data).unwrap(),
                )
            }
            (ImageKind::Rgb, BitDepth::Eight) => {
                let data = quantize::<u8>(self.interleaved(), 255.0);
                DynamicImage::ImageRgb8(ImageBuffer::<Rgb<u8>, _>::from_raw(wu, hu, data).unwrap())
            }
            (ImageKind::Rgb, BitDepth::Sixteen) => {
                let data = quantize::<u16>(self.interleaved(), 65535.0);
                DynamicImage::ImageRgb16(
                    ImageBuffer::<Rgb<u16>, _>::from_raw(wu, hu, data).unwrap(),
                )
            }
        };
        dynamic
            .save_with_format(path, image::ImageFormat::Png)
            .map_err(|source| Error::ImageRead {
                path: path.to_path_buf(),
                source,
            })
    }

    fn interleaved(&self) -> impl Iterator<Item = f64> + '_ {
        let [r, g, b] = [&self.planes[0], &self.planes[1], &self.planes[2]];
        (0..r.len()).flat_map(move |i| [r.samples()[i], g.samples()[i], b.samples()[i]])
    }
}

/// Sample depth for [`InputImage::save_png`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BitDepth {
    Eight,
    Sixteen,
}

fn quantize<T: TryFrom<u32>>(values: impl Iterator<Item = f64>, max: f64) -> Vec<T>
where
    T::Error: std::fmt::Debug,
{
    values
        .map(|v| T::try_from((v * max).round().clamp(0.0, max) as u32).unwrap())
        .collect()
}

/// Luma plus two chroma planes, all the same size.
#[derive(Clone, Debug, PartialEq)]
pub struct YCbCrImage {
    pub y: ImagePlane,
    pub cb: ImagePlane,
    pub cr: ImagePlane,
}

/// Decodes a PNG or binary PNM file and scales samples to `[0, 1]` by the
/// container maximum (255 or 65535). Alpha is dropped.
pub fn load_image(path: impl AsRef<Path>) -> Result<InputImage> {
    let path = path.as_ref();
    let decoded = image::ImageReader::open(path)
        .map_err(|e| Error::ImageRead {
            path: path.to_path_buf(),
            source: image::ImageError::IoError(e),
        })?
        .with_guessed_format()
        .map_err(|e| Error::ImageRead {
            path: path.to_path_buf(),
            source: image::ImageError::IoError(e),
        })?
        .decode()
        .map_err(|source| Error::ImageRead {
            path: path.to_path_buf(),
            source,
        })?;
    from_dynamic(decoded, path)
}

fn from_dynamic(img: DynamicImage, path: &Path) -> Result<InputImage> {
    let (w, h) = (img.width() as usize, img.height() as usize);
    match img {
        DynamicImage::ImageLuma8(buf) => gray_from(h, w, buf.as_raw(), 255.0),
        DynamicImage::ImageLumaA8(buf) => {
            let luma: Vec<u8> = buf.as_raw().chunks_exact(2).map(|p| p[0]).collect();
            gray_from(h, w, &luma, 255.0)
        }
        DynamicImage::ImageLuma16(buf) => gray_from(h, w, buf.as_raw(), 65535.0),
        DynamicImage::ImageLumaA16(buf) => {
            let luma: Vec<u16> = buf.as_raw().chunks_exact(2).map(|p| p[0]).collect();
            gray_from(h, w, &luma, 65535.0)
        }
        DynamicImage::ImageRgb8(buf) => rgb_from(h, w, buf.as_raw(), 3, 255.0),
        DynamicImage::ImageRgba8(buf) => rgb_from(h, w, buf.as_raw(), 4, 255.0),
        DynamicImage::ImageRgb16(buf) => rgb_from(h, w, buf.as_raw(), 3, 65535.0),
        DynamicImage::ImageRgba16(buf) => rgb_from(h, w, buf.as_raw(), 4, 65535.0),
        other => Err(Error::UnsupportedFormat {
            path: path.to_path_buf(),
            format: format!("{:?}", other.color()),
        }),
    }
}

fn gray_from<T: Copy + Into<f64>>(h: usize, w: usize, data: &[T], max: f64) -> Result<InputImage> {
    let plane = ImagePlane::new(h, w, data.iter().map(|&v| v.into() / max).collect())?;
    InputImage::gray(plane)
}

fn rgb_from<T: Copy + Into<f64>>(
    h: usize,
    w: usize,
    data: &[T],
    stride: usize,
    max: f64,
) -> Result<InputImage> {
    let channel = |k: usize| -> Result<ImagePlane> {
        ImagePlane::new(
            h,
            w,
            data.chunks_exact(stride)
                .map(|p| p[k].into() / max)
                .collect(),
        )
    };
    InputImage::rgb(channel(0)?, channel(1)?, channel(2)?)
}

/// Full-range BT.601 conversion with chroma offset by 0.5.
///
/// Gray inputs pass the plane through as luma with neutral (0.5) chroma.
pub fn to_ycbcr(img: &InputImage) -> YCbCrImage {
    let (h, w) = img.dims();
    match img.kind() {
        ImageKind::Gray => YCbCrImage {
            y: img.planes()[0].clone(),
            cb: ImagePlane::from_raw(h, w, vec![0.5; h * w]),
            cr: ImagePlane::from_raw(h, w, vec![0.5; h * w]),
        },
        ImageKind::Rgb => {
            let [r, g, b] = [&img.planes()[0], &img.planes()[1], &img.planes()[2]];
            let n = h * w;
            let mut y = Vec::with_capacity(n);
            let mut cb = Vec::with_capacity(n);
            let mut cr = Vec::with_capacity(n);
            for i in 0..n {
                let (rv, gv, bv) = (r.samples()[i], g.samples()[i], b.samples()[i]);
                y.push(0.299 * rv + 0.587 * gv + 0.114 * bv);
                cb.push(0.5 - 0.168736 * rv - 0.331264 * gv + 0.5 * bv);
                cr.push(0.5 + 0.5 * rv - 0.418688 * gv - 0.081312 * bv);
            }
            YCbCrImage {
                y: ImagePlane::from_raw(h, w, y),
                cb: ImagePlane::from_raw(h, w, cb),
                cr: ImagePlane::from_raw(h, w, cr),
            }
        }
    }
}
