use crate::error::{Error, Result};
use crate::image::ImagePlane;

/// Reported value for identical images.
pub const PSNR_CAP_DB: f64 = 99.0;

/// Peak signal-to-noise ratio for unit-peak samples, pooled over all planes
/// and capped at [`PSNR_CAP_DB`].
pub fn psnr(reference: &[ImagePlane], test: &[ImagePlane]) -> Result<f64> {
    if reference.len() != test.len() || reference.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "plane count mismatch: {} vs {}",
            reference.len(),
            test.len()
        )));
    }
    let mut sse = 0.0;
    let mut count = 0usize;
    for (r, t) in reference.iter().zip(test) {
        r.ensure_same_dims(t)?;
        sse += r
            .samples()
            .iter()
            .zip(t.samples())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>();
        count += r.len();
    }
    let mse = sse / count as f64;
    if mse == 0.0 {
        return Ok(PSNR_CAP_DB);
    }
    Ok((10.0 * (1.0 / mse).log10()).min(PSNR_CAP_DB))
}
