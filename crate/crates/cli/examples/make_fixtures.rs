//! Regenerates `fixtures/derived/` from `fixtures/natural/`.

use std::fs;
use std::path::PathBuf;

use sharpmark::{blur_image, load_image, BitDepth, ImagePlane};

const COMPOSITE_SOURCE: &str = "astronaut";
const COMPOSITE_SIGMA: f64 = 2.0;
const SWEEP_SOURCE: &str = "camera";
const SWEEP_SIGMAS: [f64; 7] = [0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0];

fn main() -> anyhow::Result<()> {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    let derived = root.join("derived");
    let sweep_dir = derived.join("sweep");
    fs::create_dir_all(&sweep_dir)?;

    // Left half sharp, right half blurred.
    let img = load_image(root.join(format!("natural/{COMPOSITE_SOURCE}.png")))?;
    let blurred = blur_image(&img, COMPOSITE_SIGMA)?;
    let (h, w) = img.dims();
    let planes = img
        .planes()
        .iter()
        .zip(blurred.planes())
        .map(|(sharp, soft)| {
            ImagePlane::from_fn(h, w, |r, c| {
                if c < w / 2 {
                    sharp.get(r, c)
                } else {
                    soft.get(r, c)
                }
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let composite = derived.join(format!("composite_{COMPOSITE_SOURCE}.png"));
    img.with_planes(planes)?
        .save_png(&composite, BitDepth::Eight)?;
    println!("wrote {}", composite.display());

    let img = load_image(root.join(format!("natural/{SWEEP_SOURCE}.png")))?;
    let mut manifest = String::from("path,subjective,group\n");
    for sigma in SWEEP_SIGMAS {
        let name = format!("{SWEEP_SOURCE}_s{:03}.png", (sigma * 100.0).round() as u32);
        blur_image(&img, sigma)?.save_png(sweep_dir.join(&name), BitDepth::Sixteen)?;
        manifest.push_str(&format!("{name},{},{SWEEP_SOURCE}\n", 0.0 - sigma));
    }
    fs::write(sweep_dir.join("manifest.csv"), manifest)?;
    println!("wrote {}", sweep_dir.display());
    Ok(())
}
