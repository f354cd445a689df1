//! Brute-force reference implementations and fixtures shared by the
//! integration suites. Everything here is written from the definitions,
//! favouring obviousness over speed.
#![allow(dead_code)]

use std::path::PathBuf;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sharpmark::{ImagePlane, InputImage, Kernel2D};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub const NATURAL: [&str; 6] = ["astronaut", "brick", "camera", "chelsea", "coffee", "grass"];

pub fn natural(name: &str) -> InputImage {
    sharpmark::load_image(fixtures_dir().join(format!("natural/{name}.png"))).unwrap()
}

pub fn random_plane(rng: &mut impl Rng, h: usize, w: usize) -> ImagePlane {
    ImagePlane::from_fn(h, w, |_, _| rng.gen::<f64>()).unwrap()
}

/// Random plane with dimensions in `min..=max`.
pub fn random_sized_plane(rng: &mut impl Rng, min: usize, max: usize) -> ImagePlane {
    let h = rng.gen_range(min..=max);
    let w = rng.gen_range(min..=max);
    random_plane(rng, h, w)
}

fn clamped(img: &ImagePlane, r: isize, c: isize) -> f64 {
    let r = r.max(0).min(img.height() as isize - 1) as usize;
    let c = c.max(0).min(img.width() as isize - 1) as usize;
    img.samples()[r * img.width() + c]
}

fn window(img: &ImagePlane, i: usize, j: usize, n: usize) -> Vec<f64> {
    let r = (n / 2) as isize;
    let mut v = Vec::new();
    for di in -r..=r {
        for dj in -r..=r {
            v.push(clamped(img, i as isize + di, j as isize + dj));
        }
    }
    v
}

fn per_pixel(img: &ImagePlane, f: impl Fn(usize, usize) -> f64) -> Vec<f64> {
    let mut out = Vec::new();
    for i in 0..img.height() {
        for j in 0..img.width() {
            out.push(f(i, j));
        }
    }
    out
}

/// `out(i, j) = sum k(u, v) img(i + r - u, j + r - v)`, edges replicated.
pub fn convolve(img: &ImagePlane, k: &Kernel2D) -> Vec<f64> {
    let n = k.size();
    let r = (n / 2) as isize;
    per_pixel(img, |i, j| {
        let mut acc = 0.0;
        for u in 0..n {
            for v in 0..n {
                acc += k.tap(u, v)
                    * clamped(
                        img,
                        i as isize + r - u as isize,
                        j as isize + r - v as isize,
                    );
            }
        }
        acc
    })
}

pub fn local_std(img: &ImagePlane, b: usize) -> Vec<f64> {
    per_pixel(img, |i, j| {
        let v = window(img, i, j, b);
        let m = v.iter().sum::<f64>() / v.len() as f64;
        (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64).sqrt()
    })
}

pub fn block_mean(img: &ImagePlane, b: usize) -> Vec<f64> {
    let (h, w) = img.dims();
    per_pixel(img, |i, j| {
        let (r0, c0) = (i / b * b, j / b * b);
        let mut sum = 0.0;
        let mut count = 0;
        for r in r0..(r0 + b).min(h) {
            for c in c0..(c0 + b).min(w) {
                sum += img.get(r, c);
                count += 1;
            }
        }
        sum / count as f64
    })
}

pub fn median(img: &ImagePlane, n: usize) -> Vec<f64> {
    per_pixel(img, |i, j| {
        let mut v = window(img, i, j, n);
        v.sort_by(f64::total_cmp);
        v[v.len() / 2]
    })
}

/// Diagonal Haar detail with periodic wrap:
/// `(x[i,j] - x[i,j-1] - x[i-1,j] + x[i-1,j-1]) / 2`.
pub fn haar_hh(img: &ImagePlane) -> Vec<f64> {
    let (h, w) = img.dims();
    per_pixel(img, |i, j| {
        let (pi, pj) = ((i + h - 1) % h, (j + w - 1) % w);
        (img.get(i, j) - img.get(i, pj) - img.get(pi, j) + img.get(pi, pj)) / 2.0
    })
}

/// Doubled average rank: `2 * #smaller + #equal + 1` (self included in
/// `#equal`).
fn doubled_ranks(v: &[f64]) -> Vec<i128> {
    v.iter()
        .map(|x| {
            let less = v.iter().filter(|y| *y < x).count() as i128;
            let equal = v.iter().filter(|y| *y == x).count() as i128;
            2 * less + equal + 1
        })
        .collect()
}

/// Spearman's rho from the Pearson definition over exact integer moments.
/// `None` when either side is constant.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    let (a, b) = (doubled_ranks(x), doubled_ranks(y));
    let n = a.len() as i128;
    let mut moments = [0i128; 5];
    for (p, q) in a.iter().zip(&b) {
        moments[0] += p;
        moments[1] += q;
        moments[2] += p * p;
        moments[3] += q * q;
        moments[4] += p * q;
    }
    let [sa, sb, saa, sbb, sab] = moments;
    let va = n * saa - sa * sa;
    let vb = n * sbb - sb * sb;
    if va == 0 || vb == 0 {
        return None;
    }
    Some(((n * sab - sa * sb) as f64 / ((va as f64) * (vb as f64)).sqrt()).clamp(-1.0, 1.0))
}

/// `sum t (t - 1) / 2` over groups of equal values.
fn tied_pairs(v: &[f64]) -> i64 {
    let mut sorted = v.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut total = 0;
    let mut k = 0;
    while k < sorted.len() {
        let t = sorted[k..].iter().take_while(|x| **x == sorted[k]).count() as i64;
        total += t * (t - 1) / 2;
        k += t as usize;
    }
    total
}

fn sign(d: f64) -> i64 {
    (d > 0.0) as i64 - (d < 0.0) as i64
}

/// Kendall tau-b: `(C - D) / sqrt((n0 - n1)(n0 - n2))`.
pub fn kendall_tau_b(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len();
    let mut s = 0i64;
    for i in 0..n {
        for j in 0..n {
            if i < j {
                s += sign(x[i] - x[j]) * sign(y[i] - y[j]);
            }
        }
    }
    let n0 = (n * (n - 1) / 2) as i64;
    let denom = (((n0 - tied_pairs(x)) as f64) * ((n0 - tied_pairs(y)) as f64)).sqrt();
    (denom != 0.0).then(|| s as f64 / denom)
}

pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx.sqrt() * vy.sqrt())
}

pub fn root_mean_square_error(x: &[f64], y: &[f64]) -> f64 {
    let sse: f64 = x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum();
    (sse / x.len() as f64).sqrt()
}

/// Random sample vector of length 3..=8. With `ties`, values come from a
/// five-element set so repeats are common.
pub fn random_sample(rng: &mut impl Rng, n: usize, ties: bool) -> Vec<f64> {
    (0..n)
        .map(|_| {
            if ties {
                rng.gen_range(0..5) as f64
            } else {
                rng.gen_range(-1.0..1.0)
            }
        })
        .collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Proptest settings for integration targets, which have no `lib.rs` to
/// anchor a regression file next to.
pub fn cases(n: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config {
        cases: n,
        failure_persistence: None,
        ..Default::default()
    }
}
