//! Transparency, robustness and security measures.

use crate::error::{Error, Result};
use crate::pixmap::{quantize_sample, Image, Watermark, MARK_BITS};

const PEAK: f64 = 255.0;

fn same_dims(a: &Image, b: &Image) -> Result<()> {
    if a.same_dims(b) {
        Ok(())
    } else {
        Err(Error::Dimension(format!(
            "images differ in size: {}×{} vs {}×{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )))
    }
}

pub fn mse(a: &Image, b: &Image) -> Result<f64> {
    same_dims(a, b)?;
    let sum: f64 = a
        .pixels()
        .iter()
        .zip(b.pixels())
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    Ok(sum / a.len() as f64)
}

/// Peak signal-to-noise ratio in dB for 8-bit peak 255. Identical images
/// give `f64::INFINITY`.
pub fn psnr(a: &Image, b: &Image) -> Result<f64> {
    let e = mse(a, b)?;
    if e == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (PEAK * PEAK / e).log10())
}

const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;
const SSIM_K1: f64 = 0.01;
const SSIM_K2: f64 = 0.03;

fn gaussian_window() -> [f64; SSIM_WINDOW] {
    let mut w = [0.0; SSIM_WINDOW];
    let half = (SSIM_WINDOW / 2) as f64;
    for (i, v) in w.iter_mut().enumerate() {
        let x = i as f64 - half;
        *v = (-x * x / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
    }
    let sum: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= sum);
    w
}

/// Separable "valid" filtering of a `w × h` plane.
fn filter_valid(plane: &[f64], w: usize, h: usize, k: &[f64; SSIM_WINDOW]) -> Vec<f64> {
    let (ow, oh) = (w - SSIM_WINDOW + 1, h - SSIM_WINDOW + 1);
    let mut rows = vec![0.0; ow * h];
    for r in 0..h {
        let line = &plane[r * w..(r + 1) * w];
        for c in 0..ow {
            rows[r * ow + c] = k.iter().zip(&line[c..]).map(|(a, b)| a * b).sum();
        }
    }
    let mut out = vec![0.0; ow * oh];
    for r in 0..oh {
        for c in 0..ow {
            out[r * ow + c] = k
                .iter()
                .enumerate()
                .map(|(i, kv)| kv * rows[(r + i) * ow + c])
                .sum();
        }
    }
    out
}

/// Mean structural similarity over all 11×11 Gaussian windows (σ = 1.5)
/// that fit inside the frame, with K₁ = 0.01, K₂ = 0.03, range 255.
pub fn ssim(a: &Image, b: &Image) -> Result<f64> {
    same_dims(a, b)?;
    let (w, h) = (a.width(), a.height());
    if w < SSIM_WINDOW || h < SSIM_WINDOW {
        return Err(Error::Dimension(format!(
            "SSIM needs at least {SSIM_WINDOW}×{SSIM_WINDOW} pixels, got {w}×{h}"
        )));
    }
    let k = gaussian_window();
    let (x, y) = (a.pixels(), b.pixels());
    let xx: Vec<f64> = x.iter().map(|v| v * v).collect();
    let yy: Vec<f64> = y.iter().map(|v| v * v).collect();
    let xy: Vec<f64> = x.iter().zip(y).map(|(p, q)| p * q).collect();

    let mu_x = filter_valid(x, w, h, &k);
    let mu_y = filter_valid(y, w, h, &k);
    let e_xx = filter_valid(&xx, w, h, &k);
    let e_yy = filter_valid(&yy, w, h, &k);
    let e_xy = filter_valid(&xy, w, h, &k);

    let c1 = (SSIM_K1 * PEAK).powi(2);
    let c2 = (SSIM_K2 * PEAK).powi(2);
    let total: f64 = (0..mu_x.len())
        .map(|i| {
            let (mx, my) = (mu_x[i], mu_y[i]);
            let vx = e_xx[i] - mx * mx;
            let vy = e_yy[i] - my * my;
            let cov = e_xy[i] - mx * my;
            ((2.0 * mx * my + c1) * (2.0 * cov + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2))
        })
        .sum();
    let s = total / mu_x.len() as f64;
    debug_assert!((-1.0 - 1e-9..=1.0 + 1e-9).contains(&s), "ssim {s}");
    Ok(s.clamp(-1.0, 1.0))
}

/// Fraction of mismatched bits.
pub fn ber(truth: &Watermark, est: &Watermark) -> f64 {
    let wrong = truth
        .bits()
        .iter()
        .zip(est.bits())
        .filter(|(a, b)| a != b)
        .count();
    wrong as f64 / MARK_BITS as f64
}

/// Normalized cross-correlation `Σ t·e / √(Σt² · Σe²)`; for bipolar marks
/// this equals `1 − 2·ber`.
pub fn ncc(truth: &Watermark, est: &Watermark) -> f64 {
    let (mut te, mut tt, mut ee) = (0i64, 0i64, 0i64);
    for (&t, &e) in truth.bits().iter().zip(est.bits()) {
        let (t, e) = (t as i64, e as i64);
        te += t * e;
        tt += t * t;
        ee += e * e;
    }
    te as f64 / ((tt * ee) as f64).sqrt()
}

fn histogram(img: &Image) -> [u64; 256] {
    let mut h = [0u64; 256];
    for &v in img.pixels() {
        h[quantize_sample(v) as usize] += 1;
    }
    h
}

/// Relative frequencies with `eps` added to every bin, renormalized.
fn smoothed(counts: &[u64], n: f64, eps: f64) -> Vec<f64> {
    let norm = 1.0 + eps * counts.len() as f64;
    counts
        .iter()
        .map(|&c| (c as f64 / n + eps) / norm)
        .collect()
}

/// Kullback–Leibler divergence `D(P‖Q)` in nats between the gray-level
/// histograms of cover (P) and stego (Q).
///
/// Both histograms get `1 / (4·N)` added to every relative frequency
/// before renormalization, so `Q` never vanishes where `P` does not.
pub fn kl_security(cover: &Image, stego: &Image) -> Result<f64> {
    same_dims(cover, stego)?;
    let n = cover.len() as f64;
    let eps = 1.0 / (4.0 * n);
    let p = smoothed(&histogram(cover), n, eps);
    let q = smoothed(&histogram(stego), n, eps);
    let d: f64 = p
        .iter()
        .zip(&q)
        .filter(|(pi, _)| **pi > 0.0)
        .map(|(pi, qi)| pi * (pi / qi).ln())
        .sum();
    Ok(d.max(0.0))
}

/// Plug-in mutual information in nats between co-located gray levels.
///
/// No smoothing is applied: empty joint cells contribute nothing and a
/// non-empty cell always has non-empty marginals.
pub fn mutual_information(cover: &Image, stego: &Image) -> Result<f64> {
    same_dims(cover, stego)?;
    let n = cover.len() as f64;
    let mut joint = vec![0u64; 256 * 256];
    let mut px = [0u64; 256];
    let mut py = [0u64; 256];
    for (&a, &b) in cover.pixels().iter().zip(stego.pixels()) {
        let (i, j) = (quantize_sample(a) as usize, quantize_sample(b) as usize);
        joint[i * 256 + j] += 1;
        px[i] += 1;
        py[j] += 1;
    }
    let mut mi = 0.0;
    for i in 0..256 {
        for j in 0..256 {
            let c = joint[i * 256 + j];
            if c > 0 {
                let pxy = c as f64 / n;
                mi += pxy * (pxy * n * n / (px[i] as f64 * py[j] as f64)).ln();
            }
        }
    }
    Ok(mi.max(0.0))
}

/// Shannon entropy in nats of the gray-level histogram.
pub fn entropy(img: &Image) -> f64 {
    let n = img.len() as f64;
    histogram(img)
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Every metric for one (cover, stego, truth, estimate) case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsReport {
    pub psnr: f64,
    pub ssim: f64,
    pub ber: f64,
    pub ncc: f64,
    pub kl_security: f64,
    pub mutual_information: f64,
}

impl MetricsReport {
    pub fn compute(
        cover: &Image,
        stego: &Image,
        truth: &Watermark,
        est: &Watermark,
    ) -> Result<Self> {
        Ok(MetricsReport {
            psnr: psnr(cover, stego)?,
            ssim: ssim(cover, stego)?,
            ber: ber(truth, est),
            ncc: ncc(truth, est),
            kl_security: kl_security(cover, stego)?,
            mutual_information: mutual_information(cover, stego)?,
        })
    }
}
