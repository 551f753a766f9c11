//! Baseline JPEG distortion: 8×8 orthonormal DCT, quality-scaled luminance
//! quantization and reconstruction. Entropy coding is lossless and is
//! skipped.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::pixmap::{quantize_sample, Image};

const BLOCK: usize = 8;

/// Standard luminance quantization table (ITU-T T.81 Annex K), row-major.
pub const LUMINANCE_TABLE: [u16; 64] = [
    16, 11, 10, 16, 24, 40, 51, 61, //
    12, 12, 14, 19, 26, 58, 60, 55, //
    14, 13, 16, 24, 40, 57, 69, 56, //
    14, 17, 22, 29, 51, 87, 80, 62, //
    18, 22, 37, 56, 68, 109, 103, 77, //
    24, 35, 55, 64, 81, 104, 113, 92, //
    49, 64, 78, 87, 103, 121, 120, 101, //
    72, 92, 95, 98, 112, 100, 103, 99,
];

/// Luminance table scaled for `quality` in 1..=100.
pub fn quant_table(quality: u8) -> Result<[f64; 64]> {
    if !(1..=100).contains(&quality) {
        return Err(Error::Spec(format!(
            "JPEG quality must be in 1..=100, got {quality}"
        )));
    }
    let q = quality as f64;
    let scale = if quality < 50 {
        5000.0 / q
    } else {
        200.0 - 2.0 * q
    };
    let mut out = [0.0; 64];
    for (o, &base) in out.iter_mut().zip(LUMINANCE_TABLE.iter()) {
        *o = ((base as f64 * scale / 100.0).round()).max(1.0);
    }
    Ok(out)
}

/// `basis[u][x] = a(u) · cos((2x + 1)·u·π / 16)`.
fn dct_basis() -> [[f64; BLOCK]; BLOCK] {
    let mut b = [[0.0; BLOCK]; BLOCK];
    for (u, row) in b.iter_mut().enumerate() {
        let a = if u == 0 {
            (1.0 / 8.0f64).sqrt()
        } else {
            (2.0 / 8.0f64).sqrt()
        };
        for (x, v) in row.iter_mut().enumerate() {
            *v = a * ((2 * x + 1) as f64 * u as f64 * PI / 16.0).cos();
        }
    }
    b
}

/// Separable 2-D DCT-II (`inverse = false`) or DCT-III.
fn dct8x8(block: &[f64; 64], basis: &[[f64; BLOCK]; BLOCK], inverse: bool) -> [f64; 64] {
    let coeff = |i: usize, j: usize| if inverse { basis[j][i] } else { basis[i][j] };
    let mut tmp = [0.0; 64];
    for r in 0..BLOCK {
        for u in 0..BLOCK {
            tmp[r * BLOCK + u] = (0..BLOCK).map(|x| coeff(u, x) * block[r * BLOCK + x]).sum();
        }
    }
    let mut out = [0.0; 64];
    for v in 0..BLOCK {
        for c in 0..BLOCK {
            out[v * BLOCK + c] = (0..BLOCK).map(|y| coeff(v, y) * tmp[y * BLOCK + c]).sum();
        }
    }
    out
}

/// Compress and decompress `img` at `quality`. Output samples are rounded
/// 8-bit levels.
pub fn jpeg_codec(img: &Image, quality: u8) -> Result<Image> {
    let table = quant_table(quality)?;
    if !img.width().is_multiple_of(BLOCK) || !img.height().is_multiple_of(BLOCK) {
        return Err(Error::Dimension(format!(
            "JPEG needs dimensions divisible by 8, got {}×{}",
            img.width(),
            img.height()
        )));
    }
    let basis = dct_basis();
    let mut out = img.clone();
    for by in (0..img.height()).step_by(BLOCK) {
        for bx in (0..img.width()).step_by(BLOCK) {
            let mut block = [0.0; 64];
            for (i, v) in block.iter_mut().enumerate() {
                *v = img.get(by + i / BLOCK, bx + i % BLOCK) - 128.0;
            }
            let mut coeffs = dct8x8(&block, &basis, false);
            for (c, q) in coeffs.iter_mut().zip(&table) {
                *c = (*c / q).round() * q;
            }
            let rebuilt = dct8x8(&coeffs, &basis, true);
            for (i, v) in rebuilt.iter().enumerate() {
                out.set(
                    by + i / BLOCK,
                    bx + i % BLOCK,
                    quantize_sample(v + 128.0) as f64,
                );
            }
        }
    }
    Ok(out)
}
