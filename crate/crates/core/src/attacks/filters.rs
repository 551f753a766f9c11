//! Neighbourhood filters and resampling used by the attack catalog. All
//! borders replicate the nearest edge pixel.

use crate::pixmap::Image;

fn neighbourhood(img: &Image, r: usize, c: usize) -> [f64; 9] {
    let mut out = [0.0; 9];
    let mut i = 0;
    for dr in -1..=1isize {
        for dc in -1..=1isize {
            out[i] = img.get_clamped(r as isize + dr, c as isize + dc);
            i += 1;
        }
    }
    out
}

fn map_neighbourhood(img: &Image, f: impl Fn([f64; 9]) -> f64) -> Image {
    Image::from_fn(img.width(), img.height(), |r, c| {
        f(neighbourhood(img, r, c))
    })
}

pub fn median3(img: &Image) -> Image {
    map_neighbourhood(img, |mut n| {
        n.sort_by(f64::total_cmp);
        n[4]
    })
}

pub fn mean3(img: &Image) -> Image {
    map_neighbourhood(img, |n| n.iter().sum::<f64>() / 9.0)
}

pub fn erode3(img: &Image) -> Image {
    map_neighbourhood(img, |n| n.into_iter().fold(f64::INFINITY, f64::min))
}

pub fn dilate3(img: &Image) -> Image {
    map_neighbourhood(img, |n| n.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// Normalized 3×3 Gaussian kernel, row-major.
pub fn gaussian_kernel3(sigma: f64) -> [f64; 9] {
    let mut k = [0.0; 9];
    for (i, v) in k.iter_mut().enumerate() {
        let (y, x) = ((i / 3) as f64 - 1.0, (i % 3) as f64 - 1.0);
        *v = (-(x * x + y * y) / (2.0 * sigma * sigma)).exp();
    }
    let sum: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= sum);
    k
}

pub fn gaussian3(img: &Image, sigma: f64) -> Image {
    let k = gaussian_kernel3(sigma);
    map_neighbourhood(img, |n| n.iter().zip(&k).map(|(a, b)| a * b).sum())
}

/// Unsharp mask `p + λ·(p − mean3(p))`.
pub fn unsharp(img: &Image, lambda: f64) -> Image {
    let blurred = mean3(img);
    Image::from_fn(img.width(), img.height(), |r, c| {
        let p = img.get(r, c);
        p + lambda * (p - blurred.get(r, c))
    })
}

/// Bilinear resampling with pixel-centre alignment: output pixel `x` samples
/// source coordinate `(x + 0.5) · src/dst − 0.5`, clamped to the frame. A
/// 2× reduction therefore averages each 2×2 block.
pub fn bilinear(img: &Image, width: usize, height: usize) -> Image {
    let sx = img.width() as f64 / width as f64;
    let sy = img.height() as f64 / height as f64;
    let coord = |x: usize, scale: f64, limit: usize| {
        let s = ((x as f64 + 0.5) * scale - 0.5).clamp(0.0, (limit - 1) as f64);
        let i0 = s.floor() as usize;
        let i1 = (i0 + 1).min(limit - 1);
        (i0, i1, s - i0 as f64)
    };
    Image::from_fn(width, height, |r, c| {
        let (r0, r1, fy) = coord(r, sy, img.height());
        let (c0, c1, fx) = coord(c, sx, img.width());
        let top = img.get(r0, c0) * (1.0 - fx) + img.get(r0, c1) * fx;
        let bottom = img.get(r1, c0) * (1.0 - fx) + img.get(r1, c1) * fx;
        top * (1.0 - fy) + bottom * fy
    })
}
