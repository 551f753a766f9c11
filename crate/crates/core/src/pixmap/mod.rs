//! Grayscale images, bipolar watermarks and their netpbm representation.
//!
//! Intensities are kept as `f64` throughout the pipeline. Quantization to
//! 8 bits happens only when an image is written out or handed to an attack.

mod netpbm;

use rand::Rng;

use crate::error::{Error, Result};

pub use netpbm::{read_image, read_watermark, write_image, write_watermark};

/// Side length of the watermark.
pub const MARK_SIDE: usize = 16;
/// Number of bits carried by a watermark.
pub const MARK_BITS: usize = MARK_SIDE * MARK_SIDE;

/// Clamp to the 8-bit range.
#[inline]
pub fn clamp_sample(v: f64) -> f64 {
    v.clamp(0.0, 255.0)
}

/// Clamp to `[0, 255]` and round half-up to the nearest integer level.
#[inline]
pub fn quantize_sample(v: f64) -> u8 {
    (clamp_sample(v) + 0.5).floor() as u8
}

/// A row-major grayscale image with real-valued samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Image {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Dimension(format!(
                "image must be non-empty, got {width}×{height}"
            )));
        }
        if data.len() != width * height {
            return Err(Error::Dimension(format!(
                "{width}×{height} image needs {} samples, got {}",
                width * height,
                data.len()
            )));
        }
        Ok(Image {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        assert!(width > 0 && height > 0, "image must be non-empty");
        Image {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    /// Build an image by evaluating `f(row, col)` at every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(width > 0 && height > 0, "image must be non-empty");
        let mut data = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                data.push(f(r, c));
            }
        }
        Image {
            width,
            height,
            data,
        }
    }

    /// Build an image from 8-bit samples.
    pub fn from_u8(width: usize, height: usize, samples: &[u8]) -> Result<Self> {
        Image::new(width, height, samples.iter().map(|&s| s as f64).collect())
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn pixels(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn pixels_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_pixels(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, v: f64) {
        self.data[row * self.width + col] = v;
    }

    /// Sample with coordinates clamped into the frame (replicate borders).
    #[inline]
    pub fn get_clamped(&self, row: isize, col: isize) -> f64 {
        let r = row.clamp(0, self.height as isize - 1) as usize;
        let c = col.clamp(0, self.width as isize - 1) as usize;
        self.get(r, c)
    }

    pub fn same_dims(&self, other: &Image) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Image {
        Image {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Round every sample to the nearest 8-bit level, as a file write would.
    pub fn quantized(&self) -> Image {
        self.map(|v| quantize_sample(v) as f64)
    }

    pub fn to_u8(&self) -> Vec<u8> {
        self.data.iter().map(|&v| quantize_sample(v)).collect()
    }

    /// Whether the image can be decomposed `levels` times dyadically.
    pub fn supports_levels(&self, levels: usize) -> bool {
        let block = 1usize << levels;
        self.width.is_multiple_of(block) && self.height.is_multiple_of(block)
    }
}

/// A 16×16 watermark of bipolar bits (each entry is −1 or +1).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Watermark {
    bits: [i8; MARK_BITS],
}

impl Watermark {
    /// Build from 256 row-major entries, each of which must be ±1.
    pub fn from_bits(bits: &[i8]) -> Result<Self> {
        if bits.len() != MARK_BITS {
            return Err(Error::WatermarkSize {
                width: MARK_SIDE,
                height: bits.len() / MARK_SIDE,
            });
        }
        if let Some(bad) = bits.iter().find(|&&b| b != 1 && b != -1) {
            return Err(Error::Config(format!(
                "watermark entries must be ±1, found {bad}"
            )));
        }
        let mut out = [0i8; MARK_BITS];
        out.copy_from_slice(bits);
        Ok(Watermark { bits: out })
    }

    /// Build from a predicate: `true` becomes +1, `false` becomes −1.
    pub fn from_fn(mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut bits = [0i8; MARK_BITS];
        for r in 0..MARK_SIDE {
            for c in 0..MARK_SIDE {
                bits[r * MARK_SIDE + c] = if f(r, c) { 1 } else { -1 };
            }
        }
        Watermark { bits }
    }

    pub fn filled(bit: i8) -> Self {
        assert!(bit == 1 || bit == -1, "watermark bits are ±1");
        Watermark {
            bits: [bit; MARK_BITS],
        }
    }

    pub fn checkerboard() -> Self {
        Watermark::from_fn(|r, c| (r + c) % 2 == 0)
    }

    /// The block letter "M" used as the default mark.
    pub fn letter_m() -> Self {
        Watermark::from_fn(|r, c| {
            let stroke = (2..14).contains(&r) && matches!(c, 2 | 3 | 12 | 13);
            let diag = (2..8).contains(&r) && (c == r + 2 || c + r == 13);
            stroke || diag
        })
    }

    /// Uniformly random mark.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Watermark::from_fn(|_, _| rng.random::<bool>())
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> i8 {
        self.bits[row * MARK_SIDE + col]
    }

    #[inline]
    pub fn bits(&self) -> &[i8; MARK_BITS] {
        &self.bits
    }

    pub fn negated(&self) -> Self {
        let mut bits = self.bits;
        bits.iter_mut().for_each(|b| *b = -*b);
        Watermark { bits }
    }

    /// Bit carried by coefficient `(m, n)` of a subband: the mark tiled
    /// periodically over the subband.
    #[inline]
    pub fn tiled(&self, m: usize, n: usize) -> i8 {
        self.get(m % MARK_SIDE, n % MARK_SIDE)
    }
}

impl std::fmt::Debug for Watermark {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Watermark [")?;
        for r in 0..MARK_SIDE {
            let row: String = (0..MARK_SIDE)
                .map(|c| if self.get(r, c) > 0 { '#' } else { '.' })
                .collect();
            writeln!(f, "  {row}")?;
        }
        write!(f, "]")
    }
}
