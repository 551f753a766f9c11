//! Orthogonal 2-D Daubechies-2 wavelet transform with periodic extension.
//!
//! Analysis filters each line with `y[k] = Σ_j f[j] · x[(2k − j) mod N]`,
//! i.e. circular convolution followed by keeping the even-indexed outputs.
//! Synthesis is the exact transpose, so `idwt2(dwt2(x)) == x` up to
//! rounding for any even line length, including lengths shorter than the
//! filter (the taps then wrap around).

use std::fmt;

use crate::error::{Error, Result};
use crate::pixmap::Image;

/// Detail subband orientation.
///
/// `Horizontal` responds to horizontal edges: low-pass along rows,
/// high-pass along columns. `Vertical` is the transpose, `Diagonal` is
/// high-pass in both directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Orientation {
    Horizontal,
    Vertical,
    Diagonal,
}

impl Orientation {
    pub const ALL: [Orientation; 3] = [
        Orientation::Horizontal,
        Orientation::Vertical,
        Orientation::Diagonal,
    ];

    pub fn letter(self) -> char {
        match self {
            Orientation::Horizontal => 'h',
            Orientation::Vertical => 'v',
            Orientation::Diagonal => 'd',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c.to_ascii_lowercase() {
            'h' => Some(Orientation::Horizontal),
            'v' => Some(Orientation::Vertical),
            'd' => Some(Orientation::Diagonal),
            _ => None,
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// Identifies one detail subband: orientation plus level (1 is finest).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubbandId {
    pub level: usize,
    pub orientation: Orientation,
}

impl SubbandId {
    pub fn new(orientation: Orientation, level: usize) -> Self {
        SubbandId { level, orientation }
    }

    /// All `3 · levels` detail subbands, finest level first.
    pub fn all(levels: usize) -> impl Iterator<Item = SubbandId> {
        (1..=levels).flat_map(|l| {
            Orientation::ALL
                .into_iter()
                .map(move |o| SubbandId::new(o, l))
        })
    }
}

impl fmt::Display for SubbandId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.orientation.letter(), self.level)
    }
}

impl std::str::FromStr for SubbandId {
    type Err = Error;

    /// Parses names such as `h2` or `d1`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut chars = s.chars();
        let orientation = chars
            .next()
            .and_then(Orientation::from_letter)
            .ok_or_else(|| Error::Structure(format!("bad subband name {s:?}")))?;
        let level: usize = chars
            .as_str()
            .parse()
            .map_err(|_| Error::Structure(format!("bad subband level in {s:?}")))?;
        if level == 0 {
            return Err(Error::Structure(format!(
                "subband levels start at 1: {s:?}"
            )));
        }
        Ok(SubbandId::new(orientation, level))
    }
}

/// Dense row-major matrix of transform coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Structure(format!(
                "{rows}×{cols} matrix needs {} values, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Largest absolute value, 0 for an empty or all-zero matrix.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn scale(&mut self, k: f64) {
        self.data.iter_mut().for_each(|v| *v *= k);
    }
}

/// Analysis low-pass / high-pass pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterPair {
    pub lowpass: [f64; 4],
    pub highpass: [f64; 4],
}

/// The 4-tap Daubechies filters; the high-pass is the quadrature mirror
/// `g[k] = (−1)^k · h[3 − k]`.
pub fn db2_filters() -> FilterPair {
    let s3 = 3f64.sqrt();
    let norm = 4.0 * 2f64.sqrt();
    let lowpass = [
        (1.0 + s3) / norm,
        (3.0 + s3) / norm,
        (3.0 - s3) / norm,
        (1.0 - s3) / norm,
    ];
    let mut highpass = [0.0; 4];
    for (k, g) in highpass.iter_mut().enumerate() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        *g = sign * lowpass[3 - k];
    }
    FilterPair { lowpass, highpass }
}

/// One analysis step on a line of even length `n`, writing `n/2` low-pass
/// outputs to `lo` and `n/2` high-pass outputs to `hi`.
fn analyze_line(fb: &FilterPair, x: &[f64], lo: &mut [f64], hi: &mut [f64]) {
    let n = x.len();
    for k in 0..n / 2 {
        let (mut a, mut d) = (0.0, 0.0);
        for j in 0..4 {
            let idx = (2 * k + n * 4 - j) % n;
            a += fb.lowpass[j] * x[idx];
            d += fb.highpass[j] * x[idx];
        }
        lo[k] = a;
        hi[k] = d;
    }
}

/// Transpose of [`analyze_line`]: rebuilds a line of length `2 · lo.len()`.
fn synthesize_line(fb: &FilterPair, lo: &[f64], hi: &[f64], x: &mut [f64]) {
    let n = x.len();
    x.iter_mut().for_each(|v| *v = 0.0);
    for k in 0..n / 2 {
        for j in 0..4 {
            let idx = (2 * k + n * 4 - j) % n;
            x[idx] += fb.lowpass[j] * lo[k] + fb.highpass[j] * hi[k];
        }
    }
}

/// One 2-D analysis level: returns (LL, h, v, d).
fn analyze_2d(fb: &FilterPair, input: &Matrix) -> [Matrix; 4] {
    let (rows, cols) = (input.rows, input.cols);
    let (hr, hc) = (rows / 2, cols / 2);

    // Filter along rows: each row splits into low and high halves.
    let mut row_lo = Matrix::zeros(rows, hc);
    let mut row_hi = Matrix::zeros(rows, hc);
    for r in 0..rows {
        let line = &input.data[r * cols..(r + 1) * cols];
        analyze_line(
            fb,
            line,
            &mut row_lo.data[r * hc..(r + 1) * hc],
            &mut row_hi.data[r * hc..(r + 1) * hc],
        );
    }

    // Filter along columns.
    let mut out = [
        Matrix::zeros(hr, hc),
        Matrix::zeros(hr, hc),
        Matrix::zeros(hr, hc),
        Matrix::zeros(hr, hc),
    ];
    let mut column = vec![0.0; rows];
    let mut lo = vec![0.0; hr];
    let mut hi = vec![0.0; hr];
    for (src, lo_dst, hi_dst) in [(&row_lo, 0, 1), (&row_hi, 2, 3)] {
        for c in 0..hc {
            for (r, v) in column.iter_mut().enumerate() {
                *v = src.get(r, c);
            }
            analyze_line(fb, &column, &mut lo, &mut hi);
            for r in 0..hr {
                out[lo_dst].set(r, c, lo[r]);
                out[hi_dst].set(r, c, hi[r]);
            }
        }
    }
    // out = [LL, row-low/col-high (h), row-high/col-low (v), HH]
    out
}

fn synthesize_2d(fb: &FilterPair, ll: &Matrix, h: &Matrix, v: &Matrix, d: &Matrix) -> Matrix {
    let (hr, hc) = (ll.rows, ll.cols);
    let (rows, cols) = (hr * 2, hc * 2);

    let mut row_lo = Matrix::zeros(rows, hc);
    let mut row_hi = Matrix::zeros(rows, hc);
    let mut column = vec![0.0; rows];
    let mut lo = vec![0.0; hr];
    let mut hi = vec![0.0; hr];
    for (dst, lo_src, hi_src) in [(&mut row_lo, ll, h), (&mut row_hi, v, d)] {
        for c in 0..hc {
            for r in 0..hr {
                lo[r] = lo_src.get(r, c);
                hi[r] = hi_src.get(r, c);
            }
            synthesize_line(fb, &lo, &hi, &mut column);
            for (r, &v) in column.iter().enumerate() {
                dst.set(r, c, v);
            }
        }
    }

    let mut out = Matrix::zeros(rows, cols);
    for r in 0..rows {
        synthesize_line(
            fb,
            &row_lo.data[r * hc..(r + 1) * hc],
            &row_hi.data[r * hc..(r + 1) * hc],
            &mut out.data[r * cols..(r + 1) * cols],
        );
    }
    out
}

/// Detail subbands of every level plus the coarsest approximation.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletPyramid {
    width: usize,
    height: usize,
    /// `details[l - 1][orientation]`
    details: Vec<[Matrix; 3]>,
    approx: Matrix,
}

impl WaveletPyramid {
    /// Assemble a pyramid from parts, checking that every level halves the
    /// previous one.
    pub fn from_parts(
        width: usize,
        height: usize,
        details: Vec<[Matrix; 3]>,
        approx: Matrix,
    ) -> Result<Self> {
        if details.is_empty() {
            return Err(Error::Structure("pyramid needs at least one level".into()));
        }
        for (i, level) in details.iter().enumerate() {
            let (er, ec) = (height >> (i + 1), width >> (i + 1));
            if (height >> (i + 1)) << (i + 1) != height || (width >> (i + 1)) << (i + 1) != width {
                return Err(Error::Structure(format!(
                    "{width}×{height} frame cannot hold level {}",
                    i + 1
                )));
            }
            for band in level {
                if band.rows != er || band.cols != ec || er == 0 || ec == 0 {
                    return Err(Error::Structure(format!(
                        "level {} subband is {}×{}, expected {er}×{ec}",
                        i + 1,
                        band.rows,
                        band.cols
                    )));
                }
            }
        }
        let l = details.len();
        if approx.rows != height >> l || approx.cols != width >> l {
            return Err(Error::Structure(format!(
                "approximation is {}×{}, expected {}×{}",
                approx.rows,
                approx.cols,
                height >> l,
                width >> l
            )));
        }
        Ok(WaveletPyramid {
            width,
            height,
            details,
            approx,
        })
    }

    pub fn levels(&self) -> usize {
        self.details.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn same_shape(&self, other: &WaveletPyramid) -> bool {
        self.width == other.width && self.height == other.height && self.levels() == other.levels()
    }

    /// Panics if `id` is outside the pyramid.
    pub fn subband(&self, id: SubbandId) -> &Matrix {
        &self.details[id.level - 1][id.orientation.index()]
    }

    pub fn subband_mut(&mut self, id: SubbandId) -> &mut Matrix {
        &mut self.details[id.level - 1][id.orientation.index()]
    }

    pub fn try_subband(&self, id: SubbandId) -> Option<&Matrix> {
        self.details
            .get(id.level.checked_sub(1)?)
            .map(|l| &l[id.orientation.index()])
    }

    pub fn approx(&self) -> &Matrix {
        &self.approx
    }

    pub fn approx_mut(&mut self) -> &mut Matrix {
        &mut self.approx
    }

    pub fn subband_ids(&self) -> impl Iterator<Item = SubbandId> {
        SubbandId::all(self.levels())
    }

    /// Every coefficient, details first (finest level first), then LL.
    pub fn coefficients(&self) -> impl Iterator<Item = f64> + '_ {
        self.details
            .iter()
            .flat_map(|level| level.iter().flat_map(|m| m.data.iter().copied()))
            .chain(self.approx.data.iter().copied())
    }

    pub fn coefficient_count(&self) -> usize {
        self.coefficients().count()
    }

    pub fn detail_count(&self) -> usize {
        self.details
            .iter()
            .flat_map(|l| l.iter())
            .map(|m| m.data.len())
            .sum()
    }

    /// Multiply every coefficient by `k`.
    pub fn scaled(&self, k: f64) -> WaveletPyramid {
        let mut out = self.clone();
        out.details
            .iter_mut()
            .flat_map(|l| l.iter_mut())
            .for_each(|m| m.scale(k));
        out.approx.scale(k);
        out
    }
}

/// Decompose `img` into `levels` dyadic levels.
pub fn dwt2(img: &Image, levels: usize) -> Result<WaveletPyramid> {
    if levels == 0 {
        return Err(Error::Dimension(
            "decomposition needs at least one level".into(),
        ));
    }
    if levels >= usize::BITS as usize || !img.supports_levels(levels) {
        return Err(Error::Dimension(format!(
            "{}×{} image is not divisible by 2^{levels}",
            img.width(),
            img.height()
        )));
    }
    let fb = db2_filters();
    let mut current = Matrix {
        rows: img.height(),
        cols: img.width(),
        data: img.pixels().to_vec(),
    };
    let mut details = Vec::with_capacity(levels);
    for _ in 0..levels {
        let [ll, h, v, d] = analyze_2d(&fb, &current);
        details.push([h, v, d]);
        current = ll;
    }
    Ok(WaveletPyramid {
        width: img.width(),
        height: img.height(),
        details,
        approx: current,
    })
}

/// Reconstruct the image from a pyramid.
pub fn idwt2(pyr: &WaveletPyramid) -> Result<Image> {
    let fb = db2_filters();
    let mut current = pyr.approx.clone();
    for [h, v, d] in pyr.details.iter().rev() {
        current = synthesize_2d(&fb, &current, h, v, d);
    }
    Image::new(current.cols, current.rows, current.data)
}
