//! The attack catalog: deterministic image impairments applied to an
//! 8-bit transmitted image.
//!
//! Every attack first quantizes its input to 8-bit levels and returns an
//! image of the same size whose samples are again 8-bit levels in
//! `[0, 255]`. Random attacks draw from a ChaCha stream selected by the
//! pixel index, so the output depends only on the seed and never on
//! evaluation order.

mod filters;
mod jpeg;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::pixmap::Image;

pub use filters::{
    bilinear, dilate3, erode3, gaussian3, gaussian_kernel3, mean3, median3, unsharp,
};
pub use jpeg::{jpeg_codec, quant_table, LUMINANCE_TABLE};

/// Attack kinds with their parameter names and defaults.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AttackKind {
    None,
    Median,
    Lpf,
    GaussianFilter,
    HistogramEq,
    CropHalf,
    Invert,
    RangeMap,
    AddNoise,
    Rescale,
    Erode,
    Dilate,
    Gamma,
    Edge,
    EdgeEncoder,
    Sharpen,
    Awgn,
    Jpeg,
    IntensityAdjust,
}

impl AttackKind {
    pub const ALL: [AttackKind; 19] = [
        AttackKind::None,
        AttackKind::Median,
        AttackKind::Lpf,
        AttackKind::GaussianFilter,
        AttackKind::HistogramEq,
        AttackKind::CropHalf,
        AttackKind::Invert,
        AttackKind::RangeMap,
        AttackKind::AddNoise,
        AttackKind::Rescale,
        AttackKind::Erode,
        AttackKind::Dilate,
        AttackKind::Gamma,
        AttackKind::Edge,
        AttackKind::EdgeEncoder,
        AttackKind::Sharpen,
        AttackKind::Awgn,
        AttackKind::Jpeg,
        AttackKind::IntensityAdjust,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AttackKind::None => "none",
            AttackKind::Median => "median",
            AttackKind::Lpf => "lpf",
            AttackKind::GaussianFilter => "gaussian_filter",
            AttackKind::HistogramEq => "histogram_eq",
            AttackKind::CropHalf => "crop_half",
            AttackKind::Invert => "invert",
            AttackKind::RangeMap => "range_map",
            AttackKind::AddNoise => "add_noise",
            AttackKind::Rescale => "rescale",
            AttackKind::Erode => "erode",
            AttackKind::Dilate => "dilate",
            AttackKind::Gamma => "gamma",
            AttackKind::Edge => "edge",
            AttackKind::EdgeEncoder => "edge_encoder",
            AttackKind::Sharpen => "sharpen",
            AttackKind::Awgn => "awgn",
            AttackKind::Jpeg => "jpeg",
            AttackKind::IntensityAdjust => "intensity_adjust",
        }
    }

    /// Accepted parameters and their defaults.
    pub fn params(self) -> &'static [(&'static str, f64)] {
        match self {
            AttackKind::GaussianFilter => &[("sigma", 0.8)],
            AttackKind::CropHalf => &[("area", 0.5), ("fill", 128.0)],
            AttackKind::RangeMap => &[("low", 25.0), ("up", 215.0)],
            AttackKind::AddNoise => &[("pix", 0.1), ("amt", 0.2), ("seed", 0.0)],
            AttackKind::Rescale => &[("factor", 0.5)],
            AttackKind::Gamma => &[("g", 0.8)],
            AttackKind::Edge | AttackKind::Sharpen => &[("lambda", 1.0)],
            AttackKind::EdgeEncoder => &[("lambda", 0.5)],
            AttackKind::Awgn => &[("snr_db", 11.4), ("seed", 0.0)],
            AttackKind::Jpeg => &[("q", 50.0)],
            _ => &[],
        }
    }

    /// Whether the attack draws random numbers (and so takes a `seed`).
    pub fn is_seeded(self) -> bool {
        matches!(self, AttackKind::AddNoise | AttackKind::Awgn)
    }

    pub fn valid_names() -> String {
        AttackKind::ALL
            .iter()
            .map(|k| k.name())
            .collect::<Vec<_>>()
            .join(", ")
    }
}

impl FromStr for AttackKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AttackKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                Error::Spec(format!(
                    "unknown attack {s:?}; valid kinds: {}",
                    AttackKind::valid_names()
                ))
            })
    }
}

impl fmt::Display for AttackKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An attack kind plus explicitly given parameters; anything missing takes
/// the kind's default. Written as `kind:key=value,key=value`.
#[derive(Debug, Clone, PartialEq)]
pub struct AttackSpec {
    pub kind: AttackKind,
    pub params: BTreeMap<String, f64>,
}

impl AttackSpec {
    pub fn new(kind: AttackKind) -> Self {
        AttackSpec {
            kind,
            params: BTreeMap::new(),
        }
    }

    /// Set a parameter, validating the result.
    pub fn with(mut self, key: &str, value: f64) -> Result<Self> {
        self.params.insert(key.to_string(), value);
        self.validate()?;
        Ok(self)
    }

    /// Parameter value, falling back to the kind's default.
    pub fn param(&self, key: &str) -> f64 {
        self.params.get(key).copied().unwrap_or_else(|| {
            self.kind
                .params()
                .iter()
                .find(|(k, _)| *k == key)
                .map(|&(_, v)| v)
                .unwrap_or_else(|| panic!("{} has no parameter {key}", self.kind))
        })
    }

    pub fn seed(&self) -> Option<u64> {
        self.kind.is_seeded().then(|| self.param("seed") as u64)
    }

    /// Same attack with its seed set, when the attack is seeded.
    pub fn seeded(&self, seed: u64) -> Self {
        let mut out = self.clone();
        if self.kind.is_seeded() {
            out.params.insert("seed".into(), seed as f64);
        }
        out
    }

    /// The 14 impairments of the robustness table, in table order.
    pub fn robustness_catalog() -> Vec<AttackSpec> {
        use AttackKind::*;
        [
            Median,
            Lpf,
            HistogramEq,
            CropHalf,
            Invert,
            EdgeEncoder,
            RangeMap,
            GaussianFilter,
            AddNoise,
            Rescale,
            Erode,
            Dilate,
            Gamma,
            Edge,
        ]
        .into_iter()
        .map(AttackSpec::new)
        .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let allowed = self.kind.params();
        for (key, &value) in &self.params {
            if !allowed.iter().any(|(k, _)| k == key) {
                let names: Vec<&str> = allowed.iter().map(|(k, _)| *k).collect();
                return Err(Error::Spec(format!(
                    "{} does not take parameter {key:?} (accepted: {})",
                    self.kind,
                    if names.is_empty() {
                        "none".to_string()
                    } else {
                        names.join(", ")
                    }
                )));
            }
            if !value.is_finite() {
                return Err(Error::Spec(format!("{}: {key} must be finite", self.kind)));
            }
        }
        let bad = |msg: String| Err(Error::Spec(format!("{}: {msg}", self.kind)));
        let p = |k| self.param(k);
        match self.kind {
            AttackKind::GaussianFilter if p("sigma") <= 0.0 => bad("sigma must be positive".into()),
            AttackKind::CropHalf if !(p("area") > 0.0 && p("area") <= 1.0) => {
                bad("area must be in (0, 1]".into())
            }
            AttackKind::CropHalf if !(0.0..=255.0).contains(&p("fill")) => {
                bad("fill must be in [0, 255]".into())
            }
            AttackKind::RangeMap
                if !(0.0 <= p("low") && p("low") < p("up") && p("up") <= 255.0) =>
            {
                bad("need 0 ≤ low < up ≤ 255".into())
            }
            AttackKind::AddNoise if !(0.0..=1.0).contains(&p("pix")) => {
                bad("pix must be in [0, 1]".into())
            }
            AttackKind::AddNoise if !(0.0..=1.0).contains(&p("amt")) => {
                bad("amt must be in [0, 1]".into())
            }
            AttackKind::Rescale if !(p("factor") > 0.0 && p("factor") <= 1.0) => {
                bad("factor must be in (0, 1]".into())
            }
            AttackKind::Gamma if p("g") <= 0.0 => bad("g must be positive".into()),
            AttackKind::Jpeg if !(1.0..=100.0).contains(&p("q")) || p("q").fract() != 0.0 => {
                bad(format!("q must be an integer in 1..=100, got {}", p("q")))
            }
            _ if self.kind.is_seeded()
                && (p("seed") < 0.0 || p("seed").fract() != 0.0 || p("seed") > 2f64.powi(53)) =>
            {
                bad("seed must be a non-negative integer".into())
            }
            _ => Ok(()),
        }
    }
}

impl FromStr for AttackSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut spec = AttackSpec::new(kind.trim().parse()?);
        for pair in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| Error::Spec(format!("expected key=value, got {pair:?}")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Spec(format!("{k}: {v:?} is not a number")))?;
            spec.params.insert(k.trim().to_string(), v);
        }
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for AttackSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind.name())?;
        for (i, (k, v)) in self.params.iter().enumerate() {
            write!(f, "{}{k}={v}", if i == 0 { ':' } else { ',' })?;
        }
        Ok(())
    }
}

/// Independent random stream for pixel `index`.
fn pixel_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn histogram_equalize(img: &Image) -> Image {
    let mut hist = [0usize; 256];
    for &v in img.pixels() {
        hist[v as usize] += 1;
    }
    let mut cdf = [0usize; 256];
    let mut acc = 0;
    for (c, h) in cdf.iter_mut().zip(hist) {
        acc += h;
        *c = acc;
    }
    let n = img.len();
    let cdf_min = cdf.iter().copied().find(|&c| c > 0).unwrap_or(0);
    if n == cdf_min {
        return img.clone();
    }
    let span = (n - cdf_min) as f64;
    img.map(|v| ((cdf[v as usize] - cdf_min) as f64 / span * 255.0).round())
}

fn crop_window(img: &Image, area: f64, fill: f64) -> Image {
    let side = area.sqrt();
    let (w, h) = (img.width(), img.height());
    let (kw, kh) = (
        ((w as f64) * side).floor() as usize,
        ((h as f64) * side).floor() as usize,
    );
    let (c0, r0) = ((w - kw) / 2, (h - kh) / 2);
    Image::from_fn(w, h, |r, c| {
        if (r0..r0 + kh).contains(&r) && (c0..c0 + kw).contains(&c) {
            img.get(r, c)
        } else {
            fill
        }
    })
}

fn impulse_noise(img: &Image, fraction: f64, amount: f64, seed: u64) -> Image {
    let delta = amount * 255.0;
    let mut out = img.clone();
    for (i, v) in out.pixels_mut().iter_mut().enumerate() {
        let mut rng = pixel_rng(seed, i);
        if rng.random::<f64>() < fraction {
            *v += if rng.random::<bool>() { delta } else { -delta };
        }
    }
    out
}

fn gaussian_noise(img: &Image, snr_db: f64, seed: u64) -> Image {
    let power = img.pixels().iter().map(|v| v * v).sum::<f64>() / img.len() as f64;
    let sigma = (power * 10f64.powf(-snr_db / 10.0)).sqrt();
    let mut out = img.clone();
    for (i, v) in out.pixels_mut().iter_mut().enumerate() {
        let z: f64 = pixel_rng(seed, i).sample(StandardNormal);
        *v += sigma * z;
    }
    out
}

fn stretch(img: &Image) -> Image {
    let (lo, hi) = img
        .pixels()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if hi <= lo {
        return img.clone();
    }
    img.map(|v| (v - lo) * 255.0 / (hi - lo))
}

/// Apply `spec` to the 8-bit quantization of `img`.
pub fn apply_attack(img: &Image, spec: &AttackSpec) -> Result<Image> {
    spec.validate()?;
    let input = img.quantized();
    let p = |k| spec.param(k);
    let out = match spec.kind {
        AttackKind::None => input,
        AttackKind::Median => median3(&input),
        AttackKind::Lpf => mean3(&input),
        AttackKind::GaussianFilter => gaussian3(&input, p("sigma")),
        AttackKind::HistogramEq => histogram_equalize(&input),
        AttackKind::CropHalf => crop_window(&input, p("area"), p("fill")),
        AttackKind::Invert => input.map(|v| 255.0 - v),
        AttackKind::RangeMap => {
            let (low, up) = (p("low"), p("up"));
            input.map(|v| low + v * (up - low) / 255.0)
        }
        AttackKind::AddNoise => impulse_noise(&input, p("pix"), p("amt"), p("seed") as u64),
        AttackKind::Rescale => {
            let f = p("factor");
            let (w, h) = (input.width(), input.height());
            let small_w = ((w as f64 * f).round() as usize).max(1);
            let small_h = ((h as f64 * f).round() as usize).max(1);
            bilinear(&bilinear(&input, small_w, small_h), w, h)
        }
        AttackKind::Erode => erode3(&input),
        AttackKind::Dilate => dilate3(&input),
        AttackKind::Gamma => {
            let g = p("g");
            input.map(|v| 255.0 * (v / 255.0).powf(g))
        }
        AttackKind::Edge | AttackKind::EdgeEncoder | AttackKind::Sharpen => {
            unsharp(&input, p("lambda"))
        }
        AttackKind::Awgn => gaussian_noise(&input, p("snr_db"), p("seed") as u64),
        AttackKind::Jpeg => jpeg_codec(&input, p("q") as u8)?,
        AttackKind::IntensityAdjust => stretch(&input),
    };
    Ok(out.quantized())
}
