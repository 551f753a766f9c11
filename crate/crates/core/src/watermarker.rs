//! Threshold selection, multiplicative embedding, non-blind extraction and
//! majority-vote decoding.
//!
//! A detail coefficient is *significant* when `|c| > q_l · max|C_{s,l}|`.
//! Every significant coefficient at subband position `(m, n)` carries
//! watermark bit `B[m mod 16][n mod 16]`, so each bit is embedded many
//! times per subband and once more in every subband.

use std::collections::BTreeMap;
use std::fmt;

use crate::dwt::{dwt2, idwt2, Orientation, SubbandId, WaveletPyramid};
use crate::error::{Error, Result};
use crate::metrics::psnr;
use crate::pixmap::{Image, Watermark, MARK_BITS, MARK_SIDE};

/// Sign of the modulation function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Modulation {
    /// `c · (1 − α·b)`: a −1 bit grows the coefficient.
    #[default]
    Negative,
    /// `c · (1 + α·b)`.
    Positive,
}

impl Modulation {
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            Modulation::Negative => -1.0,
            Modulation::Positive => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Modulation::Negative => "negative",
            Modulation::Positive => "positive",
        }
    }
}

impl std::str::FromStr for Modulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "negative" | "neg" | "-" => Ok(Modulation::Negative),
            "positive" | "pos" | "+" => Ok(Modulation::Positive),
            _ => Err(Error::Config(format!(
                "modulation must be 'negative' or 'positive', got {s:?}"
            ))),
        }
    }
}

/// Embedding parameters. The defaults are α = 0.4, q = (0.06, 0.04, 0.02),
/// three levels, negative modulation.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbedConfig {
    pub alpha: f64,
    /// One factor per level, finest first.
    pub q: Vec<f64>,
    pub modulation: Modulation,
}

impl Default for EmbedConfig {
    fn default() -> Self {
        EmbedConfig {
            alpha: 0.4,
            q: vec![0.06, 0.04, 0.02],
            modulation: Modulation::Negative,
        }
    }
}

impl EmbedConfig {
    pub fn levels(&self) -> usize {
        self.q.len()
    }

    pub fn q_for(&self, level: usize) -> f64 {
        self.q[level - 1]
    }

    /// α must lie in `[0, 1)` (α = 0 is accepted as the "no mark" case) and
    /// every q in `(0, 1)`.
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.alpha) {
            return Err(Error::Config(format!(
                "alpha must be in [0, 1), got {}",
                self.alpha
            )));
        }
        if self.q.is_empty() {
            return Err(Error::Config("at least one level is required".into()));
        }
        for (i, &q) in self.q.iter().enumerate() {
            if !(q > 0.0 && q < 1.0) {
                return Err(Error::Config(format!(
                    "q{} must be in (0, 1), got {q}",
                    i + 1
                )));
            }
        }
        Ok(())
    }
}

/// Per-subband `M` (largest coefficient magnitude) and `T = q_l · M`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdMap {
    entries: BTreeMap<SubbandId, (f64, f64)>,
}

impl ThresholdMap {
    pub fn threshold(&self, id: SubbandId) -> Option<f64> {
        self.entries.get(&id).map(|&(_, t)| t)
    }

    pub fn max_magnitude(&self, id: SubbandId) -> Option<f64> {
        self.entries.get(&id).map(|&(m, _)| m)
    }

    pub fn iter(&self) -> impl Iterator<Item = (SubbandId, f64)> + '_ {
        self.entries.iter().map(|(&id, &(_, t))| (id, t))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn check_levels(pyr: &WaveletPyramid, cfg: &EmbedConfig) -> Result<()> {
    if pyr.levels() != cfg.levels() {
        return Err(Error::Structure(format!(
            "pyramid has {} levels, configuration expects {}",
            pyr.levels(),
            cfg.levels()
        )));
    }
    Ok(())
}

/// Thresholds for every detail subband; the approximation band is excluded.
pub fn compute_thresholds(pyr: &WaveletPyramid, cfg: &EmbedConfig) -> Result<ThresholdMap> {
    cfg.validate()?;
    check_levels(pyr, cfg)?;
    let entries = pyr
        .subband_ids()
        .map(|id| {
            let m = pyr.subband(id).max_abs();
            (id, (m, cfg.q_for(id.level) * m))
        })
        .collect();
    Ok(ThresholdMap { entries })
}

/// Outcome of one embedding.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EmbedReport {
    pub modified: BTreeMap<SubbandId, usize>,
    /// PSNR of the watermarked image against the cover, when known.
    pub psnr: Option<f64>,
}

impl EmbedReport {
    pub fn modified_total(&self) -> usize {
        self.modified.values().sum()
    }
}

/// Visit every significant coefficient of every detail subband as
/// `(subband, row, col, coefficient)`.
fn for_each_significant(
    pyr: &WaveletPyramid,
    thresholds: &ThresholdMap,
    mut f: impl FnMut(SubbandId, usize, usize, f64),
) {
    for (id, t) in thresholds.iter() {
        let band = pyr.subband(id);
        for m in 0..band.rows() {
            for n in 0..band.cols() {
                let c = band.get(m, n);
                if c.abs() > t {
                    f(id, m, n, c);
                }
            }
        }
    }
}

/// Modulate every significant detail coefficient of `pyr` with the tiled
/// watermark.
pub fn embed(
    pyr: &WaveletPyramid,
    wm: &Watermark,
    cfg: &EmbedConfig,
) -> Result<(WaveletPyramid, EmbedReport)> {
    let thresholds = compute_thresholds(pyr, cfg)?;
    let gain = cfg.modulation.sign() * cfg.alpha;
    let mut out = pyr.clone();
    let mut report = EmbedReport {
        modified: thresholds.iter().map(|(id, _)| (id, 0)).collect(),
        psnr: None,
    };
    for_each_significant(pyr, &thresholds, |id, m, n, c| {
        let b = wm.tiled(m, n) as f64;
        out.subband_mut(id).set(m, n, c * (1.0 + gain * b));
        *report.modified.get_mut(&id).unwrap() += 1;
    });
    Ok((out, report))
}

/// Vote counts for one subband, indexed by watermark position.
#[derive(Clone, PartialEq, Eq)]
pub struct Tally {
    pub plus: [u32; MARK_BITS],
    pub minus: [u32; MARK_BITS],
}

impl Default for Tally {
    fn default() -> Self {
        Tally {
            plus: [0; MARK_BITS],
            minus: [0; MARK_BITS],
        }
    }
}

impl Tally {
    /// +1 or −1 when one side has more votes, 0 when tied or empty.
    pub fn verdict(&self, pos: usize) -> i8 {
        match self.plus[pos].cmp(&self.minus[pos]) {
            std::cmp::Ordering::Greater => 1,
            std::cmp::Ordering::Less => -1,
            std::cmp::Ordering::Equal => 0,
        }
    }

    pub fn cast(&mut self, pos: usize, vote: i8) {
        match vote {
            1 => self.plus[pos] += 1,
            -1 => self.minus[pos] += 1,
            _ => {}
        }
    }

    pub fn votes_cast(&self) -> u64 {
        self.plus.iter().chain(&self.minus).map(|&v| v as u64).sum()
    }
}

impl fmt::Debug for Tally {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Tally")
            .field("votes_cast", &self.votes_cast())
            .finish_non_exhaustive()
    }
}

/// Per-subband tallies produced by [`extract_votes`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct VoteTallies {
    pub bands: BTreeMap<SubbandId, Tally>,
}

impl VoteTallies {
    pub fn get(&self, id: SubbandId) -> Option<&Tally> {
        self.bands.get(&id)
    }
}

/// Recover per-coefficient bit estimates from a received pyramid.
///
/// Thresholds come from the cover, as at embedding time. At each
/// significant position the raw vote is `sgn((c' − c) / c)`; under negative
/// modulation that sign is flipped so a clean channel votes the embedded
/// bit. A zero ratio casts no vote.
pub fn extract_votes(
    cover: &WaveletPyramid,
    received: &WaveletPyramid,
    cfg: &EmbedConfig,
) -> Result<VoteTallies> {
    if !cover.same_shape(received) {
        return Err(Error::Structure(format!(
            "cover pyramid {}×{}/{} and received pyramid {}×{}/{} differ",
            cover.width(),
            cover.height(),
            cover.levels(),
            received.width(),
            received.height(),
            received.levels()
        )));
    }
    let thresholds = compute_thresholds(cover, cfg)?;
    let correction = cfg.modulation.sign();
    let mut tallies = VoteTallies {
        bands: thresholds
            .iter()
            .map(|(id, _)| (id, Tally::default()))
            .collect(),
    };
    for_each_significant(cover, &thresholds, |id, m, n, c| {
        let ratio = (received.subband(id).get(m, n) - c) / c;
        let raw = if ratio > 0.0 {
            1.0
        } else if ratio < 0.0 {
            -1.0
        } else {
            return;
        };
        let vote = (raw * correction) as i8;
        let pos = (m % MARK_SIDE) * MARK_SIDE + n % MARK_SIDE;
        tallies.bands.get_mut(&id).unwrap().cast(pos, vote);
    });
    Ok(tallies)
}

/// The subbands whose verdicts enter the final majority.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetectorStructure {
    name: String,
    subbands: Vec<SubbandId>,
}

impl DetectorStructure {
    /// A custom detector; duplicates are dropped, order is kept.
    pub fn new(subbands: impl IntoIterator<Item = SubbandId>) -> Result<Self> {
        let mut list: Vec<SubbandId> = Vec::new();
        for id in subbands {
            if id.level == 0 {
                return Err(Error::Structure(format!("invalid subband level in {id}")));
            }
            if !list.contains(&id) {
                list.push(id);
            }
        }
        if list.is_empty() {
            return Err(Error::Structure(
                "detector needs at least one subband".into(),
            ));
        }
        let name = list
            .iter()
            .map(|id| id.to_string())
            .collect::<Vec<_>>()
            .join(",");
        Ok(DetectorStructure {
            name,
            subbands: list,
        })
    }

    /// Detector I: every detail subband of a `levels`-deep pyramid.
    pub fn detector_i(levels: usize) -> Self {
        DetectorStructure {
            name: "I".into(),
            subbands: SubbandId::all(levels).collect(),
        }
    }

    /// Detector II: h2, v2 and v3.
    pub fn detector_ii() -> Self {
        DetectorStructure {
            name: "II".into(),
            subbands: vec![
                SubbandId::new(Orientation::Horizontal, 2),
                SubbandId::new(Orientation::Vertical, 2),
                SubbandId::new(Orientation::Vertical, 3),
            ],
        }
    }

    /// `I`, `II`, or a comma-separated subband list such as `h2,v2,v3`.
    pub fn parse(s: &str, levels: usize) -> Result<Self> {
        match s.trim() {
            "I" | "i" | "1" => Ok(DetectorStructure::detector_i(levels)),
            "II" | "ii" | "2" => Ok(DetectorStructure::detector_ii()),
            list => DetectorStructure::new(
                list.split(',')
                    .map(str::parse)
                    .collect::<Result<Vec<SubbandId>>>()?,
            ),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn subbands(&self) -> &[SubbandId] {
        &self.subbands
    }

    /// Check every subband exists in a `levels`-deep pyramid.
    pub fn validate(&self, levels: usize) -> Result<()> {
        match self.subbands.iter().find(|id| id.level > levels) {
            Some(id) => Err(Error::Structure(format!(
                "detector {} uses {id}, beyond {levels} levels",
                self.name
            ))),
            None => Ok(()),
        }
    }
}

impl fmt::Display for DetectorStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Two-stage majority decoding.
///
/// Each subband of `det` first reduces its votes at a bit position to one
/// verdict (abstaining on a tie or no votes); the bit is then the sign of
/// the verdict sum. An overall tie decodes as +1.
pub fn decode(tallies: &VoteTallies, det: &DetectorStructure) -> Result<Watermark> {
    let bands = det
        .subbands()
        .iter()
        .map(|&id| {
            tallies
                .get(id)
                .ok_or_else(|| Error::Structure(format!("no votes recorded for subband {id}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut bits = [0i8; MARK_BITS];
    for (pos, bit) in bits.iter_mut().enumerate() {
        let sum: i32 = bands.iter().map(|t| t.verdict(pos) as i32).sum();
        *bit = if sum < 0 { -1 } else { 1 };
    }
    Watermark::from_bits(&bits)
}

/// DWT, embed and inverse DWT; the report carries the PSNR against `cover`.
pub fn embed_image(
    cover: &Image,
    wm: &Watermark,
    cfg: &EmbedConfig,
) -> Result<(Image, EmbedReport)> {
    cfg.validate()?;
    let pyr = dwt2(cover, cfg.levels())?;
    let (marked, mut report) = embed(&pyr, wm, cfg)?;
    let out = idwt2(&marked)?;
    report.psnr = Some(psnr(cover, &out)?);
    Ok((out, report))
}

/// Vote tallies for a received image against its cover.
pub fn extract_tallies(cover: &Image, received: &Image, cfg: &EmbedConfig) -> Result<VoteTallies> {
    if !cover.same_dims(received) {
        return Err(Error::Dimension(format!(
            "cover is {}×{}, received image is {}×{}",
            cover.width(),
            cover.height(),
            received.width(),
            received.height()
        )));
    }
    cfg.validate()?;
    let c = dwt2(cover, cfg.levels())?;
    let r = dwt2(received, cfg.levels())?;
    extract_votes(&c, &r, cfg)
}

/// Full non-blind extraction with one detector structure.
pub fn extract_image(
    cover: &Image,
    received: &Image,
    cfg: &EmbedConfig,
    det: &DetectorStructure,
) -> Result<Watermark> {
    det.validate(cfg.levels())?;
    decode(&extract_tallies(cover, received, cfg)?, det)
}
