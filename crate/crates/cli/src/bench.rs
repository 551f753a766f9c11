//! The robustness benchmark: embed once, then attack and extract for every
//! attack × detector cell.

use anyhow::Result;
use wavemark::{
    apply_attack, ber, decode, embed_image, extract_tallies, kl_security, mutual_information, ncc,
    psnr, ssim, AttackKind, AttackSpec, DetectorStructure, EmbedConfig, Image, Watermark,
};

use crate::report::{
    AttackRow, BenchReport, ConfigEcho, Spread, SweepRow, Transparency, FORMAT_VERSION,
};

#[derive(Debug, Clone)]
pub struct BenchOptions {
    pub config: EmbedConfig,
    pub attacks: Vec<AttackSpec>,
    pub detectors: Vec<DetectorStructure>,
    pub jpeg_sweep: Vec<u8>,
    /// Seed given to every seeded attack that does not carry its own.
    pub seed: u64,
    /// Trials per attack; trial `t` runs with seed `seed + t`.
    pub repeat: usize,
    /// Labels echoed into the report.
    pub cover_label: String,
    pub watermark_label: String,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            config: EmbedConfig::default(),
            attacks: AttackSpec::robustness_catalog(),
            detectors: vec![
                DetectorStructure::detector_i(3),
                DetectorStructure::detector_ii(),
            ],
            jpeg_sweep: Vec::new(),
            seed: 0,
            repeat: 1,
            cover_label: String::new(),
            watermark_label: String::new(),
        }
    }
}

/// The spec a bench row actually runs for trial `trial`.
pub fn trial_spec(spec: &AttackSpec, default_seed: u64, trial: usize) -> AttackSpec {
    if !spec.kind.is_seeded() {
        return spec.clone();
    }
    let base = if spec.params.contains_key("seed") {
        spec.param("seed") as u64
    } else {
        default_seed
    };
    spec.seeded(base + trial as u64)
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Decoded marks, one per detector, for a received image.
fn extract_all(
    cover: &Image,
    received: &Image,
    cfg: &EmbedConfig,
    detectors: &[DetectorStructure],
) -> wavemark::Result<Vec<Watermark>> {
    let tallies = extract_tallies(cover, received, cfg)?;
    detectors.iter().map(|d| decode(&tallies, d)).collect()
}

pub fn run_bench(cover: &Image, wm: &Watermark, opts: &BenchOptions) -> Result<BenchReport> {
    let cfg = &opts.config;
    for det in &opts.detectors {
        det.validate(cfg.levels())?;
    }
    let (marked, embed_report) = embed_image(cover, wm, cfg)?;
    let sent = marked.quantized();

    let transparency = Transparency {
        psnr: Some(psnr(cover, &sent)?),
        ssim: ssim(cover, &sent)?,
        kl_security: kl_security(cover, &sent)?,
        mutual_information: mutual_information(cover, &sent)?,
        modified_count: embed_report.modified_total(),
    };

    let repeat = opts.repeat.max(1);
    let mut rows = Vec::new();
    for spec in &opts.attacks {
        let first = trial_spec(spec, opts.seed, 0);
        // trials[t][d] = (ber, ncc)
        let trials: wavemark::Result<Vec<Vec<(f64, f64)>>> = (0..repeat)
            .map(|t| {
                let attacked = apply_attack(&sent, &trial_spec(spec, opts.seed, t))?;
                let marks = extract_all(cover, &attacked, cfg, &opts.detectors)?;
                Ok(marks.iter().map(|m| (ber(wm, m), ncc(wm, m))).collect())
            })
            .collect();
        for (d, det) in opts.detectors.iter().enumerate() {
            let mut row = AttackRow {
                attack: first.to_string(),
                seed: first.seed(),
                detector: det.name().to_string(),
                ber: None,
                ncc: None,
                repeat: None,
                error: None,
            };
            match &trials {
                Ok(trials) => {
                    row.ber = Some(trials[0][d].0);
                    row.ncc = Some(trials[0][d].1);
                    if repeat > 1 {
                        let bers: Vec<f64> = trials.iter().map(|t| t[d].0).collect();
                        let nccs: Vec<f64> = trials.iter().map(|t| t[d].1).collect();
                        let (ber_mean, ber_std) = mean_std(&bers);
                        let (ncc_mean, ncc_std) = mean_std(&nccs);
                        row.repeat = Some(Spread {
                            ber_mean,
                            ber_std,
                            ncc_mean,
                            ncc_std,
                            trials: repeat,
                        });
                    }
                }
                Err(e) => row.error = Some(e.to_string()),
            }
            rows.push(row);
        }
    }

    let mut jpeg_sweep = Vec::new();
    for &quality in &opts.jpeg_sweep {
        let spec = AttackSpec::new(AttackKind::Jpeg).with("q", quality as f64)?;
        let attacked = apply_attack(&sent, &spec)?;
        let marks = extract_all(cover, &attacked, cfg, &opts.detectors)?;
        for (det, m) in opts.detectors.iter().zip(&marks) {
            jpeg_sweep.push(SweepRow {
                quality,
                detector: det.name().to_string(),
                ber: ber(wm, m),
                ncc: ncc(wm, m),
            });
        }
    }

    Ok(BenchReport {
        format_version: FORMAT_VERSION,
        cover: opts.cover_label.clone(),
        watermark: opts.watermark_label.clone(),
        seed: opts.seed,
        config: ConfigEcho {
            alpha: cfg.alpha,
            q: cfg.q.clone(),
            levels: cfg.levels(),
            modulation: cfg.modulation.name().to_string(),
        },
        transparency,
        rows,
        jpeg_sweep,
    })
}
