//! Subcommand bodies. Each returns the summary text the binary prints.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use wavemark::{
    apply_attack, ber, embed_image, extract_image, ncc, read_image, read_watermark, write_image,
    write_watermark, AttackSpec, DetectorStructure, EmbedConfig, Modulation,
};

use crate::bench::{run_bench, BenchOptions};
use crate::report::{sweep_csv, write_file};

/// Embedding parameters shared by `embed`, `extract` and `bench`.
#[derive(Debug, Clone, Args)]
pub struct ConfigArgs {
    /// Embedding strength.
    #[arg(long, default_value_t = 0.4)]
    pub alpha: f64,
    /// Threshold factor for level 1.
    #[arg(long, default_value_t = 0.06)]
    pub q1: f64,
    /// Threshold factor for level 2.
    #[arg(long, default_value_t = 0.04)]
    pub q2: f64,
    /// Threshold factor for level 3.
    #[arg(long, default_value_t = 0.02)]
    pub q3: f64,
    /// Decomposition depth.
    #[arg(long, default_value_t = 3)]
    pub levels: usize,
    /// Comma-separated threshold factors for every level, finest first.
    /// Overrides --q1/--q2/--q3 and --levels.
    #[arg(long, value_delimiter = ',')]
    pub q: Option<Vec<f64>>,
    /// `negative` or `positive`.
    #[arg(long, default_value = "negative")]
    pub modulation: Modulation,
}

impl Default for ConfigArgs {
    fn default() -> Self {
        ConfigArgs {
            alpha: 0.4,
            q1: 0.06,
            q2: 0.04,
            q3: 0.02,
            levels: 3,
            q: None,
            modulation: Modulation::Negative,
        }
    }
}

impl ConfigArgs {
    pub fn to_config(&self) -> Result<EmbedConfig> {
        let q = match &self.q {
            Some(q) => q.clone(),
            None => {
                if !(1..=3).contains(&self.levels) {
                    bail!(
                        "--levels {} needs explicit factors; use --q with {} values",
                        self.levels,
                        self.levels
                    );
                }
                [self.q1, self.q2, self.q3][..self.levels].to_vec()
            }
        };
        let cfg = EmbedConfig {
            alpha: self.alpha,
            q,
            modulation: self.modulation,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn cmd_embed(cover: &Path, wm: &Path, out: &Path, args: &ConfigArgs) -> Result<String> {
    let cfg = args.to_config()?;
    let cover_img = read_image(cover)?;
    let mark = read_watermark(wm)?;
    let (marked, report) = embed_image(&cover_img, &mark, &cfg)?;
    let written = marked.quantized();
    write_image(&written, out)?;
    let psnr = wavemark::psnr(&cover_img, &written)?;
    Ok(format!(
        "wrote {}\npsnr: {:.2} dB\nmodified coefficients: {}",
        out.display(),
        psnr,
        report.modified_total()
    ))
}

pub fn cmd_extract(
    cover: &Path,
    received: &Path,
    out: &Path,
    detector: &str,
    truth: Option<&Path>,
    args: &ConfigArgs,
) -> Result<String> {
    let cfg = args.to_config()?;
    let det = DetectorStructure::parse(detector, cfg.levels())?;
    let cover_img = read_image(cover)?;
    let received_img = read_image(received)?;
    let mark = extract_image(&cover_img, &received_img, &cfg, &det).with_context(|| {
        format!(
            "extracting from {} against {}",
            received.display(),
            cover.display()
        )
    })?;
    write_watermark(&mark, out)?;
    let mut summary = format!("wrote {} (detector {})", out.display(), det.name());
    if let Some(truth) = truth {
        let t = read_watermark(truth)?;
        summary.push_str(&format!(
            "\nber: {:.6}\nncc: {:.6}",
            ber(&t, &mark),
            ncc(&t, &mark)
        ));
    }
    Ok(summary)
}

pub fn cmd_attack(input: &Path, out: &Path, spec: &str) -> Result<String> {
    let spec: AttackSpec = spec.parse()?;
    let img = read_image(input)?;
    let attacked = apply_attack(&img, &spec)?;
    write_image(&attacked, out)?;
    Ok(format!("wrote {} ({spec})", out.display()))
}

/// `;`-separated attack specs; `all` expands to the 14-row robustness table.
pub fn parse_attacks(s: &str) -> Result<Vec<AttackSpec>> {
    let mut out = Vec::new();
    for item in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        if item == "all" {
            out.extend(AttackSpec::robustness_catalog());
        } else {
            out.push(item.parse()?);
        }
    }
    if out.is_empty() {
        bail!("no attacks given");
    }
    Ok(out)
}

/// Comma-separated detectors; a custom detector joins its subbands with `+`.
pub fn parse_detectors(s: &str, levels: usize) -> Result<Vec<DetectorStructure>> {
    let dets = s
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            let det = DetectorStructure::parse(&p.replace('+', ","), levels)?;
            det.validate(levels)?;
            Ok(det)
        })
        .collect::<wavemark::Result<Vec<_>>>()?;
    if dets.is_empty() {
        bail!("no detectors given");
    }
    Ok(dets)
}

/// `20,25,50,75`, `10..90` (step 10) or `10..90:5`.
pub fn parse_sweep(s: &str) -> Result<Vec<u8>> {
    let s = s.trim();
    let out: Vec<u8> = if let Some((lo, rest)) = s.split_once("..") {
        let (hi, step) = rest.split_once(':').unwrap_or((rest, "10"));
        let (lo, hi, step): (u8, u8, usize) =
            (lo.trim().parse()?, hi.trim().parse()?, step.trim().parse()?);
        if step == 0 {
            bail!("sweep step must be positive");
        }
        (lo..=hi).step_by(step).collect()
    } else {
        s.split(',')
            .map(|q| {
                q.trim()
                    .parse::<u8>()
                    .with_context(|| format!("bad quality {q:?}"))
            })
            .collect::<Result<_>>()?
    };
    if let Some(q) = out.iter().find(|q| !(1..=100).contains(*q)) {
        bail!("JPEG quality {q} outside 1..=100");
    }
    Ok(out)
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// `;`-separated attack specs; `all` is the 14-row robustness table.
    #[arg(long, default_value = "all")]
    pub attacks: String,
    /// Comma-separated detectors: `I`, `II`, or subbands joined by `+`.
    #[arg(long, default_value = "I,II")]
    pub detectors: String,
    /// JPEG qualities for the sweep, e.g. `10..90` or `20,25,50,75`.
    #[arg(long)]
    pub jpeg_sweep: Option<String>,
    /// Seed for seeded attacks that do not carry their own.
    #[arg(long, env = "WAVEMARK_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Trials per attack; extra trials use seed+1, seed+2, ...
    #[arg(long, default_value_t = 1)]
    pub repeat: usize,
    /// JSON report path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// CSV sweep path; defaults to the report path with a `.csv` extension.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

pub fn cmd_bench(cover: &Path, wm: &Path, bench: &BenchArgs, args: &ConfigArgs) -> Result<String> {
    let config = args.to_config()?;
    let opts = BenchOptions {
        attacks: parse_attacks(&bench.attacks)?,
        detectors: parse_detectors(&bench.detectors, config.levels())?,
        jpeg_sweep: bench
            .jpeg_sweep
            .as_deref()
            .map(parse_sweep)
            .transpose()?
            .unwrap_or_default(),
        seed: bench.seed,
        repeat: bench.repeat,
        cover_label: cover.display().to_string(),
        watermark_label: wm.display().to_string(),
        config,
    };
    if opts.repeat == 0 {
        bail!("--repeat must be at least 1");
    }
    let cover_img = read_image(cover)?;
    let mark = read_watermark(wm)?;
    let report = run_bench(&cover_img, &mark, &opts)?;
    let json = report.to_json();

    let mut summary = Vec::new();
    match &bench.out {
        Some(path) => {
            write_file(path, json.as_bytes())?;
            summary.push(format!("wrote {}", path.display()));
        }
        None => summary.push(json.trim_end().to_string()),
    }
    if !report.jpeg_sweep.is_empty() {
        let csv_path = bench
            .csv
            .clone()
            .or_else(|| bench.out.as_ref().map(|p| p.with_extension("csv")));
        match csv_path {
            Some(path) => {
                write_file(&path, &sweep_csv(&report.jpeg_sweep))?;
                summary.push(format!("wrote {}", path.display()));
            }
            None => summary.push(String::from_utf8(sweep_csv(&report.jpeg_sweep))?),
        }
    }
    let failed = report.rows.iter().filter(|r| r.error.is_some()).count();
    if failed > 0 {
        summary.push(format!("{failed} row(s) failed; see the error field"));
    }
    Ok(summary.join("\n"))
}
