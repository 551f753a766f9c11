//! Versioned JSON benchmark report and the CSV JPEG sweep.

use std::io::Write;

use serde::{Serialize, Serializer};

pub const FORMAT_VERSION: u32 = 1;

fn round6(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}

fn ser6<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(round6(*v))
}

/// Non-finite values (an infinite PSNR) are written as `null`.
fn ser6_opt<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) if x.is_finite() => s.serialize_f64(round6(*x)),
        _ => s.serialize_none(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    #[serde(serialize_with = "ser6")]
    pub alpha: f64,
    pub q: Vec<f64>,
    pub levels: usize,
    pub modulation: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Transparency {
    #[serde(serialize_with = "ser6_opt")]
    pub psnr: Option<f64>,
    #[serde(serialize_with = "ser6")]
    pub ssim: f64,
    #[serde(serialize_with = "ser6")]
    pub kl_security: f64,
    #[serde(serialize_with = "ser6")]
    pub mutual_information: f64,
    pub modified_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spread {
    #[serde(serialize_with = "ser6")]
    pub ber_mean: f64,
    #[serde(serialize_with = "ser6")]
    pub ber_std: f64,
    #[serde(serialize_with = "ser6")]
    pub ncc_mean: f64,
    #[serde(serialize_with = "ser6")]
    pub ncc_std: f64,
    pub trials: usize,
}

/// One attack × detector cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttackRow {
    /// Attack exactly as executed, seed included for seeded attacks.
    pub attack: String,
    pub seed: Option<u64>,
    pub detector: String,
    #[serde(serialize_with = "ser6_opt")]
    pub ber: Option<f64>,
    #[serde(serialize_with = "ser6_opt")]
    pub ncc: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub repeat: Option<Spread>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub quality: u8,
    pub detector: String,
    #[serde(serialize_with = "ser6")]
    pub ber: f64,
    #[serde(serialize_with = "ser6")]
    pub ncc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub format_version: u32,
    pub cover: String,
    pub watermark: String,
    pub seed: u64,
    pub config: ConfigEcho,
    pub transparency: Transparency,
    pub rows: Vec<AttackRow>,
    pub jpeg_sweep: Vec<SweepRow>,
}

impl BenchReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Rows for one detector, in catalog order.
    pub fn rows_for<'a>(&'a self, detector: &'a str) -> impl Iterator<Item = &'a AttackRow> + 'a {
        self.rows.iter().filter(move |r| r.detector == detector)
    }
}

/// `quality,detector,ber,ncc` with six decimals.
pub fn sweep_csv(rows: &[SweepRow]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["quality", "detector", "ber", "ncc"])
        .expect("in-memory write");
    for r in rows {
        w.write_record([
            r.quality.to_string(),
            r.detector.clone(),
            format!("{:.6}", r.ber),
            format!("{:.6}", r.ncc),
        ])
        .expect("in-memory write");
    }
    w.flush().expect("in-memory flush");
    w.into_inner().expect("in-memory writer")
}

pub fn write_file(path: &std::path::Path, bytes: &[u8]) -> anyhow::Result<()> {
    use anyhow::Context;
    std::fs::File::create(path)
        .and_then(|mut f| f.write_all(bytes))
        .with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_header_and_rounding() {
        let rows = [SweepRow {
            quality: 50,
            detector: "I".into(),
            ber: 1.0 / 3.0,
            ncc: 1.0 / 3.0,
        }];
        let text = String::from_utf8(sweep_csv(&rows)).unwrap();
        assert_eq!(text, "quality,detector,ber,ncc\n50,I,0.333333,0.333333\n");
    }

    #[test]
    fn infinite_psnr_is_null() {
        let t = Transparency {
            psnr: Some(f64::INFINITY),
            ssim: 1.0,
            kl_security: 0.0,
            mutual_information: 0.1234567,
            modified_count: 0,
        };
        let json = serde_json::to_string(&t).unwrap();
        assert!(json.contains("\"psnr\":null"), "{json}");
        assert!(json.contains("0.123457"), "{json}");
    }
}
