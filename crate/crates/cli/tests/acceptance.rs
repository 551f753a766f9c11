//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line with the
//! measured values and the tolerance, then asserts.

mod common;

use std::time::{Duration, Instant};

use common::{cover, cover_path, random_image, random_mark, write_mark, BENCHMARK_IMAGES};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wavemark::{
    apply_attack, ber, db2_filters, decode, dwt2, embed, embed_image, extract_image,
    extract_tallies, extract_votes, jpeg_codec, kl_security, ncc, psnr, ssim, AttackSpec,
    DetectorStructure, EmbedConfig, Image, Matrix, Modulation, SubbandId, Watermark,
    WaveletPyramid, MARK_BITS,
};
use wavemark_cli::commands::BenchArgs;
use wavemark_cli::{cmd_bench, ConfigArgs};

fn verdict(n: u32, title: &str, ok: bool, detail: &str) {
    println!(
        "criterion {n:>2} {} {title}: {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {n} ({title}) failed: {detail}");
}

fn detectors() -> [DetectorStructure; 2] {
    [
        DetectorStructure::detector_i(3),
        DetectorStructure::detector_ii(),
    ]
}

// ---------------------------------------------------------------- 1

fn conv_down(x: &[f64], taps: &[f64; 4]) -> Vec<f64> {
    let n = x.len();
    let mut padded = vec![0.0; n];
    for (j, &t) in taps.iter().enumerate() {
        padded[j % n] += t;
    }
    (0..n)
        .step_by(2)
        .map(|out| (0..n).map(|m| padded[(out + n - m) % n] * x[m]).sum())
        .collect()
}

/// Level-1 (approx, h, v, d) by full circular convolution, rows then columns.
fn oracle_level1(img: &Image) -> [Vec<Vec<f64>>; 4] {
    let fb = db2_filters();
    let rows: Vec<Vec<f64>> = (0..img.height())
        .map(|r| (0..img.width()).map(|c| img.get(r, c)).collect())
        .collect();
    let lo: Vec<Vec<f64>> = rows.iter().map(|r| conv_down(r, &fb.lowpass)).collect();
    let hi: Vec<Vec<f64>> = rows.iter().map(|r| conv_down(r, &fb.highpass)).collect();
    let cols = |m: &[Vec<f64>], taps: &[f64; 4]| -> Vec<Vec<f64>> {
        let by_col: Vec<Vec<f64>> = (0..m[0].len())
            .map(|c| conv_down(&m.iter().map(|r| r[c]).collect::<Vec<_>>(), taps))
            .collect();
        (0..by_col[0].len())
            .map(|r| by_col.iter().map(|col| col[r]).collect())
            .collect()
    };
    [
        cols(&lo, &fb.lowpass),
        cols(&lo, &fb.highpass),
        cols(&hi, &fb.lowpass),
        cols(&hi, &fb.highpass),
    ]
}

fn matrix_diff(m: &Matrix, oracle: &[Vec<f64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for (r, row) in oracle.iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            worst = worst.max((m.get(r, c) - v).abs());
        }
    }
    worst
}

#[test]
fn criterion_01_dwt_correctness() {
    let start = Instant::now();
    let (mut recon, mut parseval): (f64, f64) = (0.0, 0.0);
    for seed in 0..50u64 {
        let img = random_image(256, 256, 1000 + seed);
        let energy: f64 = img.pixels().iter().map(|v| v * v).sum();
        for levels in 1..=3 {
            let pyr = dwt2(&img, levels).unwrap();
            let coeff: f64 = pyr.coefficients().map(|v| v * v).sum();
            parseval = parseval.max(((coeff - energy) / energy).abs());
            let back = wavemark::idwt2(&pyr).unwrap();
            for (a, b) in back.pixels().iter().zip(img.pixels()) {
                recon = recon.max((a - b).abs());
            }
        }
    }
    let elapsed = start.elapsed();

    let mut oracle: f64 = 0.0;
    for seed in 0..10u64 {
        let img = random_image(16, 16, seed);
        let pyr = dwt2(&img, 1).unwrap();
        let [a, h, v, d] = oracle_level1(&img);
        let band = |s: &str| pyr.subband(s.parse::<SubbandId>().unwrap());
        oracle = oracle
            .max(matrix_diff(pyr.approx(), &a))
            .max(matrix_diff(band("h1"), &h))
            .max(matrix_diff(band("v1"), &v))
            .max(matrix_diff(band("d1"), &d));
    }

    let ok = recon < 1e-8 && parseval < 1e-9 && oracle < 1e-12 && elapsed < Duration::from_secs(1);
    verdict(
        1,
        "dwt correctness",
        ok,
        &format!(
            "recon {recon:.2e} (<1e-8), parseval {parseval:.2e} (<1e-9), \
             oracle {oracle:.2e} (<1e-12), {:.3}s (<1s)",
            elapsed.as_secs_f64()
        ),
    );
}

// ---------------------------------------------------------------- 2

/// The roundtrip is on the embedder's real-valued output. The 8-bit written
/// file is reported alongside but is not part of the criterion.
#[test]
fn criterion_02_clean_roundtrip() {
    let start = Instant::now();
    let cfg = EmbedConfig::default();
    let mut failures = Vec::new();
    let mut quantized_errors = Vec::new();
    let mut cases = 0;
    for name in BENCHMARK_IMAGES {
        let img = cover(name);
        for m in 0..10 {
            let wm = random_mark(200 + m);
            let (marked, _) = embed_image(&img, &wm, &cfg).unwrap();
            let tallies = extract_tallies(&img, &marked, &cfg).unwrap();
            let tallies_8bit = extract_tallies(&img, &marked.quantized(), &cfg).unwrap();
            for det in detectors() {
                let est = decode(&tallies, &det).unwrap();
                cases += 1;
                if ber(&wm, &est) != 0.0 || ncc(&wm, &est) != 1.0 {
                    failures.push(format!("{name}/mark{m}/{}", det.name()));
                }
                let b = ber(&wm, &decode(&tallies_8bit, &det).unwrap());
                if b != 0.0 {
                    quantized_errors.push(format!("{name}/mark{m}/{} ber {b:.4}", det.name()));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    println!("    after 8-bit quantization, nonzero BER in: {quantized_errors:?}");
    verdict(
        2,
        "clean roundtrip",
        failures.is_empty() && elapsed < Duration::from_secs(5),
        &format!(
            "{} of {cases} cases with BER 0 and NCC 1 {failures:?}, {:.2}s (<5s)",
            cases - failures.len(),
            elapsed.as_secs_f64()
        ),
    );
}

// ---------------------------------------------------------------- 3, 4

#[test]
fn criterion_03_transparency_band() {
    let cfg = EmbedConfig::default();
    let wm = Watermark::letter_m();
    let mut ok = true;
    let mut parts = Vec::new();
    for name in BENCHMARK_IMAGES {
        let img = cover(name);
        let (marked, _) = embed_image(&img, &wm, &cfg).unwrap();
        let sent = marked.quantized();
        let p = psnr(&img, &sent).unwrap();
        let s = ssim(&img, &sent).unwrap();
        let k = kl_security(&img, &sent).unwrap();
        ok &= (33.0..=41.0).contains(&p) && s >= 0.97 && k <= 0.02;
        parts.push(format!("{name} psnr {p:.2} ssim {s:.4} kl {k:.4}"));
    }
    verdict(
        3,
        "transparency band (psnr in [33,41] dB, ssim >= 0.97, kl <= 0.02)",
        ok,
        &parts.join("; "),
    );
}

#[test]
fn criterion_04_modified_count() {
    let cfg = EmbedConfig::default();
    let wm = Watermark::letter_m();
    let mut ok = true;
    let mut parts = Vec::new();
    for name in BENCHMARK_IMAGES {
        let (_, report) = embed_image(&cover(name), &wm, &cfg).unwrap();
        let total = report.modified_total();
        ok &= (500..=10_000).contains(&total);
        parts.push(format!("{name} {total}"));
    }
    verdict(
        4,
        "modified coefficients in [500, 10000]",
        ok,
        &parts.join(", "),
    );
}

// ---------------------------------------------------------------- 5

#[test]
fn criterion_05_jpeg_trend() {
    let start = Instant::now();
    let cfg = EmbedConfig::default();
    let det = DetectorStructure::detector_i(3);
    let qualities = [20u8, 25, 50, 75];
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, name) in BENCHMARK_IMAGES.into_iter().enumerate() {
        let img = cover(name);
        let wm = random_mark(500 + i as u64);
        let sent = embed_image(&img, &wm, &cfg).unwrap().0.quantized();
        let bers: Vec<f64> = qualities
            .iter()
            .map(|&q| {
                let received = jpeg_codec(&sent, q).unwrap();
                ber(&wm, &extract_image(&img, &received, &cfg, &det).unwrap())
            })
            .collect();
        let monotone = bers.windows(2).all(|w| w[1] <= w[0]);
        let (ncc50, ncc75) = (1.0 - 2.0 * bers[2], 1.0 - 2.0 * bers[3]);
        ok &= monotone && ncc50 >= 0.85 && ncc75 >= 0.95;
        parts.push(format!(
            "{name} ber {bers:.4?} ncc@50 {ncc50:.4} ncc@75 {ncc75:.4}"
        ));
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(10);
    verdict(
        5,
        "jpeg trend (detector I ber non-increasing over q 20,25,50,75; ncc@50 >= 0.85, ncc@75 >= 0.95)",
        ok,
        &format!("{}; {:.2}s (<10s)", parts.join("; "), elapsed.as_secs_f64()),
    );
}

// ---------------------------------------------------------------- 6

/// Detector contrast, judged on the mean BER over the benchmark images.
#[test]
fn criterion_06_detector_contrast() {
    let cfg = EmbedConfig::default();
    let [det_i, det_ii] = detectors();
    let attacks = ["gaussian_filter", "lpf", "crop_half"];
    let mut mean = [[0.0f64; 2]; 3];
    let mut per_image = Vec::new();
    for (i, name) in BENCHMARK_IMAGES.into_iter().enumerate() {
        let img = cover(name);
        let wm = random_mark(600 + i as u64);
        let sent = embed_image(&img, &wm, &cfg).unwrap().0.quantized();
        for (a, attack) in attacks.iter().enumerate() {
            let spec: AttackSpec = attack.parse().unwrap();
            let received = apply_attack(&sent, &spec).unwrap();
            let tallies = extract_tallies(&img, &received, &cfg).unwrap();
            let b1 = ber(&wm, &decode(&tallies, &det_i).unwrap());
            let b2 = ber(&wm, &decode(&tallies, &det_ii).unwrap());
            mean[a][0] += b1 / BENCHMARK_IMAGES.len() as f64;
            mean[a][1] += b2 / BENCHMARK_IMAGES.len() as f64;
            per_image.push(format!("{name}/{attack} I {b1:.4} II {b2:.4}"));
        }
    }
    for line in &per_image {
        println!("    {line}");
    }
    let ok = mean[0][1] < mean[0][0] && mean[1][1] < mean[1][0] && mean[2][0] < mean[2][1];
    verdict(
        6,
        "detector contrast (II < I on gaussian and lpf, I < II on crop; mean ber)",
        ok,
        &format!(
            "gaussian I {:.4} II {:.4}; lpf I {:.4} II {:.4}; crop I {:.4} II {:.4}",
            mean[0][0], mean[0][1], mean[1][0], mean[1][1], mean[2][0], mean[2][1]
        ),
    );
}

// ---------------------------------------------------------------- 7

#[test]
fn criterion_07_metric_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let identity = (0..1000).all(|_| {
        let (a, b) = (Watermark::random(&mut rng), Watermark::random(&mut rng));
        ncc(&a, &b) == 1.0 - 2.0 * ber(&a, &b)
    });
    let img = Image::from_fn(256, 256, |_, _| rng.random_range(0..=254) as f64);
    let brighter = img.map(|v| v + 1.0);
    let self_ssim = ssim(&img, &img).unwrap();
    let self_kl = kl_security(&img, &img).unwrap();
    let p = psnr(&img, &brighter).unwrap();
    let ok = identity && self_ssim == 1.0 && self_kl == 0.0 && (p - 48.13).abs() <= 0.01;
    verdict(
        7,
        "metric oracles",
        ok,
        &format!(
            "ncc = 1 - 2 ber on 1000 pairs: {identity}; ssim(a,a) {self_ssim}; \
             kl(a,a) {self_kl}; psnr(a,a+1) {p:.4} (48.13 ± 0.01)"
        ),
    );
}

// ---------------------------------------------------------------- 8

fn random_pyramid(rng: &mut ChaCha8Rng, side: usize, levels: usize) -> WaveletPyramid {
    let mut band = |n: usize| {
        let data = (0..n * n)
            .map(|_| rng.random_range(-5i32..=5) as f64)
            .collect();
        Matrix::from_vec(n, n, data).unwrap()
    };
    let details = (1..=levels)
        .map(|l| {
            let n = side >> l;
            [band(n), band(n), band(n)]
        })
        .collect();
    let approx = band(side >> levels);
    WaveletPyramid::from_parts(side, side, details, approx).unwrap()
}

/// Bit by bit: every qualifying coefficient, every subband, then majority.
fn brute_force(
    cover: &WaveletPyramid,
    received: &WaveletPyramid,
    cfg: &EmbedConfig,
    det: &DetectorStructure,
) -> Vec<i8> {
    let flip = if cfg.modulation == Modulation::Negative {
        -1.0
    } else {
        1.0
    };
    (0..MARK_BITS)
        .map(|pos| {
            let mut total = 0i32;
            for &id in det.subbands() {
                let band = cover.subband(id);
                let max = band.as_slice().iter().fold(0.0f64, |m, v| m.max(v.abs()));
                let t = cfg.q[id.level - 1] * max;
                let mut score = 0i32;
                for m in 0..band.rows() {
                    for n in 0..band.cols() {
                        let c = band.get(m, n);
                        if (m % 16) * 16 + n % 16 == pos && c.abs() > t {
                            let r = flip * (received.subband(id).get(m, n) - c) / c;
                            score += (r > 0.0) as i32 - (r < 0.0) as i32;
                        }
                    }
                }
                total += score.signum();
            }
            if total < 0 {
                -1
            } else {
                1
            }
        })
        .collect()
}

#[test]
fn criterion_08_vote_decode_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut mismatches = 0;
    for case in 0..100 {
        let levels: usize = rng.random_range(1..=3);
        let side = 16usize << rng.random_range(0..=1u32);
        let cfg = EmbedConfig {
            alpha: rng.random_range(0.1..0.9),
            q: (0..levels).map(|_| rng.random_range(0.05..0.6)).collect(),
            modulation: if case % 2 == 0 {
                Modulation::Negative
            } else {
                Modulation::Positive
            },
        };
        let cover = random_pyramid(&mut rng, side, levels);
        let wm = Watermark::random(&mut rng);
        let (mut received, _) = embed(&cover, &wm, &cfg).unwrap();
        for id in received.subband_ids() {
            for v in received.subband_mut(id).as_mut_slice() {
                if rng.random_bool(0.5) {
                    *v += rng.random_range(-2i32..=2) as f64;
                }
            }
        }
        let ids: Vec<SubbandId> = cover.subband_ids().collect();
        let k = rng.random_range(1..=ids.len());
        let det = DetectorStructure::new(ids[..k].iter().copied()).unwrap();
        let tallies = extract_votes(&cover, &received, &cfg).unwrap();
        let fast = decode(&tallies, &det).unwrap();
        if fast.bits()[..] != brute_force(&cover, &received, &cfg, &det)[..] {
            mismatches += 1;
        }
    }
    verdict(
        8,
        "vote/decode oracle",
        mismatches == 0,
        &format!(
            "{} of 100 randomized pyramids agree exactly",
            100 - mismatches
        ),
    );
}

// ---------------------------------------------------------------- 9

#[test]
fn criterion_09_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let mark = write_mark(dir.path(), "mark.pbm", &random_mark(900));
    let run = |tag: &str| {
        let out = dir.path().join(format!("{tag}.json"));
        let bench = BenchArgs {
            attacks: "all;awgn".into(),
            detectors: "I,II".into(),
            jpeg_sweep: Some("10..90".into()),
            seed: 1234,
            repeat: 2,
            out: Some(out.clone()),
            csv: None,
        };
        cmd_bench(&cover_path("camera"), &mark, &bench, &ConfigArgs::default()).unwrap();
        (
            std::fs::read(&out).unwrap(),
            std::fs::read(out.with_extension("csv")).unwrap(),
        )
    };
    let (json_a, csv_a) = run("a");
    let (json_b, csv_b) = run("b");
    let ok = json_a == json_b && csv_a == csv_b;
    verdict(
        9,
        "bench determinism",
        ok,
        &format!(
            "json {} bytes identical: {}; csv {} bytes identical: {}",
            json_a.len(),
            json_a == json_b,
            csv_a.len(),
            csv_a == csv_b
        ),
    );
}

// ---------------------------------------------------------------- 10

#[test]
fn criterion_10_null_behavior() {
    let cfg = EmbedConfig::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for name in BENCHMARK_IMAGES {
        let img = cover(name);
        let mean = (0..20u64)
            .map(|m| {
                let truth = random_mark(1000 + m);
                for det in detectors() {
                    let est = extract_image(&img, &img, &cfg, &det).unwrap();
                    assert_eq!(ber(&truth, &est), ber(&truth, &Watermark::filled(1)));
                }
                ber(
                    &truth,
                    &extract_image(&img, &img, &cfg, &detectors()[0]).unwrap(),
                )
            })
            .sum::<f64>()
            / 20.0;
        ok &= (0.35..=0.65).contains(&mean);
        parts.push(format!("{name} {mean:.4}"));
    }
    verdict(
        10,
        "no-mark null behavior (mean ber over 20 marks in [0.35, 0.65])",
        ok,
        &parts.join(", "),
    );
}
