use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use wavemark::{
    apply_attack, dwt2, embed_image, extract_image, idwt2, jpeg_codec, ssim, AttackSpec,
    DetectorStructure, EmbedConfig, Watermark,
};
use wavemark_bench::cover;

fn transform(c: &mut Criterion) {
    let img = cover("camera");
    c.bench_function("dwt2 256x256 L=3", |b| {
        b.iter(|| dwt2(black_box(&img), 3).unwrap())
    });
    let pyr = dwt2(&img, 3).unwrap();
    c.bench_function("idwt2 256x256 L=3", |b| {
        b.iter(|| idwt2(black_box(&pyr)).unwrap())
    });
}

fn watermark(c: &mut Criterion) {
    let img = cover("camera");
    let cfg = EmbedConfig::default();
    let wm = Watermark::letter_m();
    c.bench_function("embed_image", |b| {
        b.iter(|| embed_image(black_box(&img), &wm, &cfg).unwrap())
    });
    let (marked, _) = embed_image(&img, &wm, &cfg).unwrap();
    let det = DetectorStructure::detector_i(3);
    c.bench_function("extract_image detector I", |b| {
        b.iter(|| extract_image(&img, black_box(&marked), &cfg, &det).unwrap())
    });
}

fn attacks(c: &mut Criterion) {
    let img = cover("camera");
    c.bench_function("jpeg q=50", |b| {
        b.iter(|| jpeg_codec(black_box(&img), 50).unwrap())
    });
    let median: AttackSpec = "median".parse().unwrap();
    c.bench_function("median 3x3", |b| {
        b.iter(|| apply_attack(black_box(&img), &median).unwrap())
    });
    let other = cover("coins");
    c.bench_function("ssim", |b| {
        b.iter(|| ssim(black_box(&img), &other).unwrap())
    });
}

criterion_group!(benches, transform, watermark, attacks);
criterion_main!(benches);
