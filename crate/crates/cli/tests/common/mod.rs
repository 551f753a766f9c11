#![allow(dead_code)]

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wavemark::{read_image, read_watermark, write_watermark, Image, Watermark};

pub const BENCHMARK_IMAGES: [&str; 5] = ["camera", "astronaut", "coffee", "chelsea", "coins"];

pub fn cover_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("../../data/images/{name}.pgm"))
}

pub fn cover(name: &str) -> Image {
    read_image(cover_path(name)).unwrap()
}

pub fn random_mark(seed: u64) -> Watermark {
    Watermark::random(&mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn random_image(width: usize, height: usize, seed: u64) -> Image {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Image::from_fn(width, height, |_, _| rng.random_range(0.0..255.0))
}

pub fn write_mark(dir: &Path, name: &str, wm: &Watermark) -> PathBuf {
    let path = dir.join(name);
    write_watermark(wm, &path).unwrap();
    assert_eq!(&read_watermark(&path).unwrap(), wm);
    path
}
