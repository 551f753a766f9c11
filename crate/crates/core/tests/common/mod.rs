#![allow(dead_code)]

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wavemark::{read_image, Image};

pub const BENCHMARK_IMAGES: [&str; 5] = ["camera", "astronaut", "coffee", "chelsea", "coins"];

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn cover(name: &str) -> Image {
    read_image(data_dir().join("images").join(format!("{name}.pgm"))).unwrap()
}

pub fn random_image(width: usize, height: usize, seed: u64) -> Image {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Image::from_fn(width, height, |_, _| rng.random_range(0.0..255.0))
}
