//! Shared inputs for the criterion benchmarks.

use std::path::PathBuf;

use wavemark::{read_image, Image};

/// Directory holding the benchmark images shipped with the repository.
pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

/// Load one of the bundled 256×256 covers by stem, e.g. `"camera"`.
pub fn cover(name: &str) -> Image {
    read_image(data_dir().join("images").join(format!("{name}.pgm")))
        .unwrap_or_else(|e| panic!("loading {name}: {e}"))
}
