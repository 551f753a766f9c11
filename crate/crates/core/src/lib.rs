//! Robust watermarking of grayscale images in the wavelet domain.
//!
//! A 16×16 bipolar mark is embedded multiplicatively into the significant
//! detail coefficients of a three-level Daubechies-2 decomposition and
//! recovered non-blindly (the decoder has the original cover) with
//! per-subband majority votes. The crate also carries the attack catalog
//! and the quality/security metrics used to benchmark robustness.

pub mod attacks;
pub mod dwt;
pub mod error;
pub mod metrics;
pub mod pixmap;
pub mod watermarker;

pub use attacks::{apply_attack, jpeg_codec, AttackKind, AttackSpec};
pub use dwt::{
    db2_filters, dwt2, idwt2, FilterPair, Matrix, Orientation, SubbandId, WaveletPyramid,
};
pub use error::{Error, Result};
pub use metrics::{ber, kl_security, mutual_information, ncc, psnr, ssim, MetricsReport};
pub use pixmap::{
    read_image, read_watermark, write_image, write_watermark, Image, Watermark, MARK_BITS,
    MARK_SIDE,
};
pub use watermarker::{
    compute_thresholds, decode, embed, embed_image, extract_image, extract_tallies, extract_votes,
    DetectorStructure, EmbedConfig, EmbedReport, Modulation, Tally, ThresholdMap, VoteTallies,
};
