//! Command implementations behind the `wavemark` binary.
//!
//! Each `cmd_*` function does the work of one subcommand and returns a
//! printable summary, so the binary stays a thin argument parser and the
//! commands can be driven directly from tests.

pub mod bench;
pub mod commands;
pub mod report;

pub use bench::{run_bench, BenchOptions};
pub use commands::{cmd_attack, cmd_bench, cmd_embed, cmd_extract, ConfigArgs};
pub use report::{BenchReport, SweepRow};
