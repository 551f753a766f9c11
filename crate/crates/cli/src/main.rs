use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use wavemark_cli::commands::BenchArgs;
use wavemark_cli::{cmd_attack, cmd_bench, cmd_embed, cmd_extract, ConfigArgs};

/// Wavelet-domain watermark embedding, extraction and robustness benchmarks.
#[derive(Debug, Parser)]
#[command(name = "wavemark", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Embed a 16×16 PBM mark into a PGM cover.
    Embed {
        cover: PathBuf,
        watermark: PathBuf,
        out: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Recover the mark from a received image, given the original cover.
    Extract {
        cover: PathBuf,
        received: PathBuf,
        out: PathBuf,
        /// `I`, `II`, or a subband list such as `h2,v2,v3`.
        #[arg(long, default_value = "I")]
        detector: String,
        /// True mark; when given, BER and NCC are printed.
        #[arg(long)]
        truth: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Apply one attack, e.g. `jpeg:q=50` or `awgn:snr_db=11.4,seed=7`.
    Attack {
        input: PathBuf,
        out: PathBuf,
        spec: String,
    },
    /// Embed once, then attack and extract for every attack and detector.
    Bench {
        cover: PathBuf,
        watermark: PathBuf,
        #[command(flatten)]
        bench: BenchArgs,
        #[command(flatten)]
        config: ConfigArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Embed {
            cover,
            watermark,
            out,
            config,
        } => cmd_embed(cover, watermark, out, config),
        Command::Extract {
            cover,
            received,
            out,
            detector,
            truth,
            config,
        } => cmd_extract(cover, received, out, detector, truth.as_deref(), config),
        Command::Attack { input, out, spec } => cmd_attack(input, out, spec),
        Command::Bench {
            cover,
            watermark,
            bench,
            config,
        } => cmd_bench(cover, watermark, bench, config),
    };
    match result {
        Ok(summary) => {
            if matches!(cli.command, Command::Bench { .. }) {
                println!("{summary}");
            } else {
                eprintln!("{summary}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
