use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pofdma::harness::{self, Experiment, Overrides};
use pofdma::Error;

/// Uplink multiple-access link simulator.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// PAPR samples, CCDF grid and average PAPR per N/K.
    Papr(RunArgs),
    /// Bit error rate over the SNR and delay-spread sweeps.
    Ber(RunArgs),
    /// Welch spectra of selected users and of the whole band.
    Psd(RunArgs),
    /// Operation-count tables.
    Complexity(RunArgs),
    /// Every experiment in sequence.
    All(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Subcarriers per block.
    #[arg(long = "N")]
    n: Option<usize>,
    /// Number of users (repeatable).
    #[arg(long = "K")]
    k: Vec<usize>,
    /// Scheme name (repeatable), e.g. OFDMA, SC-FDMA, P-OFDMA-DFT.
    #[arg(long)]
    scheme: Vec<String>,
    /// Modulation order, 16 or 64 (repeatable).
    #[arg(long = "mod")]
    modulation: Vec<u32>,
    /// SNR grid `lo..hi:step` or a comma list such as `10,20,inf`.
    #[arg(long, allow_hyphen_values = true)]
    snr: Option<String>,
    /// Delay spread in ns (repeatable).
    #[arg(long = "delay-ns")]
    delay_ns: Vec<f64>,
    /// Blocks per PAPR point.
    #[arg(long)]
    blocks: Option<usize>,
    /// Blocks per BER point.
    #[arg(long)]
    ber_blocks: Option<usize>,
    /// Blocks in each PSD stream.
    #[arg(long)]
    psd_blocks: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Cyclic prefix length (default N/4).
    #[arg(long)]
    cp_len: Option<usize>,
    /// PAPR oversampling factor (power of two).
    #[arg(long)]
    oversample: Option<usize>,
    /// Measure PAPR over the CP-extended block.
    #[arg(long)]
    papr_with_cp: bool,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 uses every core).
    #[arg(long)]
    workers: Option<usize>,
    /// TOML file with configuration keys.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl RunArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            n: self.n,
            k: self.k.clone(),
            schemes: self.scheme.clone(),
            modulations: self.modulation.clone(),
            snr: self.snr.clone(),
            delay_ns: self.delay_ns.clone(),
            blocks: self.blocks,
            ber_blocks: self.ber_blocks,
            psd_blocks: self.psd_blocks,
            seed: self.seed,
            cp_len: self.cp_len,
            oversample: self.oversample,
            papr_with_cp: self.papr_with_cp,
            out: self.out.clone(),
            workers: self.workers,
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config { .. } => 2,
        Error::Io { .. } => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, experiments) = match &cli.command {
        Command::Papr(a) => (a, vec![Experiment::Papr]),
        Command::Ber(a) => (a, vec![Experiment::Ber]),
        Command::Psd(a) => (a, vec![Experiment::Psd]),
        Command::Complexity(a) => (a, vec![Experiment::Complexity]),
        Command::All(a) => (a, Experiment::ALL.to_vec()),
    };
    let result = harness::parse_config(&args.overrides(), args.config.as_deref())
        .and_then(|cfg| harness::run(&cfg, &experiments));
    match result {
        Ok(summary) => {
            for f in &summary.files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
