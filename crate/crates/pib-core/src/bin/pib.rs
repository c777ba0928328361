use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pib_core::cli::{run_config_file, run_parsed, Overrides, RunConfig};

/// Exact bottleneck curves, conjugate limits, and bound checks on finite
/// worlds, driven by JSON configs.
#[derive(Parser)]
#[command(name = "pib", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a JSON config (curve, conjugate_limits, gibbs, augmentation, verify).
    Run {
        /// Path to the config file.
        config: PathBuf,
        /// Override the config's output path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads for the beta grid (0 = rayon default). Output
        /// bytes do not depend on this.
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Run the built-in invariant suite and report pass/fail counts.
    Verify {
        /// Seed for the randomized checks.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            out,
            seed,
            threads,
        } => {
            if threads > 0 {
                // Must precede any rayon use; ignore failure if a pool
                // already exists (e.g. under test harnesses).
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
            run_config_file(&config, &Overrides { out, seed })
        }
        Command::Verify { seed } => run_parsed(
            RunConfig::Verify(pib_core::cli::config::VerifyConfig { seed }),
            &Overrides::default(),
        ),
    };
    match result {
        Ok(outcome) => {
            if let Some(path) = outcome.out_path {
                eprintln!("wrote {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
