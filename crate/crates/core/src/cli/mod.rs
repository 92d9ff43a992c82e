//! Command-line front end: config files, experiment runners and output files.

mod commands;
mod config;
mod experiments;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{cmd_dump_timeline, cmd_oracle, cmd_run, cmd_sample, Overrides, BUILD_ID};
pub use config::{
    CloudConfig, ExperimentConfig, ExperimentKind, InteractionConfig, MaceSettings, Preset, ProtocolConfig,
};
pub use experiments::{realization_seed, resolved_cloud, run_experiment, timelines, Backend, Report, ORACLE_MAX_ATOMS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "rydberg-reversal",
    version,
    about = "Time-reversal dynamics of disordered dipolar spins"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; all cores when absent.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// One of 0.43MHz, 0.79MHz, 0.95MHz.
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample an ensemble and print its diagnostics.
    Sample(Common),
    /// Run an experiment with MACE.
    Run(Common),
    /// Run an experiment with dense full-system evolution (at most 12 atoms).
    Oracle(Common),
    /// Print the event timelines an experiment builds.
    DumpTimeline(Common),
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            config: self.config.clone(),
            seed: self.seed,
            out_dir: self.out_dir.clone(),
            preset: self.preset.clone(),
        }
    }
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let (common, verb) = match &cli.command {
        Command::Sample(c) => (c, "sample"),
        Command::Run(c) => (c, "run"),
        Command::Oracle(c) => (c, "oracle"),
        Command::DumpTimeline(c) => (c, "dump-timeline"),
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = common.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return EXIT_CONFIG;
        }
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start the worker pool: {e}");
            return EXIT_RUNTIME;
        }
    };
    let o = common.overrides();
    let result = pool.install(|| match verb {
        "sample" => cmd_sample(&o),
        "run" => cmd_run(&o),
        "oracle" => cmd_oracle(&o),
        _ => cmd_dump_timeline(&o),
    });
    match result {
        Ok(text) => {
            print!("{text}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config_error() {
                EXIT_CONFIG
            } else {
                EXIT_RUNTIME
            }
        }
    }
}
