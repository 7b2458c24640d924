//! `heatlog`: moment sequences, walk-identity verification, dichotomy
//! budgets, corruption certificates, and the continuous-time probe, as
//! reproducible seeded runs with machine-readable reports.

mod commands;
mod fixtures;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{CheckArgs, CheckKind, GadgetArgs, HammingArgs, HammingSub, KindArg};
use output::{emit, Format, EXIT_OK, EXIT_USAGE, EXIT_VERDICT};

#[derive(Parser)]
#[command(
    name = "heatlog",
    about = "Heat-moment sequences, divergence-identity verification and corruption-bound certificates",
    version
)]
struct Cli {
    /// Master seed; all randomness flows from it through counter-based streams.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Log-domain slack tolerance for pass/fail verdicts.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (falls back to HEATLOG_THREADS, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the (t, m_t, log2 m_t) table of an instance.
    Moments {
        #[arg(long)]
        kernel: PathBuf,
        #[arg(long)]
        u: PathBuf,
        #[arg(long)]
        v: PathBuf,
        #[arg(long, default_value_t = 16)]
        t_max: usize,
        /// Cross-check against the dense spectral sum.
        #[arg(long)]
        spectral: bool,
    },
    /// Run a verifier suite; exit 0 iff every verdict passes.
    Check {
        #[arg(value_enum)]
        kind: CheckKind,
        #[arg(long)]
        random: bool,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        /// Sizes as an inclusive range "3..10" or a list "3,5,7".
        #[arg(long, default_value = "3..8")]
        sizes: String,
        /// Fixed time step (default: cycled per trial).
        #[arg(long)]
        t: Option<usize>,
        #[arg(long, default_value_t = 10)]
        t_max: usize,
        /// For `check walks`: 3.3, 3.5, 3.6 or chain.
        #[arg(long)]
        lemma: Option<String>,
        /// Named instance: path2, path4, cube3, complete4.
        #[arg(long)]
        fixture: Option<String>,
        #[arg(long, default_value_t = 0.95)]
        epsilon: f64,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value_t = 0.6)]
        density: f64,
    },
    /// Randomized counterexample search with replayable arg-min instances.
    Search {
        #[arg(long, default_value = "3..8")]
        sizes: String,
        #[arg(long, default_value_t = 12)]
        t_max: usize,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0.95)]
        epsilon: f64,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value_t = 0.6)]
        density: f64,
    },
    /// Corruption certificates, the parity-tree bound, and the coset identity.
    Hamming {
        #[arg(value_enum)]
        sub: HammingSub,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        /// Growth exponent, default 1 - 0.95.
        #[arg(long, default_value_t = 0.05)]
        alpha1: f64,
        /// Product constant, default (4/3)(0.95 - 7/8)^2.
        #[arg(long, default_value_t = 0.0075)]
        alpha2: f64,
        #[arg(long, value_enum, default_value_t = KindArg::Klogdelta)]
        kind: KindArg,
        #[arg(long)]
        exhaustive: bool,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
    },
    /// Continuous-time heat profile with the near-log-convexity residual.
    Continuous {
        #[arg(long)]
        kernel: PathBuf,
        #[arg(long)]
        u: PathBuf,
        #[arg(long)]
        v: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        grid_start: f64,
        #[arg(long, default_value_t = 8.0)]
        grid_stop: f64,
        #[arg(long, default_value_t = 16)]
        grid_count: usize,
        /// Finite-difference step (default 1e-3 of the grid spacing).
        #[arg(long)]
        h: Option<f64>,
    },
    /// Single-instance dichotomy verdict with the full budget report.
    Gadget {
        #[arg(long)]
        fixture: Option<String>,
        #[arg(long, default_value_t = 4)]
        size: usize,
        #[arg(long, default_value_t = 8)]
        t: usize,
        #[arg(long, default_value_t = 0.95)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.6)]
        density: f64,
    },
}

fn configure_threads(cli_threads: Option<usize>) {
    let threads = cli_threads.or_else(|| {
        std::env::var("HEATLOG_THREADS")
            .ok()
            .and_then(|s| s.parse().ok())
    });
    if let Some(n) = threads {
        // ignore failure: the global pool may already exist in tests
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn run(cli: Cli) -> commands::CmdResult {
    match cli.command {
        Command::Moments {
            kernel,
            u,
            v,
            t_max,
            spectral,
        } => commands::cmd_moments(&kernel, &u, &v, t_max, spectral, cli.format),
        Command::Check {
            kind,
            random,
            trials,
            sizes,
            t,
            t_max,
            lemma,
            fixture,
            epsilon,
            delta,
            density,
        } => commands::cmd_check(&CheckArgs {
            kind,
            random,
            trials,
            sizes: commands::parse_sizes(&sizes)?,
            t,
            t_max,
            lemma,
            fixture,
            epsilon,
            delta,
            density,
            seed: cli.seed,
            tol: cli.tol,
        }),
        Command::Search {
            sizes,
            t_max,
            trials,
            epsilon,
            delta,
            density,
        } => commands::cmd_search(
            commands::parse_sizes(&sizes)?,
            t_max,
            trials,
            epsilon,
            delta,
            density,
            cli.seed,
            cli.tol,
        ),
        Command::Hamming {
            sub,
            n,
            k,
            delta,
            alpha1,
            alpha2,
            kind,
            exhaustive,
            trials,
        } => commands::cmd_hamming(&HammingArgs {
            sub,
            n,
            k,
            delta,
            alpha1,
            alpha2,
            kind,
            exhaustive,
            trials,
            seed: cli.seed,
            tol: cli.tol,
        }),
        Command::Continuous {
            kernel,
            u,
            v,
            grid_start,
            grid_stop,
            grid_count,
            h,
        } => commands::cmd_continuous(
            &kernel,
            &u,
            &v,
            grid_start,
            grid_stop,
            grid_count,
            h,
            cli.format,
        ),
        Command::Gadget {
            fixture,
            size,
            t,
            epsilon,
            density,
        } => commands::cmd_gadget(&GadgetArgs {
            fixture,
            size,
            t,
            epsilon,
            density,
            seed: cli.seed,
            tol: cli.tol,
        }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads(cli.threads);
    let out = cli.out.clone();
    match run(cli) {
        Ok(output) => {
            if let Err(e) = emit(&out, &output.body) {
                eprintln!("heatlog: cannot write report: {e}");
                return ExitCode::from(EXIT_USAGE as u8);
            }
            if output.all_pass {
                ExitCode::from(EXIT_OK as u8)
            } else {
                ExitCode::from(EXIT_VERDICT as u8)
            }
        }
        Err(message) => {
            eprintln!("heatlog: {message}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
