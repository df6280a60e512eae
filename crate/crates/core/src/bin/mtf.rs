use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use lstm_mtf::bench::{cmd_run, cmd_sweep, cmd_validate, ExperimentConfig, Overrides};
use lstm_mtf::Error;

/// Seeded multi-target filtering experiments.
///
/// Values given on the command line override the config file, which
/// overrides the built-in defaults.
#[derive(Parser)]
#[command(name = "mtf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Experiment config (JSON). Built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Seeds, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    seed: Option<Vec<u64>>,

    /// Clutter rates, comma separated.
    #[arg(long = "lambda-c", global = true, value_delimiter = ',')]
    lambda_c: Option<Vec<f64>>,

    /// Number of simulated steps.
    #[arg(long, global = true)]
    steps: Option<usize>,

    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the filter at one clutter rate for every seed.
    Run,
    /// Run every (clutter rate, seed) pair and aggregate.
    Sweep,
    /// Check the configuration and print the effective parameters.
    Validate,
}

fn exit_for(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    if e.is_divergence() {
        ExitCode::from(2)
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut cfg = match &cli.config {
        Some(path) => match ExperimentConfig::load(path) {
            Ok(c) => c,
            Err(e) => return exit_for(&e),
        },
        None => ExperimentConfig::default(),
    };
    cfg.apply(Overrides {
        seeds: cli.seed,
        lambda_c: cli.lambda_c,
        steps: cli.steps,
        out_dir: cli.out,
    });

    match cli.command {
        Command::Validate => {
            let report = cmd_validate(&cfg);
            for (k, v) in &report.parameters {
                println!("{k:<40} {v}");
            }
            if report.is_ok() {
                println!("ok");
                ExitCode::SUCCESS
            } else {
                for v in &report.violations {
                    eprintln!("invalid: {v}");
                }
                ExitCode::from(1)
            }
        }
        Command::Run => match cmd_run(&cfg) {
            Ok(summaries) => {
                for s in summaries {
                    println!(
                        "lambda_c={} seed={} ospa={:.3}±{:.3} loc={:.3} card={:.3}",
                        s.lambda_c, s.seed, s.mean_total, s.std_total, s.mean_loc, s.mean_card
                    );
                }
                ExitCode::SUCCESS
            }
            Err(e) => exit_for(&e),
        },
        Command::Sweep => match cmd_sweep(&cfg) {
            Ok(report) => {
                for (l, m) in report.curve() {
                    println!("lambda_c={l} mean_ospa={m:.3}");
                }
                let mut code = ExitCode::SUCCESS;
                for r in report.failures() {
                    if let Err(e) = &r.outcome {
                        eprintln!("lambda_c={} seed={} failed: {e}", r.lambda_c, r.seed);
                        code = if e.is_divergence() {
                            ExitCode::from(2)
                        } else {
                            ExitCode::from(1)
                        };
                    }
                }
                code
            }
            Err(e) => exit_for(&e),
        },
    }
}
