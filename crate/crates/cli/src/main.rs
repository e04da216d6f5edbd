//! `gbsoft`: parameter solving, soft-label encoding, density export, metric
//! evaluation and the synthetic benchmark from the command line.
//!
//! Exit codes: 0 success, 1 runtime or I/O error, 2 usage error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "gbsoft",
    version,
    about = "Generalised-beta soft labels for ordinal classification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct EncodingArgs {
    /// Number of ordinal classes (at least 3).
    #[arg(long, value_parser = clap::value_parser!(u32).range(3..))]
    classes: u32,
    /// First-class constraint weight.
    #[arg(long, default_value_t = 1.0, value_parser = positive_f64)]
    lambda: f64,
    /// Last-class constraint weight.
    #[arg(long, default_value_t = 1.0, value_parser = positive_f64)]
    eta: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the per-class distribution parameters as JSON.
    Params(EncodingArgs),
    /// Write the soft-label matrix as CSV.
    Encode {
        #[command(flatten)]
        encoding: EncodingArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print `x,density` samples of one class's density on an open grid.
    Pdf {
        #[command(flatten)]
        encoding: EncodingArgs,
        /// 1-based class index.
        #[arg(long = "class")]
        class: usize,
        #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u32).range(2..))]
        points: u32,
        /// Override the solved parameters (requires --u and --v as well).
        #[arg(long, value_parser = positive_f64, requires_all = ["u", "v"])]
        alpha: Option<f64>,
        #[arg(long, value_parser = positive_f64, requires_all = ["alpha", "v"])]
        u: Option<f64>,
        #[arg(long, value_parser = positive_f64, requires_all = ["alpha", "u"])]
        v: Option<f64>,
    },
    /// Score a `true,pred` CSV of 1-based labels and print the metrics as JSON.
    Eval {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
        classes: u32,
    },
    /// Run the synthetic benchmark and write results.csv and summary.json.
    Bench(commands::BenchArgs),
}

fn positive_f64(s: &str) -> Result<f64, String> {
    let value: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(format!("must be a positive number, got {s}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Params(args) => commands::params(&args),
        Command::Encode { encoding, out } => commands::encode(&encoding, &out),
        Command::Pdf {
            encoding,
            class,
            points,
            alpha,
            u,
            v,
        } => {
            if class == 0 || class > encoding.classes as usize {
                Cli::command()
                    .error(
                        clap::error::ErrorKind::ValueValidation,
                        format!("--class must be between 1 and {}, got {class}", encoding.classes),
                    )
                    .exit();
            }
            let override_params = alpha.zip(u).zip(v).map(|((a, u), v)| (a, u, v));
            commands::pdf(&encoding, class, points as usize, override_params)
        }
        Command::Eval { input, classes } => commands::eval(&input, classes as usize),
        Command::Bench(args) => commands::bench(&args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}
