use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use sln_skein::cli::{run, Command, Format, SessionConfig, EXIT_FAILED, EXIT_OK};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Verb {
    Normalize,
    Eval,
    Check,
    Nilpotent,
    Split,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutputFormat {
    Text,
    Structured,
}

/// Classical stated SL_n-skein normal forms, evaluation and checks.
#[derive(Parser, Debug)]
#[command(name = "sln-skein", version)]
struct Args {
    /// Command to run.
    verb: Verb,
    /// Manifold spec file.
    #[arg(long)]
    manifold: Option<PathBuf>,
    /// Web expression or a file containing one.
    #[arg(long)]
    web: Option<String>,
    /// Polynomial to test (nilpotent).
    #[arg(long)]
    poly: Option<String>,
    /// Ideal generators separated by `;` (nilpotent).
    #[arg(long)]
    ideal: Option<String>,
    /// Representation file to evaluate at instead of sampled points (eval).
    #[arg(long)]
    rep: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    /// Gröbner budget in pair reductions.
    #[arg(long, default_value_t = 100_000)]
    budget: usize,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let command = match args.verb {
        Verb::Normalize => Command::Normalize,
        Verb::Eval => Command::Eval,
        Verb::Check => Command::Check,
        Verb::Nilpotent => Command::Nilpotent,
        Verb::Split => Command::Split,
    };
    let config = SessionConfig {
        manifold: args.manifold,
        web: args.web,
        poly: args.poly,
        ideal: args.ideal,
        rep: args.rep,
        seed: args.seed,
        trials: args.trials,
        budget: args.budget,
        tol: args.tol,
        format: match args.format {
            OutputFormat::Text => Format::Text,
            OutputFormat::Structured => Format::Structured,
        },
        ..SessionConfig::new(command)
    };
    let out = run(&config);
    if out.code == EXIT_OK || out.code == EXIT_FAILED {
        print!("{}", out.output);
    } else {
        eprint!("{}", out.output);
    }
    ExitCode::from(out.code as u8)
}
