use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use svhmc::pipeline::{exit_code, FitModel, Outcome, Pipeline, RunConfig, EXIT_CONFIG, EXIT_OK, EXIT_WARNINGS};

#[derive(Parser)]
#[command(name = "svhmc", version, about = "Stochastic volatility by hybrid Monte Carlo")]
struct Cli {
    /// TOML run configuration; defaults apply to anything it omits.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides every seed in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic daily (and intraday) data plus a truth file.
    Simulate,
    /// Fit a model to the daily returns.
    Fit {
        #[arg(value_enum)]
        model: ModelArg,
    },
    /// Realized variance per sampling interval and the signature table.
    Rv,
    /// Score fitted volatility paths against scaled realized variance.
    Evaluate,
    /// Collect stage outputs into one manifest.
    Report,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Sv,
    Garch,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    };
    let mut cfg = match cfg {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    if let Some(seed) = cli.seed {
        cfg.override_seed(seed);
    }
    let result = Pipeline::new(cfg, &cli.out).and_then(|p| match cli.command {
        Command::Simulate => p.simulate(),
        Command::Fit { model: ModelArg::Sv } => p.fit(FitModel::Sv),
        Command::Fit { model: ModelArg::Garch } => p.fit(FitModel::Garch),
        Command::Rv => p.rv(),
        Command::Evaluate => p.evaluate(),
        Command::Report => p.report(),
    });
    match result {
        Ok(Outcome { files, warnings, message }) => {
            print!("{message}");
            if !message.ends_with('\n') {
                println!();
            }
            for f in &files {
                println!("wrote {}", f.display());
            }
            for w in &warnings {
                eprintln!("warning: {w}");
            }
            ExitCode::from(if warnings.is_empty() { EXIT_OK } else { EXIT_WARNINGS } as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
