use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hybrid_forecast::config::RunConfig;
use hybrid_forecast::eval::render_table;
use hybrid_forecast::ingest::{OpenMeteoClient, ARCHIVE_URL};
use hybrid_forecast::pipeline::{cmd_evaluate, cmd_fetch, cmd_forecast, cmd_train};
use hybrid_forecast::Error;

/// Hybrid SARIMA-LSTM daily temperature forecasting.
#[derive(Parser)]
#[command(name = "forecast", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON run configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Dotted `key=value` override, applied after the config file.
    #[arg(long = "override", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Download daily weather into the cache (skipped on a cache hit).
    Fetch,
    /// Fit SARIMA and the LSTMs and write the model bundle.
    Train,
    /// Forecast the held-out horizon with every configured model.
    Forecast,
    /// Score the forecast and write metrics, curves and plot script.
    Evaluate,
    /// Print the effective configuration.
    Config,
}

fn exit_code(err: &Error) -> u8 {
    match err.root() {
        Error::MissingArtifact(_) => 3,
        Error::Numerical(_)
        | Error::NonConvergence { .. }
        | Error::TrainingDiverged { .. }
        | Error::ConstraintViolation(_) => 4,
        Error::Transport(_) | Error::Request { .. } | Error::Io { .. } => 1,
        _ => 2,
    }
}

fn run(cli: Cli) -> hybrid_forecast::Result<()> {
    let config = RunConfig::resolve(cli.config.as_deref(), &cli.overrides)?;
    match cli.command {
        Command::Fetch => {
            let summary = cmd_fetch(&config, &OpenMeteoClient::new(ARCHIVE_URL))?;
            println!(
                "{} rows ({} missing cells) in {}",
                summary.rows,
                summary.missing_cells,
                summary.path.display()
            );
        }
        Command::Train => {
            let (_, log) = cmd_train(&config)?;
            println!(
                "sarima loglik {:.4}; {} windows; final residual loss {:.6}",
                log.sarima_loglik,
                log.window_count,
                log.residual_history.last().copied().unwrap_or(f64::NAN)
            );
            println!("model bundle written to {}", config.paths.model_dir.display());
        }
        Command::Forecast => {
            let out = cmd_forecast(&config)?;
            println!(
                "{} forecast days written to {}",
                out.report.len(),
                config.paths.output_dir.display()
            );
        }
        Command::Evaluate => {
            let summaries = cmd_evaluate(&config)?;
            print!("{}", render_table(&summaries));
        }
        Command::Config => println!("{}", config.to_json()?),
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
