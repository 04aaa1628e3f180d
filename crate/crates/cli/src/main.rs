//! `reflectnet`: batch front end over the encode, simulate, decode and
//! evaluation stages. Every stage reads and writes files; all randomness
//! comes from the `--seed` of the invocation.

mod commands;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use reflectnet_core::Error as CoreError;

use commands::Status;

#[derive(Debug, Parser)]
#[command(name = "reflectnet", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Encode JSON-lines frames into a rectified wire symbol file.
    Encode(commands::EncodeArgs),
    /// Turn a symbol file into a complex baseband capture.
    Simulate(commands::SimulateArgs),
    /// Demodulate and decode a capture into JSON-lines frames.
    Decode(commands::DecodeArgs),
    /// Run the evaluation harness.
    Eval(EvalArgs),
    /// Received power in dBm from the monostatic radar equation.
    Budget(commands::BudgetArgs),
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("mode").required(true).args(["sweep", "correlation", "cer_model"]))]
struct EvalArgs {
    /// Correction sweep over symbol error rates; writes CSV.
    #[arg(long)]
    sweep: bool,
    /// Correlate a capture against a scrambled-IDLE reference.
    #[arg(long, value_name = "IQ")]
    correlation: Option<std::path::PathBuf>,
    /// Closed-form code error rate for `--pe`.
    #[arg(long)]
    cer_model: bool,
    #[command(flatten)]
    opts: commands::EvalOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DiscriminatorArg {
    Median,
    Model,
}

const EXIT_DEGRADED: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_PIPELINE: u8 = 3;

/// Input problems are the caller's to fix; everything else is the
/// pipeline failing on otherwise well-formed data.
fn exit_code_for(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<clap::Error>().is_some() || err.downcast_ref::<std::io::Error>().is_some() {
        return EXIT_INPUT;
    }
    match err.downcast_ref::<CoreError>() {
        Some(
            CoreError::Parse { .. }
            | CoreError::Io(_)
            | CoreError::Json(_)
            | CoreError::InvalidParameter(_)
            | CoreError::InvalidScramblerState(_)
            | CoreError::InvalidCode(_)
            | CoreError::InvalidNibble(_)
            | CoreError::EmptyFrame,
        ) => EXIT_INPUT,
        Some(_) => EXIT_PIPELINE,
        None if err.downcast_ref::<commands::InputError>().is_some() => EXIT_INPUT,
        None => EXIT_PIPELINE,
    }
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var("REFLECTNET_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| commands::InputError(format!("REFLECTNET_THREADS must be a positive integer, got {raw:?}")))?;
    if n == 0 {
        return Err(commands::InputError("REFLECTNET_THREADS must be at least 1".into()).into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    log::debug!("worker threads capped at {n}");
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<Status> {
    configure_threads()?;
    match cli.command {
        Command::Encode(a) => commands::encode(&a),
        Command::Simulate(a) => commands::simulate(&a),
        Command::Decode(a) => commands::decode(&a),
        Command::Eval(a) => match (a.sweep, a.correlation, a.cer_model) {
            (true, _, _) => commands::eval_sweep(&a.opts),
            (_, Some(path), _) => commands::eval_correlation(&path, &a.opts),
            _ => commands::eval_cer(&a.opts),
        },
        Command::Budget(a) => commands::budget(&a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_INPUT)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Degraded) => ExitCode::from(EXIT_DEGRADED),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
