//! `brauer`: reproducible experiments over the Brauer-diagram Weingarten
//! calculus. Every run prints one report (JSON or `field,value` CSV) carrying
//! the parameters, seed and library version.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use brauer_weingarten::tensor_rep::{dimension_cap, set_dimension_cap};
use brauer_weingarten::Error as LibError;
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Seed used when neither `--seed` nor `BRAUER_SEED` is given.
pub const DEFAULT_SEED: u64 = 20_240_601;
pub const DEFAULT_SAMPLES: u64 = 20_000;

#[derive(Parser, Debug)]
#[command(name = "brauer", version, about = "Orthogonal and unitary Haar moments via Brauer diagrams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Options,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Gram matrix G[m,n] = d^cycles(m ∪ n) over the Brauer basis
    Gram,
    /// Pseudo-inverse of the Gram matrix
    Weingarten,
    /// Numeric trace distance between the real and complex Haar moments, and the closed-form bound
    TraceDistance,
    /// Compare an orthogonal-orbit moment with the unitary Haar moment
    DesignCheck,
    /// Exact overlap constraints for an orthogonal orbit to be a t-design
    Constraints,
    /// Check that the t >= 4 constraint system is inconsistent for d >= 2
    Impossibility,
    /// Monte Carlo moment operator of a Haar ensemble
    SampleMoment,
    /// Monte Carlo Helstrom distinguisher between real and complex states
    Helstrom,
    /// Run the full acceptance grid
    VerifyAll,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Gram => "gram",
            Command::Weingarten => "weingarten",
            Command::TraceDistance => "trace-distance",
            Command::DesignCheck => "design-check",
            Command::Constraints => "constraints",
            Command::Impossibility => "impossibility",
            Command::SampleMoment => "sample-moment",
            Command::Helstrom => "helstrom",
            Command::VerifyAll => "verify-all",
        }
    }

    fn uses_rng(self) -> bool {
        matches!(self, Command::SampleMoment | Command::Helstrom | Command::VerifyAll)
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ensemble {
    UnitaryHaar,
    OrthogonalOrbit,
}

#[derive(Args, Debug)]
pub struct Options {
    /// Number of tensor copies
    #[arg(long = "t", global = true, value_parser = clap::value_parser!(u32).range(1..))]
    t: Option<u32>,
    /// Local dimension
    #[arg(long = "d", global = true, value_parser = clap::value_parser!(u32).range(1..))]
    d: Option<u32>,
    /// Monte Carlo trials for sampling commands
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    n_samples: Option<u64>,
    #[arg(long, global = true, env = "BRAUER_SEED")]
    seed: Option<u64>,
    /// Worker threads for sampling commands [default: available parallelism]
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    workers: Option<u32>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of standard output
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Largest dense matrix side allowed (d^t for tensor operators)
    #[arg(long, global = true, env = "BRAUER_CAP", value_parser = clap::value_parser!(u64).range(1..))]
    cap: Option<u64>,
    /// Ensemble for sample-moment
    #[arg(long, global = true, value_enum, default_value_t = Ensemble::UnitaryHaar)]
    ensemble: Ensemble,
    /// design-check: use the two-amplitude state with |Σψ²| equal to this value
    /// instead of the 3-design state
    #[arg(long, global = true)]
    overlap: Option<f64>,
}

/// Parameters after defaults and environment overrides are applied.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub t: Option<usize>,
    pub d: Option<usize>,
    pub n_samples: usize,
    pub seed: u64,
    pub workers: usize,
    pub ensemble: Ensemble,
    pub overlap: Option<f64>,
}

impl RunConfig {
    pub fn t(&self) -> Result<usize, CliError> {
        self.t.ok_or_else(|| CliError::Config(format!("{} requires --t", self.command.name())))
    }

    pub fn d(&self) -> Result<usize, CliError> {
        self.d.ok_or_else(|| CliError::Config(format!("{} requires --d", self.command.name())))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Library(#[from] LibError),
    #[error("cannot write {}: {source}", path.display())]
    Output { path: PathBuf, source: std::io::Error },
    #[error("failed to encode report: {0}")]
    Encode(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Output { .. } => 2,
            CliError::Library(LibError::MemoryCap { .. }) => 3,
            CliError::Library(LibError::Size(_) | LibError::Domain(_) | LibError::Contract(_)) => 2,
            CliError::Library(_) | CliError::Encode(_) => 1,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

/// Returns `Ok(false)` when the report was written but a verification failed.
fn run(cli: Cli) -> Result<bool, CliError> {
    let started = Instant::now();
    let opts = cli.opts;
    if let Some(cap) = opts.cap {
        let cap = usize::try_from(cap).map_err(|_| CliError::Config(format!("--cap {cap} is too large")))?;
        set_dimension_cap(cap);
    }
    if opts.overlap.is_some() && cli.command != Command::DesignCheck {
        return Err(CliError::Config("--overlap only applies to design-check".into()));
    }
    let default_workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let config = RunConfig {
        command: cli.command,
        t: opts.t.map(|t| t as usize),
        d: opts.d.map(|d| d as usize),
        n_samples: opts.n_samples.unwrap_or(DEFAULT_SAMPLES) as usize,
        seed: opts.seed.unwrap_or(DEFAULT_SEED),
        workers: opts.workers.map_or(default_workers, |w| w as usize),
        ensemble: opts.ensemble,
        overlap: opts.overlap,
    };

    let outcome = commands::execute(&config)?;
    let envelope = report::Envelope {
        command: config.command.name(),
        version: env!("CARGO_PKG_VERSION"),
        t: config.t,
        d: config.d,
        seed: config.seed,
        workers: config.command.uses_rng().then_some(config.workers),
        cap: dimension_cap(),
        result: outcome.result,
        elapsed_seconds: started.elapsed().as_secs_f64(),
    };
    let text = match opts.format {
        Format::Json => report::to_json(&envelope)?,
        Format::Csv => report::to_csv(&envelope)?,
    };
    report::write(&text, opts.output.as_deref())?;
    if let Some(reason) = &outcome.failure {
        eprintln!("verification failed: {reason}");
    }
    Ok(outcome.failure.is_none())
}
