use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fkpp::config::{self, SimulateConfig, ValidateFkConfig};
use fkpp::error::{AppError, AppResult};
use fkpp::manifest::RunManifest;
use fkpp::parallel::thread_pool;
use fkpp::workflows::{self, SpectrumRequest, WaveRequest};
use fkpp_core::wave::FrontSearch;
use fkpp_core::ModelParams;

/// Traveling waves of the two-species FKPP system and their stability.
#[derive(Debug, Parser)]
#[command(name = "fkpp", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Random seed; overrides the seed of a config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; all cores when omitted.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a wave profile for given `K`, or find the invading front.
    Wave {
        #[arg(long, default_value_t = 2.0)]
        c: f64,
        #[arg(long)]
        d: f64,
        #[arg(long, default_value_t = 0.0)]
        r: f64,
        /// `i` at minus infinity.
        #[arg(long, conflicts_with = "find_front", required_unless_present = "find_front")]
        k: Option<f64>,
        #[arg(long)]
        find_front: bool,
    },
    /// Essential spectrum and Evans winding number of a stored profile.
    Spectrum {
        #[arg(long)]
        profile: PathBuf,
        #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
        alpha_minus: f64,
        /// Inner radius of the contour.
        #[arg(long, default_value_t = 1e-3)]
        delta: f64,
        /// Outer radius; the energy bound when omitted.
        #[arg(long)]
        radius: Option<f64>,
    },
    /// Direct PDE simulation.
    Simulate {
        #[arg(long, conflicts_with = "scenario", required_unless_present = "scenario")]
        config: Option<PathBuf>,
        /// Built-in scenario with default settings: fig1, decay or steadiness.
        #[arg(long)]
        scenario: Option<String>,
    },
    /// Monte Carlo checks of the first-passage representation.
    ValidateFk {
        /// All checks with their defaults when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Summary of every run below a directory.
    Report {
        #[arg(long)]
        dir: Option<PathBuf>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Self::Wave { .. } => "wave",
            Self::Spectrum { .. } => "spectrum",
            Self::Simulate { .. } => "simulate",
            Self::ValidateFk { .. } => "validate-fk",
            Self::Report { .. } => "report",
        }
    }
}

fn run(cli: Cli) -> AppResult<RunManifest> {
    let out = cli.common.out.clone().unwrap_or_else(|| PathBuf::from("runs").join(cli.command.name()));
    match cli.command {
        Command::Wave { c, d, r, k, find_front: _ } => {
            let params = ModelParams::new(c, d, r)?;
            workflows::run_wave(&WaveRequest { params, k, search: FrontSearch::default() }, &out)
        }
        Command::Spectrum { profile, alpha_minus, delta, radius } => {
            let req = SpectrumRequest { alpha_minus, delta, radius, ..SpectrumRequest::new(profile) };
            workflows::run_spectrum(&req, &out)
        }
        Command::Simulate { config: path, scenario } => {
            let cfg: SimulateConfig = match (path, scenario) {
                (Some(path), _) => config::load(&path)?,
                (None, Some(name)) => SimulateConfig::default_for(&name)?,
                (None, None) => return Err(AppError::Usage("simulate needs --config or --scenario".into())),
            };
            workflows::run_simulate(&cfg, &out)
        }
        Command::ValidateFk { config: path } => {
            let mut cfg: ValidateFkConfig = match path {
                Some(path) => config::load(&path)?,
                None => ValidateFkConfig::default(),
            };
            if let Some(seed) = cli.common.seed {
                cfg.seed = seed;
            }
            workflows::run_validate_fk(&cfg, &out)
        }
        Command::Report { dir } => workflows::run_report(&dir.unwrap_or(out)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match thread_pool(cli.common.threads) {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match pool.install(|| run(cli)) {
        Ok(manifest) => {
            println!("{}", serde_json::to_string_pretty(&manifest.summary).unwrap_or_default());
            println!("status: {:?}", manifest.status);
            ExitCode::from(manifest.status.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
