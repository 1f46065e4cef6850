//! `mpemba`: figure tables and invariant checks from the command line.
//!
//! Exit codes: 0 success, 1 a verify check failed, 2 numerical error or
//! invalid input, 3 I/O error.

mod commands;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mpemba_core::config_io::{self, ConfigError, ExperimentConfig, TableFormat};

#[derive(Parser, Debug)]
#[command(name = "mpemba", version, about = "Quantum Mpemba effect and Otto refrigerator simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Config file; falls back to $MPEMBA_CONFIG, then built-in defaults.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output table path; defaults to `<command>.<format>` in the current directory.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Populations on (|x+>, |x->) of the initial state, e.g. `0.7,0.3`.
    #[arg(long, global = true, value_name = "A,B")]
    populations: Option<String>,

    /// Disable the Mpemba stroke.
    #[arg(long, global = true)]
    no_mpemba: bool,

    /// Number of delay (or threshold) grid points.
    #[arg(long, global = true, value_name = "N")]
    tau_steps: Option<usize>,

    /// Number of rotation angles for `surface`.
    #[arg(long, global = true, value_name = "N")]
    theta_steps: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Spectrum of the generator extracted at delay TAU (ms).
    Spectrum {
        #[arg(long, value_name = "MS")]
        tau: f64,
    },
    /// Free energy over rotated initial states and delays.
    Surface,
    /// Free-energy relaxation with and without the Mpemba unitary.
    Cooling,
    /// Otto trace-distance curves after the heat-exchange stroke.
    OttoDistance,
    /// Cooling-power ratio over the threshold window.
    OttoRatio,
    /// Invariant battery; exit 1 if any check fails.
    Verify,
}

impl Command {
    fn file_stem(&self) -> &'static str {
        match self {
            Command::Spectrum { .. } => "spectrum",
            Command::Surface => "surface",
            Command::Cooling => "cooling",
            Command::OttoDistance => "otto_distance",
            Command::OttoRatio => "otto_ratio",
            Command::Verify => "verify",
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl Format {
    fn table(self) -> TableFormat {
        match self {
            Format::Csv => TableFormat::Csv,
            Format::Json => TableFormat::Json,
        }
    }

    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Numerical(mpemba_core::Error),
    Config(ConfigError),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Numerical(_) => 2,
            CliError::Config(ConfigError::Io(_)) | CliError::Io(_) => 3,
            CliError::Config(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Numerical(e) => write!(f, "numerical error: {e}"),
            CliError::Config(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "I/O error: {e}"),
        }
    }
}

impl From<mpemba_core::Error> for CliError {
    fn from(e: mpemba_core::Error) -> Self {
        CliError::Numerical(e)
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

/// Everything a command needs besides its own arguments.
pub struct Run {
    pub cfg: ExperimentConfig,
    pub out: PathBuf,
    pub format: TableFormat,
}

impl Run {
    pub fn write(&self, rows: &[Vec<config_io::Cell>], schema: &[&str]) -> Result<(), CliError> {
        config_io::write_table(rows, schema, &self.out, self.format, self.cfg.output_precision)?;
        log::info!("wrote {} rows to {}", rows.len(), self.out.display());
        Ok(())
    }

    pub fn num(&self, x: f64) -> String {
        config_io::format_number(x, self.cfg.output_precision)
    }
}

fn load(cli: &Cli) -> Result<ExperimentConfig, ConfigError> {
    let path = cli
        .config
        .clone()
        .or_else(|| std::env::var_os(config_io::CONFIG_ENV).map(PathBuf::from));
    let mut cfg = match path {
        Some(p) => {
            log::info!("loading config from {}", p.display());
            config_io::load_config_unvalidated(p)?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(p) = &cli.populations {
        cfg.populations = config_io::parse_pair(p).map_err(|message| ConfigError::Validation {
            key: "--populations".into(),
            constraint: message,
        })?;
    }
    if cli.no_mpemba {
        cfg.use_mpemba = false;
    }
    if let Some(n) = cli.tau_steps {
        cfg.tau_steps = n;
    }
    if let Some(n) = cli.theta_steps {
        cfg.theta_steps = n;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let cfg = load(&cli)?;
    if let Command::Verify = cli.command {
        return Ok(if verify::run(&cfg) {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(1)
        });
    }
    cfg.validate()?;
    let out = cli
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.{}", cli.command.file_stem(), cli.format.extension())));
    let ctx = Run {
        cfg,
        out,
        format: cli.format.table(),
    };
    match cli.command {
        Command::Spectrum { tau } => commands::spectrum(&ctx, tau, cli.out.is_some())?,
        Command::Surface => commands::surface(&ctx)?,
        Command::Cooling => commands::cooling(&ctx)?,
        Command::OttoDistance => commands::otto_distance(&ctx)?,
        Command::OttoRatio => commands::otto_ratio(&ctx)?,
        Command::Verify => unreachable!("handled above"),
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
