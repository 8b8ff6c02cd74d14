mod commands;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use error::{CliError, EXIT_USAGE};

/// Wigner negativity of photon-added thermal states in a thermal channel.
#[derive(Debug, Parser)]
#[command(name = "spats", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample the evolved Wigner function on a square grid.
    WignerGrid(WignerGridArgs),
    /// Negativity volume as a function of decay time for several seeds.
    PnwCurve(PnwCurveArgs),
    /// Numeric threshold decay times against the closed form.
    Threshold(ThresholdArgs),
    /// Run a verification batch; exits 1 if any case fails.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Jsonl,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Jsonl => "jsonl",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Oracles,
    Theorem,
    Thresholds,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ThresholdMethodArg {
    Origin,
    Pnw,
}

/// Accepts plain numbers and fractions such as `3/7`.
fn parse_number(s: &str) -> Result<f64, String> {
    let value = match s.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().map_err(|e| format!("{s}: {e}"))?;
            let den: f64 = den.trim().parse().map_err(|e| format!("{s}: {e}"))?;
            num / den
        }
        None => s.trim().parse().map_err(|e| format!("{s}: {e}"))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("{s} is not a finite number"))
    }
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct WignerGridArgs {
    /// Mean photon number of the thermal seed.
    #[arg(long = "bar-n", value_parser = parse_number)]
    pub bar_n: f64,
    /// Mean thermal photon number of the channel.
    #[arg(long, value_parser = parse_number)]
    pub n: f64,
    #[arg(long = "gamma-t", value_parser = parse_number)]
    pub gamma_t: f64,
    /// Half-width of the square grid; defaults to max(5, 5 sqrt(1 + 2 max(n̄, n))).
    #[arg(long, value_parser = parse_number)]
    pub extent: Option<f64>,
    /// Points per axis.
    #[arg(long, default_value_t = 201)]
    pub resolution: usize,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct PnwCurveArgs {
    /// Comma-separated seed mean photon numbers.
    #[arg(long = "bar-n", value_parser = parse_number, value_delimiter = ',', default_values_t = vec![0.0, 3.0 / 7.0, 1.0])]
    pub bar_n: Vec<f64>,
    #[arg(long, value_parser = parse_number)]
    pub n: f64,
    /// Largest decay time of the sweep.
    #[arg(long = "gamma-t", value_parser = parse_number, default_value_t = 1.0)]
    pub gamma_t: f64,
    /// Number of decay-time samples, endpoints included.
    #[arg(long, default_value_t = 101)]
    pub steps: usize,
    /// Also integrate the negative volume numerically.
    #[arg(long)]
    pub numeric: bool,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct ThresholdArgs {
    #[arg(long = "bar-n", value_parser = parse_number, value_delimiter = ',', default_values_t = vec![0.0, 3.0 / 7.0, 1.0, 10.0])]
    pub bar_n: Vec<f64>,
    #[arg(long, value_parser = parse_number, value_delimiter = ',', default_values_t = vec![0.0, 0.5, 1.0, 2.0])]
    pub n: Vec<f64>,
    /// Bisection tolerance, within [1e-12, 1e-3].
    #[arg(long, value_parser = parse_number, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = ThresholdMethodArg::Origin)]
    pub method: ThresholdMethodArg,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Jsonl)]
    pub format: Format,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    /// First seed of the random zero-vacuum states.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Jsonl)]
    pub format: Format,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::WignerGrid(args) => commands::wigner_grid(&args),
        Command::PnwCurve(args) => commands::pnw_curve(&args),
        Command::Threshold(args) => commands::threshold(&args),
        Command::Verify(args) => commands::verify(&args),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE as u8),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("spats: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn parses_fractions() {
        assert!((parse_number("3/7").unwrap() - 3.0 / 7.0).abs() < 1e-16);
        assert_eq!(parse_number("0.5").unwrap(), 0.5);
        assert!(parse_number("1/0").is_err());
        assert!(parse_number("abc").is_err());
    }
}
