//! Argument parsing and dispatch for the `arithdeg` binary.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::cache::{OrbitCache, CACHE_ENV};
use crate::check::{self, Suite, SUITE_NAMES};
use crate::commands::{self, read_correspondence, read_system, CliError, Outcome, Settings};
use crate::report::{Format, DEFAULT_PRECISION};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Text,
}

#[derive(Parser, Debug)]
#[command(name = "arithdeg", version, about = "Dynamical degrees, multipliers, heights and arithmetic degrees")]
struct Cli {
    /// Last orbit index to compute (overrides the system file).
    #[arg(long, global = true)]
    horizon: Option<usize>,
    /// Largest total digit count of a stored orbit point.
    #[arg(long, global = true)]
    digit_budget: Option<u64>,
    /// Relative tolerance for estimates and classification.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Orbit cache directory.
    #[arg(long, global = true, env = CACHE_ENV)]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: FormatArg,
    /// Decimals printed for floating-point values.
    #[arg(long, global = true, default_value_t = DEFAULT_PRECISION)]
    precision: usize,
    /// Write the report here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dynamical degrees and multipliers, with the intersection-growth cross-check.
    Degrees { system: String },
    /// Estimate the arithmetic degree of a named point and match it to a multiplier.
    Alpha { system: String, point: String },
    /// Iterate a named point and tabulate its heights.
    Orbit { system: String, point: String },
    /// Canonical height vector of a named point.
    Canonical {
        system: String,
        point: String,
        /// Divisor classes as rows of hyperplane coordinates, e.g. "1,0;0,1".
        #[arg(long)]
        basis: Option<String>,
    },
    /// Return set and height separation for a pair of orbits and a correspondence.
    Dml {
        f: String,
        g: String,
        /// Point of the first system.
        #[arg(long)]
        x: String,
        /// Point of the second system.
        #[arg(long)]
        y: String,
        /// Correspondence file on the product of the two spaces.
        #[arg(long = "correspondence", short = 'v')]
        correspondence: String,
        /// Multiplier of the first height in the separation sequence.
        #[arg(long, short = 'n', default_value_t = 1)]
        n: u32,
    },
    /// Run the acceptance battery on the bundled corpus.
    Check {
        #[arg(value_parser = SUITE_NAMES)]
        suite: String,
    },
}

fn dispatch(cli: &Cli, s: &Settings) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Degrees { system } => commands::degrees(&read_system(system)?, system, s),
        Command::Alpha { system, point } => commands::alpha(&read_system(system)?, system, point, s),
        Command::Orbit { system, point } => commands::orbit(&read_system(system)?, system, point, s),
        Command::Canonical { system, point, basis } => {
            commands::canonical(&read_system(system)?, system, point, basis.as_deref(), s)
        }
        Command::Dml { f, g, x, y, correspondence, n } => {
            let (fs, gs) = (read_system(f)?, read_system(g)?);
            let v = read_correspondence(correspondence)?;
            commands::dml((&fs, f), (&gs, g), x, y, (&v, correspondence), *n, s)
        }
        Command::Check { suite } => check::run(suite.parse::<Suite>()?, s),
    }
}

/// Runs the tool on `args` (including the program name) and returns the
/// exit code: 0 success, 1 usage or parse error, 2 math error, 3 digit
/// budget exhausted with partial results written.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let settings = Settings {
        horizon: cli.horizon,
        digit_budget: cli.digit_budget,
        tol: cli.tol,
        cache: OrbitCache::new(cli.cache_dir.clone()),
        precision: cli.precision,
    };
    let format = match cli.format {
        FormatArg::Json => Format::Json,
        FormatArg::Csv => Format::Csv,
        FormatArg::Text => Format::Text,
    };
    let outcome = match dispatch(&cli, &settings) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let text = outcome.report.render(format, settings.precision);
    let written = match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return 1;
    }
    if let Some(e) = outcome.error {
        eprintln!("error: {e}");
        return 2;
    }
    if outcome.partial {
        eprintln!("warning: the digit budget was exhausted; the report holds partial results");
        return 3;
    }
    0
}
