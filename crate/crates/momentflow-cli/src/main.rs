//! Command-line front end: solve moment differential systems, evaluate and
//! cross-check solutions, and report their growth at infinity.

mod commands;
mod config;

use clap::{Parser, Subcommand, ValueEnum};
use commands::CliError;
use config::{parse_f64_list, parse_points, ProblemConfig};
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "momentflow",
    version,
    about = "Entire solutions of linear moment differential systems and their growth at infinity"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Problem configuration (JSON).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Output path; stdout when omitted.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Override the truncation order N from the config.
    #[arg(long, value_name = "N")]
    n_terms: Option<usize>,
    /// Override the tolerance from the config.
    #[arg(long, value_name = "TOL")]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the Cauchy problem: Jordan structure, solution terms, constants.
    Solve {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Evaluate the solution at points; rows keep going past per-point failures.
    Eval {
        #[command(flatten)]
        common: CommonArgs,
        /// Points: inline "re,im;re,im" or a JSON file of [[re,im],...].
        #[arg(long, value_name = "POINTS")]
        points: String,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Compare the closed-form solution against the brute-force series oracle.
    OracleCompare {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_name = "POINTS")]
        points: String,
    },
    /// Emit the growth report (order, type, indicator, sectors, bound fit).
    Growth {
        #[command(flatten)]
        common: CommonArgs,
        /// Tail fraction for the limsup estimators.
        #[arg(long, default_value_t = 0.25)]
        window: f64,
    },
    /// Growth report plus the (theta, r, ln|y|) ray fan.
    Indicator {
        #[command(flatten)]
        common: CommonArgs,
        /// Ray angles in radians, comma separated; default 8-direction fan.
        #[arg(long, value_name = "LIST")]
        thetas: Option<String>,
        /// Radial grid, comma separated ascending; default family-aware.
        #[arg(long, value_name = "LIST")]
        r_grid: Option<String>,
        #[arg(long, default_value_t = 0.25)]
        window: f64,
        /// json: full report; csv: the ray fan only.
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Run the built-in identities: chain recursion, equation residual,
    /// strong regularity of the moment family.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Dump the Taylor coefficients of the solved components as CSV.
    SeriesDump {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 40)]
        order: usize,
    },
}

fn load_config(common: &CommonArgs) -> Result<ProblemConfig, CliError> {
    let text = std::fs::read_to_string(&common.config).map_err(|e| {
        CliError::Config(format!("cannot read {}: {e}", common.config.display()))
    })?;
    let mut config: ProblemConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", common.config.display())))?;
    if let Some(n) = common.n_terms {
        config.truncation.n = n;
    }
    if let Some(tol) = common.tol {
        config.truncation.tol = tol;
    }
    config.validate().map_err(CliError::Config)?;
    Ok(config)
}

fn write_output(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| {
                    if text.ends_with('\n') {
                        Ok(())
                    } else {
                        stdout.write_all(b"\n")
                    }
                })
                .map_err(|e| CliError::Config(format!("cannot write stdout: {e}")))
        }
    }
}

fn init_thread_pool() {
    if let Ok(value) = std::env::var("MOMENTFLOW_THREADS") {
        if let Ok(threads) = value.parse::<usize>() {
            if threads >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
        }
    }
}

fn run() -> Result<(), CliError> {
    init_thread_pool();
    let cli = Cli::parse();
    match &cli.command {
        Command::Solve { common } => {
            let config = load_config(common)?;
            let text = commands::cmd_solve(&config)?;
            write_output(&common.out, &text)
        }
        Command::Eval {
            common,
            points,
            format,
        } => {
            let config = load_config(common)?;
            let pts = parse_points(points).map_err(CliError::Config)?;
            let text = commands::cmd_eval(&config, &pts, *format == Format::Csv)?;
            write_output(&common.out, &text)
        }
        Command::OracleCompare { common, points } => {
            let config = load_config(common)?;
            let pts = parse_points(points).map_err(CliError::Config)?;
            let text = commands::cmd_oracle_compare(&config, &pts, config.truncation.n)?;
            write_output(&common.out, &text)
        }
        Command::Growth { common, window } => {
            let config = load_config(common)?;
            let text = commands::cmd_growth(&config, *window)?;
            write_output(&common.out, &text)
        }
        Command::Indicator {
            common,
            thetas,
            r_grid,
            window,
            format,
        } => {
            let config = load_config(common)?;
            let thetas = match thetas {
                Some(spec) => parse_f64_list(spec).map_err(CliError::Config)?,
                None => (0..8)
                    .map(|k| -std::f64::consts::PI + std::f64::consts::PI * k as f64 / 4.0)
                    .collect(),
            };
            let grid = match r_grid {
                Some(spec) => {
                    let g = parse_f64_list(spec).map_err(CliError::Config)?;
                    if !g.windows(2).all(|w| w[0] < w[1]) || g.is_empty() {
                        return Err(CliError::Config(
                            "--r-grid must be a nonempty ascending list".to_string(),
                        ));
                    }
                    g
                }
                None => Vec::new(),
            };
            let output = commands::cmd_indicator(&config, &thetas, &grid, *window)?;
            match format {
                Format::Json => write_output(&common.out, &output.report_json),
                Format::Csv => write_output(&common.out, &output.fan_csv),
            }
        }
        Command::Verify { common } => {
            let config = load_config(common)?;
            let text = commands::cmd_verify(&config)?;
            write_output(&common.out, &text)
        }
        Command::SeriesDump { common, order } => {
            let config = load_config(common)?;
            let text = commands::cmd_series_dump(&config, *order)?;
            write_output(&common.out, &text)
        }
    }
}

fn main() {
    match run() {
        Ok(()) => {}
        Err(e) => {
            eprintln!("momentflow: {}", e.message());
            std::process::exit(e.exit_code());
        }
    }
}
