//! Command-line front end for the scenario runner.
//!
//! Exit codes: 0 success, 1 I/O error, 2 configuration error, 3 numerical
//! singularity, 4 tolerance failure under `--assert`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use stirap::experiment::{self, compare_files, parse_levels, parse_window, ScenarioConfig, PRESETS};
use stirap::spectral::{stage_boundaries, DarkStateMode};
use stirap::Error;

#[derive(Parser)]
#[command(
    name = "stirap",
    version,
    about = "Simulate STIRAP models, their eigenvalue traces and adiabatic reductions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate every requested level and write CSV files and a report.
    Simulate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Output directory (default `out/<scenario name>`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Fail with exit code 4 if any level differs from the full run by more.
        #[arg(long, value_name = "TOL")]
        assert: Option<f64>,
    },
    /// Write the eigenvalue trace as CSV, to `--out` or stdout.
    Eigentrace {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Output file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the stage boundaries t1 and t2.
    Boundaries {
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
    /// Compare two CSV time series channel by channel.
    Compare {
        a: PathBuf,
        b: PathBuf,
        /// Comma-separated channel names.
        #[arg(long, value_delimiter = ',', required = true)]
        channels: Vec<String>,
        #[arg(long, value_name = "TOL")]
        assert: Option<f64>,
    },
    /// List the built-in presets.
    Presets,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Preset name or path of a `key = value` config file.
    scenario: String,
    /// Integration step.
    #[arg(long)]
    step: Option<f64>,
    /// Comma-separated levels: full, minus-excited, minus-bright.
    #[arg(long)]
    levels: Option<String>,
    /// Source of the dark-state amplitude for nonlinear eigenvalues.
    #[arg(long, value_name = "MODE")]
    darkstate_mode: Option<DarkStateMode>,
    #[arg(long, allow_hyphen_values = true)]
    detuning: Option<f64>,
    /// Time window as t0:t1.
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
}

impl ScenarioArgs {
    fn config(&self) -> Result<ScenarioConfig, Error> {
        let mut c = ScenarioConfig::load(&self.scenario)?;
        if let Some(h) = self.step {
            c.step = h;
        }
        if let Some(l) = &self.levels {
            c.levels = parse_levels(l).map_err(Error::Config)?;
        }
        if let Some(m) = self.darkstate_mode {
            c.darkstate_mode = m;
        }
        if let Some(d) = self.detuning {
            c.detuning = d;
        }
        if let Some(w) = &self.window {
            c.window = parse_window(w).map_err(Error::Config)?;
        }
        c.validate()?;
        Ok(c)
    }
}

enum Failure {
    Error(Error),
    Tolerance(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

fn io_err(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |e| Error::Io {
        path: path.display().to_string(),
        source: e,
    }
}

fn execute(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate { scenario, out, assert } => {
            let mut c = scenario.config()?;
            if assert.is_some() {
                c.tolerance = assert;
            }
            let dir = out.unwrap_or_else(|| PathBuf::from("out").join(&c.name));
            let output = experiment::run(&c, &dir)?;
            print!("{}", output.report);
            if !output.report.passed() {
                return Err(Failure::Tolerance(format!(
                    "differences exceed {}",
                    c.tolerance.unwrap_or(0.0)
                )));
            }
        }
        Command::Eigentrace { scenario, out } => {
            let csv = experiment::eigen_series(&scenario.config()?)?.to_csv();
            match out {
                Some(p) => std::fs::write(&p, csv).map_err(io_err(&p))?,
                None => print!("{csv}"),
            }
        }
        Command::Boundaries { scenario } => {
            let c = scenario.config()?;
            let b = stage_boundaries(&c.system()?, &c.schedule()?, c.window, c.darkstate_mode, c.step)?;
            println!("t1 = {:.10}\nt2 = {:.10}", b.t1, b.t2);
        }
        Command::Compare { a, b, channels, assert } => {
            let names: Vec<&str> = channels.iter().map(String::as_str).collect();
            let report = compare_files(&a, &b, &names, assert)?;
            print!("{report}");
            if !report.passed() {
                return Err(Failure::Tolerance(format!(
                    "differences exceed {}",
                    assert.unwrap_or(0.0)
                )));
            }
        }
        Command::Presets => {
            for (name, about) in PRESETS {
                println!("{name:<6} {about}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Tolerance(msg)) => {
            eprintln!("stirap: tolerance failure: {msg}");
            ExitCode::from(4)
        }
        Err(Failure::Error(e)) => {
            eprintln!("stirap: {e}");
            ExitCode::from(match e {
                Error::Io { .. } => 1,
                e if e.is_singularity() => 3,
                _ => 2,
            })
        }
    }
}
