use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use relkin_cli::{run, scenario, verify, CliError};

/// Relative kinematics of point particles under transports along paths.
#[derive(Parser)]
#[command(name = "relkin", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a scenario over its parameter sweep.
    Run {
        /// Scenario file (TOML).
        scenario: PathBuf,
        /// Write the output here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Output format.
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Check pipeline identities against closed forms and axioms.
    Verify {
        /// Scenario file (TOML).
        scenario: PathBuf,
        /// Identity battery to run.
        #[arg(long)]
        suite: String,
        /// Residual tolerance for the battery.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Table,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Run {
            scenario: path,
            out,
            format,
        } => {
            let sc = scenario::load(&path)?;
            let output = run::run_scenario(&sc)?;
            let text = match format {
                Format::Csv => run::to_csv(&output),
                Format::Table => run::to_table(&output),
            };
            match out {
                Some(dest) => std::fs::write(dest, text)?,
                None => print!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            scenario: path,
            suite,
            tol,
        } => {
            let sc = scenario::load(&path)?;
            let suite = suite.parse().map_err(CliError::Validation)?;
            let report = verify::verify(&sc, suite, tol)?;
            print!("{}", report.render());
            if report.passed() {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(2))
            }
        }
    }
}
