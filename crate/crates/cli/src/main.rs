use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qprob_cli::scenario::{self, Scenario};
use qprob_cli::{eval, render_structured, render_text, verify, CliError, Format, VerifyOptions};

#[derive(Parser)]
#[command(name = "qprob", version, about = "Quantum probability toolkit: property verification and evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Source {
    /// Scenario file
    #[arg(long, short, conflicts_with = "model")]
    scenario: Option<PathBuf>,
    /// Bundled scenario (classical4, qubit, qutrit) or a bare model such as quantum:3
    #[arg(long)]
    model: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run property checks and report the results
    Verify {
        #[command(flatten)]
        source: Source,
        /// `all` or a comma-separated list of check ids
        #[arg(long)]
        suite: Option<String>,
        /// Trials per check (default 500)
        #[arg(long)]
        trials: Option<usize>,
        /// Suite seed (default 42)
        #[arg(long)]
        seed: Option<u64>,
        /// Check tolerance (default 1e-8)
        #[arg(long)]
        tol: Option<f64>,
        /// Also write the structured report to this file
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Evaluate an expression: product X Y | conditional MU E | expect MU X |
    /// spectrum X | norm X | a1 MU E F
    Eval {
        #[command(flatten)]
        source: Source,
        #[arg(required = true, num_args = 1.., trailing_var_arg = true)]
        expression: Vec<String>,
    },
    /// Print a bundled scenario file
    Scenario { name: String },
}

fn resolve(source: &Source) -> Result<Scenario, CliError> {
    match (&source.scenario, &source.model) {
        (Some(path), _) => Scenario::load(path),
        (None, Some(name)) => match Scenario::bundled(name) {
            Some(s) => Ok(s),
            None => scenario::parse_model_descriptor(name).map(Scenario::empty),
        },
        (None, None) => Err(CliError::Usage("give a scenario file or --model".into())),
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Verify { source, suite, trials, seed, tol, report, format } => {
            let scenario = resolve(&source)?;
            let opts = VerifyOptions { suite, trials, seed, tolerance: tol };
            let result = verify(&scenario, &opts)?;
            if let Some(path) = report {
                std::fs::write(&path, render_structured(&result))
                    .map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })?;
            }
            match format {
                Format::Text => print!("{}", render_text(&result)),
                Format::Structured => print!("{}", render_structured(&result)),
            }
            Ok(if result.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Eval { source, expression } => {
            let scenario = resolve(&source)?;
            let value = eval(&scenario, &expression)?;
            println!("{}", serde_json::to_string(&value).expect("values serialize"));
            Ok(ExitCode::SUCCESS)
        }
        Command::Scenario { name } => match scenario::bundled_text(&name) {
            Some(text) => {
                print!("{text}");
                Ok(ExitCode::SUCCESS)
            }
            None => Err(CliError::Usage(format!("no bundled scenario `{name}`"))),
        },
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
