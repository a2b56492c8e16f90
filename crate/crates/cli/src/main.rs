use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use qwx_cli::{load_problem, run_command, Command, RunOptions, Status, INPUT_ERROR_EXIT};
use qwx_core::rational;

/// Exact wall-crossing computations for framed twisted quiver sheaves.
///
/// Exit codes: 0 success, 1 input error, 2 verification failure.
#[derive(Debug, Parser)]
#[command(name = "qwx", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Problem file (JSON).
    #[arg(long)]
    input: PathBuf,
    /// Write the JSON result here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Worker threads for parallel steps.
    #[arg(long)]
    threads: Option<usize>,
    /// Upper end N of the parameter range, as `p/q`.
    #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
    tau_max: Option<rational::Rational>,
    /// Print the aligned text table to stdout as well as the JSON.
    #[arg(long)]
    table: bool,
}

fn parse_rational(s: &str) -> Result<rational::Rational, String> {
    rational::parse(s).ok_or_else(|| format!("`{s}` is not a rational p/q"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let informational = !e.use_stderr();
            let _ = e.print();
            return if informational { ExitCode::SUCCESS } else { ExitCode::from(INPUT_ERROR_EXIT) };
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot set up {n} threads: {e}");
            return ExitCode::from(INPUT_ERROR_EXIT);
        }
    }
    let problem = match load_problem(&cli.input) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(INPUT_ERROR_EXIT);
        }
    };
    let opts = RunOptions { tau_max: cli.tau_max };
    let result = match run_command(cli.command, &problem, &opts) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(INPUT_ERROR_EXIT);
        }
    };
    let json = result.to_json();
    match &cli.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &json) {
                eprintln!("error: IO_ERROR at `{}`: {e}", path.display());
                return ExitCode::from(INPUT_ERROR_EXIT);
            }
            print!("{}", result.to_text());
        }
        None => {
            if cli.table {
                print!("{}", result.to_text());
                println!();
            }
            print!("{json}");
        }
    }
    if result.status == Status::VerificationFailed {
        eprintln!("verification failed");
    }
    ExitCode::from(result.status.exit_code())
}
