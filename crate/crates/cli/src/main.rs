//! `liemult`: batch checks of Fourier multipliers on the torus and SU(2).

mod check;
mod error;
mod expr;
mod invert;
mod probe;
mod report;
mod selftest;
mod symbols;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use error::{CliError, EXIT_CONFIG};
use report::{Envelope, Format};

#[derive(Parser, Debug)]
#[command(
    name = "liemult",
    version,
    about = "Fourier multiplier checks on the torus and SU(2)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run multiplier checkers on a symbol.
    Check(check::CheckArgs),
    /// Invert the symbol of X + c and check it lies in S⁰₀.
    Invert(invert::InvertArgs),
    /// Mollifier scaling, negative Sobolev decay and the kernel probe.
    Probe(probe::ProbeArgs),
    /// Fourier roundtrip and Plancherel on random coefficients.
    FourierSelftest(selftest::SelftestArgs),
}

/// Where and how the report is written. The path is left out of the
/// config echo so reports from different locations compare equal.
#[derive(Args, Debug, Clone, Serialize)]
pub struct OutputArgs {
    /// Report file; defaults to `<dir>/<command>.<ext>` with the directory
    /// taken from LIEMULT_REPORT_DIR or `liemult-reports`.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

fn run<A: Serialize>(
    name: &str,
    args: &A,
    output: &OutputArgs,
    body: impl FnOnce() -> Result<report::Outcome, CliError>,
) -> i32 {
    let start = Instant::now();
    let result = body();
    let elapsed = start.elapsed().as_secs_f64();
    let env = Envelope::new(name, report::to_value(args), &result, elapsed);
    for r in &env.records {
        let verdict = match r.pass {
            Some(true) => "pass",
            Some(false) => "FAIL",
            None => "info",
        };
        println!("{verdict:>4}  {}", r.name);
    }
    if let Err(e) = &result {
        eprintln!("liemult {name}: {e}");
    }
    let path = report::resolve_path(output.out.as_deref(), name, output.format);
    let written = env
        .render(output.format)
        .and_then(|text| report::write_atomic(&path, &text));
    match written {
        Ok(()) => {
            println!("report: {}", path.display());
            env.exit_code
        }
        Err(e) => {
            eprintln!("liemult {name}: {e}");
            EXIT_CONFIG
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG as u8 } else { 0 });
        }
    };
    let code = match &cli.command {
        Command::Check(a) => run("check", a, &a.output, || check::run(a)),
        Command::Invert(a) => run("invert", a, &a.output, || invert::run(a)),
        Command::Probe(a) => run("probe", a, &a.output, || probe::run(a)),
        Command::FourierSelftest(a) => run("fourier-selftest", a, &a.output, || selftest::run(a)),
    };
    ExitCode::from(code as u8)
}
