use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use yflow::bounds::profile::{lower_bound_rate, profile_lambda};
use yflow::harness::scenario::{default_cutoff_constant, UPPER_BOUND_RADIUS};
use yflow::harness::{run_suite, run_to_dir, ScenarioConfig, Suite, VerificationReport};
use yflow::{Dimension, FlowError};

#[derive(Parser)]
#[command(
    name = "yflow",
    version,
    about = "Radial Yamabe flow on hyperbolic space"
)]
struct Cli {
    /// Print only the summary line.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write its CSV and report.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory.
        #[arg(long, env = "YFLOW_OUT_DIR", default_value = "out")]
        out: PathBuf,
    },
    /// Run a built-in verification suite.
    Verify {
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(Suite::NAMES))]
        suite: String,
    },
    /// Print the closed-form constants for dimension m.
    Constants {
        #[arg(long, value_parser = clap::value_parser!(u32).range(3..))]
        m: u32,
    },
}

const USAGE_ERROR: u8 = 2;

fn print_report(report: &VerificationReport, quiet: bool) {
    if !quiet {
        for c in &report.checks {
            let tag = if c.pass { "PASS" } else { "FAIL" };
            println!(
                "{tag} {:<40} violation {:>12.4e} tolerance {:.1e}  [{}]",
                c.id, c.violation, c.tolerance, c.anchor
            );
        }
    }
    if let Some(err) = &report.error {
        println!("error: {err}");
    }
    let failed = report.failing().count();
    println!(
        "{}: {} ({} checks, {} failed)",
        report.scenario,
        if report.passed() { "pass" } else { "fail" },
        report.checks.len(),
        failed
    );
}

fn exit_for(report: &VerificationReport) -> ExitCode {
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn fail(err: FlowError) -> ExitCode {
    eprintln!("yflow: {err}");
    match err {
        FlowError::Config(_) => ExitCode::from(USAGE_ERROR),
        _ => ExitCode::FAILURE,
    }
}

fn run(config: PathBuf, out: PathBuf, quiet: bool) -> Result<ExitCode, FlowError> {
    let text = std::fs::read_to_string(&config)?;
    let config = ScenarioConfig::from_json(&text)?;
    let start = Instant::now();
    let (report, files) = run_to_dir(&config, &out)?;
    print_report(&report, quiet);
    if !quiet {
        if let Some(csv) = &files.csv {
            println!("wrote {}", csv.display());
        }
        println!("wrote {}", files.report.display());
        println!("wall time {:.3} s", start.elapsed().as_secs_f64());
    }
    Ok(exit_for(&report))
}

fn verify(suite: &str, quiet: bool) -> Result<ExitCode, FlowError> {
    let start = Instant::now();
    let report = run_suite(Suite::parse(suite)?)?;
    print_report(&report, quiet);
    if !quiet {
        println!("wall time {:.3} s", start.elapsed().as_secs_f64());
    }
    Ok(exit_for(&report))
}

fn constants(m: u32) -> Result<ExitCode, FlowError> {
    let dim = Dimension::new(m)?;
    let eta = dim.eta();
    let lambda = profile_lambda(1.0 / eta, (dim.mf() - 1.0) / 1f64.tanh());
    println!("m={m}");
    println!("eta={eta}");
    println!("m(m-1)={}", dim.growth_rate());
    println!("lambda={lambda:.12e}");
    println!("C_m={:.12e}", lower_bound_rate(dim));
    println!(
        "c_m={:.12e}",
        default_cutoff_constant(dim, UPPER_BOUND_RADIUS)?
    );
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(USAGE_ERROR)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Run { config, out } => run(config, out, cli.quiet),
        Command::Verify { suite } => verify(&suite, cli.quiet),
        Command::Constants { m } => constants(m),
    };
    result.unwrap_or_else(fail)
}
