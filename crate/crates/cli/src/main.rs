//! `hm-lab`: single-point evaluations, sweeps and verification suites for the
//! metric family, reported as tables, CSV or JSON.

mod commands;
mod config;
mod report;
mod sweep;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use config::{Cli, RunConfig};
use sweep::RunError;

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_IO: u8 = 4;

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("hm-lab: {msg}");
    ExitCode::from(code)
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("HM_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("HM_LAB_THREADS = `{v}` is not a positive integer"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    if let Err(msg) = configure_threads() {
        return fail(EXIT_USAGE, msg);
    }
    let cfg = match RunConfig::from_cli(cli) {
        Ok(c) => c,
        Err(msg) => return fail(EXIT_USAGE, msg),
    };
    let report = match sweep::execute(&cfg) {
        Ok(r) => r,
        Err(RunError::Usage(msg)) => return fail(EXIT_USAGE, msg),
        Err(RunError::Core(e)) if e.is_numerical() => return fail(EXIT_NUMERICAL, e),
        Err(RunError::Core(e)) => return fail(EXIT_USAGE, e),
    };
    let bytes = report.emit(cfg.format);
    let written = match &cfg.out {
        Some(path) => std::fs::write(path, &bytes).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => std::io::stdout().lock().write_all(&bytes).map_err(|e| format!("cannot write output: {e}")),
    };
    if let Err(msg) = written {
        return fail(EXIT_IO, msg);
    }
    if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
        fail(EXIT_CHECK_FAILED, format!("checks failed: {}", failed.join(", ")))
    }
}
