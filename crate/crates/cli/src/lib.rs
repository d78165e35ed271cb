//! Command-line driver for the `planarqc` checks: `eval`, `check` and `report`.

pub mod args;
pub mod config;
pub mod error;
pub mod run;
pub mod summary;

use std::ffi::OsString;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::Path;

use clap::Parser;
use planarqc::Mat2C;
use serde_json::json;

use crate::args::{Cli, Command, EvalArgs, EvalFormat, ReportArgs};
use crate::config::{Format, RunConfig};
use crate::error::{CliError, CliResult};
use crate::run::{run_suite, SuiteReport};

pub use crate::config::Suite;

/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "PLANARQC_THREADS";

/// Exit code for configuration and usage errors.
pub const EXIT_USAGE: i32 = 2;

/// Parses `argv`, runs the command and returns the process exit code.
pub fn main_with<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match with_thread_pool(|| dispatch(cli)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("planarqc: {e}");
            EXIT_USAGE
        }
    }
}

fn with_thread_pool<R: Send>(f: impl FnOnce() -> CliResult<R> + Send) -> CliResult<R> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return f();
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::usage(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| CliError::usage(format!("cannot start {n} worker threads: {e}")))?;
    pool.install(f)
}

fn dispatch(cli: Cli) -> CliResult<i32> {
    match cli.command {
        Command::Eval(a) => cmd_eval(&a),
        Command::Check(a) => cmd_check(&a.to_config()?),
        Command::Report(a) => cmd_report(&a),
    }
}

fn parse_entries(entries: &[String]) -> CliResult<Mat2C> {
    if entries.len() != 4 {
        return Err(CliError::usage(format!(
            "eval needs 4 matrix entries, got {}",
            entries.len()
        )));
    }
    let mut v = [0.0; 4];
    for (slot, s) in v.iter_mut().zip(entries) {
        *slot = s
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| CliError::usage(format!("malformed matrix entry {s:?}")))?;
    }
    Ok(Mat2C::from_real(v[0], v[1], v[2], v[3]))
}

fn cmd_eval(a: &EvalArgs) -> CliResult<i32> {
    let name = match a.functional.functional.as_slice() {
        [one] => one,
        _ => return Err(CliError::usage("eval needs exactly one --functional")),
    };
    let e = a.functional.build(name, a.k)?;
    let m = parse_entries(&a.entries)?;
    let value = e.evaluate(&m)?;
    let info = m.dilatation();
    let mu = info.mu.filter(|_| m.det() > 0.0);
    match a.format {
        EvalFormat::Text => {
            println!("E(A) = {value}");
            println!("K_A = {}", info.k_distortion);
            println!("J_A = {}", m.det());
            println!("|A| = {}", m.opnorm());
            match mu {
                Some(mu) => println!("mu_A = {mu}"),
                None => println!("mu_A = undefined"),
            }
        }
        EvalFormat::Json => {
            let out = json!({
                "functional": e,
                "matrix": m.to_real(),
                "value": value,
                "K_A": info.k_distortion,
                "J_A": m.det(),
                "norm": m.opnorm(),
                "mu_A": mu.map(|z| [z.re, z.im]),
            });
            println!(
                "{}",
                serde_json::to_string_pretty(&out).expect("eval output serializes")
            );
        }
    }
    Ok(0)
}

/// Pretty JSON with a trailing newline.
pub fn report_json(r: &SuiteReport) -> String {
    let mut s = serde_json::to_string_pretty(r).expect("reports serialize");
    s.push('\n');
    s
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| CliError::io(p, e)),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| CliError::io("<stdout>", e)),
    }
}

fn cmd_check(cfg: &RunConfig) -> CliResult<i32> {
    let report = run_suite(cfg)?;
    let body = match cfg.output.format {
        Format::Json => report_json(&report).into_bytes(),
        Format::Csv => {
            let mut buf = Vec::new();
            summary::write_csv(&report.items, &mut buf)?;
            buf
        }
    };
    write_output(cfg.output.path.as_deref(), &body)?;
    if let Some(log) = &cfg.output.log {
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(log)
            .map_err(|e| CliError::io(log, e))?;
        let mut lines = String::new();
        for item in &report.items {
            lines.push_str(&serde_json::to_string(item).expect("items serialize"));
            lines.push('\n');
        }
        f.write_all(lines.as_bytes()).map_err(|e| CliError::io(log, e))?;
    }
    for item in &report.items {
        let verdict = if item.passed { "PASS" } else { "FAIL" };
        eprintln!("{verdict} {} margin={}", item.id, item.margin);
    }
    Ok(report.exit_code)
}

fn cmd_report(a: &ReportArgs) -> CliResult<i32> {
    let items = summary::collect(&a.patterns)?;
    let mut buf = Vec::new();
    summary::write_csv(&items, &mut buf)?;
    write_output(a.out.as_deref(), &buf)?;
    Ok(0)
}
