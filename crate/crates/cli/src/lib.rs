//! Command-line front end for the `nlbox` verification library.
//!
//! ```text
//! nlbox verify-table3 [--format json|csv] [--out FILE]
//! nlbox bounds        [--format json|csv] [--out FILE]
//! nlbox swap-map      [--sources PP,PP] [--format json|csv] [--out FILE]
//! nlbox sample        [--shots N] [--seed S] [--sources SM,SM] [--out EVENTS.csv] [--format json|csv]
//! ```
//!
//! Exit codes: 0 when every check holds, 1 on a verification mismatch,
//! 2 on a usage or runtime error.

pub mod format;
pub mod report;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use nlbox::{BellExpression, FourQubitProductLabel};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Evaluate all sixteen expressions on the sixteen Bell products and
    /// compare with the reference table.
    VerifyTable3,
    /// Local and no-signaling bounds, with the facet check.
    Bounds,
    /// Class map of the entanglement-swapping protocol.
    SwapMap,
    /// Seeded protocol runs, sorted and scored by class.
    Sample,
}

#[derive(Debug, Clone, Parser)]
#[command(name = "nlbox", version, about = "Verification and sampling for quantum nonlocal boxes")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Number of runs to sample.
    #[arg(long, global = true, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub shots: u64,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Bell labels of the two source pairs, from PP, PM, SP, SM.
    #[arg(long, global = true, default_value = "SM,SM", value_parser = parse_sources)]
    pub sources: FourQubitProductLabel,
    /// Report file. For `sample` this is the event file and the summary
    /// goes next to it.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

fn parse_sources(s: &str) -> Result<FourQubitProductLabel, String> {
    s.parse().map_err(|e: nlbox::Error| e.to_string())
}

/// Where the summary of a sample run is written when `--out` names the
/// event file.
pub fn summary_path(events: &Path, format: Format) -> PathBuf {
    let mut name = events.file_stem().unwrap_or_default().to_os_string();
    name.push(".summary.");
    name.push(format.extension());
    events.with_file_name(name)
}

pub struct Output {
    pub code: i32,
    /// Report text destined for stdout when no file was requested.
    pub stdout: Vec<u8>,
    pub stderr: Vec<u8>,
}

fn emit(config: &RunConfig, doc: Vec<u8>, stdout: &mut Vec<u8>) -> std::io::Result<()> {
    match &config.out {
        Some(path) => std::fs::write(path, doc),
        None => {
            stdout.extend(doc);
            Ok(())
        }
    }
}

/// Runs `verify-table3` against arbitrary sign tables.
pub fn cmd_verify_table3(config: &RunConfig, expressions: &[BellExpression]) -> Output {
    let mut out = Output { code: EXIT_OK, stdout: Vec::new(), stderr: Vec::new() };
    let report = match report::verify_table3(expressions) {
        Ok(r) => r,
        Err(e) => return fail(out, e),
    };
    let doc = match config.format {
        Format::Json => format::json(&report),
        Format::Csv => format::table3_csv(&report),
    };
    if let Err(e) = emit(config, doc, &mut out.stdout) {
        return fail(out, e);
    }
    let _ = writeln!(out.stderr, "table3: {}/{} cells match", report.matches, report.total);
    if !report.passed() {
        for m in &report.mismatches {
            let _ = writeln!(
                out.stderr,
                "mismatch: state {} ({}) inequality {}: computed {} expected {}",
                m.state_index, m.state, m.inequality, m.computed, m.expected
            );
        }
        out.code = EXIT_MISMATCH;
    }
    out
}

fn fail(mut out: Output, e: impl std::fmt::Display) -> Output {
    let _ = writeln!(out.stderr, "error: {e}");
    out.code = EXIT_USAGE;
    out
}

pub fn cmd_bounds(config: &RunConfig) -> Output {
    let mut out = Output { code: EXIT_OK, stdout: Vec::new(), stderr: Vec::new() };
    let report = match report::bounds() {
        Ok(r) => r,
        Err(e) => return fail(out, e),
    };
    let doc = match config.format {
        Format::Json => format::json(&report),
        Format::Csv => format::bounds_csv(&report),
    };
    if let Err(e) = emit(config, doc, &mut out.stdout) {
        return fail(out, e);
    }
    if !report.passed() {
        let _ = writeln!(out.stderr, "bounds: verification failed");
        out.code = EXIT_MISMATCH;
    }
    out
}

pub fn cmd_swap_map(config: &RunConfig) -> Output {
    let mut out = Output { code: EXIT_OK, stdout: Vec::new(), stderr: Vec::new() };
    let report = match report::swap_map(config.sources) {
        Ok(r) => r,
        Err(e) => return fail(out, e),
    };
    let doc = match config.format {
        Format::Json => format::json(&report),
        Format::Csv => format::swap_csv(&report),
    };
    if let Err(e) = emit(config, doc, &mut out.stdout) {
        return fail(out, e);
    }
    if !report.passed() {
        let _ = writeln!(out.stderr, "swap-map: verification failed");
        out.code = EXIT_MISMATCH;
    }
    out
}

pub fn cmd_sample(config: &RunConfig) -> Output {
    let mut out = Output { code: EXIT_OK, stdout: Vec::new(), stderr: Vec::new() };
    let (events, summary) = match report::sample(config.shots, config.seed, config.sources) {
        Ok(r) => r,
        Err(e) => return fail(out, e),
    };
    let doc = match config.format {
        Format::Json => format::json(&summary),
        Format::Csv => format::summary_csv(&summary),
    };
    let written = match &config.out {
        Some(path) => std::fs::write(path, format::events_csv(&events))
            .and_then(|_| std::fs::write(summary_path(path, config.format), doc)),
        None => {
            out.stdout = doc;
            Ok(())
        }
    };
    if let Err(e) = written {
        return fail(out, e);
    }
    for c in summary.classes.iter().filter(|c| c.error.is_some()) {
        let _ = writeln!(
            out.stderr,
            "class {}: {}",
            c.robot_outcome,
            c.error.as_deref().unwrap_or_default()
        );
    }
    if !summary.all_saturated() {
        let _ = writeln!(out.stderr, "sample: some runs do not saturate their class");
        out.code = EXIT_MISMATCH;
    }
    out
}

pub fn execute(config: &RunConfig) -> Output {
    match config.command {
        Command::VerifyTable3 => cmd_verify_table3(config, BellExpression::all()),
        Command::Bounds => cmd_bounds(config),
        Command::SwapMap => cmd_swap_map(config),
        Command::Sample => cmd_sample(config),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match RunConfig::try_parse_from(args) {
        Ok(config) => execute(&config),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string().into_bytes();
            let (stdout, stderr) = if e.use_stderr() { (Vec::new(), text) } else { (text, Vec::new()) };
            Output { code, stdout, stderr }
        }
    }
}
