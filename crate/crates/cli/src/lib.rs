//! Command-line front end: argument and config-file handling, the six
//! subcommands, and the run manifest written next to every set of
//! outputs.

pub mod cli;
pub mod commands;
pub mod config_file;
pub mod error;
pub mod output;

use std::ffi::OsString;
use std::time::Instant;

use clap::Parser;
use serde::Serialize;

use crate::cli::{Cli, Command, Format};
use crate::error::{CliError, CliResult};
use crate::output::Output;

pub const MANIFEST_FILE: &str = "manifest.json";

/// Record of one invocation. Its `config` object can be passed back with
/// `--config` to repeat the run.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: &'static str,
    pub config: serde_json::Value,
    pub seed: u64,
    pub seed_scheme: &'static str,
    pub threads: usize,
    pub format: Format,
    /// `ok` or `unresolved`.
    pub status: &'static str,
    pub message: Option<String>,
    pub outputs: Vec<String>,
    pub wall_clock_seconds: f64,
    pub events: u64,
    pub events_per_second: f64,
}

/// Parses `args` (including the program name), runs the subcommand and
/// writes its manifest.
pub fn execute(args: Vec<OsString>) -> CliResult<Manifest> {
    let args = config_file::expand(args, &Command::NAMES)?;
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Config(e.to_string()))?;
    run(&cli)
}

pub fn run(cli: &Cli) -> CliResult<Manifest> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.common.threads)
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let mut out = Output::create(&cli.common.out_dir, cli.common.format)?;
    let seed = cli.common.seed;
    let start = Instant::now();
    let report = pool.install(|| commands::dispatch(&cli.command, seed, &mut out))?;
    let wall = start.elapsed().as_secs_f64();
    let mut outputs = out.files().to_vec();
    outputs.push(MANIFEST_FILE.into());
    let manifest = Manifest {
        tool: "contagion",
        version: env!("CARGO_PKG_VERSION"),
        subcommand: cli.command.name(),
        config: cli.command.config_json(seed),
        seed,
        seed_scheme: contagion_core::rng::SEED_SCHEME,
        threads: pool.current_num_threads(),
        format: cli.common.format,
        status: if report.unresolved.is_some() { "unresolved" } else { "ok" },
        message: report.unresolved.clone(),
        outputs,
        wall_clock_seconds: wall,
        events: report.events,
        events_per_second: if wall > 0.0 { report.events as f64 / wall } else { 0.0 },
    };
    out.json(MANIFEST_FILE, &manifest)?;
    match report.unresolved {
        Some(m) => Err(CliError::Unresolved(m)),
        None => Ok(manifest),
    }
}

/// Entry point of the binary; returns the process exit code.
pub fn main_with_args(args: Vec<OsString>) -> i32 {
    let expanded = match config_file::expand(args, &Command::NAMES) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("contagion: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(expanded) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(m) => {
            println!("{}: wrote {} files to {}", m.subcommand, m.outputs.len(), cli.common.out_dir.display());
            0
        }
        Err(e) => {
            eprintln!("contagion: {e}");
            e.exit_code()
        }
    }
}
