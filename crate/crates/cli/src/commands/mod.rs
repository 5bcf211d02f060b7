mod bounds;
mod couple;
mod perc;
mod phase;
mod simulate;
mod sweep;

use crate::cli::Command;
use crate::error::CliResult;
use crate::output::Output;

/// What a subcommand reports back for the manifest.
#[derive(Debug, Clone, Default)]
pub struct Report {
    /// Engine events executed (0 for subcommands that do not run the
    /// engine).
    pub events: u64,
    /// Set when a search ended without resolving its target; outputs are
    /// still written.
    pub unresolved: Option<String>,
}

impl Report {
    fn events(events: u64) -> Self {
        Self { events, unresolved: None }
    }
}

pub fn dispatch(command: &Command, seed: u64, out: &mut Output) -> CliResult<Report> {
    match command {
        Command::Simulate(a) => simulate::run(a, seed, out),
        Command::Sweep(a) => sweep::run(a, seed, out),
        Command::Phase(a) => phase::run(a, seed, out),
        Command::Couple(a) => couple::run(a, seed, out),
        Command::Bounds(a) => bounds::run(a, seed, out),
        Command::Perc(a) => perc::run(a, seed, out),
    }
}

/// Formats a rate for CSV output, writing infinity as `inf`.
fn rate_text(x: f64) -> String {
    if x.is_infinite() {
        "inf".into()
    } else {
        x.to_string()
    }
}
