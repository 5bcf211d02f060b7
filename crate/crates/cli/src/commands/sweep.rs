use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use contagion_core::engine::{rate_serde, run as run_engine};
use contagion_core::rng::derive_path;

use super::{rate_text, Report};
use crate::cli::SweepArgs;
use crate::error::{CliError, CliResult};
use crate::output::Output;

pub const SWEEP_HEADER: &str = "lambda,gamma,replicas,survived,survival_fraction,mean_events";

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub lambda: f64,
    #[serde(with = "rate_serde")]
    pub gamma: f64,
    pub replicas: usize,
    pub survived: usize,
    pub survival_fraction: f64,
    pub mean_events: f64,
}

pub fn run(args: &SweepArgs, seed: u64, out: &mut Output) -> CliResult<Report> {
    if args.replicas == 0 {
        return Err(CliError::Config("replicas must be at least 1".into()));
    }
    let points: Vec<(f64, f64)> = args
        .gammas
        .iter()
        .flat_map(|&g| args.lambdas.iter().map(move |&l| (l, g)))
        .collect();
    for &(l, g) in &points {
        args.engine.engine_config(l, g, seed)?;
    }
    // run r at (lambda, gamma) is seeded from (seed, lambda, gamma, r) alone
    let runs = points
        .par_iter()
        .flat_map(|&(l, g)| (0..args.replicas as u64).into_par_iter().map(move |r| (l, g, r)))
        .map(|(l, g, r)| {
            let config = args.engine.engine_config(l, g, derive_path(seed, &[l.to_bits(), g.to_bits(), r]))?;
            run_engine(&config).map(|res| (res.survived, res.events_executed))
        })
        .collect::<contagion_core::Result<Vec<_>>>()?;
    let rows: Vec<SweepRow> = points
        .iter()
        .zip(runs.chunks(args.replicas))
        .map(|(&(lambda, gamma), chunk)| {
            let survived = chunk.iter().filter(|r| r.0).count();
            SweepRow {
                lambda,
                gamma,
                replicas: args.replicas,
                survived,
                survival_fraction: survived as f64 / args.replicas as f64,
                mean_events: chunk.iter().map(|r| r.1 as f64).sum::<f64>() / args.replicas as f64,
            }
        })
        .collect();
    out.table("sweep", &rows, |w| {
        writeln!(w, "{SWEEP_HEADER}")?;
        for r in &rows {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                r.lambda,
                rate_text(r.gamma),
                r.replicas,
                r.survived,
                r.survival_fraction,
                r.mean_events
            )?;
        }
        Ok(())
    })?;
    Ok(Report::events(runs.iter().map(|r| r.1).sum()))
}
