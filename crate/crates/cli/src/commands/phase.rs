use serde::Serialize;

use contagion_core::experiment::{
    estimate_gamma_c, estimate_lambda_c_inf, write_lambda_search_csv, write_phase_boundary_csv, LambdaSearch,
    PhaseBoundaryEstimate, SearchConfig,
};

use super::Report;
use crate::cli::PhaseArgs;
use crate::error::{CliError, CliResult};
use crate::output::Output;

#[derive(Debug, Serialize)]
struct PhaseEstimate<'a> {
    lambda_search: &'a LambdaSearch,
    #[serde(flatten)]
    boundary: &'a PhaseBoundaryEstimate,
}

fn search_config(args: &PhaseArgs, seed: u64) -> SearchConfig {
    SearchConfig {
        dim: args.dim,
        side: args.side,
        k: args.k,
        particles_per_site: args.particles_per_site,
        max_events: args.max_events,
        max_sims: args.max_sims,
        lambda_init: args.lambda_init,
        lambda_step: args.lambda_step,
        refine_iters: args.refine_iters,
        gamma_init: args.gamma_init,
        gamma_factor: args.gamma_factor,
        gamma_floor: args.gamma_floor,
        batch: args.batch,
        seed,
    }
}

pub fn run(args: &PhaseArgs, seed: u64, out: &mut Output) -> CliResult<Report> {
    let search = search_config(args, seed);
    search.validate()?;
    let lambda_search = match args.lambda_c_inf {
        Some(v) if v > 0.0 => LambdaSearch { estimate: Some(v), trace: Vec::new(), refinement: Vec::new() },
        Some(v) => return Err(CliError::Config(format!("lambda-c-inf must be positive, got {v}"))),
        None => estimate_lambda_c_inf(&search)?,
    };
    let mut events: u64 = lambda_search.trace.iter().chain(&lambda_search.refinement).map(|t| t.events).sum();
    let rows: Vec<_> = lambda_search.trace.iter().chain(&lambda_search.refinement).cloned().collect();
    out.table("lambda_search", &rows, |w| write_lambda_search_csv(&rows, w))?;

    let boundary = if lambda_search.estimate.is_some() && !args.lambda_grid.is_empty() {
        estimate_gamma_c(&args.lambda_grid, lambda_search.estimate, &search)?
    } else {
        PhaseBoundaryEstimate { lambda_c_inf_hat: lambda_search.estimate, points: Vec::new(), protocol: search.clone() }
    };
    events += boundary.points.iter().map(|p| p.events).sum::<u64>();
    out.table("phase_boundary", &boundary.points, |w| write_phase_boundary_csv(&boundary.points, w))?;
    out.json("phase_estimate.json", &PhaseEstimate { lambda_search: &lambda_search, boundary: &boundary })?;

    let unresolved = if lambda_search.estimate.is_none() {
        Some(format!(
            "no survival down to lambda = {}; increase K, S or L",
            search.lambda_step
        ))
    } else {
        let open: Vec<String> = boundary
            .points
            .iter()
            .filter(|p| !p.resolved)
            .map(|p| p.lambda.to_string())
            .collect();
        (!open.is_empty()).then(|| format!("no survival above the gamma floor at lambda = {}", open.join(", ")))
    };
    Ok(Report { events, unresolved })
}
