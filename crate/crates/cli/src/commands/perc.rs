use serde::Serialize;

use contagion_core::percolation::{
    compare, crossing_point, estimate_openness, estimate_threshold, spanning_sweep, write_openness_csv,
    write_percolation_csv, Adjacency, OpennessEstimate, RegionTrialConfig, SupercriticalityVerdict,
    ThresholdEstimate, Verdict,
};
use contagion_core::rng::{derive_path, derive_seed};

use super::Report;
use crate::cli::PercArgs;
use crate::error::{CliError, CliResult};
use crate::output::Output;

#[derive(Debug, Serialize)]
struct OpennessRow {
    lambda: f64,
    gamma: f64,
    k: usize,
    #[serde(flatten)]
    estimate: OpennessEstimate,
}

#[derive(Debug, Serialize)]
struct PercRow {
    n: usize,
    adjacency: Adjacency,
    p: f64,
    spanning_fraction: f64,
}

#[derive(Debug, Serialize)]
struct VerdictEntry {
    lambda: f64,
    gamma: f64,
    #[serde(flatten)]
    verdict: SupercriticalityVerdict,
}

#[derive(Debug, Serialize)]
struct VerdictFile {
    threshold: ThresholdEstimate,
    crossing_point: Option<f64>,
    any_supercritical_evidence: bool,
    points: Vec<VerdictEntry>,
}

pub fn run(args: &PercArgs, seed: u64, out: &mut Output) -> CliResult<Report> {
    if args.p_grid.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(CliError::Config("p-grid values must lie in [0, 1]".into()));
    }
    let mut configs = Vec::new();
    for &gamma in &args.gammas {
        for &lambda in &args.lambdas {
            let mut c = RegionTrialConfig::new(args.k, lambda, gamma, derive_path(seed, &[1, lambda.to_bits(), gamma.to_bits()]));
            c.start_policy = args.start_policy;
            c.max_sim_time = args.max_sim_time;
            c.validate()?;
            configs.push(c);
        }
    }
    // the threshold estimate and the sweep share their realisations
    let perc_seed = derive_seed(seed, 0);
    let threshold = estimate_threshold(args.n, args.adjacency, args.realizations, perc_seed)?;
    let sweep = spanning_sweep(args.n, args.adjacency, &args.p_grid, args.realizations, perc_seed)?;

    let mut estimates = Vec::new();
    for c in &configs {
        estimates.push((*c, estimate_openness(c, args.trials, args.p_m_ge_1)?));
    }
    let rows: Vec<OpennessRow> = estimates
        .iter()
        .map(|(c, e)| OpennessRow { lambda: c.lambda, gamma: c.gamma, k: c.k, estimate: *e })
        .collect();
    out.table("openness", &rows, |w| write_openness_csv(&estimates, w))?;
    let perc_rows: Vec<PercRow> = sweep
        .iter()
        .map(|&(p, f)| PercRow { n: args.n, adjacency: args.adjacency, p, spanning_fraction: f })
        .collect();
    out.table("percolation", &perc_rows, |w| write_percolation_csv(args.n, args.adjacency, &sweep, w))?;

    let points: Vec<VerdictEntry> = estimates
        .iter()
        .map(|(c, e)| VerdictEntry { lambda: c.lambda, gamma: c.gamma, verdict: compare(*e, threshold) })
        .collect();
    let any = points.iter().any(|p| p.verdict.verdict == Verdict::SupercriticalEvidence);
    out.json(
        "verdict.json",
        &VerdictFile { threshold, crossing_point: crossing_point(&sweep), any_supercritical_evidence: any, points },
    )?;
    Ok(Report::default())
}
