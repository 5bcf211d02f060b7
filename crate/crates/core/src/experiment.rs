//! Finite-size estimation of the phase diagram.
//!
//! A parameter point "survives" if, among up to `S` independent runs of
//! at most `K` events each, some run still has an infected particle after
//! its `K`-th event. The critical recovery rate without contamination is
//! estimated by lowering `lambda` in fixed steps until a point survives;
//! the critical clearance rate for a given `lambda` by lowering `gamma`
//! geometrically until a point survives.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{rate_serde, run, EngineConfig, InitialLoadDistribution, Mode};
use crate::error::{config, Result};
use crate::lattice::{Norm, TorusLattice};
use crate::rng::derive_path;

/// Protocol parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub dim: usize,
    /// Torus side `L`.
    pub side: usize,
    pub k: usize,
    /// Particles per site (point mass).
    pub particles_per_site: u32,
    /// Event budget `K` per run.
    pub max_events: u64,
    /// Maximal number of runs `S` per parameter point.
    pub max_sims: usize,
    pub lambda_init: f64,
    pub lambda_step: f64,
    /// Bisection passes between the last failing and first surviving
    /// `lambda`; 0 disables refinement.
    pub refine_iters: usize,
    #[serde(with = "rate_serde")]
    pub gamma_init: f64,
    pub gamma_factor: f64,
    pub gamma_floor: f64,
    /// Number of runs evaluated speculatively at once. Only affects speed.
    pub batch: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            dim: 2,
            side: 30,
            k: 1,
            particles_per_site: 1,
            max_events: 100_000,
            max_sims: 30,
            lambda_init: 1.5,
            lambda_step: 0.01,
            refine_iters: 0,
            gamma_init: 10.0,
            gamma_factor: 0.9,
            gamma_floor: 1e-4,
            batch: 4,
            seed: 0,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_sims == 0 {
            return Err(config("S must be at least 1"));
        }
        if self.max_events == 0 {
            return Err(config("K must be at least 1"));
        }
        if !(self.lambda_step > 0.0) {
            return Err(config("lambda step must be positive"));
        }
        if !(self.gamma_factor > 0.0 && self.gamma_factor < 1.0) {
            return Err(config("gamma factor must lie in (0, 1)"));
        }
        if !(self.gamma_floor > 0.0) {
            return Err(config("gamma floor must be positive"));
        }
        if self.batch == 0 {
            return Err(config("batch must be at least 1"));
        }
        self.engine_config(1.0, f64::INFINITY, 0)?.validate()
    }

    /// Engine configuration of one run of the protocol.
    pub fn engine_config(&self, lambda: f64, gamma: f64, seed: u64) -> Result<EngineConfig> {
        let lattice = TorusLattice::new(self.dim, self.side)?;
        Ok(EngineConfig {
            norm: Norm::L1,
            m_dist: InitialLoadDistribution::point_mass(self.particles_per_site),
            mode: Mode::Standard,
            ..EngineConfig::new(lattice, self.k, lambda, gamma, self.max_events, seed)
        })
    }

    /// Seed of run `replica` at `(lambda, gamma)`: every parameter point
    /// gets fresh streams.
    pub fn run_seed(&self, lambda: f64, gamma: f64, replica: usize) -> u64 {
        derive_path(self.seed, &[lambda.to_bits(), gamma.to_bits(), replica as u64])
    }
}

/// Outcome of up to `S` sequential runs at one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialBlock {
    pub survived: bool,
    pub sims_used: usize,
    /// Events executed by each consulted run, in order.
    pub events: Vec<u64>,
}

impl TrialBlock {
    pub fn total_events(&self) -> u64 {
        self.events.iter().sum()
    }
}

/// Runs the protocol's sequence of runs at `(lambda, gamma)`, stopping at
/// the first run that survives.
///
/// Runs are evaluated `search.batch` at a time in parallel, but run `r` is
/// consulted only if runs `0..r` all died, so the reported outcome is that
/// of the sequential procedure.
pub fn survival_trial_block(lambda: f64, gamma: f64, search: &SearchConfig) -> Result<TrialBlock> {
    let mut events = Vec::new();
    let mut start = 0;
    while start < search.max_sims {
        let end = (start + search.batch).min(search.max_sims);
        let results = (start..end)
            .into_par_iter()
            .map(|r| run(&search.engine_config(lambda, gamma, search.run_seed(lambda, gamma, r))?))
            .collect::<Result<Vec<_>>>()?;
        for res in results {
            events.push(res.events_executed);
            if res.survived {
                return Ok(TrialBlock { survived: true, sims_used: events.len(), events });
            }
        }
        start = end;
    }
    Ok(TrialBlock { survived: false, sims_used: events.len(), events })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaTrial {
    pub lambda: f64,
    pub survived: bool,
    pub sims_used: usize,
    /// Events executed over the consulted runs.
    pub events: u64,
}

/// Result of the downward `lambda` search at `gamma = inf`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaSearch {
    /// First surviving `lambda` (refined if requested); `None` when the
    /// search reached `lambda_step` without survival.
    pub estimate: Option<f64>,
    pub trace: Vec<LambdaTrial>,
    pub refinement: Vec<LambdaTrial>,
}

fn grid_value(start: f64, step: f64, i: usize) -> f64 {
    ((start - i as f64 * step) * 1e9).round() / 1e9
}

/// Estimates the critical recovery rate of the model without
/// contamination.
pub fn estimate_lambda_c_inf(search: &SearchConfig) -> Result<LambdaSearch> {
    search.validate()?;
    if !(search.lambda_init > search.lambda_step) {
        return Err(config("lambda_init must exceed lambda_step"));
    }
    let gamma = f64::INFINITY;
    let mut trace = Vec::new();
    let mut i = 0;
    loop {
        let lambda = grid_value(search.lambda_init, search.lambda_step, i);
        if lambda < search.lambda_step - 1e-12 {
            return Ok(LambdaSearch { estimate: None, trace, refinement: Vec::new() });
        }
        let block = survival_trial_block(lambda, gamma, search)?;
        trace.push(LambdaTrial { lambda, survived: block.survived, sims_used: block.sims_used, events: block.total_events() });
        if block.survived {
            break;
        }
        i += 1;
    }
    let mut lo = trace.last().expect("non-empty").lambda;
    let mut refinement = Vec::new();
    if trace.len() > 1 {
        let mut hi = trace[trace.len() - 2].lambda;
        for _ in 0..search.refine_iters {
            let mid = 0.5 * (lo + hi);
            let block = survival_trial_block(mid, gamma, search)?;
            refinement.push(LambdaTrial {
                lambda: mid,
                survived: block.survived,
                sims_used: block.sims_used,
                events: block.total_events(),
            });
            if block.survived {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    Ok(LambdaSearch { estimate: Some(lo), trace, refinement })
}

/// Estimated clearance threshold at one recovery rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub lambda: f64,
    /// First surviving `gamma`; for an unresolved point, the last value
    /// tried before the floor.
    pub gamma_c_hat: f64,
    pub resolved: bool,
    /// Survival already at `gamma_init`.
    pub degenerate: bool,
    /// Total runs executed over the whole `gamma` sweep.
    pub trials_used: usize,
    pub gammas_tried: usize,
    pub events: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseBoundaryEstimate {
    pub lambda_c_inf_hat: Option<f64>,
    pub points: Vec<PhasePoint>,
    pub protocol: SearchConfig,
}

fn gamma_c_at(lambda: f64, search: &SearchConfig) -> Result<PhasePoint> {
    let mut trials = 0;
    let mut events = 0;
    let mut last = search.gamma_init;
    for j in 0.. {
        let gamma = search.gamma_init * search.gamma_factor.powi(j);
        if gamma < search.gamma_floor {
            break;
        }
        last = gamma;
        let block = survival_trial_block(lambda, gamma, search)?;
        trials += block.sims_used;
        events += block.total_events();
        if block.survived {
            return Ok(PhasePoint {
                lambda,
                gamma_c_hat: gamma,
                resolved: true,
                degenerate: j == 0,
                trials_used: trials,
                gammas_tried: j as usize + 1,
                events,
            });
        }
    }
    let tried = if search.gamma_init < search.gamma_floor {
        0
    } else {
        ((search.gamma_floor / search.gamma_init).ln() / search.gamma_factor.ln()).floor() as usize + 1
    };
    Ok(PhasePoint {
        lambda,
        gamma_c_hat: last,
        resolved: false,
        degenerate: false,
        trials_used: trials,
        gammas_tried: tried,
        events,
    })
}

/// Estimates the clearance threshold at every `lambda` of the grid. Grid
/// points are processed in parallel; each point's sweep is sequential.
pub fn estimate_gamma_c(
    lambda_grid: &[f64],
    lambda_c_inf_hat: Option<f64>,
    search: &SearchConfig,
) -> Result<PhaseBoundaryEstimate> {
    search.validate()?;
    let points = lambda_grid
        .par_iter()
        .map(|&lambda| gamma_c_at(lambda, search))
        .collect::<Result<Vec<_>>>()?;
    Ok(PhaseBoundaryEstimate { lambda_c_inf_hat, points, protocol: search.clone() })
}

pub const LAMBDA_SEARCH_HEADER: &str = "lambda,survived,sims_used";
pub const PHASE_BOUNDARY_HEADER: &str = "lambda,gamma_c_hat,resolved,trials_used";

pub fn write_lambda_search_csv<W: Write>(trace: &[LambdaTrial], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{LAMBDA_SEARCH_HEADER}")?;
    for t in trace {
        writeln!(out, "{},{},{}", t.lambda, t.survived, t.sims_used)?;
    }
    Ok(())
}

pub fn write_phase_boundary_csv<W: Write>(points: &[PhasePoint], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{PHASE_BOUNDARY_HEADER}")?;
    for p in points {
        writeln!(out, "{},{},{},{}", p.lambda, p.gamma_c_hat, p.resolved, p.trials_used)?;
    }
    Ok(())
}

fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut r = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &t in &idx[i..=j] {
            r[t] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let (rx, ry) = (ranks(xs), ranks(ys));
    let n = xs.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}
