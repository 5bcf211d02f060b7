use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use serde::{Serialize, Serializer};

use contagion_core::engine::{rate_serde, EngineConfig, InitialLoadDistribution, Mode};
use contagion_core::lattice::{Norm, TorusLattice};
use contagion_core::percolation::{Adjacency, StartPolicy};

fn rate(s: &str) -> Result<f64, String> {
    contagion_core::engine::parse_rate(s).map_err(|e| e.to_string())
}

fn rate_list<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
    let items: Vec<serde_json::Value> = v
        .iter()
        .map(|x| if x.is_infinite() { "inf".into() } else { serde_json::json!(x) })
        .collect();
    items.serialize(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "contagion", version, about = "Spatial SIS epidemic with site contamination")]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// `key = value` file (or a run manifest) supplying defaults for any flag.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Master seed; falls back to $CONTAGION_SEED, then 0.
    #[arg(long, global = true, env = "CONTAGION_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value = "out")]
    pub out_dir: PathBuf,
    /// Worker threads (0 = one per core). Never changes results.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Format of tabular outputs.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One run of the epidemic; writes run_result.json and trajectory.csv.
    #[command(args_override_self = true)]
    Simulate(SimulateArgs),
    /// Survival fractions over a grid of rates; writes sweep.csv.
    #[command(args_override_self = true)]
    Sweep(SweepArgs),
    /// Phase-diagram search; writes lambda_search.csv, phase_boundary.csv
    /// and phase_estimate.json.
    #[command(args_override_self = true)]
    Phase(PhaseArgs),
    /// Coupled runs differing in one rate; writes domination_report.json
    /// and survival curves.
    #[command(args_override_self = true)]
    Couple(CoupleArgs),
    /// Subcriticality bound; writes bound_result.json and bounds_sweep.csv.
    #[command(args_override_self = true)]
    Bounds(BoundsArgs),
    /// Region openness vs site percolation; writes openness.csv,
    /// percolation.csv and verdict.json.
    #[command(args_override_self = true)]
    Perc(PercArgs),
}

impl Command {
    pub const NAMES: [&'static str; 6] = ["simulate", "sweep", "phase", "couple", "bounds", "perc"];

    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::Sweep(_) => "sweep",
            Command::Phase(_) => "phase",
            Command::Couple(_) => "couple",
            Command::Bounds(_) => "bounds",
            Command::Perc(_) => "perc",
        }
    }

    /// Resolved options as a flat map keyed by flag name.
    pub fn config_json(&self, seed: u64) -> serde_json::Value {
        let mut v = match self {
            Command::Simulate(a) => serde_json::to_value(a),
            Command::Sweep(a) => serde_json::to_value(a),
            Command::Phase(a) => serde_json::to_value(a),
            Command::Couple(a) => serde_json::to_value(a),
            Command::Bounds(a) => serde_json::to_value(a),
            Command::Perc(a) => serde_json::to_value(a),
        }
        .expect("options serialise");
        v["seed"] = seed.into();
        v
    }
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct EngineArgs {
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Torus side L.
    #[arg(long, default_value_t = 30)]
    pub side: usize,
    /// Region radius.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value = "l1")]
    pub norm: Norm,
    /// Particle recovery rate.
    #[arg(long, value_parser = rate, default_value = "1")]
    #[serde(with = "rate_serde")]
    pub lambda: f64,
    /// Site clearance rate; `inf` disables contamination.
    #[arg(long, value_parser = rate, default_value = "inf")]
    #[serde(with = "rate_serde")]
    pub gamma: f64,
    /// Law of the initial number of particles per site: `m` or `m:p,m:p,...`.
    #[arg(long, default_value = "1")]
    #[serde(serialize_with = "load_law")]
    pub m_dist: InitialLoadDistribution,
    #[arg(long, default_value = "standard")]
    pub mode: Mode,
    /// Event budget K.
    #[arg(long, default_value_t = 100_000)]
    pub max_events: u64,
    #[arg(long, action = ArgAction::Set, default_value_t = false)]
    pub count_sites_as_survival: bool,
    #[arg(long, action = ArgAction::Set, default_value_t = true)]
    pub infect_origin_site: bool,
}

fn load_law<S: Serializer>(d: &InitialLoadDistribution, s: S) -> Result<S::Ok, S::Error> {
    let text: Vec<String> = d.pmf().iter().map(|(m, p)| format!("{m}:{p}")).collect();
    text.join(",").serialize(s)
}

impl EngineArgs {
    pub fn engine_config(&self, lambda: f64, gamma: f64, seed: u64) -> contagion_core::Result<EngineConfig> {
        let lattice = TorusLattice::new(self.dim, self.side)?;
        let mut c = EngineConfig::new(lattice, self.k, lambda, gamma, self.max_events, seed);
        c.norm = self.norm;
        c.m_dist = self.m_dist.clone();
        c.mode = self.mode;
        c.count_sites_as_survival = self.count_sites_as_survival;
        c.infect_origin_site = self.infect_origin_site;
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub engine: EngineArgs,
    #[arg(long, action = ArgAction::Set, default_value_t = true)]
    pub record_trajectory: bool,
    /// Maximal number of trajectory rows (older rows are thinned).
    #[arg(long, default_value_t = contagion_core::engine::DEFAULT_TRAJECTORY_POINTS)]
    pub trajectory_points: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct SweepArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub engine: EngineArgs,
    /// Recovery rates to sweep (comma separated).
    #[arg(long, value_parser = rate, value_delimiter = ',', action = ArgAction::Set, num_args = 1.., default_value = "0.5,1,2")]
    #[serde(serialize_with = "rate_list")]
    pub lambdas: Vec<f64>,
    /// Clearance rates to sweep (comma separated, `inf` allowed).
    #[arg(long, value_parser = rate, value_delimiter = ',', action = ArgAction::Set, num_args = 1.., default_value = "inf")]
    #[serde(serialize_with = "rate_list")]
    pub gammas: Vec<f64>,
    /// Independent runs per grid point.
    #[arg(long, default_value_t = 20)]
    pub replicas: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct PhaseArgs {
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Torus side L.
    #[arg(long, default_value_t = 30)]
    pub side: usize,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = 1)]
    pub particles_per_site: u32,
    /// Event budget K per run.
    #[arg(long, default_value_t = 100_000)]
    pub max_events: u64,
    /// Maximal runs S per parameter point.
    #[arg(long, default_value_t = 30)]
    pub max_sims: usize,
    #[arg(long, default_value_t = 1.5)]
    pub lambda_init: f64,
    #[arg(long, default_value_t = 0.01)]
    pub lambda_step: f64,
    #[arg(long, default_value_t = 0)]
    pub refine_iters: usize,
    #[arg(long, default_value_t = 10.0)]
    pub gamma_init: f64,
    #[arg(long, default_value_t = 0.9)]
    pub gamma_factor: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub gamma_floor: f64,
    /// Runs evaluated speculatively in parallel per parameter point.
    #[arg(long, default_value_t = 4)]
    pub batch: usize,
    /// Recovery rates at which to estimate the clearance threshold; empty
    /// skips that stage.
    #[arg(long, value_parser = rate, value_delimiter = ',', action = ArgAction::Set, num_args = 0..)]
    #[serde(serialize_with = "rate_list")]
    pub lambda_grid: Vec<f64>,
    /// Use this value instead of searching for the threshold without
    /// contamination.
    #[arg(long)]
    pub lambda_c_inf: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PairArg {
    Gamma,
    Lambda,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct CoupleArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub engine: EngineArgs,
    /// Which rate differs between the two processes.
    #[arg(long, value_enum, default_value_t = PairArg::Gamma)]
    pub pair: PairArg,
    /// Smaller rate of the pair (the process that keeps more infection).
    #[arg(long, value_parser = rate, default_value = "0.5")]
    #[serde(with = "rate_serde")]
    pub strict: f64,
    #[arg(long, value_parser = rate, default_value = "2")]
    #[serde(with = "rate_serde")]
    pub lax: f64,
    /// Check domination every this many events.
    #[arg(long, default_value_t = 1)]
    pub check_every: u64,
    /// Coupled runs (run r uses the seed derived from (seed, r)).
    #[arg(long, default_value_t = 10)]
    pub replicas: usize,
    /// Times at which the survival curves are evaluated.
    #[arg(long, value_delimiter = ',', action = ArgAction::Set, num_args = 1.., default_value = "0,1,2,5,10,20,50,100")]
    pub time_grid: Vec<f64>,
    /// Independent runs per survival curve (0 skips the curves).
    #[arg(long, default_value_t = 100)]
    pub curve_replicas: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct BoundsArgs {
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = 1)]
    pub m_bar: u32,
    #[arg(long, value_parser = rate, default_value = "10")]
    #[serde(with = "rate_serde")]
    pub lambda: f64,
    #[arg(long, value_parser = rate, default_value = "1")]
    #[serde(with = "rate_serde")]
    pub gamma: f64,
    /// Bisection tolerance of the subcritical recovery rate.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Recovery rates of the sweep table.
    #[arg(long, value_parser = rate, value_delimiter = ',', action = ArgAction::Set, num_args = 1.., default_value = "1,2,5,10,20,50,100,200,500,1000")]
    #[serde(serialize_with = "rate_list")]
    pub lambdas: Vec<f64>,
    /// Clearance rates of the sweep table.
    #[arg(long, value_parser = rate, value_delimiter = ',', action = ArgAction::Set, num_args = 1.., default_value = "0.1,1,10,inf")]
    #[serde(serialize_with = "rate_list")]
    pub gammas: Vec<f64>,
    /// Local-process Monte Carlo trials at (lambda, gamma); 0 skips it.
    #[arg(long, default_value_t = 0)]
    pub mc_trials: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct PercArgs {
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, value_parser = rate, value_delimiter = ',', action = ArgAction::Set, num_args = 1.., default_value = "1")]
    #[serde(serialize_with = "rate_list")]
    pub lambdas: Vec<f64>,
    #[arg(long, value_parser = rate, value_delimiter = ',', action = ArgAction::Set, num_args = 1.., default_value = "1,0.1,0.01,0.001,0.0001")]
    #[serde(serialize_with = "rate_list")]
    pub gammas: Vec<f64>,
    /// Region trials per (lambda, gamma).
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    /// Probability that a region has at least one particle.
    #[arg(long, default_value_t = 1.0)]
    pub p_m_ge_1: f64,
    #[arg(long, default_value = "farthest")]
    pub start_policy: StartPolicy,
    /// Trial time limit (default 1e4 / gamma).
    #[arg(long)]
    pub max_sim_time: Option<f64>,
    /// Side of the percolation box.
    #[arg(long, default_value_t = 128)]
    pub n: usize,
    #[arg(long, default_value = "four")]
    pub adjacency: Adjacency,
    /// Percolation realisations (threshold estimate and sweep).
    #[arg(long, default_value_t = 2000)]
    pub realizations: usize,
    /// Open-site probabilities of the spanning sweep.
    #[arg(long, value_delimiter = ',', action = ArgAction::Set, num_args = 1.., default_value = "0.55,0.56,0.57,0.58,0.59,0.6,0.61,0.62,0.63,0.64,0.65")]
    pub p_grid: Vec<f64>,
}
