//! Exact continuous-time simulation of the epidemic.
//!
//! Three event categories compete: jumps (rate 1 per particle), recoveries
//! (rate `lambda` per infected particle) and clearances (rate `gamma` per
//! contaminated site). Each step draws an exponential holding time from
//! the aggregate rate, picks a category proportionally to its rate and
//! then a uniform member of it, which is distributionally the same as
//! running one clock per particle and site.

mod config;
mod index;
mod invariants;
mod world;

use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use config::{parse_rate, rate_serde, EngineConfig, InitialLoadDistribution, Mode, DEFAULT_TRAJECTORY_POINTS};
pub use index::IndexSet;
pub use invariants::{audited_run, AuditSummary, InvariantMonitor};
pub use world::{EventKind, EventRecord, JumpOutcome, Particle, WorldState};

use crate::error::{Error, Result};
use crate::rng::{exp_sample, rng_from_seed, SimRng};

/// Aggregate rates of the three event categories.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rates {
    pub jump: f64,
    pub recovery: f64,
    pub clearance: f64,
}

impl Rates {
    pub fn total(&self) -> f64 {
        self.jump + self.recovery + self.clearance
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub infected_particles: usize,
    pub contaminated_sites: usize,
}

/// Summary of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub survived: bool,
    pub events_executed: u64,
    pub final_time: f64,
    pub extinction_time: Option<f64>,
    pub peak_infected_particles: usize,
    pub trajectory: Option<Vec<TrajectoryPoint>>,
}

impl RunResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("run result serialises")
    }
}

pub const TRAJECTORY_HEADER: &str = "t,infected_particles,contaminated_sites";

/// Writes a trajectory as CSV with the fixed header.
pub fn write_trajectory_csv<W: Write>(points: &[TrajectoryPoint], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{TRAJECTORY_HEADER}")?;
    for p in points {
        writeln!(out, "{},{},{}", p.t, p.infected_particles, p.contaminated_sites)?;
    }
    Ok(())
}

/// Keeps at most `max` points by doubling the sampling stride whenever the
/// buffer fills.
#[derive(Debug)]
struct Recorder {
    points: Vec<TrajectoryPoint>,
    stride: u64,
    counter: u64,
    max: usize,
}

impl Recorder {
    fn new(max: usize) -> Self {
        Self { points: Vec::new(), stride: 1, counter: 0, max }
    }

    fn push(&mut self, world: &WorldState) {
        self.points.push(TrajectoryPoint {
            t: world.time(),
            infected_particles: world.infected_count(),
            contaminated_sites: world.contaminated_count(),
        });
    }

    fn observe(&mut self, world: &WorldState) {
        self.counter += 1;
        if self.counter % self.stride != 0 {
            return;
        }
        self.push(world);
        if self.points.len() >= self.max {
            let mut i = 0;
            self.points.retain(|_| {
                i += 1;
                i % 2 == 1
            });
            self.stride *= 2;
        }
    }

    fn finish(mut self, world: &WorldState) -> Vec<TrajectoryPoint> {
        if self.points.last().map(|p| p.t) != Some(world.time()) {
            self.push(world);
        }
        self.points
    }
}

/// A world together with its random stream and rates.
#[derive(Debug, Clone)]
pub struct Simulation {
    config: EngineConfig,
    world: WorldState,
    rng: SimRng,
}

impl Simulation {
    /// Initialises the world from `config.seed`.
    pub fn new(config: EngineConfig) -> Result<Self> {
        let mut rng = rng_from_seed(config.seed);
        let world = WorldState::init(&config, &mut rng)?;
        Ok(Self { config, world, rng })
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn world(&self) -> &WorldState {
        &self.world
    }

    pub fn rates(&self) -> Rates {
        total_rates(&self.world, &self.config)
    }

    /// Executes one event.
    pub fn step(&mut self) -> Result<EventRecord> {
        step(&mut self.world, &self.config, &mut self.rng)
    }

    /// Infection indicator used for the survival decision.
    pub fn infection_present(&self) -> bool {
        self.world.infected_count() > 0
            || (self.config.count_sites_as_survival && self.world.contaminated_count() > 0)
    }

    /// Runs until `K` events have executed or the infection is extinct.
    pub fn run(mut self) -> Result<RunResult> {
        let mut recorder = self
            .config
            .record_trajectory
            .then(|| Recorder::new(self.config.trajectory_max_points));
        if let Some(r) = recorder.as_mut() {
            r.push(&self.world);
        }
        let mut peak = self.world.infected_count();
        let mut extinction_time = self.world.is_extinct().then_some(0.0);
        while extinction_time.is_none() && self.world.event_count() < self.config.max_events {
            self.step()?;
            peak = peak.max(self.world.infected_count());
            if let Some(r) = recorder.as_mut() {
                r.observe(&self.world);
            }
            if self.world.is_extinct() {
                extinction_time = Some(self.world.time());
            }
        }
        let survived = self.world.event_count() == self.config.max_events && self.infection_present();
        Ok(RunResult {
            survived,
            events_executed: self.world.event_count(),
            final_time: self.world.time(),
            extinction_time,
            peak_infected_particles: peak,
            trajectory: recorder.map(|r| r.finish(&self.world)),
        })
    }
}

/// Aggregate rates `(N_p, lambda * I_p, gamma * C_s)`; the clearance rate
/// is 0 when contamination is disabled.
pub fn total_rates(world: &WorldState, config: &EngineConfig) -> Rates {
    let clearance = if world.contamination_enabled() {
        config.gamma * world.contaminated_count() as f64
    } else {
        0.0
    };
    Rates {
        jump: world.particle_count() as f64,
        recovery: config.lambda * world.infected_count() as f64,
        clearance,
    }
}

/// Advances `world` by one event drawn from `rng`.
pub fn step<R: Rng + ?Sized>(world: &mut WorldState, config: &EngineConfig, rng: &mut R) -> Result<EventRecord> {
    let rates = total_rates(world, config);
    let total = rates.total();
    if !(total > 0.0) {
        return Err(Error::Precondition("no event can fire: world is empty and clean".into()));
    }
    world.time += exp_sample(rng, total);
    world.event_count += 1;
    let u = rng.random::<f64>() * total;
    let (kind, contaminated) = if u < rates.jump || (rates.recovery == 0.0 && rates.clearance == 0.0) {
        let p = rng.random_range(0..world.particle_count()) as u32;
        let choice = rng.random_range(0..world.move_count(p));
        let out = world.apply_jump(p, choice);
        (EventKind::Jump { particle: p, from: out.from, to: out.to }, out.contaminated)
    } else if u < rates.jump + rates.recovery || rates.clearance == 0.0 {
        let set = world.infected_particles();
        let p = set.get(rng.random_range(0..set.len()));
        world.apply_recovery(p);
        (EventKind::Recovery { particle: p }, None)
    } else {
        let set = world.contaminated_sites();
        let site = set.get(rng.random_range(0..set.len()));
        world.apply_clearance(site);
        (EventKind::Clearance { site }, None)
    };
    Ok(EventRecord {
        kind,
        time: world.time(),
        newly_infected: world.newly_infected().len(),
        contaminated,
    })
}

/// Convenience wrapper: initialise and run.
pub fn run(config: &EngineConfig) -> Result<RunResult> {
    Simulation::new(config.clone())?.run()
}
