//! Monotone couplings of two epidemics that differ in one rate.
//!
//! Both processes are driven by one stream of proposals. Jumps (particle
//! and destination) are shared. For a pair of clearance rates
//! `gamma0 <= gamma1`, clearance proposals arrive at rate `gamma1` per
//! contaminated site; the `gamma1` process applies every proposal and the
//! `gamma0` process keeps each one independently with probability
//! `gamma0 / gamma1`, which thins the proposals down to rate `gamma0`.
//! Recoveries are handled the same way for a pair of recovery rates.
//!
//! Proposals only need to reach particles and sites that are infected in
//! at least one process. While the slower-recovering ("strict") process
//! dominates the faster one ("lax"), that union is the strict process's
//! infection, so proposals are sampled from the strict index sets.

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{EngineConfig, Simulation, WorldState};
use crate::error::{invalid, Error, Result};
use crate::rng::{derive_seed, exp_sample, rng_from_seed, SimRng};

/// Which rate differs between the two coupled processes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PairKind {
    /// Clearance rates `strict <= lax`; the recovery rate comes from the
    /// base configuration.
    GammaPair { strict: f64, lax: f64 },
    /// Recovery rates `strict <= lax`; the clearance rate comes from the
    /// base configuration.
    LambdaPair { strict: f64, lax: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoupledConfig {
    /// Lattice, load law, mode, event budget and shared seed. Its rate
    /// fields supply whichever rate the pair does not vary.
    pub base: EngineConfig,
    pub pair: PairKind,
    /// Check domination every this many events (1 = after every event).
    pub check_every: u64,
}

impl CoupledConfig {
    pub fn new(base: EngineConfig, pair: PairKind) -> Self {
        Self { base, pair, check_every: 1 }
    }

    pub fn validate(&self) -> Result<()> {
        let (s, l, what) = match self.pair {
            PairKind::GammaPair { strict, lax } => (strict, lax, "clearance"),
            PairKind::LambdaPair { strict, lax } => (strict, lax, "recovery"),
        };
        if !(s > 0.0 && s <= l && l.is_finite()) {
            return Err(invalid(format!("{what} pair needs 0 < strict <= lax < inf, got ({s}, {l})")));
        }
        if self.check_every == 0 {
            return Err(invalid("check interval must be at least 1"));
        }
        let (strict, lax) = self.configs();
        strict.validate()?;
        lax.validate()
    }

    /// Marginal configurations of the strict and lax processes.
    pub fn configs(&self) -> (EngineConfig, EngineConfig) {
        let mut strict = self.base.clone();
        let mut lax = self.base.clone();
        match self.pair {
            PairKind::GammaPair { strict: g0, lax: g1 } => {
                strict.gamma = g0;
                lax.gamma = g1;
            }
            PairKind::LambdaPair { strict: l0, lax: l1 } => {
                strict.lambda = l0;
                lax.lambda = l1;
            }
        }
        (strict, lax)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominationReport {
    pub events_checked: u64,
    pub domination_held: bool,
    /// Index of the first event after which domination failed.
    pub first_violation: Option<u64>,
    pub survived_strict: bool,
    pub survived_lax: bool,
    pub strict_extinction_time: Option<f64>,
    pub lax_extinction_time: Option<f64>,
}

/// Two worlds driven by one proposal stream.
#[derive(Debug, Clone)]
pub struct CoupledSimulation {
    config: CoupledConfig,
    strict: WorldState,
    lax: WorldState,
    rng: SimRng,
    /// Rates at which recovery and clearance proposals arrive per
    /// infected particle / contaminated site.
    recovery_rate: f64,
    clearance_rate: f64,
    /// Probabilities with which the strict process keeps a proposal.
    keep_recovery: f64,
    keep_clearance: f64,
    time: f64,
    events: u64,
}

impl CoupledSimulation {
    pub fn new(config: CoupledConfig) -> Result<Self> {
        config.validate()?;
        let (strict_cfg, lax_cfg) = config.configs();
        let mut rng = rng_from_seed(config.base.seed);
        let mut twin = rng.clone();
        let strict = WorldState::init(&strict_cfg, &mut rng)?;
        let lax = WorldState::init(&lax_cfg, &mut twin)?;
        let (recovery_rate, clearance_rate, keep_recovery, keep_clearance) = match config.pair {
            PairKind::GammaPair { strict: g0, lax: g1 } => (config.base.lambda, g1, 1.0, g0 / g1),
            PairKind::LambdaPair { strict: l0, lax: l1 } => {
                let g = if config.base.gamma.is_finite() { config.base.gamma } else { 0.0 };
                (l1, g, l0 / l1, 1.0)
            }
        };
        Ok(Self {
            config,
            strict,
            lax,
            rng,
            recovery_rate,
            clearance_rate,
            keep_recovery,
            keep_clearance,
            time: 0.0,
            events: 0,
        })
    }

    pub fn strict(&self) -> &WorldState {
        &self.strict
    }

    pub fn lax(&self) -> &WorldState {
        &self.lax
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn events(&self) -> u64 {
        self.events
    }

    pub fn both_extinct(&self) -> bool {
        self.strict.is_extinct() && self.lax.is_extinct()
    }

    /// Executes one shared proposal.
    pub fn step(&mut self) -> Result<()> {
        let jump = self.strict.particle_count() as f64;
        let recovery = self.recovery_rate * self.strict.infected_count() as f64;
        let clearance = self.clearance_rate * self.strict.contaminated_count() as f64;
        let total = jump + recovery + clearance;
        if !(total > 0.0) {
            return Err(Error::Precondition("no proposal can fire".into()));
        }
        let dt = exp_sample(&mut self.rng, total);
        self.time += dt;
        self.strict.time += dt;
        self.lax.time += dt;
        self.strict.event_count += 1;
        self.lax.event_count += 1;
        self.events += 1;
        let u = self.rng.random::<f64>() * total;
        if u < jump || (recovery == 0.0 && clearance == 0.0) {
            let p = self.rng.random_range(0..self.strict.particle_count()) as u32;
            let choice = self.rng.random_range(0..self.strict.move_count(p));
            self.strict.apply_jump(p, choice);
            self.lax.apply_jump(p, choice);
        } else if u < jump + recovery || clearance == 0.0 {
            let set = self.strict.infected_particles();
            let p = set.get(self.rng.random_range(0..set.len()));
            let keep = self.rng.random::<f64>() < self.keep_recovery;
            self.lax.apply_recovery(p);
            if keep {
                self.strict.apply_recovery(p);
            }
        } else {
            let set = self.strict.contaminated_sites();
            let site = set.get(self.rng.random_range(0..set.len()));
            let keep = self.rng.random::<f64>() < self.keep_clearance;
            self.lax.apply_clearance(site);
            if keep {
                self.strict.apply_clearance(site);
            }
        }
        Ok(())
    }

    /// Whether the lax infection (particles and sites) is contained in the
    /// strict one.
    pub fn dominated(&self) -> bool {
        let infected = self.strict.infected_particles();
        let sites = self.strict.contaminated_sites();
        self.lax.infected_particles().as_slice().iter().all(|&p| infected.contains(p))
            && self.lax.contaminated_sites().as_slice().iter().all(|&s| sites.contains(s))
    }

    pub fn run(mut self) -> Result<DominationReport> {
        let k = self.config.base.max_events;
        let every = self.config.check_every;
        let mut checked = 0;
        let mut first_violation = None;
        let mut strict_ext = self.strict.is_extinct().then_some(0.0);
        let mut lax_ext = self.lax.is_extinct().then_some(0.0);
        if !self.dominated() {
            first_violation = Some(0);
        }
        while self.events < k && !self.both_extinct() {
            self.step()?;
            if strict_ext.is_none() && self.strict.is_extinct() {
                strict_ext = Some(self.time);
            }
            if lax_ext.is_none() && self.lax.is_extinct() {
                lax_ext = Some(self.time);
            }
            if self.events % every == 0 || self.both_extinct() || self.events == k {
                checked += 1;
                if first_violation.is_none() && !self.dominated() {
                    first_violation = Some(self.events);
                }
            }
        }
        let sites_count = self.config.base.count_sites_as_survival;
        let alive = |w: &WorldState| w.infected_count() > 0 || (sites_count && w.contaminated_count() > 0);
        let reached_k = self.events == k;
        Ok(DominationReport {
            events_checked: checked,
            domination_held: first_violation.is_none(),
            first_violation,
            survived_strict: reached_k && alive(&self.strict),
            survived_lax: reached_k && alive(&self.lax),
            strict_extinction_time: strict_ext,
            lax_extinction_time: lax_ext,
        })
    }
}

pub fn coupled_run(config: &CoupledConfig) -> Result<DominationReport> {
    CoupledSimulation::new(config.clone())?.run()
}

/// Fraction of `replicas` independent runs with infection (particles or
/// sites) present at each time of `time_grid`.
///
/// Replica `r` uses seed `derive_seed(config.seed, r)` and is simulated
/// until extinction, until it passes the last grid time, or until
/// `config.max_events` events, whichever comes first. A replica stopped by
/// the event cap counts as infected at every later grid time. Each
/// replica's indicator is non-increasing in time because extinction is
/// absorbing, so the returned curve is non-increasing exactly.
pub fn survival_curve(config: &EngineConfig, time_grid: &[f64], replicas: usize) -> Result<Vec<(f64, f64)>> {
    if replicas == 0 {
        return Err(invalid("need at least one replica"));
    }
    let horizon = time_grid.iter().copied().fold(0.0, f64::max);
    let extinction: Vec<Option<f64>> = (0..replicas as u64)
        .into_par_iter()
        .map(|r| {
            let cfg = EngineConfig { seed: derive_seed(config.seed, r), ..config.clone() };
            let mut sim = Simulation::new(cfg)?;
            while !sim.world().is_extinct()
                && sim.world().time() <= horizon
                && sim.world().event_count() < config.max_events
            {
                sim.step()?;
            }
            Ok(sim.world().is_extinct().then(|| sim.world().time()))
        })
        .collect::<Result<_>>()?;
    Ok(time_grid
        .iter()
        .map(|&t| {
            let alive = extinction.iter().filter(|e| e.is_none_or(|x| x > t)).count();
            (t, alive as f64 / replicas as f64)
        })
        .collect())
}

pub const SURVIVAL_CURVE_HEADER: &str = "t,survival_fraction";

pub fn write_survival_curve_csv<W: Write>(curve: &[(f64, f64)], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{SURVIVAL_CURVE_HEADER}")?;
    for (t, f) in curve {
        writeln!(out, "{t},{f}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{InitialLoadDistribution, Mode};
    use crate::lattice::TorusLattice;
    use crate::rng::stream;

    fn base(d: usize, l: usize, k: usize, lambda: f64, gamma: f64, events: u64, seed: u64) -> EngineConfig {
        EngineConfig::new(TorusLattice::new(d, l).unwrap(), k, lambda, gamma, events, seed)
    }

    #[test]
    fn equal_rates_give_identical_twins() {
        for pair in [
            PairKind::GammaPair { strict: 0.7, lax: 0.7 },
            PairKind::LambdaPair { strict: 0.4, lax: 0.4 },
        ] {
            let cfg = CoupledConfig::new(base(2, 8, 1, 0.4, 0.7, 5_000, 3), pair);
            let mut sim = CoupledSimulation::new(cfg).unwrap();
            while sim.events() < 5_000 && !sim.both_extinct() {
                sim.step().unwrap();
                assert_eq!(sim.strict().particles(), sim.lax().particles());
                assert_eq!(sim.strict().contaminated_sites().as_slice(), sim.lax().contaminated_sites().as_slice());
                assert_eq!(sim.strict().infected_particles().as_slice(), sim.lax().infected_particles().as_slice());
            }
        }
    }

    #[test]
    fn invalid_pairs_are_rejected() {
        let b = base(2, 8, 1, 1.0, 1.0, 10, 0);
        assert!(CoupledSimulation::new(CoupledConfig::new(b.clone(), PairKind::GammaPair { strict: 2.0, lax: 1.0 })).is_err());
        assert!(CoupledSimulation::new(CoupledConfig::new(b.clone(), PairKind::GammaPair { strict: 1.0, lax: f64::INFINITY })).is_err());
        assert!(CoupledSimulation::new(CoupledConfig::new(b, PairKind::LambdaPair { strict: 0.0, lax: 1.0 })).is_err());
    }

    #[test]
    fn tiny_strict_lambda_dominates() {
        let mut rng = stream(77, 0);
        for i in 0..100u64 {
            let lambda1 = rng.random_range(0.2..3.0);
            let gamma = if i % 3 == 0 { f64::INFINITY } else { rng.random_range(0.1..3.0) };
            let cfg = CoupledConfig::new(
                base(2, 6, 1, 1.0, gamma, 500, i),
                PairKind::LambdaPair { strict: 1e-6, lax: lambda1 },
            );
            let rep = coupled_run(&cfg).unwrap();
            assert!(rep.domination_held, "config {i}: {rep:?}");
        }
    }

    #[test]
    fn site_only_mode_is_also_monotone() {
        let mut b = base(2, 8, 1, 0.5, 0.5, 5_000, 5);
        b.mode = Mode::SiteOnly;
        b.m_dist = InitialLoadDistribution::new(vec![(0, 0.3), (1, 0.4), (3, 0.3)]).unwrap();
        for pair in [PairKind::GammaPair { strict: 0.1, lax: 2.0 }, PairKind::LambdaPair { strict: 0.1, lax: 2.0 }] {
            let rep = coupled_run(&CoupledConfig::new(b.clone(), pair)).unwrap();
            assert!(rep.domination_held);
            assert!(!(rep.survived_lax && !rep.survived_strict));
        }
    }

    #[test]
    fn check_interval_counts() {
        let mut cfg = CoupledConfig::new(base(1, 8, 1, 1e-3, 1e-3, 1_000, 1), PairKind::GammaPair { strict: 1e-3, lax: 1.0 });
        cfg.check_every = 10;
        let rep = coupled_run(&cfg).unwrap();
        assert_eq!(rep.events_checked, 100);
        cfg.check_every = 1;
        assert_eq!(coupled_run(&cfg).unwrap().events_checked, 1_000);
    }

    /// Two-sample Kolmogorov-Smirnov statistic.
    fn ks2(a: &mut [f64], b: &mut [f64]) -> f64 {
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        let (mut i, mut j, mut d) = (0, 0, 0.0f64);
        while i < a.len() && j < b.len() {
            let x = a[i].min(b[j]);
            while i < a.len() && a[i] <= x {
                i += 1;
            }
            while j < b.len() && b[j] <= x {
                j += 1;
            }
            d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
        }
        d
    }

    #[test]
    fn strict_marginal_matches_independent_runs() {
        let n = 1_000;
        let (lambda, g0, g1) = (1.0, 0.3, 2.0);
        let mut coupled = Vec::with_capacity(n);
        let mut plain = Vec::with_capacity(n);
        for r in 0..n as u64 {
            let mut b = base(1, 6, 1, lambda, g0, 1_000_000, derive_seed(1, r));
            b.m_dist = InitialLoadDistribution::point_mass(1);
            let rep = coupled_run(&CoupledConfig::new(b.clone(), PairKind::GammaPair { strict: g0, lax: g1 })).unwrap();
            coupled.push(rep.strict_extinction_time.expect("small system dies out"));
            let ind = EngineConfig { seed: derive_seed(2, r), ..b };
            plain.push(crate::engine::run(&ind).unwrap().extinction_time.expect("dies out"));
        }
        let d = ks2(&mut coupled, &mut plain);
        // two-sample critical value at alpha = 0.01
        let crit = 1.628 * ((2 * n) as f64 / (n * n) as f64).sqrt();
        assert!(d < crit, "KS {d} >= {crit}");
    }

    #[test]
    fn survival_curve_is_monotone() {
        let cfg = base(2, 10, 1, 5.0, 5.0, 1_000_000, 9);
        let grid: Vec<f64> = (0..=20).map(|i| i as f64 * 0.25).collect();
        let curve = survival_curve(&cfg, &grid, 200).unwrap();
        assert_eq!(curve[0], (0.0, 1.0));
        assert!(curve.windows(2).all(|w| w[1].1 <= w[0].1));
        assert!(curve.last().unwrap().1 < 0.05, "{curve:?}");
        assert!(survival_curve(&cfg, &grid, 0).is_err());
        let mut buf = Vec::new();
        write_survival_curve_csv(&curve, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("t,survival_fraction\n0,1\n"));
    }
}
