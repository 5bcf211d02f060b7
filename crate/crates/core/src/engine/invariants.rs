//! Event-by-event checking of the engine's invariants against a shadow
//! copy of the infection and contamination flags.

use super::{EngineConfig, EventKind, EventRecord, Mode, Simulation, WorldState};
use crate::lattice::{torus_distance, Norm};

/// Follows a world through its events and reports the first transition
/// that breaks conservation, range restriction, locality or absorption.
/// A full bookkeeping audit runs every `audit_every` events.
#[derive(Debug, Clone)]
pub struct InvariantMonitor {
    k: usize,
    norm: Norm,
    mode: Mode,
    contamination: bool,
    particles: usize,
    infected: Vec<bool>,
    contaminated: Vec<bool>,
    infected_count: usize,
    contaminated_count: usize,
    audit_every: u64,
    events: u64,
    audits: u64,
    extinct: bool,
}

impl InvariantMonitor {
    pub fn new(world: &WorldState, k: usize, norm: Norm, audit_every: u64) -> Self {
        let infected: Vec<bool> = world.particles().iter().map(|p| p.infected).collect();
        let contaminated: Vec<bool> = (0..world.lattice().total_sites() as u32)
            .map(|s| world.is_contaminated(s))
            .collect();
        Self {
            k,
            norm,
            mode: world.mode(),
            contamination: world.contamination_enabled(),
            particles: world.particle_count(),
            infected_count: infected.iter().filter(|&&x| x).count(),
            contaminated_count: contaminated.iter().filter(|&&x| x).count(),
            infected,
            contaminated,
            audit_every: audit_every.max(1),
            events: 0,
            audits: 0,
            extinct: world.is_extinct(),
        }
    }

    pub fn events(&self) -> u64 {
        self.events
    }

    pub fn audits(&self) -> u64 {
        self.audits
    }

    /// Checks the event just applied to `world`.
    pub fn check(&mut self, world: &WorldState, rec: &EventRecord) -> Result<(), String> {
        self.events += 1;
        let at = self.events;
        let fail = |msg: String| Err(format!("event {at}: {msg}"));
        if world.particle_count() != self.particles {
            return fail(format!("particle count {} != {}", world.particle_count(), self.particles));
        }
        let newly = world.newly_infected();
        if newly.len() != rec.newly_infected {
            return fail("record and world disagree on new infections".into());
        }
        match rec.kind {
            EventKind::Jump { particle, from, to } => {
                let part = world.particles()[particle as usize];
                if part.pos != to || from == to {
                    return fail(format!("particle {particle} not moved to {to}"));
                }
                let lattice = world.lattice();
                let d = torus_distance(
                    &lattice.site_at(part.pos as usize),
                    &lattice.site_at(part.home as usize),
                    lattice,
                    self.norm,
                )
                .map_err(|e| e.to_string())?;
                if d > self.k {
                    return fail(format!("particle {particle} left its region (distance {d})"));
                }
                for &q in newly {
                    let qp = world.particles()[q as usize];
                    if self.infected[q as usize] || !qp.infected || qp.pos != to {
                        return fail(format!("particle {q} infected away from the jump"));
                    }
                }
                let was_contaminated = self.contaminated[to as usize];
                if self.infected[particle as usize] {
                    if self.contamination != world.is_contaminated(to) {
                        return fail(format!("arrival of an infected particle left site {to} wrong"));
                    }
                    if rec.contaminated != (self.contamination && !was_contaminated).then_some(to) {
                        return fail("contamination record wrong".into());
                    }
                    match self.mode {
                        Mode::Standard => {
                            if world.occupants(to).iter().any(|&q| !world.particles()[q as usize].infected) {
                                return fail(format!("healthy occupant left at {to}"));
                            }
                        }
                        Mode::SiteOnly => {
                            if !newly.is_empty() {
                                return fail("particle-to-particle infection in site_only mode".into());
                            }
                        }
                    }
                } else {
                    if rec.contaminated.is_some() || world.is_contaminated(to) != was_contaminated {
                        return fail(format!("healthy arrival changed site {to}"));
                    }
                    let infected_there = world.infected_at(to) as usize - newly.len();
                    let exposed = was_contaminated || (self.mode == Mode::Standard && infected_there > 0);
                    if newly.len() > 1 || (newly.len() == 1 && newly[0] != particle) || exposed != (newly.len() == 1) {
                        return fail(format!("healthy particle {particle} arriving at {to}: wrong exposure outcome"));
                    }
                }
                for &q in newly {
                    self.infected[q as usize] = true;
                }
                self.infected_count += newly.len();
                if rec.contaminated.is_some() {
                    self.contaminated[to as usize] = true;
                    self.contaminated_count += 1;
                }
            }
            EventKind::Recovery { particle } => {
                if !self.infected[particle as usize] || world.particles()[particle as usize].infected || !newly.is_empty() {
                    return fail(format!("recovery of particle {particle} inconsistent"));
                }
                self.infected[particle as usize] = false;
                self.infected_count -= 1;
            }
            EventKind::Clearance { site } => {
                if !self.contaminated[site as usize] || world.is_contaminated(site) || !newly.is_empty() {
                    return fail(format!("clearance of site {site} inconsistent"));
                }
                self.contaminated[site as usize] = false;
                self.contaminated_count -= 1;
            }
        }
        // any change outside the event shows up in the totals here or in
        // the flag comparison of the next full audit
        if world.infected_count() != self.infected_count || world.contaminated_count() != self.contaminated_count {
            return fail("infection changed away from the event".into());
        }
        if !self.contamination && world.contaminated_count() > 0 {
            return fail("contamination while disabled".into());
        }
        if self.extinct && !world.is_extinct() {
            return fail("infection reappeared after extinction".into());
        }
        self.extinct = world.is_extinct();
        if self.events % self.audit_every == 0 {
            self.audit(world).map_err(|m| format!("event {at}: {m}"))?;
        }
        Ok(())
    }

    /// Full bookkeeping audit plus an exact comparison with the shadow
    /// flags.
    pub fn audit(&mut self, world: &WorldState) -> Result<(), String> {
        self.audits += 1;
        world.audit(self.k, self.norm)?;
        for (i, p) in world.particles().iter().enumerate() {
            if p.infected != self.infected[i] {
                return Err(format!("particle {i} infection flag drifted"));
            }
        }
        for (s, &c) in self.contaminated.iter().enumerate() {
            if world.is_contaminated(s as u32) != c {
                return Err(format!("site {s} contamination flag drifted"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuditSummary {
    pub events: u64,
    pub audits: u64,
    pub went_extinct: bool,
}

/// Steps a simulation of `config` for `config.max_events` events under an
/// [`InvariantMonitor`]. After extinction the run continues for up to
/// `after_extinction` further events (particles keep moving) to exercise
/// absorption, then stops.
pub fn audited_run(config: &EngineConfig, audit_every: u64, after_extinction: u64) -> Result<AuditSummary, String> {
    let mut sim = Simulation::new(config.clone()).map_err(|e| e.to_string())?;
    let mut monitor = InvariantMonitor::new(sim.world(), config.k, config.norm, audit_every);
    monitor.audit(sim.world())?;
    let mut extinct_since: Option<u64> = None;
    while sim.world().event_count() < config.max_events {
        if let Some(t) = extinct_since {
            if sim.world().event_count() - t >= after_extinction {
                break;
            }
        }
        if !(sim.rates().total() > 0.0) {
            break;
        }
        let rec = sim.step().map_err(|e| e.to_string())?;
        monitor.check(sim.world(), &rec)?;
        if extinct_since.is_none() && sim.world().is_extinct() {
            extinct_since = Some(sim.world().event_count());
        }
    }
    monitor.audit(sim.world())?;
    Ok(AuditSummary { events: monitor.events(), audits: monitor.audits(), went_extinct: extinct_since.is_some() })
}
