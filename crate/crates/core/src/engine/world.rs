use rand::Rng;

use super::config::{EngineConfig, Mode};
use super::index::IndexSet;
use crate::error::Result;
use crate::lattice::{torus_distance, RegionTemplate, TorusLattice};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Particle {
    pub home: u32,
    pub pos: u32,
    /// Position relative to `home`, as an id in the region template.
    pub offset: u32,
    pub infected: bool,
    /// Index of this particle in its site's occupant list.
    slot: u32,
}

/// Event applied by one simulation step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Jump { particle: u32, from: u32, to: u32 },
    Recovery { particle: u32 },
    Clearance { site: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventRecord {
    pub kind: EventKind,
    /// Time at which the event fired.
    pub time: f64,
    /// Number of particles infected by this event; the ids are available
    /// through [`WorldState::newly_infected`] until the next event.
    pub newly_infected: usize,
    /// Site contaminated by this event, if it was clean before.
    pub contaminated: Option<u32>,
}

/// Outcome of applying a jump to a world.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JumpOutcome {
    pub from: u32,
    pub to: u32,
    pub contaminated: Option<u32>,
}

/// Mutable state of one epidemic: particles, per-site occupancy and
/// contamination, and the index sets behind the event sampler.
///
/// The transition rules live here as RNG-free methods so that the plain
/// simulator and the coupled simulator apply identical semantics.
#[derive(Debug, Clone)]
pub struct WorldState {
    lattice: TorusLattice,
    degree: usize,
    neighbors: Vec<u32>,
    template: RegionTemplate,
    mode: Mode,
    contamination: bool,
    pub(crate) time: f64,
    pub(crate) event_count: u64,
    particles: Vec<Particle>,
    occupants: Vec<Vec<u32>>,
    /// Number of infected particles at each site.
    infected_here: Vec<u32>,
    contaminated: Vec<bool>,
    infected_set: IndexSet,
    contaminated_set: IndexSet,
    newly_infected: Vec<u32>,
}

impl WorldState {
    /// Places `M_x` healthy particles at every site `x` (sites in index
    /// order, one draw each), then infects the origin and its particles.
    pub fn init<R: Rng + ?Sized>(config: &EngineConfig, rng: &mut R) -> Result<Self> {
        config.validate()?;
        let lattice = config.lattice;
        let n_sites = lattice.total_sites();
        let template = RegionTemplate::new(lattice.dim(), config.k, config.norm);
        let center = template.center();
        let mut particles = Vec::new();
        let mut occupants = vec![Vec::new(); n_sites];
        for site in 0..n_sites {
            let m = config.m_dist.sample(rng);
            for _ in 0..m {
                let id = particles.len() as u32;
                occupants[site].push(id);
                particles.push(Particle {
                    home: site as u32,
                    pos: site as u32,
                    offset: center,
                    infected: false,
                    slot: (occupants[site].len() - 1) as u32,
                });
            }
        }
        let n = particles.len();
        let mut world = Self {
            lattice,
            degree: 2 * lattice.dim(),
            neighbors: lattice.neighbor_table(),
            template,
            mode: config.mode,
            contamination: config.contamination_enabled(),
            time: 0.0,
            event_count: 0,
            particles,
            occupants,
            infected_here: vec![0; n_sites],
            contaminated: vec![false; n_sites],
            infected_set: IndexSet::with_universe(n),
            contaminated_set: IndexSet::with_universe(n_sites),
            newly_infected: Vec::new(),
        };
        let origin = 0u32;
        if world.contamination && config.infect_origin_site {
            world.contaminate(origin);
        }
        for i in 0..world.occupants[0].len() {
            let p = world.occupants[0][i];
            world.infect(p);
        }
        world.newly_infected.clear();
        Ok(world)
    }

    pub fn lattice(&self) -> &TorusLattice {
        &self.lattice
    }

    pub fn template(&self) -> &RegionTemplate {
        &self.template
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn contamination_enabled(&self) -> bool {
        self.contamination
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn event_count(&self) -> u64 {
        self.event_count
    }

    pub fn particles(&self) -> &[Particle] {
        &self.particles
    }

    pub fn particle_count(&self) -> usize {
        self.particles.len()
    }

    pub fn infected_count(&self) -> usize {
        self.infected_set.len()
    }

    pub fn contaminated_count(&self) -> usize {
        self.contaminated_set.len()
    }

    pub fn infected_particles(&self) -> &IndexSet {
        &self.infected_set
    }

    pub fn contaminated_sites(&self) -> &IndexSet {
        &self.contaminated_set
    }

    pub fn is_contaminated(&self, site: u32) -> bool {
        self.contaminated[site as usize]
    }

    pub fn occupants(&self, site: u32) -> &[u32] {
        &self.occupants[site as usize]
    }

    pub fn infected_at(&self, site: u32) -> u32 {
        self.infected_here[site as usize]
    }

    /// Particles infected by the most recent jump.
    pub fn newly_infected(&self) -> &[u32] {
        &self.newly_infected
    }

    /// No infected particle and no contaminated site. Absorbing: nothing
    /// can create infection from this state.
    pub fn is_extinct(&self) -> bool {
        self.infected_set.is_empty() && self.contaminated_set.is_empty()
    }

    /// Number of moves available to particle `p` from its current position.
    #[inline]
    pub fn move_count(&self, p: u32) -> usize {
        self.template.moves(self.particles[p as usize].offset).len()
    }

    fn infect(&mut self, p: u32) {
        let part = &mut self.particles[p as usize];
        if !part.infected {
            part.infected = true;
            self.infected_here[part.pos as usize] += 1;
            self.infected_set.insert(p);
            self.newly_infected.push(p);
        }
    }

    fn contaminate(&mut self, site: u32) -> bool {
        if self.contaminated[site as usize] {
            return false;
        }
        self.contaminated[site as usize] = true;
        self.contaminated_set.insert(site);
        true
    }

    /// Moves particle `p` along its `choice`-th accessible move and applies
    /// the infection rules at the destination.
    pub fn apply_jump(&mut self, p: u32, choice: usize) -> JumpOutcome {
        self.newly_infected.clear();
        let part = self.particles[p as usize];
        let (dir, next_offset) = self.template.moves(part.offset)[choice];
        let from = part.pos;
        let to = self.neighbors[from as usize * self.degree + dir as usize];

        // detach from the old site
        let old = &mut self.occupants[from as usize];
        let last = old.pop().expect("particle is listed at its position");
        if last != p {
            old[part.slot as usize] = last;
            self.particles[last as usize].slot = part.slot;
        }
        // attach to the new one
        let dest = &mut self.occupants[to as usize];
        dest.push(p);
        let slot = (dest.len() - 1) as u32;
        {
            let part = &mut self.particles[p as usize];
            part.pos = to;
            part.offset = next_offset;
            part.slot = slot;
        }

        let mut contaminated = None;
        if part.infected {
            self.infected_here[from as usize] -= 1;
            self.infected_here[to as usize] += 1;
            if self.contamination && self.contaminate(to) {
                contaminated = Some(to);
            }
            if self.mode == Mode::Standard {
                for i in 0..self.occupants[to as usize].len() {
                    let q = self.occupants[to as usize][i];
                    self.infect(q);
                }
            }
        } else {
            let exposed = self.contaminated[to as usize]
                || (self.mode == Mode::Standard && self.infected_here[to as usize] > 0);
            if exposed {
                self.infect(p);
            }
        }
        JumpOutcome { from, to, contaminated }
    }

    /// Heals particle `p`; returns false if it was already healthy.
    pub fn apply_recovery(&mut self, p: u32) -> bool {
        self.newly_infected.clear();
        let part = &mut self.particles[p as usize];
        if !part.infected {
            return false;
        }
        part.infected = false;
        self.infected_here[part.pos as usize] -= 1;
        self.infected_set.remove(p);
        true
    }

    /// Cleans `site`; returns false if it was already clean.
    pub fn apply_clearance(&mut self, site: u32) -> bool {
        self.newly_infected.clear();
        if !self.contaminated[site as usize] {
            return false;
        }
        self.contaminated[site as usize] = false;
        self.contaminated_set.remove(site);
        true
    }

    /// Full consistency check of the redundant bookkeeping, returning a
    /// description of the first inconsistency found.
    pub fn audit(&self, k: usize, norm: crate::lattice::Norm) -> std::result::Result<(), String> {
        let n_sites = self.lattice.total_sites();
        let mut seen = vec![0u32; n_sites];
        let mut infected_here = vec![0u32; n_sites];
        for (id, part) in self.particles.iter().enumerate() {
            let id = id as u32;
            let pos = self.lattice.site_at(part.pos as usize);
            let home = self.lattice.site_at(part.home as usize);
            let dist = torus_distance(&pos, &home, &self.lattice, norm).map_err(|e| e.to_string())?;
            if dist > k {
                return Err(format!("particle {id} at distance {dist} > {k} from home"));
            }
            let h: Vec<i64> = home.coords().iter().map(|&c| c as i64).collect();
            let expect: Vec<i64> = h
                .iter()
                .zip(self.template.offset(part.offset))
                .map(|(a, b)| a + b)
                .collect();
            if self.lattice.index_of(&self.lattice.wrap(&expect)) != part.pos as usize {
                return Err(format!("particle {id}: offset id disagrees with position"));
            }
            let occ = &self.occupants[part.pos as usize];
            if occ.get(part.slot as usize) != Some(&id) {
                return Err(format!("particle {id} missing from occupant list of site {}", part.pos));
            }
            seen[part.pos as usize] += 1;
            if part.infected {
                infected_here[part.pos as usize] += 1;
            }
            if part.infected != self.infected_set.contains(id) {
                return Err(format!("particle {id}: infected flag and index disagree"));
            }
        }
        for site in 0..n_sites {
            if seen[site] as usize != self.occupants[site].len() {
                return Err(format!("site {site}: occupant list has stale entries"));
            }
            if infected_here[site] != self.infected_here[site] {
                return Err(format!("site {site}: infected count out of sync"));
            }
            if self.contaminated[site] != self.contaminated_set.contains(site as u32) {
                return Err(format!("site {site}: contamination flag and index disagree"));
            }
            if self.contaminated[site] && !self.contamination {
                return Err(format!("site {site} contaminated with contamination disabled"));
            }
        }
        let infected = self.particles.iter().filter(|p| p.infected).count();
        if infected != self.infected_set.len() {
            return Err("infected index has extra members".into());
        }
        let contaminated = self.contaminated.iter().filter(|&&c| c).count();
        if contaminated != self.contaminated_set.len() {
            return Err("contamination index has extra members".into());
        }
        Ok(())
    }
}
