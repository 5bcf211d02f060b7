use contagion_core::engine::{audited_run, EngineConfig, InitialLoadDistribution, Mode};
use contagion_core::lattice::{Norm, TorusLattice};
use contagion_core::rng::stream;
use rand::Rng;

fn random_config(seed: u64, r: u64) -> EngineConfig {
    let mut rng = stream(seed, r);
    let dim = rng.random_range(1..=3);
    let k = rng.random_range(1..=2);
    let side = rng.random_range(2 * k + 2..=if dim == 3 { 7 } else { 12 });
    let lambda = [0.05, 0.3, 1.0, 3.0][rng.random_range(0..4)];
    let gamma = [0.01, 0.5, 2.0, f64::INFINITY][rng.random_range(0..4)];
    let mut c = EngineConfig::new(TorusLattice::new(dim, side).unwrap(), k, lambda, gamma, 20_000, rng.random());
    c.norm = if rng.random_bool(0.3) { Norm::Linf } else { Norm::L1 };
    c.mode = if rng.random_bool(0.3) { Mode::SiteOnly } else { Mode::Standard };
    c.m_dist = match rng.random_range(0..3) {
        0 => InitialLoadDistribution::point_mass(1),
        1 => "0:0.3,1:0.4,3:0.3".parse().unwrap(),
        _ => "0:0.5,2:0.5".parse().unwrap(),
    };
    c.infect_origin_site = rng.random_bool(0.8);
    c
}

#[test]
fn randomized_configs_keep_every_invariant() {
    let mut events = 0;
    let mut extinct = 0;
    for r in 0..60 {
        let config = random_config(2024, r);
        let summary = audited_run(&config, 1000, 500).unwrap_or_else(|e| panic!("{config:?}: {e}"));
        events += summary.events;
        extinct += summary.went_extinct as u32;
        assert!(summary.audits >= 2);
    }
    assert!(events > 300_000, "{events}");
    assert!(extinct > 0 && extinct < 60, "{extinct}");
}

#[test]
fn audit_after_every_event_on_small_worlds() {
    for r in 0..20 {
        let mut config = random_config(7, r);
        config.max_events = 2000;
        audited_run(&config, 1, 200).unwrap();
    }
}

#[test]
fn monitor_rejects_transitions_the_rules_forbid() {
    use contagion_core::engine::{EventKind, EventRecord, InvariantMonitor, WorldState};
    use contagion_core::rng::rng_from_seed;

    let config = EngineConfig::new(TorusLattice::new(2, 6).unwrap(), 1, 1.0, 1.0, 100, 3);
    let mut world = WorldState::init(&config, &mut rng_from_seed(3)).unwrap();
    let mut monitor = InvariantMonitor::new(&world, 1, Norm::L1, 1);
    let healthy = world.particles().iter().position(|p| !p.infected).unwrap() as u32;
    let rec = EventRecord { kind: EventKind::Recovery { particle: healthy }, time: 0.1, newly_infected: 0, contaminated: None };
    assert!(monitor.check(&world, &rec).is_err());

    // an infection appearing without an event touching it
    let mut monitor = InvariantMonitor::new(&world, 1, Norm::L1, 1);
    world.apply_clearance(0);
    let rec = EventRecord { kind: EventKind::Clearance { site: 0 }, time: 0.1, newly_infected: 0, contaminated: None };
    monitor.check(&world, &rec).unwrap();
    let infected = world.infected_particles().get(0);
    world.apply_recovery(infected);
    let rec = EventRecord { kind: EventKind::Clearance { site: 0 }, time: 0.2, newly_infected: 0, contaminated: None };
    assert!(monitor.check(&world, &rec).is_err());
}
