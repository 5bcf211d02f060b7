//! WebAssembly bindings for the browser demo in `www/`: a steppable
//! two-dimensional epidemic, offspring-bound curves and percolation
//! samples. Every export is a plain Rust item as well, so the crate is
//! tested natively.

use rand::Rng;
use wasm_bindgen::prelude::*;

use contagion_core::bounds::{offspring_bound, subcritical_lambda, BoundParameters};
use contagion_core::engine::{EngineConfig, Simulation};
use contagion_core::lattice::TorusLattice;
use contagion_core::percolation::{Adjacency, Grid};
use contagion_core::rng::stream;

/// Cell flags returned by [`EpidemicDemo::cells`].
pub const OCCUPIED: u8 = 1;
pub const INFECTED: u8 = 2;
pub const CONTAMINATED: u8 = 4;

/// A two-dimensional epidemic advanced a batch of events at a time.
#[wasm_bindgen]
pub struct EpidemicDemo {
    sim: Simulation,
}

impl EpidemicDemo {
    pub fn try_new(side: usize, k: usize, lambda: f64, gamma: f64, seed: u64) -> Result<Self, String> {
        let lattice = TorusLattice::new(2, side).map_err(|e| e.to_string())?;
        let config = EngineConfig::new(lattice, k, lambda, gamma, u64::MAX, seed);
        config.validate().map_err(|e| e.to_string())?;
        Simulation::new(config).map(|sim| Self { sim }).map_err(|e| e.to_string())
    }
}

#[wasm_bindgen]
impl EpidemicDemo {
    /// `gamma` may be `Infinity` (no contamination).
    #[wasm_bindgen(constructor)]
    pub fn new(side: usize, k: usize, lambda: f64, gamma: f64, seed: u64) -> Result<EpidemicDemo, JsError> {
        Self::try_new(side, k, lambda, gamma, seed).map_err(|e| JsError::new(&e))
    }

    /// Executes up to `events` events; stops early once nothing can
    /// happen. Returns the number executed.
    pub fn step(&mut self, events: u32) -> u32 {
        let mut done = 0;
        while done < events && self.sim.rates().total() > 0.0 {
            self.sim.step().expect("positive total rate");
            done += 1;
        }
        done
    }

    pub fn side(&self) -> usize {
        self.sim.world().lattice().side()
    }

    pub fn time(&self) -> f64 {
        self.sim.world().time()
    }

    pub fn events(&self) -> u64 {
        self.sim.world().event_count()
    }

    pub fn infected(&self) -> usize {
        self.sim.world().infected_count()
    }

    pub fn contaminated(&self) -> usize {
        self.sim.world().contaminated_count()
    }

    pub fn extinct(&self) -> bool {
        self.sim.world().is_extinct()
    }

    /// One byte of flags per site, row-major with `x` fastest.
    pub fn cells(&self) -> Vec<u8> {
        let w = self.sim.world();
        (0..w.lattice().total_sites() as u32)
            .map(|s| {
                let mut c = 0;
                if !w.occupants(s).is_empty() {
                    c |= OCCUPIED;
                }
                if w.infected_at(s) > 0 {
                    c |= INFECTED;
                }
                if w.is_contaminated(s) {
                    c |= CONTAMINATED;
                }
                c
            })
            .collect()
    }
}

/// Offspring bound at `points` recovery rates spaced geometrically over
/// `[lambda_min, lambda_max]`, as `[lambda0, bound0, lambda1, bound1, ...]`.
/// Invalid parameters give an empty curve.
#[wasm_bindgen]
pub fn bounds_curve(d: usize, k: usize, m_bar: u32, gamma: f64, lambda_min: f64, lambda_max: f64, points: usize) -> Vec<f64> {
    if points < 2 || !(lambda_min > 0.0 && lambda_max > lambda_min) {
        return Vec::new();
    }
    let ratio = (lambda_max / lambda_min).powf(1.0 / (points - 1) as f64);
    let mut out = Vec::with_capacity(2 * points);
    for i in 0..points {
        let lambda = lambda_min * ratio.powi(i as i32);
        match offspring_bound(&BoundParameters::new(d, k, m_bar, lambda, gamma)) {
            Ok(r) => out.extend([lambda, r.offspring_bound]),
            Err(_) => return Vec::new(),
        }
    }
    out
}

/// Smallest recovery rate certified subcritical; `NaN` when the
/// parameters are invalid, 0 when `gamma` is infinite.
#[wasm_bindgen]
pub fn subcritical_threshold(gamma: f64, d: usize, k: usize, m_bar: u32) -> f64 {
    subcritical_lambda(gamma, d, k, m_bar, 1e-6).map_or(f64::NAN, |s| s.lambda_star)
}

/// Cell codes of [`PercolationSample::cells`].
pub const CLOSED: u8 = 0;
pub const OPEN: u8 = 1;
pub const SPANNING: u8 = 2;

#[wasm_bindgen]
pub struct PercolationSample {
    cells: Vec<u8>,
    spanning: bool,
}

#[wasm_bindgen]
impl PercolationSample {
    /// Site percolation on an `n x n` box; `eight` selects diagonal
    /// adjacency. Grids from one seed are nested in `p`.
    #[wasm_bindgen(constructor)]
    pub fn new(n: usize, p: f64, eight: bool, seed: u64) -> PercolationSample {
        let n = n.max(2);
        let mut rng = stream(seed, 0);
        let uniforms: Vec<f64> = (0..n * n).map(|_| rng.random()).collect();
        let grid = Grid::from_uniforms(n, p, &uniforms);
        let labels = grid.cluster_labels(if eight { Adjacency::Eight } else { Adjacency::Four });
        let left: Vec<usize> = (0..n).filter_map(|y| labels[y * n]).collect();
        let crossing: Vec<usize> = (0..n).filter_map(|y| labels[y * n + n - 1]).filter(|l| left.contains(l)).collect();
        let cells = labels
            .iter()
            .map(|l| match l {
                None => CLOSED,
                Some(l) if crossing.contains(l) => SPANNING,
                Some(_) => OPEN,
            })
            .collect();
        Self { cells, spanning: !crossing.is_empty() }
    }

    /// One code per site, row-major.
    pub fn cells(&self) -> Vec<u8> {
        self.cells.clone()
    }

    pub fn spanning(&self) -> bool {
        self.spanning
    }
}
