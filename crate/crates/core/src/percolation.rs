//! Region-openness trials and the site-percolation comparison behind the
//! small-clearance-rate survival argument.
//!
//! Regions are `L∞` squares of radius `k` whose corner sites are shared
//! with diagonally adjacent regions. A region is open when its particle
//! reaches the contaminated activating corner before that corner is
//! cleared and then, in a single infected excursion from it, visits the
//! other three corners. Region centres form a square grid, so open regions
//! percolate when the openness probability exceeds the site-percolation
//! threshold of that grid.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng::{exp_sample, stream};

/// Disjoint-set forest with union by rank and path halving. Sizes count
/// only nodes created with weight 1, so zero-weight sentinel nodes can be
/// attached without inflating cluster sizes.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
            rank: vec![0; n],
        }
    }

    /// Appends a node of weight 0 and returns its id.
    pub fn add_sentinel(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        self.size.push(0);
        self.rank.push(0);
        id
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let gp = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = gp;
            x = gp;
        }
        x
    }

    /// Merges the sets of `a` and `b`; returns the new root.
    pub fn union(&mut self, a: u32, b: u32) -> u32 {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return ra;
        }
        if self.rank[ra as usize] < self.rank[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
        if self.rank[ra as usize] == self.rank[rb as usize] {
            self.rank[ra as usize] += 1;
        }
        ra
    }

    pub fn connected(&mut self, a: u32, b: u32) -> bool {
        self.find(a) == self.find(b)
    }

    /// Weight of the set containing `x`.
    pub fn set_size(&mut self, x: u32) -> u32 {
        let r = self.find(x);
        self.size[r as usize]
    }
}

/// Neighbourhood of a grid site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Adjacency {
    /// Axis neighbours.
    #[default]
    Four,
    /// Axis and diagonal neighbours.
    Eight,
}

impl Adjacency {
    pub fn offsets(self) -> &'static [(i32, i32)] {
        match self {
            Adjacency::Four => &[(1, 0), (-1, 0), (0, 1), (0, -1)],
            Adjacency::Eight => &[(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)],
        }
    }

    /// Offsets pointing "forward" in row-major order; enough to visit
    /// every adjacent pair once.
    fn forward(self) -> &'static [(i32, i32)] {
        match self {
            Adjacency::Four => &[(1, 0), (0, 1)],
            Adjacency::Eight => &[(1, 0), (0, 1), (1, 1), (-1, 1)],
        }
    }
}

impl fmt::Display for Adjacency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Adjacency::Four => f.write_str("four"),
            Adjacency::Eight => f.write_str("eight"),
        }
    }
}

impl FromStr for Adjacency {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "four" | "4" => Ok(Adjacency::Four),
            "eight" | "8" => Ok(Adjacency::Eight),
            other => Err(invalid(format!("unknown adjacency `{other}`"))),
        }
    }
}

/// Open-site configuration of an `n x n` grid, row-major (`x` fastest).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid {
    pub n: usize,
    pub open: Vec<bool>,
}

impl Grid {
    /// Site `i` is open iff `uniforms[i] < p`, so grids built from the
    /// same uniforms are nested in `p`.
    pub fn from_uniforms(n: usize, p: f64, uniforms: &[f64]) -> Self {
        assert_eq!(uniforms.len(), n * n);
        Self { n, open: uniforms.iter().map(|&u| u < p).collect() }
    }

    /// The two sites standing for the regions activated at time 0: the
    /// centre site and the one just below it.
    pub fn origin_sites(&self) -> [usize; 2] {
        let c = self.n / 2;
        [c * self.n + c, (c - 1) * self.n + c]
    }

    fn neighbor(&self, i: usize, (dx, dy): (i32, i32)) -> Option<usize> {
        let (x, y) = ((i % self.n) as i32 + dx, (i / self.n) as i32 + dy);
        let n = self.n as i32;
        (x >= 0 && y >= 0 && x < n && y < n).then(|| (y * n + x) as usize)
    }

    /// Cluster label of every open site (the smallest site index of its
    /// cluster); `None` for closed sites.
    pub fn cluster_labels(&self, adjacency: Adjacency) -> Vec<Option<usize>> {
        let mut uf = UnionFind::new(self.open.len());
        self.join_open(&mut uf, adjacency);
        let mut min_of_root = vec![usize::MAX; self.open.len()];
        for i in (0..self.open.len()).filter(|&i| self.open[i]) {
            let r = uf.find(i as u32) as usize;
            min_of_root[r] = min_of_root[r].min(i);
        }
        (0..self.open.len())
            .map(|i| self.open[i].then(|| min_of_root[uf.find(i as u32) as usize]))
            .collect()
    }

    fn join_open(&self, uf: &mut UnionFind, adjacency: Adjacency) {
        for i in (0..self.open.len()).filter(|&i| self.open[i]) {
            for &off in adjacency.forward() {
                if let Some(j) = self.neighbor(i, off) {
                    if self.open[j] {
                        uf.union(i as u32, j as u32);
                    }
                }
            }
        }
    }

    pub fn analyze(&self, p: f64, adjacency: Adjacency) -> PercGridResult {
        let n = self.n;
        let mut uf = UnionFind::new(n * n);
        self.join_open(&mut uf, adjacency);
        let [a, b] = self.origin_sites();
        let mut roots = Vec::new();
        for s in [a, b] {
            if self.open[s] {
                let r = uf.find(s as u32);
                if !roots.contains(&r) {
                    roots.push(r);
                }
            }
        }
        let cluster_size_at_origin = roots.iter().map(|&r| uf.set_size(r) as usize).sum();
        // sentinels go in only after the cluster sizes are read, since they
        // merge every cluster touching a side
        let left = uf.add_sentinel();
        let right = uf.add_sentinel();
        for y in 0..n {
            if self.open[y * n] {
                uf.union(left, (y * n) as u32);
            }
            if self.open[y * n + n - 1] {
                uf.union(right, (y * n + n - 1) as u32);
            }
        }
        PercGridResult {
            n,
            adjacency,
            p,
            spanning: uf.connected(left, right),
            cluster_size_at_origin,
            open_sites: self.open.iter().filter(|&&o| o).count(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PercGridResult {
    pub n: usize,
    pub adjacency: Adjacency,
    pub p: f64,
    /// An open cluster joins the left and right columns.
    pub spanning: bool,
    /// Size of the union of the open clusters containing the two origin
    /// sites.
    pub cluster_size_at_origin: usize,
    pub open_sites: usize,
}

fn draw_uniforms<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n * n).map(|_| rng.random::<f64>()).collect()
}

/// Independent site percolation on an `n x n` box, one uniform per site.
pub fn percolate<R: Rng + ?Sized>(n: usize, p: f64, adjacency: Adjacency, rng: &mut R) -> Result<PercGridResult> {
    if n < 2 {
        return Err(invalid("grid side must be at least 2"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("probability {p} outside [0, 1]")));
    }
    let uniforms = draw_uniforms(n, rng);
    Ok(Grid::from_uniforms(n, p, &uniforms).analyze(p, adjacency))
}

/// Smallest `p` at which the realisation given by `uniforms` spans:
/// sites are opened in increasing order of their uniforms and the value
/// of the site that first connects the two sides is returned.
pub fn spanning_threshold(n: usize, adjacency: Adjacency, uniforms: &[f64]) -> f64 {
    let mut order: Vec<u32> = (0..(n * n) as u32).collect();
    order.sort_by(|&a, &b| uniforms[a as usize].total_cmp(&uniforms[b as usize]));
    let grid = Grid { n, open: vec![false; n * n] };
    let mut open = vec![false; n * n];
    let mut uf = UnionFind::new(n * n);
    let left = uf.add_sentinel();
    let right = uf.add_sentinel();
    for &s in &order {
        let i = s as usize;
        open[i] = true;
        for &off in adjacency.offsets() {
            if let Some(j) = grid.neighbor(i, off) {
                if open[j] {
                    uf.union(s, j as u32);
                }
            }
        }
        if i % n == 0 {
            uf.union(left, s);
        }
        if i % n == n - 1 {
            uf.union(right, s);
        }
        if uf.connected(left, right) {
            return uniforms[i];
        }
    }
    unreachable!("the fully open grid spans")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEstimate {
    pub n: usize,
    pub adjacency: Adjacency,
    /// Median spanning threshold: the `p` at which half the realisations
    /// span.
    pub p_c_hat: f64,
    /// Half-width of a distribution-free 95% interval for the median.
    pub ci_halfwidth: f64,
    pub realizations: usize,
}

/// Finite-box estimate of the site-percolation threshold from
/// `realizations` independent grids (grid `r` uses stream `(seed, r)`).
pub fn estimate_threshold(n: usize, adjacency: Adjacency, realizations: usize, seed: u64) -> Result<ThresholdEstimate> {
    if n < 2 || realizations == 0 {
        return Err(invalid("need n >= 2 and at least one realisation"));
    }
    let mut t: Vec<f64> = (0..realizations as u64)
        .into_par_iter()
        .map(|r| spanning_threshold(n, adjacency, &draw_uniforms(n, &mut stream(seed, r))))
        .collect();
    t.sort_by(f64::total_cmp);
    let m = t.len();
    let median = if m % 2 == 1 { t[m / 2] } else { 0.5 * (t[m / 2 - 1] + t[m / 2]) };
    let half = 1.96 * (m as f64).sqrt() / 2.0;
    let lo = t[((m as f64 / 2.0 - half).floor().max(0.0) as usize).min(m - 1)];
    let hi = t[((m as f64 / 2.0 + half).ceil() as usize).min(m - 1)];
    Ok(ThresholdEstimate {
        n,
        adjacency,
        p_c_hat: median,
        ci_halfwidth: 0.5 * (hi - lo),
        realizations,
    })
}

/// Fraction of spanning realisations at each `p`. Realisation `r` draws
/// its uniforms from stream `(seed, r)` and reuses them for every `p`.
pub fn spanning_sweep(
    n: usize,
    adjacency: Adjacency,
    p_grid: &[f64],
    realizations: usize,
    seed: u64,
) -> Result<Vec<(f64, f64)>> {
    if n < 2 || realizations == 0 {
        return Err(invalid("need n >= 2 and at least one realisation"));
    }
    if p_grid.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(invalid("probabilities must lie in [0, 1]"));
    }
    let counts = (0..realizations as u64)
        .into_par_iter()
        .map(|r| {
            let u = draw_uniforms(n, &mut stream(seed, r));
            p_grid
                .iter()
                .map(|&p| Grid::from_uniforms(n, p, &u).analyze(p, adjacency).spanning as usize)
                .collect::<Vec<_>>()
        })
        .reduce(
            || vec![0; p_grid.len()],
            |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect(),
        );
    Ok(p_grid
        .iter()
        .zip(counts)
        .map(|(&p, c)| (p, c as f64 / realizations as f64))
        .collect())
}

/// `p` at which a sweep's spanning fraction crosses 1/2, by linear
/// interpolation between the bracketing grid points.
pub fn crossing_point(sweep: &[(f64, f64)]) -> Option<f64> {
    sweep.windows(2).find_map(|w| {
        let ((p0, f0), (p1, f1)) = (w[0], w[1]);
        (f0 < 0.5 && f1 >= 0.5).then(|| p0 + (0.5 - f0) * (p1 - p0) / (f1 - f0))
    })
}

/// Where the region's particle sits when the region is activated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartPolicy {
    AtCenter,
    /// The corner opposite the activating one.
    #[default]
    AtFarthestCorner,
    Uniform,
}

impl FromStr for StartPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "at_center" | "center" => Ok(StartPolicy::AtCenter),
            "at_farthest_corner" | "farthest" => Ok(StartPolicy::AtFarthestCorner),
            "uniform" => Ok(StartPolicy::Uniform),
            other => Err(invalid(format!("unknown start policy `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionTrialConfig {
    pub k: usize,
    pub lambda: f64,
    pub gamma: f64,
    pub start_policy: StartPolicy,
    /// Time after which a trial is abandoned and counted as a failure;
    /// `None` means `1e4 / gamma`.
    pub max_sim_time: Option<f64>,
    pub seed: u64,
}

impl RegionTrialConfig {
    pub fn new(k: usize, lambda: f64, gamma: f64, seed: u64) -> Self {
        Self { k, lambda, gamma, start_policy: StartPolicy::default(), max_sim_time: None, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(invalid("region radius must be at least 1"));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(invalid("recovery rate must be positive and finite"));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(invalid("clearance rate must be positive and finite"));
        }
        if let Some(t) = self.max_sim_time {
            if !(t > 0.0) {
                return Err(invalid("time safeguard must be positive"));
            }
        }
        Ok(())
    }

    pub fn time_limit(&self) -> f64 {
        self.max_sim_time.unwrap_or(1e4 / self.gamma)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialOutcome {
    pub success: bool,
    pub jumps: u64,
    pub safeguard_tripped: bool,
}

/// One region trial. The activating corner is `(-k, -k)`.
pub fn region_trial<R: Rng + ?Sized>(config: &RegionTrialConfig, rng: &mut R) -> TrialOutcome {
    let k = config.k as i32;
    let act = (-k, -k);
    let corners = [(k, -k), (-k, k), (k, k)];
    let clearance = exp_sample(rng, config.gamma);
    let limit = config.time_limit();
    let mut pos = match config.start_policy {
        StartPolicy::AtCenter => (0, 0),
        StartPolicy::AtFarthestCorner => (k, k),
        StartPolicy::Uniform => (rng.random_range(-k..=k), rng.random_range(-k..=k)),
    };
    let mut infected = pos == act;
    let mut excursion: Option<u8> = None;
    let mut t = 0.0;
    let mut jumps = 0;
    let mut moves = [(0, 0); 4];
    loop {
        let rate = if infected { 1.0 + config.lambda } else { 1.0 };
        t += exp_sample(rng, rate);
        if t >= clearance {
            return TrialOutcome { success: false, jumps, safeguard_tripped: false };
        }
        if t >= limit {
            return TrialOutcome { success: false, jumps, safeguard_tripped: true };
        }
        if infected && rng.random::<f64>() * rate >= 1.0 {
            infected = false;
            excursion = None;
            continue;
        }
        let mut m = 0;
        for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            let q = (pos.0 + dx, pos.1 + dy);
            if q.0.abs() <= k && q.1.abs() <= k {
                moves[m] = q;
                m += 1;
            }
        }
        let from = pos;
        pos = moves[rng.random_range(0..m)];
        jumps += 1;
        if pos == act {
            // the corner is still contaminated; an excursion already under
            // way keeps its visits
            infected = true;
            continue;
        }
        if from == act && infected && excursion.is_none() {
            excursion = Some(0);
        }
        if let Some(mask) = excursion.as_mut() {
            if let Some(c) = corners.iter().position(|&c| c == pos) {
                *mask |= 1 << c;
                if *mask == 0b111 {
                    return TrialOutcome { success: true, jumps, safeguard_tripped: false };
                }
            }
        }
    }
}

/// Whether the region opens: the particle reaches the activating corner
/// before it is cleared and then, after some departure from it, covers
/// the other three corners before its next recovery.
pub fn region_open_trial<R: Rng + ?Sized>(config: &RegionTrialConfig, rng: &mut R) -> bool {
    region_trial(config, rng).success
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpennessEstimate {
    pub p_tilde: f64,
    pub ci_halfwidth: f64,
    pub trials: usize,
    pub p_m_ge_1: f64,
    pub p_open: f64,
    pub safeguard_trips: usize,
}

/// Runs `trials` independent trials (trial `t` on stream `(seed, t)`) and
/// aggregates them. The trial returns `(success, safeguard_tripped)`.
pub fn estimate_openness_with<F>(trials: usize, p_m_ge_1: f64, seed: u64, trial: F) -> Result<OpennessEstimate>
where
    F: Fn(&mut crate::rng::SimRng) -> (bool, bool) + Sync,
{
    if trials < 100 {
        return Err(invalid(format!("need at least 100 trials, got {trials}")));
    }
    if !(0.0..=1.0).contains(&p_m_ge_1) {
        return Err(invalid("P(M >= 1) must lie in [0, 1]"));
    }
    let (hits, trips) = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let (ok, tripped) = trial(&mut stream(seed, t));
            (ok as usize, tripped as usize)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let p = hits as f64 / trials as f64;
    let ci = 1.96 * (p * (1.0 - p) / trials as f64).sqrt();
    Ok(OpennessEstimate {
        p_tilde: p,
        ci_halfwidth: ci,
        trials,
        p_m_ge_1,
        p_open: p_m_ge_1 * p,
        safeguard_trips: trips,
    })
}

pub fn estimate_openness(config: &RegionTrialConfig, trials: usize, p_m_ge_1: f64) -> Result<OpennessEstimate> {
    config.validate()?;
    estimate_openness_with(trials, p_m_ge_1, config.seed, |rng| {
        let o = region_trial(config, rng);
        (o.success, o.safeguard_tripped)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    SupercriticalEvidence,
    Inconclusive,
    SubcriticalEvidence,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupercriticalityConfig {
    pub region: RegionTrialConfig,
    pub p_m_ge_1: f64,
    pub trials: usize,
    pub n: usize,
    pub adjacency: Adjacency,
    pub realizations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupercriticalityVerdict {
    pub openness: OpennessEstimate,
    pub threshold: ThresholdEstimate,
    pub p_open: f64,
    pub p_c_hat: f64,
    /// `(p_open - ci) - (p_c_hat + ci_c)`; positive means separated above.
    pub margin: f64,
    pub verdict: Verdict,
}

/// Compares the region openness probability with a finite-box estimate
/// of the percolation threshold.
pub fn supercriticality_check(config: &SupercriticalityConfig) -> Result<SupercriticalityVerdict> {
    let openness = estimate_openness(&config.region, config.trials, config.p_m_ge_1)?;
    let threshold = estimate_threshold(config.n, config.adjacency, config.realizations, config.region.seed ^ 0x5EED)?;
    Ok(compare(openness, threshold))
}

pub fn compare(openness: OpennessEstimate, threshold: ThresholdEstimate) -> SupercriticalityVerdict {
    let ci_open = openness.p_m_ge_1 * openness.ci_halfwidth;
    let margin = (openness.p_open - ci_open) - (threshold.p_c_hat + threshold.ci_halfwidth);
    let verdict = if margin > 0.0 {
        Verdict::SupercriticalEvidence
    } else if openness.p_open + ci_open < threshold.p_c_hat - threshold.ci_halfwidth {
        Verdict::SubcriticalEvidence
    } else {
        Verdict::Inconclusive
    };
    SupercriticalityVerdict {
        openness,
        threshold,
        p_open: openness.p_open,
        p_c_hat: threshold.p_c_hat,
        margin,
        verdict,
    }
}

pub const OPENNESS_HEADER: &str = "lambda,gamma,k,trials,p_tilde,ci,p_open";
pub const PERCOLATION_HEADER: &str = "n,adjacency,p,spanning_fraction";

pub fn write_openness_csv<W: Write>(rows: &[(RegionTrialConfig, OpennessEstimate)], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{OPENNESS_HEADER}")?;
    for (c, e) in rows {
        writeln!(out, "{},{},{},{},{},{},{}", c.lambda, c.gamma, c.k, e.trials, e.p_tilde, e.ci_halfwidth, e.p_open)?;
    }
    Ok(())
}

pub fn write_percolation_csv<W: Write>(
    n: usize,
    adjacency: Adjacency,
    sweep: &[(f64, f64)],
    mut out: W,
) -> std::io::Result<()> {
    writeln!(out, "{PERCOLATION_HEADER}")?;
    for (p, f) in sweep {
        writeln!(out, "{n},{adjacency},{p},{f}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests;
