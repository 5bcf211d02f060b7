//! Branching-process bound on the offspring of a single site in the
//! maximal-load epidemic.
//!
//! Every site is given the maximal possible load `n = m_bar * v_k`
//! particles. One local infection process at a site emits infectious
//! signals (rate 1 per infected resident), receives reinforcement signals
//! (rate 1 per particle on the `2d` neighbouring sites, `2d * n` in total)
//! which restore the fully infected state, and dies out through particle
//! recoveries (rate `lambda` each) and site clearance (rate `gamma`).
//!
//! With `p_part* = P(Gamma(n, lambda) < Exp(n (1 + 2d)))` and
//! `p_site* = P(Exp(gamma) < Exp(2d n))`, the expected number of signals
//! is bounded by `(1 - p_site*) / p_site* * (1 - p_part*) / p_part*`, and
//! a value below 1 makes the epidemic subcritical.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::rate_serde;
use crate::error::{invalid, Result};
use crate::lattice::l1_ball_size;
use crate::rng::stream;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundParameters {
    pub d: usize,
    pub k: usize,
    pub m_bar: u32,
    pub lambda: f64,
    #[serde(with = "rate_serde")]
    pub gamma: f64,
}

impl BoundParameters {
    pub fn new(d: usize, k: usize, m_bar: u32, lambda: f64, gamma: f64) -> Self {
        Self { d, k, m_bar, lambda, gamma }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.k == 0 || self.m_bar == 0 {
            return Err(invalid("d, k and m_bar must all be at least 1"));
        }
        if !(self.lambda > 0.0) {
            return Err(invalid(format!("recovery rate must be positive, got {}", self.lambda)));
        }
        if !(self.gamma > 0.0) {
            return Err(invalid(format!("clearance rate must be positive, got {}", self.gamma)));
        }
        Ok(())
    }

    /// Maximal load `m_bar * v_k`.
    pub fn load(&self) -> Result<u64> {
        let v = l1_ball_size(self.d, self.k)?;
        v.checked_mul(self.m_bar as u64)
            .ok_or_else(|| crate::Error::Range("maximal load overflows".into()))
    }

    /// Aggregate rate of reinforcement signals, `2d * m_bar * v_k`.
    pub fn reinforcement_rate(&self) -> Result<f64> {
        Ok(2.0 * self.d as f64 * self.load()? as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub params: BoundParameters,
    pub v_k: u64,
    /// Maximal load `m_bar * v_k`.
    pub n: u64,
    /// Rate `n (1 + 2d)` of the first signal of either kind.
    pub mu: f64,
    pub p_part_star: f64,
    pub p_site_star: f64,
    pub offspring_bound: f64,
    pub subcritical: bool,
}

/// `P(Exp(gamma) < Exp(2d n)) = gamma / (gamma + 2d n)`; 1 when `gamma`
/// is infinite.
pub fn p_site_star(params: &BoundParameters) -> Result<f64> {
    params.validate()?;
    if params.gamma.is_infinite() {
        return Ok(1.0);
    }
    let r = params.reinforcement_rate()?;
    Ok(params.gamma / (params.gamma + r))
}

/// `P(G < E)` for `G ~ Gamma(n, rate lambda)` and independent
/// `E ~ Exp(mu)`, which is `E[exp(-mu G)] = (lambda / (lambda + mu))^n`.
pub fn gamma_beats_exp(n: u64, lambda: f64, mu: f64) -> f64 {
    let ratio = lambda / (lambda + mu);
    match i32::try_from(n) {
        Ok(n) => ratio.powi(n),
        Err(_) => (-(n as f64) * (mu / lambda).ln_1p()).exp(),
    }
}

/// `P(Gamma(n, lambda) < Exp(n (1 + 2d)))` with `n = m_bar * v_k`.
pub fn p_part_star(params: &BoundParameters) -> Result<f64> {
    params.validate()?;
    let n = params.load()?;
    let mu = n as f64 * (1.0 + 2.0 * params.d as f64);
    Ok(gamma_beats_exp(n, params.lambda, mu))
}

/// Mean number of failures before the first success of a geometric law.
fn geometric_failures(p: f64) -> f64 {
    if p == 0.0 {
        f64::INFINITY
    } else {
        (1.0 - p) / p
    }
}

pub fn offspring_bound(params: &BoundParameters) -> Result<BoundResult> {
    params.validate()?;
    let v_k = l1_ball_size(params.d, params.k)?;
    let n = params.load()?;
    let mu = n as f64 * (1.0 + 2.0 * params.d as f64);
    let p_part = p_part_star(params)?;
    let p_site = p_site_star(params)?;
    let a = geometric_failures(p_site);
    let b = geometric_failures(p_part);
    // 0 * inf can only arise in the degenerate limits; both factors being
    // zero-or-infinite means the site never re-ignites.
    let bound = if a == 0.0 || b == 0.0 { 0.0 } else { a * b };
    Ok(BoundResult {
        params: *params,
        v_k,
        n,
        mu,
        p_part_star: p_part,
        p_site_star: p_site,
        offspring_bound: bound,
        subcritical: bound < 1.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubcriticalLambda {
    /// Smallest recovery rate certified subcritical, within `tol`.
    pub lambda_star: f64,
    /// Set when every `lambda` is certified (no contamination).
    pub degenerate: bool,
    pub iterations: u32,
}

const MAX_BISECTIONS: u32 = 60;

/// Smallest `lambda` with `offspring_bound < 1`, by doubling from 1 to
/// bracket the root and then bisecting until the bracket is narrower than
/// `tol` (at most 60 halvings).
pub fn subcritical_lambda(gamma: f64, d: usize, k: usize, m_bar: u32, tol: f64) -> Result<SubcriticalLambda> {
    if !(tol > 0.0) {
        return Err(invalid(format!("tolerance must be positive, got {tol}")));
    }
    let at = |lambda: f64| offspring_bound(&BoundParameters::new(d, k, m_bar, lambda, gamma)).map(|r| r.offspring_bound);
    if gamma.is_infinite() {
        BoundParameters::new(d, k, m_bar, 1.0, gamma).validate()?;
        return Ok(SubcriticalLambda { lambda_star: 0.0, degenerate: true, iterations: 0 });
    }
    let mut hi = 1.0;
    while at(hi)? >= 1.0 {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(crate::Error::Range("no subcritical recovery rate found".into()));
        }
    }
    let mut lo = if hi == 1.0 { 0.0 } else { hi / 2.0 };
    let mut iterations = 0;
    while hi - lo > tol && iterations < MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if at(mid)? < 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    Ok(SubcriticalLambda { lambda_star: hi, degenerate: false, iterations })
}

/// Monte Carlo estimate with a normal-approximation confidence interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    /// Half-width of the 95% interval.
    pub ci_halfwidth: f64,
    pub trials: u64,
}

impl McEstimate {
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = if samples.len() > 1 {
            samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let se = (var / n).sqrt();
        Self { mean, std_error: se, ci_halfwidth: 1.96 * se, trials: samples.len() as u64 }
    }
}

/// Number of infectious signals emitted by one local infection process at
/// a single site of the maximal-load epidemic, started fully infected.
pub fn local_process_signals<R: Rng + ?Sized>(params: &BoundParameters, rng: &mut R) -> Result<u64> {
    let n = params.load()?;
    let reinforcement = params.reinforcement_rate()?;
    let has_site = params.gamma.is_finite();
    let mut infected = n;
    let mut site = has_site;
    let mut signals = 0u64;
    while infected > 0 || site {
        let signal = infected as f64;
        let recovery = params.lambda * infected as f64;
        let clearance = if site { params.gamma } else { 0.0 };
        let total = signal + recovery + clearance + reinforcement;
        let u = rng.random::<f64>() * total;
        if u < signal {
            signals += 1;
        } else if u < signal + recovery {
            infected -= 1;
        } else if u < signal + recovery + clearance {
            site = false;
        } else {
            infected = n;
            site = has_site;
        }
    }
    Ok(signals)
}

/// Mean number of infectious signals of the local process over `trials`
/// independent runs; trial `t` uses stream `(seed, t)`.
pub fn maximal_load_offspring_mc(params: &BoundParameters, trials: u64, seed: u64) -> Result<McEstimate> {
    params.validate()?;
    if trials == 0 {
        return Err(invalid("need at least one trial"));
    }
    let samples = (0..trials)
        .into_par_iter()
        .map(|t| local_process_signals(params, &mut stream(seed, t)).map(|s| s as f64))
        .collect::<Result<Vec<_>>>()?;
    Ok(McEstimate::from_samples(&samples))
}

pub const BOUNDS_SWEEP_HEADER: &str = "lambda,gamma,v_k,p_part_star,p_site_star,offspring_bound,subcritical";

pub fn write_bounds_sweep_csv<W: std::io::Write>(rows: &[BoundResult], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{BOUNDS_SWEEP_HEADER}")?;
    for r in rows {
        let gamma = if r.params.gamma.is_infinite() { "inf".to_string() } else { r.params.gamma.to_string() };
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.params.lambda, gamma, r.v_k, r.p_part_star, r.p_site_star, r.offspring_bound, r.subcritical
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::exp_sample;
    use rand_distr::{Distribution, Exp, Gamma};

    /// Second sampler of the local process with explicit holding times and
    /// sequential category selection.
    fn local_process_signals_timed<R: Rng + ?Sized>(params: &BoundParameters, rng: &mut R) -> Result<(u64, f64)> {
        let n = params.load()?;
        let reinforcement = params.reinforcement_rate()?;
        let has_site = params.gamma.is_finite();
        let (mut infected, mut site, mut signals, mut t) = (n, has_site, 0u64, 0.0);
        while infected > 0 || site {
            let rates = [
                infected as f64,
                params.lambda * infected as f64,
                if site { params.gamma } else { 0.0 },
                reinforcement,
            ];
            let total: f64 = rates.iter().sum();
            t += exp_sample(rng, total);
            let mut u = rng.random::<f64>() * total;
            let mut which = 3;
            for (i, r) in rates.iter().enumerate() {
                if u < *r {
                    which = i;
                    break;
                }
                u -= r;
            }
            match which {
                0 => signals += 1,
                1 => infected -= 1,
                2 => site = false,
                _ => {
                    infected = n;
                    site = has_site;
                }
            }
        }
        Ok((signals, t))
    }

    fn bp(d: usize, k: usize, m: u32, lambda: f64, gamma: f64) -> BoundParameters {
        BoundParameters::new(d, k, m, lambda, gamma)
    }

    #[test]
    fn p_site_examples() {
        assert!(p_site_star(&bp(2, 1, 1, 1.0, 1e-300)).unwrap() < 1e-298);
        assert_eq!(p_site_star(&bp(2, 1, 1, 1.0, 20.0)).unwrap(), 0.5);
        assert_eq!(p_site_star(&bp(2, 1, 1, 1.0, f64::INFINITY)).unwrap(), 1.0);
        assert!(p_site_star(&bp(2, 1, 1, 1.0, 0.0)).is_err());
        assert!(p_site_star(&bp(2, 1, 1, 1.0, -1.0)).is_err());
    }

    #[test]
    fn p_part_examples() {
        assert!((p_part_star(&bp(1, 1, 1, 9.0, 1.0)).unwrap() - 0.125).abs() < 1e-15);
        assert!((p_part_star(&bp(2, 1, 1, 25.0, 1.0)).unwrap() - 0.03125).abs() < 1e-15);
        assert!(p_part_star(&bp(2, 1, 1, 1e12, 1.0)).unwrap() > 1.0 - 1e-9);
        assert!(p_part_star(&bp(2, 1, 1, 1e-9, 1.0)).unwrap() < 1e-40);
    }

    /// Independent oracle: sample the race directly.
    #[test]
    fn p_part_matches_sampled_race() {
        let mut rng = stream(3, 0);
        for (d, k, m, lambda) in [(1, 1, 1, 9.0), (2, 1, 1, 25.0), (1, 2, 2, 40.0)] {
            let p = bp(d, k, m, lambda, 1.0);
            let n = p.load().unwrap();
            let mu = n as f64 * (1.0 + 2.0 * d as f64);
            let g = Gamma::new(n as f64, 1.0 / lambda).unwrap();
            let e = Exp::new(mu).unwrap();
            let trials = 200_000;
            let wins = (0..trials).filter(|_| g.sample(&mut rng) < e.sample(&mut rng)).count();
            let f = wins as f64 / trials as f64;
            let exact = p_part_star(&p).unwrap();
            let se = (exact * (1.0 - exact) / trials as f64).sqrt();
            assert!((f - exact).abs() < 3.0 * se, "{f} vs {exact}");
        }
    }

    #[test]
    fn offspring_examples() {
        let r = offspring_bound(&bp(1, 1, 1, 9.0, 6.0)).unwrap();
        assert_eq!(r.v_k, 3);
        assert_eq!(r.n, 3);
        assert_eq!(r.mu, 9.0);
        assert_eq!(r.p_site_star, 0.5);
        assert!((r.offspring_bound - 7.0).abs() < 1e-12);
        assert!(!r.subcritical);
        let r = offspring_bound(&bp(1, 1, 1, f64::MAX, 6.0)).unwrap();
        assert_eq!(r.p_part_star, 1.0);
        assert_eq!(r.offspring_bound, 0.0);
        assert!(r.subcritical);
    }

    #[test]
    fn offspring_is_monotone() {
        let lambdas: Vec<f64> = (0..60).map(|i| 0.5 * 1.25f64.powi(i)).collect();
        for gamma in [0.1, 1.0, 10.0] {
            let b: Vec<f64> = lambdas
                .iter()
                .map(|&l| offspring_bound(&bp(2, 1, 2, l, gamma)).unwrap().offspring_bound)
                .collect();
            assert!(b.windows(2).all(|w| w[1] < w[0]), "{b:?}");
        }
        let gammas: Vec<f64> = (0..40).map(|i| 0.01 * 1.3f64.powi(i)).collect();
        let b: Vec<f64> = gammas
            .iter()
            .map(|&g| offspring_bound(&bp(2, 1, 1, 50.0, g)).unwrap().offspring_bound)
            .collect();
        assert!(b.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn subcritical_lambda_degenerate_and_errors() {
        let s = subcritical_lambda(f64::INFINITY, 2, 1, 1, 1e-6).unwrap();
        assert!(s.degenerate);
        assert_eq!(s.lambda_star, 0.0);
        assert!(subcritical_lambda(1.0, 2, 1, 1, 0.0).is_err());
        assert!(subcritical_lambda(1.0, 2, 1, 1, -1.0).is_err());
    }

    /// Coarse scan at resolution 1e-3 as an independent bracket.
    #[test]
    fn subcritical_lambda_against_grid_scan() {
        let tol = 1e-6;
        let s = subcritical_lambda(1.0, 2, 1, 1, tol).unwrap();
        let bound = |l: f64| offspring_bound(&bp(2, 1, 1, l, 1.0)).unwrap().offspring_bound;
        let mut i = 1u64;
        while bound(i as f64 * 1e-3) >= 1.0 {
            i += 1;
        }
        let cell_hi = i as f64 * 1e-3;
        assert!(s.lambda_star > cell_hi - 1e-3 - tol && s.lambda_star <= cell_hi + tol, "{} vs {}", s.lambda_star, cell_hi);
        assert!(bound(s.lambda_star) < 1.0);
        assert!(bound(s.lambda_star - 2.0 * tol) >= 1.0);
    }

    #[test]
    fn local_process_samplers_agree() {
        let p = bp(1, 1, 1, 3.0, 2.0);
        let n = 40_000;
        let a = maximal_load_offspring_mc(&p, n, 1).unwrap();
        let b: Vec<f64> = (0..n)
            .map(|t| local_process_signals_timed(&p, &mut stream(2, t)).unwrap().0 as f64)
            .collect();
        let b = McEstimate::from_samples(&b);
        let se = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
        assert!((a.mean - b.mean).abs() < 4.0 * se, "{a:?} {b:?}");
    }

    #[test]
    fn fast_recovery_silences_the_site() {
        let est = maximal_load_offspring_mc(&bp(1, 1, 1, 1e4, 1.0), 100_000, 4).unwrap();
        assert!(est.mean < 0.05, "{est:?}");
    }

    #[test]
    fn slow_clearance_grows_the_offspring() {
        let means: Vec<f64> = [1e-1, 1e-2, 1e-3]
            .iter()
            .map(|&g| maximal_load_offspring_mc(&bp(1, 1, 1, 10.0, g), 2_000, 5).unwrap().mean)
            .collect();
        assert!(means.windows(2).all(|w| w[1] > 3.0 * w[0]), "{means:?}");
    }

    #[test]
    fn sweep_csv_header() {
        let rows = vec![offspring_bound(&bp(1, 1, 1, 9.0, 6.0)).unwrap(), offspring_bound(&bp(1, 1, 1, 9.0, f64::INFINITY)).unwrap()];
        let mut buf = Vec::new();
        write_bounds_sweep_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], BOUNDS_SWEEP_HEADER);
        assert_eq!(lines[1], "9,6,3,0.125,0.5,7,false");
        assert_eq!(lines[2], "9,inf,3,0.125,1,0,true");
    }
}
