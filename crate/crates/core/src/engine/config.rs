use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{config, invalid, Error, Result};
use crate::lattice::{Norm, TorusLattice};

/// Transmission rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Particles infect each other on contact as well as through sites.
    #[default]
    Standard,
    /// Healthy particles are infected only by stepping onto a contaminated
    /// site; co-located infected particles are harmless.
    SiteOnly,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Standard => f.write_str("standard"),
            Mode::SiteOnly => f.write_str("site_only"),
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(Mode::Standard),
            "site_only" | "site-only" => Ok(Mode::SiteOnly),
            other => Err(invalid(format!("unknown mode `{other}`"))),
        }
    }
}

/// Parses a rate, accepting `inf`/`infinity` for an infinite clearance rate.
pub fn parse_rate(s: &str) -> Result<f64> {
    let t = s.trim();
    match t.to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "+inf" => Ok(f64::INFINITY),
        _ => t
            .parse::<f64>()
            .map_err(|_| invalid(format!("cannot parse rate `{s}`"))),
    }
}

/// Serde adapter writing infinite rates as the string `"inf"` so that
/// configurations stay valid JSON.
pub mod rate_serde {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() && *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => super::parse_rate(&t).map_err(serde::de::Error::custom),
        }
    }
}

/// Law of the number of particles initially placed at each site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(u32, f64)>", into = "Vec<(u32, f64)>")]
pub struct InitialLoadDistribution {
    pmf: Vec<(u32, f64)>,
    #[serde(skip)]
    cdf: Vec<f64>,
}

impl InitialLoadDistribution {
    /// Builds the law from `(value, probability)` pairs. Probabilities must
    /// lie in `[0, 1]` and sum to one within `1e-12`.
    pub fn new(mut pmf: Vec<(u32, f64)>) -> Result<Self> {
        if pmf.is_empty() {
            return Err(invalid("particle-count law has empty support"));
        }
        if pmf.iter().any(|&(_, p)| !(0.0..=1.0).contains(&p)) {
            return Err(invalid("particle-count probabilities must lie in [0, 1]"));
        }
        let total: f64 = pmf.iter().map(|&(_, p)| p).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("particle-count probabilities sum to {total}, not 1")));
        }
        pmf.sort_by_key(|&(v, _)| v);
        if pmf.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(invalid("duplicate value in particle-count law"));
        }
        let mut acc = 0.0;
        let cdf = pmf
            .iter()
            .map(|&(_, p)| {
                acc += p;
                acc
            })
            .collect();
        Ok(Self { pmf, cdf })
    }

    pub fn point_mass(m: u32) -> Self {
        Self::new(vec![(m, 1.0)]).expect("point mass is a valid law")
    }

    pub fn pmf(&self) -> &[(u32, f64)] {
        &self.pmf
    }

    /// Largest value with positive probability.
    pub fn max_value(&self) -> u32 {
        self.pmf
            .iter()
            .rev()
            .find(|&&(_, p)| p > 0.0)
            .map_or(0, |&(v, _)| v)
    }

    pub fn p_at_least_one(&self) -> f64 {
        self.pmf.iter().filter(|&&(v, _)| v >= 1).map(|&(_, p)| p).sum()
    }

    pub fn mean(&self) -> f64 {
        self.pmf.iter().map(|&(v, p)| v as f64 * p).sum()
    }

    /// Draws one value; consumes exactly one uniform.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        let u: f64 = rng.random();
        let i = self.cdf.partition_point(|&c| c <= u);
        self.pmf[i.min(self.pmf.len() - 1)].0
    }
}

impl TryFrom<Vec<(u32, f64)>> for InitialLoadDistribution {
    type Error = Error;

    fn try_from(v: Vec<(u32, f64)>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<InitialLoadDistribution> for Vec<(u32, f64)> {
    fn from(d: InitialLoadDistribution) -> Self {
        d.pmf
    }
}

impl FromStr for InitialLoadDistribution {
    type Err = Error;

    /// `"1"` is a point mass; `"0:0.2,1:0.5,2:0.3"` lists `value:probability`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Ok(m) = s.parse::<u32>() {
            return Ok(Self::point_mass(m));
        }
        let pmf = s
            .split(',')
            .map(|pair| {
                let (v, p) = pair
                    .split_once(':')
                    .ok_or_else(|| invalid(format!("expected value:probability, got `{pair}`")))?;
                let v = v.trim().parse::<u32>().map_err(|_| invalid(format!("bad value `{v}`")))?;
                let p = p.trim().parse::<f64>().map_err(|_| invalid(format!("bad probability `{p}`")))?;
                Ok((v, p))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(pmf)
    }
}

pub const DEFAULT_TRAJECTORY_POINTS: usize = 4096;

/// Full parameterisation of one epidemic run. The per-particle jump rate is
/// fixed to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub lattice: TorusLattice,
    pub k: usize,
    pub norm: Norm,
    /// Particle recovery rate.
    pub lambda: f64,
    /// Site clearance rate; `f64::INFINITY` disables contamination.
    #[serde(with = "rate_serde")]
    pub gamma: f64,
    pub m_dist: InitialLoadDistribution,
    pub mode: Mode,
    /// Number of events `K` after which the run stops.
    pub max_events: u64,
    pub seed: u64,
    pub record_trajectory: bool,
    pub trajectory_max_points: usize,
    /// Count a contaminated site as surviving infection at step `K`.
    pub count_sites_as_survival: bool,
    /// Contaminate the origin site at time 0 (when `gamma` is finite).
    pub infect_origin_site: bool,
}

impl EngineConfig {
    /// Standard-mode configuration with defaults for the optional fields.
    pub fn new(lattice: TorusLattice, k: usize, lambda: f64, gamma: f64, max_events: u64, seed: u64) -> Self {
        Self {
            lattice,
            k,
            norm: Norm::L1,
            lambda,
            gamma,
            m_dist: InitialLoadDistribution::point_mass(1),
            mode: Mode::Standard,
            max_events,
            seed,
            record_trajectory: false,
            trajectory_max_points: DEFAULT_TRAJECTORY_POINTS,
            count_sites_as_survival: false,
            infect_origin_site: true,
        }
    }

    pub fn contamination_enabled(&self) -> bool {
        self.gamma.is_finite()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(config(format!("recovery rate must be positive and finite, got {}", self.lambda)));
        }
        if !(self.gamma > 0.0) {
            return Err(config(format!("clearance rate must be positive or inf, got {}", self.gamma)));
        }
        if self.max_events == 0 {
            return Err(config("event budget K must be at least 1"));
        }
        if self.k == 0 {
            return Err(config("region radius must be at least 1"));
        }
        if self.record_trajectory && self.trajectory_max_points < 2 {
            return Err(config("trajectory needs room for at least 2 points"));
        }
        self.lattice.check_radius(self.k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    #[test]
    fn pmf_validation() {
        assert!(InitialLoadDistribution::new(vec![(0, 0.5), (1, 0.5)]).is_ok());
        assert!(InitialLoadDistribution::new(vec![(0, 0.5), (1, 0.4)]).is_err());
        assert!(InitialLoadDistribution::new(vec![(0, 1.5), (1, -0.5)]).is_err());
        assert!(InitialLoadDistribution::new(vec![]).is_err());
        let d: InitialLoadDistribution = "0:0.25, 2:0.75".parse().unwrap();
        assert_eq!(d.max_value(), 2);
        assert!((d.p_at_least_one() - 0.75).abs() < 1e-15);
        assert_eq!("3".parse::<InitialLoadDistribution>().unwrap(), InitialLoadDistribution::point_mass(3));
    }

    #[test]
    fn pmf_sampling_frequencies() {
        let d = InitialLoadDistribution::new(vec![(0, 0.2), (1, 0.5), (4, 0.3)]).unwrap();
        let mut rng = rng_from_seed(5);
        let mut counts = [0usize; 5];
        let n = 100_000;
        for _ in 0..n {
            counts[d.sample(&mut rng) as usize] += 1;
        }
        for (v, p) in [(0, 0.2), (1, 0.5), (4, 0.3)] {
            let f = counts[v] as f64 / n as f64;
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!((f - p).abs() < 5.0 * se, "value {v}: {f} vs {p}");
        }
        assert_eq!(counts[2] + counts[3], 0);
    }

    #[test]
    fn config_json_round_trip_keeps_infinite_gamma() {
        let cfg = EngineConfig::new(TorusLattice::new(2, 6).unwrap(), 1, 1.0, f64::INFINITY, 10, 3);
        let json = serde_json::to_string(&cfg).unwrap();
        assert!(json.contains("\"gamma\":\"inf\""));
        let back: EngineConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn validation_errors() {
        let lat = TorusLattice::new(2, 5).unwrap();
        assert!(EngineConfig::new(lat, 1, 1.0, 1.0, 1, 0).validate().is_ok());
        assert!(EngineConfig::new(lat, 2, 1.0, 1.0, 1, 0).validate().is_err());
        assert!(EngineConfig::new(lat, 1, 0.0, 1.0, 1, 0).validate().is_err());
        assert!(EngineConfig::new(lat, 1, 1.0, 0.0, 1, 0).validate().is_err());
        assert!(EngineConfig::new(lat, 1, 1.0, 1.0, 0, 0).validate().is_err());
        assert_eq!(parse_rate("inf").unwrap(), f64::INFINITY);
        assert_eq!(parse_rate("0.5").unwrap(), 0.5);
    }
}
