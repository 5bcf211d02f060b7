//! Geometry of periodic d-dimensional tori and of the bounded regions
//! particles are confined to.
//!
//! Sites have two representations: [`Site`] carries explicit coordinates
//! and is what the public geometry functions take, while the simulators
//! work with flat row-major indices (`coords[0]` varies fastest) and
//! precomputed neighbour tables.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{config, invalid, Error, Result};

/// Norm used to measure distances on the torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    #[default]
    L1,
    Linf,
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Norm::L1 => f.write_str("l1"),
            Norm::Linf => f.write_str("linf"),
        }
    }
}

impl std::str::FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(Norm::L1),
            "linf" | "l_inf" | "max" => Ok(Norm::Linf),
            other => Err(invalid(format!("unknown norm `{other}`"))),
        }
    }
}

/// A site of a torus, coordinates reduced into `[0, L)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Site {
    coords: Vec<usize>,
}

impl Site {
    pub fn new(coords: Vec<usize>) -> Self {
        Self { coords }
    }

    pub fn origin(dim: usize) -> Self {
        Self { coords: vec![0; dim] }
    }

    pub fn coords(&self) -> &[usize] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

impl From<Vec<usize>> for Site {
    fn from(coords: Vec<usize>) -> Self {
        Site::new(coords)
    }
}

/// Finite torus `(Z / L Z)^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusLattice {
    dim: usize,
    side: usize,
}

impl TorusLattice {
    /// Builds a torus; `side >= 3` so that the `2d` neighbours of a site
    /// are pairwise distinct.
    pub fn new(dim: usize, side: usize) -> Result<Self> {
        if dim == 0 {
            return Err(config("lattice dimension must be positive"));
        }
        if side < 3 {
            return Err(config(format!("lattice side must be at least 3, got {side}")));
        }
        side.checked_pow(dim as u32)
            .filter(|&n| n <= u32::MAX as usize)
            .ok_or_else(|| Error::Range(format!("{side}^{dim} sites do not fit the site index")))?;
        Ok(Self { dim, side })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn total_sites(&self) -> usize {
        self.side.pow(self.dim as u32)
    }

    /// Checks `L >= 2k + 2`, which keeps a radius-`k` ball from wrapping
    /// onto itself.
    pub fn check_radius(&self, k: usize) -> Result<()> {
        if self.side < 2 * k + 2 {
            return Err(config(format!(
                "side {} is too small for region radius {k} (need at least {})",
                self.side,
                2 * k + 2
            )));
        }
        Ok(())
    }

    /// Whether `site` has the right dimension and reduced coordinates.
    pub fn contains(&self, site: &Site) -> bool {
        site.dim() == self.dim && site.coords.iter().all(|&c| c < self.side)
    }

    fn check_site(&self, site: &Site) -> Result<()> {
        if site.dim() != self.dim {
            return Err(invalid(format!(
                "site has {} coordinates, lattice dimension is {}",
                site.dim(),
                self.dim
            )));
        }
        if !self.contains(site) {
            return Err(invalid(format!("site {:?} is not reduced mod {}", site.coords, self.side)));
        }
        Ok(())
    }

    /// Reduces arbitrary integer coordinates onto the torus.
    pub fn wrap(&self, coords: &[i64]) -> Site {
        let l = self.side as i64;
        Site::new(coords.iter().map(|&c| c.rem_euclid(l) as usize).collect())
    }

    pub fn index_of(&self, site: &Site) -> usize {
        site.coords
            .iter()
            .rev()
            .fold(0, |acc, &c| acc * self.side + c)
    }

    pub fn site_at(&self, mut index: usize) -> Site {
        let mut coords = Vec::with_capacity(self.dim);
        for _ in 0..self.dim {
            coords.push(index % self.side);
            index /= self.side;
        }
        Site::new(coords)
    }

    /// Neighbour table: entry `2 * dim * i + 2 * axis + s` is the index of
    /// the neighbour of site `i` one step along `axis`, in the positive
    /// direction for `s = 0` and the negative one for `s = 1`.
    pub fn neighbor_table(&self) -> Vec<u32> {
        let n = self.total_sites();
        let degree = 2 * self.dim;
        let mut table = vec![0u32; n * degree];
        let mut stride = 1usize;
        for axis in 0..self.dim {
            for i in 0..n {
                let c = (i / stride) % self.side;
                let base = i - c * stride;
                let up = base + ((c + 1) % self.side) * stride;
                let down = base + ((c + self.side - 1) % self.side) * stride;
                table[i * degree + 2 * axis] = up as u32;
                table[i * degree + 2 * axis + 1] = down as u32;
            }
            stride *= self.side;
        }
        table
    }
}

/// Per-axis torus displacement `min(|a - b|, L - |a - b|)`.
#[inline]
fn axis_gap(a: usize, b: usize, side: usize) -> usize {
    let d = a.abs_diff(b);
    d.min(side - d)
}

/// Distance between two sites under the periodic metric induced by `norm`.
pub fn torus_distance(a: &Site, b: &Site, lattice: &TorusLattice, norm: Norm) -> Result<usize> {
    lattice.check_site(a)?;
    lattice.check_site(b)?;
    let gaps = a
        .coords
        .iter()
        .zip(&b.coords)
        .map(|(&x, &y)| axis_gap(x, y, lattice.side));
    Ok(match norm {
        Norm::L1 => gaps.sum(),
        Norm::Linf => gaps.max().unwrap_or(0),
    })
}

/// The `2d` nearest neighbours of `x`, ordered axis by axis with the
/// positive step first.
pub fn neighbors(x: &Site, lattice: &TorusLattice) -> Result<Vec<Site>> {
    lattice.check_site(x)?;
    let side = lattice.side;
    let mut out = Vec::with_capacity(2 * lattice.dim);
    for axis in 0..lattice.dim {
        for step in [1, side - 1] {
            let mut c = x.coords.clone();
            c[axis] = (c[axis] + step) % side;
            out.push(Site::new(c));
        }
    }
    Ok(out)
}

/// Ball of radius `k` around `home`, the set of positions a particle with
/// that home may occupy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionSpec {
    pub home: Site,
    pub k: usize,
    pub norm: Norm,
}

impl RegionSpec {
    pub fn new(home: Site, k: usize, norm: Norm) -> Self {
        Self { home, k, norm }
    }

    pub fn admits(&self, pos: &Site, lattice: &TorusLattice) -> Result<bool> {
        Ok(torus_distance(pos, &self.home, lattice, self.norm)? <= self.k)
    }
}

/// Neighbours of `pos` that stay inside `region`.
pub fn accessible_moves(pos: &Site, region: &RegionSpec, lattice: &TorusLattice) -> Result<Vec<Site>> {
    if !region.admits(pos, lattice)? {
        return Err(Error::Precondition(format!(
            "position {:?} lies outside the region of radius {} around {:?}",
            pos.coords, region.k, region.home.coords
        )));
    }
    let mut moves = Vec::with_capacity(2 * lattice.dim);
    for n in neighbors(pos, lattice)? {
        if region.admits(&n, lattice)? {
            moves.push(n);
        }
    }
    Ok(moves)
}

fn binomial(n: u64, r: u64) -> Option<u64> {
    if r > n {
        return Some(0);
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// Number of points of `Z^d` within L1 distance `k` of a point, the point
/// itself included: `v_k(d) = sum_i 2^i C(d, i) C(k, i)`.
pub fn l1_ball_size(d: usize, k: usize) -> Result<u64> {
    if d == 0 {
        return Err(invalid("dimension must be positive"));
    }
    let overflow = || Error::Range(format!("v_{k}({d}) overflows u64"));
    let (d, k) = (d as u64, k as u64);
    let mut total: u64 = 0;
    for i in 0..=d.min(k) {
        let term = 1u64
            .checked_shl(i as u32)
            .filter(|_| i < 64)
            .and_then(|p| p.checked_mul(binomial(d, i)?))
            .and_then(|t| t.checked_mul(binomial(k, i)?))
            .ok_or_else(overflow)?;
        total = total.checked_add(term).ok_or_else(overflow)?;
    }
    Ok(total)
}

/// Offsets of a radius-`k` ball on the infinite lattice together with the
/// moves available from each offset.
///
/// Valid on a torus only when `L >= 2k + 2`; then every offset maps to a
/// distinct site and a particle's position can be tracked as an offset id
/// relative to its home.
#[derive(Debug, Clone)]
pub struct RegionTemplate {
    offsets: Vec<Vec<i64>>,
    /// For each offset id, `(direction, next offset id)` pairs in
    /// neighbour-table direction order.
    moves: Vec<Vec<(u8, u32)>>,
    center: u32,
}

impl RegionTemplate {
    pub fn new(dim: usize, k: usize, norm: Norm) -> Self {
        let k = k as i64;
        let mut offsets = Vec::new();
        let mut cur = vec![-k; dim];
        'outer: loop {
            let inside = match norm {
                Norm::L1 => cur.iter().map(|c| c.abs()).sum::<i64>() <= k,
                Norm::Linf => true,
            };
            if inside {
                offsets.push(cur.clone());
            }
            for axis in 0..dim {
                if cur[axis] < k {
                    cur[axis] += 1;
                    continue 'outer;
                }
                cur[axis] = -k;
            }
            break;
        }
        let ids: HashMap<Vec<i64>, u32> = offsets
            .iter()
            .enumerate()
            .map(|(i, o)| (o.clone(), i as u32))
            .collect();
        let moves = offsets
            .iter()
            .map(|o| {
                let mut out = Vec::with_capacity(2 * dim);
                for axis in 0..dim {
                    for (s, delta) in [1i64, -1].into_iter().enumerate() {
                        let mut next = o.clone();
                        next[axis] += delta;
                        if let Some(&id) = ids.get(&next) {
                            out.push(((2 * axis + s) as u8, id));
                        }
                    }
                }
                out
            })
            .collect();
        let center = ids[&vec![0; dim]];
        Self { offsets, moves, center }
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    pub fn center(&self) -> u32 {
        self.center
    }

    pub fn offset(&self, id: u32) -> &[i64] {
        &self.offsets[id as usize]
    }

    pub fn moves(&self, id: u32) -> &[(u8, u32)] {
        &self.moves[id as usize]
    }
}
