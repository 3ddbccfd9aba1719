//! Separated direction nets on the unit sphere and their conic partition of unity.

use std::f64::consts::PI;
use std::io::Write;

use rustc_hash::FxHashMap as HashMap;

use crate::error::{CzError, Result};
use crate::grid::MAX_DIM;
use crate::kernels::smooth_step;

/// Largest net this crate will build.
pub const MAX_NET_SIZE: usize = 1_000_000;

/// Candidate points per expected net point in the greedy construction,
/// indexed by `d - 2`.
const OVERSAMPLING: [f64; 2] = [100.0, 25.0];

type Key = [i64; MAX_DIM];

/// Bucket hash of unit vectors for radius queries.
#[derive(Debug, Clone)]
struct Buckets {
    cell: f64,
    d: usize,
    map: HashMap<Key, Vec<usize>>,
}

impl Buckets {
    fn new(cell: f64, d: usize) -> Self {
        Buckets { cell, d, map: HashMap::default() }
    }

    fn key(&self, p: &[f64; MAX_DIM]) -> Key {
        let mut k = [0i64; MAX_DIM];
        for a in 0..self.d {
            k[a] = (p[a] / self.cell).floor() as i64;
        }
        k
    }

    fn insert(&mut self, p: &[f64; MAX_DIM], id: usize) {
        self.map.entry(self.key(p)).or_default().push(id);
    }

    /// Ids in the buckets adjacent to `p`; covers every point within `cell`.
    fn near(&self, p: &[f64; MAX_DIM], mut visit: impl FnMut(usize)) {
        let base = self.key(p);
        let span = if self.d == 2 { 9 } else { 27 };
        for code in 0..span {
            let mut k = base;
            let mut c = code;
            for ka in k.iter_mut().take(self.d) {
                *ka += (c % 3) as i64 - 1;
                c /= 3;
            }
            if let Some(ids) = self.map.get(&k) {
                ids.iter().for_each(|&i| visit(i));
            }
        }
    }
}

fn chord(u: &[f64; MAX_DIM], v: &[f64; MAX_DIM], d: usize) -> f64 {
    (0..d).map(|a| (u[a] - v[a]).powi(2)).sum::<f64>().sqrt()
}

/// Quasi-uniform candidate points: uniform angles on the circle, a
/// Fibonacci lattice on the 2-sphere.
pub fn sphere_candidates(d: usize, count: usize) -> Vec<[f64; MAX_DIM]> {
    if d == 2 {
        (0..count)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / count as f64;
                [t.cos(), t.sin(), 0.0]
            })
            .collect()
    } else {
        let golden = PI * (3.0 - 5f64.sqrt());
        (0..count)
            .map(|k| {
                let z = 1.0 - (2.0 * k as f64 + 1.0) / count as f64;
                let r = (1.0 - z * z).sqrt();
                let t = golden * k as f64;
                [r * t.cos(), r * t.sin(), z]
            })
            .collect()
    }
}

/// A maximal `2^{-4-n gamma}`-separated family of unit vectors.
#[derive(Debug, Clone)]
pub struct DirectionNet {
    pub d: usize,
    pub n: u32,
    pub gamma: f64,
    pub dirs: Vec<[f64; MAX_DIM]>,
    /// Distance bound from any candidate point to its nearest candidate;
    /// maximality holds for arbitrary unit vectors up to this slack.
    pub sampling_slack: f64,
    buckets: Buckets,
}

impl DirectionNet {
    /// Greedy insertion over a deterministic candidate sampling.
    pub fn build(n: u32, gamma: f64, d: usize) -> Result<Self> {
        if !(2..=3).contains(&d) {
            return Err(CzError::Domain(format!("dimension must be 2 or 3, got {d}")));
        }
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(CzError::Parameter(format!("gamma must lie in (0, 1), got {gamma}")));
        }
        let sep = 2f64.powf(-4.0 - n as f64 * gamma);
        let expected = if d == 2 { 2.0 * PI / sep } else { 4.0 * PI / (sep * sep) };
        if expected > MAX_NET_SIZE as f64 {
            return Err(CzError::Scale(format!(
                "net for n={n}, gamma={gamma}, d={d} would hold about {expected:.0} directions (limit {MAX_NET_SIZE})"
            )));
        }
        let count = (OVERSAMPLING[d - 2] * expected).ceil() as usize;
        let candidates = sphere_candidates(d, count);
        let sampling_slack = if d == 2 {
            PI / count as f64
        } else {
            // Fibonacci lattice spacing is about sqrt(4 pi / count)
            (4.0 * PI / count as f64).sqrt()
        };
        let mut dirs: Vec<[f64; MAX_DIM]> = Vec::new();
        let mut sep_buckets = Buckets::new(sep, d);
        for c in &candidates {
            let mut ok = true;
            sep_buckets.near(c, |i| {
                if ok && chord(c, &dirs[i], d) < sep {
                    ok = false;
                }
            });
            if ok {
                sep_buckets.insert(c, dirs.len());
                dirs.push(*c);
                if dirs.len() > MAX_NET_SIZE {
                    return Err(CzError::Scale(format!("net exceeds {MAX_NET_SIZE} directions")));
                }
            }
        }
        Ok(Self::from_dirs(d, n, gamma, dirs, sampling_slack))
    }

    fn from_dirs(d: usize, n: u32, gamma: f64, dirs: Vec<[f64; MAX_DIM]>, slack: f64) -> Self {
        let support = 2f64.powf(-2.0 - n as f64 * gamma);
        let mut buckets = Buckets::new(support, d);
        for (i, v) in dirs.iter().enumerate() {
            buckets.insert(v, i);
        }
        DirectionNet { d, n, gamma, dirs, sampling_slack: slack, buckets }
    }

    /// A net with caller-chosen directions (normalized); separation and
    /// maximality are not enforced.
    pub fn from_directions(d: usize, n: u32, gamma: f64, dirs: &[Vec<f64>]) -> Result<Self> {
        let mut out = Vec::with_capacity(dirs.len());
        for v in dirs {
            if v.len() != d {
                return Err(CzError::Parameter(format!("direction {v:?} is not {d}-dimensional")));
            }
            let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if r == 0.0 {
                return Err(CzError::Domain("zero direction".into()));
            }
            let mut u = [0.0; MAX_DIM];
            for a in 0..d {
                u[a] = v[a] / r;
            }
            out.push(u);
        }
        Ok(Self::from_dirs(d, n, gamma, out, 0.0))
    }

    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }

    pub fn separation(&self) -> f64 {
        2f64.powf(-4.0 - self.n as f64 * self.gamma)
    }

    pub fn plateau_radius(&self) -> f64 {
        2f64.powf(-3.0 - self.n as f64 * self.gamma)
    }

    pub fn support_radius(&self) -> f64 {
        2f64.powf(-2.0 - self.n as f64 * self.gamma)
    }

    /// `card / 2^{n gamma (d-1)}`.
    pub fn normalized_cardinality(&self) -> f64 {
        self.len() as f64 / 2f64.powf(self.n as f64 * self.gamma * (self.d - 1) as f64)
    }

    /// Smallest pairwise chord distance. Neighbours are looked up in the
    /// support-radius buckets, with an exhaustive scan for isolated points.
    pub fn min_separation(&self) -> f64 {
        let d = self.d;
        let mut best = f64::INFINITY;
        for (i, u) in self.dirs.iter().enumerate() {
            let mut local = f64::INFINITY;
            self.buckets.near(u, |k| {
                if k != i {
                    local = local.min(chord(u, &self.dirs[k], d));
                }
            });
            if !(local <= self.buckets.cell) {
                for (k, v) in self.dirs.iter().enumerate() {
                    if k != i {
                        local = local.min(chord(u, v, d));
                    }
                }
            }
            best = best.min(local);
        }
        best
    }

    /// Distance from `u` to the nearest direction.
    pub fn distance_to_net(&self, u: &[f64; MAX_DIM]) -> f64 {
        let mut best = f64::INFINITY;
        self.buckets.near(u, |i| best = best.min(chord(u, &self.dirs[i], self.d)));
        if best.is_finite() {
            best
        } else {
            self.dirs.iter().map(|v| chord(u, v, self.d)).fold(f64::INFINITY, f64::min)
        }
    }

    /// Cap bump around direction `i`: 1 within the plateau radius, 0 beyond
    /// the support radius (chord distance).
    pub fn chi_tilde(&self, i: usize, u: &[f64; MAX_DIM]) -> f64 {
        let p = self.plateau_radius();
        let s = self.support_radius();
        1.0 - smooth_step((chord(u, &self.dirs[i], self.d) - p) / (s - p))
    }

    fn unit(&self, x: &[f64]) -> Result<[f64; MAX_DIM]> {
        let r = x[..self.d].iter().map(|v| v * v).sum::<f64>().sqrt();
        if r == 0.0 {
            return Err(CzError::Domain("conic partition is undefined at the origin".into()));
        }
        let mut u = [0.0; MAX_DIM];
        for a in 0..self.d {
            u[a] = x[a] / r;
        }
        Ok(u)
    }

    /// All `(i, chi_i(x))` with `chi_i(x) > 0`.
    pub fn chi_all(&self, x: &[f64]) -> Result<Vec<(usize, f64)>> {
        let u = self.unit(x)?;
        let mut terms = Vec::new();
        self.buckets.near(&u, |i| {
            let v = self.chi_tilde(i, &u);
            if v > 0.0 {
                terms.push((i, v));
            }
        });
        let total: f64 = terms.iter().map(|t| t.1).sum();
        if total == 0.0 {
            return Err(CzError::Resolution(format!("direction {u:?} is not covered by the net")));
        }
        terms.iter_mut().for_each(|t| t.1 /= total);
        terms.sort_by_key(|t| t.0);
        Ok(terms)
    }

    /// `chi_{n,nu_i}(x) = chi~_i(x/|x|) / sum_k chi~_k(x/|x|)`.
    pub fn chi(&self, i: usize, x: &[f64]) -> Result<f64> {
        let u = self.unit(x)?;
        let own = self.chi_tilde(i, &u);
        if own == 0.0 {
            return Ok(0.0);
        }
        Ok(self.chi_all(x)?.iter().find(|t| t.0 == i).map_or(0.0, |t| t.1))
    }

    /// Denominator `sum_k chi~_k(x/|x|)`.
    pub fn chi_denominator(&self, x: &[f64]) -> Result<f64> {
        let u = self.unit(x)?;
        let mut total = 0.0;
        self.buckets.near(&u, |i| total += self.chi_tilde(i, &u));
        Ok(total)
    }

    /// Writes one unit vector per row.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let header = ["x1", "x2", "x3"][..self.d].join(",");
        writeln!(out, "{header}")?;
        for v in &self.dirs {
            let row: Vec<String> = v[..self.d].iter().map(|c| format!("{c}")).collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}
