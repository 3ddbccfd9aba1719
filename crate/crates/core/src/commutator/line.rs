//! Averages of a periodic multilinear interpolant along segments.
//!
//! Positions are in index units: grid point `i` sits at `u = i` (mod `N`).

use crate::grid::{GridSpec, MAX_DIM};
use crate::kernels::SCutoff;

/// Periodic multilinear interpolation of `values` at index position `u`.
#[inline]
pub fn interpolate(values: &[f64], spec: &GridSpec, u: &[f64; MAX_DIM]) -> f64 {
    let d = spec.d;
    let n = spec.n as i64;
    let mut base = [0usize; MAX_DIM];
    let mut next = [0usize; MAX_DIM];
    let mut t = [0.0; MAX_DIM];
    for a in 0..d {
        let fl = u[a].floor();
        t[a] = u[a] - fl;
        let i = (fl as i64).rem_euclid(n);
        base[a] = i as usize;
        next[a] = ((i + 1) % n) as usize;
    }
    let mut acc = 0.0;
    for corner in 0..1usize << d {
        let mut w = 1.0;
        let mut flat = 0usize;
        for a in 0..d {
            let hi = corner >> a & 1 == 1;
            w *= if hi { t[a] } else { 1.0 - t[a] };
            flat = flat * spec.n + if hi { next[a] } else { base[a] };
        }
        if w != 0.0 {
            acc += w * values[flat];
        }
    }
    acc
}

/// Two-point Gauss-Legendre nodes on `[0, 1]`.
const GL2: [f64; 2] = [0.211_324_865_405_187_1, 0.788_675_134_594_812_9];

/// `int_0^1 a(start + s delta) ds`, exact for the multilinear interpolant:
/// between crossings of grid lines the integrand is a polynomial of degree
/// at most `d <= 3`, which two Gauss points per piece integrate exactly.
pub fn segment_average(values: &[f64], spec: &GridSpec, start: &[f64; MAX_DIM], delta: &[f64; MAX_DIM]) -> f64 {
    let mut breaks = Vec::with_capacity(16);
    breaks.push(0.0);
    breaks.push(1.0);
    for a in 0..spec.d {
        let dl = delta[a];
        if dl == 0.0 {
            continue;
        }
        let lo = start[a].min(start[a] + dl);
        let hi = start[a].max(start[a] + dl);
        let mut k = lo.floor() + 1.0;
        while k < hi {
            breaks.push((k - start[a]) / dl);
            k += 1.0;
        }
    }
    breaks.sort_by(|x, y| x.partial_cmp(y).expect("finite breakpoints"));
    let mut acc = 0.0;
    let mut p = [0.0; MAX_DIM];
    for w in breaks.windows(2) {
        let len = w[1] - w[0];
        if len <= 0.0 {
            continue;
        }
        for g in GL2 {
            let s = w[0] + g * len;
            for a in 0..spec.d {
                p[a] = start[a] + s * delta[a];
            }
            acc += 0.5 * len * interpolate(values, spec, &p);
        }
    }
    acc
}

/// Midpoint nodes with `theta_n` weights, zero-weight nodes dropped.
#[derive(Debug, Clone)]
pub struct CutoffRule {
    pub theta: SCutoff,
    pub nodes: Vec<(f64, f64)>,
    /// Sum of the retained weights: the discrete `int theta_n`.
    pub mass: f64,
}

impl CutoffRule {
    pub fn new(theta: SCutoff, m_s: usize) -> Self {
        let nodes: Vec<(f64, f64)> = theta.midpoint_rule(m_s).into_iter().filter(|n| n.1 > 0.0).collect();
        let mass = nodes.iter().map(|n| n.1).sum();
        CutoffRule { theta, nodes, mass }
    }

    /// `sum_i w_i a(start + s_i delta)`.
    pub fn weighted_average(
        &self,
        values: &[f64],
        spec: &GridSpec,
        start: &[f64; MAX_DIM],
        delta: &[f64; MAX_DIM],
    ) -> f64 {
        let mut p = [0.0; MAX_DIM];
        let mut acc = 0.0;
        for &(s, w) in &self.nodes {
            for a in 0..spec.d {
                p[a] = start[a] + s * delta[a];
            }
            acc += w * interpolate(values, spec, &p);
        }
        acc
    }
}
