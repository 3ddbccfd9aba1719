//! Dyadic pieces `K_j`, mollified pieces `K_j^n` and their norms.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bumps::{bump_profile, phi_radial, BumpPair};
use super::params::ell_eps;
use super::KernelSpec;
use crate::error::{CzError, Result};
use crate::grid::{convolve, norm_d, GridFunction, GridSpec, MAX_DIM};
use crate::quad::{self, PointRule};

/// Continuum value of `K_j(z) = (phi(2^-j z) - phi(2^{1-j} z)) K(z)`.
#[inline]
pub fn kj_value(kernel: &KernelSpec, j: i32, z: &[f64]) -> f64 {
    let r = z[..kernel.d].iter().map(|v| v * v).sum::<f64>().sqrt();
    let cut = phi_radial(r * 2f64.powi(-j)) - phi_radial(r * 2f64.powi(1 - j));
    if cut == 0.0 {
        0.0
    } else {
        cut * kernel.eval(z)
    }
}

fn check_annulus_fits(spec: &GridSpec, j: i32) -> Result<()> {
    let outer = 1.2 * 2f64.powi(j);
    if outer > spec.side / 4.0 {
        return Err(CzError::Scale(format!(
            "annulus of piece j={j} (outer radius {outer}) exceeds S/4 = {}",
            spec.side / 4.0
        )));
    }
    Ok(())
}

/// `K_j` sampled at grid displacements (origin at index 0).
pub fn dyadic_piece(kernel: &KernelSpec, j: i32, spec: &GridSpec) -> Result<GridFunction> {
    check_dims(kernel, spec)?;
    check_annulus_fits(spec, j)?;
    Ok(GridFunction::from_fn(*spec, |z| kj_value(kernel, j, z)))
}

pub(crate) fn check_dims(kernel: &KernelSpec, spec: &GridSpec) -> Result<()> {
    if kernel.d != spec.d {
        return Err(CzError::Parameter(format!(
            "kernel dimension {} does not match grid dimension {}",
            kernel.d, spec.d
        )));
    }
    Ok(())
}

/// `Phi_m` sampled at grid displacements and renormalized so that its
/// Riemann sum is exactly one.
pub fn mollifier_grid(spec: &GridSpec, m: i32) -> Result<GridFunction> {
    let radius = 2f64.powi(m);
    if radius < 2.0 * spec.h() {
        return Err(CzError::Scale(format!("mollifier radius 2^{m} = {radius} is below two cells (h = {})", spec.h())));
    }
    if radius > spec.side / 2.0 {
        return Err(CzError::Scale(format!(
            "mollifier radius 2^{m} = {radius} exceeds half the torus side {}",
            spec.side / 2.0
        )));
    }
    let bumps = BumpPair::new(spec.d)?;
    let raw = GridFunction::from_fn(*spec, |z| bumps.mollifier_at_scale(m, z));
    let mass = raw.integral().re;
    Ok(raw.scale(1.0 / mass))
}

/// How `K_j^n = K_j * Phi_{j - l_eps(n)}` is realized on the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum MollifyMethod {
    /// Periodic grid convolution with the discrete mollifier; requires the
    /// mollifier radius to cover at least two cells.
    Grid,
    /// Pointwise samples of the continuum convolution computed by a ball
    /// quadrature; valid at any mollifier scale.
    #[default]
    Quadrature,
}

/// Grid-convolution mollification of a sampled `K_j`.
pub fn mollified_piece(kj: &GridFunction, j: i32, n: u32, eps: f64) -> Result<GridFunction> {
    let m = j - ell_eps(n, eps)?;
    let phi = mollifier_grid(kj.spec(), m)?;
    convolve(kj, &phi)
}

/// Ball rule for `Phi` whose weights sum to exactly one.
pub fn mollifier_rule(d: usize) -> PointRule {
    let (qr, qa) = if d == 2 { (16, 32) } else { (12, 10) };
    let mut rule = quad::ball_rule(d, qr, qa, bump_profile);
    let mass: f64 = rule.weights.iter().sum();
    rule.weights.iter_mut().for_each(|w| *w /= mass);
    rule
}

/// Continuum `K_j^n` sampled at grid displacements.
pub fn mollified_piece_sampled(kernel: &KernelSpec, j: i32, n: u32, eps: f64, spec: &GridSpec) -> Result<GridFunction> {
    check_dims(kernel, spec)?;
    check_annulus_fits(spec, j)?;
    let m = j - ell_eps(n, eps)?;
    let rule = mollifier_rule(spec.d);
    Ok(GridFunction::from_fn(*spec, |z| mollified_value(kernel, j, m, &rule, z)))
}

/// Continuum `(K_j * Phi_m)(z)` by the ball rule `rule` (see [`mollifier_rule`]).
pub fn mollified_value(kernel: &KernelSpec, j: i32, m: i32, rule: &PointRule, z: &[f64]) -> f64 {
    let d = kernel.d;
    let delta = 2f64.powi(m);
    let inner = 2f64.powi(j - 1) - delta;
    let outer = 1.2 * 2f64.powi(j) + delta;
    let mut zz = [0.0; MAX_DIM];
    zz[..d].copy_from_slice(&z[..d]);
    let r = norm_d(&zz, d);
    if r <= inner || r >= outer {
        return 0.0;
    }
    let mut acc = 0.0;
    let mut p = [0.0; MAX_DIM];
    for (w, wt) in rule.points.iter().zip(&rule.weights) {
        for a in 0..d {
            p[a] = zz[a] - delta * w[a];
        }
        acc += wt * kj_value(kernel, j, &p);
    }
    acc
}

/// `K_j^n` by the requested method.
pub fn mollified_kernel(
    kernel: &KernelSpec,
    j: i32,
    n: u32,
    eps: f64,
    spec: &GridSpec,
    method: MollifyMethod,
) -> Result<GridFunction> {
    match method {
        MollifyMethod::Grid => mollified_piece(&dyadic_piece(kernel, j, spec)?, j, n, eps),
        MollifyMethod::Quadrature => mollified_piece_sampled(kernel, j, n, eps, spec),
    }
}

/// Periodic central-difference gradient.
pub fn gradient(f: &GridFunction) -> Vec<[Complex64; MAX_DIM]> {
    let spec = *f.spec();
    let h = spec.h();
    (0..spec.len())
        .into_par_iter()
        .map(|flat| {
            let idx = spec.unravel(flat);
            let mut g = [Complex64::new(0.0, 0.0); MAX_DIM];
            for (a, ga) in g.iter_mut().enumerate().take(spec.d) {
                let mut plus = [0i64; MAX_DIM];
                let mut minus = [0i64; MAX_DIM];
                for b in 0..spec.d {
                    plus[b] = idx[b] as i64;
                    minus[b] = idx[b] as i64;
                }
                plus[a] += 1;
                minus[a] -= 1;
                *ga = (f.get(spec.ravel_signed(&plus)) - f.get(spec.ravel_signed(&minus))) / (2.0 * h);
            }
            g
        })
        .collect()
}

/// `|| |grad f| ||_1` with central differences.
pub fn grad_l1(f: &GridFunction) -> f64 {
    let d = f.spec().d;
    gradient(f).iter().map(|g| g[..d].iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()).sum::<f64>()
        * f.spec().cell_measure()
}

/// Resolution of the continuum `||K_j - K_j^n||_1` quadrature.
#[derive(Debug, Clone, Copy)]
pub struct ErrorQuadrature {
    pub radial_panels: usize,
    pub angular: usize,
}

impl Default for ErrorQuadrature {
    fn default() -> Self {
        ErrorQuadrature { radial_panels: 100, angular: 128 }
    }
}

/// Continuum `||K_j - K_j * Phi_{j-l}||_1` for mollification depth `l`.
/// By homogeneity this is independent of `j`, so it is computed at `j = 0`.
pub fn mollification_error_l1(kernel: &KernelSpec, depth: i32, q: ErrorQuadrature) -> f64 {
    let d = kernel.d;
    let delta = 2f64.powi(-depth);
    let moll = mollifier_rule(d);
    let radial = quad::composite_gauss(4, q.radial_panels, 0.5 - delta, 1.2 + delta);
    let sphere = quad::sphere_rule(d, if d == 2 { q.angular } else { q.angular / 4 });
    radial
        .par_iter()
        .map(|&(r, wr)| {
            let mut acc = 0.0;
            let mut x = [0.0; MAX_DIM];
            let mut p = [0.0; MAX_DIM];
            for (u, ws) in sphere.points.iter().zip(&sphere.weights) {
                for a in 0..d {
                    x[a] = r * u[a];
                }
                let base = kj_value(kernel, 0, &x);
                let mut diff = 0.0;
                for (w, wt) in moll.points.iter().zip(&moll.weights) {
                    for a in 0..d {
                        p[a] = x[a] - delta * w[a];
                    }
                    diff += wt * (kj_value(kernel, 0, &p) - base);
                }
                acc += ws * diff.abs();
            }
            acc * wr * r.powi(d as i32 - 1)
        })
        .sum()
}
