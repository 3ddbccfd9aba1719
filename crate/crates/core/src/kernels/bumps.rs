//! Compactly supported cutoffs built from the profile `exp(-1/t)`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{CzError, Result};
use crate::quad;

#[inline]
fn exp_profile(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

/// Smooth monotone step: exactly 0 for `t <= 0`, exactly 1 for `t >= 1`.
#[inline]
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = exp_profile(t);
        a / (a + exp_profile(1.0 - t))
    }
}

/// Derivative of [`smooth_step`].
pub fn smooth_step_derivative(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        return 0.0;
    }
    let a = exp_profile(t);
    let b = exp_profile(1.0 - t);
    let da = a / (t * t);
    let db = -b / ((1.0 - t) * (1.0 - t));
    (da * b - a * db) / ((a + b) * (a + b))
}

/// Radial cutoff: 1 for `r <= 1`, 0 for `r >= 6/5`.
#[inline]
pub fn phi_radial(r: f64) -> f64 {
    1.0 - smooth_step((r - 1.0) * 5.0)
}

/// One-dimensional even cutoff: 1 for `|u| <= 1/2`, 0 for `|u| >= 1`.
#[inline]
pub fn phi_1d(u: f64) -> f64 {
    1.0 - smooth_step(2.0 * u.abs() - 1.0)
}

/// Unnormalized mollifier profile `exp(-1/(1 - r^2))` on `r < 1`.
#[inline]
pub fn bump_profile(r: f64) -> f64 {
    if r >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - r * r)).exp()
    }
}

fn mollifier_constant(d: usize) -> f64 {
    static C: [OnceLock<f64>; 2] = [OnceLock::new(), OnceLock::new()];
    *C[d - 2].get_or_init(|| {
        let sphere_area = if d == 2 { 2.0 * PI } else { 4.0 * PI };
        let mass: f64 = quad::composite_gauss(12, 64, 0.0, 1.0)
            .iter()
            .map(|&(r, w)| w * bump_profile(r) * r.powi(d as i32 - 1))
            .sum::<f64>()
            * sphere_area;
        1.0 / mass
    })
}

/// Radial mollifier with unit integral supported in the closed unit ball.
#[inline]
pub fn mollifier(d: usize, r: f64) -> f64 {
    mollifier_constant(d) * bump_profile(r)
}

/// The pair of bumps used by the decomposition: the radial cutoff `phi`
/// and the unit-mass mollifier `Phi`, with `Phi_m(x) = 2^{-md} Phi(2^{-m} x)`.
#[derive(Debug, Clone, Copy)]
pub struct BumpPair {
    pub d: usize,
}

impl BumpPair {
    pub fn new(d: usize) -> Result<Self> {
        if !(2..=3).contains(&d) {
            return Err(CzError::Domain(format!("dimension must be 2 or 3, got {d}")));
        }
        Ok(BumpPair { d })
    }

    pub fn phi(&self, x: &[f64]) -> f64 {
        phi_radial(norm(x))
    }

    pub fn mollifier(&self, x: &[f64]) -> f64 {
        mollifier(self.d, norm(x))
    }

    /// `Phi_m` at `x`.
    pub fn mollifier_at_scale(&self, m: i32, x: &[f64]) -> f64 {
        let s = 2f64.powi(m);
        mollifier(self.d, norm(x) / s) / s.powi(self.d as i32)
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// The s-cutoff `theta_n`: supported in `(n^-2, 1 - n^-2)`, equal to 1 on
/// `[2 n^-2, 1 - 2 n^-2]`, with `|theta_n'| <= 2 n^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SCutoff {
    pub n: u32,
}

/// Bound on `max |smooth_step'|`, hence `max |theta_n'| <= SCUTOFF_SLOPE * n^2`.
pub const SCUTOFF_SLOPE: f64 = 2.0;

impl SCutoff {
    pub fn new(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(CzError::Domain(format!("s-cutoff needs n >= 2, got {n}")));
        }
        Ok(SCutoff { n })
    }

    #[inline]
    fn width(&self) -> f64 {
        1.0 / (self.n as f64 * self.n as f64)
    }

    #[inline]
    pub fn eval(&self, s: f64) -> f64 {
        let w = self.width();
        smooth_step((s - w) / w) * smooth_step((1.0 - s - w) / w)
    }

    pub fn derivative(&self, s: f64) -> f64 {
        let w = self.width();
        let left = smooth_step((s - w) / w);
        let right = smooth_step((1.0 - s - w) / w);
        smooth_step_derivative((s - w) / w) / w * right - left * smooth_step_derivative((1.0 - s - w) / w) / w
    }

    /// Midpoint nodes `(i + 1/2)/m` with weights `theta_n(s_i)/m`.
    pub fn midpoint_rule(&self, m: usize) -> Vec<(f64, f64)> {
        (0..m)
            .map(|i| {
                let s = (i as f64 + 0.5) / m as f64;
                (s, self.eval(s) / m as f64)
            })
            .collect()
    }

    /// `int theta_n` as seen by the `m`-node midpoint rule.
    pub fn midpoint_mass(&self, m: usize) -> f64 {
        self.midpoint_rule(m).iter().map(|(_, w)| w).sum()
    }
}
