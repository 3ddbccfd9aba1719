use serde::{Deserialize, Serialize};

use crate::error::{CzError, Result};
use crate::quad;

/// Sphere profile `Omega` of a homogeneous kernel `K(x) = Omega(x/|x|) |x|^{-d}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Omega {
    /// `Omega(theta) = theta_axis` (Riesz-type, odd).
    Riesz { axis: usize },
    /// `Omega(theta) = sin(3 * angle(theta))`, two dimensions only.
    Sin3,
}

impl Omega {
    #[inline]
    pub fn eval(&self, theta: &[f64]) -> f64 {
        match *self {
            Omega::Riesz { axis } => theta[axis],
            Omega::Sin3 => (3.0 * theta[1].atan2(theta[0])).sin(),
        }
    }

    fn sup(&self) -> f64 {
        1.0
    }

    /// Supremum of the tangential gradient on the sphere.
    fn sup_tangential_gradient(&self) -> f64 {
        match self {
            Omega::Riesz { .. } => 1.0,
            Omega::Sin3 => 3.0,
        }
    }
}

/// A homogeneous Calderon-Zygmund kernel with size and regularity constant
/// `A` and Hoelder exponent `eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub d: usize,
    pub omega: Omega,
    pub eps: f64,
    pub a_const: f64,
}

impl KernelSpec {
    /// Builds a kernel with the smallest `A` this crate can certify:
    /// `|grad K(y)| <= (d sup|Omega| + sup|grad_S Omega|) |y|^{-d-1}` on the
    /// segment, and `|y| >= |x|/2` there, gives the Hoelder constant with `eps = 1`.
    pub fn new(d: usize, omega: Omega) -> Result<Self> {
        if !(2..=3).contains(&d) {
            return Err(CzError::Domain(format!("dimension must be 2 or 3, got {d}")));
        }
        match omega {
            Omega::Riesz { axis } if axis >= d => {
                return Err(CzError::Parameter(format!("Riesz axis {axis} out of range for d={d}")))
            }
            Omega::Sin3 if d != 2 => return Err(CzError::Parameter("sin3 profile is two-dimensional".into())),
            _ => {}
        }
        let grad = d as f64 * omega.sup() + omega.sup_tangential_gradient();
        let a_const = (grad * 2f64.powi(d as i32 + 1)).max(omega.sup());
        Ok(KernelSpec { d, omega, eps: 1.0, a_const })
    }

    /// Kernel by identifier: `riesz-x1`, `riesz-x2`, `riesz-x3`, `sin3`.
    pub fn from_id(id: &str, d: usize) -> Result<Self> {
        let omega = match id {
            "riesz-x1" => Omega::Riesz { axis: 0 },
            "riesz-x2" => Omega::Riesz { axis: 1 },
            "riesz-x3" => Omega::Riesz { axis: 2 },
            "sin3" => Omega::Sin3,
            other => {
                return Err(CzError::Parameter(format!(
                    "unknown kernel `{other}` (expected riesz-x1, riesz-x2, riesz-x3, sin3)"
                )))
            }
        };
        Self::new(d, omega)
    }

    pub fn id(&self) -> String {
        match self.omega {
            Omega::Riesz { axis } => format!("riesz-x{}", axis + 1),
            Omega::Sin3 => "sin3".into(),
        }
    }

    /// `K(x)`; zero at the origin.
    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        let r2: f64 = x[..self.d].iter().map(|v| v * v).sum();
        if r2 == 0.0 {
            return 0.0;
        }
        let r = r2.sqrt();
        let mut theta = [0.0; 3];
        for (t, v) in theta.iter_mut().zip(&x[..self.d]) {
            *t = v / r;
        }
        self.omega.eval(&theta[..self.d]) / r.powi(self.d as i32)
    }

    /// `int_{S^{d-1}} Omega` by a product rule with parameter `q`.
    pub fn sphere_mean(&self, q: usize) -> f64 {
        quad::sphere_rule(self.d, q).integrate(|p| self.omega.eval(&p[..self.d]))
    }

    /// Supremum of the continuum symbol `|K^|` where known in closed form.
    /// For the Riesz profile, `K^(xi) = -i c_d xi_k/|xi|` with
    /// `c_d = pi^{(d+1)/2} / Gamma((d+1)/2)`: `c_2 = 2 pi`, `c_3 = pi^2`.
    pub fn symbol_sup(&self) -> Option<f64> {
        match self.omega {
            Omega::Riesz { .. } if self.d == 2 => Some(2.0 * std::f64::consts::PI),
            Omega::Riesz { .. } => Some(std::f64::consts::PI * std::f64::consts::PI),
            Omega::Sin3 => None,
        }
    }
}
