//! The d-commutator `T[a]f(x) = p.v. int K(x-y) int_0^1 a(sx + (1-s)y) ds f(y) dy`
//! and its dyadic, mollified and sector pieces, evaluated by direct summation.

mod line;

use num_complex::Complex64;
use rayon::prelude::*;

pub use line::{interpolate, segment_average, CutoffRule};

use crate::error::{CzError, Result};
use crate::grid::{norm, GridFunction, GridSpec, Norm, MAX_DIM};
use crate::kernels::{
    check_dims, dyadic_piece, ell_eps, mollified_kernel, mollified_value, mollifier_rule, KernelSpec, MollifyMethod,
    SCutoff,
};
use crate::microlocal::DirectionNet;

/// Default number of midpoint nodes for `theta_n`-weighted averages.
pub const DEFAULT_M_S: usize = 64;

/// Operator data: kernel, the field `a` (real, `|a| <= 1`), the midpoint
/// node count for `theta_n` weights and the truncation radius.
#[derive(Debug, Clone)]
pub struct CommutatorParams {
    pub kernel: KernelSpec,
    pub a: GridFunction,
    pub m_s: usize,
    pub r: f64,
    pub mollify: MollifyMethod,
    a_values: Vec<f64>,
}

impl CommutatorParams {
    pub fn new(kernel: KernelSpec, a: GridFunction, m_s: usize, r: f64) -> Result<Self> {
        let spec = *a.spec();
        check_dims(&kernel, &spec)?;
        if !a.is_real(0.0) {
            return Err(CzError::Domain("the field a must be real".into()));
        }
        let sup = norm(&a, Norm::Linf);
        if sup > 1.0 + 1e-12 {
            return Err(CzError::Domain(format!("||a||_inf = {sup} exceeds 1; use `normalized`")));
        }
        if m_s < 16 {
            return Err(CzError::Resolution(format!("need at least 16 s-nodes, got {m_s}")));
        }
        if r < spec.h() || r > spec.side / 4.0 {
            return Err(CzError::Resolution(format!(
                "truncation radius {r} must lie in [h, S/4] = [{}, {}]",
                spec.h(),
                spec.side / 4.0
            )));
        }
        let a_values = a.re();
        Ok(CommutatorParams { kernel, a, m_s, r, mollify: MollifyMethod::default(), a_values })
    }

    /// Rescales `a` to `||a||_inf = 1` when it exceeds one.
    pub fn normalized(kernel: KernelSpec, a: GridFunction, m_s: usize, r: f64) -> Result<Self> {
        let sup = norm(&a, Norm::Linf);
        let a = if sup > 1.0 { a.scale(1.0 / sup) } else { a };
        Self::new(kernel, a, m_s, r)
    }

    pub fn with_mollify(mut self, method: MollifyMethod) -> Self {
        self.mollify = method;
        self
    }

    pub fn spec(&self) -> &GridSpec {
        self.a.spec()
    }

    /// Midpoint rule for `theta_n`; each transition layer of width `n^-2`
    /// must hold at least two nodes.
    fn cutoff_rule(&self, n: u32) -> Result<CutoffRule> {
        if (self.m_s as f64) < 2.0 * (n as f64).powi(2) {
            return Err(CzError::Resolution(format!(
                "{} s-nodes cannot resolve theta_{n}; need at least {}",
                self.m_s,
                2 * n * n
            )));
        }
        let rule = CutoffRule::new(SCutoff::new(n)?, self.m_s);
        if rule.nodes.is_empty() {
            return Err(CzError::Resolution(format!(
                "no s-node among {} falls inside the support of theta_{n}",
                self.m_s
            )));
        }
        Ok(rule)
    }
}

/// How the s-integral is weighted.
#[derive(Debug, Clone)]
pub enum SWeight {
    /// `int_0^1 a ds`, computed exactly for the interpolant.
    Uniform,
    /// `int theta_n(s) a ds` by the midpoint rule.
    Cutoff(CutoffRule),
}

impl SWeight {
    #[inline]
    fn average(&self, a: &[f64], spec: &GridSpec, start: &[f64; MAX_DIM], delta: &[f64; MAX_DIM]) -> f64 {
        match self {
            SWeight::Uniform => segment_average(a, spec, start, delta),
            SWeight::Cutoff(rule) => rule.weighted_average(a, spec, start, delta),
        }
    }
}

fn check_support(f: &GridFunction) -> Result<Vec<(usize, Complex64)>> {
    let spec = f.spec();
    let mut out = Vec::new();
    for (i, v) in f.values().iter().enumerate() {
        if *v != Complex64::new(0.0, 0.0) {
            if !spec.in_central_quarter(i) {
                return Err(CzError::Support(format!(
                    "input is nonzero at {:?}, outside the central quarter",
                    spec.coord(i)
                )));
            }
            out.push((i, *v));
        }
    }
    Ok(out)
}

/// `h^d sum_y k(x-y) avg_s a(y + s(x-y)) f(y)` for a kernel sampled at
/// grid displacements; `x - y` is the minimal-image displacement.
pub fn apply_with_kernel(
    params: &CommutatorParams,
    kernel: &GridFunction,
    f: &GridFunction,
    weight: &SWeight,
) -> Result<GridFunction> {
    let spec = *params.spec();
    spec.check_same(f.spec())?;
    spec.check_same(kernel.spec())?;
    let support = check_support(f)?;
    let sources: Vec<([i64; MAX_DIM], Complex64)> = support.iter().map(|&(i, v)| (spec.centered_index(i), v)).collect();
    let kvals = kernel.re();
    let a = &params.a_values;
    let w = spec.cell_measure();
    let out: Vec<Complex64> = (0..spec.len())
        .into_par_iter()
        .map(|x| {
            let xc = spec.centered_index(x);
            let mut acc = Complex64::new(0.0, 0.0);
            let mut disp = [0i64; MAX_DIM];
            let mut start = [0.0; MAX_DIM];
            let mut delta = [0.0; MAX_DIM];
            for (yc, fy) in &sources {
                for ax in 0..spec.d {
                    disp[ax] = xc[ax] - yc[ax];
                }
                let kflat = spec.ravel_signed(&disp);
                let k = kvals[kflat];
                if k == 0.0 {
                    continue;
                }
                let z = spec.centered_index(kflat);
                for ax in 0..spec.d {
                    start[ax] = yc[ax] as f64;
                    delta[ax] = z[ax] as f64;
                }
                acc += fy * (k * weight.average(a, &spec, &start, &delta));
            }
            acc * w
        })
        .collect();
    GridFunction::new(spec, out)
}

/// `K 1_{|x| > r}` sampled at grid displacements.
pub fn truncated_kernel(kernel: &KernelSpec, spec: &GridSpec, r: f64) -> Result<GridFunction> {
    check_dims(kernel, spec)?;
    Ok(GridFunction::from_fn(*spec, |z| {
        let rz = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        if rz > r {
            kernel.eval(z)
        } else {
            0.0
        }
    }))
}

/// Truncated `T_r[a] f`.
pub fn apply_t(params: &CommutatorParams, f: &GridFunction) -> Result<GridFunction> {
    let k = truncated_kernel(&params.kernel, params.spec(), params.r)?;
    apply_with_kernel(params, &k, f, &SWeight::Uniform)
}

/// `T_j f` with kernel `K_j`.
pub fn apply_tj(params: &CommutatorParams, f: &GridFunction, j: i32) -> Result<GridFunction> {
    let k = dyadic_piece(&params.kernel, j, params.spec())?;
    apply_with_kernel(params, &k, f, &SWeight::Uniform)
}

/// `K_j^n` by the configured mollification method.
pub fn mollified_kernel_for(params: &CommutatorParams, j: i32, n: u32, eps: f64) -> Result<GridFunction> {
    mollified_kernel(&params.kernel, j, n, eps, params.spec(), params.mollify)
}

/// `T_j^n f`: kernel `K_j^n`, s-weight `theta_n`.
pub fn apply_tjn(params: &CommutatorParams, f: &GridFunction, j: i32, n: u32, eps: f64) -> Result<GridFunction> {
    let rule = params.cutoff_rule(n)?;
    let k = mollified_kernel_for(params, j, n, eps)?;
    apply_with_kernel(params, &k, f, &SWeight::Cutoff(rule))
}

fn check_net(params: &CommutatorParams, net: &DirectionNet, n: u32, nu: usize) -> Result<()> {
    if net.n != n || net.d != params.spec().d {
        return Err(CzError::Parameter(format!(
            "net built for (n={}, d={}) used with (n={n}, d={})",
            net.n,
            net.d,
            params.spec().d
        )));
    }
    if nu >= net.len() {
        return Err(CzError::Parameter(format!("direction index {nu} out of range ({})", net.len())));
    }
    Ok(())
}

/// `K_j^{n,nu} = K_j^n chi_{n,nu}` sampled at grid displacements.
pub fn sector_kernel(
    params: &CommutatorParams,
    j: i32,
    n: u32,
    eps: f64,
    net: &DirectionNet,
    nu: usize,
) -> Result<GridFunction> {
    check_net(params, net, n, nu)?;
    let spec = *params.spec();
    let chi =
        GridFunction::from_fn(spec, |z| if z.iter().all(|&v| v == 0.0) { 0.0 } else { net.chi(nu, z).unwrap_or(0.0) });
    match params.mollify {
        MollifyMethod::Grid => mollified_kernel_for(params, j, n, eps)?.mul(&chi),
        MollifyMethod::Quadrature => {
            dyadic_piece(&params.kernel, j, &spec)?;
            let m = j - ell_eps(n, eps)?;
            let rule = mollifier_rule(spec.d);
            let kernel = params.kernel;
            let chi_vals = chi.re();
            let vals: Vec<Complex64> = (0..spec.len())
                .into_par_iter()
                .map(|i| {
                    let c = chi_vals[i];
                    let v = if c == 0.0 { 0.0 } else { c * mollified_value(&kernel, j, m, &rule, &spec.coord(i)) };
                    Complex64::new(v, 0.0)
                })
                .collect();
            GridFunction::new(spec, vals)
        }
    }
}

/// `T_j^{n,nu} f` for the direction `net.dirs[nu]`.
pub fn apply_tj_nu(
    params: &CommutatorParams,
    f: &GridFunction,
    j: i32,
    n: u32,
    eps: f64,
    net: &DirectionNet,
    nu: usize,
) -> Result<GridFunction> {
    let rule = params.cutoff_rule(n)?;
    let k = sector_kernel(params, j, n, eps, net, nu)?;
    apply_with_kernel(params, &k, f, &SWeight::Cutoff(rule))
}

/// `x -> K_j^{n,nu}(x-y) int theta_n(s) a(sx + (1-s)y) ds` for the source `y`.
pub fn frozen_kernel(
    params: &CommutatorParams,
    j: i32,
    n: u32,
    eps: f64,
    net: &DirectionNet,
    nu: usize,
    y: usize,
) -> Result<GridFunction> {
    let k = sector_kernel(params, j, n, eps, net, nu)?;
    frozen_from_kernel(params, &k, n, y)
}

/// [`frozen_kernel`] with a precomputed sector kernel.
pub fn frozen_from_kernel(params: &CommutatorParams, kernel: &GridFunction, n: u32, y: usize) -> Result<GridFunction> {
    let rule = params.cutoff_rule(n)?;
    let spec = *params.spec();
    let yc = spec.centered_index(y);
    let kvals = kernel.re();
    let a = &params.a_values;
    let vals: Vec<Complex64> = (0..spec.len())
        .into_par_iter()
        .map(|x| {
            let xc = spec.centered_index(x);
            let mut disp = [0i64; MAX_DIM];
            for ax in 0..spec.d {
                disp[ax] = xc[ax] - yc[ax];
            }
            let kflat = spec.ravel_signed(&disp);
            let k = kvals[kflat];
            if k == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let z = spec.centered_index(kflat);
            let mut start = [0.0; MAX_DIM];
            let mut delta = [0.0; MAX_DIM];
            for ax in 0..spec.d {
                start[ax] = yc[ax] as f64;
                delta[ax] = z[ax] as f64;
            }
            Complex64::new(k * rule.weighted_average(a, &spec, &start, &delta), 0.0)
        })
        .collect();
    GridFunction::new(spec, vals)
}

/// Discrete `int theta_n` seen by the configured midpoint rule.
pub fn theta_mass(params: &CommutatorParams, n: u32) -> Result<f64> {
    Ok(params.cutoff_rule(n)?.mass)
}
