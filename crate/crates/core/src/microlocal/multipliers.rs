//! Sector multipliers, Littlewood-Paley operators and the mollification `P_m`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::net::DirectionNet;
use crate::error::{CzError, Result};
use crate::grid::{convolve, multiply_symbol, GridFunction, GridSpec, MAX_DIM};
use crate::kernels::{mollifier_grid, phi_1d, phi_radial};

/// Which angular width a sector multiplier uses: `n^-5` or `n^-2` relative
/// to `2^{-n gamma}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WidthPower {
    Five,
    Two,
}

impl WidthPower {
    pub fn exponent(self) -> i32 {
        match self {
            WidthPower::Five => 5,
            WidthPower::Two => 2,
        }
    }
}

/// `xi -> phi(2^{n gamma} n^{-p} <nu, xi/|xi|>)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorMultiplier {
    pub d: usize,
    pub n: u32,
    pub gamma: f64,
    pub nu: [f64; MAX_DIM],
    pub width: WidthPower,
}

impl SectorMultiplier {
    pub fn new(n: u32, gamma: f64, nu: &[f64], width: WidthPower) -> Result<Self> {
        let d = nu.len();
        if !(2..=3).contains(&d) {
            return Err(CzError::Domain(format!("direction must have 2 or 3 components, got {d}")));
        }
        let r = nu.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (r - 1.0).abs() > 1e-12 {
            return Err(CzError::Parameter(format!("direction {nu:?} is not a unit vector")));
        }
        let mut u = [0.0; MAX_DIM];
        u[..d].copy_from_slice(nu);
        Ok(SectorMultiplier { d, n, gamma, nu: u, width })
    }

    /// `2^{n gamma} n^{-p}`.
    pub fn dilation(&self) -> f64 {
        2f64.powf(self.n as f64 * self.gamma) / (self.n as f64).powi(self.width.exponent())
    }

    /// Symbol at a frequency vector; the value at the origin is `phi(0) = 1`.
    #[inline]
    pub fn symbol(&self, xi: &[f64]) -> f64 {
        let r = xi[..self.d].iter().map(|v| v * v).sum::<f64>().sqrt();
        if r == 0.0 {
            return 1.0;
        }
        let c: f64 = (0..self.d).map(|a| self.nu[a] * xi[a]).sum::<f64>() / r;
        phi_1d(self.dilation() * c)
    }
}

pub fn apply_sector(mult: &SectorMultiplier, f: &GridFunction) -> Result<GridFunction> {
    if mult.d != f.spec().d {
        return Err(CzError::Parameter("multiplier and grid dimensions differ".into()));
    }
    Ok(multiply_symbol(f, |xi| mult.symbol(xi)))
}

/// `sup_xi sum_nu |phi(2^{n gamma} n^{-p} <nu, xi/|xi|>)|` over the given unit samples.
pub fn overlap_count(net: &DirectionNet, width: WidthPower, samples: &[[f64; MAX_DIM]]) -> f64 {
    let d = net.d;
    let dil = 2f64.powf(net.n as f64 * net.gamma) / (net.n as f64).powi(width.exponent());
    if dil <= 0.5 && !samples.is_empty() {
        // every argument lies on the plateau of phi
        return net.len() as f64;
    }
    samples
        .par_iter()
        .map(|xi| net.dirs.iter().map(|nu| phi_1d(dil * (0..d).map(|a| nu[a] * xi[a]).sum::<f64>()).abs()).sum::<f64>())
        .reduce(|| 0.0, f64::max)
}

/// Which Littlewood-Paley operator to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpOperator {
    /// Low-pass `V_k`, symbol `phi(2^k xi)`.
    V,
    /// Shell `Lambda_k`, symbol `beta_k = phi(2^k xi) - phi(2^{k+1} xi)`.
    Lambda,
    /// Fattened shell `Lambda~_k`, symbol equal to one on the support of `beta_k`.
    LambdaTilde,
}

/// Littlewood-Paley family built from the radial cutoff `phi`.
/// `beta_k` is supported in `2^{-k-1} <= |xi| <= (6/5) 2^{-k}`.
#[derive(Debug, Clone, Copy, Default)]
pub struct LpFamily;

impl LpFamily {
    pub fn v_symbol(k: i32, xi: f64) -> f64 {
        phi_radial(2f64.powi(k) * xi)
    }

    pub fn beta(k: i32, xi: f64) -> f64 {
        phi_radial(2f64.powi(k) * xi) - phi_radial(2f64.powi(k + 1) * xi)
    }

    /// Equal to one on `0.3 * 2^{-k} <= |xi| <= 2^{1-k}`, which contains the
    /// support of `beta_k`.
    pub fn beta_tilde(k: i32, xi: f64) -> f64 {
        phi_radial(2f64.powi(k - 1) * xi) * (1.0 - phi_radial(2f64.powi(k + 2) * xi))
    }

    pub fn symbol(which: LpOperator, k: i32, xi: f64) -> f64 {
        match which {
            LpOperator::V => Self::v_symbol(k, xi),
            LpOperator::Lambda => Self::beta(k, xi),
            LpOperator::LambdaTilde => Self::beta_tilde(k, xi),
        }
    }

    /// Smallest `k` whose low-pass symbol is identically one on the grid's
    /// frequency lattice; `V_m + sum_{k_min <= k < m} Lambda_k = I` there.
    pub fn k_min(spec: &GridSpec) -> i32 {
        let xi_max = (spec.d as f64).sqrt() * std::f64::consts::PI / spec.h();
        (-(xi_max.log2())).floor() as i32
    }
}

pub fn apply_lp(which: LpOperator, k: i32, f: &GridFunction) -> GridFunction {
    multiply_symbol(f, |xi| {
        let r = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
        LpFamily::symbol(which, k, r)
    })
}

/// `P_m f = Phi_m * f`, with the grid mollifier normalized to unit mass.
pub fn apply_pm(m: i32, f: &GridFunction) -> Result<GridFunction> {
    let phi = mollifier_grid(f.spec(), m)?;
    convolve(f, &phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{norm, Norm};
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(spec: GridSpec, seed: u64) -> GridFunction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        GridFunction::new(
            spec,
            (0..spec.len()).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect(),
        )
        .unwrap()
    }

    fn plane_wave(spec: GridSpec, k: [i64; 2]) -> GridFunction {
        let w = 2.0 * std::f64::consts::PI / spec.side;
        GridFunction::new(
            spec,
            (0..spec.len())
                .map(|i| {
                    let x = spec.coord(i);
                    Complex64::from_polar(1.0, w * (k[0] as f64 * x[0] + k[1] as f64 * x[1]))
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn sector_is_contractive() {
        let s = GridSpec::unit_cells(2, 32).unwrap();
        let f = random(s, 1);
        let m = SectorMultiplier::new(8, 0.9, &[0.6, 0.8], WidthPower::Two).unwrap();
        let out = norm(&apply_sector(&m, &f).unwrap(), Norm::L2);
        assert!(out < 0.9 * norm(&f, Norm::L2));
    }

    #[test]
    fn sector_passes_orthogonal_and_kills_parallel_waves() {
        let s = GridSpec::unit_cells(2, 32).unwrap();
        let m = SectorMultiplier::new(2, 0.5, &[1.0, 0.0], WidthPower::Two).unwrap();
        let orth = plane_wave(s, [0, 3]);
        assert!(apply_sector(&m, &orth).unwrap().max_abs_diff(&orth) < 1e-12);
        // 2^{7.2} / 64 > 1, so phi vanishes on the axis of nu
        let killer = SectorMultiplier { n: 8, gamma: 0.9, ..m };
        assert!(killer.dilation() > 1.0);
        let par = plane_wave(s, [3, 0]);
        assert!(norm(&apply_sector(&killer, &par).unwrap(), Norm::Linf) < 1e-12);
    }

    #[test]
    fn overlap_of_single_direction_is_at_most_one() {
        let net = DirectionNet::from_directions(2, 4, 0.5, &[vec![1.0, 0.0]]).unwrap();
        let samples = super::super::net::sphere_candidates(2, 1000);
        assert!(overlap_count(&net, WidthPower::Five, &samples) <= 1.0);
    }

    #[test]
    fn lp_symbols() {
        for k in -3..3 {
            for i in 0..2000 {
                let xi = i as f64 * 0.01 * 2f64.powi(-k);
                let b = LpFamily::beta(k, xi);
                let lo = 2f64.powi(-k - 1);
                let hi = 1.2 * 2f64.powi(-k);
                if xi < lo || xi > hi {
                    assert_eq!(b, 0.0);
                }
                assert!((b * LpFamily::beta_tilde(k, xi) - b).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn lp_telescoping_and_absorption() {
        let s = GridSpec::new(2, 64, 16.0).unwrap();
        let f = random(s, 2);
        let k_min = LpFamily::k_min(&s);
        let m = k_min + 6;
        let mut sum = apply_lp(LpOperator::V, m, &f);
        for k in k_min..m {
            sum = sum.add(&apply_lp(LpOperator::Lambda, k, &f)).unwrap();
            let lam = apply_lp(LpOperator::Lambda, k, &f);
            let both = apply_lp(LpOperator::Lambda, k, &apply_lp(LpOperator::LambdaTilde, k, &f));
            assert!(both.max_abs_diff(&lam) <= 1e-10);
        }
        assert!(sum.max_abs_diff(&f) <= 1e-10);
    }

    #[test]
    fn pm_preserves_constants() {
        let s = GridSpec::unit_cells(2, 64).unwrap();
        let c = GridFunction::constant(s, 2.5);
        assert!(apply_pm(3, &c).unwrap().max_abs_diff(&c) <= 1e-10);
        assert!(apply_pm(0, &c).is_err());
    }
}
