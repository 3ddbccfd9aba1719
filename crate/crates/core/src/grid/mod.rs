//! Uniform periodic grids on a torus of side `S` in dimension 2 or 3.
//!
//! Layout: values are stored row-major with axis 0 slowest. Grid index `i`
//! along an axis sits at the physical coordinate `centered(i) * h`, where
//! `centered(i)` is the representative of `i mod N` in `[-N/2, N/2)`. The
//! origin is therefore index 0 and the same layout serves both for functions
//! of position and for convolution kernels indexed by displacement.
//!
//! Fourier normalization: the forward transform carries the cell measure,
//! `dft(f)(xi) = h^d * sum_x f(x) exp(-i <x, xi>)`, with frequencies
//! `xi = (2 pi / S) k`, `k` centered in `(-N/2, N/2]`. The inverse is
//! `f(x) = S^{-d} * sum_xi dft(f)(xi) exp(i <x, xi>)`, so Parseval reads
//! `norm(f, 2)^2 = S^{-d} * sum_xi |dft(f)(xi)|^2`.

mod fft;
pub mod io;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{CzError, Result};

pub use fft::{convolve, dft, idft, multiply_symbol};

/// Maximum supported dimension.
pub const MAX_DIM: usize = 3;

/// Multi-index with unused trailing axes set to zero.
pub type Index = [usize; MAX_DIM];

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GridSpec {
    pub d: usize,
    pub n: usize,
    pub side: f64,
}

impl GridSpec {
    pub fn new(d: usize, n: usize, side: f64) -> Result<Self> {
        if !(2..=3).contains(&d) {
            return Err(CzError::Domain(format!("dimension must be 2 or 3, got {d}")));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(CzError::Domain(format!("points per axis must be a power of two >= 8, got {n}")));
        }
        if !(side.is_finite() && side > 0.0) {
            return Err(CzError::Domain(format!("torus side must be positive, got {side}")));
        }
        Ok(GridSpec { d, n, side })
    }

    /// Grid with unit cell width (`S = N`), so dyadic levels coincide with
    /// physical dyadic scales.
    pub fn unit_cells(d: usize, n: usize) -> Result<Self> {
        Self::new(d, n, n as f64)
    }

    #[inline]
    pub fn h(&self) -> f64 {
        self.side / self.n as f64
    }

    #[inline]
    pub fn cell_measure(&self) -> f64 {
        self.h().powi(self.d as i32)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn volume(&self) -> f64 {
        self.side.powi(self.d as i32)
    }

    /// Representative of `i mod N` in `[-N/2, N/2)`.
    #[inline]
    pub fn centered(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64 % n;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Frequency representative of `k mod N` in `(-N/2, N/2]`.
    #[inline]
    pub fn freq_centered(&self, k: usize) -> i64 {
        let n = self.n as i64;
        let k = k as i64 % n;
        if k <= n / 2 {
            k
        } else {
            k - n
        }
    }

    #[inline]
    pub fn wrap(&self, i: i64) -> usize {
        i.rem_euclid(self.n as i64) as usize
    }

    #[inline]
    pub fn unravel(&self, mut flat: usize) -> Index {
        let mut idx = [0usize; MAX_DIM];
        for axis in (0..self.d).rev() {
            idx[axis] = flat % self.n;
            flat /= self.n;
        }
        idx
    }

    #[inline]
    pub fn ravel(&self, idx: &Index) -> usize {
        idx[..self.d].iter().fold(0, |acc, &i| acc * self.n + i)
    }

    /// Flat index of a signed multi-index after periodic wrapping.
    #[inline]
    pub fn ravel_signed(&self, idx: &[i64; MAX_DIM]) -> usize {
        idx[..self.d].iter().fold(0, |acc, &i| acc * self.n + self.wrap(i))
    }

    /// Centered integer offsets of a flat index.
    #[inline]
    pub fn centered_index(&self, flat: usize) -> [i64; MAX_DIM] {
        let idx = self.unravel(flat);
        let mut out = [0i64; MAX_DIM];
        for axis in 0..self.d {
            out[axis] = self.centered(idx[axis]);
        }
        out
    }

    /// Physical coordinate (minimal image) of a flat index.
    #[inline]
    pub fn coord(&self, flat: usize) -> [f64; MAX_DIM] {
        let c = self.centered_index(flat);
        let h = self.h();
        let mut out = [0.0; MAX_DIM];
        for axis in 0..self.d {
            out[axis] = c[axis] as f64 * h;
        }
        out
    }

    /// Angular frequency vector of a flat frequency index.
    #[inline]
    pub fn frequency(&self, flat: usize) -> [f64; MAX_DIM] {
        let idx = self.unravel(flat);
        let scale = 2.0 * std::f64::consts::PI / self.side;
        let mut out = [0.0; MAX_DIM];
        for axis in 0..self.d {
            out[axis] = self.freq_centered(idx[axis]) as f64 * scale;
        }
        out
    }

    /// Whether a flat index lies in the central quarter `[-S/4, S/4)^d`.
    pub fn in_central_quarter(&self, flat: usize) -> bool {
        let q = (self.n / 4) as i64;
        self.centered_index(flat)[..self.d].iter().all(|&c| -q <= c && c < q)
    }

    pub fn check_same(&self, other: &GridSpec) -> Result<()> {
        if self != other {
            return Err(CzError::GridMismatch(format!("{self:?} vs {other:?}")));
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn norm_d(x: &[f64; MAX_DIM], d: usize) -> f64 {
    x[..d].iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    L1,
    L2,
    Linf,
}

/// Complex samples on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    spec: GridSpec,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(spec: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(CzError::GridMismatch(format!("expected {} values, got {}", spec.len(), values.len())));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(CzError::Domain("grid values must be finite".into()));
        }
        Ok(GridFunction { spec, values })
    }

    pub(crate) fn from_vec_unchecked(spec: GridSpec, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), spec.len());
        GridFunction { spec, values }
    }

    pub fn zeros(spec: GridSpec) -> Self {
        GridFunction { spec, values: vec![Complex64::new(0.0, 0.0); spec.len()] }
    }

    pub fn constant(spec: GridSpec, c: f64) -> Self {
        GridFunction { spec, values: vec![Complex64::new(c, 0.0); spec.len()] }
    }

    pub fn from_real(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        Self::new(spec, values.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
    }

    /// Samples a real function of the (minimal image) physical coordinate.
    pub fn from_fn<F>(spec: GridSpec, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        let values = (0..spec.len())
            .into_par_iter()
            .map(|i| {
                let x = spec.coord(i);
                Complex64::new(f(&x[..spec.d]), 0.0)
            })
            .collect();
        GridFunction { spec, values }
    }

    /// Discrete delta at `flat` normalized to unit mass (`1/h^d`).
    pub fn delta(spec: GridSpec, flat: usize) -> Self {
        let mut g = Self::zeros(spec);
        g.values[flat] = Complex64::new(1.0 / spec.cell_measure(), 0.0);
        g
    }

    #[inline]
    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    #[inline]
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    #[inline]
    pub fn get(&self, flat: usize) -> Complex64 {
        self.values[flat]
    }

    pub fn re(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.values.iter().all(|v| v.im.abs() <= tol)
    }

    pub fn real_part(&self) -> Self {
        self.map(|v| Complex64::new(v.re, 0.0))
    }

    pub fn imag_part(&self) -> Self {
        self.map(|v| Complex64::new(v.im, 0.0))
    }

    pub fn map<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Self {
        GridFunction { spec: self.spec, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn abs(&self) -> Self {
        self.map(|v| Complex64::new(v.norm(), 0.0))
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| v * c)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn zip_with<F: Fn(Complex64, Complex64) -> Complex64>(&self, other: &Self, f: F) -> Result<Self> {
        self.spec.check_same(&other.spec)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(GridFunction { spec: self.spec, values })
    }

    pub fn norm(&self, p: Norm) -> f64 {
        norm(self, p)
    }

    /// Riemann-sum integral.
    pub fn integral(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() * self.spec.cell_measure()
    }

    /// Flat indices of nonzero samples.
    pub fn support(&self) -> Vec<usize> {
        (0..self.values.len()).filter(|&i| self.values[i] != Complex64::new(0.0, 0.0)).collect()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// `||self - other||_2 / ||other||_2` on the grid.
    pub fn rel_l2_diff(&self, other: &Self) -> f64 {
        let num: f64 = self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm_sqr()).sum();
        let den: f64 = other.values.iter().map(|b| b.norm_sqr()).sum();
        if den == 0.0 {
            num.sqrt()
        } else {
            (num / den).sqrt()
        }
    }
}

/// Riemann-sum norm with weight `h^d` for `p in {1, 2}`; max for `p = inf`.
pub fn norm(f: &GridFunction, p: Norm) -> f64 {
    let w = f.spec.cell_measure();
    match p {
        Norm::L1 => w * f.values.iter().map(|v| v.norm()).sum::<f64>(),
        Norm::L2 => (w * f.values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt(),
        Norm::Linf => f.values.iter().map(|v| v.norm()).fold(0.0, f64::max),
    }
}

/// Cell-counting measure of `{x : |f(x)| > lambda}`.
pub fn superlevel_measure(f: &GridFunction, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(CzError::Domain(format!("level must be positive, got {lambda}")));
    }
    let count = f.values.iter().filter(|v| v.norm() > lambda).count();
    Ok(count as f64 * f.spec.cell_measure())
}
