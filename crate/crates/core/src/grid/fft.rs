use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{FftDirection, FftPlanner};

use super::{GridFunction, GridSpec};
use crate::error::Result;

/// In-place unnormalized multidimensional FFT along every axis.
fn fft_nd(spec: &GridSpec, data: &mut [Complex64], direction: FftDirection) {
    let n = spec.n;
    let fft = FftPlanner::new().plan_fft(n, direction);
    for axis in 0..spec.d {
        let stride = n.pow((spec.d - 1 - axis) as u32);
        let block = stride * n;
        // each contiguous block of `block` values holds `stride` lines along `axis`
        data.par_chunks_mut(block).for_each(|chunk| {
            let mut line = vec![Complex64::new(0.0, 0.0); n];
            let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
            for offset in 0..stride {
                for (k, v) in line.iter_mut().enumerate() {
                    *v = chunk[offset + k * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (k, v) in line.iter().enumerate() {
                    chunk[offset + k * stride] = *v;
                }
            }
        });
    }
}

/// Forward transform with the `h^d` quadrature weight.
pub fn dft(f: &GridFunction) -> GridFunction {
    let spec = *f.spec();
    let mut data = f.values().to_vec();
    fft_nd(&spec, &mut data, FftDirection::Forward);
    let w = spec.cell_measure();
    data.iter_mut().for_each(|v| *v *= w);
    GridFunction::from_vec_unchecked(spec, data)
}

/// Inverse of [`dft`]: `f(x) = S^{-d} sum_xi F(xi) e^{i<x,xi>}`.
pub fn idft(fhat: &GridFunction) -> GridFunction {
    let spec = *fhat.spec();
    let mut data = fhat.values().to_vec();
    fft_nd(&spec, &mut data, FftDirection::Inverse);
    let w = 1.0 / spec.volume();
    data.iter_mut().for_each(|v| *v *= w);
    GridFunction::from_vec_unchecked(spec, data)
}

/// Periodic convolution `(f*g)(x) = h^d sum_y f(y) g(x-y)`.
pub fn convolve(f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    f.spec().check_same(g.spec())?;
    let prod = dft(f).mul(&dft(g))?;
    Ok(idft(&prod))
}

/// Fourier multiplier: `idft(symbol(xi) * dft(f))`, the symbol evaluated at
/// the angular frequency vector of each lattice point.
pub fn multiply_symbol<F>(f: &GridFunction, symbol: F) -> GridFunction
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let spec = *f.spec();
    let mut fhat = dft(f).into_values();
    fhat.par_iter_mut().enumerate().for_each(|(k, v)| {
        let xi = spec.frequency(k);
        *v *= symbol(&xi[..spec.d]);
    });
    idft(&GridFunction::from_vec_unchecked(spec, fhat))
}
