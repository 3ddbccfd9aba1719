//! Tube majorants `H_j^{n,nu} = 2^{-jd} 1_tau`.

use crate::error::{CzError, Result};
use crate::grid::{GridFunction, GridSpec};

/// Half-length `2^{j+2}` and radius `2^{j+2-gamma n}` of the tube.
pub fn tube_dimensions(j: i32, n: u32, gamma: f64) -> (f64, f64) {
    let half = 2f64.powi(j + 2);
    (half, half * 2f64.powf(-gamma * n as f64))
}

/// Whether `x` lies in `{|<x,nu>| <= 2^{j+2}, |x - <x,nu> nu| <= 2^{j+2-gamma n}}`.
pub fn in_tube(x: &[f64], nu: &[f64], j: i32, n: u32, gamma: f64) -> bool {
    let (half, radius) = tube_dimensions(j, n, gamma);
    let along: f64 = x.iter().zip(nu).map(|(a, b)| a * b).sum();
    let perp2: f64 = x.iter().zip(nu).map(|(a, b)| (a - along * b).powi(2)).sum();
    along.abs() <= half && perp2 <= radius * radius
}

/// `2^{-jd}` times the indicator of the tube around `nu`, centered at the origin.
pub fn tube_majorant(j: i32, n: u32, gamma: f64, nu: &[f64], spec: &GridSpec) -> Result<GridFunction> {
    if nu.len() != spec.d {
        return Err(CzError::Parameter("direction and grid dimensions differ".into()));
    }
    let (half, radius) = tube_dimensions(j, n, gamma);
    for (a, &c) in nu.iter().enumerate() {
        let extent = half * c.abs() + radius * (1.0 - c * c).max(0.0).sqrt();
        if extent >= spec.side / 2.0 {
            return Err(CzError::Scale(format!(
                "tube (half-length {half}, radius {radius}) does not fit a torus of side {} along axis {a}",
                spec.side
            )));
        }
    }
    let height = 2f64.powi(-j * spec.d as i32);
    Ok(GridFunction::from_fn(*spec, |x| if in_tube(x, nu, j, n, gamma) { height } else { 0.0 }))
}

/// `2^{-jd} * 2 * 2^{j+2} * (2 * 2^{j+2-gamma n})^{d-1}`.
pub fn tube_l1_estimate(j: i32, n: u32, gamma: f64, d: usize) -> f64 {
    let (half, radius) = tube_dimensions(j, n, gamma);
    2f64.powi(-j * d as i32) * 2.0 * half * (2.0 * radius).powi(d as i32 - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{norm, Norm};

    #[test]
    fn l1_norm_matches_arithmetic() {
        let s = GridSpec::unit_cells(2, 128).unwrap();
        for (j, n, gamma) in [(2, 4, 0.5), (3, 6, 0.3), (3, 5, 0.12)] {
            let h = tube_majorant(j, n, gamma, &[0.6, 0.8], &s).unwrap();
            let ratio = norm(&h, Norm::L1) / tube_l1_estimate(j, n, gamma, 2);
            assert!((0.5..=2.0).contains(&ratio), "{ratio}");
        }
        assert!(tube_majorant(4, 4, 0.5, &[1.0, 0.0], &s).is_err());
    }

    #[test]
    fn quarter_turn_permutes_the_tube() {
        let s = GridSpec::unit_cells(2, 64).unwrap();
        let a = tube_majorant(2, 4, 0.4, &[0.8, 0.6], &s).unwrap();
        let b = tube_majorant(2, 4, 0.4, &[-0.6, 0.8], &s).unwrap();
        for i in 0..s.len() {
            let c = s.centered_index(i);
            // (x, y) -> (-y, x)
            let rotated = s.ravel_signed(&[-c[1], c[0], 0]);
            if c[0] > -32 && c[1] > -32 {
                assert_eq!(a.get(i), b.get(rotated));
            }
        }
    }
}
