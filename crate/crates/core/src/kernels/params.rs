//! Integer parameters `n(eps)`, `l(n)` and `l_eps(n)`.

use crate::error::{CzError, Result};

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(CzError::Domain(format!("eps must lie in (0, 1], got {eps}")));
    }
    Ok(())
}

fn check_n(n: u32) -> Result<()> {
    if n < 2 {
        return Err(CzError::Domain(format!("n must be at least 2, got {n}")));
    }
    Ok(())
}

/// `ceil(1e10 * d / eps * log2(2 / eps))`.
pub fn n_of_eps(eps: f64, d: usize) -> Result<u64> {
    check_eps(eps)?;
    let v = 1e10 * d as f64 / eps * (2.0 / eps).log2();
    // absorb rounding noise before taking the ceiling
    let r = v.round();
    Ok(if (v - r).abs() <= 1e-6 * v.abs().max(1.0) { r as u64 } else { v.ceil() as u64 })
}

/// `floor(2 log2 n) + 2`.
pub fn ell(n: u32) -> Result<i32> {
    check_n(n)?;
    Ok(floor_tolerant(2.0 * (n as f64).log2()) + 2)
}

/// `floor(2 log2(n) / eps) + 2`.
pub fn ell_eps(n: u32, eps: f64) -> Result<i32> {
    check_n(n)?;
    check_eps(eps)?;
    Ok(floor_tolerant(2.0 * (n as f64).log2() / eps) + 2)
}

// exact powers of two must not drop below an integer through rounding
fn floor_tolerant(v: f64) -> i32 {
    (v + 1e-12).floor() as i32
}
