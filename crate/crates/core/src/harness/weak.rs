//! The weak-type functional `sup_lambda lambda |{|g| > lambda}| / ||f||_1`.

use serde::Serialize;

use crate::error::{CzError, Result};
use crate::grid::{norm, superlevel_measure, GridFunction, Norm};

pub const POINTS_PER_DECADE: usize = 40;
pub const DECADES: usize = 3;

/// Log-spaced levels from `top / 10^decades` to `top`, inclusive.
pub fn lambda_grid(top: f64, decades: usize, per_decade: usize) -> Result<Vec<f64>> {
    if !(top > 0.0) || !top.is_finite() {
        return Err(CzError::Domain(format!("top level must be positive and finite, got {top}")));
    }
    if per_decade == 0 {
        return Err(CzError::Parameter("need at least one level per decade".into()));
    }
    let count = decades * per_decade;
    Ok((0..=count).map(|i| top * 10f64.powf(i as f64 / per_decade as f64 - decades as f64)).collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct WeakTypeSample {
    pub lambda: f64,
    pub measure: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct WeakTypeProfile {
    pub f_l1: f64,
    pub samples: Vec<WeakTypeSample>,
    /// Largest `lambda |{|g| > lambda}| / ||f||_1` over the samples.
    pub ratio: f64,
    pub argmax_lambda: f64,
}

/// Evaluate the functional for `g = Tf` over the given levels.
pub fn weak_type_profile(g: &GridFunction, f_l1: f64, lambdas: &[f64]) -> Result<WeakTypeProfile> {
    if !(f_l1 > 0.0) {
        return Err(CzError::Domain(format!("input norm must be positive, got {f_l1}")));
    }
    let mut samples = Vec::with_capacity(lambdas.len());
    let (mut ratio, mut argmax_lambda) = (0.0, f64::NAN);
    for &lambda in lambdas {
        let measure = superlevel_measure(g, lambda)?;
        let value = lambda * measure / f_l1;
        if value > ratio || argmax_lambda.is_nan() {
            ratio = value;
            argmax_lambda = lambda;
        }
        samples.push(WeakTypeSample { lambda, measure, value });
    }
    Ok(WeakTypeProfile { f_l1, samples, ratio, argmax_lambda })
}

/// Apply `op` to `f` and scan `[max|Tf| / 10^3, max|Tf|]` with 40 levels per decade.
pub fn weak_type_ratio<F>(op: F, f: &GridFunction) -> Result<WeakTypeProfile>
where
    F: FnOnce(&GridFunction) -> Result<GridFunction>,
{
    let g = op(f)?;
    let top = norm(&g, Norm::Linf);
    if top == 0.0 {
        return Err(CzError::Domain("operator output vanishes identically".into()));
    }
    let lambdas = lambda_grid(top, DECADES, POINTS_PER_DECADE)?;
    weak_type_profile(&g, norm(f, Norm::L1), &lambdas)
}
