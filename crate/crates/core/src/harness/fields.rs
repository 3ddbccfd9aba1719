//! Bounded fields `a` for the commutator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CzError, Result};
use crate::grid::{GridFunction, GridSpec};

/// A field `a` with `||a||_inf <= 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AField {
    Constant {
        value: f64,
    },
    /// Independent signs on blocks of `block` cells per axis.
    RandomSigns {
        #[serde(default)]
        seed: u64,
        #[serde(default = "one")]
        block: usize,
    },
    /// Independent uniform values in `[-1, 1]`.
    RandomUniform {
        #[serde(default)]
        seed: u64,
    },
    /// `+-1` alternating on blocks of `period` cells per axis.
    Checkerboard {
        #[serde(default = "one")]
        period: usize,
    },
    /// `+1` on the double cone `|<x/|x|, direction>| >= cos(half_angle)`, `-1` elsewhere.
    PlantedSector {
        direction: Vec<f64>,
        half_angle: f64,
    },
    /// `cos(2 pi k x_1 / S)`.
    Cosine {
        k: i64,
    },
}

fn one() -> usize {
    1
}

impl Default for AField {
    fn default() -> Self {
        AField::Constant { value: 1.0 }
    }
}

impl AField {
    pub fn id(&self) -> &'static str {
        match self {
            AField::Constant { .. } => "constant",
            AField::RandomSigns { .. } => "random-signs",
            AField::RandomUniform { .. } => "random-uniform",
            AField::Checkerboard { .. } => "checkerboard",
            AField::PlantedSector { .. } => "planted-sector",
            AField::Cosine { .. } => "cosine",
        }
    }

    pub fn sample(&self, spec: &GridSpec) -> Result<GridFunction> {
        let d = spec.d;
        match self {
            AField::Constant { value } => {
                if value.abs() > 1.0 {
                    return Err(CzError::Parameter(format!("constant field {value} exceeds 1 in modulus")));
                }
                Ok(GridFunction::constant(*spec, *value))
            }
            AField::RandomSigns { seed, block } => {
                let block = (*block).max(1);
                let per = spec.n.div_ceil(block);
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let signs: Vec<f64> =
                    (0..per.pow(d as u32)).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect();
                let v = (0..spec.len())
                    .map(|i| {
                        let idx = spec.unravel(i);
                        let b = (0..d).fold(0, |acc, a| acc * per + idx[a] / block);
                        signs[b]
                    })
                    .collect();
                GridFunction::from_real(*spec, v)
            }
            AField::RandomUniform { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                GridFunction::from_real(*spec, (0..spec.len()).map(|_| rng.gen_range(-1.0..=1.0)).collect())
            }
            AField::Checkerboard { period } => {
                let p = (*period).max(1);
                let v = (0..spec.len())
                    .map(|i| {
                        let idx = spec.unravel(i);
                        let parity: usize = (0..d).map(|a| idx[a] / p).sum();
                        if parity % 2 == 0 {
                            1.0
                        } else {
                            -1.0
                        }
                    })
                    .collect();
                GridFunction::from_real(*spec, v)
            }
            AField::PlantedSector { direction, half_angle } => {
                if direction.len() != d {
                    return Err(CzError::Parameter(format!(
                        "planted-sector direction has {} components, grid has d = {d}",
                        direction.len()
                    )));
                }
                let r = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
                if r == 0.0 {
                    return Err(CzError::Parameter("planted-sector direction is zero".into()));
                }
                let c = half_angle.cos();
                Ok(GridFunction::from_fn(*spec, |x| {
                    let rx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                    if rx == 0.0 {
                        return 1.0;
                    }
                    let dot: f64 = x.iter().zip(direction).map(|(a, b)| a * b).sum::<f64>() / (rx * r);
                    if dot.abs() >= c {
                        1.0
                    } else {
                        -1.0
                    }
                }))
            }
            AField::Cosine { k } => {
                let w = 2.0 * std::f64::consts::PI * *k as f64 / spec.side;
                Ok(GridFunction::from_fn(*spec, |x| (w * x[0]).cos()))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{norm, Norm};

    #[test]
    fn fields_are_bounded_by_one() {
        let s = GridSpec::unit_cells(2, 16).unwrap();
        let fields = [
            AField::Constant { value: -0.5 },
            AField::RandomSigns { seed: 1, block: 2 },
            AField::RandomUniform { seed: 2 },
            AField::Checkerboard { period: 1 },
            AField::PlantedSector { direction: vec![1.0, 1.0], half_angle: 0.3 },
            AField::Cosine { k: 3 },
        ];
        for f in fields {
            let a = f.sample(&s).unwrap();
            assert!(norm(&a, Norm::Linf) <= 1.0, "{}", f.id());
        }
        assert!(AField::Constant { value: 2.0 }.sample(&s).is_err());
    }

    #[test]
    fn checkerboard_pattern() {
        let s = GridSpec::unit_cells(2, 8).unwrap();
        let a = AField::Checkerboard { period: 2 }.sample(&s).unwrap();
        assert_eq!(a.get(s.ravel(&[0, 0, 0])).re, 1.0);
        assert_eq!(a.get(s.ravel(&[1, 1, 0])).re, 1.0);
        assert_eq!(a.get(s.ravel(&[2, 0, 0])).re, -1.0);
    }

    #[test]
    fn toml_round_trip() {
        let f: AField = toml::from_str("kind = \"random-signs\"\nseed = 4\n").unwrap();
        assert_eq!(f, AField::RandomSigns { seed: 4, block: 1 });
        assert!(toml::from_str::<AField>("kind = \"random-signs\"\nbogus = 1\n").is_err());
    }
}
