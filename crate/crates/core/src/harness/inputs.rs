//! Adversarial inputs `f`, normalized to `||f||_1 = 1` and supported in the
//! central quarter of the torus.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::czd::DyadicCube;
use crate::error::{CzError, Result};
use crate::grid::{norm, GridFunction, GridSpec, Norm, MAX_DIM};
use crate::kernels::bump_profile;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InputFamily {
    /// Mean-zero atom on the dyadic cube of the given level at the origin.
    SingleBump { level: u32 },
    /// Disjoint mean-zero atoms on random dyadic cubes, spread out so that
    /// every ancestor of a planted cube has average below the planted level.
    MultiScale {
        count: usize,
        min_level: u32,
        max_level: u32,
        #[serde(default)]
        seed: u64,
    },
    /// Single-cell spikes with random signs.
    Spikes {
        count: usize,
        #[serde(default)]
        seed: u64,
    },
    /// Random signs on a lattice of the given spacing in cells.
    SignLattice {
        spacing: usize,
        #[serde(default)]
        seed: u64,
    },
    /// Smooth radial bump of physical radius `radius` at the origin.
    Bump { radius: f64 },
}

impl Default for InputFamily {
    fn default() -> Self {
        InputFamily::Spikes { count: 4, seed: 0 }
    }
}

#[derive(Debug, Clone)]
pub struct GeneratedInput {
    pub f: GridFunction,
    /// Cubes a Calderon-Zygmund decomposition at `lambda_hint` should select.
    pub planted: Vec<DyadicCube>,
    pub lambda_hint: Option<f64>,
}

impl InputFamily {
    pub fn id(&self) -> &'static str {
        match self {
            InputFamily::SingleBump { .. } => "single-bump",
            InputFamily::MultiScale { .. } => "multi-scale",
            InputFamily::Spikes { .. } => "spikes",
            InputFamily::SignLattice { .. } => "sign-lattice",
            InputFamily::Bump { .. } => "bump",
        }
    }
}

fn quarter_levels(spec: &GridSpec) -> Result<u32> {
    if spec.n < 8 {
        return Err(CzError::Scale(format!("grid N = {} has no room for inputs", spec.n)));
    }
    Ok((spec.n / 4).trailing_zeros())
}

/// Corner coordinates inside the central quarter, i.e. in `[0, N/4) u [3N/4, N)`.
fn quarter_offset(spec: &GridSpec, k: usize) -> usize {
    let q = spec.n / 4;
    if k < q {
        k
    } else {
        spec.n - 2 * q + k
    }
}

/// `+1` on the lower half of the cube along axis 0, `-1` on the upper half.
fn split_atom(spec: &GridSpec, cube: &DyadicCube, amplitude: f64, out: &mut [f64]) {
    let half = cube.side_cells() / 2;
    for flat in cube.cells(spec) {
        let idx = spec.unravel(flat);
        out[flat] = if idx[0] - cube.corner[0] < half { amplitude } else { -amplitude };
    }
}

fn normalize(spec: &GridSpec, v: Vec<f64>) -> Result<(GridFunction, f64)> {
    let f = GridFunction::from_real(*spec, v)?;
    let l1 = norm(&f, Norm::L1);
    if l1 == 0.0 {
        return Err(CzError::Parameter("generated input vanishes identically".into()));
    }
    Ok((f.scale(1.0 / l1), l1))
}

pub fn generate_input(family: &InputFamily, spec: &GridSpec) -> Result<GeneratedInput> {
    let d = spec.d;
    let top = quarter_levels(spec)?;
    let mut v = vec![0.0; spec.len()];
    match family {
        InputFamily::SingleBump { level } => {
            if *level == 0 || *level > top {
                return Err(CzError::Scale(format!("bump level {level} outside 1..={top}")));
            }
            let cube = DyadicCube { level: *level, corner: [0; MAX_DIM] };
            split_atom(spec, &cube, 1.0, &mut v);
            let (f, _) = normalize(spec, v)?;
            // average of |f| on the cube is 1/|Q| after normalization
            let avg = 1.0 / cube.measure(spec);
            Ok(GeneratedInput { f, planted: vec![cube], lambda_hint: Some(0.5 * avg) })
        }
        InputFamily::MultiScale { count, min_level, max_level, seed } => {
            if min_level > max_level || *min_level == 0 || *max_level > top {
                return Err(CzError::Scale(format!("levels {min_level}..={max_level} outside 1..={top}")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut planted: Vec<DyadicCube> = Vec::new();
            let mut attempts = 0;
            while planted.len() < *count && attempts < 10_000 {
                attempts += 1;
                let level = rng.gen_range(*min_level..=*max_level);
                let per = (spec.n / 4) >> level;
                let mut corner = [0; MAX_DIM];
                for c in corner.iter_mut().take(d) {
                    *c = quarter_offset(spec, rng.gen_range(0..2 * per) << level);
                }
                let cube = DyadicCube { level, corner };
                if accepts(spec, &planted, &cube) {
                    planted.push(cube);
                }
            }
            if planted.len() < *count {
                return Err(CzError::Parameter(format!(
                    "could only place {} of {count} separated cubes",
                    planted.len()
                )));
            }
            // every planted cube carries the same average |f| = 2 before scaling
            for q in &planted {
                split_atom(spec, q, 2.0, &mut v);
            }
            let (f, l1) = normalize(spec, v)?;
            Ok(GeneratedInput { f, planted, lambda_hint: Some(1.0 / l1) })
        }
        InputFamily::Spikes { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let q = spec.n / 4;
            for _ in 0..*count {
                let mut idx = [0; MAX_DIM];
                for c in idx.iter_mut().take(d) {
                    *c = quarter_offset(spec, rng.gen_range(0..2 * q));
                }
                v[spec.ravel(&idx)] = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            }
            let (f, _) = normalize(spec, v)?;
            Ok(GeneratedInput { f, planted: Vec::new(), lambda_hint: None })
        }
        InputFamily::SignLattice { spacing, seed } => {
            if *spacing == 0 {
                return Err(CzError::Parameter("lattice spacing must be positive".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            for flat in 0..spec.len() {
                if !spec.in_central_quarter(flat) {
                    continue;
                }
                let c = spec.centered_index(flat);
                if c[..d].iter().all(|&x| x.rem_euclid(*spacing as i64) == 0) {
                    v[flat] = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                }
            }
            let (f, _) = normalize(spec, v)?;
            Ok(GeneratedInput { f, planted: Vec::new(), lambda_hint: None })
        }
        InputFamily::Bump { radius } => {
            let q = (spec.n / 4) as f64 * spec.h();
            if !(*radius >= 0.5 * spec.h()) || *radius >= q {
                return Err(CzError::Scale(format!(
                    "bump radius {radius} outside [h/2, S/4) = [{}, {q})",
                    0.5 * spec.h()
                )));
            }
            for (flat, val) in v.iter_mut().enumerate() {
                let x = spec.coord(flat);
                let r = x[..d].iter().map(|c| c * c).sum::<f64>().sqrt();
                *val = bump_profile(r / radius);
            }
            if v.iter().all(|&x| x == 0.0) {
                v[0] = 1.0;
            }
            let (f, _) = normalize(spec, v)?;
            Ok(GeneratedInput { f, planted: Vec::new(), lambda_hint: None })
        }
    }
}

/// Disjoint from the placed cubes, and every ancestor stays at most a
/// `2^-d` fraction covered.
fn accepts(spec: &GridSpec, placed: &[DyadicCube], cube: &DyadicCube) -> bool {
    let d = spec.d;
    let overlaps = |a: &DyadicCube, b: &DyadicCube| {
        (0..d).all(|k| a.corner[k] < b.corner[k] + b.side_cells() && b.corner[k] < a.corner[k] + a.side_cells())
    };
    if placed.iter().any(|p| overlaps(p, cube)) {
        return false;
    }
    let root = DyadicCube::root(spec).level;
    let mut anc = cube.parent(d);
    while anc.level <= root {
        let covered: usize =
            placed.iter().chain(std::iter::once(cube)).filter(|p| overlaps(p, &anc)).map(|p| p.cell_count(d)).sum();
        if covered * (1 << d) > anc.cell_count(d) {
            return false;
        }
        if anc.level == root {
            break;
        }
        anc = anc.parent(d);
    }
    true
}
