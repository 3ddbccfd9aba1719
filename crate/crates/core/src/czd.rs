//! Dyadic cubes and the Calderon-Zygmund decomposition at height `lambda`.
//!
//! Cubes live on the index lattice of the grid: a cube of level `m` spans
//! `2^m` cells per axis, so its sidelength is `2^m h`. The root cube is the
//! whole torus.

use std::collections::BTreeMap;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CzError, Result};
use crate::grid::{norm, GridFunction, GridSpec, Index, Norm, MAX_DIM};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DyadicCube {
    pub level: u32,
    /// Lowest cell index on each axis.
    pub corner: Index,
}

impl DyadicCube {
    pub fn root(spec: &GridSpec) -> Self {
        DyadicCube { level: spec.n.trailing_zeros(), corner: [0; MAX_DIM] }
    }

    pub fn side_cells(&self) -> usize {
        1 << self.level
    }

    pub fn side(&self, spec: &GridSpec) -> f64 {
        self.side_cells() as f64 * spec.h()
    }

    pub fn measure(&self, spec: &GridSpec) -> f64 {
        self.side(spec).powi(spec.d as i32)
    }

    pub fn cell_count(&self, d: usize) -> usize {
        self.side_cells().pow(d as u32)
    }

    /// Center in torus coordinates, wrapped to the centered range.
    pub fn center(&self, spec: &GridSpec) -> [f64; MAX_DIM] {
        let mut c = [0.0; MAX_DIM];
        let half = 0.5 * (self.side_cells() as f64 - 1.0);
        for (a, ca) in c.iter_mut().enumerate().take(spec.d) {
            let mut v = self.corner[a] as f64 + half;
            if v >= spec.n as f64 / 2.0 {
                v -= spec.n as f64;
            }
            *ca = v * spec.h();
        }
        c
    }

    pub fn contains(&self, idx: &Index, d: usize) -> bool {
        (0..d).all(|a| idx[a] >= self.corner[a] && idx[a] < self.corner[a] + self.side_cells())
    }

    pub fn parent(&self, d: usize) -> Self {
        let mut corner = [0; MAX_DIM];
        let side = self.side_cells() << 1;
        for a in 0..d {
            corner[a] = self.corner[a] / side * side;
        }
        DyadicCube { level: self.level + 1, corner }
    }

    pub fn children(&self, d: usize) -> Vec<Self> {
        assert!(self.level > 0, "a single cell has no children");
        let half = self.side_cells() / 2;
        (0..1usize << d)
            .map(|bits| {
                let mut corner = self.corner;
                for a in 0..d {
                    if bits >> a & 1 == 1 {
                        corner[a] += half;
                    }
                }
                DyadicCube { level: self.level - 1, corner }
            })
            .collect()
    }

    /// Flat indices of the cells of the cube, in row-major order.
    pub fn cells(&self, spec: &GridSpec) -> Vec<usize> {
        let s = self.side_cells();
        let d = spec.d;
        (0..self.cell_count(d))
            .map(|k| {
                let mut idx = self.corner;
                let mut rem = k;
                for a in (0..d).rev() {
                    idx[a] += rem % s;
                    rem /= s;
                }
                spec.ravel(&idx)
            })
            .collect()
    }
}

/// One bad atom `b_Q = (f - avg_Q f) 1_Q`, stored on the cells of `Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub cube: DyadicCube,
    pub mean: f64,
    /// Values on `cube.cells(spec)`, in the same order.
    pub values: Vec<f64>,
}

impl Atom {
    pub fn to_grid(&self, spec: &GridSpec) -> GridFunction {
        let mut out = vec![Complex64::new(0.0, 0.0); spec.len()];
        for (flat, v) in self.cube.cells(spec).into_iter().zip(&self.values) {
            out[flat] = Complex64::new(*v, 0.0);
        }
        GridFunction::from_vec_unchecked(*spec, out)
    }

    pub fn l1(&self, spec: &GridSpec) -> f64 {
        self.values.iter().map(|v| v.abs()).sum::<f64>() * spec.cell_measure()
    }

    pub fn integral(&self, spec: &GridSpec) -> f64 {
        self.values.iter().sum::<f64>() * spec.cell_measure()
    }
}

#[derive(Debug, Clone)]
pub struct CZDecomposition {
    pub lambda: f64,
    pub dilate: u32,
    pub good: GridFunction,
    pub atoms: Vec<Atom>,
}

/// Sums of `f` and `|f|` over every dyadic cube, level by level.
struct Pyramid {
    d: usize,
    /// `sums[k]` and `abs_sums[k]` are indexed by cube coordinates at level `k`.
    sums: Vec<Vec<f64>>,
    abs_sums: Vec<Vec<f64>>,
}

impl Pyramid {
    fn build(spec: &GridSpec, values: &[f64]) -> Self {
        let d = spec.d;
        let levels = spec.n.trailing_zeros() as usize;
        let mut sums = vec![values.to_vec()];
        let mut abs_sums = vec![values.iter().map(|v| v.abs()).collect::<Vec<_>>()];
        for k in 0..levels {
            let fine = spec.n >> k;
            let coarse = fine / 2;
            let count = coarse.pow(d as u32);
            let mut s = vec![0.0; count];
            let mut sa = vec![0.0; count];
            for (c, (sc, sac)) in s.iter_mut().zip(sa.iter_mut()).enumerate() {
                let cc = unravel(c, coarse, d);
                for bits in 0..1usize << d {
                    let mut child = [0; MAX_DIM];
                    for a in 0..d {
                        child[a] = 2 * cc[a] + (bits >> a & 1);
                    }
                    let fi = ravel(&child, fine, d);
                    *sc += sums[k][fi];
                    *sac += abs_sums[k][fi];
                }
            }
            sums.push(s);
            abs_sums.push(sa);
        }
        Pyramid { d, sums, abs_sums }
    }

    fn position(&self, q: &DyadicCube, n: usize) -> usize {
        let mut c = [0; MAX_DIM];
        for a in 0..self.d {
            c[a] = q.corner[a] >> q.level;
        }
        ravel(&c, n >> q.level, self.d)
    }
}

fn unravel(mut flat: usize, n: usize, d: usize) -> Index {
    let mut idx = [0; MAX_DIM];
    for a in (0..d).rev() {
        idx[a] = flat % n;
        flat /= n;
    }
    idx
}

fn ravel(idx: &Index, n: usize, d: usize) -> usize {
    (0..d).fold(0, |acc, a| acc * n + idx[a])
}

/// Stopping-time decomposition of a real grid function: descend from the
/// whole torus and select the maximal dyadic cubes on which the average of
/// `|f|` exceeds `lambda`.
pub fn cz_decompose(f: &GridFunction, lambda: f64, dilate: u32) -> Result<CZDecomposition> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(CzError::Domain(format!("height must be positive, got {lambda}")));
    }
    if !f.is_real(0.0) {
        return Err(CzError::Domain(
            "decomposition expects a real function; split complex input with cz_decompose_complex".into(),
        ));
    }
    let spec = *f.spec();
    let values = f.re();
    let pyramid = Pyramid::build(&spec, &values);
    let mut good = values.clone();
    let mut atoms = Vec::new();
    let mut stack = vec![DyadicCube::root(&spec)];
    while let Some(q) = stack.pop() {
        let pos = pyramid.position(&q, spec.n);
        let cells = q.cell_count(spec.d) as f64;
        let abs_avg = pyramid.abs_sums[q.level as usize][pos] / cells;
        if abs_avg > lambda {
            let mean = pyramid.sums[q.level as usize][pos] / cells;
            let flats = q.cells(&spec);
            let atom_values = flats.iter().map(|&i| values[i] - mean).collect();
            for &i in &flats {
                good[i] = mean;
            }
            atoms.push(Atom { cube: q, mean, values: atom_values });
        } else if q.level > 0 {
            stack.extend(q.children(spec.d));
        }
    }
    atoms.sort_by(|a, b| a.cube.cmp(&b.cube));
    Ok(CZDecomposition { lambda, dilate, good: GridFunction::from_real(spec, good)?, atoms })
}

/// Decomposes real and imaginary parts independently.
pub fn cz_decompose_complex(f: &GridFunction, lambda: f64, dilate: u32) -> Result<(CZDecomposition, CZDecomposition)> {
    let spec = *f.spec();
    let re = GridFunction::from_real(spec, f.re())?;
    let im = GridFunction::from_real(spec, f.imag_part().re())?;
    Ok((cz_decompose(&re, lambda, dilate)?, cz_decompose(&im, lambda, dilate)?))
}

/// Union of the dilated cubes `Q*` and its measure.
#[derive(Debug, Clone, PartialEq)]
pub struct ExceptionalSet {
    pub mask: Vec<bool>,
    pub measure: f64,
}

impl ExceptionalSet {
    pub fn contains(&self, flat: usize) -> bool {
        self.mask[flat]
    }
}

impl CZDecomposition {
    pub fn spec(&self) -> &GridSpec {
        self.good.spec()
    }

    pub fn bad_part(&self) -> GridFunction {
        let spec = *self.spec();
        let mut out = vec![Complex64::new(0.0, 0.0); spec.len()];
        for atom in &self.atoms {
            for (flat, v) in atom.cube.cells(&spec).into_iter().zip(&atom.values) {
                out[flat] += *v;
            }
        }
        GridFunction::from_vec_unchecked(spec, out)
    }

    pub fn total_cube_measure(&self) -> f64 {
        self.atoms.iter().map(|a| a.cube.measure(self.spec())).sum()
    }

    /// Whether the root itself was selected.
    pub fn root_saturated(&self) -> bool {
        self.atoms.len() == 1 && self.atoms[0].cube == DyadicCube::root(self.spec())
    }

    pub fn levels(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.atoms.iter().map(|a| a.cube.level).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Checks the decomposition invariants against the input `f`.
    pub fn check(&self, f: &GridFunction) -> Result<CzdCheck> {
        self.spec().check_same(f.spec())?;
        let spec = *self.spec();
        let d = spec.d as i32;
        let lambda = self.lambda;
        let reconstruction_error =
            f.sub(&self.good.add(&self.bad_part())?)?.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        let f_l1 = norm(f, Norm::L1);
        let good_linf = norm(&self.good, Norm::Linf);
        let good_l1 = norm(&self.good, Norm::L1);
        let cube_measure = self.total_cube_measure();
        let max_atom_mean =
            self.atoms.iter().map(|a| (a.integral(&spec) / a.cube.measure(&spec)).abs()).fold(0.0, f64::max);
        let atom_ratio = self
            .atoms
            .iter()
            .filter(|a| a.cube != DyadicCube::root(&spec))
            .map(|a| a.l1(&spec) / (lambda * a.cube.measure(&spec)))
            .fold(0.0, f64::max);
        let max_abs = norm(f, Norm::Linf).max(1.0);
        let tol = 1e-12 * max_abs;
        let disjoint = pairwise_disjoint(&self.atoms, spec.d);
        let mut failures = Vec::new();
        if reconstruction_error > tol {
            failures.push(format!("f != g + sum b_Q (max error {reconstruction_error:e})"));
        }
        if !self.root_saturated() && good_linf > 2f64.powi(d) * lambda * (1.0 + 1e-12) {
            failures.push(format!("||g||_inf = {good_linf} exceeds 2^d lambda"));
        }
        if good_l1 > (f_l1 + lambda * cube_measure) * (1.0 + 1e-12) {
            failures.push(format!("||g||_1 = {good_l1} exceeds ||f||_1 + lambda sum|Q|"));
        }
        if max_atom_mean > tol {
            failures.push(format!("atom mean {max_atom_mean:e} is not zero"));
        }
        if atom_ratio > 2f64.powi(d + 1) * (1.0 + 1e-12) {
            failures.push(format!("||b_Q||_1 / (lambda |Q|) = {atom_ratio} exceeds 2^(d+1)"));
        }
        if !self.root_saturated() && cube_measure > 2f64.powi(d) * f_l1 / lambda * (1.0 + 1e-12) {
            failures.push(format!("sum |Q| = {cube_measure} exceeds 2^d ||f||_1 / lambda"));
        }
        if !disjoint {
            failures.push("selected cubes overlap".into());
        }
        Ok(CzdCheck {
            reconstruction_error,
            good_linf,
            good_l1,
            f_l1,
            cube_measure,
            max_atom_mean,
            max_atom_ratio: atom_ratio,
            disjoint,
            failures,
        })
    }

    /// Structured certificate: height, cubes, per-atom norms and `meas(E)`.
    pub fn certificate(&self) -> Certificate {
        let spec = *self.spec();
        let e = exceptional_set(self);
        Certificate {
            lambda: self.lambda,
            dilate: self.dilate,
            grid: spec,
            exceptional_measure: e.measure,
            cubes: self
                .atoms
                .iter()
                .map(|a| CertificateCube {
                    level: a.cube.level,
                    corner: a.cube.corner[..spec.d].to_vec(),
                    atom_l1: a.l1(&spec),
                })
                .collect(),
        }
    }

    pub fn write_certificate<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer_pretty(out, &self.certificate())?;
        Ok(())
    }
}

fn pairwise_disjoint(atoms: &[Atom], d: usize) -> bool {
    // cubes of a dyadic tree are either nested or disjoint: check ancestry
    let set: std::collections::HashSet<DyadicCube> = atoms.iter().map(|a| a.cube).collect();
    if set.len() != atoms.len() {
        return false;
    }
    let top = atoms.iter().map(|a| a.cube.level).max().unwrap_or(0);
    atoms.iter().all(|a| {
        let mut q = a.cube;
        while q.level < top {
            q = q.parent(d);
            if set.contains(&q) {
                return false;
            }
        }
        true
    })
}

/// Measured quantities behind the decomposition invariants.
#[derive(Debug, Clone, Serialize)]
pub struct CzdCheck {
    pub reconstruction_error: f64,
    pub good_linf: f64,
    pub good_l1: f64,
    pub f_l1: f64,
    pub cube_measure: f64,
    pub max_atom_mean: f64,
    pub max_atom_ratio: f64,
    pub disjoint: bool,
    pub failures: Vec<String>,
}

impl CzdCheck {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateCube {
    pub level: u32,
    pub corner: Vec<usize>,
    pub atom_l1: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Certificate {
    pub lambda: f64,
    pub dilate: u32,
    pub grid: GridSpec,
    pub exceptional_measure: f64,
    pub cubes: Vec<CertificateCube>,
}

/// `B_m`: the sum of the atoms whose cube has level `m`.
pub fn group_by_level(dec: &CZDecomposition, m: u32) -> GridFunction {
    let spec = *dec.spec();
    let mut out = vec![Complex64::new(0.0, 0.0); spec.len()];
    for atom in dec.atoms.iter().filter(|a| a.cube.level == m) {
        for (flat, v) in atom.cube.cells(&spec).into_iter().zip(&atom.values) {
            out[flat] += *v;
        }
    }
    GridFunction::from_vec_unchecked(spec, out)
}

/// All nonzero groups `B_m`, keyed by level.
pub fn groups(dec: &CZDecomposition) -> BTreeMap<u32, GridFunction> {
    dec.levels().into_iter().map(|m| (m, group_by_level(dec, m))).collect()
}

/// `E`: the union of the cubes dilated by `2^D` about their centers.
pub fn exceptional_set(dec: &CZDecomposition) -> ExceptionalSet {
    let spec = *dec.spec();
    let d = spec.d;
    let n = spec.n as i64;
    let mut mask = vec![false; spec.len()];
    for atom in &dec.atoms {
        let s = atom.cube.side_cells() as i64;
        let wide = s << dec.dilate;
        // per axis, the cells whose centers fall in [c - wide/2, c + wide/2)
        let ranges: Vec<Vec<usize>> = (0..d)
            .map(|a| {
                if wide >= n {
                    return (0..spec.n).collect();
                }
                // doubled coordinates avoid half-integers
                let c2 = 2 * atom.cube.corner[a] as i64 + s;
                let lo2 = c2 - wide;
                let first = (lo2 - 1).div_euclid(2) + 1;
                (first..first + wide).map(|i| i.rem_euclid(n) as usize).collect()
            })
            .collect();
        let mut counter = vec![0usize; d];
        loop {
            let mut idx = [0; MAX_DIM];
            for a in 0..d {
                idx[a] = ranges[a][counter[a]];
            }
            mask[spec.ravel(&idx)] = true;
            let mut a = d;
            loop {
                if a == 0 {
                    break;
                }
                a -= 1;
                counter[a] += 1;
                if counter[a] < ranges[a].len() {
                    break;
                }
                counter[a] = 0;
                if a == 0 {
                    a = usize::MAX;
                    break;
                }
            }
            if a == usize::MAX {
                break;
            }
        }
    }
    let measure = mask.iter().filter(|&&b| b).count() as f64 * spec.cell_measure();
    ExceptionalSet { mask, measure }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_sparse(spec: GridSpec, seed: u64, density: f64, amp: f64) -> GridFunction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v =
            (0..spec.len()).map(|_| if rng.gen::<f64>() < density { rng.gen_range(-amp..amp) } else { 0.0 }).collect();
        GridFunction::from_real(spec, v).unwrap()
    }

    /// All dyadic cubes with averages computed by direct summation.
    fn brute_force_selection(f: &GridFunction, lambda: f64) -> Vec<DyadicCube> {
        let spec = *f.spec();
        let d = spec.d;
        let avg =
            |q: &DyadicCube| q.cells(&spec).iter().map(|&i| f.get(i).norm()).sum::<f64>() / q.cell_count(d) as f64;
        let top = spec.n.trailing_zeros();
        let mut out = Vec::new();
        for level in 0..=top {
            let s = 1usize << level;
            let per = spec.n / s;
            for k in 0..per.pow(d as u32) {
                let c = unravel(k, per, d);
                let mut corner = [0; MAX_DIM];
                for a in 0..d {
                    corner[a] = c[a] * s;
                }
                let q = DyadicCube { level, corner };
                if avg(&q) <= lambda {
                    continue;
                }
                let mut p = q;
                let mut maximal = true;
                while p.level < top {
                    p = p.parent(d);
                    if avg(&p) > lambda {
                        maximal = false;
                        break;
                    }
                }
                if maximal {
                    out.push(q);
                }
            }
        }
        out.sort();
        out
    }

    #[test]
    fn cube_geometry() {
        let s = GridSpec::unit_cells(2, 16).unwrap();
        let q = DyadicCube { level: 2, corner: [4, 8, 0] };
        assert_eq!(q.parent(2), DyadicCube { level: 3, corner: [0, 8, 0] });
        let kids = q.children(2);
        assert_eq!(kids.len(), 4);
        assert!(kids.iter().all(|k| k.parent(2) == q));
        assert_eq!(q.cells(&s).len(), 16);
        assert!(q.cells(&s).iter().all(|&c| q.contains(&s.unravel(c), 2)));
        assert_eq!(q.measure(&s), 16.0);
        assert_eq!(q.center(&s)[0], 5.5);
        assert_eq!(q.center(&s)[1], -6.5);
    }

    #[test]
    fn below_height_gives_no_atoms() {
        let s = GridSpec::unit_cells(2, 16).unwrap();
        let f = GridFunction::from_fn(s, |x| (x[0] * 0.3).sin());
        let dec = cz_decompose(&f, 1.0, 2).unwrap();
        assert!(dec.atoms.is_empty());
        assert_eq!(dec.good, f);
        assert!(cz_decompose(&f, 0.0, 2).is_err());
    }

    #[test]
    fn cube_indicator_matches_brute_force() {
        let s = GridSpec::unit_cells(2, 16).unwrap();
        let q0 = DyadicCube { level: 2, corner: [8, 4, 0] };
        let c = 3.0;
        let mut v = vec![0.0; s.len()];
        for i in q0.cells(&s) {
            v[i] = c;
        }
        let f = GridFunction::from_real(s, v).unwrap();
        // c |Q0| / |parent| = c / 4 <= lambda < c
        for lambda in [0.75, 1.0, 2.9] {
            let dec = cz_decompose(&f, lambda, 2).unwrap();
            let got: Vec<DyadicCube> = dec.atoms.iter().map(|a| a.cube).collect();
            assert_eq!(got, brute_force_selection(&f, lambda));
            assert!(got.iter().all(|q| q.level <= q0.level && q0.contains(&q.corner, 2)));
            let covered: usize = got.iter().map(|q| q.cell_count(2)).sum();
            assert_eq!(covered, 16);
            assert!(dec.check(&f).unwrap().passed());
        }
    }

    #[test]
    fn random_functions_match_brute_force() {
        for (seed, d, n) in [(1u64, 2usize, 16usize), (2, 2, 16), (3, 3, 8)] {
            let s = GridSpec::unit_cells(d, n).unwrap();
            let f = random_sparse(s, seed, 0.2, 10.0);
            for lambda in [0.3, 1.0, 4.0] {
                let dec = cz_decompose(&f, lambda, 2).unwrap();
                let got: Vec<DyadicCube> = dec.atoms.iter().map(|a| a.cube).collect();
                assert_eq!(got, brute_force_selection(&f, lambda));
                let check = dec.check(&f).unwrap();
                assert!(check.passed(), "{:?}", check.failures);
            }
        }
    }

    #[test]
    fn root_saturation() {
        let s = GridSpec::unit_cells(2, 8).unwrap();
        let f = GridFunction::constant(s, 5.0);
        let dec = cz_decompose(&f, 1.0, 2).unwrap();
        assert!(dec.root_saturated());
        assert_eq!(dec.good, f);
        assert!(dec.check(&f).unwrap().passed());
    }

    #[test]
    fn scale_equivariance() {
        let s = GridSpec::unit_cells(2, 32).unwrap();
        let f = random_sparse(s, 9, 0.1, 8.0);
        let a = cz_decompose(&f, 1.5, 2).unwrap();
        let b = cz_decompose(&f.scale(2.0), 3.0, 2).unwrap();
        assert_eq!(a.atoms.len(), b.atoms.len());
        for (x, y) in a.atoms.iter().zip(&b.atoms) {
            assert_eq!(x.cube, y.cube);
            assert!(x.values.iter().zip(&y.values).all(|(u, v)| 2.0 * u == *v));
        }
        assert_eq!(a.good.scale(2.0), b.good);
    }

    #[test]
    fn groups_sum_to_bad_part() {
        let s = GridSpec::unit_cells(2, 32).unwrap();
        let f = random_sparse(s, 4, 0.3, 6.0);
        let dec = cz_decompose(&f, 1.0, 2).unwrap();
        let mut sum = GridFunction::zeros(s);
        let mut group_l1 = 0.0;
        for (_, b) in groups(&dec) {
            group_l1 += norm(&b, Norm::L1);
            sum = sum.add(&b).unwrap();
        }
        assert_eq!(sum.max_abs_diff(&dec.bad_part()), 0.0);
        let atom_l1: f64 = dec.atoms.iter().map(|a| a.l1(&s)).sum();
        // atoms have disjoint supports, so the group norms add up exactly
        assert!((group_l1 - atom_l1).abs() <= 1e-12 * atom_l1);
        let missing = (0..6).find(|m| !dec.levels().contains(m)).unwrap();
        assert_eq!(norm(&group_by_level(&dec, missing), Norm::L1), 0.0);
    }

    #[test]
    fn single_atom_group() {
        let s = GridSpec::unit_cells(2, 16).unwrap();
        let mut v = vec![0.0; s.len()];
        v[s.ravel(&[3, 3, 0])] = 50.0;
        let f = GridFunction::from_real(s, v).unwrap();
        let dec = cz_decompose(&f, 10.0, 2).unwrap();
        assert_eq!(dec.atoms.len(), 1);
        let q = dec.atoms[0].cube;
        assert_eq!(group_by_level(&dec, q.level), dec.atoms[0].to_grid(&s));
    }

    #[test]
    fn exceptional_set_measure() {
        let s = GridSpec::unit_cells(2, 32).unwrap();
        let empty = cz_decompose(&GridFunction::zeros(s), 1.0, 2).unwrap();
        assert_eq!(exceptional_set(&empty).measure, 0.0);
        for (corner, level) in [([8usize, 8usize], 1u32), ([0, 30], 0), ([16, 4], 2)] {
            let q = DyadicCube { level, corner: [corner[0], corner[1], 0] };
            let mut v = vec![0.0; s.len()];
            for i in q.cells(&s) {
                v[i] = if i % 2 == 0 { 100.0 } else { -100.0 };
            }
            let f = GridFunction::from_real(s, v).unwrap();
            // the parent average is at most 100 / 4
            let dec = cz_decompose(&f, 50.0, 2).unwrap();
            assert_eq!(dec.atoms.len(), 1, "{q:?}");
            let cube = dec.atoms[0].cube;
            assert_eq!(cube, q);
            let e = exceptional_set(&dec);
            assert_eq!(e.measure, 16.0 * cube.measure(&s));
            for i in cube.cells(&s) {
                assert!(e.contains(i));
            }
        }
    }

    #[test]
    fn exceptional_measure_bound_on_adversarial_family() {
        let s = GridSpec::unit_cells(2, 64).unwrap();
        let mut v = vec![0.0; s.len()];
        // clustered spikes at many scales
        for k in 0..6 {
            let p = 1usize << k;
            v[s.ravel(&[p, 2 * p % 64, 0])] = 40.0 * (k + 1) as f64;
            v[s.ravel(&[63 - p, p, 0])] = -25.0;
        }
        let f = GridFunction::from_real(s, v).unwrap();
        for lambda in [0.5, 2.0, 8.0] {
            let dec = cz_decompose(&f, lambda, 2).unwrap();
            let e = exceptional_set(&dec);
            let bound = 2f64.powi(2 * 2) * 4.0 * norm(&f, Norm::L1) / lambda;
            assert!(e.measure <= bound);
        }
    }

    #[test]
    fn complex_input_split() {
        let s = GridSpec::unit_cells(2, 16).unwrap();
        let f = random_sparse(s, 5, 0.2, 5.0).map(|v| Complex64::new(v.re, -2.0 * v.re));
        assert!(cz_decompose(&f, 1.0, 2).is_err());
        let (re, im) = cz_decompose_complex(&f, 1.0, 2).unwrap();
        let rebuilt = re.good.add(&re.bad_part()).unwrap();
        let rebuilt_im = im.good.add(&im.bad_part()).unwrap();
        for i in 0..s.len() {
            assert!((rebuilt.get(i).re - f.get(i).re).abs() < 1e-12);
            assert!((rebuilt_im.get(i).re - f.get(i).im).abs() < 1e-12);
        }
    }

    #[test]
    fn certificate_round_trip() {
        let s = GridSpec::unit_cells(2, 16).unwrap();
        let f = random_sparse(s, 6, 0.2, 5.0);
        let dec = cz_decompose(&f, 1.0, 2).unwrap();
        let mut buf = Vec::new();
        dec.write_certificate(&mut buf).unwrap();
        let cert: Certificate = serde_json::from_slice(&buf).unwrap();
        assert_eq!(cert.cubes.len(), dec.atoms.len());
        assert_eq!(cert.exceptional_measure, exceptional_set(&dec).measure);
    }
}
