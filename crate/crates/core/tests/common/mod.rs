//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use czlab::grid::{GridFunction, GridSpec};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Bilinear interpolation written out corner by corner (two dimensions).
pub fn bilinear(a: &[f64], n: usize, u: f64, v: f64) -> f64 {
    let i = u.floor();
    let j = v.floor();
    let (s, t) = (u - i, v - j);
    let wrap = |k: f64| (k as i64).rem_euclid(n as i64) as usize;
    let (i0, i1, j0, j1) = (wrap(i), wrap(i + 1.0), wrap(j), wrap(j + 1.0));
    let at = |p: usize, q: usize| a[p * n + q];
    (1.0 - s) * (1.0 - t) * at(i0, j0) + s * (1.0 - t) * at(i1, j0) + (1.0 - s) * t * at(i0, j1) + s * t * at(i1, j1)
}

/// `int_0^1 a(p + s q) ds` with Simpson's rule on every piece between
/// grid-line crossings (exact for the piecewise quadratic integrand).
pub fn line_integral_simpson(a: &[f64], n: usize, p: (f64, f64), q: (f64, f64)) -> f64 {
    let mut cuts = vec![0.0, 1.0];
    for (start, step) in [(p.0, q.0), (p.1, q.1)] {
        if step == 0.0 {
            continue;
        }
        let end = start + step;
        let (lo, hi) = if start < end { (start, end) } else { (end, start) };
        let mut k = lo.ceil();
        while k <= hi {
            let s = (k - start) / step;
            if s > 0.0 && s < 1.0 {
                cuts.push(s);
            }
            k += 1.0;
        }
    }
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let f = |s: f64| bilinear(a, n, p.0 + s * q.0, p.1 + s * q.1);
    cuts.windows(2).map(|w| (w[1] - w[0]) / 6.0 * (f(w[0]) + 4.0 * f(0.5 * (w[0] + w[1])) + f(w[1]))).sum()
}

/// Riesz kernel `x_1 / |x|^3` in two dimensions.
pub fn riesz_x1(x: f64, y: f64) -> f64 {
    let r2 = x * x + y * y;
    x / (r2 * r2.sqrt())
}

/// Triple-loop truncated commutator with the Riesz kernel on a unit-cell
/// two-dimensional grid (`h = 1`).
pub fn commutator_oracle(a: &[f64], f: &[f64], n: usize, r: f64) -> Vec<f64> {
    let half = (n / 2) as i64;
    let centered = |i: usize| {
        let i = i as i64;
        if i < half {
            i
        } else {
            i - n as i64
        }
    };
    let wrap_min = |d: i64| {
        let m = d.rem_euclid(n as i64);
        if m < half {
            m
        } else {
            m - n as i64
        }
    };
    let mut out = vec![0.0; n * n];
    for x0 in 0..n {
        for x1 in 0..n {
            let mut acc = 0.0;
            for y0 in 0..n {
                for y1 in 0..n {
                    let fy = f[y0 * n + y1];
                    if fy == 0.0 {
                        continue;
                    }
                    let z0 = wrap_min(centered(x0) - centered(y0));
                    let z1 = wrap_min(centered(x1) - centered(y1));
                    let dist = ((z0 * z0 + z1 * z1) as f64).sqrt();
                    if dist <= r {
                        continue;
                    }
                    let avg =
                        line_integral_simpson(a, n, (centered(y0) as f64, centered(y1) as f64), (z0 as f64, z1 as f64));
                    acc += riesz_x1(z0 as f64, z1 as f64) * avg * fy;
                }
            }
            out[x0 * n + x1] = acc;
        }
    }
    out
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random real values in `[-1, 1]` on the whole grid.
pub fn random_field(spec: GridSpec, seed: u64) -> GridFunction {
    let mut r = rng(seed);
    GridFunction::from_real(spec, (0..spec.len()).map(|_| r.gen_range(-1.0..1.0)).collect()).unwrap()
}

/// Random real values supported in the central quarter.
pub fn random_central(spec: GridSpec, seed: u64) -> GridFunction {
    let mut r = rng(seed);
    let v = (0..spec.len()).map(|i| if spec.in_central_quarter(i) { r.gen_range(-1.0..1.0) } else { 0.0 }).collect();
    GridFunction::from_real(spec, v).unwrap()
}

/// Relative l2 difference of two real vectors.
pub fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

pub fn real_values(f: &GridFunction) -> Vec<f64> {
    f.values().iter().map(|v: &Complex64| v.re).collect()
}

/// Direct lattice convolution with `x_1 / |x|^3` truncated to `|z| > r`,
/// minimal-image displacements, unit cells, two dimensions.
pub fn truncated_riesz_convolution(f: &[f64], n: usize, r: f64) -> Vec<f64> {
    let half = n as i64 / 2;
    let wrap_min = |d: i64| {
        let m = d.rem_euclid(n as i64);
        if m < half {
            m
        } else {
            m - n as i64
        }
    };
    let sources: Vec<(i64, i64, f64)> =
        (0..n * n).filter(|&k| f[k] != 0.0).map(|k| ((k / n) as i64, (k % n) as i64, f[k])).collect();
    let mut out = vec![0.0; n * n];
    for x0 in 0..n as i64 {
        for x1 in 0..n as i64 {
            let mut acc = 0.0;
            for &(y0, y1, fy) in &sources {
                let (z0, z1) = (wrap_min(x0 - y0), wrap_min(x1 - y1));
                if (((z0 * z0 + z1 * z1) as f64).sqrt()) > r {
                    acc += riesz_x1(z0 as f64, z1 as f64) * fy;
                }
            }
            out[(x0 * n as i64 + x1) as usize] = acc;
        }
    }
    out
}

/// Violated decomposition invariants, checked from the raw atoms: exact
/// reconstruction, mean-zero atoms, `|g| <= 2^d lambda`, `sum |Q| <= ||f||_1 / lambda`,
/// disjoint cubes, and every selected cube average above `lambda`.
pub fn czd_violations(f: &GridFunction, dec: &czlab::czd::CZDecomposition) -> Vec<String> {
    let spec = *f.spec();
    let fv = real_values(f);
    let gv = real_values(&dec.good);
    let cell = spec.cell_measure();
    let lambda = dec.lambda;
    let mut out = Vec::new();
    let mut rebuilt = gv.clone();
    let mut owner = vec![usize::MAX; spec.len()];
    let mut cube_measure = 0.0;
    for (k, atom) in dec.atoms.iter().enumerate() {
        let cells = atom.cube.cells(&spec);
        let mut sum = 0.0;
        let mut abs_avg = 0.0;
        for (&c, &v) in cells.iter().zip(&atom.values) {
            rebuilt[c] += v;
            sum += v;
            abs_avg += fv[c].abs();
            if owner[c] != usize::MAX {
                out.push(format!("cell {c} lies in atoms {} and {k}", owner[c]));
            }
            owner[c] = k;
        }
        if sum.abs() > 1e-12 * cells.len() as f64 {
            out.push(format!("atom {k} has sum {sum:e}"));
        }
        if abs_avg / cells.len() as f64 <= lambda {
            out.push(format!("atom {k} has average {} <= lambda", abs_avg / cells.len() as f64));
        }
        cube_measure += cells.len() as f64 * cell;
    }
    let scale = fv.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    for i in 0..spec.len() {
        if (rebuilt[i] - fv[i]).abs() > 1e-12 * scale {
            out.push(format!("reconstruction fails at cell {i}"));
            break;
        }
    }
    let bound = 2f64.powi(spec.d as i32) * lambda;
    if let Some(g) = gv.iter().find(|g| g.abs() > bound * (1.0 + 1e-12)) {
        out.push(format!("|g| = {g} exceeds 2^d lambda = {bound}"));
    }
    let f_l1: f64 = fv.iter().map(|v| v.abs()).sum::<f64>() * cell;
    if cube_measure > f_l1 / lambda * (1.0 + 1e-12) {
        out.push(format!("sum |Q| = {cube_measure} exceeds ||f||_1 / lambda = {}", f_l1 / lambda));
    }
    out
}
