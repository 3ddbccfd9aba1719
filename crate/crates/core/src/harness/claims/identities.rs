use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{Ctx, Outcome};
use crate::commutator::{apply_t, apply_tj, apply_tj_nu, apply_tjn};
use crate::czd::{cz_decompose, exceptional_set, group_by_level};
use crate::error::{CzError, Result};
use crate::grid::{norm, superlevel_measure, GridFunction, GridSpec, Norm, MAX_DIM};
use crate::harness::inputs::{generate_input, InputFamily};
use crate::harness::report::{GroupReport, Policy};
use crate::harness::weak::{lambda_grid, DECADES, POINTS_PER_DECADE};
use crate::kernels::kj_value;
use crate::microlocal::{apply_lp, DirectionNet, LpFamily, LpOperator};
use crate::params;

fn gaussian_point(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> [f64; MAX_DIM] {
    let mut x = [0.0; MAX_DIM];
    for v in x.iter_mut().take(d) {
        // Box-Muller
        let u: f64 = rng.gen_range(f64::EPSILON..1.0);
        let w: f64 = rng.gen();
        *v = scale * (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * w).cos();
    }
    x
}

pub(super) fn partition_unity(ctx: &Ctx) -> Result<Outcome> {
    let ds = ctx.p.d_values.clone().unwrap_or(vec![2, 3]);
    let ns = ctx.p.n_values.clone().unwrap_or(vec![4, 8, 12]);
    let samples = ctx.p.samples.unwrap_or(10_000);
    let mut g = GroupReport::new("sum-chi", Policy::Absolute { tol: 1e-10 });
    for &d in &ds {
        let gamma = ctx.gamma_for(d);
        for &n in &ns {
            let net = DirectionNet::build(n, gamma, d)?;
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed() ^ (n as u64) << 8 ^ d as u64);
            let pts: Vec<[f64; MAX_DIM]> = (0..samples).map(|_| gaussian_point(&mut rng, d, 10.0)).collect();
            let worst = pts
                .par_iter()
                .map(|x| {
                    let s: f64 = net.chi_all(&x[..d]).map(|v| v.iter().map(|p| p.1).sum()).unwrap_or(f64::NAN);
                    (s - 1.0).abs()
                })
                .reduce(|| 0.0, f64::max);
            g.push(params! {"d" => d, "n" => n, "gamma" => gamma, "card" => net.len()}, worst, 0.0);
        }
    }
    Ok(Outcome { groups: vec![g.finish()], note: String::new() })
}

pub(super) fn kernel_telescoping(ctx: &Ctx) -> Result<Outcome> {
    let ds = ctx.p.d_values.clone().unwrap_or(vec![2, 3]);
    let samples = ctx.p.samples.unwrap_or(10_000);
    let (j0, j1) = (0, ctx.p.j.unwrap_or(8));
    let mut g = GroupReport::new("sum-kj", Policy::Absolute { tol: 1e-8 });
    for &d in &ds {
        let k = ctx.kernel(d)?;
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed() ^ 0x7e1e ^ d as u64);
        // covered range: phi(2^{-j1} x) = 1 and phi(2^{1-j0} x) = 0
        let (lo, hi) = (1.2 * 2f64.powi(j0 - 1), 2f64.powi(j1));
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let u = gaussian_point(&mut rng, d, 1.0);
            let ru = u[..d].iter().map(|v| v * v).sum::<f64>().sqrt();
            let r = lo * (hi / lo).powf(rng.gen::<f64>());
            let mut x = [0.0; MAX_DIM];
            for a in 0..d {
                x[a] = r * u[a] / ru;
            }
            let sum: f64 = (j0..=j1).map(|j| kj_value(&k, j, &x[..d])).sum();
            // compare on the scale-free quantity |x|^d K(x)
            worst = worst.max((sum - k.eval(&x[..d])).abs() * r.powi(d as i32));
        }
        g.push(params! {"d" => d, "j0" => j0, "j1" => j1, "kernel" => k.id()}, worst, 0.0);
    }
    Ok(Outcome { groups: vec![g.finish()], note: String::new() })
}

fn random_grid(spec: GridSpec, seed: u64) -> GridFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    GridFunction::from_real(spec, (0..spec.len()).map(|_| rng.gen_range(-1.0..1.0)).collect()).expect("length matches")
}

pub(super) fn lp_telescoping(ctx: &Ctx) -> Result<Outcome> {
    let ds = ctx.p.d_values.clone().unwrap_or(vec![2, 3]);
    let mut tel = GroupReport::new("telescoping", Policy::Absolute { tol: 1e-10 });
    let mut abs = GroupReport::new("absorption", Policy::Absolute { tol: 1e-10 });
    for &d in &ds {
        let n = ctx.p.grid_n.unwrap_or(if d == 2 { 256 } else { 48 }).next_power_of_two();
        let spec = GridSpec::new(d, n, n as f64 / 4.0)?;
        let f = random_grid(spec, ctx.seed() ^ 0x1b);
        let k_min = LpFamily::k_min(&spec);
        for span in [1, 4, 8] {
            let m = k_min + span;
            let mut sum = apply_lp(LpOperator::V, m, &f);
            let mut worst_abs: f64 = 0.0;
            for k in k_min..m {
                let lam = apply_lp(LpOperator::Lambda, k, &f);
                let both = apply_lp(LpOperator::Lambda, k, &apply_lp(LpOperator::LambdaTilde, k, &f));
                worst_abs = worst_abs.max(both.max_abs_diff(&lam));
                sum = sum.add(&lam)?;
            }
            tel.push(params! {"d" => d, "n" => n, "k_min" => k_min, "m" => m}, sum.max_abs_diff(&f), 0.0);
            abs.push(params! {"d" => d, "n" => n, "k_min" => k_min, "m" => m}, worst_abs, 0.0);
        }
    }
    Ok(Outcome { groups: vec![tel.finish(), abs.finish()], note: String::new() })
}

pub(super) fn sector_sum(ctx: &Ctx) -> Result<Outcome> {
    let n_grid = ctx.p.grid_n.unwrap_or(32);
    let j = ctx.p.j.unwrap_or(2);
    let ns = ctx.p.n_values.clone().unwrap_or(vec![3, 4]);
    let mut g = GroupReport::new("sum-over-nu", Policy::Absolute { tol: 1e-8 });
    let spec = GridSpec::unit_cells(2, n_grid)?;
    let gamma = ctx.gamma_for(2);
    for &n in &ns {
        let params_op = ctx.operator(&spec, ctx.seed() ^ 0x5ec, n)?;
        let f = generate_input(&InputFamily::Spikes { count: 3, seed: ctx.seed() }, &spec)?.f;
        let net = DirectionNet::build(n, gamma, 2)?;
        let whole = apply_tjn(&params_op, &f, j, n, 1.0)?;
        let mut sum = GridFunction::zeros(spec);
        for nu in 0..net.len() {
            sum = sum.add(&apply_tj_nu(&params_op, &f, j, n, 1.0, &net, nu)?)?;
        }
        let rel = sum.max_abs_diff(&whole) / norm(&whole, Norm::Linf);
        g.push(params! {"n" => n, "j" => j, "gamma" => gamma, "card" => net.len(), "grid_n" => n_grid}, rel, 0.0);
    }
    Ok(Outcome { groups: vec![g.finish()], note: String::new() })
}

pub(super) fn czd_invariants(ctx: &Ctx) -> Result<Outcome> {
    let n_grid = ctx.p.grid_n.unwrap_or(32);
    let random_count = ctx.p.probes.unwrap_or(100);
    let spec = GridSpec::unit_cells(2, n_grid)?;
    let mut random = GroupReport::new("random-inputs", Policy::Absolute { tol: 0.0 });
    let mut planted = GroupReport::new("planted-inputs", Policy::Absolute { tol: 0.0 });
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed() ^ 0xc2d);
    for i in 0..random_count {
        let sparsity: f64 = rng.gen_range(0.0..0.95);
        let v: Vec<f64> =
            (0..spec.len()).map(|_| if rng.gen::<f64>() < sparsity { 0.0 } else { rng.gen_range(-4.0..4.0) }).collect();
        let f = GridFunction::from_real(spec, v)?;
        let avg = norm(&f, Norm::L1) / spec.volume();
        let lambda = avg.max(1e-3) * rng.gen_range(1.0..20.0);
        let dec = cz_decompose(&f, lambda, 2)?;
        let check = dec.check(&f)?;
        random.push(params! {"case" => i, "lambda" => lambda}, check.failures.len() as f64, 0.0);
    }
    for i in 0..20u64 {
        let fam = InputFamily::MultiScale {
            count: 1 + (i as usize % 4),
            min_level: 1,
            max_level: 2,
            seed: ctx.seed() ^ (i << 4),
        };
        let gen = generate_input(&fam, &spec)?;
        let lambda = gen.lambda_hint.ok_or_else(|| CzError::Parameter("planted family without level".into()))?;
        let dec = cz_decompose(&gen.f, lambda, 2)?;
        let check = dec.check(&gen.f)?;
        let mut found: Vec<_> = dec.atoms.iter().map(|a| a.cube).collect();
        let mut want = gen.planted.clone();
        found.sort();
        want.sort();
        let mismatch = if found == want { 0.0 } else { 1.0 };
        planted.push(params! {"case" => i, "lambda" => lambda}, check.failures.len() as f64 + mismatch, 0.0);
    }
    Ok(Outcome { groups: vec![random.finish(), planted.finish()], note: String::new() })
}

fn chebyshev_max(g: &GridFunction) -> Result<f64> {
    let top = norm(g, Norm::Linf);
    if top == 0.0 {
        return Ok(0.0);
    }
    let l1 = norm(g, Norm::L1);
    let mut worst: f64 = 0.0;
    for lambda in lambda_grid(top, DECADES, POINTS_PER_DECADE)? {
        worst = worst.max(lambda * superlevel_measure(g, lambda)? / l1);
    }
    Ok(worst)
}

pub(super) fn chebyshev(ctx: &Ctx) -> Result<Outcome> {
    let spec = GridSpec::unit_cells(2, ctx.p.grid_n.unwrap_or(32))?;
    let mut grp = GroupReport::new("lambda-measure", Policy::UpperBound { bound: 1.0 + 1e-12 });
    let fams = [
        InputFamily::Spikes { count: 6, seed: ctx.seed() },
        InputFamily::SignLattice { spacing: 2, seed: ctx.seed() },
        InputFamily::MultiScale { count: 3, min_level: 1, max_level: 2, seed: ctx.seed() },
        InputFamily::Bump { radius: 3.0 },
    ];
    let op = ctx.operator(&spec, ctx.seed() ^ 0xcb, 2)?;
    for fam in &fams {
        let gen = generate_input(fam, &spec)?;
        let lambda = gen.lambda_hint.unwrap_or(4.0 / spec.volume());
        let dec = cz_decompose(&gen.f, lambda, 2)?;
        grp.push(params! {"input" => fam.id(), "part" => "good"}, chebyshev_max(&dec.good)?, 1.0);
        let tf = apply_t(&op, &gen.f)?;
        grp.push(params! {"input" => fam.id(), "part" => "Tf"}, chebyshev_max(&tf)?, 1.0);
    }
    Ok(Outcome { groups: vec![grp.finish()], note: String::new() })
}

/// `(6/5) 2^j <= (2^D - 1) 2^{m-1}`: the kernel reach from any point of a
/// cube of side `2^m` stays inside its dilate.
pub fn support_radius_ok(j: i32, m: i32, dilate: u32) -> bool {
    1.2 * 2f64.powi(j) <= ((1u64 << dilate) - 1) as f64 * 2f64.powi(m - 1)
}

pub(super) fn support_locality(ctx: &Ctx) -> Result<Outcome> {
    let n_grid = ctx.p.grid_n.unwrap_or(64);
    let spec = GridSpec::unit_cells(2, n_grid)?;
    let dilate = 2;
    let top = (n_grid / 4).trailing_zeros() as i32;
    let mut g = GroupReport::new("outside-E", Policy::Absolute { tol: 1e-12 });
    let mut inside = GroupReport::new("inside-E-nonzero", Policy::UpperBound { bound: 1.0 });
    for j in 1..=3 {
        for m in [j + 1, j + 2] {
            if m > top || !support_radius_ok(j, m, dilate) || 1.2 * 2f64.powi(j) > spec.side / 4.0 {
                continue;
            }
            let fam = InputFamily::MultiScale {
                count: 2,
                min_level: m as u32,
                max_level: m as u32,
                seed: ctx.seed() ^ m as u64,
            };
            let gen = generate_input(&fam, &spec)?;
            let lambda = gen.lambda_hint.expect("planted family carries a level");
            let dec = cz_decompose(&gen.f, lambda, dilate)?;
            let bm = group_by_level(&dec, m as u32);
            let e = exceptional_set(&dec);
            let op = ctx.operator(&spec, ctx.seed() ^ (j as u64) << 3, 2)?;
            let out = apply_tj(&op, &bm, j)?;
            let mut off: f64 = 0.0;
            let mut on: f64 = 0.0;
            for (i, v) in out.values().iter().enumerate() {
                if e.contains(i) {
                    on = on.max(v.norm());
                } else {
                    off = off.max(v.norm());
                }
            }
            g.push(params! {"j" => j, "m" => m, "dilate" => dilate}, off, 0.0);
            // a nonzero response inside E shows the check is not vacuous
            inside.push(params! {"j" => j, "m" => m}, if on > 0.0 { 1.0 } else { 2.0 }, 1.0);
        }
    }
    Ok(Outcome { groups: vec![g.finish(), inside.finish()], note: String::new() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radius_inequality() {
        assert!(support_radius_ok(2, 3, 2));
        assert!(support_radius_ok(2, 2, 2));
        assert!(!support_radius_ok(2, 1, 2));
        assert!(support_radius_ok(2, 1, 3));
    }
}
