use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{Ctx, Outcome};
use crate::commutator::apply_tj_nu;
use crate::czd::{cz_decompose, group_by_level};
use crate::error::{CzError, Result};
use crate::grid::{norm, GridFunction, GridSpec, Norm, MAX_DIM};
use crate::harness::inputs::{generate_input, InputFamily};
use crate::harness::report::{GroupReport, Policy};
use crate::kernels::ell;
use crate::microlocal::{apply_pm, in_tube, tube_l1_estimate, tube_majorant, DirectionNet};
use crate::params;

/// Values below this fraction of `max |T B|` are FFT roundoff from `P_m`.
const ROUNDOFF_FLOOR: f64 = 1e-12;

/// `H_j^{n,nu} * |B|` by direct summation over the support of `B`, with
/// minimal-image displacements.
fn tube_convolution(b: &GridFunction, j: i32, n: u32, gamma: f64, nu: &[f64]) -> Vec<f64> {
    let spec = *b.spec();
    let d = spec.d;
    let w = spec.cell_measure() * 2f64.powi(-j * d as i32);
    let src: Vec<([i64; MAX_DIM], f64)> =
        b.support().into_iter().map(|i| (spec.centered_index(i), b.get(i).norm() * w)).collect();
    let n_i = spec.n as i64;
    (0..spec.len())
        .into_par_iter()
        .map(|x| {
            let xc = spec.centered_index(x);
            let mut acc = 0.0;
            let mut z = [0.0; MAX_DIM];
            for (yc, v) in &src {
                for a in 0..d {
                    let mut dz = (xc[a] - yc[a]).rem_euclid(n_i);
                    if dz >= n_i / 2 {
                        dz -= n_i;
                    }
                    z[a] = dz as f64 * spec.h();
                }
                if in_tube(&z[..d], nu, j, n, gamma) {
                    acc += v;
                }
            }
            acc
        })
        .collect()
}

pub(super) fn tube_majorization(ctx: &Ctx) -> Result<Outcome> {
    let ns = ctx.p.n_values.clone().unwrap_or(vec![5, 6]);
    let j = ctx.p.j.unwrap_or(6);
    let gamma = ctx.p.gamma.unwrap_or(0.12);
    let cases = ctx.p.probes.unwrap_or(5);
    let n_grid = ctx.p.grid_n.unwrap_or(1024);
    // half-unit cells so that B_{j-n} at physical side 2^{j-n} >= 1 has
    // nonzero mean-zero atoms
    let spec = GridSpec::new(2, n_grid, n_grid as f64 / 2.0)?;
    let mut pointwise = GroupReport::new("pointwise-constant", Policy::UpperBound { bound: 32.0 });
    let mut l1 = GroupReport::new("tube-l1", Policy::Within { factor: 2.0 });
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed() ^ 0x7b);
    for &n in &ns {
        let phys_level = j - n as i32;
        let cell_level = phys_level + 1;
        if cell_level < 1 {
            return Err(CzError::Scale(format!("atoms of side 2^{phys_level} are below the grid scale")));
        }
        let m = j - n as i32 + ell(n)?;
        let net = DirectionNet::build(n, gamma, 2)?;
        for case in 0..cases {
            let seed = rng.gen::<u64>();
            let op = ctx.operator(&spec, seed, n)?;
            let fam =
                InputFamily::MultiScale { count: 2, min_level: cell_level as u32, max_level: cell_level as u32, seed };
            let gen = generate_input(&fam, &spec)?;
            let lambda = gen.lambda_hint.expect("planted family carries a level");
            let dec = cz_decompose(&gen.f, lambda, 2)?;
            let b = group_by_level(&dec, cell_level as u32);
            let nu = rng.gen_range(0..net.len());
            let dir = net.dirs[nu];
            let tb = apply_tj_nu(&op, &b, j, n, 1.0, &net, nu)?;
            let resid = tb.sub(&apply_pm(m, &tb)?)?;
            let h = tube_convolution(&b, j, n, gamma, &dir[..2]);
            let floor = ROUNDOFF_FLOOR * norm(&tb, Norm::Linf);
            let mut c: f64 = 0.0;
            for (r, hv) in resid.values().iter().zip(&h) {
                let r = r.norm();
                if r <= floor {
                    continue;
                }
                c = c.max(if *hv > 0.0 { r / hv } else { f64::INFINITY });
            }
            pointwise.push(
                params! {"n" => n, "j" => j, "m" => m, "gamma" => gamma, "case" => case, "nu" => nu},
                c,
                1.0,
            );
        }
        // a torus twice as wide holds the whole tube
        let wide = GridSpec::new(2, 2 * n_grid, n_grid as f64)?;
        let dir = net.dirs[0];
        let hm = tube_majorant(j, n, gamma, &dir[..2], &wide)?;
        l1.push(params! {"n" => n, "j" => j, "gamma" => gamma}, norm(&hm, Norm::L1), tube_l1_estimate(j, n, gamma, 2));
    }
    Ok(Outcome {
        groups: vec![pointwise.finish(), l1.finish()],
        note: format!("gamma = {gamma} keeps the smoothing radius 2^(j-n+l(n)) inside the tube radius"),
    })
}
