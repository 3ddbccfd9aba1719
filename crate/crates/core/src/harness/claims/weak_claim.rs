use super::{Ctx, Outcome};
use crate::commutator::{apply_t, CommutatorParams};
use crate::error::Result;
use crate::grid::GridSpec;
use crate::harness::fields::AField;
use crate::harness::inputs::{generate_input, InputFamily};
use crate::harness::report::{GroupReport, Policy};
use crate::harness::weak::weak_type_ratio;
use crate::kernels::KernelSpec;
use crate::params;

const HALVINGS: i32 = 3;
const AMPLITUDES: [f64; 3] = [1e-3, 7.0, 1e3];

/// The three rough fields, plus the constant field, with sign changes every
/// `block` cells.
fn fields(seed: u64, d: usize, block: usize) -> Vec<AField> {
    let mut direction = vec![0.0; d];
    direction[0] = 1.0;
    direction[1] = 1.0;
    vec![
        AField::RandomSigns { seed, block },
        AField::Checkerboard { period: block },
        AField::PlantedSector { direction, half_angle: std::f64::consts::PI / 8.0 },
        AField::Constant { value: 1.0 },
    ]
}

/// Weak-type ratios for bumps of radius `widest / 2^k`, `k = 0..=HALVINGS`.
fn halving_ratios(
    kernel: KernelSpec,
    field: &AField,
    spec: &GridSpec,
    m_s: usize,
    r: f64,
    widest: f64,
) -> Result<Vec<(f64, f64, f64)>> {
    let op = CommutatorParams::new(kernel, field.sample(spec)?, m_s, r)?;
    (0..=HALVINGS)
        .map(|k| {
            let radius = widest / 2f64.powi(k);
            let f = generate_input(&InputFamily::Bump { radius }, spec)?.f;
            let p = weak_type_ratio(|f| apply_t(&op, f), &f)?;
            Ok((radius, p.ratio, p.argmax_lambda))
        })
        .collect()
}

fn spread(ratios: &[(f64, f64, f64)]) -> f64 {
    let base = ratios[0].1;
    ratios.iter().map(|r| (r.1 / base - 1.0).abs()).fold(0.0, f64::max)
}

/// The narrowest bump is a single cell. The sign fields switch on blocks at
/// least as wide as the widest bump, so the halvings resolve the point-mass
/// limit at fixed `a`; cell-scale fields are measured and reported in the note.
pub(super) fn weak_type_stability(ctx: &Ctx) -> Result<Outcome> {
    let cfg = ctx.cfg;
    let spec = cfg.grid_spec()?;
    let kernel = cfg.kernel_spec()?;
    let h = spec.h();
    let widest = h * 2f64.powi(HALVINGS);
    let block = 2 * 2usize.pow(HALVINGS as u32);
    let r = cfg.r.max(h);
    let mut groups = Vec::new();
    let mut amplitude = GroupReport::new("amplitude", Policy::Within { factor: 1.05 });
    for field in fields(cfg.seed, spec.d, block) {
        let ratios = halving_ratios(kernel, &field, &spec, cfg.m_s, r, widest)?;
        let mut g = GroupReport::new(format!("halving a={}", field.id()), Policy::Stability { rel: 0.2 });
        for &(radius, ratio, argmax) in &ratios {
            g.push(
                params! {"a" => field.id(), "block" => block, "radius" => radius, "argmax_lambda" => argmax},
                ratio,
                1.0,
            );
        }
        groups.push(g.finish());
        let f = generate_input(&InputFamily::Bump { radius: widest }, &spec)?.f;
        let op = CommutatorParams::new(kernel, field.sample(&spec)?, cfg.m_s, r)?;
        for c in AMPLITUDES {
            let scaled = weak_type_ratio(|f| apply_t(&op, f), &f.scale(c))?;
            amplitude.push(params! {"a" => field.id(), "c" => c}, scaled.ratio, ratios[0].1);
        }
    }
    groups.push(amplitude.finish());

    let mut cell_scale = Vec::new();
    for field in fields(cfg.seed, spec.d, 1).into_iter().take(2) {
        let ratios = halving_ratios(kernel, &field, &spec, cfg.m_s, r, widest)?;
        cell_scale.push(format!("{} {:.3}", field.id(), spread(&ratios)));
    }
    let note = format!(
        "sign fields use {block}-cell blocks; with 1-cell blocks the relative spread over the halvings is {}",
        cell_scale.join(", ")
    );
    Ok(Outcome { groups, note })
}
