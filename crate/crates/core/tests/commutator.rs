mod common;

use common::*;
use czlab::commutator::*;
use czlab::grid::{convolve, dft, norm, GridFunction, GridSpec, Norm};
use czlab::kernels::{dyadic_piece, KernelSpec, MollifyMethod};
use czlab::microlocal::DirectionNet;
use czlab::CzError;
use num_complex::Complex64;

fn riesz() -> KernelSpec {
    KernelSpec::from_id("riesz-x1", 2).unwrap()
}

fn params(a: GridFunction, r: f64) -> CommutatorParams {
    CommutatorParams::new(riesz(), a, DEFAULT_M_S, r).unwrap()
}

#[test]
fn matches_triple_loop_oracle() {
    let s = GridSpec::unit_cells(2, 16).unwrap();
    for seed in 0..2 {
        let a = random_field(s, 100 + seed);
        let f = random_central(s, 200 + seed);
        let p = params(a.clone(), 1.0);
        let got = real_values(&apply_t(&p, &f).unwrap());
        let want = commutator_oracle(&real_values(&a), &real_values(&f), 16, 1.0);
        let rel = rel_l2(&got, &want);
        assert!(rel <= 1e-6, "seed {seed}: {rel}");
    }
}

#[test]
fn constant_field_reduces_to_convolution() {
    let s = GridSpec::unit_cells(2, 32).unwrap();
    let f = random_central(s, 1);
    let p = params(GridFunction::constant(s, 1.0), 1.5);
    let got = apply_t(&p, &f).unwrap();
    let want = convolve(&truncated_kernel(&riesz(), &s, 1.5).unwrap(), &f).unwrap();
    assert!(got.max_abs_diff(&want) <= 1e-10);
    let zero = params(GridFunction::zeros(s), 1.5);
    assert_eq!(norm(&apply_t(&zero, &f).unwrap(), Norm::Linf), 0.0);
}

#[test]
fn rejects_bad_inputs() {
    let s = GridSpec::unit_cells(2, 16).unwrap();
    let a = GridFunction::constant(s, 1.0);
    assert!(matches!(CommutatorParams::new(riesz(), a.clone(), 64, 0.5), Err(CzError::Resolution(_))));
    assert!(CommutatorParams::new(riesz(), a.scale(2.0), 64, 1.0).is_err());
    assert!(CommutatorParams::normalized(riesz(), a.scale(2.0), 64, 1.0).is_ok());
    let p = params(a, 1.0);
    let outside = GridFunction::delta(s, s.ravel(&[7, 7, 0]));
    assert!(matches!(apply_t(&p, &outside), Err(CzError::Support(_))));
}

#[test]
fn dyadic_pieces_sum_to_truncated_operator() {
    let s = GridSpec::unit_cells(2, 64).unwrap();
    let mut v = vec![0.0; s.len()];
    for (k, idx) in [[0usize, 0usize], [1, 63], [63, 2], [2, 1]].iter().enumerate() {
        v[s.ravel(&[idx[0], idx[1], 0])] = 1.0 - 0.3 * k as f64;
    }
    let f = GridFunction::from_real(s, v).unwrap();
    let a = random_field(s, 4);
    let p = params(a, 1.0);
    let full = apply_t(&p, &f).unwrap();
    let mut sum = GridFunction::zeros(s);
    for j in 1..=3 {
        sum = sum.add(&apply_tj(&p, &f, j).unwrap()).unwrap();
    }
    // pieces 1..=3 reproduce K on 6/5 <= |z| <= 8, and no lattice displacement
    // falls in (1, 6/5); sources lie within distance 3 of the origin, so
    // outputs with |x| <= 5 see every interaction
    for i in 0..s.len() {
        let x = s.coord(i);
        if (x[0] * x[0] + x[1] * x[1]).sqrt() <= 5.0 {
            assert!((sum.get(i) - full.get(i)).norm() <= 1e-8);
        }
    }
}

#[test]
fn dyadic_piece_with_constant_field_and_locality() {
    let s = GridSpec::unit_cells(2, 64).unwrap();
    let f = random_central(s, 7);
    let p = params(GridFunction::constant(s, 1.0), 1.0);
    let kj = dyadic_piece(&riesz(), 3, &s).unwrap();
    let got = apply_tj(&p, &f, 3).unwrap();
    assert!(got.max_abs_diff(&convolve(&kj, &f).unwrap()) <= 1e-10);

    let y0 = s.ravel(&[3, 60, 0]);
    let pr = params(random_field(s, 8), 1.0);
    let out = apply_tj(&pr, &GridFunction::delta(s, y0), 3).unwrap();
    let yc = s.coord(y0);
    for i in 0..s.len() {
        let x = s.coord(i);
        let r = ((x[0] - yc[0]).powi(2) + (x[1] - yc[1]).powi(2)).sqrt();
        if r < 4.0 || r > 9.6 {
            assert_eq!(out.get(i), Complex64::new(0.0, 0.0));
        }
    }
}

#[test]
fn mollified_piece_with_constant_field() {
    let s = GridSpec::unit_cells(2, 32).unwrap();
    let f = random_central(s, 9);
    let p = params(GridFunction::constant(s, 1.0), 1.0);
    let kjn = mollified_kernel_for(&p, 2, 4, 1.0).unwrap();
    let mass = theta_mass(&p, 4).unwrap();
    let want = convolve(&kjn, &f).unwrap().scale(mass);
    assert!(apply_tjn(&p, &f, 2, 4, 1.0).unwrap().max_abs_diff(&want) <= 1e-9);
    // 64 nodes cannot resolve theta_6
    assert!(matches!(apply_tjn(&p, &f, 2, 6, 1.0), Err(CzError::Resolution(_))));
}

#[test]
fn sector_pieces_sum_to_mollified_piece() {
    let s = GridSpec::unit_cells(2, 32).unwrap();
    let f = random_central(s, 10);
    let p = params(random_field(s, 11), 1.0);
    let net = DirectionNet::build(4, 0.5, 2).unwrap();
    let whole = apply_tjn(&p, &f, 2, 4, 1.0).unwrap();
    let mut sum = GridFunction::zeros(s);
    for nu in 0..net.len() {
        sum = sum.add(&apply_tj_nu(&p, &f, 2, 4, 1.0, &net, nu).unwrap()).unwrap();
    }
    assert!(sum.max_abs_diff(&whole) <= 1e-10);
    let wrong = DirectionNet::build(5, 0.5, 2).unwrap();
    assert!(matches!(apply_tj_nu(&p, &f, 2, 4, 1.0, &wrong, 0), Err(CzError::Parameter(_))));
}

#[test]
fn sector_kernel_lives_in_its_cone() {
    let s = GridSpec::unit_cells(2, 64).unwrap();
    let p = params(GridFunction::constant(s, 1.0), 1.0);
    let net = DirectionNet::build(3, 0.5, 2).unwrap();
    for nu in [0, net.len() / 3] {
        let k = sector_kernel(&p, 3, 3, 1.0, &net, nu).unwrap();
        let v = net.dirs[nu];
        for i in 0..s.len() {
            let x = s.coord(i);
            let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
            if r == 0.0 {
                continue;
            }
            let dist = ((x[0] / r - v[0]).powi(2) + (x[1] / r - v[1]).powi(2)).sqrt();
            if dist > net.support_radius() {
                assert_eq!(k.get(i).re, 0.0);
            }
        }
    }
}

#[test]
fn sector_piece_with_constant_field() {
    let s = GridSpec::unit_cells(2, 32).unwrap();
    let f = random_central(s, 12);
    let p = params(GridFunction::constant(s, 1.0), 1.0);
    let net = DirectionNet::build(4, 0.5, 2).unwrap();
    let nu = net.len() / 5;
    let k = sector_kernel(&p, 2, 4, 1.0, &net, nu).unwrap();
    let mass = theta_mass(&p, 4).unwrap();
    let want = convolve(&k, &f).unwrap().scale(mass);
    assert!(apply_tj_nu(&p, &f, 2, 4, 1.0, &net, nu).unwrap().max_abs_diff(&want) <= 1e-9);
}

#[test]
fn frozen_kernels_rebuild_the_sector_piece() {
    let s = GridSpec::unit_cells(2, 32).unwrap();
    let p = params(random_field(s, 13), 1.0);
    let net = DirectionNet::build(2, 0.5, 2).unwrap();
    let nu = 1;
    let pts = [(s.ravel(&[0, 0, 0]), 1.0), (s.ravel(&[1, 0, 0]), -0.5), (s.ravel(&[0, 31, 0]), -0.5)];
    let mut v = vec![0.0; s.len()];
    for &(i, c) in &pts {
        v[i] = c;
    }
    let b = GridFunction::from_real(s, v).unwrap();
    let direct = apply_tj_nu(&p, &b, 2, 2, 1.0, &net, nu).unwrap();
    let mut rebuilt = GridFunction::zeros(s);
    for &(i, c) in &pts {
        let fk = frozen_kernel(&p, 2, 2, 1.0, &net, nu, i).unwrap();
        rebuilt = rebuilt.add(&fk.scale(c * s.cell_measure())).unwrap();
    }
    assert!(rebuilt.max_abs_diff(&direct) <= 1e-10);

    let k = sector_kernel(&p, 2, 2, 1.0, &net, nu).unwrap();
    let mass = theta_mass(&p, 2).unwrap();
    let y = pts[1].0;
    let fk = frozen_kernel(&p, 2, 2, 1.0, &net, nu, y).unwrap();
    assert!(norm(&fk, Norm::L1) <= mass * norm(&k, Norm::L1) * (1.0 + 1e-12));

    let one = params(GridFunction::constant(s, 1.0), 1.0);
    let flat = frozen_kernel(&one, 2, 2, 1.0, &net, nu, y).unwrap();
    let yc = s.centered_index(y);
    for i in 0..s.len() {
        let c = s.centered_index(i);
        let z = s.ravel_signed(&[c[0] - yc[0], c[1] - yc[1], 0]);
        assert!((flat.get(i).re - mass * k.get(z).re).abs() <= 1e-14);
    }
}

#[test]
fn linear_in_f_and_in_a() {
    let s = GridSpec::unit_cells(2, 16).unwrap();
    let a = random_field(s, 14);
    let f = random_central(s, 15);
    let g = random_central(s, 16);
    let p = params(a.clone(), 1.0);
    let lhs = apply_t(&p, &f.scale(0.7).add(&g.scale(-1.3)).unwrap()).unwrap();
    let rhs = apply_t(&p, &f).unwrap().scale(0.7).add(&apply_t(&p, &g).unwrap().scale(-1.3)).unwrap();
    assert!(lhs.max_abs_diff(&rhs) <= 1e-10);
    let half = params(a.scale(-0.5), 1.0);
    let scaled = apply_t(&half, &f).unwrap();
    assert!(scaled.max_abs_diff(&apply_t(&p, &f).unwrap().scale(-0.5)) <= 1e-12);
}

#[test]
fn truncation_changes_little_at_fine_radii() {
    let s = GridSpec::unit_cells(2, 32).unwrap();
    let a = random_field(s, 17);
    // a smooth input whose mass sits well above the truncation scale
    let f = GridFunction::from_fn(s, |x| {
        let r2 = x[0] * x[0] + x[1] * x[1];
        if x[0].abs() < 8.0 && x[1].abs() < 8.0 {
            (-r2 / 8.0).exp() * x[0]
        } else {
            0.0
        }
    });
    let at = |r: f64| apply_t(&params(a.clone(), r), &f).unwrap();
    let d1 = norm(&at(1.0).sub(&at(2.0)).unwrap(), Norm::L1);
    let d2 = norm(&at(2.0).sub(&at(4.0)).unwrap(), Norm::L1);
    assert!(d1 <= 2.0 * d2, "{d1} vs {d2}");
}

#[test]
fn discrete_symbol_of_truncated_kernel_is_bounded() {
    let s = GridSpec::unit_cells(2, 64).unwrap();
    let k = riesz();
    let sym = dft(&truncated_kernel(&k, &s, 1.0).unwrap());
    let sup = norm(&sym, Norm::Linf);
    assert!(sup <= 1.5 * k.symbol_sup().unwrap(), "{sup}");
}

#[test]
fn grid_and_quadrature_mollification_agree_on_resolvable_scales() {
    let s = GridSpec::unit_cells(2, 256).unwrap();
    let f = random_central(s, 18).map(|v| if v.re.abs() > 0.98 { v } else { Complex64::new(0.0, 0.0) });
    let p = params(random_field(s, 19), 1.0);
    let grid = p.clone().with_mollify(MollifyMethod::Grid);
    let a = apply_tjn(&grid, &f, 5, 2, 1.0).unwrap();
    let b = apply_tjn(&p, &f, 5, 2, 1.0).unwrap();
    let rel = norm(&a.sub(&b).unwrap(), Norm::L2) / norm(&a, Norm::L2);
    assert!(rel < 5e-2, "{rel}");
}
