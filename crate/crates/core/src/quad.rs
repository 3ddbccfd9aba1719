//! Small quadrature toolkit: Gauss-Legendre nodes, sphere and ball rules.

use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(q: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(q >= 1);
    let mut nodes = vec![0.0; q];
    let mut weights = vec![0.0; q];
    for i in 0..(q + 1) / 2 {
        let mut x = (PI * (i as f64 + 0.75) / (q as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(q, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(q, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[q - 1 - i] = x;
        weights[i] = w;
        weights[q - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(q: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=q {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if q == 0 {
        return (1.0, 0.0);
    }
    let d = q as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss-Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(q: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(q);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    x.iter().zip(&w).map(|(&x, &w)| (mid + half * x, half * w)).collect()
}

/// Composite Gauss-Legendre rule with `panels` equal panels on `[a, b]`.
pub fn composite_gauss(q: usize, panels: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let step = (b - a) / panels as f64;
    (0..panels).flat_map(|p| gauss_legendre_on(q, a + p as f64 * step, a + (p + 1) as f64 * step)).collect()
}

/// A point rule on `R^d` (points padded to three coordinates).
#[derive(Debug, Clone)]
pub struct PointRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

impl PointRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate<F: Fn(&[f64; 3]) -> f64>(&self, f: F) -> f64 {
        self.points.iter().zip(&self.weights).map(|(p, w)| w * f(p)).sum()
    }
}

/// Rule on the unit sphere `S^{d-1}`: uniform angles for `d = 2`,
/// Gauss-Legendre in `cos(polar)` times uniform azimuth for `d = 3`.
pub fn sphere_rule(d: usize, q: usize) -> PointRule {
    let mut points = Vec::new();
    let mut weights = Vec::new();
    if d == 2 {
        for k in 0..q {
            let t = 2.0 * PI * (k as f64 + 0.5) / q as f64;
            points.push([t.cos(), t.sin(), 0.0]);
            weights.push(2.0 * PI / q as f64);
        }
    } else {
        let polar = gauss_legendre(q);
        let naz = 2 * q;
        for (c, wc) in polar.0.iter().zip(&polar.1) {
            let s = (1.0 - c * c).sqrt();
            for k in 0..naz {
                let t = 2.0 * PI * (k as f64 + 0.5) / naz as f64;
                points.push([s * t.cos(), s * t.sin(), *c]);
                weights.push(wc * 2.0 * PI / naz as f64);
            }
        }
    }
    PointRule { points, weights }
}

/// Rule on the unit ball for a radial density `w(r)`: radial Gauss-Legendre
/// with `qr` nodes times a [`sphere_rule`] with parameter `qa`.
pub fn ball_rule<W: Fn(f64) -> f64>(d: usize, qr: usize, qa: usize, density: W) -> PointRule {
    let radial = gauss_legendre_on(qr, 0.0, 1.0);
    let sphere = sphere_rule(d, qa);
    let mut points = Vec::with_capacity(radial.len() * sphere.len());
    let mut weights = Vec::with_capacity(radial.len() * sphere.len());
    for &(r, wr) in &radial {
        let radial_weight = wr * r.powi(d as i32 - 1) * density(r);
        for (p, ws) in sphere.points.iter().zip(&sphere.weights) {
            points.push([r * p[0], r * p[1], r * p[2]]);
            weights.push(radial_weight * ws);
        }
    }
    PointRule { points, weights }
}
