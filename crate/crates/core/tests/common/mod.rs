#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use worldline_lab::frenet::{Jet, ParamKind};
use worldline_lab::geometry::Vector;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Euclidean unit-speed helix with curvature `k` and torsion `tau`, at
/// parameter `s`, with derivatives up to `order` (at most 5; the fifth
/// derivative is returned separately).
pub fn helix(k: f64, tau: f64, s: f64, order: usize) -> (Jet, Vector) {
    let w = (k * k + tau * tau).sqrt();
    let r = k / (w * w);
    let c = tau / w;
    let d = |n: u32| -> Vector {
        let p = w.powi(n as i32) * r;
        let (cs, sn) = ((w * s).cos(), (w * s).sin());
        // n-th derivative of (cos, sin) cycles through (cos, sin), (-sin, cos), ...
        let (a, b) = match n % 4 {
            0 => (cs, sn),
            1 => (-sn, cs),
            2 => (-cs, -sn),
            _ => (sn, -cs),
        };
        let z = match n {
            0 => c * s,
            1 => c,
            _ => 0.0,
        };
        Vector::upper(&[p * a, p * b, z])
    };
    let derivs: Vec<Vector> = (1..=order as u32).map(d).collect();
    (Jet::new(d(0), &derivs, ParamKind::Natural).unwrap(), d(5))
}

/// Unit-speed circle of radius `r`; clockwise when `clockwise`.
pub fn circle(r: f64, s: f64, clockwise: bool) -> Jet {
    let sg = if clockwise { -1.0 } else { 1.0 };
    let w = sg / r;
    let d = |n: i32| -> Vector {
        let p = r * w.powi(n);
        let (cs, sn) = ((w * s).cos(), (w * s).sin());
        let (a, b) = match n % 4 {
            0 => (cs, sn),
            1 => (-sn, cs),
            2 => (-cs, -sn),
            _ => (sn, -cs),
        };
        Vector::upper(&[p * a, p * b])
    };
    Jet::new(d(0), &[d(1), d(2), d(3), d(4)], ParamKind::Natural).unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

pub fn vrel(a: &Vector, b: &Vector) -> f64 {
    (*a - *b).max_abs() / a.max_abs().max(b.max_abs()).max(1e-300)
}
