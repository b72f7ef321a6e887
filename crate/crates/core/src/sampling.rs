//! Random admissible jets for property checks.

use rand::Rng;

use crate::error::Result;
use crate::frenet::{Jet, ParamKind};
use crate::geometry::{MetricSpace, Vector};

pub fn random_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize, scale: f64) -> Vector {
    let c: Vec<f64> = (0..dim).map(|_| rng.gen_range(-scale..scale)).collect();
    Vector::upper(&c)
}

/// A velocity with `|u·u|` bounded away from zero; timelike with `u⁰ > 0`
/// for Lorentz metrics.
pub fn random_velocity<R: Rng + ?Sized>(rng: &mut R, m: &MetricSpace) -> Vector {
    let n = m.dim();
    loop {
        let mut v = random_vector(rng, n, 1.0);
        if m.is_lorentz() {
            let spatial: f64 = (1..n).map(|i| v[i] * v[i]).sum::<f64>().sqrt();
            v.components_mut()[0] = spatial + rng.gen_range(0.3..1.5);
        }
        let uu = m.dot(&v, &v);
        if uu.abs() > 0.1 && v.max_abs() > 0.2 {
            return v;
        }
    }
}

/// Generic-parameter jet of the given order.
pub fn random_jet<R: Rng + ?Sized>(rng: &mut R, m: &MetricSpace, order: usize) -> Result<Jet> {
    let n = m.dim();
    let x = random_vector(rng, n, 2.0);
    let mut d = vec![random_velocity(rng, m)];
    for _ in 1..order {
        d.push(random_vector(rng, n, 1.0));
    }
    Jet::new(x, &d, ParamKind::Generic)
}

/// Natural-parameter jet (unit speed chain satisfied) of the given order.
pub fn random_natural_jet<R: Rng + ?Sized>(rng: &mut R, m: &MetricSpace, order: usize) -> Result<Jet> {
    let j = random_jet(rng, m, order)?;
    Jet::natural_from_raw(j.x, j.derivs(), m)
}
