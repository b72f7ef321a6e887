//! Euler–Poisson operator `ℰ_β = ∂L/∂x^β − D ∂L/∂u^β + D² ∂L/∂u̇^β`.
//!
//! Each slot component is seeded with a dual number inside a Taylor series
//! in the curve parameter, so one evaluation yields a partial derivative
//! together with its first two total derivatives along the jet.

use crate::autodiff::{Dual, Taylor};
use crate::error::{Error, Result};
use crate::frenet::{inverse_derivatives, reparametrize_jet, Jet, ParamKind};
use crate::geometry::{MetricSpace, Variance, Vector};

use super::lagrangian::{CoordinateKind, LagrangianModel};

type T3 = Taylor<Dual<f64>, 3>;

/// A time-chart jet: `t` plus the spatial jet `(x^i, v, v', v'', v''')`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeJet {
    pub t: f64,
    pub spatial: Jet,
}

fn series(c0: f64, c1: f64, c2: f64, seed: bool) -> T3 {
    let d = if seed { 1.0 } else { 0.0 };
    Taylor::new([Dual::new(c0, d), Dual::constant(c1), Dual::constant(c2 / 2.0)])
}

fn require_order(j: &Jet, order: usize) -> Result<()> {
    if j.order() < order {
        return Err(Error::Order(format!("Euler–Poisson operator needs order {order}, got {}", j.order())));
    }
    Ok(())
}

fn finite(v: Vector) -> Result<Vector> {
    if v.components().iter().all(|c| c.is_finite()) {
        Ok(v)
    } else {
        Err(Error::Differentiation("non-finite Euler–Poisson value".into()))
    }
}

/// `(slot, component)` selector for the seeded dual direction.
type Seed = Option<(usize, usize)>;

fn assemble(n: usize, mut eval: impl FnMut(Seed) -> Result<T3>) -> Result<Vec<f64>> {
    let mut out = vec![0.0; n];
    for (b, o) in out.iter_mut().enumerate() {
        let px = eval(Some((0, b)))?;
        let pu = eval(Some((1, b)))?;
        let pud = eval(Some((2, b)))?;
        *o = px.c[0].deriv - pu.c[1].deriv + 2.0 * pud.c[2].deriv;
    }
    Ok(out)
}

fn slot_series(v: [&Vector; 3], seed: Seed, slot: usize) -> Vec<T3> {
    let [a, b, c] = v;
    (0..a.dim()).map(|i| series(a[i], b[i], c[i], seed == Some((slot, i)))).collect()
}

/// Euler–Poisson covector of a homogeneous Lagrangian at an order-4 jet.
pub fn euler_poisson(l: &LagrangianModel, j: &Jet, m: &MetricSpace) -> Result<Vector> {
    if l.coordinate_kind() != CoordinateKind::Homogeneous {
        return Err(Error::Chart(format!("'{}' is a time-chart Lagrangian; use euler_poisson_time", l.id)));
    }
    require_order(j, 4)?;
    if j.dim() != m.dim() {
        return Err(Error::Dimension(format!("jet dim {} vs metric dim {}", j.dim(), m.dim())));
    }
    let d = j.derivs();
    let n = j.dim();
    let out = assemble(n, |seed| {
        let x = slot_series([&j.x, &d[0], &d[1]], seed, 0);
        let u = slot_series([&d[0], &d[1], &d[2]], seed, 1);
        let ud = slot_series([&d[1], &d[2], &d[3]], seed, 2);
        l.eval(&x, &u, &ud, m)
    })?;
    finite(Vector::new(&out, Variance::Lower))
}

/// Euler–Poisson covector `E_i` of a time-chart Lagrangian, with spatial
/// lower index.
pub fn euler_poisson_time(l: &LagrangianModel, tj: &TimeJet, m: &MetricSpace) -> Result<Vector> {
    if l.coordinate_kind() != CoordinateKind::Time {
        return Err(Error::Chart(format!("'{}' is a homogeneous Lagrangian; use euler_poisson", l.id)));
    }
    let j = &tj.spatial;
    require_order(j, 4)?;
    if j.dim() + 1 != m.dim() {
        return Err(Error::Dimension(format!("spatial jet dim {} vs metric dim {}", j.dim(), m.dim())));
    }
    let d = j.derivs();
    let n = j.dim();
    let t = Taylor::new([Dual::constant(tj.t), Dual::constant(1.0), Dual::constant(0.0)]);
    let out = assemble(n, |seed| {
        let x = slot_series([&j.x, &d[0], &d[1]], seed, 0);
        let v = slot_series([&d[0], &d[1], &d[2]], seed, 1);
        let vp = slot_series([&d[1], &d[2], &d[3]], seed, 2);
        l.eval_time(t, &x, &v, &vp, m)
    })?;
    finite(Vector::new(&out, Variance::Lower))
}

/// Re-expresses a homogeneous jet with `t = x⁰` as the parameter.
pub fn to_time_chart(j: &Jet) -> Result<TimeJet> {
    let d = j.derivs();
    if j.order() < 1 || d[0][0] <= 0.0 {
        return Err(Error::Chart("time chart needs u⁰ > 0".into()));
    }
    let s = std::array::from_fn(|k| if k < j.order() { d[k][0] } else { 0.0 });
    let zeta = inverse_derivatives(s);
    let rj = reparametrize_jet(j, &zeta)?;
    let n = j.dim();
    let spatial = |v: &Vector| Vector::upper(&v.components()[1..n]);
    let derivs: Vec<Vector> = rj.derivs().iter().map(spatial).collect();
    Ok(TimeJet { t: j.x[0], spatial: Jet::new(spatial(&j.x), &derivs, ParamKind::Generic)? })
}

/// Homogeneous jet `x⁰ = t` of a time-chart jet.
pub fn from_time_chart(tj: &TimeJet) -> Result<Jet> {
    let lift = |t: f64, v: &Vector| {
        let mut c = vec![t];
        c.extend_from_slice(v.components());
        Vector::upper(&c)
    };
    let derivs: Vec<Vector> =
        tj.spatial.derivs().iter().enumerate().map(|(k, v)| lift(if k == 0 { 1.0 } else { 0.0 }, v)).collect();
    Jet::new(lift(tj.t, &tj.spatial.x), &derivs, ParamKind::Generic)
}

/// Partial derivatives `(∂L/∂x, ∂L/∂u, ∂L/∂u̇)` by forward-mode duals.
pub fn gradient(l: &LagrangianModel, x: &[f64], u: &[f64], ud: &[f64], m: &MetricSpace) -> Result<[Vec<f64>; 3]> {
    let n = x.len();
    let lift = |v: &[f64], seed: Option<usize>| -> Vec<Dual<f64>> {
        (0..n).map(|i| Dual::new(v[i], if seed == Some(i) { 1.0 } else { 0.0 })).collect()
    };
    let mut out: [Vec<f64>; 3] = Default::default();
    for (slot, g) in out.iter_mut().enumerate() {
        for b in 0..n {
            let pick = |s: usize| if s == slot { Some(b) } else { None };
            let (xs, us, uds) = (lift(x, pick(0)), lift(u, pick(1)), lift(ud, pick(2)));
            let val = match l.coordinate_kind() {
                CoordinateKind::Homogeneous => l.eval(&xs, &us, &uds, m)?,
                CoordinateKind::Time => l.eval_time(xs[0], &xs[1..], &us[1..], &uds[1..], m)?,
            };
            g.push(val.deriv);
        }
    }
    Ok(out)
}

/// Same partials by Richardson-extrapolated central differences.
pub fn gradient_fd(l: &LagrangianModel, x: &[f64], u: &[f64], ud: &[f64], m: &MetricSpace) -> Result<[Vec<f64>; 3]> {
    l.value(x, u, ud, m)?;
    let n = x.len();
    let mut out: [Vec<f64>; 3] = Default::default();
    for (slot, g) in out.iter_mut().enumerate() {
        for b in 0..n {
            let f = |e: f64| {
                let mut args = [x.to_vec(), u.to_vec(), ud.to_vec()];
                args[slot][b] += e;
                l.value(&args[0], &args[1], &args[2], m).unwrap_or(f64::NAN)
            };
            g.push(crate::autodiff::richardson_derivative(f, 0.0, 1e-3));
        }
    }
    Ok(out)
}

/// Largest relative deviation between [`gradient`] and [`gradient_fd`],
/// each entry scaled by `max(1, |entry|)`.
pub fn backend_self_test(l: &LagrangianModel, x: &[f64], u: &[f64], ud: &[f64], m: &MetricSpace) -> Result<f64> {
    let ad = gradient(l, x, u, ud, m)?;
    let fd = gradient_fd(l, x, u, ud, m)?;
    let mut worst: f64 = 0.0;
    for (a, f) in ad.iter().flatten().zip(fd.iter().flatten()) {
        let r = (a - f).abs() / a.abs().max(1.0);
        worst = worst.max(if r.is_nan() { f64::INFINITY } else { r });
    }
    Ok(worst)
}
