//! Pointwise algebra of the constrained (multiplier) problem on natural jets.
//!
//! Notation: `u = x'`, `u̇ = x''`, `ü = x'''`, `u⃛ = x''''`; squares are raw
//! metric inner products.

use serde::Serialize;

use crate::autodiff::{Scalar, Taylor};
use crate::error::{Error, Result};
use crate::frenet::{Jet, ZERO_CURVATURE};
use crate::geometry::{MetricSpace, Vector};

use super::lagrangian::dotg;

struct Slots {
    u: Vector,
    ud: Vector,
    udd: Vector,
    uddd: Vector,
    ud2: f64,
}

fn slots(j: &Jet, m: &MetricSpace) -> Result<Slots> {
    if j.order() < 4 {
        return Err(Error::Order(format!("needs a jet of order 4, got {}", j.order())));
    }
    let d = j.derivs();
    let ud2 = m.dot(&d[1], &d[1]);
    if ud2.abs() <= ZERO_CURVATURE {
        return Err(Error::ZeroCurvature(format!("u̇·u̇ = {ud2:e}")));
    }
    Ok(Slots { u: d[0], ud: d[1], udd: d[2], uddd: d[3], ud2 })
}

/// `(1 − 2λ, dλ/ds)` recovered pointwise from the jet.
pub fn multiplier_values(j: &Jet, omega2: f64, m: &MetricSpace) -> Result<(f64, f64)> {
    let s = slots(j, m)?;
    if omega2 == 0.0 {
        return Err(Error::Argument("ω² must be nonzero".into()));
    }
    let one_minus_2lambda = -m.dot(&s.uddd, &s.ud) / (omega2 * s.ud2);
    let dlambda = -1.5 * m.dot(&s.udd, &s.ud) / omega2;
    Ok((one_minus_2lambda, dlambda))
}

/// Left side of the multiplier equation with `λ`, `λ'` eliminated:
/// `u⃛ − (u⃛·u̇/u̇²) u̇ + 3(ü·u̇) u`.
pub fn eliminated_residual(j: &Jet, m: &MetricSpace) -> Result<Vector> {
    let s = slots(j, m)?;
    Ok(s.uddd - s.ud * (m.dot(&s.uddd, &s.ud) / s.ud2) + s.u * (3.0 * m.dot(&s.udd, &s.ud)))
}

/// Same residual with `λ`, `λ'` supplied: `u⃛ + (1 − 2λ)ω² u̇ − 2λ'ω² u`.
pub fn multiplier_residual(j: &Jet, omega2: f64, one_minus_2lambda: f64, dlambda: f64) -> Result<Vector> {
    let d = j.derivs();
    if j.order() < 4 {
        return Err(Error::Order("needs a jet of order 4".into()));
    }
    Ok(d[3] + d[1] * (one_minus_2lambda * omega2) - d[0] * (2.0 * dlambda * omega2))
}

/// Scalar corollary of the multiplier equation (contracted with `ü`):
/// `u⃛·ü − (u⃛·u̇)(u̇·ü)/u̇² − 3u̇²(ü·u̇)`.
pub fn contracted_value(j: &Jet, m: &MetricSpace) -> Result<f64> {
    let s = slots(j, m)?;
    let uddu = m.dot(&s.udd, &s.ud);
    Ok(m.dot(&s.uddd, &s.udd) - m.dot(&s.uddd, &s.ud) * uddu / s.ud2 - 3.0 * s.ud2 * uddu)
}

/// `Ã/2 = (3/2) u̇² + (u⃛·u̇)/u̇²`.
pub fn a_integral(j: &Jet, m: &MetricSpace) -> Result<f64> {
    let s = slots(j, m)?;
    Ok(1.5 * s.ud2 + m.dot(&s.uddd, &s.ud) / s.ud2)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Compatibility {
    /// `u⁗·u̇ + 6(ü·u̇)u̇² − (u⃛·u̇)(ü·u̇)/u̇²`.
    pub vector_form: f64,
    /// `k k‴ − k′k″ + k³k′ − 2kτ²k′ − 3k²ττ′`; definite metrics only.
    pub frenet_form: Option<f64>,
    /// `d/ds(1 − 2λ) + 2λ'`, scaled by `−ω² u̇²`; equals the vector form
    /// plus [`contracted_value`].
    pub multiplier_gap: f64,
}

/// Compatibility of the two multiplier expressions, given the fifth
/// derivative `fifth = x⁽⁵⁾` of a natural jet.
pub fn compatibility_residual(j: &Jet, fifth: &Vector, m: &MetricSpace) -> Result<Compatibility> {
    let s = slots(j, m)?;
    let uddu = m.dot(&s.udd, &s.ud);
    let udddu = m.dot(&s.uddd, &s.ud);
    let q = m.dot(fifth, &s.ud);
    let vector_form = q + 6.0 * uddu * s.ud2 - udddu * uddu / s.ud2;
    let multiplier_gap = q + m.dot(&s.uddd, &s.udd) - 2.0 * udddu * uddu / s.ud2 + 3.0 * uddu * s.ud2;
    let frenet_form = if m.is_definite() { Some(frenet_compat(&s, fifth, m)) } else { None };
    Ok(Compatibility { vector_form, frenet_form, multiplier_gap })
}

fn frenet_compat(s: &Slots, fifth: &Vector, m: &MetricSpace) -> f64 {
    type T = Taylor<f64, 4>;
    let n = s.u.dim();
    let sig = m.signature();
    let ser = |c: [&Vector; 4]| -> Vec<T> {
        (0..n).map(|i| T::new([c[0][i], c[1][i], c[2][i] / 2.0, c[3][i] / 6.0])).collect()
    };
    let zero = Vector::zeros(n);
    let u = ser([&s.u, &s.ud, &s.udd, &s.uddd]);
    let ud = ser([&s.ud, &s.udd, &s.uddd, fifth]);
    let udd = ser([&s.udd, &s.uddd, fifth, &zero]);
    let vs = [&u, &ud, &udd];
    let g = |a: usize, b: usize| dotg(sig, vs[a], vs[b]);
    let gm = [[g(0, 0), g(0, 1), g(0, 2)], [g(1, 0), g(1, 1), g(1, 2)], [g(2, 0), g(2, 1), g(2, 2)]];
    let g2 = gm[0][0] * gm[1][1] - gm[0][1] * gm[0][1];
    let g3 = gm[0][0] * (gm[1][1] * gm[2][2] - gm[1][2] * gm[2][1])
        - gm[0][1] * (gm[1][0] * gm[2][2] - gm[1][2] * gm[2][0])
        + gm[0][2] * (gm[1][0] * gm[2][1] - gm[1][1] * gm[2][0]);
    let k = (g2 / gm[0][0].powi(3)).sqrt();
    let tau2 = g3 / (g2 * g2);
    let (k0, k1, k2, k3) = (k.derivative(0), k.derivative(1), k.derivative(2), k.derivative(3));
    let (t2, t2d) = (tau2.derivative(0), tau2.derivative(1));
    k0 * k3 - k1 * k2 + k0.powi(3) * k1 - 2.0 * k0 * t2 * k1 - 1.5 * k0 * k0 * t2d
}

/// Adjusts `raw` along `u` so that the fifth-order unit-speed relation
/// `u·x⁽⁵⁾ = −4 u̇·u⃛ − 3 ü·ü` holds.
pub fn project_fifth(j: &Jet, raw: &Vector, m: &MetricSpace) -> Result<Vector> {
    let s = slots(j, m)?;
    let uu = m.dot(&s.u, &s.u);
    let target = -4.0 * m.dot(&s.ud, &s.uddd) - 3.0 * m.dot(&s.udd, &s.udd);
    Ok(*raw + s.u * ((target - m.dot(&s.u, raw)) / uu))
}

/// Fifth derivative obtained by differentiating the closed fourth-order
/// equation `u⃛ = −((3/2)u̇² − A/2) u̇ − 3(u̇·ü) u` once along the jet.
pub fn prolong_closed(j: &Jet, a: f64, m: &MetricSpace) -> Result<Vector> {
    let s = slots(j, m)?;
    let uddu = m.dot(&s.udd, &s.ud);
    let c = 1.5 * s.ud2 - 0.5 * a;
    Ok(s.ud * (-6.0 * uddu) - s.udd * c - s.u * (3.0 * (m.dot(&s.udd, &s.udd) + m.dot(&s.ud, &s.uddd))))
}
