//! Hand-coded Euler–Poisson expressions and their shape extraction.

use serde::Serialize;

use crate::autodiff::{richardson_derivative, Scalar, Taylor};
use crate::error::{Error, Result};
use crate::frenet::{reparametrize_jet, Jet};
use crate::geometry::{MetricSpace, Variance, Vector};

use super::euler::euler_poisson;
use super::lagrangian::{dotg, LagrangianModel};

/// Jacobian entries of genuinely third-order expressions with respect to the
/// fourth derivative must vanish to this level.
pub const THIRD_ORDER_LEAK_TOL: f64 = 1e-10;

/// Reparametrization used by [`shape_report`] for its invariance column.
pub const DEFAULT_XI: [f64; 4] = [1.3, 0.4, -0.7, 0.25];

#[derive(Clone, Debug, PartialEq)]
pub enum EulerPoissonExpr {
    /// Two-dimensional third-order equation with mass parameter `m`.
    Planar { m: f64 },
    /// Three-dimensional analogue built on the cross product.
    Spatial { m: f64 },
    /// Four-dimensional spinning-particle expression.
    Spin { m0: f64, sigma: Vector },
    /// `d/dζ` of the conserved covector of the fourth-order problem.
    Braced { a: f64 },
    /// `E_α = (d³x)_α`; symmetric leading matrix.
    ThirdDerivative,
    /// Euler–Poisson operator applied to a homogeneous Lagrangian.
    Lagrangian(LagrangianModel),
}

impl EulerPoissonExpr {
    pub fn declared_order(&self) -> usize {
        match self {
            EulerPoissonExpr::Braced { .. } | EulerPoissonExpr::Lagrangian(_) => 4,
            _ => 3,
        }
    }

    /// Homogeneity weight `w` in `ℰ(jet∘ξ) = ξ'^w ℰ(jet)` for the invariant
    /// members of the family; `Planar` has none and reports 1.
    pub fn natural_weight(&self) -> i32 {
        match self {
            EulerPoissonExpr::Spin { .. } => 4,
            EulerPoissonExpr::ThirdDerivative => 3,
            _ => 1,
        }
    }

    pub fn eval(&self, j: &Jet, m: &MetricSpace) -> Result<Vector> {
        let order = self.declared_order();
        if j.order() < order {
            return Err(Error::Order(format!("expression needs a jet of order {order}, got {}", j.order())));
        }
        if j.dim() != m.dim() {
            return Err(Error::Dimension(format!("jet dim {} vs metric dim {}", j.dim(), m.dim())));
        }
        let d = j.derivs();
        let (u, ud, udd) = (d[0], d[1], d[2]);
        let uu = m.dot(&u, &u);
        let uud = m.dot(&u, &ud);
        let n = uu.abs().sqrt();
        let mass_term = |mass: f64| (m.lower(&ud) * uu - m.lower(&u) * uud) * mass;
        let need_dim = |k: usize| {
            if m.dim() == k {
                Ok(())
            } else {
                Err(Error::Dimension(format!("expression lives in {k} dimensions, metric has {}", m.dim())))
            }
        };
        match self {
            EulerPoissonExpr::Planar { m: mass } => {
                need_dim(2)?;
                let e_udd = m.epsilon_contract(&[udd])?;
                let e_ud = m.epsilon_contract(&[ud])?;
                Ok(e_udd * n.powi(-3) - e_ud * (3.0 * uud * n.powi(-5)) + mass_term(*mass) * n.powi(-3))
            }
            EulerPoissonExpr::Spatial { m: mass } => {
                need_dim(3)?;
                let a = m.epsilon_contract(&[udd, u])?;
                let b = m.epsilon_contract(&[ud, u])?;
                Ok(a * n.powi(-3) - b * (3.0 * uud * n.powi(-5)) + mass_term(*mass) * n.powi(-3))
            }
            EulerPoissonExpr::Spin { m0, sigma } => {
                need_dim(4)?;
                let a = m.epsilon_contract(&[udd, u, *sigma])?;
                let b = m.epsilon_contract(&[ud, u, *sigma])?;
                Ok(a - b * (3.0 * uud / uu) - mass_term(*m0))
            }
            EulerPoissonExpr::Braced { a } => {
                let uddd = d[3];
                let dim = j.dim();
                let ser = |p: &Vector, q: &Vector| -> Vec<Taylor<f64, 2>> {
                    (0..dim).map(|i| Taylor::new([p[i], q[i]])).collect()
                };
                let c = braced_covector(&ser(&u, &ud), &ser(&ud, &udd), &ser(&udd, &uddd), *a, m.signature());
                let out: Vec<f64> = c.iter().map(|t| t.c[1]).collect();
                Ok(Vector::new(&out, Variance::Lower))
            }
            EulerPoissonExpr::ThirdDerivative => Ok(m.lower(&udd)),
            EulerPoissonExpr::Lagrangian(l) => euler_poisson(l, j, m),
        }
    }
}

/// Conserved covector of the fourth-order problem, lower index:
/// `−2ü/N³ + 6(u·u̇)u̇/N⁵ + (2(u·ü)/N⁵ − u̇²/N⁵ − 5(u·u̇)²/N⁷ + A/N) u`
/// with `N = ‖u‖` and `ü` the third derivative of position.
pub fn braced_covector<S: Scalar>(u: &[S], ud: &[S], udd: &[S], a: f64, sig: &[f64]) -> Vec<S> {
    let uu = dotg(sig, u, u);
    let n = uu.abs().sqrt();
    let uud = dotg(sig, u, ud);
    let uudd = dotg(sig, u, udd);
    let udud = dotg(sig, ud, ud);
    let n3 = n.powi(-3);
    let n5 = n.powi(-5);
    let coef = (uudd.scale(2.0) - udud) * n5 - (uud * uud).scale(5.0) * n.powi(-7) + n.recip().scale(a);
    (0..u.len())
        .map(|i| (-udd[i].scale(2.0) * n3 + (uud * ud[i]).scale(6.0) * n5 + coef * u[i]).scale(sig[i]))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShapeReport {
    /// `A[α][β] = ∂ℰ_α / ∂(d^k x)^β` for the top slot `k` (3 or 4).
    pub a: Vec<Vec<f64>>,
    pub antisymmetry_residual: f64,
    /// `|u^α ℰ_α|`.
    pub weierstrass_residual: f64,
    /// `max|u| · max|ℰ|`, the natural scale of the Weierstrass contraction.
    pub weierstrass_scale: f64,
    pub invariance_residual: f64,
    /// Largest `|∂ℰ/∂(d⁴x)|` of a third-order expression (zero otherwise).
    pub fourth_order_leak: f64,
}

fn slot_jacobian(e: &EulerPoissonExpr, j: &Jet, m: &MetricSpace, slot: usize) -> Result<Vec<Vec<f64>>> {
    let n = j.dim();
    let base = j.deriv(slot)?;
    let h = 1e-2 * base.max_abs().max(1.0);
    let mut cols = Vec::with_capacity(n);
    for b in 0..n {
        let err = std::cell::RefCell::new(None);
        let col: Vec<f64> = (0..n)
            .map(|a| {
                richardson_derivative(
                    |t| {
                        let mut v = base;
                        v.components_mut()[b] += t;
                        match e.eval(&j.with_deriv(slot, v), m) {
                            Ok(r) => r[a],
                            Err(x) => {
                                *err.borrow_mut() = Some(x);
                                f64::NAN
                            }
                        }
                    },
                    0.0,
                    h,
                )
            })
            .collect();
        if let Some(x) = err.into_inner() {
            return Err(x);
        }
        if col.iter().any(|c| !c.is_finite()) {
            return Err(Error::Differentiation("non-finite Jacobian entry".into()));
        }
        cols.push(col);
    }
    Ok((0..n).map(|a| (0..n).map(|b| cols[b][a]).collect()).collect())
}

/// Extracts the leading matrix and the Weierstrass and invariance residuals.
pub fn shape_report(e: &EulerPoissonExpr, j: &Jet, m: &MetricSpace) -> Result<ShapeReport> {
    let order = e.declared_order();
    let val = e.eval(j, m)?;
    let a = slot_jacobian(e, j, m, order)?;
    let mut fourth_order_leak = 0.0;
    if order == 3 && j.order() >= 4 {
        let leak = slot_jacobian(e, j, m, 4)?;
        fourth_order_leak = leak.iter().flatten().fold(0.0_f64, |acc, x| acc.max(x.abs()));
        if fourth_order_leak > THIRD_ORDER_LEAK_TOL {
            return Err(Error::Differentiation(format!(
                "third-order expression depends on the fourth derivative ({fourth_order_leak:e})"
            )));
        }
    }
    let n = j.dim();
    let mut antisymmetry_residual: f64 = 0.0;
    for (r, row) in a.iter().enumerate() {
        for (c, x) in row.iter().enumerate() {
            antisymmetry_residual = antisymmetry_residual.max((x + a[c][r]).abs());
        }
    }
    let u = j.u();
    let weierstrass_residual = (0..n).map(|i| u[i] * val[i]).sum::<f64>().abs();
    let invariance_residual = parametric_invariance_check(e, j, &DEFAULT_XI, m, e.natural_weight())?;
    Ok(ShapeReport {
        a,
        antisymmetry_residual,
        weierstrass_residual,
        weierstrass_scale: u.max_abs() * val.max_abs(),
        invariance_residual,
        fourth_order_leak,
    })
}

/// `max|ℰ(jet∘ξ) − ξ'^w ℰ(jet)| / max|ℰ(jet)|`, absolute when `ℰ(jet) = 0`.
pub fn parametric_invariance_check(
    e: &EulerPoissonExpr,
    j: &Jet,
    xi: &[f64],
    m: &MetricSpace,
    weight: i32,
) -> Result<f64> {
    let g1 = xi.first().copied().unwrap_or(0.0);
    let rj = reparametrize_jet(j, xi)?;
    let base = e.eval(j, m)?;
    let moved = e.eval(&rj, m)?;
    let diff = (moved - base * g1.powi(weight)).max_abs();
    let scale = base.max_abs();
    Ok(if scale > 0.0 { diff / scale } else { diff })
}
