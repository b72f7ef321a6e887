//! Second-order Lagrangians, evaluable over any [`Scalar`].

use serde::{Deserialize, Serialize};

use crate::autodiff::Scalar;
use crate::error::{Error, Result};
use crate::geometry::MetricSpace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoordinateKind {
    /// `(x^α, u^α, u̇^α)` with a free curve parameter.
    Homogeneous,
    /// `(t, x^i, v^i, v'^i)` with `t = x⁰`.
    Time,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum LagrangianForm {
    /// `ε_{αβ} u^α u̇^β / ‖u‖³ − m ‖u‖` (two dimensions).
    L2d { m: f64 },
    /// `−m ‖u‖`.
    Length { m: f64 },
    /// `−½ (u·u − u̇·u̇ / ω²)`.
    R34 { omega2: f64 },
    /// `u·u − 1`.
    Psi37,
    /// `½ ((u²u̇² − (u·u̇)²) / ‖u‖⁵ + A ‖u‖)`.
    Hom65 { a: f64 },
    /// `½ v'² / (1 + v²)^{3/2}`.
    L1,
    /// `−(v'·v)² / (2 (1 + v²)^{5/2})`.
    L2,
    /// `(3/2) k₀² √(1 + v²)`; `k0_sq` is the raw metric square.
    L3 { k0_sq: f64 },
    /// `−ω² √(1 + v²)`.
    LFree { omega2: f64 },
    /// `L1 + L2 + L3 + LFree`.
    LTimeTotal { k0_sq: f64, omega2: f64 },
    /// `½ (k² + A) √(1 + v²)` with `k²` the time-chart curvature square.
    LCombined { a: f64 },
    /// `ℒ(x, u, u̇) = u⁰ L(t, x^i, v^i, v'^i)` for a time-chart `L`.
    Homogenized(Box<LagrangianModel>),
    /// `L(t, x, v, v') = ℒ((t, x), (1, v), (0, v'))` for a homogeneous `ℒ`.
    TimeChart(Box<LagrangianModel>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LagrangianModel {
    pub id: String,
    pub form: LagrangianForm,
}

/// Catalog IDs understood by [`LagrangianModel::catalog`].
pub const CATALOG_IDS: &[&str] = &["l2d", "r34", "psi37", "l1", "l2", "l3", "lfree", "ltime_total", "lhom65"];

/// Parameters for catalog construction; unused fields are ignored.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogParams {
    pub m: f64,
    pub omega2: f64,
    pub k0_sq: f64,
    pub a: f64,
}

impl Default for CatalogParams {
    fn default() -> Self {
        CatalogParams { m: 1.0, omega2: 5.0, k0_sq: 1.0, a: -7.0 }
    }
}

pub(crate) fn dotg<S: Scalar>(sig: &[f64], a: &[S], b: &[S]) -> S {
    let mut acc = S::zero();
    for i in 0..a.len() {
        acc += (a[i] * b[i]).scale(sig[i]);
    }
    acc
}

impl LagrangianModel {
    pub fn new(id: impl Into<String>, form: LagrangianForm) -> Self {
        LagrangianModel { id: id.into(), form }
    }

    pub fn catalog(id: &str, p: CatalogParams) -> Result<Self> {
        use LagrangianForm::*;
        let form = match id {
            "l2d" => L2d { m: p.m },
            "r34" => R34 { omega2: p.omega2 },
            "psi37" => Psi37,
            "l1" => L1,
            "l2" => L2,
            "l3" => L3 { k0_sq: p.k0_sq },
            "lfree" => LFree { omega2: p.omega2 },
            "ltime_total" => LTimeTotal { k0_sq: p.k0_sq, omega2: p.omega2 },
            "lhom65" => Hom65 { a: p.a },
            "length" => Length { m: p.m },
            "lcombined" => LCombined { a: p.a },
            other => return Err(Error::Argument(format!("unknown Lagrangian id '{other}'"))),
        };
        Ok(Self::new(id, form))
    }

    pub fn coordinate_kind(&self) -> CoordinateKind {
        use LagrangianForm::*;
        match self.form {
            L2d { .. } | Length { .. } | R34 { .. } | Psi37 | Hom65 { .. } | Homogenized(_) => {
                CoordinateKind::Homogeneous
            }
            L1 | L2 | L3 { .. } | LFree { .. } | LTimeTotal { .. } | LCombined { .. } | TimeChart(_) => {
                CoordinateKind::Time
            }
        }
    }

    /// Evaluates a homogeneous-coordinate Lagrangian.
    pub fn eval<S: Scalar>(&self, x: &[S], u: &[S], ud: &[S], m: &MetricSpace) -> Result<S> {
        use LagrangianForm::*;
        let sig = m.signature();
        let uu = || dotg(sig, u, u);
        let norm = || uu().abs().sqrt();
        match &self.form {
            L2d { m: mass } => {
                if m.dim() != 2 {
                    return Err(Error::Dimension("l2d lives in two dimensions".into()));
                }
                let eps = (u[0] * ud[1] - u[1] * ud[0]).scale(m.orientation());
                let n = norm();
                Ok(eps / (n * n * n) - n.scale(*mass))
            }
            Length { m: mass } => Ok(-norm().scale(*mass)),
            R34 { omega2 } => Ok((uu() - dotg(sig, ud, ud).scale(1.0 / omega2)).scale(-0.5)),
            Psi37 => Ok(uu() - S::one()),
            Hom65 { a } => {
                let n = norm();
                let uud = dotg(sig, u, ud);
                let gram = uu() * dotg(sig, ud, ud) - uud * uud;
                Ok((gram / n.powi(5) + n.scale(*a)).scale(0.5))
            }
            Homogenized(inner) => {
                let u0 = u[0];
                if u0.re() <= 0.0 {
                    return Err(Error::Chart(format!("u⁰ = {} must be positive", u0.re())));
                }
                let n = u.len();
                let inv = u0.recip();
                let v: Vec<S> = (1..n).map(|i| u[i] * inv).collect();
                let inv3 = inv * inv * inv;
                let vp: Vec<S> = (1..n).map(|i| (ud[i] * u0 - u[i] * ud[0]) * inv3).collect();
                Ok(u0 * inner.eval_time(x[0], &x[1..], &v, &vp, m)?)
            }
            _ => Err(Error::Chart(format!("'{}' is a time-chart Lagrangian", self.id))),
        }
    }

    /// Evaluates a time-chart Lagrangian; `v` and `vp` carry the spatial
    /// components and contract with the spatial part of the signature.
    pub fn eval_time<S: Scalar>(&self, t: S, x: &[S], v: &[S], vp: &[S], m: &MetricSpace) -> Result<S> {
        use LagrangianForm::*;
        let sig = &m.signature()[1..];
        let gamma = || S::one() + dotg(sig, v, v);
        let l1 = || dotg(sig, vp, vp).scale(0.5) / gamma().powi(3).sqrt();
        let l2 = || {
            let vv = dotg(sig, vp, v);
            -(vv * vv).scale(0.5) / gamma().powi(5).sqrt()
        };
        let free = |c: f64| gamma().sqrt().scale(c);
        match &self.form {
            L1 => Ok(l1()),
            L2 => Ok(l2()),
            L3 { k0_sq } => Ok(free(1.5 * k0_sq)),
            LFree { omega2 } => Ok(free(-omega2)),
            LTimeTotal { k0_sq, omega2 } => Ok(l1() + l2() + free(1.5 * k0_sq) + free(-omega2)),
            LCombined { a } => {
                let g = gamma();
                let vv = dotg(sig, vp, v);
                let k2 = (dotg(sig, vp, vp) * g - vv * vv) / (g * g * g);
                Ok((k2 + S::from_f64(*a)).scale(0.5) * g.sqrt())
            }
            TimeChart(inner) => {
                let n = x.len() + 1;
                let mut xx = Vec::with_capacity(n);
                xx.push(t);
                xx.extend_from_slice(x);
                let mut uu = vec![S::one()];
                uu.extend_from_slice(v);
                let mut uud = vec![S::zero()];
                uud.extend_from_slice(vp);
                inner.eval(&xx, &uu, &uud, m)
            }
            _ => Err(Error::Chart(format!("'{}' is a homogeneous Lagrangian", self.id))),
        }
    }

    /// Plain `f64` evaluation in the model's own chart. For time-chart
    /// models `x[0]` is `t`, and `u`, `ud` hold `(·, v)` and `(·, v')`.
    pub fn value(&self, x: &[f64], u: &[f64], ud: &[f64], m: &MetricSpace) -> Result<f64> {
        match self.coordinate_kind() {
            CoordinateKind::Homogeneous => self.eval(x, u, ud, m),
            CoordinateKind::Time => self.eval_time(x[0], &x[1..], &u[1..], &ud[1..], m),
        }
    }
}

/// Switches a Lagrangian between homogeneous and time coordinates:
/// `ℒ(x, u, u̇) = u⁰ L(t, x^i, v^i, v'^i)`.
pub fn hom_time_convert(l: &LagrangianModel) -> LagrangianModel {
    match (&l.form, l.coordinate_kind()) {
        (LagrangianForm::Homogenized(inner), _) => (**inner).clone(),
        (LagrangianForm::TimeChart(inner), _) => (**inner).clone(),
        (_, CoordinateKind::Time) => {
            LagrangianModel::new(format!("hom({})", l.id), LagrangianForm::Homogenized(Box::new(l.clone())))
        }
        (_, CoordinateKind::Homogeneous) => {
            LagrangianModel::new(format!("time({})", l.id), LagrangianForm::TimeChart(Box::new(l.clone())))
        }
    }
}

/// Like [`hom_time_convert`] but always wraps, so that a round trip
/// evaluates through both charts.
pub fn hom_time_wrap(l: &LagrangianModel) -> LagrangianModel {
    match l.coordinate_kind() {
        CoordinateKind::Time => {
            LagrangianModel::new(format!("hom({})", l.id), LagrangianForm::Homogenized(Box::new(l.clone())))
        }
        CoordinateKind::Homogeneous => {
            LagrangianModel::new(format!("time({})", l.id), LagrangianForm::TimeChart(Box::new(l.clone())))
        }
    }
}
