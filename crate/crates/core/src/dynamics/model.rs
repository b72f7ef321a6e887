//! Equations of motion resolved for their highest derivative.

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frenet::{Jet, ParamKind};
use crate::geometry::{MetricSpace, Variance, Vector};

/// Condition number above which a least-squares resolution is rejected.
pub const MAX_CONDITION: f64 = 1e12;

/// Tolerance on the spin supplementary condition `σ·u = 0` at initial data.
pub const SPIN_CONSTRAINT_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EquationId {
    #[serde(rename = "EQ4_2D")]
    Eq4TwoD,
    #[serde(rename = "EQ11_3D")]
    Eq11ThreeD,
    #[serde(rename = "EQ17_MP")]
    Eq17Mp,
    #[serde(rename = "EQ19_MP")]
    Eq19Mp,
    #[serde(rename = "EQ26_SPIN")]
    Eq26Spin,
    #[serde(rename = "EQ33_I")]
    Eq33I,
    #[serde(rename = "EQ41_EXT")]
    Eq41Ext,
    #[serde(rename = "EQ68_VAR")]
    Eq68Var,
}

impl EquationId {
    pub const ALL: [EquationId; 8] = [
        EquationId::Eq4TwoD,
        EquationId::Eq11ThreeD,
        EquationId::Eq17Mp,
        EquationId::Eq19Mp,
        EquationId::Eq26Spin,
        EquationId::Eq33I,
        EquationId::Eq41Ext,
        EquationId::Eq68Var,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EquationId::Eq4TwoD => "EQ4_2D",
            EquationId::Eq11ThreeD => "EQ11_3D",
            EquationId::Eq17Mp => "EQ17_MP",
            EquationId::Eq19Mp => "EQ19_MP",
            EquationId::Eq26Spin => "EQ26_SPIN",
            EquationId::Eq33I => "EQ33_I",
            EquationId::Eq41Ext => "EQ41_EXT",
            EquationId::Eq68Var => "EQ68_VAR",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::Argument(format!("unknown equation id '{s}'")))
    }

    /// Order of the equation in `x`.
    pub fn order(self) -> usize {
        match self {
            EquationId::Eq4TwoD | EquationId::Eq11ThreeD | EquationId::Eq17Mp | EquationId::Eq19Mp => 3,
            _ => 4,
        }
    }

    pub fn natural(self) -> bool {
        self != EquationId::Eq4TwoD
    }
}

/// Parameters shared by all models; each model reads only its own.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub m: f64,
    pub m0: f64,
    pub sigma: Option<Vector>,
    pub omega2: f64,
    pub a: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquationModel {
    pub id: EquationId,
    pub metric: MetricSpace,
    pub params: ModelParams,
}

impl EquationModel {
    pub fn new(id: EquationId, metric: MetricSpace, params: ModelParams) -> Result<Self> {
        let need_dim = |k: usize| {
            if metric.dim() == k {
                Ok(())
            } else {
                Err(Error::Dimension(format!("{} needs a {k}-dimensional metric, got {}", id.name(), metric.dim())))
            }
        };
        match id {
            EquationId::Eq4TwoD => need_dim(2)?,
            EquationId::Eq11ThreeD => need_dim(3)?,
            EquationId::Eq17Mp | EquationId::Eq19Mp => {
                need_dim(4)?;
                let s = params.sigma.ok_or_else(|| Error::Argument(format!("{} needs sigma", id.name())))?;
                if s.dim() != 4 {
                    return Err(Error::Dimension("sigma must have four components".into()));
                }
                let ss = metric.dot(&s, &s);
                if ss >= 0.0 || !metric.is_lorentz() {
                    return Err(Error::Constraint(format!("spin must be spacelike in a Lorentz metric, σ·σ = {ss}")));
                }
            }
            EquationId::Eq26Spin => {
                if params.omega2.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
                    return Err(Error::Argument(format!("omega2 must be positive, got {}", params.omega2)));
                }
            }
            _ => {}
        }
        Ok(EquationModel { id, metric, params })
    }

    pub fn order(&self) -> usize {
        self.id.order()
    }

    /// Checks constraints on initial data (spin supplementary condition).
    pub fn validate_initial(&self, j: &Jet) -> Result<()> {
        if let Some(s) = self.params.sigma.filter(|_| matches!(self.id, EquationId::Eq17Mp | EquationId::Eq19Mp)) {
            let su = self.metric.dot(&s, &j.u());
            if su.abs() > SPIN_CONSTRAINT_TOL * s.max_abs().max(1.0) * j.u().max_abs().max(1.0) {
                return Err(Error::Constraint(format!("σ·u = {su:e} must vanish")));
            }
        }
        Ok(())
    }

    /// Highest `x`-derivative implied by the equation at `j`.
    pub fn resolve_highest(&self, j: &Jet) -> Result<Vector> {
        let need = self.order() - 1;
        if j.order() < need {
            return Err(Error::Order(format!("{} needs a jet of order {need}, got {}", self.id.name(), j.order())));
        }
        if j.dim() != self.metric.dim() {
            return Err(Error::Dimension(format!("jet dim {} vs metric dim {}", j.dim(), self.metric.dim())));
        }
        if self.id.natural() && j.param_kind != ParamKind::Natural {
            return Err(Error::Argument(format!("{} expects a natural-parameter jet", self.id.name())));
        }
        let m = &self.metric;
        let d = j.derivs();
        let (u, ud) = (d[0], d[1]);
        let ud2 = m.dot(&ud, &ud);
        let p = &self.params;
        let out = match self.id {
            EquationId::Eq4TwoD => resolve_eq4(m, &u, &ud, p.m)?,
            EquationId::Eq11ThreeD => resolve_eq11(m, &u, &ud, p.m)?,
            EquationId::Eq17Mp => resolve_eq17(m, &u, &ud, p.m0, &p.sigma.unwrap_or(Vector::zeros(4)))?,
            EquationId::Eq19Mp => resolve_eq19(m, &u, &ud, p.m0, &p.sigma.unwrap_or(Vector::zeros(4)))?,
            EquationId::Eq26Spin => ud * -p.omega2,
            EquationId::Eq33I => {
                if ud.max_abs() == 0.0 && d[2].max_abs() == 0.0 {
                    return Ok(Vector::zeros(m.dim()));
                }
                if ud2.abs() <= crate::frenet::ZERO_CURVATURE {
                    return Err(Error::ZeroCurvature("EQ33_I needs u̇·u̇ ≠ 0".into()));
                }
                ud * -(m.dot(&d[2], &d[2]) / ud2)
            }
            EquationId::Eq41Ext | EquationId::Eq68Var => {
                ud * -(1.5 * ud2 - p.a / 2.0) - u * (3.0 * m.dot(&ud, &d[2]))
            }
        };
        if out.components().iter().any(|c| !c.is_finite()) {
            return Err(Error::Resolution("non-finite resolved derivative".into()));
        }
        Ok(out)
    }
}

/// `ε_{αβ} ü^β = 3(u·u̇)/|u·u| ε_{αβ} u̇^β − m((u·u) u̇_α − (u·u̇) u_α)`.
fn resolve_eq4(m: &MetricSpace, u: &Vector, ud: &Vector, mass: f64) -> Result<Vector> {
    let uu = m.dot(u, u);
    if uu.abs() <= crate::frenet::NULL_THRESHOLD {
        return Err(Error::Resolution("null velocity".into()));
    }
    let uud = m.dot(u, ud);
    let rhs = m.epsilon_contract(&[*ud])? * (3.0 * uud / uu.abs()) - (m.lower(ud) * uu - m.lower(u) * uud) * mass;
    let e = Matrix2::new(m.levi_civita(&[0, 0]), m.levi_civita(&[0, 1]), m.levi_civita(&[1, 0]), m.levi_civita(&[1, 1]));
    let sol = e
        .lu()
        .solve(&Vector2::new(rhs[0], rhs[1]))
        .ok_or_else(|| Error::Resolution("singular ε matrix".into()))?;
    Ok(Vector::upper(&[sol[0], sol[1]]))
}

/// Least-squares solve of `A z = b` via SVD with a condition guard.
fn solve_ls(a: DMatrix<f64>, b: DVector<f64>) -> Result<Vec<f64>> {
    let svd = a.svd(true, true);
    let sv = &svd.singular_values;
    let (max, min) = (sv.max(), sv.min());
    if !(min > 0.0) || max / min > MAX_CONDITION {
        return Err(Error::Resolution(format!("ill-conditioned system (σ_max/σ_min = {:e})", max / min)));
    }
    let z = svd.solve(&b, 0.0).map_err(|e| Error::Resolution(e.to_string()))?;
    Ok(z.iter().copied().collect())
}

/// `ε_{αβγ} ü^β u^γ = −m u̇_α` with gauge `u·ü = −u̇·u̇`.
fn resolve_eq11(m: &MetricSpace, u: &Vector, ud: &Vector, mass: f64) -> Result<Vector> {
    let mut a = DMatrix::zeros(4, 3);
    let mut b = DVector::zeros(4);
    let udl = m.lower(ud);
    let ul = m.lower(u);
    for al in 0..3 {
        for be in 0..3 {
            a[(al, be)] = (0..3).map(|g| m.levi_civita(&[al, be, g]) * u[g]).sum();
        }
        b[al] = -mass * udl[al];
    }
    for be in 0..3 {
        a[(3, be)] = ul[be];
    }
    b[3] = -m.dot(ud, ud);
    Ok(Vector::upper(&solve_ls(a, b)?))
}

/// `ε_{αβγμ} ü^β u^γ σ^μ = m₀ u̇_α` with gauges `ü·u = −u̇²`, `ü·σ = 0`.
fn resolve_eq17(m: &MetricSpace, u: &Vector, ud: &Vector, m0: f64, sigma: &Vector) -> Result<Vector> {
    let mut a = DMatrix::zeros(6, 4);
    let mut b = DVector::zeros(6);
    let udl = m.lower(ud);
    let ul = m.lower(u);
    let sl = m.lower(sigma);
    for al in 0..4 {
        for be in 0..4 {
            let mut acc = 0.0;
            for g in 0..4 {
                for mu in 0..4 {
                    acc += m.levi_civita(&[al, be, g, mu]) * u[g] * sigma[mu];
                }
            }
            a[(al, be)] = acc;
        }
        b[al] = m0 * udl[al];
    }
    for be in 0..4 {
        a[(4, be)] = ul[be];
        a[(5, be)] = sl[be];
    }
    b[4] = -m.dot(ud, ud);
    Ok(Vector::upper(&solve_ls(a, b)?))
}

/// `ü = −(u̇·u̇) u + (m₀/σ²) w` with `w^ν = e^{ανρλ} u̇_α u_ρ σ_λ`.
fn resolve_eq19(m: &MetricSpace, u: &Vector, ud: &Vector, m0: f64, sigma: &Vector) -> Result<Vector> {
    let ss = m.dot(sigma, sigma);
    if ss == 0.0 {
        return Err(Error::Resolution("null spin vector".into()));
    }
    // free index in second position: w = −e^{ν α ρ λ} u̇_α u_ρ σ_λ
    let w = m.epsilon_contract(&[m.lower(ud), m.lower(u), m.lower(sigma)])? * -1.0;
    let w = Vector::new(w.components(), Variance::Upper);
    Ok(*u * -m.dot(ud, ud) + w * (m0 / ss))
}
