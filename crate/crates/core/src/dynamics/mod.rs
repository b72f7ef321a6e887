//! Equations of motion, their first integrals and the momentum algebra of
//! the spinning particle.

mod model;

pub use model::{EquationId, EquationModel, ModelParams, MAX_CONDITION, SPIN_CONSTRAINT_TOL};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::frenet::{self, Jet, NULL_THRESHOLD, ZERO_CURVATURE};
use crate::geometry::{MetricSpace, Variance, Vector};
use crate::varcalc::{a_integral, braced_covector, contracted_value};

/// Names accepted by [`invariant`].
pub const INVARIANT_NAMES: &[&str] = &[
    "k",
    "dk_ds",
    "tau",
    "k3",
    "speed2",
    "ud2",
    "uddot2",
    "ratio32",
    "tau2",
    "k2_minus_2tau2",
    "tau_k2",
    "a_half",
    "contracted",
    "P2",
    "m0",
    "omega2",
    "P_0",
    "P_1",
    "P_2",
    "P_3",
    "sigma_u",
    "cov_0",
    "cov_1",
    "cov_2",
    "cov_3",
];

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MomentumData {
    /// Lower-index momentum covector.
    pub p: Vector,
    pub p2: f64,
    /// `P·u / ‖u‖`, which should reproduce `m₀`.
    pub m0_check: f64,
}

/// `P_α = (m₀/‖u‖) u_α + ‖u‖⁻³ ε_{βγλα} u̇^β u^γ σ^λ`.
pub fn momentum(j: &Jet, m0: f64, sigma: &Vector, m: &MetricSpace) -> Result<MomentumData> {
    if m.dim() != 4 || !m.is_lorentz() {
        return Err(Error::Dimension("momentum needs a four-dimensional Lorentz metric".into()));
    }
    if j.order() < 2 {
        return Err(Error::Order("momentum needs u and u̇".into()));
    }
    let d = j.derivs();
    let (u, ud) = (d[0], d[1]);
    let uu = m.dot(&u, &u);
    if uu.abs() <= NULL_THRESHOLD {
        return Err(Error::DegenerateVelocity("null velocity".into()));
    }
    let su = m.dot(sigma, &u);
    if su.abs() > SPIN_CONSTRAINT_TOL * sigma.max_abs().max(1.0) * u.max_abs().max(1.0) {
        return Err(Error::Constraint(format!("σ·u = {su:e} must vanish")));
    }
    let n = uu.abs().sqrt();
    // ε_{βγλα} = −ε_{αβγλ}
    let spin = m.epsilon_contract(&[ud, u, *sigma])? * (-1.0 / n.powi(3));
    let p = Vector::new((m.lower(&u) * (m0 / n) + spin).components(), Variance::Lower);
    let p2 = m.dot(&m.raise(&p), &p);
    let m0_check = m.dot(&u, &p) / n;
    Ok(MomentumData { p, p2, m0_check })
}

/// `A = 3k₀² − 2ω²`.
pub fn derive_params(k0: f64, omega2: f64) -> Result<f64> {
    if omega2 <= 0.0 {
        return Err(Error::Argument(format!("omega2 must be positive, got {omega2}")));
    }
    Ok(3.0 * k0 * k0 - 2.0 * omega2)
}

/// `k² = (2ω² + A)/3`, the inverse of [`derive_params`].
pub fn k2_target(a: f64, omega2: f64) -> Result<f64> {
    if omega2 <= 0.0 {
        return Err(Error::Argument(format!("omega2 must be positive, got {omega2}")));
    }
    Ok((2.0 * omega2 + a) / 3.0)
}

/// Braced covector of the fourth-order variational equation; constant along
/// its solutions.
pub fn eq67_conserved_covector(j: &Jet, a: f64, m: &MetricSpace) -> Result<Vector> {
    if j.order() < 3 {
        return Err(Error::Order("the covector needs u, u̇, ü".into()));
    }
    let d = j.derivs();
    let uu = m.dot(&d[0], &d[0]);
    if uu.abs() <= NULL_THRESHOLD * d[0].component_norm_sq() || d[0].component_norm_sq() == 0.0 {
        return Err(Error::DegenerateVelocity("null velocity".into()));
    }
    let c = braced_covector(d[0].components(), d[1].components(), d[2].components(), a, m.signature());
    Ok(Vector::new(&c, Variance::Lower))
}

/// Raw torsion square `(u̇²ü² − (u̇·ü)² − u̇⁶)/u̇⁴` on a natural jet.
pub fn tau2_raw(j: &Jet, m: &MetricSpace) -> Result<f64> {
    if j.order() < 3 {
        return Err(Error::Order("τ² needs u, u̇, ü".into()));
    }
    let d = j.derivs();
    let ud2 = m.dot(&d[1], &d[1]);
    if ud2.abs() <= ZERO_CURVATURE {
        return Err(Error::ZeroCurvature(format!("u̇·u̇ = {ud2:e}")));
    }
    let x = m.dot(&d[1], &d[2]);
    Ok((ud2 * m.dot(&d[2], &d[2]) - x * x - ud2.powi(3)) / (ud2 * ud2))
}

fn need_order(j: &Jet, k: usize, name: &str) -> Result<()> {
    if j.order() < k {
        return Err(Error::Order(format!("invariant '{name}' needs a jet of order {k}, got {}", j.order())));
    }
    Ok(())
}

/// Named scalar invariant of a natural jet. Squares are raw metric products
/// except for `k`, `tau`, `k3`, `dk_ds`, `tau_k2`, which are the geometric
/// Frénet values.
pub fn invariant(name: &str, j: &Jet, p: &ModelParams, m: &MetricSpace) -> Result<f64> {
    let d = j.derivs();
    let sigma = || p.sigma.ok_or_else(|| Error::Argument(format!("invariant '{name}' needs sigma")));
    let mom = || -> Result<MomentumData> {
        need_order(j, 2, name)?;
        momentum(j, p.m0, &sigma()?, m)
    };
    match name {
        "k" => frenet::curvature(j, m),
        "dk_ds" => frenet::curvature_rate(j, m),
        "tau" => frenet::torsion(j, m),
        "k3" => frenet::third_curvature(j, m),
        "speed2" => Ok(m.dot(&d[0], &d[0])),
        "ud2" => {
            need_order(j, 2, name)?;
            Ok(m.dot(&d[1], &d[1]))
        }
        "uddot2" => {
            need_order(j, 3, name)?;
            Ok(m.dot(&d[2], &d[2]))
        }
        "ratio32" => {
            need_order(j, 3, name)?;
            let ud2 = m.dot(&d[1], &d[1]);
            if ud2.abs() <= ZERO_CURVATURE {
                return Err(Error::ZeroCurvature(format!("u̇·u̇ = {ud2:e}")));
            }
            Ok(m.dot(&d[2], &d[2]) / ud2)
        }
        "tau2" => tau2_raw(j, m),
        "k2_minus_2tau2" => Ok(m.dot(&d[1], &d[1]) - 2.0 * tau2_raw(j, m)?),
        "tau_k2" => {
            let k = frenet::curvature(j, m)?;
            Ok(frenet::torsion(j, m)? * k * k)
        }
        "a_half" => a_integral(j, m),
        "contracted" => contracted_value(j, m),
        "P2" => Ok(mom()?.p2),
        "m0" => Ok(mom()?.m0_check),
        "omega2" => {
            let s = sigma()?;
            Ok(-mom()?.p2 / m.dot(&s, &s))
        }
        "P_0" | "P_1" | "P_2" | "P_3" => {
            let i: usize = name[2..].parse().unwrap_or(0);
            Ok(mom()?.p[i])
        }
        "sigma_u" => Ok(m.dot(&sigma()?, &d[0])),
        "cov_0" | "cov_1" | "cov_2" | "cov_3" => {
            let i: usize = name[4..].parse().unwrap_or(0);
            if i >= m.dim() {
                return Err(Error::Dimension(format!("'{name}' exceeds dimension {}", m.dim())));
            }
            Ok(eq67_conserved_covector(j, p.a, m)?[i])
        }
        other => Err(Error::Argument(format!("unknown invariant '{other}'"))),
    }
}

/// How two models are related once a constraint is imposed on the data.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivalenceDescriptor {
    pub model_a: EquationId,
    pub model_b: EquationId,
    /// Condition on initial data, stated with [`INVARIANT_NAMES`] entries.
    pub initial_constraint: String,
    /// Invariant that identifies the matching parameter.
    pub invariant: String,
    pub relation: String,
    /// Pointwise trajectory agreement required over `s ∈ [0, 10]`.
    pub tolerance: f64,
}

/// Supported pairs: `(EQ26_SPIN, EQ33_I)`, `(EQ41_EXT, EQ33_I)`,
/// `(EQ68_VAR, EQ33_I)`, `(EQ41_EXT, EQ26_SPIN)`, in either order.
pub fn equivalence_pair(a: EquationId, b: EquationId) -> Result<EquivalenceDescriptor> {
    use EquationId::*;
    let (x, y) = match (a, b) {
        (Eq33I, o) | (o, Eq33I) if o != Eq33I => (o, Eq33I),
        (Eq26Spin, Eq41Ext) | (Eq41Ext, Eq26Spin) => (Eq41Ext, Eq26Spin),
        _ => return Err(Error::Unsupported(format!("no equivalence between {} and {}", a.name(), b.name()))),
    };
    let d = |c: &str, inv: &str, rel: &str| EquivalenceDescriptor {
        model_a: x,
        model_b: y,
        initial_constraint: c.into(),
        invariant: inv.into(),
        relation: rel.into(),
        tolerance: 1e-6,
    };
    Ok(match (x, y) {
        (Eq26Spin, Eq33I) => d("ratio32 = omega2", "ratio32", "EQ33_I with ü²/u̇² = ω² reproduces EQ26_SPIN"),
        (Eq41Ext, Eq33I) | (Eq68Var, Eq33I) => d(
            "dk_ds = 0",
            "k2_minus_2tau2",
            "with k'(0) = 0 the solution has constant k, τ and k² − 2τ² = A; it solves EQ33_I",
        ),
        (Eq41Ext, Eq26Spin) => d(
            "dk_ds = 0",
            "ratio32",
            "with k = k₀ fixed the solution solves EQ26_SPIN with ω² = k₀² + τ₀²",
        ),
        _ => return Err(Error::Unsupported(format!("no equivalence between {} and {}", a.name(), b.name()))),
    })
}
