//! Closed-form helical worldlines `x = x₀ + u₀ s + a cos ωs + b sin ωs` and
//! the figure scenarios built from them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frenet::{Jet, ParamKind};
use crate::geometry::{MetricSpace, Vector};

/// Tolerance for the orthogonality and normalization conditions.
pub const HELIX_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HelixParams {
    pub x0: Vector,
    pub u0: Vector,
    pub a: Vector,
    pub b: Vector,
    pub omega: f64,
    pub metric: MetricSpace,
    /// `u·u` along the worldline, `±1`.
    pub unit: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HelixResiduals {
    pub aa_minus_bb: f64,
    pub ab: f64,
    pub a_u0: f64,
    pub b_u0: f64,
    /// `u₀·u₀ + ω² a·a − unit`.
    pub normalization: f64,
}

impl HelixResiduals {
    pub fn max(&self) -> f64 {
        [self.aa_minus_bb, self.ab, self.a_u0, self.b_u0, self.normalization].into_iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

impl HelixParams {
    /// Validates the orthogonality set and the unit normalization; `unit`
    /// is inferred from the sign of `u₀·u₀ + ω² a·a`.
    pub fn new(x0: Vector, u0: Vector, a: Vector, b: Vector, omega: f64, metric: MetricSpace) -> Result<Self> {
        let n = metric.dim();
        if [x0, u0, a, b].iter().any(|v| v.dim() != n) {
            return Err(Error::Dimension(format!("helix vectors must have {n} components")));
        }
        if !(omega >= 0.0) {
            return Err(Error::Argument(format!("omega must be non-negative, got {omega}")));
        }
        let norm = metric.dot(&u0, &u0) + omega * omega * metric.dot(&a, &a);
        let unit = if norm < 0.0 { -1.0 } else { 1.0 };
        let p = HelixParams { x0, u0, a, b, omega, metric, unit };
        let r = p.residuals();
        if r.max() > HELIX_TOL {
            return Err(Error::Constraint(format!("helix conditions violated: {r:?}")));
        }
        Ok(p)
    }

    pub fn residuals(&self) -> HelixResiduals {
        let m = &self.metric;
        HelixResiduals {
            aa_minus_bb: m.dot(&self.a, &self.a) - m.dot(&self.b, &self.b),
            ab: m.dot(&self.a, &self.b),
            a_u0: m.dot(&self.a, &self.u0),
            b_u0: m.dot(&self.b, &self.u0),
            normalization: m.dot(&self.u0, &self.u0) + self.omega * self.omega * m.dot(&self.a, &self.a) - self.unit,
        }
    }

    /// `n`-th derivative of `x(s)`, `0 ≤ n`.
    pub fn derivative(&self, s: f64, n: u32) -> Vector {
        let (c, sn) = ((self.omega * s).cos(), (self.omega * s).sin());
        // d^n/ds^n (cos, sin) = ω^n (cos, sin) rotated by n quarter turns
        let (dc, ds) = match n % 4 {
            0 => (c, sn),
            1 => (-sn, c),
            2 => (-c, -sn),
            _ => (sn, -c),
        };
        let w = self.omega.powi(n as i32);
        let osc = self.a * (w * dc) + self.b * (w * ds);
        match n {
            0 => self.x0 + self.u0 * s + self.a * c + self.b * sn,
            1 => self.u0 + osc,
            _ => osc,
        }
    }

    pub fn position(&self, s: f64) -> Vector {
        self.derivative(s, 0)
    }

    /// Natural-parameter jet at `s` with `order` derivatives (1 to 4).
    pub fn eval(&self, s: f64, order: usize) -> Result<Jet> {
        if !(1..=4).contains(&order) {
            return Err(Error::Order(format!("helix jets carry 1 to 4 derivatives, got {order}")));
        }
        let d: Vec<Vector> = (1..=order as u32).map(|n| self.derivative(s, n)).collect();
        Jet::new(self.position(s), &d, ParamKind::Natural)
    }

    /// Helix through the jet's point with the jet's `u`, `u̇`, `ü`, re-based so
    /// the jet sits at `s = 0`.
    pub fn from_jet(j: &Jet, omega: f64, metric: MetricSpace) -> Result<Self> {
        if j.order() < 3 {
            return Err(Error::Order("from_jet needs u, u̇, ü".into()));
        }
        if omega <= 0.0 {
            return Err(Error::Argument("omega must be positive".into()));
        }
        let d = j.derivs();
        let a = d[1] * (-1.0 / (omega * omega));
        let b = d[2] * (-1.0 / omega.powi(3));
        let u0 = d[0] - b * omega;
        Self::new(j.x - a, u0, a, b, omega, metric)
    }

    pub fn with_omega(&self, omega: f64) -> Result<Self> {
        Self::new(self.x0, self.u0, self.a, self.b, omega, self.metric)
    }
}

/// Appendix initial-condition algebra: amplitudes `a = b = (β, α, α, 0)` with
/// `β² = 2α²`, and `u₀ = (u⁰, v)` with `α(v₁ + v₂) = β u⁰`. In the metric
/// `diag(1, −1, −1, −1)` the amplitudes are null and `u₀·u₀ = −1`, which
/// requires `|v|² − (v₁ + v₂)²/2 = 1`. For `α = 0` the worldline is straight
/// and `u⁰ = √(1 + |v|²)`.
pub fn solve_appendix(alpha: f64, v: [f64; 3], omega: f64) -> Result<HelixParams> {
    let m = MetricSpace::minkowski();
    let v2: f64 = v.iter().map(|x| x * x).sum();
    let z = Vector::zeros(4);
    if alpha == 0.0 {
        let u0 = Vector::upper(&[(1.0 + v2).sqrt(), v[0], v[1], v[2]]);
        return HelixParams::new(z, u0, z, z, omega, m);
    }
    let sum = v[0] + v[1];
    let defect = v2 - sum * sum / 2.0 - 1.0;
    if defect.abs() > HELIX_TOL || sum == 0.0 {
        return Err(Error::Constraint(format!(
            "v = {v:?} is inconsistent with a unit velocity: |v|² − (v₁+v₂)²/2 − 1 = {defect:e}"
        )));
    }
    let beta = 2f64.sqrt() * alpha * sum.signum();
    let u0t = alpha * sum / beta;
    let amp = Vector::upper(&[beta, alpha, alpha, 0.0]);
    HelixParams::new(z, Vector::upper(&[u0t, v[0], v[1], v[2]]), amp, amp, omega, m)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FigureScenario {
    pub figure_id: u8,
    pub v: [f64; 3],
    pub alpha: f64,
    pub omega: f64,
}

impl FigureScenario {
    pub fn params(&self) -> Result<HelixParams> {
        solve_appendix(self.alpha, self.v, self.omega)
    }

    /// The same initial data without angular velocity.
    pub fn reference(&self) -> Result<HelixParams> {
        solve_appendix(self.alpha, self.v, 0.0)
    }
}

pub fn figure_scenario(n: u8) -> Result<FigureScenario> {
    let (v, alpha, omega) = match n {
        1 => ([1.0, 1.0, 1.0], 1.0, 4.0),
        2 => ([1.0, 1.0, 1.0], 0.3, 4.0),
        3 => ([10.0, 10.0, 1.0], 3.0, 1.52),
        4 => ([1.0, 1.0, 1.0], 0.3, 5.0),
        _ => return Err(Error::Argument(format!("figure must be 1..4, got {n}"))),
    };
    Ok(FigureScenario { figure_id: n, v, alpha, omega })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SpaceTime {
    pub t: Vec<f64>,
    pub r: Vec<[f64; 3]>,
}

/// `t(s) = t₀ + u⁰ s + β(cos ωs + sin ωs)` and
/// `r(s) = r₀ + v s + α(i + j)(cos ωs + sin ωs)` for appendix-ansatz params.
pub fn split_space_time(p: &HelixParams, s: &[f64]) -> Result<SpaceTime> {
    let (a, b) = (p.a, p.b);
    if p.metric.dim() != 4 || a != b || a[3] != 0.0 || a[1] != a[2] {
        return Err(Error::Argument("params do not follow the appendix ansatz".into()));
    }
    let (beta, alpha) = (a[0], a[1]);
    let mut out = SpaceTime { t: Vec::with_capacity(s.len()), r: Vec::with_capacity(s.len()) };
    for &si in s {
        let ph = (p.omega * si).cos() + (p.omega * si).sin();
        out.t.push(p.x0[0] + p.u0[0] * si + beta * ph);
        out.r.push([
            p.x0[1] + p.u0[1] * si + alpha * ph,
            p.x0[2] + p.u0[2] * si + alpha * ph,
            p.x0[3] + p.u0[3] * si,
        ]);
    }
    Ok(out)
}
