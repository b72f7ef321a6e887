//! Deterministic integration of [`EquationModel`]s with dense output and
//! invariant monitoring.

mod rk;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dynamics::{invariant, EquationId, EquationModel, INVARIANT_NAMES};
use crate::error::{Error, Result};
use crate::frenet::{Jet, ParamKind};
use crate::geometry::{Variance, Vector};

/// Tolerance on the unit-speed chain of the initial jet.
pub const INITIAL_CHAIN_TOL: f64 = 1e-8;

/// Hard cap on accepted plus rejected steps of one integration.
pub const MAX_STEPS: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Classical fourth-order with fixed step `max_step` (shortened to divide the span).
    Rk4,
    /// Dormand–Prince 5(4) with PI step control.
    Dp54,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Projection {
    None,
    RenormalizeVelocity,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorConfig {
    pub method: Method,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_step: f64,
    pub projection: Projection,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig { method: Method::Dp54, abs_tol: 1e-10, rel_tol: 1e-10, max_step: 0.05, projection: Projection::None }
    }
}

impl IntegratorConfig {
    pub fn adaptive(tol: f64) -> Self {
        IntegratorConfig { abs_tol: tol, rel_tol: tol, ..Default::default() }
    }

    pub fn fixed(h: f64) -> Self {
        IntegratorConfig { method: Method::Rk4, max_step: h, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64| v.is_finite() && v > 0.0;
        if !pos(self.abs_tol) || !pos(self.rel_tol) || !pos(self.max_step) {
            return Err(Error::Argument(format!("tolerances and max_step must be positive: {self:?}")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Sample {
    pub s: f64,
    pub jet: Jet,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub model: EquationModel,
    pub samples: Vec<Sample>,
    pub invariant_traces: BTreeMap<String, Vec<f64>>,
    pub drift_report: BTreeMap<String, f64>,
    /// Max unit-speed chain residual over all samples; `None` for models
    /// that do not use the natural parameter.
    pub constraint_drift: Option<f64>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

/// Invariants traced by default for each model.
pub fn registered_invariants(id: EquationId) -> &'static [&'static str] {
    match id {
        EquationId::Eq4TwoD => &["k", "dk_ds", "speed2"],
        EquationId::Eq11ThreeD => &["k", "tau", "speed2"],
        EquationId::Eq17Mp | EquationId::Eq19Mp => &["k", "speed2", "sigma_u", "P2", "P_0", "P_1", "P_2", "P_3"],
        EquationId::Eq26Spin | EquationId::Eq33I => &["k", "ud2", "ratio32", "speed2"],
        EquationId::Eq41Ext => &["k", "ud2", "a_half", "contracted", "k2_minus_2tau2", "speed2"],
        EquationId::Eq68Var => &["k", "ud2", "tau_k2", "k3", "a_half", "k2_minus_2tau2", "speed2", "cov_0", "cov_1", "cov_2", "cov_3"],
    }
}

struct Packing {
    n: usize,
    /// Number of stored derivative slots, `order − 1`.
    slots: usize,
    kind: ParamKind,
}

impl Packing {
    fn jet(&self, y: &[f64]) -> Result<Jet> {
        let n = self.n;
        let d: Vec<Vector> = (1..=self.slots).map(|k| Vector::upper(&y[k * n..(k + 1) * n])).collect();
        Jet::new(Vector::upper(&y[..n]), &d, self.kind)
    }

    fn pack(&self, j: &Jet) -> Vec<f64> {
        let mut y = j.x.components().to_vec();
        for d in &j.derivs()[..self.slots] {
            y.extend_from_slice(d.components());
        }
        y
    }
}

fn rhs(model: &EquationModel, p: &Packing, y: &[f64]) -> Result<Vec<f64>> {
    let n = p.n;
    let top = model.resolve_highest(&p.jet(y)?)?;
    let mut f = y[n..].to_vec();
    f.extend_from_slice(top.components());
    Ok(f)
}

fn full_jet(model: &EquationModel, p: &Packing, y: &[f64]) -> Result<Jet> {
    let j = p.jet(y)?;
    let top = model.resolve_highest(&j)?;
    Ok(j.with_deriv(p.slots + 1, top))
}

fn renormalize(model: &EquationModel, p: &Packing, y: &mut [f64]) {
    let n = p.n;
    let u = Vector::upper(&y[n..2 * n]);
    let uu = model.metric.dot(&u, &u).abs();
    if uu > 0.0 {
        let c = 1.0 / uu.sqrt();
        y[n..2 * n].iter_mut().for_each(|v| *v *= c);
    }
}

/// Integrates `model` from `j0` over `span = (s0, s1)`, `s1 ≥ s0`.
pub fn integrate(model: &EquationModel, j0: &Jet, span: (f64, f64), cfg: &IntegratorConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let (s0, s1) = span;
    if !(s0.is_finite() && s1.is_finite()) || s1 < s0 {
        return Err(Error::Argument(format!("span must satisfy s0 ≤ s1, got ({s0}, {s1})")));
    }
    let order = model.order();
    if j0.order() < order - 1 {
        return Err(Error::Order(format!("{} needs initial data of order {}", model.id.name(), order - 1)));
    }
    if j0.dim() != model.metric.dim() {
        return Err(Error::Dimension(format!("initial jet dim {} vs metric dim {}", j0.dim(), model.metric.dim())));
    }
    let natural = model.id.natural();
    let kind = if natural { ParamKind::Natural } else { ParamKind::Generic };
    let start = j0.with_order(order - 1).with_kind(kind);
    model.validate_initial(&start)?;
    let p = Packing { n: model.metric.dim(), slots: order - 1, kind };
    if natural {
        // the resolved top slot must continue the chain too
        let r = full_jet(model, &p, &p.pack(&start))?.max_natural_residual(&model.metric);
        if r > INITIAL_CHAIN_TOL {
            return Err(Error::Constraint(format!("initial data violate the unit-speed chain by {r:e}")));
        }
    }

    let mut f = |y: &[f64]| rhs(model, &p, y);
    let mut y = p.pack(&start);
    let mut s = s0;
    let mut states = vec![(s, y.clone())];
    let (mut accepted, mut rejected) = (0usize, 0usize);
    let project = natural && cfg.projection == Projection::RenormalizeVelocity;

    if s1 > s0 {
        match cfg.method {
            Method::Rk4 => {
                let steps = ((s1 - s0) / cfg.max_step).ceil().max(1.0) as usize;
                if steps > MAX_STEPS {
                    return Err(Error::StepLimit { s: s0, steps: MAX_STEPS });
                }
                let h = (s1 - s0) / steps as f64;
                for i in 1..=steps {
                    y = rk::rk4_step(&mut f, &y, h)?;
                    if project {
                        renormalize(model, &p, &mut y);
                    }
                    s = if i == steps { s1 } else { s0 + i as f64 * h };
                    states.push((s, y.clone()));
                }
                accepted = steps;
            }
            Method::Dp54 => {
                let (atol, rtol) = (cfg.abs_tol, cfg.rel_tol);
                let mut fy = f(&y)?;
                let mut h = rk::initial_step(&mut f, &y, &fy, atol, rtol, cfg.max_step.min(s1 - s0))?;
                let mut err_prev: f64 = 1e-4;
                let mut last_rejected = false;
                while s < s1 {
                    if accepted + rejected >= MAX_STEPS {
                        return Err(Error::StepLimit { s, steps: MAX_STEPS });
                    }
                    let rest = s1 - s;
                    let finish = h >= rest;
                    let hs = if finish { rest } else { h };
                    if hs <= 1e-13 * s.abs().max(1.0) && !finish {
                        return Err(Error::Stiffness { s, h: hs });
                    }
                    let st = rk::dp5_step(&mut f, &y, &fy, hs, atol, rtol)?;
                    if st.err <= 1.0 {
                        accepted += 1;
                        s = if finish { s1 } else { s + hs };
                        y = st.y;
                        fy = st.f;
                        if project {
                            renormalize(model, &p, &mut y);
                            fy = f(&y)?;
                        }
                        states.push((s, y.clone()));
                        let e = st.err.max(1e-10);
                        let mut fac = 0.9 * e.powf(-0.7 / 5.0) * err_prev.powf(0.4 / 5.0);
                        fac = fac.clamp(0.2, if last_rejected { 1.0 } else { 5.0 });
                        h = (hs * fac).min(cfg.max_step);
                        err_prev = e;
                        last_rejected = false;
                    } else {
                        rejected += 1;
                        let e = if st.err.is_finite() { st.err } else { 1e10 };
                        h = hs * (0.9 * e.powf(-0.2)).max(0.2);
                        last_rejected = true;
                        if h <= 1e-13 * s.abs().max(1.0) {
                            return Err(Error::Stiffness { s, h });
                        }
                    }
                }
            }
        }
    }

    let samples = states
        .iter()
        .map(|(s, y)| Ok(Sample { s: *s, jet: full_jet(model, &p, y)? }))
        .collect::<Result<Vec<_>>>()?;
    let constraint_drift =
        natural.then(|| samples.iter().map(|x| x.jet.max_natural_residual(&model.metric)).fold(0.0, f64::max));
    let mut t = Trajectory {
        model: *model,
        samples,
        invariant_traces: BTreeMap::new(),
        drift_report: BTreeMap::new(),
        constraint_drift,
        accepted_steps: accepted,
        rejected_steps: rejected,
    };
    for name in registered_invariants(model.id) {
        if let Ok(trace) = trace_of(&t, name) {
            t.drift_report.insert(name.to_string(), drift_of(&trace));
            t.invariant_traces.insert(name.to_string(), trace);
        }
    }
    Ok(t)
}

/// Trace of a named invariant; fails if it is undefined at the first sample.
/// Later failures are recorded as NaN.
fn trace_of(t: &Trajectory, name: &str) -> Result<Vec<f64>> {
    if !INVARIANT_NAMES.contains(&name) {
        return Err(Error::Argument(format!("unknown invariant '{name}'")));
    }
    let m = &t.model.metric;
    let prm = &t.model.params;
    let first = invariant(name, &t.samples[0].jet, prm, m)?;
    let mut out = vec![first];
    out.extend(t.samples[1..].iter().map(|x| invariant(name, &x.jet, prm, m).unwrap_or(f64::NAN)));
    Ok(out)
}

fn drift_of(trace: &[f64]) -> f64 {
    let v0 = trace[0];
    trace.iter().fold(0.0, |m: f64, v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.max((v - v0).abs()) })
}

impl Trajectory {
    pub fn span(&self) -> (f64, f64) {
        (self.samples[0].s, self.samples[self.samples.len() - 1].s)
    }

    /// Trace of `name`, computed on demand when it is not registered.
    pub fn trace(&self, name: &str) -> Result<Vec<f64>> {
        match self.invariant_traces.get(name) {
            Some(v) => Ok(v.clone()),
            None => trace_of(self, name),
        }
    }

    /// Position at `s` by quintic Hermite interpolation on `(x, u, u̇)`.
    pub fn position_at(&self, s: f64) -> Result<Vector> {
        let (lo, hi) = self.span();
        if !(s >= lo && s <= hi) {
            return Err(Error::Argument(format!("s = {s} outside [{lo}, {hi}]")));
        }
        let i = self.samples.partition_point(|x| x.s <= s).clamp(1, self.samples.len().max(2) - 1);
        if self.samples.len() == 1 {
            return Ok(self.samples[0].jet.x);
        }
        let (a, b) = (&self.samples[i - 1], &self.samples[i]);
        let h = b.s - a.s;
        let t = (s - a.s) / h;
        let (t2, t3) = (t * t, t * t * t);
        let (t4, t5) = (t3 * t, t3 * t2);
        let h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
        let h1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
        let h2 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
        let h3 = 0.5 * (t3 - 2.0 * t4 + t5);
        let h4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
        let h5 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
        let (da, db) = (a.jet.derivs(), b.jet.derivs());
        let x = a.jet.x * h0 + da[0] * (h * h1) + da[1] * (h * h * h2) + b.jet.x * h5 + db[0] * (h * h4) + db[1] * (h * h * h3);
        Ok(Vector::new(x.components(), Variance::Upper))
    }
}

/// Max drift `|I(s) − I(s₀)|` per name.
pub fn drift_report(t: &Trajectory, names: &[&str]) -> Result<BTreeMap<String, f64>> {
    names.iter().map(|n| Ok((n.to_string(), drift_of(&t.trace(n)?)))).collect()
}

/// Max Euclidean component distance of `x` over the union of both sample
/// grids (and their midpoints) restricted to the common span.
pub fn compare(a: &Trajectory, b: &Trajectory) -> Result<f64> {
    if a.model.metric.dim() != b.model.metric.dim() {
        return Err(Error::Dimension("trajectories live in different dimensions".into()));
    }
    let (a0, a1) = a.span();
    let (b0, b1) = b.span();
    let (lo, hi) = (a0.max(b0), a1.min(b1));
    if lo > hi {
        return Err(Error::Argument(format!("disjoint spans [{a0}, {a1}] and [{b0}, {b1}]")));
    }
    let mut grid: Vec<f64> =
        a.samples.iter().chain(&b.samples).map(|x| x.s).filter(|s| *s >= lo && *s <= hi).chain([lo, hi]).collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let mids: Vec<f64> = grid.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    grid.extend(mids);
    let mut worst: f64 = 0.0;
    for s in grid {
        let d = a.position_at(s)? - b.position_at(s)?;
        worst = worst.max(d.component_norm_sq().sqrt());
    }
    Ok(worst)
}
