//! `verify` suites and the randomized data they share with the acceptance run.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use worldline_lab::dynamics::{invariant, EquationId, EquationModel, ModelParams};
use worldline_lab::frenet::Jet;
use worldline_lab::integrate::{compare, integrate, IntegratorConfig, Trajectory};
use worldline_lab::sampling::{random_jet, random_natural_jet, random_vector};
use worldline_lab::varcalc::{euler_poisson, shape_report, CatalogParams, EulerPoissonExpr, LagrangianModel};
use worldline_lab::{MetricSpace, Result, Vector};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    AtMost,
    Above,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub check: String,
    /// Worst value over all trials: the max for [`Rule::AtMost`], the min for [`Rule::Above`].
    pub residual: f64,
    pub threshold: f64,
    pub rule: Rule,
}

impl Row {
    pub fn pass(&self) -> bool {
        match self.rule {
            Rule::AtMost => self.residual <= self.threshold,
            Rule::Above => self.residual > self.threshold,
        }
    }
}

/// Accumulates per-trial residuals into rows, keeping insertion order.
#[derive(Default)]
struct Table(Vec<Row>);

impl Table {
    fn add(&mut self, check: &str, v: f64, threshold: f64, rule: Rule) {
        let v = if v.is_nan() { f64::INFINITY * if rule == Rule::AtMost { 1.0 } else { -1.0 } } else { v };
        match self.0.iter_mut().find(|r| r.check == check) {
            Some(r) => {
                r.residual = match rule {
                    Rule::AtMost => r.residual.max(v),
                    Rule::Above => r.residual.min(v),
                }
            }
            None => self.0.push(Row { check: check.into(), residual: v, threshold, rule }),
        }
    }
}

pub const SUITES: [&str; 3] = ["shape", "lagrangian", "equivalence"];

pub fn run_suite(suite: &str, seed: u64, trials: usize) -> std::result::Result<Vec<Row>, CliError> {
    let names: Vec<&str> = match suite {
        "all" => SUITES.to_vec(),
        s if SUITES.contains(&s) => vec![s],
        other => return Err(CliError::Schema(format!("unknown suite '{other}'"))),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Table::default();
    for n in names {
        let r = match n {
            "shape" => shape(&mut rng, trials, &mut t),
            "lagrangian" => lagrangian(&mut rng, trials, &mut t),
            _ => equivalence(&mut rng, trials, &mut t),
        };
        r.map_err(CliError::from_run)?;
    }
    Ok(t.0)
}

fn rel_weierstrass(w: f64, scale: f64) -> f64 {
    w / scale.max(1.0)
}

fn shape(r: &mut ChaCha8Rng, trials: usize, t: &mut Table) -> Result<()> {
    let (m2, m4) = (MetricSpace::euclidean(2), MetricSpace::minkowski());
    for i in 0..trials {
        let m3 = if i % 2 == 0 { MetricSpace::euclidean(3) } else { MetricSpace::lorentz(3) };
        let j = random_jet(r, &m2, 4)?;
        let rep = shape_report(&EulerPoissonExpr::Planar { m: r.gen_range(-2.0..2.0) }, &j, &m2)?;
        t.add("planar antisymmetry", rep.antisymmetry_residual, 1e-8, Rule::AtMost);
        t.add("planar reparametrization residual (non-invariant)", rep.invariance_residual, 1e-2, Rule::Above);

        let j = random_jet(r, &m3, 4)?;
        let rep = shape_report(&EulerPoissonExpr::Spatial { m: r.gen_range(-2.0..2.0) }, &j, &m3)?;
        t.add("spatial antisymmetry", rep.antisymmetry_residual, 1e-8, Rule::AtMost);

        let j = random_jet(r, &m4, 4)?;
        let e = EulerPoissonExpr::Spin { m0: r.gen_range(0.2..3.0), sigma: random_vector(r, 4, 1.0) };
        let rep = shape_report(&e, &j, &m4)?;
        t.add("spin antisymmetry", rep.antisymmetry_residual, 1e-8, Rule::AtMost);
        t.add("spin weierstrass (relative)", rel_weierstrass(rep.weierstrass_residual, rep.weierstrass_scale), 1e-9, Rule::AtMost);
        t.add("spin xi'^4 scaling", rep.invariance_residual, 1e-9, Rule::AtMost);

        let j = random_jet(r, &m4, 4)?;
        let rep = shape_report(&EulerPoissonExpr::Braced { a: r.gen_range(-8.0..8.0) }, &j, &m4)?;
        t.add("braced weierstrass (relative)", rel_weierstrass(rep.weierstrass_residual, rep.weierstrass_scale), 1e-9, Rule::AtMost);
    }
    Ok(())
}

fn vrel(a: &Vector, b: &Vector) -> f64 {
    (*a - *b).max_abs() / a.max_abs().max(b.max_abs()).max(1e-300)
}

fn lagrangian(r: &mut ChaCha8Rng, trials: usize, t: &mut Table) -> Result<()> {
    let ms = [MetricSpace::euclidean(2), MetricSpace::euclidean(3), MetricSpace::lorentz(3), MetricSpace::minkowski()];
    for i in 0..trials {
        let m = &ms[i % ms.len()];
        let j = random_jet(r, m, 4)?;
        let a = r.gen_range(-8.0..8.0);
        let l = LagrangianModel::catalog("lhom65", CatalogParams { a, ..Default::default() })?;
        let el = euler_poisson(&l, &j, m)?;
        let e67 = EulerPoissonExpr::Braced { a }.eval(&j, m)?;
        t.add("EL(lhom65) vs -1/2 braced covector (relative)", vrel(&el, &(e67 * -0.5)), 1e-6, Rule::AtMost);

        let m2 = MetricSpace::euclidean(2);
        let j = random_jet(r, &m2, 4)?;
        let mass = r.gen_range(-2.0..2.0);
        let l = LagrangianModel::catalog("l2d", CatalogParams { m: mass, ..Default::default() })?;
        let el = euler_poisson(&l, &j, &m2)?;
        t.add("EL(l2d) vs planar expression (relative)", vrel(&el, &EulerPoissonExpr::Planar { m: mass }.eval(&j, &m2)?), 1e-8, Rule::AtMost);
    }
    Ok(())
}

pub fn model(id: EquationId, m: MetricSpace, p: ModelParams) -> Result<EquationModel> {
    EquationModel::new(id, m, p)
}

/// Timelike natural Minkowski jet with `order` derivatives.
pub fn timelike_jet(r: &mut impl Rng, order: usize) -> Result<Jet> {
    let m = MetricSpace::minkowski();
    loop {
        let j = random_natural_jet(r, &m, order)?;
        if j.u()[0] > 0.0 && m.dot(&j.u(), &j.u()) > 0.0 {
            return Ok(j);
        }
    }
}

/// Natural data with `u̇·ü = 0`, so that `k′(0) = 0`.
pub fn constant_k_jet(r: &mut impl Rng) -> Result<Jet> {
    let m = MetricSpace::minkowski();
    let j = timelike_jet(r, 3)?;
    let d = j.derivs();
    let udd = d[2] - d[1] * (m.dot(&d[1], &d[2]) / m.dot(&d[1], &d[1]));
    Ok(j.with_deriv(3, udd))
}

/// Constant-k data with `ü²/u̇² > 0`, usable as EQ26_SPIN initial data.
pub fn spin_pair_jet(r: &mut impl Rng) -> Result<Jet> {
    let m = MetricSpace::minkowski();
    loop {
        let j = constant_k_jet(r)?;
        if invariant("ratio32", &j, &ModelParams::default(), &m)? > 0.05 {
            return Ok(j);
        }
    }
}

/// Trajectories of EQ26_SPIN and EQ33_I from the same data, `ω² = ü²/u̇²`.
pub fn spin_pair(j: &Jet, span: (f64, f64), cfg: &IntegratorConfig) -> Result<(Trajectory, Trajectory)> {
    let m = MetricSpace::minkowski();
    let omega2 = invariant("ratio32", j, &ModelParams::default(), &m)?;
    let a = integrate(&model(EquationId::Eq26Spin, m, ModelParams { omega2, ..Default::default() })?, j, span, cfg)?;
    let b = integrate(&model(EquationId::Eq33I, m, ModelParams::default())?, j, span, cfg)?;
    Ok((a, b))
}

/// Trajectories of EQ68_VAR with `A = k² − 2τ²` and EQ33_I from constant-k data;
/// oscillatory when `ü²/u̇² > 0`.
pub fn variational_pair(j: &Jet, span: (f64, f64), cfg: &IntegratorConfig) -> Result<(Trajectory, Trajectory)> {
    let m = MetricSpace::minkowski();
    let a = invariant("k2_minus_2tau2", j, &ModelParams::default(), &m)?;
    let x = integrate(&model(EquationId::Eq68Var, m, ModelParams { a, ..Default::default() })?, j, span, cfg)?;
    let y = integrate(&model(EquationId::Eq33I, m, ModelParams::default())?, j, span, cfg)?;
    Ok((x, y))
}

fn equivalence(r: &mut ChaCha8Rng, trials: usize, t: &mut Table) -> Result<()> {
    let cfg = IntegratorConfig::adaptive(1e-10);
    for _ in 0..trials {
        let j = spin_pair_jet(r)?;
        let (a, b) = spin_pair(&j, (0.0, 10.0), &cfg)?;
        t.add("EQ26_SPIN vs EQ33_I distance", compare(&a, &b)?, 1e-6, Rule::AtMost);
        let j = spin_pair_jet(r)?;
        let (a, b) = variational_pair(&j, (0.0, 10.0), &cfg)?;
        t.add("EQ68_VAR vs EQ33_I distance", compare(&a, &b)?, 1e-6, Rule::AtMost);
    }
    Ok(())
}
