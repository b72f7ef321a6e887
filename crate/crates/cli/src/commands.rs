//! `simulate` and `oracle`.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use worldline_lab::dynamics::EquationId;
use worldline_lab::integrate::{integrate, Trajectory};
use worldline_lab::worldline::HelixParams;

use crate::output::{csv, write_atomic, Series};
use crate::scenario::{load, OutputKind, Problem};
use crate::{output, CliError};

#[derive(Debug, Serialize)]
pub struct Report {
    pub equation: EquationId,
    pub samples: usize,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub drift_report: BTreeMap<String, f64>,
    pub constraint_drift: Option<f64>,
    pub runtime_seconds: f64,
}

pub fn run(p: &Problem) -> Result<Trajectory, CliError> {
    integrate(&p.model, &p.j0, p.span, &p.cfg).map_err(CliError::from_run)
}

/// Invariant columns: the requested names, or the traced ones when none are requested.
fn columns(p: &Problem, t: &Trajectory) -> Vec<String> {
    if p.invariants.is_empty() {
        t.invariant_traces.keys().cloned().collect()
    } else {
        p.invariants.clone()
    }
}

pub fn simulate(path: &Path, out: &Path) -> Result<Report, CliError> {
    let p = load(path)?.resolve()?;
    let start = Instant::now();
    let t = run(&p)?;
    let names = columns(&p, &t);
    let mut traces = BTreeMap::new();
    for n in &names {
        traces.insert(n.clone(), t.trace(n).map_err(|e| CliError::Schema(e.to_string()))?);
    }
    let mut drift = t.drift_report.clone();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    drift.extend(worldline_lab::integrate::drift_report(&t, &refs).map_err(|e| CliError::Schema(e.to_string()))?);
    let report = Report {
        equation: p.model.id,
        samples: t.samples.len(),
        accepted_steps: t.accepted_steps,
        rejected_steps: t.rejected_steps,
        drift_report: drift,
        constraint_drift: t.constraint_drift,
        runtime_seconds: start.elapsed().as_secs_f64(),
    };

    let n = p.model.metric.dim();
    if p.outputs.contains(&OutputKind::Csv) {
        let mut header = vec!["s".to_string()];
        header.extend((0..n).map(|i| format!("x{i}")));
        header.extend((0..n).map(|i| format!("u{i}")));
        header.extend(names.iter().cloned());
        let rows: Vec<Vec<f64>> = t
            .samples
            .iter()
            .enumerate()
            .map(|(i, smp)| {
                let mut r = vec![smp.s];
                r.extend_from_slice(smp.jet.x.components());
                r.extend_from_slice(smp.jet.u().components());
                r.extend(names.iter().map(|k| traces[k][i]));
                r
            })
            .collect();
        let comments = vec![format!("equation={}", p.model.id.name())];
        write_atomic(&out.join("trajectory.csv"), csv(&comments, &header, &rows).as_bytes())?;
    }
    if p.outputs.contains(&OutputKind::Svg) {
        let (a, b) = if n >= 3 { (1, 2) } else { (0, 1.min(n - 1)) };
        let pts: Vec<(f64, f64)> = t.samples.iter().map(|s| (s.jet.x[a], s.jet.x[b])).collect();
        let body = output::svg(
            p.model.id.name(),
            &format!("x{a}"),
            &format!("x{b}"),
            &format!("equation={}", p.model.id.name()),
            &[Series { points: &pts, dashed: false }],
        );
        write_atomic(&out.join("trajectory.svg"), body.as_bytes())?;
    }
    if p.outputs.contains(&OutputKind::Json) {
        let body = serde_json::to_string_pretty(&t).map_err(|e| CliError::Io(e.to_string()))?;
        write_atomic(&out.join("trajectory.json"), body.as_bytes())?;
    }
    let body = serde_json::to_string_pretty(&report).map_err(|e| CliError::Io(e.to_string()))?;
    write_atomic(&out.join("report.json"), body.as_bytes())?;
    Ok(report)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct OracleOutcome {
    pub max_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Closed-form helix matching an EQ26 problem, or a constraint error.
fn oracle_helix(p: &Problem) -> Result<HelixParams, CliError> {
    if p.model.id != EquationId::Eq26Spin {
        return Err(CliError::Constraint(format!("oracle needs EQ26_SPIN, got {}", p.model.id.name())));
    }
    let omega = p.model.params.omega2.sqrt();
    if let Some(h) = p.helix {
        if (h.omega - omega).abs() > 1e-12 * omega.max(1.0) && h.a.max_abs() > 0.0 {
            return Err(CliError::Constraint(format!("omega2 = {} does not match the data's ω = {}", omega * omega, h.omega)));
        }
        // rebase so the closed form starts at s0
        let j = h.eval(p.span.0, 3).map_err(CliError::from_run)?;
        if h.a.max_abs() == 0.0 {
            return straight(&j, p);
        }
        return HelixParams::from_jet(&j, omega, h.metric).map_err(|e| CliError::Constraint(e.to_string()));
    }
    if p.j0.derivs()[1].max_abs() == 0.0 && p.j0.derivs()[2].max_abs() == 0.0 {
        return straight(&p.j0, p);
    }
    HelixParams::from_jet(&p.j0, omega, p.model.metric).map_err(|e| CliError::Constraint(e.to_string()))
}

fn straight(j: &worldline_lab::frenet::Jet, p: &Problem) -> Result<HelixParams, CliError> {
    let z = worldline_lab::Vector::zeros(j.dim());
    HelixParams::new(j.x, j.u(), z, z, 0.0, p.model.metric).map_err(|e| CliError::Constraint(e.to_string()))
}

pub fn oracle(path: &Path) -> Result<OracleOutcome, CliError> {
    let p = load(path)?.resolve()?;
    oracle_problem(&p)
}

pub fn oracle_problem(p: &Problem) -> Result<OracleOutcome, CliError> {
    let h = oracle_helix(p)?;
    let t = run(p)?;
    let s0 = p.span.0;
    let max_error = t.samples.iter().map(|x| (x.jet.x - h.position(x.s - s0)).max_abs()).fold(0.0, f64::max);
    Ok(OracleOutcome { max_error, tolerance: p.tolerance, pass: max_error <= p.tolerance })
}
