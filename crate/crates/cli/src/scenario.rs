//! Scenario files: schema, parsing and resolution into a runnable problem.

use std::path::Path;

use serde::Deserialize;
use worldline_lab::dynamics::{EquationId, EquationModel, ModelParams};
use worldline_lab::frenet::{Jet, ParamKind};
use worldline_lab::integrate::IntegratorConfig;
use worldline_lab::worldline::{figure_scenario, solve_appendix, HelixParams};
use worldline_lab::{Error, MetricSpace, Vector};

use crate::CliError;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub equation: EquationId,
    pub metric: MetricSpec,
    #[serde(default)]
    pub params: ParamSpec,
    pub initial: InitialSpec,
    pub span: [f64; 2],
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<OutputKind>,
    #[serde(default)]
    pub invariants: Vec<String>,
    /// Pass threshold for `oracle`.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_outputs() -> Vec<OutputKind> {
    vec![OutputKind::Csv, OutputKind::Json]
}

fn default_tolerance() -> f64 {
    1e-6
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputKind {
    Csv,
    Json,
    Svg,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricSpec {
    pub dimension: usize,
    pub signature: Vec<f64>,
    #[serde(default = "one")]
    pub orientation: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamSpec {
    pub m: Option<f64>,
    pub m0: Option<f64>,
    pub sigma: Option<Vec<f64>>,
    /// Defaults to `ω²` of appendix or figure initial data.
    pub omega2: Option<f64>,
    pub a: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum InitialSpec {
    Jet(JetSpec),
    Appendix(AppendixWrap),
    Figure(FigureWrap),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JetSpec {
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub udot: Vec<f64>,
    pub uddot: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AppendixWrap {
    pub appendix: AppendixSpec,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AppendixSpec {
    pub alpha: f64,
    pub v: [f64; 3],
    pub omega: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FigureWrap {
    pub figure: u8,
}

/// A validated scenario ready to integrate.
#[derive(Clone, Debug)]
pub struct Problem {
    pub model: EquationModel,
    pub j0: Jet,
    pub span: (f64, f64),
    pub cfg: IntegratorConfig,
    pub outputs: Vec<OutputKind>,
    pub invariants: Vec<String>,
    pub tolerance: f64,
    /// Closed-form worldline when the initial data come from one.
    pub helix: Option<HelixParams>,
}

pub fn load(path: &Path) -> Result<ScenarioFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<ScenarioFile, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Schema(e.to_string()))
}

fn vector(name: &str, v: &[f64], n: usize) -> Result<Vector, CliError> {
    if v.len() != n {
        return Err(CliError::Schema(format!("'{name}' needs {n} components, got {}", v.len())));
    }
    Ok(Vector::upper(v))
}

/// Classifies core errors raised while validating physical content.
fn physical(e: Error) -> CliError {
    match e {
        Error::Constraint(_) => CliError::Constraint(e.to_string()),
        other => CliError::Schema(other.to_string()),
    }
}

impl ScenarioFile {
    pub fn resolve(&self) -> Result<Problem, CliError> {
        let ms = &self.metric;
        if ms.signature.len() != ms.dimension {
            return Err(CliError::Schema(format!(
                "signature has {} entries for dimension {}",
                ms.signature.len(),
                ms.dimension
            )));
        }
        let metric = MetricSpace::new(&ms.signature, ms.orientation).map_err(|e| CliError::Schema(e.to_string()))?;
        let n = metric.dim();
        let [s0, s1] = self.span;
        if !(s0.is_finite() && s1.is_finite() && s0 <= s1) {
            return Err(CliError::Schema(format!("span must satisfy s0 ≤ s1, got {:?}", self.span)));
        }
        self.integrator.validate().map_err(|e| CliError::Schema(e.to_string()))?;
        if !(self.tolerance > 0.0) {
            return Err(CliError::Schema("tolerance must be positive".into()));
        }

        let helix = match &self.initial {
            InitialSpec::Jet(_) => None,
            InitialSpec::Appendix(AppendixWrap { appendix: a }) => {
                Some(solve_appendix(a.alpha, a.v, a.omega).map_err(physical)?)
            }
            InitialSpec::Figure(FigureWrap { figure }) => {
                Some(figure_scenario(*figure).and_then(|f| f.params()).map_err(physical)?)
            }
        };
        if let Some(h) = &helix {
            if h.metric != metric {
                return Err(CliError::Schema("appendix data need the metric [1, -1, -1, -1]".into()));
            }
        }

        let p = &self.params;
        let sigma = p.sigma.as_deref().map(|s| vector("sigma", s, 4)).transpose()?;
        let omega2 = p.omega2.or(helix.map(|h| h.omega * h.omega)).unwrap_or(0.0);
        let params =
            ModelParams { m: p.m.unwrap_or(0.0), m0: p.m0.unwrap_or(0.0), sigma, omega2, a: p.a.unwrap_or(0.0) };
        let model = EquationModel::new(self.equation, metric, params).map_err(physical)?;
        let need = model.order() - 1;

        let kind = if self.equation.natural() { ParamKind::Natural } else { ParamKind::Generic };
        let j0 = match (&self.initial, &helix) {
            (InitialSpec::Jet(js), _) => {
                let mut d = vec![vector("u", &js.u, n)?, vector("udot", &js.udot, n)?];
                if need >= 3 {
                    let udd = js.uddot.as_deref().ok_or_else(|| {
                        CliError::Schema(format!("{} needs 'uddot' in the initial data", self.equation.name()))
                    })?;
                    d.push(vector("uddot", udd, n)?);
                }
                Jet::new(vector("x", &js.x, n)?, &d, kind).map_err(|e| CliError::Schema(e.to_string()))?
            }
            (_, Some(h)) => h.eval(s0, need).map_err(|e| CliError::Schema(e.to_string()))?.with_kind(kind),
            _ => unreachable!("closed-form initial data always carry a helix"),
        };
        model.validate_initial(&j0).map_err(physical)?;
        Ok(Problem {
            model,
            j0,
            span: (s0, s1),
            cfg: self.integrator,
            outputs: self.outputs.clone(),
            invariants: self.invariants.clone(),
            tolerance: self.tolerance,
            helix,
        })
    }
}
