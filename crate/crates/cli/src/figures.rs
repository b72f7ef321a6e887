//! Helical worldline figures with their `ω = 0` references.

use std::path::{Path, PathBuf};

use worldline_lab::worldline::{figure_scenario, split_space_time, FigureScenario, SpaceTime};

use crate::output::{csv, svg, write_atomic, Series};
use crate::{par_map, CliError};

/// Natural-parameter window plotted for every figure.
pub const FIGURE_SPAN: (f64, f64) = (0.0, 5.0);
pub const FIGURE_SAMPLES: usize = 1001;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Plane {
    Xy,
    Xt,
    Yt,
}

impl Plane {
    pub const ALL: [Plane; 3] = [Plane::Xy, Plane::Xt, Plane::Yt];

    pub fn name(self) -> &'static str {
        match self {
            Plane::Xy => "xy",
            Plane::Xt => "xt",
            Plane::Yt => "yt",
        }
    }

    pub fn parse(s: &str) -> Result<Plane, CliError> {
        Plane::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| CliError::Schema(format!("unknown projection '{s}' (xy, xt, yt)")))
    }

    fn pick(self, st: &SpaceTime, i: usize) -> (f64, f64) {
        match self {
            Plane::Xy => (st.r[i][0], st.r[i][1]),
            Plane::Xt => (st.r[i][0], st.t[i]),
            Plane::Yt => (st.r[i][1], st.t[i]),
        }
    }
}

pub fn grid() -> Vec<f64> {
    let (a, b) = FIGURE_SPAN;
    (0..FIGURE_SAMPLES).map(|i| a + (b - a) * i as f64 / (FIGURE_SAMPLES - 1) as f64).collect()
}

/// `figure=…` parameter line shared by the CSV header and the SVG description.
pub fn describe(f: &FigureScenario) -> String {
    format!(
        "figure={} v=({},{},{}) alpha={} omega={} reference_omega=0",
        f.figure_id, f.v[0], f.v[1], f.v[2], f.alpha, f.omega
    )
}

/// Writes `fig{n}.csv` and one SVG per plane; returns the written paths.
pub fn emit(n: u8, planes: &[Plane], out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let f = figure_scenario(n).map_err(|e| CliError::Schema(e.to_string()))?;
    let s = grid();
    let curve = split_space_time(&f.params().map_err(CliError::from_run)?, &s).map_err(CliError::from_run)?;
    let refc = split_space_time(&f.reference().map_err(CliError::from_run)?, &s).map_err(CliError::from_run)?;

    let header: Vec<String> =
        ["s", "t", "x", "y", "z", "t_ref", "x_ref", "y_ref", "z_ref"].iter().map(|h| h.to_string()).collect();
    let rows: Vec<Vec<f64>> = (0..s.len())
        .map(|i| {
            let (c, r) = (curve.r[i], refc.r[i]);
            vec![s[i], curve.t[i], c[0], c[1], c[2], refc.t[i], r[0], r[1], r[2]]
        })
        .collect();
    let desc = describe(&f);
    let mut written = Vec::new();
    let path = out.join(format!("fig{n}.csv"));
    write_atomic(&path, csv(std::slice::from_ref(&desc), &header, &rows).as_bytes())?;
    written.push(path);

    for &pl in planes {
        let a: Vec<(f64, f64)> = (0..s.len()).map(|i| pl.pick(&curve, i)).collect();
        let b: Vec<(f64, f64)> = (0..s.len()).map(|i| pl.pick(&refc, i)).collect();
        let name = pl.name();
        let (xl, yl) = (&name[..1], &name[1..]);
        let body = svg(
            &format!("Figure {n} ({xl}, {yl})"),
            xl,
            yl,
            &desc,
            &[Series { points: &a, dashed: false }, Series { points: &b, dashed: true }],
        );
        let path = out.join(format!("fig{n}_{name}.svg"));
        write_atomic(&path, body.as_bytes())?;
        written.push(path);
    }
    Ok(written)
}

/// Emits several figures concurrently.
pub fn emit_all(ns: &[u8], planes: &[Plane], out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let res = par_map(ns, |n| emit(*n, planes, out));
    let mut all = Vec::new();
    for r in res {
        all.extend(r?);
    }
    Ok(all)
}
