//! CSV, SVG and JSON writers. Every file is written to a temporary sibling
//! and renamed into place.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::CliError;

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io)?;
    }
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp).map_err(io)?;
        f.write_all(bytes).map_err(io)?;
        f.sync_all().map_err(io)?;
    }
    fs::rename(&tmp, path).map_err(io)
}

/// Seventeen significant digits, which round-trips every `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Comma-separated table with optional `#` comment lines before the header.
pub fn csv(comments: &[String], header: &[String], rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    let _ = writeln!(out, "{}", header.join(","));
    for r in rows {
        let cells: Vec<String> = r.iter().map(|x| num(*x)).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

/// Parses a table written by [`csv`]: comment lines, header, numeric rows.
pub fn parse_csv(text: &str) -> Result<(Vec<String>, Vec<String>, Vec<Vec<f64>>), CliError> {
    let mut comments = Vec::new();
    let mut lines = text.lines().filter(|l| !l.is_empty());
    let header = loop {
        match lines.next() {
            Some(l) if l.starts_with('#') => comments.push(l.trim_start_matches('#').trim().to_string()),
            Some(l) => break l.split(',').map(str::to_string).collect::<Vec<_>>(),
            None => return Err(CliError::Schema("empty csv".into())),
        }
    };
    let rows = lines
        .map(|l| {
            l.split(',')
                .map(|c| c.parse::<f64>().map_err(|e| CliError::Schema(format!("bad cell '{c}': {e}"))))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((comments, header, rows))
}

pub struct Series<'a> {
    pub points: &'a [(f64, f64)],
    pub dashed: bool,
}

pub const SVG_WIDTH: f64 = 800.0;
pub const SVG_HEIGHT: f64 = 600.0;
const MARGIN: f64 = 60.0;

/// Line plot on an 800×600 viewport with axes scaled to all series.
/// `desc` is embedded verbatim for provenance.
pub fn svg(title: &str, xlabel: &str, ylabel: &str, desc: &str, series: &[Series]) -> String {
    let all = series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    let pad = |a: f64, b: f64| if b - a > 0.0 { (a, b) } else { (a - 0.5, b + 0.5) };
    let ((x0, x1), (y0, y1)) = (pad(x0, x1), pad(y0, y1));
    let (w, h) = (SVG_WIDTH - 2.0 * MARGIN, SVG_HEIGHT - 2.0 * MARGIN);
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * w;
    let py = |y: f64| SVG_HEIGHT - MARGIN - (y - y0) / (y1 - y0) * h;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="800" height="600" viewBox="0 0 800 600">"#
    );
    let _ = writeln!(out, "<title>{}</title>", escape(title));
    let _ = writeln!(out, "<desc>{}</desc>", escape(desc));
    let _ = writeln!(out, r#"<rect x="0" y="0" width="800" height="600" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{w}" height="{h}" fill="none" stroke="black" stroke-width="1"/>"#
    );
    let label = |out: &mut String, x: f64, y: f64, anchor: &str, t: &str| {
        let _ = writeln!(out, r#"<text x="{x:.2}" y="{y:.2}" font-size="12" text-anchor="{anchor}">{}</text>"#, escape(t));
    };
    label(&mut out, SVG_WIDTH / 2.0, 30.0, "middle", title);
    label(&mut out, SVG_WIDTH / 2.0, SVG_HEIGHT - 15.0, "middle", xlabel);
    label(&mut out, 15.0, SVG_HEIGHT / 2.0, "start", ylabel);
    label(&mut out, MARGIN, SVG_HEIGHT - MARGIN + 16.0, "start", &format!("{x0:.4}"));
    label(&mut out, SVG_WIDTH - MARGIN, SVG_HEIGHT - MARGIN + 16.0, "end", &format!("{x1:.4}"));
    label(&mut out, MARGIN - 4.0, SVG_HEIGHT - MARGIN, "end", &format!("{y0:.4}"));
    label(&mut out, MARGIN - 4.0, MARGIN + 4.0, "end", &format!("{y1:.4}"));
    for s in series {
        let pts: Vec<String> = s.points.iter().map(|&(x, y)| format!("{:.3},{:.3}", px(x), py(y))).collect();
        let dash = if s.dashed { r#" stroke-dasharray="4 2""# } else { "" };
        let color = if s.dashed { "gray" } else { "steelblue" };
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{}"/>"#,
            pts.join(" ")
        );
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
