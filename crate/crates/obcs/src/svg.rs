//! Minimal standalone SVG line plots for experiment tables.

use std::fmt::Write as _;

use obcs_core::experiment::{ErrorCurveRow, Method, SweepRow};

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Axes {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    /// Draws a dashed vertical line at this x.
    pub marker_x: Option<f64>,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 160.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if hi > lo {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        let pad = if lo == 0.0 { 1.0 } else { 0.1 * lo.abs() };
        (lo - pad, hi + pad)
    }
}

/// One polyline per series, labelled axes, a legend when there is more than
/// one series, and an optional vertical marker.
pub fn emit_svg(series: &[Series], axes: &Axes) -> anyhow::Result<String> {
    let points = || series.iter().flat_map(|s| s.points.iter().copied());
    anyhow::ensure!(points().next().is_some(), "nothing to plot: the table is empty");
    anyhow::ensure!(points().all(|(x, y)| x.is_finite() && y.is_finite()), "non-finite value in plot data");

    let (x0, x1) = padded_range(points().map(|p| p.0).chain(axes.marker_x));
    let (y0, y1) = padded_range(points().map(|p| p.1));
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + ph - (y - y0) / (y1 - y0) * ph;

    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )?;
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#)?;
    writeln!(out, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, LEFT + pw / 2.0, escape(&axes.title))?;
    writeln!(out, r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#)?;

    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let (xv, yv) = (x0 + t * (x1 - x0), y0 + t * (y1 - y0));
        writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, sx(xv), TOP + ph + 16.0, tick(xv))?;
        writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#, LEFT - 6.0, sy(yv) + 4.0, tick(yv))?;
    }
    writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, LEFT + pw / 2.0, HEIGHT - 18.0, escape(&axes.x_label))?;
    writeln!(
        out,
        r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>"#,
        TOP + ph / 2.0,
        escape(&axes.y_label)
    )?;

    if let Some(mx) = axes.marker_x {
        writeln!(
            out,
            r#"<line class="marker" x1="{0:.2}" y1="{TOP}" x2="{0:.2}" y2="{1}" stroke="gray" stroke-dasharray="5,4"/>"#,
            sx(mx),
            TOP + ph
        )?;
    }

    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let coords: Vec<String> = s.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        if coords.len() > 1 {
            writeln!(out, r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#, coords.join(" "))?;
        }
        for &(x, y) in &s.points {
            writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, sx(x), sy(y))?;
        }
    }

    if series.len() > 1 {
        let lx = LEFT + pw + 14.0;
        for (i, s) in series.iter().enumerate() {
            let y = TOP + 10.0 + 18.0 * i as f64;
            let color = COLORS[i % COLORS.len()];
            writeln!(out, r#"<g class="legend"><line x1="{lx}" y1="{y}" x2="{}" y2="{y}" stroke="{color}" stroke-width="2"/>"#, lx + 20.0)?;
            writeln!(out, r#"<text x="{}" y="{}">{}</text></g>"#, lx + 26.0, y + 4.0, escape(&s.label))?;
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn tick(v: f64) -> String {
    if v.abs() >= 1000.0 || v == v.round() {
        format!("{v:.0}")
    } else {
        format!("{v:.3}")
    }
}

/// Mean error against `m`, one series per method.
pub fn error_curve_svg(rows: &[ErrorCurveRow]) -> anyhow::Result<String> {
    let series: Vec<Series> = Method::ALL
        .iter()
        .map(|&method| Series {
            label: method.as_str().to_string(),
            points: rows.iter().filter(|r| r.method == method).map(|r| (r.m as f64, r.mean_error)).collect(),
        })
        .filter(|s| !s.points.is_empty())
        .collect();
    let title = rows.first().map_or(String::new(), |r| format!("n={}, k={}", r.n, r.k));
    emit_svg(
        &series,
        &Axes { title, x_label: "measurements m".into(), y_label: "mean l2 error".into(), marker_x: None },
    )
}

/// Mean superset size against `p`, one series per `m`, marker at `1/(k+1)`.
pub fn sweep_svg(rows: &[SweepRow]) -> anyhow::Result<String> {
    let mut ms: Vec<usize> = rows.iter().map(|r| r.m).collect();
    ms.dedup();
    let series: Vec<Series> = ms
        .iter()
        .map(|&m| Series {
            label: format!("m={m}"),
            points: rows.iter().filter(|r| r.m == m).map(|r| (r.p, r.mean_superset_size)).collect(),
        })
        .collect();
    let first = rows.first();
    emit_svg(
        &series,
        &Axes {
            title: first.map_or(String::new(), |r| format!("n={}, k={}", r.n, r.k)),
            x_label: "Bernoulli probability p".into(),
            y_label: "mean superset size".into(),
            marker_x: first.map(|r| 1.0 / (r.k as f64 + 1.0)),
        },
    )
}
