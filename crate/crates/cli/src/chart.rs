//! Plain SVG line charts of sweep results.

use std::fmt::Write as _;

use crate::error::{CliError, Result};
use crate::sweep::SweepRow;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 180.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Metric {
    #[default]
    Coverage,
    Ase,
}

impl Metric {
    fn label(&self) -> &'static str {
        match self {
            Metric::Coverage => "coverage probability",
            Metric::Ase => "ASE (bit/s/Hz/m²)",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesPoint {
    pub x: f64,
    pub y: f64,
    /// Half-width of the error bar, if any.
    pub err: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub method: String,
    pub points: Vec<SeriesPoint>,
}

/// Groups rows into one series per method, in order of first appearance.
/// Failed rows are dropped. Monte Carlo intervals are carried over to ASE
/// by the same scale factor as the point estimate.
pub fn series(rows: &[SweepRow], metric: Metric) -> Vec<Series> {
    let mut out: Vec<Series> = Vec::new();
    for row in rows {
        let (Some(cov), Some(ase)) = (row.coverage(), row.ase()) else {
            continue;
        };
        let (y, err) = match metric {
            Metric::Coverage => (cov, row.ci_half_width()),
            Metric::Ase => (
                ase,
                row.ci_half_width()
                    .map(|c| if cov > 0.0 { c * ase / cov } else { 0.0 }),
            ),
        };
        let point = SeriesPoint {
            x: row.sweep_value,
            y,
            err,
        };
        match out.iter_mut().find(|s| s.method == row.method) {
            Some(s) => s.points.push(point),
            None => out.push(Series {
                method: row.method.clone(),
                points: vec![point],
            }),
        }
    }
    for s in &mut out {
        s.points.sort_by(|a, b| a.x.total_cmp(&b.x));
    }
    out
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let nice = if norm < 1.5 {
        1.0
    } else if norm < 3.0 {
        2.0
    } else if norm < 7.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn ticks(lo: f64, hi: f64) -> (f64, f64, Vec<f64>) {
    let (lo, hi) = if hi > lo {
        (lo, hi)
    } else {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
        (lo - pad, hi + pad)
    };
    let step = nice_step(hi - lo);
    let start = (lo / step).floor() * step;
    let end = (hi / step).ceil() * step;
    let n = ((end - start) / step).round() as usize;
    (
        start,
        end,
        (0..=n).map(|i| start + i as f64 * step).collect(),
    )
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.abs() < 1e-3 || v.abs() >= 1e5 {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Renders `rows` as an SVG document. Fails if there is nothing to plot.
pub fn render(rows: &[SweepRow], metric: Metric, title: &str) -> Result<String> {
    let all = series(rows, metric);
    if all.is_empty() {
        return Err(CliError::usage("no plottable rows in the sweep file"));
    }
    let axis = rows[0].sweep_axis;
    if let Some(r) = rows.iter().find(|r| r.sweep_axis != axis) {
        return Err(CliError::usage(format!(
            "mixed sweep axes '{axis}' and '{}' in one file",
            r.sweep_axis
        )));
    }
    let pts = all.iter().flat_map(|s| &s.points);
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for p in pts {
        let e = p.err.unwrap_or(0.0);
        xmin = xmin.min(p.x);
        xmax = xmax.max(p.x);
        ymin = ymin.min(p.y - e);
        ymax = ymax.max(p.y + e);
    }
    let (x0, x1, xt) = ticks(xmin, xmax);
    let (y0, y1, yt) = ticks(ymin.min(0.0), ymax);
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + ph - (y - y0) / (y1 - y0) * ph;

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + pw / 2.0,
        escape(title)
    )
    .unwrap();

    writeln!(s, r##"<g class="grid" stroke="#e0e0e0">"##).unwrap();
    for &y in &yt {
        writeln!(
            s,
            r#"<line x1="{LEFT}" x2="{}" y1="{1:.2}" y2="{1:.2}"/>"#,
            LEFT + pw,
            sy(y)
        )
        .unwrap();
    }
    s.push_str("</g>\n");

    writeln!(s, r#"<g class="axes" stroke="black">"#).unwrap();
    writeln!(
        s,
        r#"<line x1="{LEFT}" x2="{}" y1="{1}" y2="{1}"/>"#,
        LEFT + pw,
        TOP + ph
    )
    .unwrap();
    writeln!(
        s,
        r#"<line x1="{LEFT}" x2="{LEFT}" y1="{TOP}" y2="{}"/>"#,
        TOP + ph
    )
    .unwrap();
    s.push_str("</g>\n");
    for &x in &xt {
        writeln!(
            s,
            r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#,
            sx(x),
            TOP + ph + 18.0,
            tick_label(x)
        )
        .unwrap();
    }
    for &y in &yt {
        writeln!(
            s,
            r#"<text x="{}" y="{:.2}" text-anchor="end" dominant-baseline="middle">{}</text>"#,
            LEFT - 6.0,
            sy(y),
            tick_label(y)
        )
        .unwrap();
    }
    writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 16.0,
        escape(axis.label())
    )
    .unwrap();
    writeln!(
        s,
        r#"<text transform="translate(18 {}) rotate(-90)" text-anchor="middle">{}</text>"#,
        TOP + ph / 2.0,
        escape(metric.label())
    )
    .unwrap();

    for (i, series) in all.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let method = escape(&series.method);
        writeln!(
            s,
            r#"<g class="series" data-method="{method}" stroke="{color}" fill="{color}">"#
        )
        .unwrap();
        let path: Vec<String> = series
            .points
            .iter()
            .enumerate()
            .map(|(j, p)| {
                format!(
                    "{}{:.2},{:.2}",
                    if j == 0 { "M" } else { "L" },
                    sx(p.x),
                    sy(p.y)
                )
            })
            .collect();
        writeln!(
            s,
            r#"<path d="{}" fill="none" stroke-width="2"/>"#,
            path.join(" ")
        )
        .unwrap();
        for p in &series.points {
            writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3"/>"#,
                sx(p.x),
                sy(p.y)
            )
            .unwrap();
        }
        if series.points.iter().any(|p| p.err.is_some()) {
            s.push_str("<g class=\"error-bars\" stroke-width=\"1\">\n");
            for p in &series.points {
                let Some(e) = p.err else { continue };
                let (x, lo, hi) = (sx(p.x), sy(p.y - e), sy(p.y + e));
                writeln!(
                    s,
                    r#"<path d="M{x:.2},{lo:.2} L{x:.2},{hi:.2} M{:.2},{lo:.2} L{:.2},{lo:.2} M{:.2},{hi:.2} L{:.2},{hi:.2}"/>"#,
                    x - 4.0,
                    x + 4.0,
                    x - 4.0,
                    x + 4.0
                )
                .unwrap();
            }
            s.push_str("</g>\n");
        }
        s.push_str("</g>\n");
        let ly = TOP + 10.0 + 20.0 * i as f64;
        let lx = LEFT + pw + 16.0;
        writeln!(
            s,
            r#"<line class="legend" x1="{lx}" x2="{}" y1="{ly}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            lx + 20.0
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="{}" y="{ly}" dominant-baseline="middle">{method}</text>"#,
            lx + 26.0
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    Ok(s)
}
