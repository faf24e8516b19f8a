//! Line charts of trial-averaged benchmark metrics as standalone SVG 1.1.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::bench::{BenchRecord, BASELINE};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    /// `reduce_ms + cluster_ms`.
    Time,
    /// Normalized objective `F / ‖A‖_F²`.
    Objective,
    Accuracy,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Time, Metric::Objective, Metric::Accuracy];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Time => "time",
            Metric::Objective => "objective",
            Metric::Accuracy => "accuracy",
        }
    }

    fn axis_label(self) -> &'static str {
        match self {
            Metric::Time => "reduction + clustering time (ms)",
            Metric::Objective => "normalized objective",
            Metric::Accuracy => "accuracy",
        }
    }

    fn value(self, rec: &BenchRecord) -> Option<f64> {
        match self {
            Metric::Time => Some(rec.total_ms()),
            Metric::Objective => Some(rec.normalized_objective),
            Metric::Accuracy => rec.accuracy,
        }
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown metric `{s}` (expected time, objective or accuracy)")))
    }
}

/// One method's curve: `(r, mean over trials)` in ascending `r`.
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub method: String,
    pub points: Vec<(usize, f64)>,
}

/// Groups records by method (first-appearance order) and `r`, averaging the
/// metric over trials. Records without the metric are ignored.
pub fn series(records: &[BenchRecord], metric: Metric) -> Vec<Series> {
    // Per method: (r, running sum, count).
    type Sums = Vec<(usize, f64, usize)>;
    let mut out: Vec<(String, Sums)> = Vec::new();
    for rec in records {
        let Some(y) = metric.value(rec) else { continue };
        let idx = match out.iter().position(|(m, _)| *m == rec.method) {
            Some(i) => i,
            None => {
                out.push((rec.method.clone(), Vec::new()));
                out.len() - 1
            }
        };
        let acc = &mut out[idx].1;
        match acc.iter_mut().find(|(r, _, _)| *r == rec.r) {
            Some(slot) => {
                slot.1 += y;
                slot.2 += 1;
            }
            None => acc.push((rec.r, y, 1)),
        }
    }
    out.into_iter()
        .map(|(method, mut acc)| {
            acc.sort_by_key(|p| p.0);
            Series { method, points: acc.into_iter().map(|(r, sum, n)| (r, sum / n as f64)).collect() }
        })
        .collect()
}

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];
const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 460.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 180.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 56.0;

/// Renders the chart. The baseline method, when other series exist, is drawn
/// as a dashed horizontal line at its mean instead of at `r = n`.
pub fn render_svg(records: &[BenchRecord], metric: Metric) -> Result<String> {
    if records.is_empty() {
        return Err(Error::Invalid("no records to plot".into()));
    }
    let all = series(records, metric);
    if all.is_empty() {
        return Err(Error::Invalid(format!("no record carries the {} metric", metric.name())));
    }
    let has_curves = all.iter().any(|s| s.method != BASELINE);
    let is_flat = |s: &Series| has_curves && s.method == BASELINE;

    let xs = all.iter().filter(|s| !is_flat(s)).flat_map(|s| s.points.iter().map(|p| p.0 as f64));
    let (x0, x1) = padded_range(xs, false);
    let ys = all.iter().flat_map(|s| s.points.iter().map(|p| p.1));
    let (y0, y1) = padded_range(ys, true);
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * (WIDTH - LEFT - RIGHT);
    let py = |y: f64| HEIGHT - BOTTOM - (y - y0) / (y1 - y0) * (HEIGHT - TOP - BOTTOM);

    let mut svg = String::new();
    let w = &mut svg;
    let _ = writeln!(
        w,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">
<rect width="100%" height="100%" fill="white"/>"#
    );
    let (bx0, bx1, by0, by1) = (LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM);
    let _ = writeln!(w, r#"<rect x="{bx0}" y="{by0}" width="{}" height="{}" fill="none" stroke="black"/>"#, bx1 - bx0, by1 - by0);
    for i in 0..=5 {
        let t = i as f64 / 5.0;
        let (xv, yv) = (x0 + t * (x1 - x0), y0 + t * (y1 - y0));
        let (x, y) = (px(xv), py(yv));
        let _ = writeln!(w, r##"<line x1="{x:.2}" y1="{by1}" x2="{x:.2}" y2="{}" stroke="black"/>"##, by1 + 5.0);
        let _ = writeln!(w, r#"<text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#, by1 + 20.0, tick(xv));
        let _ = writeln!(w, r##"<line x1="{}" y1="{y:.2}" x2="{bx0}" y2="{y:.2}" stroke="black"/>"##, bx0 - 5.0);
        let _ = writeln!(w, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, bx0 - 8.0, y + 4.0, tick(yv));
    }
    let _ = writeln!(w, r#"<text x="{:.2}" y="{}" text-anchor="middle">number of dimensions r</text>"#, (bx0 + bx1) / 2.0, HEIGHT - 12.0);
    let _ = writeln!(
        w,
        r#"<text transform="translate(18 {:.2}) rotate(-90)" text-anchor="middle">{}</text>"#,
        (by0 + by1) / 2.0,
        metric.axis_label()
    );

    for (i, s) in all.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let name = escape(&s.method);
        if is_flat(s) {
            let mean = s.points.iter().map(|p| p.1).sum::<f64>() / s.points.len() as f64;
            let y = py(mean);
            let _ = writeln!(
                w,
                r#"<line class="series" data-method="{name}" x1="{bx0}" y1="{y:.2}" x2="{bx1}" y2="{y:.2}" stroke="{color}" stroke-width="2" stroke-dasharray="6 4"/>"#
            );
        } else {
            let pts: Vec<String> = s.points.iter().map(|&(r, y)| format!("{:.2},{:.2}", px(r as f64), py(y))).collect();
            let _ = writeln!(
                w,
                r#"<polyline class="series" data-method="{name}" points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
                pts.join(" ")
            );
            for &(r, y) in &s.points {
                let _ = writeln!(w, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, px(r as f64), py(y));
            }
        }
        let ly = by0 + 10.0 + 20.0 * i as f64;
        let lx = bx1 + 16.0;
        let _ = writeln!(w, r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#, lx + 24.0);
        let _ = writeln!(w, r#"<text x="{}" y="{}">{name}</text>"#, lx + 30.0, ly + 4.0);
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn emit_plot(records: &[BenchRecord], metric: Metric, path: impl AsRef<Path>) -> Result<()> {
    let svg = render_svg(records, metric)?;
    std::fs::write(path.as_ref(), svg).map_err(|e| Error::io(path.as_ref(), e))
}

fn padded_range(values: impl Iterator<Item = f64>, pad: bool) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
        let d = (lo.abs() * 0.05).max(1.0e-9).max(if pad { 0.0 } else { 1.0 });
        return (lo - d, hi + d);
    }
    if pad {
        let d = 0.05 * (hi - lo);
        (lo - d, hi + d)
    } else {
        (lo, hi)
    }
}

fn tick(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-2..1e4).contains(&a) {
        format!("{v:.2e}")
    } else {
        let s = format!("{v:.3}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" { "0".into() } else { s.to_string() }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}
