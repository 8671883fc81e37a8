//! Plot of a fit: points sized by weight, one line per step, critical
//! points in red.

use std::fmt::Write;

use stepfit::geom::point_cost;
use stepfit::{CostModel, Point};

use crate::output::FitOutput;

const W: f64 = 800.0;
const H: f64 = 500.0;
const MARGIN: f64 = 40.0;
const MAX_RADIUS: f64 = 10.0;

fn span(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 1.0, hi + 1.0)
    }
}

pub fn render_svg(fit: &FitOutput, points: &[Point], model: CostModel) -> String {
    let (x0, x1) = span(
        points.iter().map(|p| p.x).fold(f64::INFINITY, f64::min),
        points.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max),
    );
    let ys = points
        .iter()
        .map(|p| p.y)
        .chain(fit.segments.iter().map(|s| s.y));
    let (y0, y1) = span(
        ys.clone().fold(f64::INFINITY, f64::min),
        ys.fold(f64::NEG_INFINITY, f64::max),
    );
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
    let sy = |y: f64| H - MARGIN - (y - y0) / (y1 - y0) * (H - 2.0 * MARGIN);
    let wmax = points.iter().map(|p| p.w).fold(0.0, f64::max);

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    )
    .unwrap();
    writeln!(
        s,
        r#"<title>{}-step fit, cost {}</title>"#,
        fit.segments.len(),
        fit.cost
    )
    .unwrap();
    writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#).unwrap();
    for p in points {
        let seg = fit
            .segments
            .iter()
            .position(|g| p.x < g.x_right)
            .unwrap_or(fit.segments.len() - 1);
        let c = point_cost(p, fit.segments[seg].y, model);
        let critical = c > 0.0 && (c - fit.cost).abs() <= 1e-9 * (1.0 + fit.cost);
        let (class, fill) = if critical {
            ("critical", "#d62728")
        } else {
            ("point", "#1f77b4")
        };
        writeln!(
            s,
            r#"<circle class="{class}" cx="{:.3}" cy="{:.3}" r="{:.3}" fill="{fill}" fill-opacity="0.6"/>"#,
            sx(p.x),
            sy(p.y),
            (MAX_RADIUS * p.w / wmax).max(0.5)
        )
        .unwrap();
    }
    for g in &fit.segments {
        writeln!(
            s,
            r#"<line class="step" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="black" stroke-width="2"/>"#,
            sx(g.x_left),
            sy(g.y),
            sx(g.x_right),
            sy(g.y)
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    s
}
