//! SVG figures drawn from a run report alone.

use std::fmt::Write;

use crate::report::RunReport;
use crate::scene::CircleSpec;

const SIZE: f64 = 800.0;

struct View {
    min_x: f64,
    max_y: f64,
    scale: f64,
}

impl View {
    fn x(&self, v: f64) -> f64 {
        (v - self.min_x) * self.scale
    }

    fn y(&self, v: f64) -> f64 {
        (self.max_y - v) * self.scale
    }
}

fn bounds(circles: &[CircleSpec]) -> View {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for c in circles {
        for k in 0..2 {
            lo[k] = lo[k].min(c.center[k] - c.radius);
            hi[k] = hi[k].max(c.center[k] + c.radius);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    let pad = 0.05 * span;
    let cx = 0.5 * (lo[0] + hi[0]);
    let cy = 0.5 * (lo[1] + hi[1]);
    let half = 0.5 * span + pad;
    View {
        min_x: cx - half,
        max_y: cy + half,
        scale: SIZE / (2.0 * half),
    }
}

fn circle(out: &mut String, v: &View, c: &CircleSpec, stroke: &str, width: f64) {
    let _ = writeln!(
        out,
        r#"  <circle cx="{:.6}" cy="{:.6}" r="{:.6}" fill="none" stroke="{stroke}" stroke-width="{width}"/>"#,
        v.x(c.center[0]),
        v.y(c.center[1]),
        c.radius * v.scale
    );
}

fn dot(out: &mut String, v: &View, p: [f64; 2], fill: &str) {
    let _ = writeln!(
        out,
        r#"  <circle cx="{:.6}" cy="{:.6}" r="3" fill="{fill}"/>"#,
        v.x(p[0]),
        v.y(p[1])
    );
}

/// Base circles, carrier, series circles, chords, carrier points and
/// tangency points.
pub fn render(report: &RunReport) -> String {
    let scene = &report.scene;
    let mut all = vec![scene.alpha0, scene.alpha1, scene.delta];
    all.extend(report.series.steps.iter().map(|s| s.omega));
    let v = bounds(&all);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(out, r#"  <rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    circle(&mut out, &v, &scene.alpha0, "black", 2.0);
    circle(&mut out, &v, &scene.alpha1, "black", 2.0);
    circle(&mut out, &v, &scene.delta, "#1f4e9e", 2.0);
    for s in &report.series.steps {
        circle(&mut out, &v, &s.omega, "#b0b0b0", 1.0);
    }
    for s in &report.series.steps {
        let _ = writeln!(
            out,
            r##"  <line x1="{:.6}" y1="{:.6}" x2="{:.6}" y2="{:.6}" stroke="#c0392b" stroke-width="1.5"/>"##,
            v.x(s.x[0]),
            v.y(s.x[1]),
            v.x(s.x_next[0]),
            v.y(s.x_next[1])
        );
    }
    for s in &report.series.steps {
        dot(&mut out, &v, s.touch0, "#27ae60");
        dot(&mut out, &v, s.touch1, "#27ae60");
        dot(&mut out, &v, s.x, "#c0392b");
    }
    if let Some(last) = report.series.steps.last() {
        dot(&mut out, &v, last.x_next, "#c0392b");
    }
    out.push_str("</svg>\n");
    out
}
