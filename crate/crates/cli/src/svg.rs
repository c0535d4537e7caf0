//! Minimal SVG line plots: one square panel per curve, axis ticks and an
//! optional origin marker. Output depends only on the input points.

use std::fmt::Write;

const SIZE: f64 = 400.0;
const MARGIN: f64 = 44.0;
const TICKS: usize = 5;

/// One curve drawn in its own panel.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub title: String,
    pub points: Vec<[f64; 2]>,
    /// Keep the origin in view and mark it.
    pub origin_marker: bool,
}

impl Panel {
    pub fn new(title: impl Into<String>, points: Vec<[f64; 2]>) -> Self {
        Panel { title: title.into(), points, origin_marker: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SvgError(pub String);

impl std::fmt::Display for SvgError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for SvgError {}

/// Panels side by side, each with equal axis scales.
pub fn emit_svg(panels: &[Panel]) -> Result<String, SvgError> {
    if panels.is_empty() {
        return Err(SvgError("nothing to plot".into()));
    }
    for p in panels {
        if p.points.is_empty() {
            return Err(SvgError(format!("panel {:?} is empty", p.title)));
        }
        if p.points.iter().flatten().any(|v| !v.is_finite()) {
            return Err(SvgError(format!("panel {:?} has non-finite points", p.title)));
        }
    }
    let width = SIZE * panels.len() as f64;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="10">"#,
        w = width,
        h = SIZE
    );
    let _ = writeln!(s, r#"<rect width="{width}" height="{SIZE}" fill="white"/>"#);
    for (k, p) in panels.iter().enumerate() {
        panel(&mut s, p, k as f64 * SIZE);
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn panel(s: &mut String, p: &Panel, x0: f64) {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    let mut extend = |q: &[f64; 2]| {
        for a in 0..2 {
            lo[a] = lo[a].min(q[a]);
            hi[a] = hi[a].max(q[a]);
        }
    };
    p.points.iter().for_each(&mut extend);
    if p.origin_marker {
        extend(&[0.0, 0.0]);
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12) * 1.08;
    let center = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0];
    let inner = SIZE - 2.0 * MARGIN;
    let px = |x: f64| x0 + MARGIN + (x - center[0] + span / 2.0) / span * inner;
    let py = |y: f64| MARGIN + (center[1] + span / 2.0 - y) / span * inner;

    let _ = writeln!(s, r#"<g class="panel">"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="12">{}</text>"#,
        x0 + SIZE / 2.0,
        MARGIN / 2.0,
        escape(&p.title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{:.2}" y="{MARGIN:.2}" width="{inner:.2}" height="{inner:.2}" fill="none" stroke="black"/>"#,
        x0 + MARGIN
    );
    for i in 0..TICKS {
        let f = i as f64 / (TICKS - 1) as f64;
        let vx = center[0] - span / 2.0 + f * span;
        let vy = center[1] - span / 2.0 + f * span;
        let (tx, ty) = (px(vx), py(vy));
        let bottom = MARGIN + inner;
        let left = x0 + MARGIN;
        let _ = writeln!(
            s,
            r#"<line x1="{tx:.2}" y1="{bottom:.2}" x2="{tx:.2}" y2="{:.2}" stroke="black"/>"#,
            bottom + 4.0
        );
        let _ = writeln!(s, r#"<text x="{tx:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, bottom + 16.0, tick(vx));
        let _ =
            writeln!(s, r#"<line x1="{:.2}" y1="{ty:.2}" x2="{left:.2}" y2="{ty:.2}" stroke="black"/>"#, left - 4.0);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, left - 6.0, ty + 3.0, tick(vy));
    }
    let mut pts = String::new();
    for q in &p.points {
        let _ = write!(pts, "{:.2},{:.2} ", px(q[0]), py(q[1]));
    }
    let _ = writeln!(s, r#"<polyline fill="none" stroke="steelblue" stroke-width="1.2" points="{}"/>"#, pts.trim_end());
    if p.origin_marker {
        let (ox, oy) = (px(0.0), py(0.0));
        let _ = writeln!(s, r#"<circle class="origin" cx="{ox:.2}" cy="{oy:.2}" r="3.5" fill="crimson"/>"#);
    }
    let _ = writeln!(s, "</g>");
}

fn tick(v: f64) -> String {
    let t = format!("{v:.3}");
    if t == "-0.000" {
        "0.000".into()
    } else {
        t
    }
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
