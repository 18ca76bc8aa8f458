//! Self-contained SVG plots: bounds as horizontal lines, Monte-Carlo
//! estimates as mean ± standard deviation error bars per sample size.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{CliError, Result};
use crate::experiment::{mc_size, sort_rows, Direction, ResultRow, IMPROVEMENT};
use crate::report::format_sig;

const W: f64 = 720.0;
const H: f64 = 440.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;

struct Style {
    name: &'static str,
    color: &'static str,
    dash: Option<&'static str>,
}

const STYLES: [Style; 5] = [
    Style { name: "CELB", color: "#1f4e9c", dash: None },
    Style { name: "CEUB", color: "#1f4e9c", dash: None },
    Style { name: "CEALB", color: "#c0392b", dash: Some("7,4") },
    Style { name: "CEAUB", color: "#c0392b", dash: Some("7,4") },
    Style { name: "MEUB", color: "#000000", dash: Some("2,3") },
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn c(v: f64) -> String {
    format!("{v:.2}")
}

/// Renders the rows of one `(pair, direction)` group.
pub fn render_svg(rows: &[ResultRow]) -> String {
    let mut rows = rows.to_vec();
    sort_rows(&mut rows);
    let bounds: Vec<(&Style, f64)> = STYLES
        .iter()
        .filter_map(|s| rows.iter().find(|r| r.quantity == s.name).map(|r| (s, r.value)))
        .filter(|(_, v)| v.is_finite())
        .collect();
    let mut mc: Vec<(usize, f64, f64)> = rows
        .iter()
        .filter_map(|r| mc_size(&r.quantity).map(|s| (s, r.value, r.aux)))
        .filter(|(_, m, sd)| m.is_finite() && sd.is_finite())
        .collect();
    mc.sort_by_key(|e| e.0);

    let mut ys: Vec<f64> = bounds.iter().map(|b| b.1).collect();
    for &(_, m, sd) in &mc {
        ys.push(m - sd);
        ys.push(m + sd);
    }
    let (mut y0, mut y1) = ys.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &y| (a.min(y), b.max(y)));
    if !y0.is_finite() {
        (y0, y1) = (-1.0, 1.0);
    }
    if y1 - y0 <= 1e-12 * (1.0 + y0.abs()) {
        let pad = 0.5 * (1.0 + y0.abs()) * 1e-3;
        (y0, y1) = (y0 - pad, y1 + pad);
    }
    let pad = 0.06 * (y1 - y0);
    (y0, y1) = (y0 - pad, y1 + pad);

    let (x0, x1) = match (mc.first(), mc.last()) {
        (Some(a), Some(b)) => ((a.0 as f64).log10() - 0.5, (b.0 as f64).log10() + 0.5),
        _ => (0.0, 1.0),
    };
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * (W - LEFT - RIGHT);
    let py = |y: f64| H - BOTTOM - (y - y0) / (y1 - y0) * (H - TOP - BOTTOM);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r##"<rect x="0" y="0" width="{W}" height="{H}" fill="#ffffff"/>"##);

    if let Some(r) = rows.first() {
        let mut title = format!("{} {}", r.pair, r.direction);
        if r.direction != Direction::Entropy {
            title = format!("KL {title}");
        }
        if let Some(imp) = rows.iter().find(|r| r.quantity == IMPROVEMENT) {
            let _ = write!(title, ": adaptive gap reduction {:.1}%", imp.value);
        }
        let _ = writeln!(
            s,
            r#"<text class="title" x="{}" y="28" text-anchor="middle" font-size="15">{}</text>"#,
            c((LEFT + W - RIGHT) / 2.0),
            escape(&title)
        );
    }

    let (bx0, bx1, by0, by1) = (LEFT, W - RIGHT, TOP, H - BOTTOM);
    let _ = writeln!(
        s,
        r##"<rect class="frame" x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#444444"/>"##,
        c(bx0),
        c(by0),
        c(bx1 - bx0),
        c(by1 - by0)
    );
    for i in 0..=4 {
        let v = y0 + (y1 - y0) * f64::from(i) / 4.0;
        let y = py(v);
        let _ = writeln!(
            s,
            r##"<line class="tick" x1="{}" y1="{}" x2="{}" y2="{}" stroke="#444444"/><text x="{}" y="{}" text-anchor="end">{}</text>"##,
            c(bx0 - 5.0),
            c(y),
            c(bx0),
            c(y),
            c(bx0 - 8.0),
            c(y + 4.0),
            format_sig(v, 5)
        );
    }
    for &(n, _, _) in &mc {
        let x = px((n as f64).log10());
        let _ = writeln!(
            s,
            r##"<line class="tick" x1="{}" y1="{}" x2="{}" y2="{}" stroke="#444444"/><text x="{}" y="{}" text-anchor="middle">{n}</text>"##,
            c(x),
            c(by1),
            c(x),
            c(by1 + 5.0),
            c(x),
            c(by1 + 20.0)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">sample size</text>"#,
        c((bx0 + bx1) / 2.0),
        c(H - 18.0)
    );

    for (st, v) in &bounds {
        let y = py(*v);
        let dash = st.dash.map(|d| format!(r#" stroke-dasharray="{d}""#)).unwrap_or_default();
        let _ = writeln!(
            s,
            r#"<line class="bound {}" x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="1.6"{dash}/>"#,
            st.name,
            c(bx0),
            c(y),
            c(bx1),
            c(y),
            st.color
        );
    }

    for &(n, m, sd) in &mc {
        let x = px((n as f64).log10());
        let (ya, yb, ym) = (py(m - sd), py(m + sd), py(m));
        let _ = writeln!(
            s,
            r##"<g class="errorbar" stroke="#2e7d32" stroke-width="1.4"><line x1="{x}" y1="{ya}" x2="{x}" y2="{yb}"/><line x1="{l}" y1="{ya}" x2="{r}" y2="{ya}"/><line x1="{l}" y1="{yb}" x2="{r}" y2="{yb}"/><circle cx="{x}" cy="{ym}" r="3" fill="#2e7d32"/></g>"##,
            x = c(x),
            ya = c(ya),
            yb = c(yb),
            ym = c(ym),
            l = c(x - 5.0),
            r = c(x + 5.0)
        );
    }

    let mut ly = TOP + 10.0;
    let lx = W - RIGHT + 15.0;
    for (st, _) in &bounds {
        let dash = st.dash.map(|d| format!(r#" stroke-dasharray="{d}""#)).unwrap_or_default();
        let _ = writeln!(
            s,
            r#"<line class="legend" x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="1.6"{dash}/><text x="{}" y="{}">{}</text>"#,
            c(lx),
            c(ly),
            c(lx + 30.0),
            c(ly),
            st.color,
            c(lx + 38.0),
            c(ly + 4.0),
            st.name
        );
        ly += 20.0;
    }
    if !mc.is_empty() {
        let _ = writeln!(
            s,
            r##"<circle class="legend" cx="{}" cy="{}" r="3" fill="#2e7d32"/><text x="{}" y="{}">MC mean ± sd</text>"##,
            c(lx + 15.0),
            c(ly),
            c(lx + 38.0),
            c(ly + 4.0)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Writes [`render_svg`] of `rows` to `path`.
pub fn emit_plot(rows: &[ResultRow], path: &Path) -> Result<()> {
    std::fs::write(path, render_svg(rows)).map_err(|e| CliError::io(path, e))
}

/// One SVG per `(pair, direction)` group, named `{prefix}_{pair}_{direction}.svg`
/// (`{prefix}_{pair}.svg` for entropy rows). Returns the written paths in
/// row order.
pub fn emit_plots(rows: &[ResultRow], dir: &Path, prefix: &str) -> Result<Vec<PathBuf>> {
    let mut rows = rows.to_vec();
    sort_rows(&mut rows);
    let mut out = Vec::new();
    for group in rows.chunk_by(|a, b| a.pair == b.pair && a.direction == b.direction) {
        let r = &group[0];
        let file = match r.direction {
            Direction::Entropy => format!("{prefix}_{}.svg", r.pair),
            d => format!("{prefix}_{}_{d}.svg", r.pair),
        };
        let path = dir.join(file);
        emit_plot(group, &path)?;
        out.push(path);
    }
    Ok(out)
}
