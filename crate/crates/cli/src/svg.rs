//! Minimal SVG line chart for sweep means.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;

fn polyline(points: &[(f64, f64)], colour: &str, x: (f64, f64), y_max: f64) -> String {
    let sx = |v: f64| MARGIN + (v - x.0) / (x.1 - x.0).max(f64::EPSILON) * (WIDTH - 2.0 * MARGIN);
    let sy = |v: f64| HEIGHT - MARGIN - v / y_max * (HEIGHT - 2.0 * MARGIN);
    let mut coords = String::new();
    for &(px, py) in points.iter().filter(|p| p.1.is_finite()) {
        let _ = write!(coords, "{:.2},{:.2} ", sx(px), sy(py));
    }
    format!(
        "<polyline fill=\"none\" stroke=\"{colour}\" stroke-width=\"2\" points=\"{}\"/>\n",
        coords.trim_end()
    )
}

/// Mean `S_{2:K}/n` and detectability against the grid value. Each series
/// gets its own vertical scale from 0 to its maximum.
pub fn line_chart(means: &[(f64, f64, f64)], x_label: &str) -> String {
    let xs = means.iter().map(|m| m.0);
    let x = (
        xs.clone().fold(f64::INFINITY, f64::min),
        xs.fold(f64::NEG_INFINITY, f64::max),
    );
    let s: Vec<(f64, f64)> = means.iter().map(|m| (m.0, m.1)).collect();
    let d: Vec<(f64, f64)> = means.iter().map(|m| (m.0, m.2)).collect();
    let s_max = s.iter().map(|p| p.1).filter(|v| v.is_finite()).fold(0.0, f64::max).max(1e-12);

    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\">\n"
    );
    let _ = writeln!(
        out,
        "<rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#888\"/>",
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    out.push_str(&polyline(&s, "#1f77b4", x, s_max));
    out.push_str(&polyline(&d, "#d62728", x, 1.0));
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{x_label}</text>",
        WIDTH / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(out, "<text x=\"{MARGIN}\" y=\"30\" fill=\"#1f77b4\">S_2:K/n (max {s_max:.4})</text>");
    let _ = writeln!(out, "<text x=\"{}\" y=\"30\" fill=\"#d62728\">detectability</text>", WIDTH / 2.0);
    let _ = writeln!(
        out,
        "<text x=\"{MARGIN}\" y=\"{}\" font-size=\"11\">{:.3}</text>",
        HEIGHT - MARGIN + 15.0,
        x.0
    );
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">{:.3}</text>",
        WIDTH - MARGIN,
        HEIGHT - MARGIN + 15.0,
        x.1
    );
    out.push_str("</svg>\n");
    out
}
