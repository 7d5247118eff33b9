//! Deterministic, dependency-free SVG line charts for pattern cuts.
//!
//! The output is plain text built with fixed 6-decimal coordinate formatting
//! so identical inputs always produce byte-identical files.

use std::fmt::Write as _;

/// Fixed curve palette; charts cycle through it in label order.
const PALETTE: [&str; 10] = [
    "#000000", "#d62728", "#2ca02c", "#1f77b4", "#ff7f0e", "#9467bd", "#8c564b", "#17becf",
    "#e377c2", "#bcbd22",
];

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 560.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 180.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 60.0;

/// One named curve: (x, y) samples in data units.
pub struct Curve<'a> {
    pub label: &'a str,
    pub points: &'a [(f64, f64)],
}

fn fmt(v: f64) -> String {
    format!("{v:.6}")
}

/// Picks a "nice" tick step covering `span` with roughly `target` intervals.
fn tick_step(span: f64, target: f64) -> f64 {
    let raw = span / target;
    let mag = 10f64.powf(raw.abs().log10().floor());
    let norm = raw / mag;
    let nice = if norm <= 1.0 {
        1.0
    } else if norm <= 2.0 {
        2.0
    } else if norm <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn ticks(lo: f64, hi: f64, target: f64) -> Vec<f64> {
    let step = tick_step(hi - lo, target);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + step * 1e-9 {
        // Snap values like -1.4999999999 back to the grid.
        out.push((t / step).round() * step);
        t += step;
    }
    out
}

/// Renders an XY line chart of all curves with axes, grid ticks, and legend.
pub fn line_chart(
    title: &str,
    x_label: &str,
    y_label: &str,
    curves: &[Curve<'_>],
) -> String {
    let mut x_lo = f64::INFINITY;
    let mut x_hi = f64::NEG_INFINITY;
    let mut y_lo = f64::INFINITY;
    let mut y_hi = f64::NEG_INFINITY;
    for c in curves {
        for &(x, y) in c.points {
            x_lo = x_lo.min(x);
            x_hi = x_hi.max(x);
            y_lo = y_lo.min(y);
            y_hi = y_hi.max(y);
        }
    }
    if !x_lo.is_finite() || !y_lo.is_finite() {
        x_lo = 0.0;
        x_hi = 1.0;
        y_lo = 0.0;
        y_hi = 1.0;
    }
    if x_hi - x_lo < 1e-12 {
        x_hi = x_lo + 1.0;
    }
    if y_hi - y_lo < 1e-12 {
        y_hi = y_lo + 1.0;
    }
    // Pad the y-range a little so curves don't touch the frame.
    let pad = 0.05 * (y_hi - y_lo);
    y_lo -= pad;
    y_hi += pad;

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |x: f64| MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = |y: f64| MARGIN_TOP + (y_hi - y) / (y_hi - y_lo) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(s, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>");
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" \
         text-anchor=\"middle\">{}</text>",
        fmt(MARGIN_LEFT + plot_w / 2.0),
        escape(title)
    );

    // Grid and tick labels.
    for tx in ticks(x_lo, x_hi, 9.0) {
        let px = sx(tx);
        let _ = writeln!(
            s,
            "<line x1=\"{x}\" y1=\"{y1}\" x2=\"{x}\" y2=\"{y2}\" stroke=\"#dddddd\"/>",
            x = fmt(px),
            y1 = fmt(MARGIN_TOP),
            y2 = fmt(MARGIN_TOP + plot_h)
        );
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"middle\">{}</text>",
            fmt(px),
            fmt(MARGIN_TOP + plot_h + 18.0),
            trim_tick(tx)
        );
    }
    for ty in ticks(y_lo, y_hi, 8.0) {
        let py = sy(ty);
        let _ = writeln!(
            s,
            "<line x1=\"{x1}\" y1=\"{y}\" x2=\"{x2}\" y2=\"{y}\" stroke=\"#dddddd\"/>",
            x1 = fmt(MARGIN_LEFT),
            x2 = fmt(MARGIN_LEFT + plot_w),
            y = fmt(py)
        );
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"end\">{}</text>",
            fmt(MARGIN_LEFT - 8.0),
            fmt(py + 4.0),
            trim_tick(ty)
        );
    }

    // Frame and axis labels.
    let _ = writeln!(
        s,
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#000000\"/>",
        fmt(MARGIN_LEFT),
        fmt(MARGIN_TOP),
        fmt(plot_w),
        fmt(plot_h)
    );
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" \
         text-anchor=\"middle\">{}</text>",
        fmt(MARGIN_LEFT + plot_w / 2.0),
        fmt(HEIGHT - 16.0),
        escape(x_label)
    );
    let _ = writeln!(
        s,
        "<text x=\"18\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" \
         text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">{}</text>",
        fmt(MARGIN_TOP + plot_h / 2.0),
        fmt(MARGIN_TOP + plot_h / 2.0),
        escape(y_label)
    );

    // Curves.
    for (i, c) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut d = String::new();
        for (j, &(x, y)) in c.points.iter().enumerate() {
            let cmd = if j == 0 { 'M' } else { 'L' };
            let _ = write!(d, "{cmd}{} {} ", fmt(sx(x)), fmt(sy(y.clamp(y_lo, y_hi))));
        }
        let _ = writeln!(
            s,
            "<path d=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
            d.trim_end()
        );
    }

    // Legend.
    for (i, c) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let ly = MARGIN_TOP + 14.0 + 20.0 * i as f64;
        let lx = MARGIN_LEFT + plot_w + 16.0;
        let _ = writeln!(
            s,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{color}\" stroke-width=\"2\"/>",
            fmt(lx),
            fmt(ly),
            fmt(lx + 24.0),
            fmt(ly)
        );
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>",
            fmt(lx + 30.0),
            fmt(ly + 4.0),
            escape(c.label)
        );
    }

    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Tick labels without trailing zeros ("60", "-1.5").
fn trim_tick(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".to_string() } else { s.to_string() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chart_is_deterministic_and_well_formed() {
        let pts: Vec<(f64, f64)> = (0..=90).map(|i| (i as f64, (i as f64 / 9.0).sin())).collect();
        let curves = [Curve { label: "a & b", points: &pts }];
        let one = line_chart("t", "x", "y", &curves);
        let two = line_chart("t", "x", "y", &curves);
        assert_eq!(one, two);
        assert!(one.starts_with("<svg"));
        assert!(one.trim_end().ends_with("</svg>"));
        assert!(one.contains("a &amp; b"));
    }

    #[test]
    fn ticks_cover_range() {
        let t = ticks(0.0, 90.0, 9.0);
        assert_eq!(t.first().copied(), Some(0.0));
        assert_eq!(t.last().copied(), Some(90.0));
        let t = ticks(-40.0, 42.0, 8.0);
        assert!(t.iter().all(|v| (-40.0..=42.0).contains(v)));
        assert!(t.len() >= 4);
    }

    #[test]
    fn empty_curves_still_render() {
        let svg = line_chart("t", "x", "y", &[]);
        assert!(svg.contains("</svg>"));
    }
}
