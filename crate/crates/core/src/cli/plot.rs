//! Deterministic SVG: theory as dashed lines, simulated as markers.

use std::fmt::Write as _;

use crate::analysis::TimeSeries;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const TICKS: usize = 5;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn fit(series: &[&TimeSeries]) -> Self {
        let mut f = Frame {
            x0: f64::INFINITY,
            x1: f64::NEG_INFINITY,
            y0: f64::INFINITY,
            y1: f64::NEG_INFINITY,
        };
        for s in series {
            for (&t, &v) in s.times.iter().zip(&s.values) {
                if t.is_finite() && v.is_finite() {
                    f.x0 = f.x0.min(t);
                    f.x1 = f.x1.max(t);
                    f.y0 = f.y0.min(v);
                    f.y1 = f.y1.max(v);
                }
            }
        }
        if !f.x0.is_finite() {
            return Frame {
                x0: 0.0,
                x1: 1.0,
                y0: 0.0,
                y1: 1.0,
            };
        }
        if f.x1 - f.x0 < 1e-12 {
            f.x0 -= 0.5;
            f.x1 += 0.5;
        }
        let pad = if f.y1 - f.y0 < 1e-12 {
            0.5
        } else {
            0.05 * (f.y1 - f.y0)
        };
        f.y0 -= pad;
        f.y1 += pad;
        f
    }

    fn px(&self, t: f64) -> f64 {
        LEFT + (t - self.x0) / (self.x1 - self.x0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, v: f64) -> f64 {
        HEIGHT - BOTTOM - (v - self.y0) / (self.y1 - self.y0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Render both series sets on shared axes. Labels present in both sets share
/// a colour; the output depends only on the inputs.
pub fn render_svg(theory: &[TimeSeries], simulated: &[TimeSeries], title: &str) -> String {
    let all: Vec<&TimeSeries> = theory.iter().chain(simulated).collect();
    let frame = Frame::fit(&all);
    let mut labels: Vec<&str> = Vec::new();
    for s in &all {
        if !labels.contains(&s.label.as_str()) {
            labels.push(&s.label);
        }
    }
    let colour = |label: &str| {
        let k = labels.iter().position(|l| *l == label).unwrap_or(0);
        PALETTE[k % PALETTE.len()]
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    if !title.is_empty() {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
            (LEFT + WIDTH - RIGHT) / 2.0,
            escape(title)
        );
    }
    let (xa, xb, ya, yb) = (LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM);
    let _ = writeln!(
        svg,
        r#"<rect x="{xa:.2}" y="{ya:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        xb - xa,
        yb - ya
    );
    for k in 0..=TICKS {
        let u = k as f64 / TICKS as f64;
        let t = frame.x0 + u * (frame.x1 - frame.x0);
        let v = frame.y0 + u * (frame.y1 - frame.y0);
        let (x, y) = (frame.px(t), frame.py(v));
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{yb:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{t:.3}</text>"#,
            yb + 5.0,
            yb + 20.0
        );
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{xa:.2}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{v:.3}</text>"#,
            xa - 5.0,
            xa - 8.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">t</text>"#,
        (xa + xb) / 2.0,
        HEIGHT - 10.0
    );

    for s in theory {
        let points: Vec<String> = s
            .times
            .iter()
            .zip(&s.values)
            .filter(|(t, v)| t.is_finite() && v.is_finite())
            .map(|(&t, &v)| format!("{:.2},{:.2}", frame.px(t), frame.py(v)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" stroke-dasharray="6,4" points="{}"/>"#,
            colour(&s.label),
            points.join(" ")
        );
    }
    for s in simulated {
        let c = colour(&s.label);
        for (&t, &v) in s.times.iter().zip(&s.values) {
            if t.is_finite() && v.is_finite() {
                let _ = writeln!(
                    svg,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{c}"/>"#,
                    frame.px(t),
                    frame.py(v)
                );
            }
        }
    }

    let legend_x = WIDTH - RIGHT + 15.0;
    for (k, label) in labels.iter().enumerate() {
        let y = TOP + 10.0 + 18.0 * k as f64;
        let c = colour(label);
        let _ = writeln!(
            svg,
            r#"<line x1="{legend_x:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{c}" stroke-dasharray="6,4"/><circle cx="{:.2}" cy="{y:.2}" r="3" fill="{c}"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            legend_x + 24.0,
            legend_x + 12.0,
            legend_x + 30.0,
            y + 4.0,
            escape(label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(label: &str, v: &[f64]) -> TimeSeries {
        let t = (0..v.len()).map(|k| k as f64).collect();
        TimeSeries::new(label, t, v.to_vec()).unwrap()
    }

    #[test]
    fn theory_only_plot() {
        let svg = render_svg(&[series("a", &[0.0, 1.0, 0.5])], &[], "");
        assert!(svg.contains("stroke-dasharray"));
        assert!(svg.contains("polyline"));
        assert!(!svg.contains("<circle cx=\"70"));
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn shared_labels_share_colour_and_output_is_stable() {
        let th = [
            series("population", &[1.0, 0.5]),
            series("witness", &[1.0, 0.7]),
        ];
        let sim = [series("population", &[0.98, 0.52])];
        let a = render_svg(&th, &sim, "x < y");
        assert_eq!(a, render_svg(&th, &sim, "x < y"));
        assert!(a.contains("x &lt; y"));
        assert_eq!(a.matches(PALETTE[0]).count(), 1 + 2 + 2);
        assert!(a.contains(PALETTE[1]));
    }

    #[test]
    fn degenerate_ranges() {
        let svg = render_svg(&[series("flat", &[0.3, 0.3])], &[], "");
        assert!(!svg.contains("NaN") && !svg.contains("inf"));
        let empty = render_svg(&[], &[], "");
        assert!(empty.contains("</svg>"));
    }
}
