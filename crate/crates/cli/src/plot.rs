//! Minimal SVG line charts.

use std::fmt::Write as _;

const W: f64 = 640.0;
const H: f64 = 420.0;
const PAD: f64 = 56.0;

pub struct Chart<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    /// Each series is drawn as one polyline.
    pub series: Vec<Vec<(f64, f64)>>,
}

fn bounds(series: &[Vec<(f64, f64)>]) -> (f64, f64, f64, f64) {
    let pts = series.iter().flatten().filter(|p| p.0.is_finite() && p.1.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        return (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 < 1e-12 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-12 {
        y1 = y0 + 1.0;
    }
    (x0, x1, y0, y1)
}

pub fn render(chart: &Chart) -> String {
    let (x0, x1, y0, y1) = bounds(&chart.series);
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" font-size="15" text-anchor="middle">{}</text>"#, W / 2.0, chart.title);
    let (l, r, t, b) = (PAD, W - PAD, PAD, H - PAD);
    let _ = writeln!(s, r#"<path d="M{l} {t} L{l} {b} L{r} {b}" stroke="black" fill="none"/>"#);
    for j in 0..=4 {
        let fx = x0 + (x1 - x0) * j as f64 / 4.0;
        let fy = y0 + (y1 - y0) * j as f64 / 4.0;
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="middle">{fx:.3}</text>"#, sx(fx), b + 16.0);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="end">{fy:.3}</text>"#, l - 6.0, sy(fy) + 4.0);
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="13" text-anchor="middle">{}</text>"#, W / 2.0, H - 14.0, chart.x_label);
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" font-size="13" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        H / 2.0,
        H / 2.0,
        chart.y_label
    );
    let colors = ["#1f5fa8", "#b8461b", "#2e8540"];
    for (i, ser) in chart.series.iter().enumerate() {
        let pts: Vec<String> = ser
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        if pts.is_empty() {
            continue;
        }
        let _ = writeln!(
            s,
            r#"<polyline points="{}" stroke="{}" stroke-width="1.5" fill="none"/>"#,
            pts.join(" "),
            colors[i % colors.len()]
        );
    }
    s.push_str("</svg>\n");
    s
}

/// The staircase `X -> -log10 L(X)` drawn on `log10 X`.
pub fn staircase(log_x: &[f64], neg_log_l: &[f64], log_x_max: f64) -> Vec<(f64, f64)> {
    let mut pts = Vec::with_capacity(2 * log_x.len());
    for i in 0..log_x.len() {
        let end = log_x.get(i + 1).copied().unwrap_or(log_x_max);
        pts.push((log_x[i], neg_log_l[i]));
        pts.push((end, neg_log_l[i]));
    }
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn staircase_has_two_points_per_step() {
        let p = staircase(&[0.0, 1.0], &[0.5, 1.5], 2.0);
        assert_eq!(p, vec![(0.0, 0.5), (1.0, 0.5), (1.0, 1.5), (2.0, 1.5)]);
    }

    #[test]
    fn renders_valid_looking_svg() {
        let c = Chart { title: "t", x_label: "x", y_label: "y", series: vec![vec![(0.0, 0.0), (1.0, 2.0)]] };
        let s = render(&c);
        assert!(s.starts_with("<svg"));
        assert!(s.contains("<polyline"));
        assert!(s.trim_end().ends_with("</svg>"));
    }
}
