//! Minimal SVG: normalized histogram bars with the limiting density as a polyline.

use std::fmt::Write;

use hypmoments::moments::Histogram;
use hypmoments::theory::density::{semicircle_pdf, theorem1_pdf, DensityKind};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN: f64 = 50.0;
const CURVE_POINTS: usize = 400;

pub fn histogram_overlay(hist: &Histogram, kind: DensityKind, title: &str) -> hypmoments::Result<String> {
    let lo = hist.bin_edges[0];
    let hi = *hist.bin_edges.last().expect("at least one bin");
    let curve: Vec<(f64, f64)> = (0..CURVE_POINTS)
        .map(|i| {
            let t = lo + (hi - lo) * i as f64 / (CURVE_POINTS - 1) as f64;
            let y = match kind {
                DensityKind::MeijerTheorem1 => theorem1_pdf(t)?,
                _ => semicircle_pdf(t),
            };
            Ok((t, y))
        })
        .collect::<hypmoments::Result<_>>()?;
    let heights = hist.heights();
    let ymax = heights.iter().chain(curve.iter().map(|(_, y)| y)).cloned().fold(0.0, f64::max).max(1e-12) * 1.05;
    let sx = |t: f64| MARGIN + (t - lo) / (hi - lo) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - y / ymax * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#, WIDTH / 2.0, MARGIN / 2.0, escape(title));
    for (e, h) in hist.bin_edges.windows(2).zip(&heights) {
        let (x0, x1) = (sx(e[0]), sx(e[1]));
        let y = sy(*h);
        let _ = writeln!(
            s,
            r##"<rect x="{x0:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="#9ecae1" stroke="#3182bd" stroke-width="0.5"/>"##,
            (x1 - x0).max(0.0),
            (sy(0.0) - y).max(0.0)
        );
    }
    let points: Vec<String> = curve.iter().map(|(t, y)| format!("{:.2},{:.2}", sx(*t), sy(*y))).collect();
    let _ = writeln!(s, r##"<polyline fill="none" stroke="#d62728" stroke-width="2" points="{}"/>"##, points.join(" "));
    let axis_y = sy(0.0);
    let _ = writeln!(s, r#"<line x1="{MARGIN}" y1="{axis_y:.2}" x2="{}" y2="{axis_y:.2}" stroke="black"/>"#, WIDTH - MARGIN);
    for k in 0..=4 {
        let t = lo + (hi - lo) * k as f64 / 4.0;
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle">{t}</text>"#, sx(t), axis_y + 18.0);
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use hypmoments::moments::histogram_build;

    #[test]
    fn structure() {
        let h = histogram_build(&[-1.0, 0.0, 0.5, 1.5], -2.0, 2.0, 8).unwrap();
        let svg = histogram_overlay(&h, DensityKind::Semicircle, "a < b").unwrap();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<rect").count(), 1 + 8);
        let poly = svg.lines().find(|l| l.starts_with("<polyline")).unwrap();
        assert_eq!(poly.matches(',').count(), CURVE_POINTS);
        assert!(svg.contains("a &lt; b"));
    }
}
