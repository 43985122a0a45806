//! Static SVG: the series on top, the matrix profile below on a shared x axis.

use std::fmt::Write as _;

const WIDTH: f64 = 960.0;
const PANEL: f64 = 220.0;
const MARGIN: f64 = 48.0;
/// Polylines longer than this are reduced to per-bucket min/max pairs.
const MAX_POINTS: usize = 4000;

/// Keeps the minimum and maximum of each bucket so spikes survive.
fn decimate(values: &[f64]) -> Vec<(usize, f64)> {
    let finite = values
        .iter()
        .copied()
        .enumerate()
        .filter(|(_, v)| v.is_finite());
    if values.len() <= MAX_POINTS {
        return finite.collect();
    }
    let bucket = values.len().div_ceil(MAX_POINTS / 2);
    let mut out = Vec::with_capacity(MAX_POINTS);
    for (b, chunk) in values.chunks(bucket).enumerate() {
        let base = b * bucket;
        let pts = chunk
            .iter()
            .copied()
            .enumerate()
            .filter(|(_, v)| v.is_finite());
        let lo = pts.clone().min_by(|a, b| a.1.total_cmp(&b.1));
        let hi = pts.max_by(|a, b| a.1.total_cmp(&b.1));
        if let (Some(lo), Some(hi)) = (lo, hi) {
            let (a, b) = if lo.0 <= hi.0 { (lo, hi) } else { (hi, lo) };
            out.push((base + a.0, a.1));
            if b.0 != a.0 {
                out.push((base + b.0, b.1));
            }
        }
    }
    out
}

fn panel(svg: &mut String, title: &str, values: &[f64], span: usize, top: f64, color: &str) {
    let pts = decimate(values);
    let (lo, hi) = pts
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), p| {
            (l.min(p.1), h.max(p.1))
        });
    let (lo, hi) = if lo.is_finite() { (lo, hi) } else { (0.0, 1.0) };
    let range = if hi > lo { hi - lo } else { 1.0 };
    let plot_w = WIDTH - 2.0 * MARGIN;
    let x = |i: usize| MARGIN + plot_w * i as f64 / span.saturating_sub(1).max(1) as f64;
    let y = |v: f64| top + PANEL - (v - lo) / range * PANEL;

    let _ = writeln!(
        svg,
        r##"<rect x="{MARGIN}" y="{top}" width="{plot_w}" height="{PANEL}" fill="none" stroke="#bbb"/>"##
    );
    let _ = writeln!(
        svg,
        r#"<text x="{MARGIN}" y="{:.1}" font-size="13">{title}</text>"#,
        top - 6.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" font-size="10" text-anchor="end">{hi:.3}</text>"#,
        MARGIN - 4.0,
        top + 10.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" font-size="10" text-anchor="end">{lo:.3}</text>"#,
        MARGIN - 4.0,
        top + PANEL
    );
    svg.push_str(r#"<polyline fill="none" stroke=""#);
    svg.push_str(color);
    svg.push_str(r#"" stroke-width="1" points=""#);
    for (k, (i, v)) in pts.iter().enumerate() {
        if k > 0 {
            svg.push(' ');
        }
        let _ = write!(svg, "{:.2},{:.2}", x(*i), y(*v));
    }
    svg.push_str("\"/>\n");
}

/// Unreached profile entries (`+∞`) are left out of the polyline so they do
/// not stretch the axis.
pub fn render_svg(series: &[f64], profile: &[f64], m: usize) -> String {
    let height = 2.0 * PANEL + 3.0 * MARGIN;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif">"#
    );
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    let span = series.len();
    panel(
        &mut svg,
        &format!("series (n = {span})"),
        series,
        span,
        MARGIN,
        "#1f4e8c",
    );
    panel(
        &mut svg,
        &format!("matrix profile (m = {m})"),
        profile,
        span,
        2.0 * MARGIN + PANEL,
        "#b03a2e",
    );
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_inputs_are_kept_whole() {
        let v: Vec<f64> = (0..100).map(|i| i as f64).collect();
        assert_eq!(decimate(&v).len(), 100);
    }

    #[test]
    fn decimation_keeps_extremes() {
        let mut v: Vec<f64> = (0..100_000).map(|i| (i as f64 * 0.01).sin()).collect();
        v[54_321] = 50.0;
        v[77_777] = -50.0;
        let d = decimate(&v);
        assert!(d.len() <= MAX_POINTS);
        assert!(d.contains(&(54_321, 50.0)));
        assert!(d.contains(&(77_777, -50.0)));
        assert!(d.windows(2).all(|w| w[0].0 < w[1].0));
    }

    #[test]
    fn svg_has_two_polylines_and_skips_infinities() {
        let s = render_svg(&[0.0, 1.0, 0.0, 1.0, 0.5], &[f64::INFINITY, 1.0], 4);
        assert!(s.starts_with("<svg"));
        assert!(s.trim_end().ends_with("</svg>"));
        assert_eq!(s.matches("<polyline").count(), 2);
        assert!(!s.contains("inf") && !s.contains("NaN"));
    }
}
