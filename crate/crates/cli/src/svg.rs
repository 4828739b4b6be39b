//! Minimal hand-written SVG: band diagrams (one row of rectangles per
//! interval set) and convergence curves (polylines on a log-scaled y axis).

use delone_core::spectra::IntervalSet;

use crate::provenance::Provenance;

const WIDTH: f64 = 640.0;
const MARGIN: f64 = 60.0;
const ROW: f64 = 28.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn open(height: f64, provenance: &Provenance) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{height}\" viewBox=\"0 0 {WIDTH} {height}\">\n{}",
        provenance.svg_comment()
    )
}

/// One labelled row per set over the energy `window`.
pub fn band_diagram(rows: &[(&str, &IntervalSet)], window: (f64, f64), provenance: &Provenance) -> String {
    let (a, b) = window;
    let height = MARGIN + ROW * rows.len() as f64 + 30.0;
    let span = WIDTH - 2.0 * MARGIN;
    let x = |e: f64| MARGIN + span * ((e.clamp(a, b) - a) / (b - a));
    let mut out = open(height, provenance);
    for (i, (label, set)) in rows.iter().enumerate() {
        let y = 20.0 + ROW * i as f64;
        out.push_str(&format!(
            "<text x=\"4\" y=\"{:.2}\" font-size=\"11\">{}</text>\n",
            y + 12.0,
            escape(label)
        ));
        for iv in set.intervals() {
            let (x0, x1) = (x(iv.lo), x(iv.hi));
            out.push_str(&format!(
                "<rect x=\"{x0:.3}\" y=\"{y:.2}\" width=\"{:.3}\" height=\"16\" fill=\"{}\"/>\n",
                (x1 - x0).max(0.5),
                COLORS[i % COLORS.len()]
            ));
        }
    }
    let axis_y = 20.0 + ROW * rows.len() as f64;
    out.push_str(&format!(
        "<line x1=\"{MARGIN}\" y1=\"{axis_y:.2}\" x2=\"{:.2}\" y2=\"{axis_y:.2}\" stroke=\"black\"/>\n",
        WIDTH - MARGIN
    ));
    for (e, anchor) in [(a, "start"), (b, "end")] {
        out.push_str(&format!(
            "<text x=\"{:.3}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"{anchor}\">{e}</text>\n",
            x(e),
            axis_y + 16.0
        ));
    }
    out.push_str("</svg>\n");
    out
}

/// Curves `(x, y)` with `log10 y` on the vertical axis; non-positive or
/// non-finite values are skipped.
pub fn convergence_plot(series: &[(&str, Vec<(f64, f64)>)], provenance: &Provenance) -> String {
    let height = 400.0;
    let pts: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|(_, s)| s.iter().copied())
        .filter(|&(x, y)| x.is_finite() && y.is_finite() && y > 0.0)
        .map(|(x, y)| (x, y.log10()))
        .collect();
    let mut out = open(height, provenance);
    if pts.is_empty() {
        out.push_str("</svg>\n");
        return out;
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    y0 = y0.floor();
    y1 = y1.ceil().max(y0 + 1.0);
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    let sx = |x: f64| MARGIN + (WIDTH - 2.0 * MARGIN) * (x - x0) / (x1 - x0);
    let sy = |y: f64| height - MARGIN - (height - 2.0 * MARGIN) * (y - y0) / (y1 - y0);
    out.push_str(&format!(
        "<polyline points=\"{MARGIN},{t:.2} {MARGIN},{b:.2} {r:.2},{b:.2}\" fill=\"none\" stroke=\"black\"/>\n",
        t = MARGIN,
        b = height - MARGIN,
        r = WIDTH - MARGIN
    ));
    let mut decade = y0;
    while decade <= y1 {
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"10\" text-anchor=\"end\">1e{}</text>\n",
            MARGIN - 4.0,
            sy(decade) + 3.0,
            decade as i64
        ));
        decade += 1.0;
    }
    for (i, (label, s)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let coords: Vec<String> = s
            .iter()
            .filter(|&&(x, y)| x.is_finite() && y.is_finite() && y > 0.0)
            .map(|&(x, y)| format!("{:.3},{:.3}", sx(x), sy(y.log10())))
            .collect();
        out.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\"/>\n",
            coords.join(" ")
        ));
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" fill=\"{color}\">{}</text>\n",
            WIDTH - MARGIN + 4.0,
            MARGIN + 14.0 * i as f64,
            escape(label)
        ));
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_rect_per_interval() {
        let set = IntervalSet::from_closed(vec![(0.0, 1.0), (2.0, 3.0)], 1e-9);
        let svg = band_diagram(&[("B", &set)], (0.0, 4.0), &Provenance::new("t", &[]));
        assert_eq!(svg.matches("<rect").count(), 2);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
    }

    #[test]
    fn skips_non_positive_values() {
        let svg = convergence_plot(
            &[("a", vec![(1.0, 0.1), (2.0, 0.0), (3.0, 0.01)])],
            &Provenance::new("t", &[]),
        );
        let line = svg.lines().find(|l| l.contains("stroke=\"#1f77b4\"")).unwrap();
        assert_eq!(line.matches(',').count(), 2);
    }
}
