//! Bare-bones SVG charts: box plots and a heatmap.

use std::fmt::Write;

use crate::geometry::Summary;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 60.0;

pub struct BoxSeries {
    pub label: String,
    pub summary: Summary,
    /// Extra value drawn as a red dot (e.g. the observed graph).
    pub marker: Option<f64>,
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn boxplot(title: &str, y_label: &str, series: &[BoxSeries]) -> String {
    let mut out = String::new();
    header(&mut out, title);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for s in series {
        lo = lo.min(s.summary.min);
        hi = hi.max(s.summary.max);
        if let Some(m) = s.marker {
            lo = lo.min(m);
            hi = hi.max(m);
        }
    }
    if !lo.is_finite() || !hi.is_finite() {
        lo = 0.0;
        hi = 1.0;
    }
    let pad = ((hi - lo) * 0.05).max(1e-3);
    let (lo, hi) = (lo - pad, hi + pad);
    let y = |v: f64| HEIGHT - MARGIN - (v - lo) / (hi - lo) * (HEIGHT - 2.0 * MARGIN);

    let (x0, x1) = (MARGIN, WIDTH - MARGIN / 2.0);
    let _ = writeln!(
        out,
        r#"<line x1="{x0}" y1="{:.1}" x2="{x1}" y2="{:.1}" stroke="black"/>"#,
        HEIGHT - MARGIN,
        HEIGHT - MARGIN
    );
    let _ = writeln!(out, r#"<line x1="{x0}" y1="{MARGIN}" x2="{x0}" y2="{:.1}" stroke="black"/>"#, HEIGHT - MARGIN);
    for t in 0..=4 {
        let v = lo + (hi - lo) * t as f64 / 4.0;
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{v:.3}</text>"#,
            x0 - 4.0,
            y(v) + 4.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="14" y="{:.1}" transform="rotate(-90 14 {:.1})" text-anchor="middle">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    );

    let slot = (x1 - x0) / series.len().max(1) as f64;
    for (i, s) in series.iter().enumerate() {
        let cx = x0 + slot * (i as f64 + 0.5);
        let half = slot * 0.3;
        let b = &s.summary;
        let _ = writeln!(
            out,
            r#"<line x1="{cx:.1}" y1="{:.1}" x2="{cx:.1}" y2="{:.1}" stroke="black"/>"#,
            y(b.min),
            y(b.max)
        );
        let _ = writeln!(
            out,
            r##"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="#9ecae1" stroke="black"/>"##,
            cx - half,
            y(b.q3),
            2.0 * half,
            (y(b.q1) - y(b.q3)).max(0.5)
        );
        let _ = writeln!(
            out,
            r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="black" stroke-width="2"/>"#,
            cx - half,
            y(b.median),
            cx + half,
            y(b.median)
        );
        if let Some(m) = s.marker {
            let _ = writeln!(out, r#"<circle cx="{cx:.1}" cy="{:.1}" r="4" fill="red"/>"#, y(m));
        }
        let _ = writeln!(
            out,
            r#"<text x="{cx:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            HEIGHT - MARGIN + 16.0,
            escape(&s.label)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Heatmap of values in `[0, 1]`; white is 0, dark blue is 1.
pub fn heatmap(title: &str, row_labels: &[String], n_cols: usize, cells: &[Vec<f64>]) -> String {
    let mut out = String::new();
    header(&mut out, title);
    let rows = row_labels.len().max(1);
    let cw = (WIDTH - 2.0 * MARGIN) / n_cols.max(1) as f64;
    let ch = (HEIGHT - 2.0 * MARGIN) / rows as f64;
    for (r, label) in row_labels.iter().enumerate() {
        let yy = MARGIN + ch * r as f64;
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            MARGIN - 4.0,
            yy + ch / 2.0 + 4.0,
            escape(label)
        );
        for (c, &v) in cells[r].iter().enumerate() {
            let t = v.clamp(0.0, 1.0);
            let shade = |full: f64| (255.0 - t * (255.0 - full)).round() as u8;
            let _ = writeln!(
                out,
                r#"<rect x="{:.1}" y="{yy:.1}" width="{cw:.1}" height="{ch:.1}" fill="rgb({},{},{})" stroke="white"><title>{v}</title></rect>"#,
                MARGIN + cw * c as f64,
                shade(8.0),
                shade(48.0),
                shade(107.0)
            );
        }
    }
    for c in 0..n_cols {
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{c}</text>"#,
            MARGIN + cw * (c as f64 + 0.5),
            HEIGHT - MARGIN + 16.0
        );
    }
    out.push_str("</svg>\n");
    out
}
