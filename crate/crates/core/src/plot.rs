//! Deterministic SVG line plots with a log-scaled residual axis.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::report::Series;

/// Values at or below zero are drawn at this floor.
pub const LOG_FLOOR: f64 = 1e-18;

const W: f64 = 640.0;
const H: f64 = 400.0;
const MARGIN: f64 = 60.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn log_y(y: f64) -> f64 {
    y.max(LOG_FLOOR).log10()
}

pub fn render_svg(series: &[Series], title: &str) -> Result<String> {
    let pts: Vec<(f64, f64)> = series.iter().flat_map(|s| s.points.iter().copied()).collect();
    if pts.is_empty() {
        return Err(Error::EmptySeries);
    }
    let (mut x0, mut x1) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.0), b.max(p.0)));
    let (mut y0, mut y1) =
        pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(log_y(p.1)), b.max(log_y(p.1))));
    y0 = y0.floor();
    y1 = y1.ceil();
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    if x1 <= x0 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
    let sy = |y: f64| H - MARGIN - (log_y(y) - y0) / (y1 - y0) * (H - 2.0 * MARGIN);
    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="24" font-family="monospace" font-size="14" text-anchor="middle">{}</text>"#, W / 2.0, escape(title));
    let _ = writeln!(
        out,
        r#"<path d="M{m} {t} L{m} {b} L{r} {b}" stroke="black" fill="none"/>"#,
        m = MARGIN,
        t = MARGIN,
        b = H - MARGIN,
        r = W - MARGIN
    );
    let decades = (y1 - y0) as i64;
    let step = ((decades + 7) / 8).max(1);
    for k in (0..=decades).step_by(step as usize) {
        let e = y0 as i64 + k;
        let y = sy(10f64.powi(e as i32));
        let _ = writeln!(out, r##"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/>"##, MARGIN, W - MARGIN);
        let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" font-family="monospace" font-size="10" text-anchor="end">1e{e}</text>"#, MARGIN - 4.0, y + 3.0);
    }
    for (x, anchor) in [(x0, "start"), (x1, "end")] {
        let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" font-family="monospace" font-size="10" text-anchor="{anchor}">{}</text>"#, sx(x), H - MARGIN + 14.0, fmt_num(x));
    }
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        if s.points.len() > 1 {
            let d: Vec<String> = s.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
            let _ = writeln!(out, r#"<polyline points="{}" stroke="{color}" fill="none"/>"#, d.join(" "));
        }
        for &(x, y) in &s.points {
            let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, sx(x), sy(y));
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-family="monospace" font-size="10" fill="{color}">{}</text>"#,
            W - MARGIN + 4.0 - 120.0,
            MARGIN + 12.0 * (i as f64 + 1.0),
            escape(&s.name)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn fmt_num(x: f64) -> String {
    if x.abs() >= 1e4 || (x != 0.0 && x.abs() < 1e-2) { format!("{x:.2e}") } else { format!("{x:.3}") }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn emit_plot(series: &[Series], title: &str, path: &Path) -> Result<()> {
    let svg = render_svg(series, title)?;
    std::fs::write(path, svg)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plots() {
        assert!(matches!(render_svg(&[], "x"), Err(Error::EmptySeries)));
        assert!(matches!(render_svg(&[Series::new("e", vec![])], "x"), Err(Error::EmptySeries)));
        let one = render_svg(&[Series::new("p", vec![(1.0, 1e-3)])], "one").unwrap();
        assert_eq!(one.matches("<circle").count(), 1);
        let s = [Series::new("inc", vec![(64.0, 1e-2), (256.0, 7.7e-5), (1024.0, 1.9e-7)])];
        assert_eq!(render_svg(&s, "t").unwrap(), render_svg(&s, "t").unwrap());
        assert!(render_svg(&[Series::new("z", vec![(0.0, 0.0)])], "zero").is_ok());
    }
}
