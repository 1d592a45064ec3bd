//! Minimal SVG 1.1 band plots: shaded bands plus the real locus of a curve.

use std::fmt::Write as _;

use crate::spectral::BandStructure;

const W: f64 = 800.0;
const H: f64 = 480.0;
const ML: f64 = 60.0;
const MR: f64 = 20.0;
const MT: f64 = 20.0;
const MB: f64 = 45.0;

/// Samples of the locus: for each λ, the ordinates of the curve points
/// above it (for example Im μ of the purely imaginary roots).
pub struct Locus {
    pub lambdas: Vec<f64>,
    pub ys: Vec<Vec<f64>>,
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 8.0;
    let mag = 10f64.powf(raw.log10().floor());
    for m in [1.0, 2.0, 5.0, 10.0] {
        if m * mag >= raw {
            return m * mag;
        }
    }
    10.0 * mag
}

fn fmt_tick(x: f64) -> String {
    let s = format!("{x:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.to_string() }
}

/// Band plot over `window` with y auto-scaled to the locus.
pub fn band_plot(title: &str, y_label: &str, window: (f64, f64), bands: &BandStructure, locus: &Locus) -> String {
    let ymax = locus
        .ys
        .iter()
        .flatten()
        .filter(|y| y.is_finite())
        .fold(0.0f64, |m, y| m.max(y.abs()))
        .max(1e-12)
        * 1.1;
    let (x0, x1) = window;
    let px = |x: f64| ML + (x - x0) / (x1 - x0) * (W - ML - MR);
    let py = |y: f64| MT + (ymax - y) / (2.0 * ymax) * (H - MT - MB);
    let maxm = bands.max_multiplicity().max(1) as f64;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(s, r#"<title>{}</title>"#, escape(title));
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>"#);

    for b in bands.bands() {
        if b.multiplicity == 0 {
            continue;
        }
        let lo = b.lo.max(x0);
        let hi = b.hi.min(x1);
        if hi <= lo {
            continue;
        }
        let op = 0.12 + 0.4 * b.multiplicity as f64 / maxm;
        let _ = writeln!(
            s,
            r##"<rect x="{:.2}" y="{MT}" width="{:.2}" height="{:.2}" fill="#4a7ab5" fill-opacity="{op:.3}"><title>multiplicity {}</title></rect>"##,
            px(lo),
            px(hi) - px(lo),
            H - MT - MB,
            b.multiplicity
        );
    }

    // Axes and ticks.
    let _ = writeln!(
        s,
        r#"<rect x="{ML}" y="{MT}" width="{:.2}" height="{:.2}" fill="none" stroke="black" stroke-width="1"/>"#,
        W - ML - MR,
        H - MT - MB
    );
    let _ = writeln!(
        s,
        r#"<polyline points="{:.2},{:.2} {:.2},{:.2}" stroke="gray" stroke-width="0.5" fill="none"/>"#,
        ML,
        py(0.0),
        W - MR,
        py(0.0)
    );
    let step = nice_step(x1 - x0);
    let mut t = (x0 / step).ceil() * step;
    while t <= x1 + 1e-9 * step {
        let _ = writeln!(
            s,
            r#"<polyline points="{:.2},{:.2} {:.2},{:.2}" stroke="black" stroke-width="1" fill="none"/>"#,
            px(t),
            H - MB,
            px(t),
            H - MB + 5.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle" font-family="sans-serif">{}</text>"#,
            px(t),
            H - MB + 18.0,
            fmt_tick(t)
        );
        t += step;
    }
    let ystep = nice_step(2.0 * ymax);
    let mut t = (-ymax / ystep).ceil() * ystep;
    while t <= ymax {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="end" font-family="sans-serif">{}</text>"#,
            ML - 6.0,
            py(t) + 4.0,
            fmt_tick(t)
        );
        t += ystep;
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-size="14" text-anchor="middle" font-family="sans-serif">λ</text>"#,
        (ML + W - MR) / 2.0,
        H - 8.0
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{:.2}" font-size="14" text-anchor="middle" font-family="sans-serif" transform="rotate(-90 14 {:.2})">{}</text>"#,
        (MT + H - MB) / 2.0,
        (MT + H - MB) / 2.0,
        escape(y_label)
    );

    // Locus: consecutive samples with the same number of points are joined
    // branch by branch (ordinates sorted).
    let mut open: Vec<Vec<(f64, f64)>> = Vec::new();
    let mut lines: Vec<Vec<(f64, f64)>> = Vec::new();
    for (lam, ys) in locus.lambdas.iter().zip(&locus.ys) {
        let mut ys: Vec<f64> = ys.iter().cloned().filter(|y| y.is_finite()).collect();
        ys.sort_by(f64::total_cmp);
        if ys.len() != open.len() {
            lines.append(&mut open);
            open = ys.iter().map(|_| Vec::new()).collect();
        }
        for (line, y) in open.iter_mut().zip(&ys) {
            line.push((px(*lam), py(*y)));
        }
    }
    lines.append(&mut open);
    for line in lines {
        if line.len() == 1 {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="1.2" fill="black"/>"#, line[0].0, line[0].1);
            continue;
        }
        let pts: Vec<String> = line.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let _ = writeln!(s, r#"<polyline points="{}" stroke="black" stroke-width="1.2" fill="none"/>"#, pts.join(" "));
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plot_is_well_formed() {
        let bands = BandStructure::new(vec![-10.0, 10.0], vec![0, 2, 4]).unwrap();
        let lambdas: Vec<f64> = (0..81).map(|i| -40.0 + i as f64).collect();
        let ys = lambdas.iter().map(|&l: &f64| if l > -10.0 { vec![(l + 10.0).sqrt(), -(l + 10.0).sqrt()] } else { vec![] }).collect();
        let svg = band_plot("fig <1>", "Im μ", (-40.0, 40.0), &bands, &Locus { lambdas, ys });
        assert!(svg.starts_with("<?xml") && svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<rect").count(), 4);
        assert!(svg.contains("fig &lt;1&gt;"));
        assert!(svg.matches("<polyline").count() >= 3);
        assert_eq!(fmt_tick(-0.0), "0");
        assert_eq!(fmt_tick(10.0), "10");
        assert_eq!(nice_step(80.0), 10.0);
    }
}
