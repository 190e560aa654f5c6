//! SVG rendering of a Voronoi diagram with the zeros of one `P_n`.

use std::fmt::Write as _;

use num_complex::Complex;

use crate::voronoi::Diagram;

/// Axis-aligned window in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Viewport {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Viewport {
    /// Bounding box of `points` grown by `frac` of its larger side on each side.
    pub fn around(points: &[Complex<f64>], frac: f64) -> Self {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for p in points {
            x0 = x0.min(p.re);
            x1 = x1.max(p.re);
            y0 = y0.min(p.im);
            y1 = y1.max(p.im);
        }
        let pad = frac * (x1 - x0).max(y1 - y0).max(1.0);
        Viewport {
            x_min: x0 - pad,
            x_max: x1 + pad,
            y_min: y0 - pad,
            y_max: y1 + pad,
        }
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }
}

/// Liang–Barsky: the part of `a + u (b - a)`, `u` in `[u0, u1]`, inside `vp`.
pub fn clip_param(a: Complex<f64>, d: Complex<f64>, mut u0: f64, mut u1: f64, vp: &Viewport) -> Option<(f64, f64)> {
    let checks = [
        (-d.re, a.re - vp.x_min),
        (d.re, vp.x_max - a.re),
        (-d.im, a.im - vp.y_min),
        (d.im, vp.y_max - a.im),
    ];
    for (p, q) in checks {
        if p == 0.0 {
            if q < 0.0 {
                return None;
            }
            continue;
        }
        let r = q / p;
        if p < 0.0 {
            u0 = u0.max(r);
        } else {
            u1 = u1.min(r);
        }
    }
    (u0 < u1).then_some((u0, u1))
}

/// Draws sites, clipped skeleton edges and zeros.
pub fn render(diagram: &Diagram<f64>, zeros: &[Complex<f64>], title: &str) -> String {
    let vp = Viewport::around(&diagram.sites, 0.25);
    let px = 800.0;
    let scale = px / vp.width().max(vp.height());
    let (w, h) = (vp.width() * scale, vp.height() * scale);
    let tx = |z: Complex<f64>| ((z.re - vp.x_min) * scale, (vp.y_max - z.im) * scale);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.3} {h:.3}">"#
    );
    let _ = writeln!(s, "<title>{}</title>", escape(title));
    let _ = writeln!(s, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    let _ = writeln!(s, r##"<g stroke="#1f4e9c" stroke-width="1.5">"##);
    for e in &diagram.edges {
        let (lo, hi) = e.clipped_interval(diagram.clip_radius);
        if let Some((u0, u1)) = clip_param(e.midpoint, e.half_normal, lo, hi, &vp) {
            let (x0, y0) = tx(e.point_at(u0));
            let (x1, y1) = tx(e.point_at(u1));
            let _ = writeln!(
                s,
                r#"<line class="edge" data-sites="{} {}" x1="{x0:.3}" y1="{y0:.3}" x2="{x1:.3}" y2="{y1:.3}"/>"#,
                e.sites.0, e.sites.1
            );
        }
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r##"<g fill="#c0392b">"##);
    for z in zeros {
        let (x, y) = tx(*z);
        let _ = writeln!(s, r#"<circle class="zero" cx="{x:.3}" cy="{y:.3}" r="2.5"/>"#);
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r##"<g fill="#000000">"##);
    for z in &diagram.sites {
        let (x, y) = tx(*z);
        let _ = writeln!(s, r#"<circle class="site" cx="{x:.3}" cy="{y:.3}" r="5"/>"#);
    }
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::voronoi::build_voronoi;

    #[test]
    fn marker_counts() {
        let sites = [Complex::new(0.0, 0.0), Complex::new(1.0, 0.0), Complex::new(0.0, 1.0)];
        let d = build_voronoi(&sites).unwrap();
        let zeros = [Complex::new(0.5, 0.1), Complex::new(40.0, 40.0)];
        let svg = render(&d, &zeros, "a<b");
        assert_eq!(svg.matches(r#"class="site""#).count(), 3);
        assert_eq!(svg.matches(r#"class="zero""#).count(), 2);
        assert_eq!(svg.matches(r#"class="edge""#).count(), 3);
        assert!(svg.contains("a&lt;b"));
    }

    #[test]
    fn liang_barsky() {
        let vp = Viewport {
            x_min: 0.0,
            x_max: 1.0,
            y_min: 0.0,
            y_max: 1.0,
        };
        let r = clip_param(Complex::new(-1.0, 0.5), Complex::new(1.0, 0.0), f64::NEG_INFINITY, f64::INFINITY, &vp);
        assert_eq!(r, Some((1.0, 2.0)));
        assert_eq!(clip_param(Complex::new(-1.0, 2.0), Complex::new(1.0, 0.0), -5.0, 5.0, &vp), None);
    }
}
