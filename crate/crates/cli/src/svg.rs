//! SVG rendering of the reflection tessellation: the images of the
//! fundamental triangle under all words up to the requested depth, drawn in
//! the viewport [-1.5, 2.5] x [0, 3] with circular sides as arc segments and
//! line sides as straight segments clipped at the viewport.

use num_complex::Complex64;

use qperiods::geom::{ArcTriangle, SphereMap};
use qperiods::group::tessellate;
use qperiods::sphere::SpherePoint;

const VIEW_X_MIN: f64 = -1.5;
const VIEW_X_MAX: f64 = 2.5;
const VIEW_Y_MIN: f64 = 0.0;
const VIEW_Y_MAX: f64 = 3.0;
const SCALE: f64 = 200.0;
const WIDTH: f64 = (VIEW_X_MAX - VIEW_X_MIN) * SCALE;
const HEIGHT: f64 = (VIEW_Y_MAX - VIEW_Y_MIN) * SCALE;

fn px(z: Complex64) -> (f64, f64) {
    ((z.re - VIEW_X_MIN) * SCALE, (VIEW_Y_MAX - z.im) * SCALE)
}

/// Clip the ray `start + t * dir`, `t >= 0`, at the viewport boundary.
fn clip_ray(start: Complex64, dir: Complex64) -> Complex64 {
    let mut t_max = f64::INFINITY;
    if dir.re > 1e-12 {
        t_max = t_max.min((VIEW_X_MAX - start.re) / dir.re);
    } else if dir.re < -1e-12 {
        t_max = t_max.min((VIEW_X_MIN - start.re) / dir.re);
    }
    if dir.im > 1e-12 {
        t_max = t_max.min((VIEW_Y_MAX - start.im) / dir.im);
    } else if dir.im < -1e-12 {
        t_max = t_max.min((VIEW_Y_MIN - start.im) / dir.im);
    }
    if !t_max.is_finite() {
        t_max = 0.0;
    }
    start + dir * t_max.max(0.0)
}

fn angle_about(center: Complex64, z: Complex64) -> f64 {
    (z - center).arg()
}

/// One side of a triangle as an SVG subpath.
fn side_path(tri: &ArcTriangle, i: usize) -> Option<String> {
    let circle = &tri.sides[i];
    let a = tri.vertices[i];
    let b = tri.vertices[(i + 1) % 3];
    let w = tri.witnesses[i];
    if circle.is_line() {
        // Straight side: draw between the finite endpoints, running off
        // towards the witness direction when an endpoint is at infinity.
        let (start, end) = match (a, b) {
            (SpherePoint::Finite(p), SpherePoint::Finite(q)) => (p, q),
            (SpherePoint::Finite(p), SpherePoint::Infinity)
            | (SpherePoint::Infinity, SpherePoint::Finite(p)) => {
                let wz = w.value()?;
                let dir = (wz - p) / (wz - p).norm();
                (p, clip_ray(p, dir))
            }
            _ => return None,
        };
        let (x1, y1) = px(start);
        let (x2, y2) = px(end);
        Some(format!("M {x1:.3} {y1:.3} L {x2:.3} {y2:.3}"))
    } else {
        let p = a.value()?;
        let q = b.value()?;
        let wz = w.value()?;
        let center = circle.center();
        let r = circle.radius();
        let theta_a = angle_about(center, p);
        let theta_w = angle_about(center, wz);
        let theta_b = angle_about(center, q);
        // Counterclockwise from a, does the witness come before b?
        let ccw_w = (theta_w - theta_a).rem_euclid(2.0 * std::f64::consts::PI);
        let ccw_b = (theta_b - theta_a).rem_euclid(2.0 * std::f64::consts::PI);
        let ccw = ccw_w <= ccw_b;
        let span = if ccw { ccw_b } else { 2.0 * std::f64::consts::PI - ccw_b };
        let large_arc = if span > std::f64::consts::PI { 1 } else { 0 };
        // The y-flip into SVG's y-down frame is visually orientation
        // preserving, and the positive-angle sweep flag is the visually
        // clockwise one, so it encodes mathematically clockwise arcs.
        let sweep = if ccw { 0 } else { 1 };
        let (x1, y1) = px(p);
        let (x2, y2) = px(q);
        let rp = r * SCALE;
        Some(format!(
            "M {x1:.3} {y1:.3} A {rp:.3} {rp:.3} 0 {large_arc} {sweep} {x2:.3} {y2:.3}"
        ))
    }
}

/// Full SVG document for the tessellation at the given depth.
pub fn render_tessellation(depth: usize) -> String {
    let words = tessellate(depth);
    let t0 = ArcTriangle::t0();
    let mut doc = String::new();
    doc.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" \
         width=\"{WIDTH}\" height=\"{HEIGHT}\">\n"
    ));
    doc.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>\n"
    ));
    for word in &words {
        let tri = match t0.transform(&SphereMap::from_extended(word)) {
            Ok(t) => t,
            Err(_) => continue,
        };
        let mut d = String::new();
        for i in 0..3 {
            if let Some(part) = side_path(&tri, i) {
                if !d.is_empty() {
                    d.push(' ');
                }
                d.push_str(&part);
            }
        }
        if !d.is_empty() {
            doc.push_str(&format!(
                "  <path d=\"{d}\" fill=\"none\" stroke=\"#334155\" stroke-width=\"1\"/>\n"
            ));
        }
    }
    doc.push_str("</svg>\n");
    doc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tessellation_svg_has_one_path_per_word() {
        let depth = 2;
        let svg = render_tessellation(depth);
        let paths = svg.matches("<path ").count();
        assert_eq!(paths, tessellate(depth).len());
        assert!(svg.contains("viewBox=\"0 0 800 600\""));
        assert!(svg.contains(" A "));
    }

    #[test]
    fn fundamental_triangle_arc_is_the_short_clockwise_one() {
        // The unit-circle side from i to rho: pixel start (300, 400), end
        // (400, 426.795...), radius 200, minor arc, clockwise on screen.
        let svg = render_tessellation(0);
        assert!(
            svg.contains("M 300.000 400.000 A 200.000 200.000 0 0 1 400.000 426.795"),
            "{svg}"
        );
    }
}
