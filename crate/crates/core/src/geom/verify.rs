//! Boundary sampling of circular-arc triangles, the boundary-correspondence
//! report, and the argument-principle counter.
//!
//! Triangles with their zero-angle vertex at infinity are sampled directly:
//! vertical rays geometrically in the imaginary part up to the cutoff height,
//! the bounded arc through a projective parameter, and a straight cap closing
//! the curve at the cutoff. A finite cusp is first moved to infinity through
//! the chart `z -> -1/(z - cusp)` and the same scheme runs there, with the
//! cutoff read in chart units.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sphere::{chordal_distance, SpherePoint};

use super::{
    angle_at_vertex, mobius_to_standard, ArcTriangle, Orientation,
    SampledCurve, SphereMap,
};

struct BoundarySamples {
    /// Per original side index, in traversal direction, both endpoints kept.
    sides: [Vec<Complex64>; 3],
    /// The closing segment at the cutoff, both endpoints kept.
    cap: Vec<Complex64>,
    /// Closed traversal with junction duplicates dropped.
    polyline: Vec<Complex64>,
    /// Whether a chart was needed (finite cusp).
    charted: bool,
    cusp: usize,
}

fn find_cusp(tri: &ArcTriangle) -> Result<usize> {
    let mut angles = [0.0; 3];
    for (k, a) in angles.iter_mut().enumerate() {
        *a = angle_at_vertex(tri, k)?;
    }
    angles
        .iter()
        .position(|&a| a.min(2.0 * PI - a) < 1e-6)
        .ok_or(Error::WrongAngles { angles })
}

/// Geometric subdivision of `[lo, hi]` with `n` points, both ends included.
fn geometric_points(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let ratio = hi / lo;
    (0..n)
        .map(|j| lo * ratio.powf(j as f64 / (n - 1) as f64))
        .collect()
}

/// Samples of the ray side from its finite endpoint towards infinity,
/// ordered from the truncation point down to the endpoint. Vertical rays are
/// spaced geometrically in the imaginary part; oblique rays (charted planes)
/// use a geometric arc-length parameter.
fn sample_ray(endpoint: Complex64, witness: Complex64, cutoff: f64, n: usize) -> Vec<Complex64> {
    let u = (witness - endpoint) / (witness - endpoint).norm();
    if u.re.abs() < 1e-9 && u.im > 0.0 && endpoint.im > 0.0 && cutoff > endpoint.im {
        let heights = geometric_points(endpoint.im, cutoff, n);
        return heights
            .into_iter()
            .rev()
            .map(|im| Complex64::new(endpoint.re, im))
            .collect();
    }
    let lengths = geometric_points(1.0, 1.0 + cutoff, n);
    lengths
        .into_iter()
        .rev()
        .map(|s| endpoint + u * (s - 1.0))
        .collect()
}

/// Samples of the bounded arc from `a` to `b` through `w`, via the Moebius
/// parameter sending the arc to the positive real axis.
fn sample_arc(a: SpherePoint, w: SpherePoint, b: SpherePoint, n: usize) -> Result<Vec<Complex64>> {
    let r = mobius_to_standard(a, w, b)?;
    let back = r.inverse();
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let s = ((PI / 2.0) * j as f64 / (n - 1) as f64).tan();
        let p = if j + 1 == n {
            back.apply(SpherePoint::Infinity)
        } else {
            back.apply(SpherePoint::finite(s, 0.0))
        };
        match p {
            SpherePoint::Finite(z) => out.push(z),
            SpherePoint::Infinity => {
                return Err(Error::NotFound {
                    diagnostics: "bounded side passes through infinity".to_string(),
                })
            }
        }
    }
    Ok(out)
}

fn sample_boundary(tri: &ArcTriangle, samples: usize, cutoff: f64) -> Result<BoundarySamples> {
    assert!(samples >= 8);
    let cusp = find_cusp(tri)?;
    if !tri.vertices[cusp].is_infinity() {
        let pole = tri.vertices[cusp].value().expect("finite cusp");
        let chart = SphereMap::chart_at(pole);
        let inner = sample_boundary(&tri.transform(&chart)?, samples, cutoff)?;
        let back = chart.inverse();
        let map_back = |v: &[Complex64]| -> Result<Vec<Complex64>> {
            v.iter()
                .map(|z| match back.apply(SpherePoint::Finite(*z)) {
                    SpherePoint::Finite(w) => Ok(w),
                    SpherePoint::Infinity => Err(Error::NotFound {
                        diagnostics: "chart sample at the pole".to_string(),
                    }),
                })
                .collect()
        };
        return Ok(BoundarySamples {
            sides: [
                map_back(&inner.sides[0])?,
                map_back(&inner.sides[1])?,
                map_back(&inner.sides[2])?,
            ],
            cap: map_back(&inner.cap)?,
            polyline: map_back(&inner.polyline)?,
            charted: true,
            cusp,
        });
    }

    let z = cusp;
    let z1 = (z + 1) % 3;
    let z2 = (z + 2) % 3;
    let off_cusp = |p: SpherePoint| {
        p.value().ok_or(Error::NotFound {
            diagnostics: "a second vertex or witness sits at infinity".to_string(),
        })
    };
    let v1 = off_cusp(tri.vertices[z1])?;
    let v2 = off_cusp(tri.vertices[z2])?;
    let w_down = off_cusp(tri.witnesses[z])?;
    let w_up = off_cusp(tri.witnesses[z2])?;

    // Side z: from the cutoff down to v_{z+1}.
    let down = sample_ray(v1, w_down, cutoff, samples);
    // Side z+1: the bounded arc from v_{z+1} to v_{z+2}.
    let across = sample_arc(tri.vertices[z1], tri.witnesses[z1], tri.vertices[z2], samples)?;
    // Side z+2: from v_{z+2} up to the cutoff.
    let up: Vec<Complex64> =
        sample_ray(v2, w_up, cutoff, samples).into_iter().rev().collect();
    // Cap: straight segment joining the two truncation points.
    let start = *up.last().expect("nonempty");
    let end = down[0];
    let cap: Vec<Complex64> = (0..samples)
        .map(|j| start + (end - start) * (j as f64 / (samples - 1) as f64))
        .collect();

    let mut polyline = Vec::with_capacity(4 * samples);
    polyline.extend_from_slice(&down[..samples - 1]);
    polyline.extend_from_slice(&across[..samples - 1]);
    polyline.extend_from_slice(&up[..samples - 1]);
    polyline.extend_from_slice(&cap[..samples - 1]);

    let mut sides: [Vec<Complex64>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    sides[z] = down;
    sides[z1] = across;
    sides[z2] = up;
    Ok(BoundarySamples { sides, cap, polyline, charted: false, cusp })
}

/// Per-side outcome of the boundary-correspondence check.
#[derive(Debug, Clone, Copy)]
pub struct SideReport {
    /// Largest Euclidean distance of an image sample to the target circle.
    pub max_circle_distance: f64,
    /// Whether the induced parameter moves strictly in one direction.
    pub monotonic: bool,
    /// Largest adverse parameter step observed (distance units).
    pub max_backtrack: f64,
}

/// Outcome of [`verify_boundary_map`].
#[derive(Debug, Clone)]
pub struct BoundaryMapReport {
    pub sides: [SideReport; 3],
    /// Winding of the image curve about an interior witness of the target
    /// matches the target's orientation.
    pub orientation_ok: bool,
    /// Smallest chordal distance between images of well-separated samples.
    pub injectivity_min_separation: f64,
    /// Finite-difference check `Re f' > 0` on the strip above half the
    /// cutoff; `None` when the cusp needed a chart and the proxy does not
    /// apply literally.
    pub local_injectivity_ok: Option<bool>,
    /// Largest chordal distance between the images of the finite source
    /// vertices and the matching target vertices.
    pub vertex_max_distance: f64,
    /// Largest chordal gap between consecutive image samples.
    pub image_mesh_bound: f64,
}

impl BoundaryMapReport {
    /// All criteria at once, with the given side-distance tolerance.
    pub fn pass(&self, side_tol: f64) -> bool {
        self.sides.iter().all(|s| s.max_circle_distance < side_tol && s.monotonic)
            && self.orientation_ok
            && self.injectivity_min_separation > 1e-9
            && self.local_injectivity_ok != Some(false)
            && self.vertex_max_distance < side_tol.max(1e-10)
    }
}

/// Projective boundary parameter along target side `i`: the chart sending
/// (vertex, witness, next vertex) to (0, 1, infinity) maps the side onto the
/// positive reals; the Cayley angle `arg((w - i)/(w + i))` then parametrises
/// the extended real line as a circle, staying continuous through both
/// vertices and through infinity. The side traversal sweeps from -pi to 0.
fn side_parameters(target: &ArcTriangle, i: usize, images: &[SpherePoint]) -> Result<Vec<f64>> {
    let r = mobius_to_standard(
        target.vertices[i],
        target.witnesses[i],
        target.vertices[(i + 1) % 3],
    )?;
    let im = Complex64::new(0.0, 1.0);
    Ok(images
        .iter()
        .map(|z| match r.apply(*z) {
            SpherePoint::Finite(w) => ((w - im) / (w + im)).arg(),
            SpherePoint::Infinity => 0.0,
        })
        .collect())
}

/// The induced parameter must strictly increase along the traversal. The
/// parameter is an angle with period 2 pi, so increments are wrapped into
/// `(-pi, pi]`; the sampling keeps genuine steps far below a half turn.
fn monotonicity(params: &[f64]) -> (bool, f64) {
    if params.len() < 2 {
        return (true, 0.0);
    }
    let mut worst: f64 = 0.0;
    for w in params.windows(2) {
        let mut step = w[1] - w[0];
        while step <= -PI {
            step += 2.0 * PI;
        }
        while step > PI {
            step -= 2.0 * PI;
        }
        if step < 0.0 {
            worst = worst.max(-step);
        }
    }
    (worst <= 1e-10, worst)
}

/// A point just inside (`interior` true) or just outside the triangle,
/// offset from a bounded side's witness along the normal.
fn offset_witness(tri: &ArcTriangle, interior: bool) -> Result<Complex64> {
    for i in 0..3 {
        let (w, next, prev) = (tri.witnesses[i], tri.vertices[(i + 1) % 3], tri.vertices[i]);
        let wz = match w {
            SpherePoint::Finite(z) => z,
            SpherePoint::Infinity => continue,
        };
        let g = tri.sides[i].gradient(wz);
        if g.norm() == 0.0 {
            continue;
        }
        let t = Complex64::new(0.0, 1.0) * g / g.norm();
        let toward = match (next, prev) {
            (SpherePoint::Finite(v), _) => v - wz,
            (_, SpherePoint::Finite(v)) => wz - v,
            _ => continue,
        };
        let t = if (t.conj() * toward).re >= 0.0 { t } else { -t };
        let into_interior = match tri.orientation {
            Orientation::Left => Complex64::new(0.0, 1.0) * t,
            Orientation::Right => Complex64::new(0.0, -1.0) * t,
        };
        let normal = if interior { into_interior } else { -into_interior };
        let scale = if tri.sides[i].is_line() { 1.0 } else { tri.sides[i].radius().min(1.0) };
        return Ok(wz + normal * (0.1 * scale));
    }
    Err(Error::NotALune)
}

/// Check that an evaluator carries the boundary of `source` onto the
/// boundary of `target`, side by side: image-to-circle distances, strict
/// monotonicity of the induced boundary parameter, sampled injectivity,
/// orientation via the winding about an interior witness, and (when the cusp
/// is literally at infinity) the local-injectivity proxy `Re f' > 0` above
/// half the cutoff. Unbounded sides are truncated at `Im = cutoff` and the
/// cap segment joins the curve there.
pub fn verify_boundary_map<F>(
    f: F,
    source: &ArcTriangle,
    target: &ArcTriangle,
    samples: usize,
    cutoff: f64,
) -> Result<BoundaryMapReport>
where
    F: Fn(Complex64) -> Result<SpherePoint>,
{
    let bs = sample_boundary(source, samples, cutoff)?;

    let mut side_reports = [SideReport {
        max_circle_distance: f64::INFINITY,
        monotonic: false,
        max_backtrack: f64::INFINITY,
    }; 3];
    for i in 0..3 {
        let mut images = Vec::with_capacity(bs.sides[i].len());
        let mut max_dist: f64 = 0.0;
        for z in &bs.sides[i] {
            let image = f(*z)?;
            match image {
                SpherePoint::Finite(w) => {
                    max_dist = max_dist.max(target.sides[i].distance(w));
                }
                SpherePoint::Infinity => {
                    // Infinity lies on every line and on no proper circle.
                    if !target.sides[i].is_line() {
                        max_dist = f64::INFINITY;
                    }
                }
            }
            images.push(image);
        }
        let params = side_parameters(target, i, &images)?;
        let (monotonic, worst) = monotonicity(&params);
        side_reports[i] = SideReport {
            max_circle_distance: max_dist,
            monotonic,
            max_backtrack: worst,
        };
    }

    // Image of the full closed traversal.
    let mut image_points = Vec::with_capacity(bs.polyline.len());
    for z in &bs.polyline {
        image_points.push(f(*z)?);
    }
    let image_curve = SampledCurve { points: image_points.clone() };
    let image_mesh_bound = image_curve.mesh_bound();

    // Orientation: the image curve must wind once around an interior witness
    // of the target and not at all around an exterior one. Both windings are
    // read off in the chart `1/(z - exterior)`, which keeps the transformed
    // curve finite even when the raw image passes through infinity; winding
    // differences are invariant under the chart.
    let w0 = offset_witness(target, true)?;
    let e0 = offset_witness(target, false)?;
    let one = Complex64::new(1.0, 0.0);
    let chart = SphereMap::mobius([[Complex64::new(0.0, 0.0), one], [one, -e0]]);
    let expected = match target.orientation {
        Orientation::Left => 1,
        Orientation::Right => -1,
    };
    let charted_curve = SampledCurve {
        points: image_points.iter().map(|p| chart.apply(*p)).collect(),
    };
    let w0_chart = match chart.apply(SpherePoint::Finite(w0)) {
        SpherePoint::Finite(z) => z,
        SpherePoint::Infinity => w0, // unreachable: w0 != e0
    };
    let orientation_ok = matches!(
        super::winding_number(&charted_curve, w0_chart),
        Ok(k) if k == expected
    );

    // Sampled injectivity over well-separated pairs.
    let n = image_points.len();
    let gap = 5usize;
    let mut min_sep = f64::INFINITY;
    for a in 0..n {
        for b in (a + 1)..n {
            let cyclic = (b - a).min(n - (b - a));
            if cyclic < gap {
                continue;
            }
            min_sep = min_sep.min(chordal_distance(image_points[a], image_points[b]));
        }
    }

    // Local injectivity proxy on the strip below the cap.
    let local_injectivity_ok = if bs.charted {
        None
    } else {
        let z = bs.cusp;
        let re_a = bs.sides[z].last().expect("nonempty").re;
        let re_b = bs.sides[(z + 2) % 3].first().expect("nonempty").re;
        let (re_lo, re_hi) = if re_a <= re_b { (re_a, re_b) } else { (re_b, re_a) };
        let h = 1e-4;
        let mut ok = true;
        'grid: for iy in 0..5 {
            for ix in 0..5 {
                let re = re_lo + (re_hi - re_lo) * (ix as f64 + 0.5) / 5.0;
                let im = cutoff / 2.0 + (cutoff / 2.0) * (iy as f64 + 0.5) / 5.0;
                let z0 = Complex64::new(re, im);
                let fp = match (f(z0 + h)?, f(z0 - h)?) {
                    (SpherePoint::Finite(a), SpherePoint::Finite(b)) => (a - b) / (2.0 * h),
                    _ => {
                        ok = false;
                        break 'grid;
                    }
                };
                if fp.re <= 0.0 {
                    ok = false;
                    break 'grid;
                }
            }
        }
        Some(ok)
    };

    // Vertex correspondence away from the cusp, which corresponds only in a
    // limiting sense and need not be an evaluable point.
    let mut vertex_max_distance: f64 = 0.0;
    for k in 0..3 {
        if k == bs.cusp {
            continue;
        }
        if let SpherePoint::Finite(v) = source.vertices[k] {
            let image = f(v)?;
            vertex_max_distance =
                vertex_max_distance.max(chordal_distance(image, target.vertices[k]));
        }
    }

    Ok(BoundaryMapReport {
        sides: side_reports,
        orientation_ok,
        injectivity_min_separation: min_sep,
        local_injectivity_ok,
        vertex_max_distance,
        image_mesh_bound,
    })
}

/// Count solutions of `f = w` inside the truncated triangle by the winding
/// number of the sampled image of its boundary. The cap must separate `w`
/// from infinity: `|f| > 2|w|` is required on it.
pub fn argument_principle_count<F>(
    f: F,
    source: &ArcTriangle,
    w: Complex64,
    samples: usize,
    cutoff: f64,
) -> Result<i64>
where
    F: Fn(Complex64) -> Result<SpherePoint>,
{
    let bs = sample_boundary(source, samples, cutoff)?;
    let mut min_abs_on_cap = f64::INFINITY;
    for z in &bs.cap {
        match f(*z)? {
            SpherePoint::Finite(v) => min_abs_on_cap = min_abs_on_cap.min(v.norm()),
            SpherePoint::Infinity => {}
        }
    }
    let required = 2.0 * w.norm();
    if min_abs_on_cap <= required {
        return Err(Error::CapTooLow { min_abs_on_cap, required });
    }
    let mut image_points = Vec::with_capacity(bs.polyline.len());
    for z in &bs.polyline {
        image_points.push(f(*z)?);
    }
    super::winding_number(&SampledCurve { points: image_points }, w)
}
