//! Moebius geometry of generalised circles and circular-arc triangles:
//! construction, angles, complementary triangles, classification up to
//! Moebius equivalence, and winding numbers of sampled curves.

mod verify;

pub use verify::{
    argument_principle_count, verify_boundary_map, BoundaryMapReport, SideReport,
};

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::ExtendedMap;
use crate::sphere::{chordal_distance, SpherePoint};

/// A circle or line in the extended plane, stored as the Hermitian locus
/// `A|z|^2 + 2 Re(conj(B) z) + C = 0` with `|B|^2 - AC > 0`, normalised so
/// that `max(|A|, |B|, |C|) = 1`. Lines are the circles through infinity,
/// `A = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralizedCircle {
    pub a: f64,
    pub b: Complex64,
    pub c: f64,
}

impl GeneralizedCircle {
    pub fn new(a: f64, b: Complex64, c: f64) -> Result<Self> {
        let circle = GeneralizedCircle { a, b, c }.normalized();
        if circle.discriminant() <= 0.0 {
            return Err(Error::CoincidentPoints);
        }
        Ok(circle)
    }

    fn normalized(self) -> Self {
        let m = self.a.abs().max(self.b.norm()).max(self.c.abs());
        GeneralizedCircle { a: self.a / m, b: self.b / m, c: self.c / m }
    }

    pub fn discriminant(&self) -> f64 {
        self.b.norm_sqr() - self.a * self.c
    }

    pub fn is_line(&self) -> bool {
        self.a.abs() < 1e-12
    }

    pub fn eval(&self, z: Complex64) -> f64 {
        self.a * z.norm_sqr() + 2.0 * (self.b.conj() * z).re + self.c
    }

    /// Centre of a proper circle.
    pub fn center(&self) -> Complex64 {
        -self.b / self.a
    }

    /// Radius of a proper circle.
    pub fn radius(&self) -> f64 {
        self.discriminant().sqrt() / self.a.abs()
    }

    /// Euclidean distance from a finite point to the locus.
    pub fn distance(&self, z: Complex64) -> f64 {
        if self.is_line() {
            self.eval(z).abs() / (2.0 * self.b.norm())
        } else {
            ((z - self.center()).norm() - self.radius()).abs()
        }
    }

    /// Gradient of the defining form, `2(Az + B)`; tangents are its rotations
    /// by a quarter turn.
    pub fn gradient(&self, z: Complex64) -> Complex64 {
        2.0 * (self.a * z + self.b)
    }

    pub fn contains(&self, p: SpherePoint, tol: f64) -> bool {
        match p {
            SpherePoint::Infinity => self.is_line(),
            SpherePoint::Finite(z) => self.distance(z) <= tol,
        }
    }
}

/// A Moebius or anti-Moebius transformation of the sphere with complex
/// matrix entries; `conjugate_first` applies `z -> conj(z)` before the
/// fractional-linear action.
#[derive(Debug, Clone, Copy)]
pub struct SphereMap {
    pub m: [[Complex64; 2]; 2],
    pub conjugate_first: bool,
}

impl SphereMap {
    pub fn mobius(m: [[Complex64; 2]; 2]) -> Self {
        SphereMap { m, conjugate_first: false }
    }

    pub fn identity() -> Self {
        SphereMap::mobius([
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        ])
    }

    pub fn from_extended(g: &ExtendedMap) -> Self {
        let (a, b, c, d) = g.entries();
        SphereMap {
            m: [
                [Complex64::new(a as f64, 0.0), Complex64::new(b as f64, 0.0)],
                [Complex64::new(c as f64, 0.0), Complex64::new(d as f64, 0.0)],
            ],
            conjugate_first: g.conjugate_first(),
        }
    }

    /// `z -> -1/(z - pole)`, the standard chart that moves `pole` to infinity
    /// and infinity to 0.
    pub fn chart_at(pole: Complex64) -> Self {
        SphereMap::mobius([
            [Complex64::new(0.0, 0.0), Complex64::new(-1.0, 0.0)],
            [Complex64::new(1.0, 0.0), -pole],
        ])
    }

    pub fn is_anti(&self) -> bool {
        self.conjugate_first
    }

    pub fn det(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn apply(&self, p: SpherePoint) -> SpherePoint {
        let p = if self.conjugate_first { p.conj() } else { p };
        match p {
            SpherePoint::Infinity => {
                if self.m[1][0].norm() == 0.0 {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::Finite(self.m[0][0] / self.m[1][0])
                }
            }
            SpherePoint::Finite(z) => {
                let den = self.m[1][0] * z + self.m[1][1];
                if den.norm() == 0.0 {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::Finite((self.m[0][0] * z + self.m[0][1]) / den)
                }
            }
        }
    }

    /// Projective inverse. For an anti-map `M . conj` the inverse is
    /// `conj(adj M) . conj`, because conjugation commutes through after
    /// conjugating the entries.
    pub fn inverse(&self) -> Self {
        let adj = [
            [self.m[1][1], -self.m[0][1]],
            [-self.m[1][0], self.m[0][0]],
        ];
        if self.conjugate_first {
            SphereMap {
                m: [
                    [adj[0][0].conj(), adj[0][1].conj()],
                    [adj[1][0].conj(), adj[1][1].conj()],
                ],
                conjugate_first: true,
            }
        } else {
            SphereMap { m: adj, conjugate_first: false }
        }
    }

    /// Composition `self . other` (apply `other` first).
    pub fn compose(&self, other: &SphereMap) -> Self {
        // conj . M = conj(M) . conj, so pull self's matrix past other's flag.
        let left = if other.conjugate_first {
            [
                [self.m[0][0].conj(), self.m[0][1].conj()],
                [self.m[1][0].conj(), self.m[1][1].conj()],
            ]
        } else {
            self.m
        };
        let mul = |x: [[Complex64; 2]; 2], y: [[Complex64; 2]; 2]| {
            [
                [
                    x[0][0] * y[0][0] + x[0][1] * y[1][0],
                    x[0][0] * y[0][1] + x[0][1] * y[1][1],
                ],
                [
                    x[1][0] * y[0][0] + x[1][1] * y[1][0],
                    x[1][0] * y[0][1] + x[1][1] * y[1][1],
                ],
            ]
        };
        SphereMap {
            m: mul(left, other.m),
            conjugate_first: self.conjugate_first ^ other.conjugate_first,
        }
    }
}

/// The unique generalised circle through three distinct points of the sphere.
pub fn circle_through(
    p1: SpherePoint,
    p2: SpherePoint,
    p3: SpherePoint,
) -> Result<GeneralizedCircle> {
    let pts = [p1, p2, p3];
    for i in 0..3 {
        for j in (i + 1)..3 {
            if chordal_distance(pts[i], pts[j]) < 1e-12 {
                return Err(Error::CoincidentPoints);
            }
        }
    }
    let finite: Vec<Complex64> = pts.iter().filter_map(|p| p.value()).collect();
    if finite.len() == 2 {
        return line_through(finite[0], finite[1]);
    }
    let (z1, z2, z3) = (finite[0], finite[1], finite[2]);
    let cross = ((z2 - z1).conj() * (z3 - z1)).im;
    let scale = (z2 - z1).norm() * (z3 - z1).norm();
    if cross.abs() < 1e-12 * scale {
        return line_through(z1, z2);
    }
    // Circumcentre from the perpendicular-bisector determinant.
    let d = 2.0
        * (z1.re * (z2.im - z3.im) + z2.re * (z3.im - z1.im) + z3.re * (z1.im - z2.im));
    let ux = (z1.norm_sqr() * (z2.im - z3.im)
        + z2.norm_sqr() * (z3.im - z1.im)
        + z3.norm_sqr() * (z1.im - z2.im))
        / d;
    let uy = (z1.norm_sqr() * (z3.re - z2.re)
        + z2.norm_sqr() * (z1.re - z3.re)
        + z3.norm_sqr() * (z2.re - z1.re))
        / d;
    let center = Complex64::new(ux, uy);
    let r = (z1 - center).norm();
    GeneralizedCircle::new(1.0, -center, center.norm_sqr() - r * r)
}

fn line_through(z1: Complex64, z2: Complex64) -> Result<GeneralizedCircle> {
    let n = Complex64::new(0.0, 1.0) * (z2 - z1);
    GeneralizedCircle::new(0.0, n / 2.0, -(n.conj() * z1).re)
}

/// Image of a generalised circle under a sphere map, via the Hermitian-form
/// rule `H -> (M^-1)^H H M^-1`; the conjugation flag conjugates `B` first.
pub fn moebius_image(map: &SphereMap, circle: &GeneralizedCircle) -> Result<GeneralizedCircle> {
    let b = if map.conjugate_first { circle.b.conj() } else { circle.b };
    let h = [
        [Complex64::new(circle.a, 0.0), b],
        [b.conj(), Complex64::new(circle.c, 0.0)],
    ];
    let inv = map.inverse();
    let n = if map.conjugate_first {
        // The inverse carries its own conjugation; the Hermitian rule needs
        // the plain matrix that undoes the fractional-linear part.
        [
            [inv.m[0][0].conj(), inv.m[0][1].conj()],
            [inv.m[1][0].conj(), inv.m[1][1].conj()],
        ]
    } else {
        inv.m
    };
    // H' = N^H H N
    let hn = [
        [
            h[0][0] * n[0][0] + h[0][1] * n[1][0],
            h[0][0] * n[0][1] + h[0][1] * n[1][1],
        ],
        [
            h[1][0] * n[0][0] + h[1][1] * n[1][0],
            h[1][0] * n[0][1] + h[1][1] * n[1][1],
        ],
    ];
    let a = (n[0][0].conj() * hn[0][0] + n[1][0].conj() * hn[1][0]).re;
    let bq = n[0][0].conj() * hn[0][1] + n[1][0].conj() * hn[1][1];
    let c = (n[0][1].conj() * hn[0][1] + n[1][1].conj() * hn[1][1]).re;
    GeneralizedCircle::new(a, bq, c)
}

/// Which side of the oriented boundary the interior lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Left,
    Right,
}

impl Orientation {
    fn flipped(self) -> Self {
        match self {
            Orientation::Left => Orientation::Right,
            Orientation::Right => Orientation::Left,
        }
    }
}

/// A circular-arc triangle: side `i` is the arc of `sides[i]` joining
/// `vertices[i]` to `vertices[i+1]`, passing through `witnesses[i]`. The
/// witness pins down which of the two arcs of the carrying circle is meant.
#[derive(Debug, Clone, Copy)]
pub struct ArcTriangle {
    pub vertices: [SpherePoint; 3],
    pub sides: [GeneralizedCircle; 3],
    pub witnesses: [SpherePoint; 3],
    pub orientation: Orientation,
}

fn imaginary_axis() -> GeneralizedCircle {
    GeneralizedCircle::new(0.0, Complex64::new(1.0, 0.0), 0.0).unwrap()
}

fn unit_circle() -> GeneralizedCircle {
    GeneralizedCircle::new(1.0, Complex64::new(0.0, 0.0), -1.0).unwrap()
}

fn re_half_line() -> GeneralizedCircle {
    GeneralizedCircle::new(0.0, Complex64::new(1.0, 0.0), -1.0).unwrap()
}

impl ArcTriangle {
    /// The fundamental triangle with vertices `infinity, i, rho` and angles
    /// `0, pi/2, pi/3`.
    pub fn t0() -> Self {
        let rho = crate::group::rho();
        ArcTriangle {
            vertices: [
                SpherePoint::Infinity,
                SpherePoint::finite(0.0, 1.0),
                SpherePoint::Finite(rho),
            ],
            sides: [imaginary_axis(), unit_circle(), re_half_line()],
            witnesses: [
                SpherePoint::finite(0.0, 2.0),
                SpherePoint::Finite(Complex64::from_polar(1.0, 5.0 * PI / 12.0)),
                SpherePoint::finite(0.5, 2.0),
            ],
            orientation: Orientation::Left,
        }
    }

    /// The image triangle with vertices `infinity, -i, conj(rho)` and angles
    /// `0, pi/2, 2pi/3`.
    pub fn t1() -> Self {
        let rho = crate::group::rho();
        ArcTriangle {
            vertices: [
                SpherePoint::Infinity,
                SpherePoint::finite(0.0, -1.0),
                SpherePoint::Finite(rho.conj()),
            ],
            sides: [imaginary_axis(), unit_circle(), re_half_line()],
            witnesses: [
                SpherePoint::finite(0.0, 0.0),
                SpherePoint::Finite(Complex64::from_polar(1.0, -5.0 * PI / 12.0)),
                SpherePoint::finite(0.5, 1.0),
            ],
            orientation: Orientation::Left,
        }
    }

    pub fn transform(&self, map: &SphereMap) -> Result<ArcTriangle> {
        Ok(ArcTriangle {
            vertices: [
                map.apply(self.vertices[0]),
                map.apply(self.vertices[1]),
                map.apply(self.vertices[2]),
            ],
            sides: [
                moebius_image(map, &self.sides[0])?,
                moebius_image(map, &self.sides[1])?,
                moebius_image(map, &self.sides[2])?,
            ],
            witnesses: [
                map.apply(self.witnesses[0]),
                map.apply(self.witnesses[1]),
                map.apply(self.witnesses[2]),
            ],
            orientation: if map.is_anti() {
                self.orientation.flipped()
            } else {
                self.orientation
            },
        })
    }

    fn has_infinite_data(&self) -> bool {
        self.vertices.iter().any(|v| v.is_infinity())
            || self.witnesses.iter().any(|w| w.is_infinity())
    }

    /// An auxiliary finite point away from the vertices and witnesses, used
    /// to chart the triangle into fully finite position.
    fn auxiliary_pole(&self) -> Complex64 {
        let candidates = [
            Complex64::new(0.31, -2.17),
            Complex64::new(-1.91, 1.23),
            Complex64::new(2.47, 0.61),
            Complex64::new(-0.73, -0.89),
        ];
        for c in candidates {
            let clear = self
                .vertices
                .iter()
                .chain(self.witnesses.iter())
                .all(|p| chordal_distance(*p, SpherePoint::Finite(c)) > 1e-3);
            if clear {
                return c;
            }
        }
        Complex64::new(0.5, -3.33)
    }
}

/// The Moebius map sending `(z1, z2, z3)` to `(0, 1, infinity)`.
pub fn mobius_to_standard(
    z1: SpherePoint,
    z2: SpherePoint,
    z3: SpherePoint,
) -> Result<SphereMap> {
    for (a, b) in [(z1, z2), (z1, z3), (z2, z3)] {
        if chordal_distance(a, b) < 1e-12 {
            return Err(Error::CoincidentPoints);
        }
    }
    let one = Complex64::new(1.0, 0.0);
    let m = match (z1, z2, z3) {
        (SpherePoint::Infinity, SpherePoint::Finite(b), SpherePoint::Finite(c)) => {
            [[Complex64::new(0.0, 0.0), b - c], [one, -c]]
        }
        (SpherePoint::Finite(a), SpherePoint::Infinity, SpherePoint::Finite(c)) => {
            [[one, -a], [one, -c]]
        }
        (SpherePoint::Finite(a), SpherePoint::Finite(b), SpherePoint::Infinity) => {
            [[one, -a], [Complex64::new(0.0, 0.0), b - a]]
        }
        (SpherePoint::Finite(a), SpherePoint::Finite(b), SpherePoint::Finite(c)) => {
            [[b - c, -a * (b - c)], [b - a, -c * (b - a)]]
        }
        _ => return Err(Error::CoincidentPoints),
    };
    Ok(SphereMap::mobius(m))
}

/// The Moebius map sending one triple of distinct points to another.
pub fn mobius_through(
    sources: [SpherePoint; 3],
    targets: [SpherePoint; 3],
) -> Result<SphereMap> {
    let rs = mobius_to_standard(sources[0], sources[1], sources[2])?;
    let rt = mobius_to_standard(targets[0], targets[1], targets[2])?;
    Ok(rt.inverse().compose(&rs))
}

/// A point on the circle through `e1, w, e2` lying on the arc between `e1`
/// and `e2` that avoids `w`.
fn other_arc_point(e1: SpherePoint, e2: SpherePoint, w: SpherePoint) -> Result<SpherePoint> {
    let r = mobius_to_standard(e1, w, e2)?;
    Ok(r.inverse().apply(SpherePoint::finite(-1.0, 0.0)))
}

/// Interior angle of the triangle at the given vertex, measured from the
/// tangent directions of the two incident sides on the interior's side of the
/// boundary. Vertices (or direction witnesses) at infinity are first moved
/// into finite position through an auxiliary chart.
pub fn angle_at_vertex(tri: &ArcTriangle, index: usize) -> Result<f64> {
    assert!(index < 3);
    if tri.has_infinite_data() {
        let chart = SphereMap::chart_at(tri.auxiliary_pole());
        return angle_at_vertex(&tri.transform(&chart)?, index);
    }
    let v = tri.vertices[index].value().expect("finite by charting");
    let incoming = &tri.sides[(index + 2) % 3];
    let outgoing = &tri.sides[index];
    let w_in = tri.witnesses[(index + 2) % 3].value().expect("finite");
    let w_out = tri.witnesses[index].value().expect("finite");
    let t_out = tangent_towards(outgoing, v, w_out);
    let t_in = tangent_towards(incoming, v, w_in);
    let arrival = -t_in;
    let turn = (t_out / arrival).arg();
    let angle = match tri.orientation {
        Orientation::Left => PI - turn,
        Orientation::Right => PI + turn,
    };
    Ok(angle.rem_euclid(2.0 * PI))
}

/// Unit tangent of the circle at `v`, oriented towards the side of the chord
/// containing `towards`.
fn tangent_towards(circle: &GeneralizedCircle, v: Complex64, towards: Complex64) -> Complex64 {
    let g = circle.gradient(v);
    let t = Complex64::new(0.0, 1.0) * g / g.norm();
    if (t.conj() * (towards - v)).re >= 0.0 {
        t
    } else {
        -t
    }
}

/// The complementary triangle inside the lune spanned by the two circles
/// through the zero-angle vertex: same vertices, same carrying circles, the
/// complementary arcs on the lune sides, and the interior on the opposite
/// side there. Input angles `(0, pi/2, pi/3)` come out as `(0, pi/2, 2pi/3)`.
pub fn complementary_triangle(tri: &ArcTriangle) -> Result<ArcTriangle> {
    let angles = [
        angle_at_vertex(tri, 0)?,
        angle_at_vertex(tri, 1)?,
        angle_at_vertex(tri, 2)?,
    ];
    let z = angles
        .iter()
        .position(|&a| a.min((2.0 * PI - a).abs()) < 1e-6)
        .ok_or(Error::NotALune)?;
    let v = tri.vertices;
    let s = tri.sides;
    let w = tri.witnesses;
    // Indices: side z runs v_z -> v_{z+1}; side z+1 is the opposite side;
    // side z+2 runs v_{z+2} -> v_z. The complementary triangle traverses
    // v_z -> v_{z+2} -> v_{z+1} -> v_z, reusing the opposite arc unchanged
    // and the complementary arcs on the two lune sides.
    let zi = z;
    let z1 = (z + 1) % 3;
    let z2 = (z + 2) % 3;
    Ok(ArcTriangle {
        vertices: [v[zi], v[z2], v[z1]],
        sides: [s[z2], s[z1], s[zi]],
        witnesses: [
            other_arc_point(v[zi], v[z2], w[z2])?,
            w[z1],
            other_arc_point(v[z1], v[zi], w[zi])?,
        ],
        orientation: tri.orientation,
    })
}

/// The four model classes of a triangle with one zero angle and one right
/// angle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriangleClass {
    T0,
    ConjT0,
    T1,
    ConjT1,
}

/// Classify a triangle whose angles match `(0, pi/2, pi/3)` or
/// `(0, pi/2, 2pi/3)` within `tol`, and return the Moebius map carrying its
/// vertices to the model's vertices. Orientation picks the unbarred model
/// exactly when the interior lies on the left of the traversal
/// zero -> right-angle -> third vertex.
pub fn classify_triangle(tri: &ArcTriangle, tol: f64) -> Result<(TriangleClass, SphereMap)> {
    let angles = [
        angle_at_vertex(tri, 0)?,
        angle_at_vertex(tri, 1)?,
        angle_at_vertex(tri, 2)?,
    ];
    let find = |target: f64| -> Option<usize> {
        angles.iter().position(|&a| (a - target).abs() < tol)
    };
    let zero = find(0.0)
        .or_else(|| angles.iter().position(|&a| (a - 2.0 * PI).abs() < tol))
        .ok_or(Error::WrongAngles { angles })?;
    let half = find(PI / 2.0).ok_or(Error::WrongAngles { angles })?;
    if zero == half {
        return Err(Error::WrongAngles { angles });
    }
    let third = 3 - zero - half;
    let acute = (angles[third] - PI / 3.0).abs() < tol;
    let obtuse = (angles[third] - 2.0 * PI / 3.0).abs() < tol;
    if !(acute || obtuse) {
        return Err(Error::WrongAngles { angles });
    }
    // Parity of the permutation (zero, half, third) of (0, 1, 2): cyclic
    // rotations preserve the traversal orientation, transpositions flip it.
    let even = (half + 3 - zero) % 3 == 1;
    let effective = if even { tri.orientation } else { tri.orientation.flipped() };
    let rho = crate::group::rho();
    let i = Complex64::new(0.0, 1.0);
    let (class, model) = match (acute, effective) {
        (true, Orientation::Left) => (
            TriangleClass::T0,
            [SpherePoint::Infinity, SpherePoint::Finite(i), SpherePoint::Finite(rho)],
        ),
        (true, Orientation::Right) => (
            TriangleClass::ConjT0,
            [SpherePoint::Infinity, SpherePoint::Finite(-i), SpherePoint::Finite(rho.conj())],
        ),
        (false, Orientation::Left) => (
            TriangleClass::T1,
            [SpherePoint::Infinity, SpherePoint::Finite(-i), SpherePoint::Finite(rho.conj())],
        ),
        (false, Orientation::Right) => (
            TriangleClass::ConjT1,
            [SpherePoint::Infinity, SpherePoint::Finite(i), SpherePoint::Finite(rho)],
        ),
    };
    let map = mobius_through(
        [tri.vertices[zero], tri.vertices[half], tri.vertices[third]],
        model,
    )?;
    Ok((class, map))
}

/// A closed polyline on the sphere.
#[derive(Debug, Clone)]
pub struct SampledCurve {
    pub points: Vec<SpherePoint>,
}

impl SampledCurve {
    /// Largest chordal gap between consecutive points (including closure).
    pub fn mesh_bound(&self) -> f64 {
        let n = self.points.len();
        (0..n)
            .map(|k| chordal_distance(self.points[k], self.points[(k + 1) % n]))
            .fold(0.0, f64::max)
    }
}

/// Winding number of the closed polyline about `w`: the accumulated turned
/// angle of `point - w`, rounded to the nearest integer. Rounding demands a
/// gap of at least 0.3 from the half-integers.
pub fn winding_number(curve: &SampledCurve, w: Complex64) -> Result<i64> {
    let n = curve.points.len();
    if n < 3 {
        return Err(Error::AmbiguousWinding { value: f64::NAN });
    }
    let mut total = 0.0;
    for k in 0..n {
        let a = match curve.points[k] {
            SpherePoint::Finite(z) => z - w,
            SpherePoint::Infinity => return Err(Error::AmbiguousWinding { value: f64::NAN }),
        };
        let b = match curve.points[(k + 1) % n] {
            SpherePoint::Finite(z) => z - w,
            SpherePoint::Infinity => return Err(Error::AmbiguousWinding { value: f64::NAN }),
        };
        if a.norm() == 0.0 || b.norm() == 0.0 {
            return Err(Error::AmbiguousWinding { value: f64::NAN });
        }
        total += (b / a).arg();
    }
    let turns = total / (2.0 * PI);
    let rounded = turns.round();
    if (turns - rounded).abs() >= 0.3 {
        return Err(Error::AmbiguousWinding { value: turns });
    }
    Ok(rounded as i64)
}
