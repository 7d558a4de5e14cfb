//! The modular group, the extended reflection group generated by the sides of
//! the fundamental triangle, fundamental-domain reduction, and tessellation.

use std::collections::HashSet;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qforms::TauPoint;
use crate::sphere::SpherePoint;

/// An element of PSL2(Z): an integer matrix with determinant one, stored with
/// a canonical sign so that `M` and `-M` compare equal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct UnimodularMap {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

fn canonical_sign(a: i64, b: i64, c: i64, d: i64) -> (i64, i64, i64, i64) {
    if c > 0 || (c == 0 && d > 0) {
        (a, b, c, d)
    } else {
        (-a, -b, -c, -d)
    }
}

impl UnimodularMap {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if a.checked_mul(d)
            .zip(b.checked_mul(c))
            .and_then(|(ad, bc)| ad.checked_sub(bc))
            != Some(1)
        {
            return Err(Error::Overflow);
        }
        let (a, b, c, d) = canonical_sign(a, b, c, d);
        Ok(UnimodularMap { a, b, c, d })
    }

    pub const IDENTITY: UnimodularMap = UnimodularMap { a: 1, b: 0, c: 0, d: 1 };
    /// The translation `z -> z + 1`.
    pub const T: UnimodularMap = UnimodularMap { a: 1, b: 1, c: 0, d: 1 };
    /// The inversion `z -> -1/z`.
    pub const S: UnimodularMap = UnimodularMap { a: 0, b: -1, c: 1, d: 0 };

    pub fn entries(&self) -> (i64, i64, i64, i64) {
        (self.a, self.b, self.c, self.d)
    }

    /// `z -> z + n`.
    pub fn translation(n: i64) -> Self {
        let (a, b, c, d) = canonical_sign(1, n, 0, 1);
        UnimodularMap { a, b, c, d }
    }

    pub fn inverse(&self) -> Self {
        let (a, b, c, d) = canonical_sign(self.d, -self.b, -self.c, self.a);
        UnimodularMap { a, b, c, d }
    }

    pub fn mul(&self, rhs: &UnimodularMap) -> Self {
        let (a, b, c, d) = canonical_sign(
            self.a * rhs.a + self.b * rhs.c,
            self.a * rhs.b + self.b * rhs.d,
            self.c * rhs.a + self.d * rhs.c,
            self.c * rhs.b + self.d * rhs.d,
        );
        UnimodularMap { a, b, c, d }
    }

    /// Fractional-linear action on the extended plane.
    pub fn apply(&self, z: SpherePoint) -> SpherePoint {
        apply_fractional_linear(
            self.a as f64,
            self.b as f64,
            self.c as f64,
            self.d as f64,
            z,
        )
    }

    /// Fractional-linear action on a finite point known to stay finite.
    pub fn apply_complex(&self, z: Complex64) -> Complex64 {
        let num = Complex64::new(self.a as f64, 0.0) * z + self.b as f64;
        let den = Complex64::new(self.c as f64, 0.0) * z + self.d as f64;
        num / den
    }

    /// `c z + d`, the denominator of the action at `z`.
    pub fn denominator_at(&self, z: Complex64) -> Complex64 {
        Complex64::new(self.c as f64, 0.0) * z + self.d as f64
    }
}

fn apply_fractional_linear(a: f64, b: f64, c: f64, d: f64, z: SpherePoint) -> SpherePoint {
    match z {
        SpherePoint::Infinity => {
            if c == 0.0 {
                SpherePoint::Infinity
            } else {
                SpherePoint::Finite(Complex64::new(a / c, 0.0))
            }
        }
        SpherePoint::Finite(z) => {
            let den = c * z + d;
            if den.norm() == 0.0 {
                SpherePoint::Infinity
            } else {
                SpherePoint::Finite((a * z + b) / den)
            }
        }
    }
}

/// An element of the group generated by the reflections in the sides of the
/// fundamental triangle: an integer matrix together with a flag that applies
/// `z -> conj(z)` before the fractional-linear action. The determinant is +1
/// exactly when the flag is off, so the composite always preserves the upper
/// half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExtendedMap {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
    conjugate_first: bool,
}

impl ExtendedMap {
    pub fn new(a: i64, b: i64, c: i64, d: i64, conjugate_first: bool) -> Result<Self> {
        let det = a * d - b * c;
        let expected = if conjugate_first { -1 } else { 1 };
        if det != expected {
            return Err(Error::Overflow);
        }
        let (a, b, c, d) = canonical_sign(a, b, c, d);
        Ok(ExtendedMap { a, b, c, d, conjugate_first })
    }

    pub const IDENTITY: ExtendedMap =
        ExtendedMap { a: 1, b: 0, c: 0, d: 1, conjugate_first: false };
    /// Reflection in the imaginary axis, `z -> -conj(z)`.
    pub const REFLECT_IMAG_AXIS: ExtendedMap =
        ExtendedMap { a: -1, b: 0, c: 0, d: 1, conjugate_first: true };
    /// Reflection in the unit circle, `z -> 1/conj(z)`.
    pub const REFLECT_UNIT_CIRCLE: ExtendedMap =
        ExtendedMap { a: 0, b: 1, c: 1, d: 0, conjugate_first: true };
    /// Reflection in the line Re(z) = 1/2, `z -> 1 - conj(z)`.
    pub const REFLECT_RE_HALF: ExtendedMap =
        ExtendedMap { a: -1, b: 1, c: 0, d: 1, conjugate_first: true };

    pub fn entries(&self) -> (i64, i64, i64, i64) {
        (self.a, self.b, self.c, self.d)
    }

    pub fn conjugate_first(&self) -> bool {
        self.conjugate_first
    }

    pub fn is_holomorphic(&self) -> bool {
        !self.conjugate_first
    }

    /// The underlying element of PSL2(Z), when the map is holomorphic.
    pub fn as_unimodular(&self) -> Option<UnimodularMap> {
        if self.conjugate_first {
            None
        } else {
            Some(UnimodularMap { a: self.a, b: self.b, c: self.c, d: self.d })
        }
    }

    pub fn from_unimodular(m: &UnimodularMap) -> Self {
        ExtendedMap { a: m.a, b: m.b, c: m.c, d: m.d, conjugate_first: false }
    }

    /// Composition `self . other` (apply `other` first). The matrices multiply
    /// unchanged because all entries are real; the conjugation flags combine
    /// by parity.
    pub fn compose(&self, other: &ExtendedMap) -> Self {
        let (a, b, c, d) = canonical_sign(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        );
        ExtendedMap { a, b, c, d, conjugate_first: self.conjugate_first ^ other.conjugate_first }
    }

    pub fn inverse(&self) -> Self {
        let (a, b, c, d) = if self.conjugate_first {
            // det = -1, so the adjugate has determinant -1 again.
            canonical_sign(-self.d, self.b, self.c, -self.a)
        } else {
            canonical_sign(self.d, -self.b, -self.c, self.a)
        };
        ExtendedMap { a, b, c, d, conjugate_first: self.conjugate_first }
    }

    pub fn apply(&self, z: SpherePoint) -> SpherePoint {
        let z = if self.conjugate_first { z.conj() } else { z };
        apply_fractional_linear(
            self.a as f64,
            self.b as f64,
            self.c as f64,
            self.d as f64,
            z,
        )
    }

    pub fn apply_complex(&self, z: Complex64) -> Complex64 {
        let z = if self.conjugate_first { z.conj() } else { z };
        let num = Complex64::new(self.a as f64, 0.0) * z + self.b as f64;
        let den = Complex64::new(self.c as f64, 0.0) * z + self.d as f64;
        num / den
    }
}

impl std::ops::Mul for ExtendedMap {
    type Output = ExtendedMap;
    fn mul(self, rhs: ExtendedMap) -> ExtendedMap {
        self.compose(&rhs)
    }
}

/// Result of Gauss reduction: `map` satisfies `map(tau_reduced) = tau_input`.
#[derive(Debug, Clone, Copy)]
pub struct ReductionResult {
    pub tau_reduced: TauPoint,
    pub map: UnimodularMap,
}

const REDUCTION_MAX_STEPS: usize = 1_000_000;

/// Reduce a point of the upper half-plane into the closed fundamental domain
/// `{ |Re| <= 1/2, |tau| >= 1 }` by alternating integer translations and the
/// inversion `z -> -1/z`. No tie-break is made between boundary-equivalent
/// representatives; the loop returns whichever one it lands on.
pub fn reduce_to_fundamental(tau: TauPoint) -> Result<ReductionResult> {
    let mut z = tau.get();
    let mut map = UnimodularMap::IDENTITY;
    for _ in 0..REDUCTION_MAX_STEPS {
        let n = z.re.round();
        if n != 0.0 {
            z -= n;
            map = map.mul(&UnimodularMap::translation(n as i64));
        }
        // Points within one ulp of the unit circle count as reduced; exact
        // corners would otherwise ping-pong between equivalent boundary
        // representatives forever.
        if z.norm_sqr() < 1.0 - 1e-15 {
            // z = S(z') with z' the next iterate, and S is its own inverse in PSL2.
            z = -z.finv();
            map = map.mul(&UnimodularMap::S);
        } else {
            return Ok(ReductionResult { tau_reduced: TauPoint::new(z)?, map });
        }
    }
    Err(Error::IterationLimit)
}

/// The corner `rho = (1 + i sqrt(3)) / 2` of the fundamental domain.
pub fn rho() -> Complex64 {
    Complex64::new(0.5, 3f64.sqrt() / 2.0)
}

/// Whether `tau` is equivalent to `rho` under the modular group: its reduced
/// representative lies within `tol` of `rho` or of `rho - 1`, the two corners
/// of the closed fundamental domain in that orbit.
pub fn is_rho_equivalent(tau: TauPoint, tol: f64) -> bool {
    match reduce_to_fundamental(tau) {
        Ok(res) => {
            let z = res.tau_reduced.get();
            let r = rho();
            (z - r).norm() <= tol || (z - (r - 1.0)).norm() <= tol
        }
        Err(_) => false,
    }
}

/// All distinct words of length at most `depth` in the three side reflections,
/// deduplicated by canonical matrix form. Word length zero contributes the
/// identity; the output is in breadth-first order.
pub fn tessellate(depth: usize) -> Vec<ExtendedMap> {
    let generators = [
        ExtendedMap::REFLECT_IMAG_AXIS,
        ExtendedMap::REFLECT_UNIT_CIRCLE,
        ExtendedMap::REFLECT_RE_HALF,
    ];
    let mut seen: HashSet<ExtendedMap> = HashSet::new();
    let mut out = vec![ExtendedMap::IDENTITY];
    seen.insert(ExtendedMap::IDENTITY);
    let mut frontier = vec![ExtendedMap::IDENTITY];
    for _ in 0..depth {
        let mut next = Vec::new();
        for w in &frontier {
            for g in &generators {
                let candidate = w.compose(g);
                if seen.insert(candidate) {
                    out.push(candidate);
                    next.push(candidate);
                }
            }
        }
        frontier = next;
    }
    out
}
