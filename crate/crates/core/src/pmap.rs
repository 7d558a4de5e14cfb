//! The quasi-period ratio `p(tau) = tau - 6i / (pi E2(tau))` as a map into the
//! Riemann sphere, its derivative `p' = E4 / E2^2`, equivariance and
//! transformation residuals, the weight-2 bound, the axis zero of E2, and
//! inversion of `p` by relocated multistart Newton.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::{tessellate, ExtendedMap, UnimodularMap};
use crate::qforms::{
    eval_e2, eval_e2_deficit, eval_e4, SeriesParams, TauPoint,
};
use crate::sphere::{chordal_distance, SpherePoint};

/// Magnitudes beyond this are folded to the point at infinity.
pub const INFINITY_THRESHOLD: f64 = 1e12;

/// A value of `p` on the Riemann sphere. Zeros of E2 are genuine points of
/// the domain and map to infinity.
#[derive(Debug, Clone, Copy)]
pub struct PValue {
    pub value: Complex64,
    pub at_infinity: bool,
}

impl PValue {
    pub fn sphere(&self) -> SpherePoint {
        if self.at_infinity {
            SpherePoint::Infinity
        } else {
            SpherePoint::Finite(self.value)
        }
    }
}

/// `p(tau) = tau - 6i / (pi E2(tau))`.
pub fn eval_p(tau: TauPoint, params: &SeriesParams) -> Result<PValue> {
    let e2 = eval_e2(tau, params)?.value;
    let correction_norm = 6.0 / (PI * e2.norm());
    if !correction_norm.is_finite() || correction_norm > INFINITY_THRESHOLD {
        return Ok(PValue { value: Complex64::new(f64::INFINITY, f64::INFINITY), at_infinity: true });
    }
    let value = tau.get() - Complex64::new(0.0, 6.0 / PI) / e2;
    Ok(PValue { value, at_infinity: false })
}

/// `p'(tau) = E4(tau) / E2(tau)^2`; fails at the zeros of E2.
pub fn eval_p_prime(tau: TauPoint, params: &SeriesParams) -> Result<Complex64> {
    let e2 = eval_e2(tau, params)?.value;
    if e2.norm() < 1e-14 {
        return Err(Error::DivisionByZero);
    }
    let e4 = eval_e4(tau, params)?.value;
    Ok(e4 / (e2 * e2))
}

/// Chordal distance between `p(g(tau))` and the g-transported `p(tau)`. For
/// holomorphic `g` the transported value is `g(p(tau))`; for reflections it is
/// the conjugate relation `conj(M(p(tau)))` obtained from the Schwarz
/// reflection `p(-conj(tau)) = -conj(p(tau))`.
pub fn equivariance_residual(
    g: &ExtendedMap,
    tau: TauPoint,
    params: &SeriesParams,
) -> Result<f64> {
    let image = g.apply(SpherePoint::Finite(tau.get()));
    let moved = match image {
        SpherePoint::Finite(z) => eval_p(TauPoint::new(z)?, params)?.sphere(),
        SpherePoint::Infinity => SpherePoint::Infinity,
    };
    let p = eval_p(tau, params)?.sphere();
    let transported = if g.is_holomorphic() {
        g.apply(p)
    } else {
        let (a, b, c, d) = g.entries();
        raw_apply(a as f64, b as f64, c as f64, d as f64, p).conj()
    };
    Ok(chordal_distance(moved, transported))
}

fn raw_apply(a: f64, b: f64, c: f64, d: f64, z: SpherePoint) -> SpherePoint {
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

/// `|E2(S tau) - (c tau + d)^2 E2(tau) + (6i/pi) c (c tau + d)|`, the residual
/// of the inhomogeneous weight-2 transformation law.
pub fn e2_transform_residual(
    s: &UnimodularMap,
    tau: TauPoint,
    params: &SeriesParams,
) -> Result<f64> {
    let z = tau.get();
    let (_, _, c, _) = s.entries();
    let j = s.denominator_at(z);
    let moved = eval_e2(TauPoint::new(s.apply_complex(z))?, params)?.value;
    let transported = j * j * eval_e2(tau, params)?.value
        - Complex64::new(0.0, 6.0 / PI) * (c as f64) * j;
    Ok((moved - transported).norm())
}

/// `24|q|/(1-|q|)^3 - |E2(tau) - 1|`: nonnegative wherever the weight-2 bound
/// holds. Expanding `|q|/(1-|q|)^3 = sum T(n) |q|^n` over the triangular
/// numbers splits the margin into two nonnegative parts,
/// `24 sum (T(n) - sigma_1(n)) |q|^n` plus the phase slack
/// `24 sum sigma_1(n) |q|^n - |E2 - 1|`, which keeps the sign meaningful even
/// high on the imaginary axis where both raw terms underflow each other.
pub fn e2_bound_margin(tau: TauPoint, params: &SeriesParams) -> Result<f64> {
    let r = (-2.0 * PI * tau.im()).exp();
    let deficit = eval_e2_deficit(tau, params)?.value.norm();
    let mut gap = 0.0;
    let mut absolute = 0.0;
    let mut rn = 1.0;
    for n in 1..=params.order as u64 {
        rn *= r;
        let term = 24.0 * (n * (n + 1) / 2) as f64 * rn;
        let sigma = 24.0 * divisor_sum_f64(n) * rn;
        gap += term - sigma;
        absolute += sigma;
        // The first strictly positive gap term appears at n = 3; keep
        // summing until the remaining terms cannot move it.
        if term == 0.0 || (gap > 0.0 && term < 1e-18 * gap) {
            break;
        }
    }
    // The slack is nonnegative by the triangle inequality; the two sums come
    // from different summation paths, so clear rounding-level dips without
    // masking a genuine coefficient anomaly.
    let mut slack = absolute - deficit;
    if slack < 0.0 && slack > -1e-12 * absolute {
        slack = 0.0;
    }
    Ok(gap + slack)
}

fn divisor_sum_f64(n: u64) -> f64 {
    let mut total = 0.0;
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            total += d as f64;
            let e = n / d;
            if e != d {
                total += e as f64;
            }
        }
        d += 1;
    }
    total
}

/// The bound term `24|q|/(1-|q|)^3` alone.
pub fn e2_bound_value(tau: TauPoint) -> f64 {
    let q = (-2.0 * PI * tau.im()).exp();
    24.0 * q / (1.0 - q).powi(3)
}

/// Imaginary parts bracketing a sign change of E2 on the imaginary axis,
/// where the series is real.
#[derive(Debug, Clone, Copy)]
pub struct ZeroBracket {
    pub lo: f64,
    pub hi: f64,
}

impl Default for ZeroBracket {
    fn default() -> Self {
        ZeroBracket { lo: 0.5, hi: 1.0 }
    }
}

fn e2_on_axis(s: f64, params: &SeriesParams) -> Result<f64> {
    Ok(eval_e2(TauPoint::new(Complex64::new(0.0, s))?, params)?.value.re)
}

/// Locate the zero of E2 on the positive imaginary axis inside `bracket`:
/// bisection down to 1e-6, then a Newton polish using
/// `D E2 = (E2^2 - E4)/12`.
pub fn find_e2_zero_on_axis(
    bracket: &ZeroBracket,
    tol: f64,
    params: &SeriesParams,
) -> Result<TauPoint> {
    let mut lo = bracket.lo;
    let mut hi = bracket.hi;
    let mut flo = e2_on_axis(lo, params)?;
    let fhi = e2_on_axis(hi, params)?;
    let product = flo * fhi;
    if product >= 0.0 || product.is_nan() {
        return Err(Error::InvalidBracket { lo, hi });
    }
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        let fmid = e2_on_axis(mid, params)?;
        if flo * fmid <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fmid;
        }
    }
    // Newton in s: d/ds E2(is) = -2 pi D E2(is) on the axis.
    let mut s = 0.5 * (lo + hi);
    for _ in 0..60 {
        let t = TauPoint::new(Complex64::new(0.0, s))?;
        let e2 = eval_e2(t, params)?.value.re;
        if e2.abs() < tol {
            return Ok(t);
        }
        let e4 = eval_e4(t, params)?.value.re;
        let de2 = (e2 * e2 - e4) / 12.0;
        let slope = -2.0 * PI * de2;
        if slope == 0.0 {
            break;
        }
        s -= e2 / slope;
    }
    let t = TauPoint::new(Complex64::new(0.0, s))?;
    if eval_e2(t, params)?.value.re.abs() < tol {
        Ok(t)
    } else {
        Err(Error::NotFound { diagnostics: format!("Newton stalled at s = {s}") })
    }
}

/// One damped Newton run for `p(tau) = target`, confined to the upper
/// half-plane. Step halving (at most 50 times per iteration) guards the
/// critical point where `p'` vanishes.
fn newton_for_p(
    start: Complex64,
    target: Complex64,
    tol: f64,
    params: &SeriesParams,
) -> Option<Complex64> {
    let mut z = start;
    let mut residual = f64::INFINITY;
    for _ in 0..80 {
        let t = TauPoint::new(z).ok()?;
        let pv = eval_p(t, params).ok()?;
        if pv.at_infinity {
            return None;
        }
        let f = pv.value - target;
        residual = chordal_distance(
            SpherePoint::Finite(pv.value),
            SpherePoint::Finite(target),
        );
        if residual < tol {
            return Some(z);
        }
        let deriv = eval_p_prime(t, params).ok()?;
        if deriv.norm() < 1e-300 {
            return None;
        }
        let mut step = f / deriv;
        let mut halvings = 0;
        loop {
            let candidate = z - step;
            if candidate.im > 0.0 {
                if let Ok(ct) = TauPoint::new(candidate) {
                    if let Ok(cp) = eval_p(ct, params) {
                        if !cp.at_infinity && (cp.value - target).norm() <= f.norm() {
                            z = candidate;
                            break;
                        }
                    }
                }
            }
            step *= 0.5;
            halvings += 1;
            if halvings > 50 {
                return None;
            }
        }
    }
    if residual < tol {
        Some(z)
    } else {
        None
    }
}

/// Seeds spread over the interior of the fundamental triangle and its mirror.
const NEWTON_SEEDS: [(f64, f64); 6] = [
    (0.2, 1.2),
    (0.35, 1.05),
    (0.05, 1.6),
    (-0.2, 1.2),
    (-0.35, 1.05),
    (0.25, 2.5),
];

/// Find up to `count` distinct solutions of `p(tau) = w`. Candidate relocation
/// maps are the holomorphic tessellation words up to depth 6: for each `S`,
/// Newton targets `S^{-1}(w)` from seeds near the fundamental domain, and a
/// found root `tau0` relocates to `S(tau0)`. Results are sorted before
/// deduplication, so the output is deterministic.
pub fn invert_p(
    w: SpherePoint,
    count: usize,
    tol: f64,
    params: &SeriesParams,
) -> Result<Vec<TauPoint>> {
    let words = tessellate(6);
    let mut solutions: Vec<Complex64> = Vec::new();
    let mut attempts = 0usize;
    let mut converged = 0usize;
    for word in &words {
        let s = match word.as_unimodular() {
            Some(s) => s,
            None => continue,
        };
        let local_target = match s.inverse().apply(w) {
            SpherePoint::Finite(z) => z,
            SpherePoint::Infinity => continue,
        };
        // p maps the fundamental domain into |Re| <= 1/2; targets far outside
        // that strip cannot be reached from these seeds.
        if local_target.re.abs() > 0.75 || local_target.norm() > 50.0 {
            continue;
        }
        for (re, im) in NEWTON_SEEDS {
            attempts += 1;
            if let Some(root) = newton_for_p(Complex64::new(re, im), local_target, tol, params) {
                converged += 1;
                let relocated = s.apply_complex(root);
                if relocated.im > 0.0 {
                    let check = eval_p(TauPoint::new(relocated)?, params)?;
                    if chordal_distance(check.sphere(), w) < tol {
                        solutions.push(relocated);
                    }
                }
            }
        }
    }
    if solutions.is_empty() {
        return Err(Error::NotFound {
            diagnostics: format!(
                "{attempts} Newton starts over {} relocation words, {converged} converged, none verified",
                words.len()
            ),
        });
    }
    // Highest points first: the representative inside the fundamental domain
    // precedes its relocations.
    solutions.sort_by(|a, b| {
        (b.im, a.re)
            .partial_cmp(&(a.im, b.re))
            .expect("finite values")
    });
    let mut distinct: Vec<Complex64> = Vec::new();
    for z in solutions {
        if distinct.iter().all(|s| (s - z).norm() > 10.0 * tol) {
            distinct.push(z);
        }
        if distinct.len() == count {
            break;
        }
    }
    distinct.into_iter().map(TauPoint::new).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::rho;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn tau(re: f64, im: f64) -> TauPoint {
        TauPoint::new(Complex64::new(re, im)).unwrap()
    }

    const P: SeriesParams = SeriesParams { order: 400, tol: 1e-13 };

    #[test]
    fn special_values_of_p() {
        let at_i = eval_p(tau(0.0, 1.0), &P).unwrap();
        assert!(
            chordal_distance(at_i.sphere(), SpherePoint::finite(0.0, -1.0)) < 1e-12
        );
        let r = rho();
        let at_rho = eval_p(tau(r.re, r.im), &P).unwrap();
        assert!(chordal_distance(at_rho.sphere(), SpherePoint::Finite(r.conj())) < 1e-12);
        let far = eval_p(tau(0.0, 10.0), &P).unwrap();
        let expected = Complex64::new(0.0, 10.0 - 6.0 / PI);
        assert!((far.value - expected).norm() < 1e-10);
    }

    #[test]
    fn p_prime_values() {
        let r = rho();
        assert!(eval_p_prime(tau(r.re, r.im), &P).unwrap().norm() < 1e-8);
        let far = eval_p_prime(tau(0.0, 40.0), &P).unwrap();
        assert!((far - Complex64::new(1.0, 0.0)).norm() < 1e-30);
        // Central finite difference as an oracle at tau = 1.3i.
        let h = 1e-4;
        let up = eval_p(tau(0.0, 1.3 + h), &P).unwrap().value;
        let dn = eval_p(tau(0.0, 1.3 - h), &P).unwrap().value;
        let fd = (up - dn) / Complex64::new(0.0, 2.0 * h);
        let exact = eval_p_prime(tau(0.0, 1.3), &P).unwrap();
        assert!((fd - exact).norm() < 1e-6);
    }

    #[test]
    fn equivariance() {
        assert_eq!(
            equivariance_residual(&ExtendedMap::IDENTITY, tau(0.3, 1.4), &P).unwrap(),
            0.0
        );
        let s = ExtendedMap::from_unimodular(&UnimodularMap::S);
        assert!(equivariance_residual(&s, tau(0.0, 1.2), &P).unwrap() < 1e-10);
        let ra = ExtendedMap::REFLECT_IMAG_AXIS;
        assert!(equivariance_residual(&ra, tau(0.2, 1.5), &P).unwrap() < 1e-10);
    }

    #[test]
    fn e2_transformation_residuals() {
        assert!(e2_transform_residual(&UnimodularMap::T, tau(0.3, 1.1), &P).unwrap() < 1e-13);
        // Both sides equal 3/pi at tau = i under the inversion.
        assert!(e2_transform_residual(&UnimodularMap::S, tau(0.0, 1.0), &P).unwrap() < 1e-10);
        let lower = UnimodularMap::new(1, 0, 1, 1).unwrap();
        assert!(e2_transform_residual(&lower, tau(0.3, 1.1), &P).unwrap() < 1e-9);
    }

    #[test]
    fn weight_two_bound() {
        let at_corner = tau(0.0, 3f64.sqrt() / 2.0);
        assert!((e2_bound_value(at_corner) - 0.105).abs() < 1e-3);
        assert!(e2_bound_margin(at_corner, &P).unwrap() > 0.0);
        let at_2i = tau(0.0, 2.0);
        assert!(e2_bound_margin(at_2i, &P).unwrap() > 0.0);
        assert!(eval_e2_deficit(at_2i, &P).unwrap().value.norm() < 1e-4);
        let at_10i = tau(0.0, 10.0);
        assert!(e2_bound_value(at_10i) < 1e-25);
        assert!(eval_e2_deficit(at_10i, &P).unwrap().value.norm() < 1e-25);
        assert!(e2_bound_margin(at_10i, &P).unwrap() > 0.0);
    }

    #[test]
    fn axis_zero_of_e2() {
        // Bracket validity: E2(i) = 3/pi > 0, E2(i/2) < 0.
        assert!(e2_on_axis(1.0, &P).unwrap() > 0.0);
        let low = e2_on_axis(0.5, &P).unwrap();
        assert!(low < 0.0);
        assert!((low - (-0.18)).abs() < 0.01);
        let zero = find_e2_zero_on_axis(&ZeroBracket::default(), 1e-12, &P).unwrap();
        let s = zero.im();
        assert!(s > 0.5 && s < 1.0);
        assert!(eval_e2(zero, &P).unwrap().value.norm() < 1e-12);
        // Regression pin: the value this artifact derived for the axis zero.
        assert!((s - 0.523_521_700_017_998_6).abs() < 1e-12);
        assert!(matches!(
            find_e2_zero_on_axis(&ZeroBracket { lo: 1.0, hi: 2.0 }, 1e-12, &P),
            Err(Error::InvalidBracket { .. })
        ));
    }

    #[test]
    fn singly_periodic_lattice_at_the_axis_zero() {
        use crate::lattice::{quasi_periods_modular, Lattice};
        let zero = find_e2_zero_on_axis(&ZeroBracket::default(), 1e-13, &P).unwrap();
        let lat = Lattice::new(zero.get(), Complex64::new(1.0, 0.0)).unwrap();
        let qp = quasi_periods_modular(&lat, &P).unwrap();
        assert!(qp.eta2.norm() < 1e-10);
        assert!((qp.eta1 + Complex64::new(0.0, 2.0 * PI)).norm() < 1e-10);
    }

    #[test]
    fn invert_recovers_vertices() {
        let sols = invert_p(SpherePoint::finite(0.0, -1.0), 3, 1e-9, &P).unwrap();
        assert!(sols
            .iter()
            .any(|t| (t.get() - Complex64::new(0.0, 1.0)).norm() < 1e-6));
        let r = rho();
        let sols = invert_p(SpherePoint::Finite(r.conj()), 3, 1e-9, &P).unwrap();
        assert!(sols.iter().any(|t| (t.get() - r).norm() < 1e-3));
    }

    #[test]
    fn invert_finds_distinct_preimages() {
        let w = SpherePoint::finite(0.2, 2.0);
        let sols = invert_p(w, 3, 1e-9, &P).unwrap();
        assert_eq!(sols.len(), 3);
        for (i, a) in sols.iter().enumerate() {
            let pv = eval_p(*a, &P).unwrap();
            assert!(chordal_distance(pv.sphere(), w) < 1e-9);
            for b in sols.iter().skip(i + 1) {
                assert!((a.get() - b.get()).norm() > 1e-8);
            }
        }
    }

    #[test]
    fn p_has_no_fixed_points() {
        let mut rng = StdRng::seed_from_u64(31);
        for _ in 0..50 {
            let t = tau(rng.gen_range(-0.5..0.5), rng.gen_range(0.6..2.5));
            let pv = eval_p(t, &P).unwrap();
            if pv.at_infinity {
                continue;
            }
            let e2 = eval_e2(t, &P).unwrap().value;
            let gap = (pv.value - t.get()).norm();
            assert!((gap - 6.0 / (PI * e2.norm())).abs() < 1e-10);
            assert!(gap > 0.0);
        }
    }

    #[test]
    fn critical_points_are_the_rho_orbit() {
        use crate::group::is_rho_equivalent;
        let r = rho();
        assert!(eval_p_prime(tau(r.re, r.im), &P).unwrap().norm() < 1e-8);
        assert!(eval_p_prime(tau(r.re + 1.0, r.im), &P).unwrap().norm() < 1e-8);
        let mut rng = StdRng::seed_from_u64(32);
        let mut checked = 0;
        while checked < 50 {
            let t = tau(rng.gen_range(-0.5..0.5), rng.gen_range(0.7..2.0));
            if is_rho_equivalent(t, 0.05) {
                continue;
            }
            assert!(eval_p_prime(t, &P).unwrap().norm() > 1e-3);
            checked += 1;
        }
    }

    #[test]
    fn boundary_characterisations() {
        let mut rng = StdRng::seed_from_u64(33);
        for _ in 0..100 {
            let im = rng.gen_range(1.0..6.0);
            let on_axis = eval_p(tau(0.0, im), &P).unwrap().value;
            assert!(on_axis.re.abs() < 1e-10);
            let on_half = eval_p(tau(0.5, im.max(0.9)), &P).unwrap().value;
            assert!((on_half.re - 0.5).abs() < 1e-10);
            let theta = rng.gen_range(PI / 3.0..PI / 2.0);
            let on_arc = eval_p(tau(theta.cos(), theta.sin()), &P).unwrap().value;
            assert!((on_arc.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn equivariance_over_random_words() {
        let mut rng = StdRng::seed_from_u64(34);
        let words = tessellate(4);
        for _ in 0..100 {
            let g = words[rng.gen_range(0..words.len())];
            let t = tau(rng.gen_range(-0.5..0.5), rng.gen_range(0.9..2.5));
            assert!(equivariance_residual(&g, t, &P).unwrap() < 1e-9);
        }
    }
}
