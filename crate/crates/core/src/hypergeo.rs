//! Normalised periods and quasi-periods, the first-order system linking them
//! in the J-variable, residual checks for the associated hypergeometric
//! equations, Schwarz triangle angles, and Schwarzian derivatives.
//!
//! Everything here is evaluated pointwise in tau, where all the fixed-branch
//! roots are single-valued; derivatives with respect to J are formed as
//! `(d/dtau) / (dJ/dtau)`, so no local inverse of J is ever constructed.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::is_rho_equivalent;
use crate::qforms::{
    delta_root, eval_e2, eval_e2_deficit, eval_e4, eval_delta, eval_j, eval_j_cbrt,
    eval_jm1_sqrt, nome, DeltaMethod, SeriesParams, TauPoint,
};
use crate::series::{convolve, divisor_power_sums, eta_power_coeffs, Kahan};

/// Minimum imaginary part for the direct-series regime used here.
pub const DIRECT_REGIME: f64 = 0.35;

/// Exclusion radius around the singular values J = 0 and J = 1.
pub const J_EXCLUSION: f64 = 1e-2;

/// Which member of a fundamental pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeriodIndex {
    First,
    Second,
}

/// Which fundamental system the hypergeometric residual targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OdeFamily {
    /// The normalised quasi-periods H1, H2.
    H,
    /// The normalised periods Omega1, Omega2.
    Omega,
}

/// The normalised periods `Omega_k` and quasi-periods `H_k` at a point.
/// `Omega1/Omega2 = tau` holds by construction and `H1/H2 = p(tau)`.
#[derive(Debug, Clone, Copy)]
pub struct NormalizedPeriods {
    pub omega1: Complex64,
    pub omega2: Complex64,
    pub h1: Complex64,
    pub h2: Complex64,
    pub tau: TauPoint,
}

impl NormalizedPeriods {
    pub fn omega(&self, k: PeriodIndex) -> Complex64 {
        match k {
            PeriodIndex::First => self.omega1,
            PeriodIndex::Second => self.omega2,
        }
    }

    pub fn h(&self, k: PeriodIndex) -> Complex64 {
        match k {
            PeriodIndex::First => self.h1,
            PeriodIndex::Second => self.h2,
        }
    }
}

/// Parameters of a hypergeometric equation in the normal form
/// `w'' + ((z(1+a+b) - c) / (z(z-1))) w' + (a b / (z(z-1))) w = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypergeomCoeffs {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl HypergeomCoeffs {
    /// Degenerate parameter sets (gamma a non-positive integer) are allowed
    /// but flagged; the triangle-angle formulas still apply formally.
    pub fn is_degenerate(&self) -> bool {
        self.gamma <= 0.0 && (self.gamma - self.gamma.round()).abs() < 1e-12
    }
}

/// Angles of the Schwarz triangle attached to a hypergeometric equation, in
/// units of pi.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleAngles {
    pub lambda: f64,
    pub mu: f64,
    pub nu: f64,
}

/// `(lambda, mu, nu) = (1 - gamma, gamma - alpha - beta, alpha - beta)`.
pub fn triangle_params(coeffs: &HypergeomCoeffs) -> TriangleAngles {
    TriangleAngles {
        lambda: 1.0 - coeffs.gamma,
        mu: coeffs.gamma - coeffs.alpha - coeffs.beta,
        nu: coeffs.alpha - coeffs.beta,
    }
}

/// `Omega1 = tau Delta^(1/12)`, `Omega2 = Delta^(1/12)`,
/// `H1 = (tau E2 - 6i/pi) / Delta^(1/12)`, `H2 = E2 / Delta^(1/12)`, on the
/// product-form branch of the root.
pub fn eval_normalized(tau: TauPoint, params: &SeriesParams) -> Result<NormalizedPeriods> {
    if tau.im() < DIRECT_REGIME {
        return Err(Error::OutOfRegime { im: tau.im() });
    }
    let root = delta_root(tau, 12, params)?.value;
    let e2 = eval_e2(tau, params)?.value;
    let z = tau.get();
    let omega2 = root;
    let omega1 = z * root;
    let h2 = e2 / root;
    let h1 = (z * e2 - Complex64::new(0.0, 6.0 / PI)) / root;
    Ok(NormalizedPeriods { omega1, omega2, h1, h2, tau })
}

/// Coefficient arrays for the q-expansions of `Delta^(1/12)` (offset 1/12),
/// `Delta^(-1/12)` (offset -1/12) and `E2 Delta^(-1/12)` (offset -1/12).
struct PeriodSeries {
    omega2: Vec<f64>,
    inv_root: Vec<f64>,
    h2: Vec<f64>,
}

fn period_series(order: usize) -> PeriodSeries {
    let omega2 = eta_power_coeffs(2, order);
    let inv_root = eta_power_coeffs(-2, order);
    let sigma1 = divisor_power_sums(1, order);
    let mut e2 = vec![0.0; order + 1];
    e2[0] = 1.0;
    for n in 1..=order {
        e2[n] = -24.0 * sigma1[n];
    }
    let h2 = convolve(&e2, &inv_root, order);
    PeriodSeries { omega2, inv_root, h2 }
}

/// Value and the first two normalised derivatives of
/// `q^offset sum c_n q^n`, differentiated coefficientwise:
/// `D^m f = sum c_n (n + offset)^m q^(n + offset)`.
fn frac_series_derivs(
    coeffs: &[f64],
    offset: f64,
    tau: TauPoint,
) -> (Complex64, Complex64, Complex64) {
    let q = nome(tau);
    let prefactor = (Complex64::new(0.0, 2.0 * PI * offset) * tau.get()).exp();
    let mut f = Kahan::new();
    let mut df = Kahan::new();
    let mut d2f = Kahan::new();
    let mut qn = Complex64::new(1.0, 0.0);
    for (n, &c) in coeffs.iter().enumerate() {
        let e = n as f64 + offset;
        let term = qn * c;
        f.add(term);
        df.add(term * e);
        d2f.add(term * (e * e));
        qn *= q;
    }
    (prefactor * f.value(), prefactor * df.value(), prefactor * d2f.value())
}

/// Values and first two D-derivatives of one period pair `(Omega_k, H_k)`,
/// with the explicit tau-prefactors of the first member handled by the
/// product rule.
struct PairDerivs {
    omega: [Complex64; 3],
    h: [Complex64; 3],
}

fn pair_derivs(tau: TauPoint, k: PeriodIndex, order: usize) -> PairDerivs {
    let series = period_series(order);
    let c = Complex64::new(0.0, -1.0 / (2.0 * PI)); // 1/(2 pi i)
    let (o2, do2, d2o2) = frac_series_derivs(&series.omega2, 1.0 / 12.0, tau);
    let (h2, dh2, d2h2) = frac_series_derivs(&series.h2, -1.0 / 12.0, tau);
    match k {
        PeriodIndex::Second => PairDerivs { omega: [o2, do2, d2o2], h: [h2, dh2, d2h2] },
        PeriodIndex::First => {
            let z = tau.get();
            let (g, dg, d2g) = frac_series_derivs(&series.inv_root, -1.0 / 12.0, tau);
            let m6i = Complex64::new(0.0, -6.0 / PI);
            PairDerivs {
                omega: [
                    z * o2,
                    z * do2 + c * o2,
                    z * d2o2 + 2.0 * c * do2,
                ],
                h: [
                    z * h2 + m6i * g,
                    z * dh2 + c * h2 + m6i * dg,
                    z * d2h2 + 2.0 * c * dh2 + m6i * d2g,
                ],
            }
        }
    }
}

/// Branch-coherent fixed powers of J at a point, with `D J` and `D^2 J` from
/// the closed form `D J = -2 sqrt(3) (J^(1/3))^2 (J-1)^(1/2) Delta^(1/6)`.
struct JFrame {
    j: Complex64,
    cbrt: Complex64,
    sqrt_jm1: Complex64,
    dj: Complex64,
    d2j: Complex64,
}

fn j_frame(tau: TauPoint, params: &SeriesParams) -> Result<JFrame> {
    let j = eval_j(tau, params)?.value;
    if j.norm() < J_EXCLUSION || (j - 1.0).norm() < J_EXCLUSION {
        return Err(Error::SingularPoint { j });
    }
    let cbrt = eval_j_cbrt(tau, params)?.value;
    let sqrt_jm1 = eval_jm1_sqrt(tau, params)?.value;
    let d6 = delta_root(tau, 6, params)?.value;
    let e2 = eval_e2(tau, params)?.value;
    let scale = Complex64::new(-2.0 * 3f64.sqrt(), 0.0);
    let dj = scale * cbrt * cbrt * sqrt_jm1 * d6;
    // Differentiate the product: D(J^(1/3)) = DJ/(3 J^(2/3)),
    // D((J-1)^(1/2)) = DJ/(2 (J-1)^(1/2)), D(Delta^(1/6)) = Delta^(1/6) E2 / 6.
    let d_cbrt = dj / (3.0 * cbrt * cbrt);
    let d_sqrt = dj / (2.0 * sqrt_jm1);
    let d_d6 = d6 * e2 / 6.0;
    let d2j = scale
        * (2.0 * cbrt * d_cbrt * sqrt_jm1 * d6
            + cbrt * cbrt * d_sqrt * d6
            + cbrt * cbrt * sqrt_jm1 * d_d6);
    Ok(JFrame { j, cbrt, sqrt_jm1, dj, d2j })
}

fn check_regime(tau: TauPoint) -> Result<()> {
    if tau.im() < DIRECT_REGIME {
        Err(Error::OutOfRegime { im: tau.im() })
    } else {
        Ok(())
    }
}

/// Residuals of the first-order system
/// `dOmega_k/dJ = -(1/(24 sqrt 3)) J^(-2/3) (J-1)^(-1/2) H_k` and
/// `dH_k/dJ = (1/(2 sqrt 3)) J^(-1/3) (J-1)^(-1/2) Omega_k`,
/// with the tau-derivatives taken termwise and `dJ/dtau` in closed form.
pub fn first_order_residual(
    tau: TauPoint,
    k: PeriodIndex,
    params: &SeriesParams,
) -> Result<(f64, f64)> {
    check_regime(tau)?;
    let frame = j_frame(tau, params)?;
    let pair = pair_derivs(tau, k, params.order);
    let d_omega_dj = pair.omega[1] / frame.dj;
    let d_h_dj = pair.h[1] / frame.dj;
    let inv_j23_sqrt = (frame.cbrt * frame.cbrt * frame.sqrt_jm1).finv();
    let inv_j13_sqrt = (frame.cbrt * frame.sqrt_jm1).finv();
    let res1 =
        (d_omega_dj + inv_j23_sqrt * pair.h[0] / (24.0 * 3f64.sqrt())).norm();
    let res2 = (d_h_dj - inv_j13_sqrt * pair.omega[0] / (2.0 * 3f64.sqrt())).norm();
    Ok((res1, res2))
}

/// The first-order coefficient of the hypergeometric equation in `J` for the
/// given family: `(5J-2)/(6J(J-1))` for the quasi-periods and
/// `(7J-4)/(6J(J-1))` for the periods.
pub fn ode_friction_coefficient(family: OdeFamily, j: Complex64) -> Complex64 {
    let den = 6.0 * j * (j - 1.0);
    match family {
        OdeFamily::H => (5.0 * j - 2.0) / den,
        OdeFamily::Omega => (7.0 * j - 4.0) / den,
    }
}

/// Relative residual of the second-order equation satisfied by the chosen
/// family, with `w' = Dw/DJ` and `w''` obtained by differentiating that
/// quotient once more through tau.
pub fn hypergeom_residual(
    tau: TauPoint,
    k: PeriodIndex,
    family: OdeFamily,
    params: &SeriesParams,
) -> Result<f64> {
    check_regime(tau)?;
    let frame = j_frame(tau, params)?;
    let pair = pair_derivs(tau, k, params.order);
    let [w, dw, d2w] = match family {
        OdeFamily::H => pair.h,
        OdeFamily::Omega => pair.omega,
    };
    let w1 = dw / frame.dj;
    let w2 = (d2w * frame.dj - dw * frame.d2j) / (frame.dj * frame.dj * frame.dj);
    let c1 = ode_friction_coefficient(family, frame.j);
    let c0 = (144.0 * frame.j * (frame.j - 1.0)).finv();
    let terms = [w2, c1 * w1, c0 * w];
    let scale = terms.iter().map(|t| t.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(0.0);
    }
    Ok((terms[0] + terms[1] + terms[2]).norm() / scale)
}

/// Closed-form Schwarzian of a Schwarz triangle map with the given angles:
/// `(1-l^2)/(2z^2) + (1-m^2)/(2(1-z)^2) + (1-l^2-m^2+n^2)/(2z(1-z))`.
pub fn schwarzian_closed(angles: &TriangleAngles, z: Complex64) -> Result<Complex64> {
    if z.norm() == 0.0 || (z - 1.0).norm() == 0.0 {
        return Err(Error::SingularPoint { j: z });
    }
    let l2 = angles.lambda * angles.lambda;
    let m2 = angles.mu * angles.mu;
    let n2 = angles.nu * angles.nu;
    Ok((1.0 - l2) / (2.0 * z * z)
        + (1.0 - m2) / (2.0 * (1.0 - z) * (1.0 - z))
        + (1.0 - l2 - m2 + n2) / (2.0 * z * (1.0 - z)))
}

/// Plain 5-point finite-difference Schwarzian of an arbitrary evaluator.
pub fn fd_schwarzian<F: Fn(Complex64) -> Complex64>(f: F, z: Complex64, h: f64) -> Complex64 {
    let f2p = f(z + 2.0 * h);
    let f1p = f(z + h);
    let f1m = f(z - h);
    let f2m = f(z - 2.0 * h);
    let d1 = (-f2p + 8.0 * f1p - 8.0 * f1m + f2m) / (12.0 * h);
    let d2 = (-f2p + 16.0 * f1p - 30.0 * f(z) + 16.0 * f1m - f2m) / (12.0 * h * h);
    let d3 = (f2p - 2.0 * f1p + 2.0 * f1m - f2m) / (2.0 * h * h * h);
    d3 / d1 - 1.5 * (d2 / d1) * (d2 / d1)
}

/// One 5-point stencil pass for the Schwarzian of `p`. The affine part of
/// `p(tau) = tau - (6i/pi)(1 + u(tau))` drops out of every stencil exactly,
/// so the differences are taken on the small series part
/// `u = (1 - E2)/E2` alone; this keeps the third-derivative stencil far above
/// the rounding floor at step sizes near 1e-3.
fn schwarzian_p_stencil(tau: TauPoint, h: f64, params: &SeriesParams) -> Result<Complex64> {
    let z = tau.get();
    let u = |x: Complex64| -> Result<Complex64> {
        let deficit = eval_e2_deficit(TauPoint::new(x)?, params)?.value;
        Ok(deficit / (Complex64::new(1.0, 0.0) - deficit))
    };
    let u2p = u(z + 2.0 * h)?;
    let u1p = u(z + h)?;
    let u1m = u(z - h)?;
    let u2m = u(z - 2.0 * h)?;
    let du = (-u2p + 8.0 * u1p - 8.0 * u1m + u2m) / (12.0 * h);
    let d2u = (-u2p + 16.0 * u1p - 30.0 * u(z)? + 16.0 * u1m - u2m) / (12.0 * h * h);
    let d3u = (u2p - 2.0 * u1p + 2.0 * u1m - u2m) / (2.0 * h * h * h);
    let scale = Complex64::new(0.0, -6.0 / PI);
    let p1 = Complex64::new(1.0, 0.0) + scale * du;
    let p2 = scale * d2u;
    let p3 = scale * d3u;
    Ok(p3 / p1 - 1.5 * (p2 / p1) * (p2 / p1))
}

/// Finite-difference Schwarzian `{p, tau}` with Richardson refinement against
/// the O(h^2) error of the third-derivative stencil.
pub fn schwarzian_p_fd(tau: TauPoint, step: f64, params: &SeriesParams) -> Result<Complex64> {
    let fine = schwarzian_p_stencil(tau, step, params)?;
    let coarse = schwarzian_p_stencil(tau, 2.0 * step, params)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// The closed form `{p, tau} = -1152 pi^2 Delta / E4^2`.
pub fn schwarzian_p_closed(tau: TauPoint, params: &SeriesParams) -> Result<Complex64> {
    let delta = eval_delta(tau, DeltaMethod::Eisenstein, params)?.value;
    let e4 = eval_e4(tau, params)?.value;
    if e4.norm() < 1e-10 {
        return Err(Error::SingularPoint { j: e4 });
    }
    Ok(-1152.0 * PI * PI * delta / (e4 * e4))
}

/// `|{p,tau}_FD - (-1152 pi^2 Delta / E4^2)|` at the given step.
pub fn schwarzian_p_residual(tau: TauPoint, step: f64, params: &SeriesParams) -> Result<f64> {
    if tau.im() < 0.5 {
        return Err(Error::OutOfRegime { im: tau.im() });
    }
    if is_rho_equivalent(tau, J_EXCLUSION) {
        return Err(Error::SingularPoint { j: eval_j(tau, params)?.value });
    }
    let fd = schwarzian_p_fd(tau, step, params)?;
    let closed = schwarzian_p_closed(tau, params)?;
    Ok((fd - closed).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pmap::eval_p;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn tau(re: f64, im: f64) -> TauPoint {
        TauPoint::new(Complex64::new(re, im)).unwrap()
    }

    const P: SeriesParams = SeriesParams { order: 400, tol: 1e-13 };

    #[test]
    fn normalized_ratios() {
        let np = eval_normalized(tau(0.0, 2.0), &P).unwrap();
        assert!((np.omega1 / np.omega2 - Complex64::new(0.0, 2.0)).norm() < 1e-14);
        let np = eval_normalized(tau(0.0, 1.5), &P).unwrap();
        let p = eval_p(tau(0.0, 1.5), &P).unwrap().value;
        assert!((np.h1 / np.h2 - p).norm() < 1e-12);
        for t in [1.0, 2.0] {
            let np = eval_normalized(tau(0.0, t), &P).unwrap();
            assert!(np.omega2.im.abs() < 1e-15);
            assert!(np.omega2.re > 0.0);
        }
        assert!(matches!(
            eval_normalized(tau(0.0, 0.2), &P),
            Err(Error::OutOfRegime { .. })
        ));
    }

    #[test]
    fn first_order_system() {
        let (r1, r2) = first_order_residual(tau(0.0, 2.0), PeriodIndex::Second, &P).unwrap();
        assert!(r1 < 1e-8, "residual {r1}");
        assert!(r2 < 1e-8, "residual {r2}");
        let (r1, r2) = first_order_residual(tau(0.25, 1.4), PeriodIndex::First, &P).unwrap();
        assert!(r1 < 1e-8);
        assert!(r2 < 1e-8);
        // J(i) = 1 sits inside the exclusion zone.
        assert!(matches!(
            first_order_residual(tau(0.0, 1.0), PeriodIndex::Second, &P),
            Err(Error::SingularPoint { .. })
        ));
    }

    #[test]
    fn hypergeometric_residuals() {
        let r = hypergeom_residual(tau(0.0, 2.0), PeriodIndex::Second, OdeFamily::H, &P).unwrap();
        assert!(r < 1e-6, "H residual {r}");
        let r =
            hypergeom_residual(tau(0.0, 2.0), PeriodIndex::Second, OdeFamily::Omega, &P).unwrap();
        assert!(r < 1e-6, "Omega residual {r}");
        let c = ode_friction_coefficient(OdeFamily::H, Complex64::new(2.0, 0.0));
        assert!((c - Complex64::new(2.0 / 3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn triangle_parameters() {
        let h_family = HypergeomCoeffs { alpha: -1.0 / 12.0, beta: -1.0 / 12.0, gamma: 1.0 / 3.0 };
        let a = triangle_params(&h_family);
        assert!((a.lambda - 2.0 / 3.0).abs() < 1e-15);
        assert!((a.mu - 0.5).abs() < 1e-15);
        assert!(a.nu.abs() < 1e-15);
        let omega_family =
            HypergeomCoeffs { alpha: 1.0 / 12.0, beta: 1.0 / 12.0, gamma: 2.0 / 3.0 };
        let b = triangle_params(&omega_family);
        assert!((b.lambda - 1.0 / 3.0).abs() < 1e-15);
        assert!((b.mu - 0.5).abs() < 1e-15);
        assert!(b.nu.abs() < 1e-15);
        let c = triangle_params(&HypergeomCoeffs { alpha: 0.0, beta: 0.0, gamma: 1.0 });
        assert!((c.lambda, c.mu, c.nu) == (0.0, 1.0, 0.0));
    }

    #[test]
    fn schwarzian_closed_coefficients() {
        // Coefficients 5/18, 3/8, 11/72 for the quasi-period angles.
        let a = TriangleAngles { lambda: 2.0 / 3.0, mu: 0.5, nu: 0.0 };
        let z = Complex64::new(0.3, 0.4);
        let got = schwarzian_closed(&a, z).unwrap();
        let want = 5.0 / 18.0 / (z * z)
            + 3.0 / 8.0 / ((1.0 - z) * (1.0 - z))
            + 11.0 / 72.0 / (z * (1.0 - z));
        assert!((got - want).norm() < 1e-14);
        // Coefficients 4/9, 3/8, 23/72 for the period angles.
        let b = TriangleAngles { lambda: 1.0 / 3.0, mu: 0.5, nu: 0.0 };
        let got = schwarzian_closed(&b, z).unwrap();
        let want = 4.0 / 9.0 / (z * z)
            + 3.0 / 8.0 / ((1.0 - z) * (1.0 - z))
            + 23.0 / 72.0 / (z * (1.0 - z));
        assert!((got - want).norm() < 1e-14);
        // All angles 1 wipes out every numerator: 1 - 1 = 0 twice and
        // 1 - 1 - 1 + 1 = 0 in the mixed term.
        let c = TriangleAngles { lambda: 1.0, mu: 1.0, nu: 1.0 };
        let got = schwarzian_closed(&c, Complex64::new(2.0, 0.0)).unwrap();
        assert!(got.norm() < 1e-15);
        assert!(schwarzian_closed(&c, Complex64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn schwarzian_fd_matches_closed_form() {
        assert!(schwarzian_p_residual(tau(0.0, 2.0), 1e-3, &P).unwrap() < 1e-6);
        assert!(schwarzian_p_residual(tau(0.1, 1.2), 1e-3, &P).unwrap() < 1e-6);
    }

    #[test]
    fn schwarzian_moebius_invariance() {
        // Post-composing with z -> z + 1 leaves the Schwarzian unchanged.
        let z = Complex64::new(0.0, 2.0);
        let h = 2e-3;
        let p = |x: Complex64| eval_p(TauPoint::new(x).unwrap(), &P).unwrap().value;
        let s_p = fd_schwarzian(p, z, h);
        let s_tp = fd_schwarzian(|x| p(x) + 1.0, z, h);
        assert!((s_p - s_tp).norm() < 1e-6);
    }

    #[test]
    fn wronskian_stays_away_from_zero() {
        let mut rng = StdRng::seed_from_u64(41);
        let mut checked = 0;
        while checked < 10 {
            let t = tau(rng.gen_range(-0.4..0.4), rng.gen_range(0.8..2.0));
            let frame = match j_frame(t, &P) {
                Ok(f) => f,
                Err(_) => continue,
            };
            let p1 = pair_derivs(t, PeriodIndex::First, P.order);
            let p2 = pair_derivs(t, PeriodIndex::Second, P.order);
            let wronskian = p1.h[0] * (p2.h[1] / frame.dj) - p2.h[0] * (p1.h[1] / frame.dj);
            assert!(wronskian.norm() > 1e-6);
            checked += 1;
        }
    }

    #[test]
    fn schwarzian_chain_rule() {
        let mut rng = StdRng::seed_from_u64(42);
        let mut checked = 0;
        while checked < 10 {
            let t = tau(rng.gen_range(-0.3..0.3), rng.gen_range(0.9..2.0));
            if is_rho_equivalent(t, 0.1) {
                continue;
            }
            let frame = match j_frame(t, &P) {
                Ok(f) => f,
                Err(_) => continue,
            };
            let p_angles = TriangleAngles { lambda: 2.0 / 3.0, mu: 0.5, nu: 0.0 };
            let t_angles = TriangleAngles { lambda: 1.0 / 3.0, mu: 0.5, nu: 0.0 };
            let s_p_j = schwarzian_closed(&p_angles, frame.j).unwrap();
            let s_t_j = schwarzian_closed(&t_angles, frame.j).unwrap();
            let jprime = Complex64::new(0.0, 2.0 * PI) * frame.dj;
            let rhs = (s_p_j - s_t_j) * jprime * jprime;
            let lhs = schwarzian_p_fd(t, 1e-3, &P).unwrap();
            assert!((lhs - rhs).norm() < 1e-5, "chain rule gap {}", (lhs - rhs).norm());
            checked += 1;
        }
    }

    #[test]
    fn schwarzian_transforms_with_weight_four() {
        let z = Complex64::new(0.0, 1.3);
        let f_z = schwarzian_p_fd(tau(z.re, z.im), 1e-3, &P).unwrap();
        let inv = -z.finv();
        let f_inv = schwarzian_p_fd(tau(inv.re, inv.im), 1e-3, &P).unwrap();
        assert!((f_inv / z.powu(4) - f_z).norm() < 1e-6);
    }
}
