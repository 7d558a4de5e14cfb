//! Rank-2 lattices and the quasi-periods of the associated zeta-function,
//! computed both by direct lattice summation (a low-precision oracle, with
//! optional Richardson extrapolation) and through the weight-2 Eisenstein
//! series (the fast, high-precision route).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qforms::{eval_e2, SeriesParams, TauPoint};
use crate::series::Kahan;

/// A rank-2 lattice with generators normalised so `Im(omega1/omega2) > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    omega1: Complex64,
    omega2: Complex64,
}

impl Lattice {
    /// Normalises `(omega1, omega2)` to `(omega1, -omega2)` when necessary;
    /// the generated lattice is unchanged.
    pub fn new(omega1: Complex64, omega2: Complex64) -> Result<Self> {
        if omega1.norm() == 0.0 || omega2.norm() == 0.0 {
            return Err(Error::DegenerateLattice);
        }
        let ratio = omega1 / omega2;
        if ratio.im == 0.0 || !ratio.is_finite() {
            return Err(Error::DegenerateLattice);
        }
        if ratio.im > 0.0 {
            Ok(Lattice { omega1, omega2 })
        } else {
            Ok(Lattice { omega1, omega2: -omega2 })
        }
    }

    pub fn omega1(&self) -> Complex64 {
        self.omega1
    }

    pub fn omega2(&self) -> Complex64 {
        self.omega2
    }

    /// The normalised ratio `tau = omega1/omega2` in the upper half-plane.
    pub fn tau(&self) -> TauPoint {
        TauPoint::new(self.omega1 / self.omega2).expect("normalised at construction")
    }

    /// The lattice point `k omega1 + n omega2`.
    pub fn point(&self, k: i64, n: i64) -> Complex64 {
        self.omega1 * k as f64 + self.omega2 * n as f64
    }
}

/// Which route produced a pair of quasi-periods.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QpSource {
    Direct,
    Modular,
}

/// The pair `(eta1, eta2)` together with its provenance. The two cannot both
/// vanish.
#[derive(Debug, Clone, Copy)]
pub struct QuasiPeriods {
    pub eta1: Complex64,
    pub eta2: Complex64,
    pub source: QpSource,
}

/// Truncation controls for the direct lattice sums: the summation window is
/// `|k|, |n| <= radius`; with `extrapolate` set, results at `radius` and
/// `2 * radius` are Richardson-combined.
#[derive(Debug, Clone, Copy)]
pub struct ZetaParams {
    pub radius: u32,
    pub extrapolate: bool,
}

impl Default for ZetaParams {
    fn default() -> Self {
        ZetaParams { radius: 400, extrapolate: false }
    }
}

const POLE_PROXIMITY: f64 = 1e-9;

fn zeta_window(u: Complex64, lat: &Lattice, radius: u32) -> Result<Complex64> {
    let m = radius as i64;
    let pole_tol = POLE_PROXIMITY * lat.omega2.norm();
    if u.norm() < pole_tol {
        return Err(Error::PoleAtLatticePoint { u });
    }
    let mut acc = Kahan::new();
    for k in -m..=m {
        let base = lat.omega1 * k as f64;
        for n in -m..=m {
            if k == 0 && n == 0 {
                continue;
            }
            let gamma = base + lat.omega2 * n as f64;
            let diff = u - gamma;
            if diff.norm() < pole_tol {
                return Err(Error::PoleAtLatticePoint { u });
            }
            // 1/(u-g) + 1/g + u/g^2, compensated term by term
            let ginv = gamma.finv();
            acc.add(diff.finv() + ginv + u * ginv * ginv);
        }
    }
    Ok(u.finv() + acc.value())
}

/// Symmetric truncation of the zeta-series over the window `|k|, |n| <=
/// radius`. Each compensated term is `u^2 / (gamma^2 (u - gamma))`, so the
/// documented error is O(1/radius); the symmetric window keeps the partial
/// sum an odd function of `u` exactly. With `extrapolate`, the values at
/// `radius` and `2 radius` are Richardson-combined against a 1/radius error
/// model.
pub fn zeta_direct(u: Complex64, lat: &Lattice, params: &ZetaParams) -> Result<Complex64> {
    debug_assert!(params.radius >= 10);
    let base = zeta_window(u, lat, params.radius)?;
    if params.extrapolate {
        let fine = zeta_window(u, lat, 2 * params.radius)?;
        Ok(2.0 * fine - base)
    } else {
        Ok(base)
    }
}

/// Quasi-periods from the odd symmetry of zeta: `eta_k = 2 zeta(omega_k / 2)`.
pub fn quasi_periods_direct(lat: &Lattice, params: &ZetaParams) -> Result<QuasiPeriods> {
    let eta1 = 2.0 * zeta_direct(lat.omega1 / 2.0, lat, params)?;
    let eta2 = 2.0 * zeta_direct(lat.omega2 / 2.0, lat, params)?;
    Ok(QuasiPeriods { eta1, eta2, source: QpSource::Direct })
}

/// Quasi-periods through the weight-2 Eisenstein series:
/// `eta2 = pi^2 E2(tau) / (3 omega2)` and
/// `eta1 = -2 pi i / omega2 + pi^2 omega1 E2(tau) / (3 omega2^2)`.
pub fn quasi_periods_modular(lat: &Lattice, params: &SeriesParams) -> Result<QuasiPeriods> {
    let tau = lat.tau();
    let e2 = eval_e2(tau, params)?.value;
    let eta2 = PI * PI * e2 / (3.0 * lat.omega2);
    let eta1 = Complex64::new(0.0, -2.0 * PI) / lat.omega2 + tau.get() * eta2;
    Ok(QuasiPeriods { eta1, eta2, source: QpSource::Modular })
}

/// `|omega1 eta2 - omega2 eta1 - 2 pi i|`, the residual of the Legendre
/// relation.
pub fn legendre_residual(qp: &QuasiPeriods, lat: &Lattice) -> f64 {
    (lat.omega1 * qp.eta2 - lat.omega2 * qp.eta1 - Complex64::new(0.0, 2.0 * PI)).norm()
}

/// Residual of `zeta(u + k omega1 + n omega2) = zeta(u) + k eta1 + n eta2`,
/// measured with the direct summation.
pub fn quasi_periodicity_residual(
    u: Complex64,
    k: i64,
    n: i64,
    lat: &Lattice,
    qp: &QuasiPeriods,
    params: &ZetaParams,
) -> Result<f64> {
    let shifted = u + lat.point(k, n);
    let lhs = zeta_direct(shifted, lat, params)?;
    let rhs = zeta_direct(u, lat, params)? + qp.eta1 * k as f64 + qp.eta2 * n as f64;
    Ok((lhs - rhs).norm())
}
