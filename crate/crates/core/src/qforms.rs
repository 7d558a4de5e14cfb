//! q-series engine for the Eisenstein series E2, E4, E6, the discriminant,
//! the J-invariant, their fixed-branch roots and derivatives.
//!
//! All evaluators return a [`FormValue`]: the truncated series value together
//! with a guaranteed absolute bound on the discarded tail, derived from the
//! documented coefficient bounds (`sigma_k(n) <= n^(k+1)` for the Eisenstein
//! coefficients, `|tau(n)| <= n^7` for the discriminant, `c(n) <= e^(4 pi
//! sqrt(n))` for the J-invariant). Points with small imaginary part are first
//! reduced to the fundamental domain and the transformation laws are undone,
//! so the series always run where the nome is small.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::reduce_to_fundamental;
use crate::series::{
    divisor_power_sums, eta24_coeffs_exact, eta_power_coeffs, j_laurent_coeffs, tail_bound, Kahan,
};

/// Points below this imaginary part are reduced to the fundamental domain
/// before summation.
pub const REDUCTION_THRESHOLD: f64 = 0.35;

/// A point of the open upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauPoint(Complex64);

impl TauPoint {
    pub fn new(z: Complex64) -> Result<Self> {
        if z.im > 0.0 && z.is_finite() {
            Ok(TauPoint(z))
        } else {
            Err(Error::InvalidTau { im: z.im })
        }
    }

    pub fn get(self) -> Complex64 {
        self.0
    }

    pub fn re(self) -> f64 {
        self.0.re
    }

    pub fn im(self) -> f64 {
        self.0.im
    }
}

/// Truncation controls: `order` is the maximum number of q-powers kept, `tol`
/// the target absolute error. Evaluators stop as soon as the rigorous tail
/// bound drops below `tol` and report failure if the configured order cannot
/// reach it.
#[derive(Debug, Clone, Copy)]
pub struct SeriesParams {
    pub order: usize,
    pub tol: f64,
}

impl Default for SeriesParams {
    fn default() -> Self {
        SeriesParams { order: 400, tol: 1e-13 }
    }
}

/// A series value plus a guaranteed absolute bound for the truncated tail.
#[derive(Debug, Clone, Copy)]
pub struct FormValue {
    pub value: Complex64,
    pub tail_bound: f64,
}

impl FormValue {
    pub fn exact(value: Complex64) -> Self {
        FormValue { value, tail_bound: 0.0 }
    }

    pub fn add(&self, o: &FormValue) -> FormValue {
        FormValue { value: self.value + o.value, tail_bound: self.tail_bound + o.tail_bound }
    }

    pub fn sub(&self, o: &FormValue) -> FormValue {
        FormValue { value: self.value - o.value, tail_bound: self.tail_bound + o.tail_bound }
    }

    pub fn mul(&self, o: &FormValue) -> FormValue {
        FormValue {
            value: self.value * o.value,
            tail_bound: self.value.norm() * o.tail_bound
                + o.value.norm() * self.tail_bound
                + self.tail_bound * o.tail_bound,
        }
    }

    pub fn div(&self, o: &FormValue) -> Result<FormValue> {
        let den = o.value.norm();
        if den <= o.tail_bound {
            return Err(Error::DivisionByZero);
        }
        let value = self.value / o.value;
        let tail_bound = (self.tail_bound + value.norm() * o.tail_bound) / (den - o.tail_bound);
        Ok(FormValue { value, tail_bound })
    }

    pub fn scale(&self, k: Complex64) -> FormValue {
        FormValue { value: self.value * k, tail_bound: self.tail_bound * k.norm() }
    }

    pub fn powi(&self, n: u32) -> FormValue {
        let mut out = FormValue::exact(Complex64::new(1.0, 0.0));
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }
}

/// The nome `q = exp(2 pi i tau)`; `|q| < 1` on the upper half-plane.
pub fn nome(tau: TauPoint) -> Complex64 {
    (Complex64::new(0.0, 2.0 * PI) * tau.get()).exp()
}

/// `sigma_k(n)`, the sum of the k-th powers of the divisors of `n`, in exact
/// integer arithmetic.
pub fn divisor_sum(k: u32, n: u64) -> Result<u64> {
    if k == 0 || n == 0 {
        return Err(Error::Overflow);
    }
    let mut total: u64 = 0;
    for m in 1..=n {
        if n.is_multiple_of(m) {
            let mut pw: u64 = 1;
            for _ in 0..k {
                pw = pw.checked_mul(m).ok_or(Error::Overflow)?;
            }
            total = total.checked_add(pw).ok_or(Error::Overflow)?;
        }
    }
    Ok(total)
}

/// Shared engine for the three sigma series `1 + scale * sum sigma_k(n) q^n`.
/// The coefficient bound `sigma_k(n) <= n^(k+1)` feeds the geometric tail.
fn sigma_series(scale: f64, k: u32, q: Complex64, params: &SeriesParams) -> Result<FormValue> {
    let deficit = sigma_series_deficit(scale, k, q, params)?;
    Ok(FormValue {
        value: Complex64::new(1.0, 0.0) + deficit.value,
        tail_bound: deficit.tail_bound,
    })
}

/// The same series without its constant term, `scale * sum sigma_k(n) q^n`.
/// Kept separate so callers measuring the distance to 1 avoid the final
/// cancellation entirely.
fn sigma_series_deficit(
    scale: f64,
    k: u32,
    q: Complex64,
    params: &SeriesParams,
) -> Result<FormValue> {
    let r = q.norm();
    debug_assert!(r < 1.0);
    let sigma = divisor_power_sums(k, params.order);
    let mut acc = Kahan::new();
    let mut qn = Complex64::new(1.0, 0.0);
    let mut best = f64::INFINITY;
    for n in 1..=params.order {
        qn *= q;
        acc.add(qn * (scale * sigma[n]));
        best = tail_bound(scale.abs(), k as i32 + 1, 0.0, r, n);
        if best < params.tol {
            return Ok(FormValue { value: acc.value(), tail_bound: best });
        }
    }
    Err(Error::ToleranceUnreachable { requested: params.tol, achievable: best })
}

fn reduce_with_factor(tau: TauPoint) -> Result<(TauPoint, Complex64, i64)> {
    let red = reduce_to_fundamental(tau)?;
    let j = red.map.denominator_at(red.tau_reduced.get());
    let (_, _, c, _) = red.map.entries();
    Ok((red.tau_reduced, j, c))
}

/// The quasi-modular Eisenstein series of weight 2,
/// `E2 = 1 - 24 sum sigma_1(n) q^n`. Low points are reduced first and the
/// inhomogeneous weight-2 law is undone.
pub fn eval_e2(tau: TauPoint, params: &SeriesParams) -> Result<FormValue> {
    if tau.im() < REDUCTION_THRESHOLD {
        let (tr, j, c) = reduce_with_factor(tau)?;
        let inner_tol = params.tol / j.norm_sqr().max(1.0);
        let inner = eval_e2(tr, &SeriesParams { order: params.order, tol: inner_tol })?;
        let value =
            j * j * inner.value - Complex64::new(0.0, 6.0 / PI) * (c as f64) * j;
        return Ok(FormValue { value, tail_bound: inner.tail_bound * j.norm_sqr() });
    }
    sigma_series(-24.0, 1, nome(tau), params)
}

/// `1 - E2 = 24 sum sigma_1(n) q^n`, summed directly so that the result keeps
/// full relative accuracy even when it is far below machine epsilon.
pub fn eval_e2_deficit(tau: TauPoint, params: &SeriesParams) -> Result<FormValue> {
    sigma_series_deficit(24.0, 1, nome(tau), params)
}

/// The weight-4 Eisenstein series `E4 = 1 + 240 sum sigma_3(n) q^n`.
pub fn eval_e4(tau: TauPoint, params: &SeriesParams) -> Result<FormValue> {
    if tau.im() < REDUCTION_THRESHOLD {
        let (tr, j, _) = reduce_with_factor(tau)?;
        let f = j.norm_sqr().powi(2);
        let inner = eval_e4(tr, &SeriesParams { order: params.order, tol: params.tol / f.max(1.0) })?;
        return Ok(FormValue { value: j.powu(4) * inner.value, tail_bound: inner.tail_bound * f });
    }
    sigma_series(240.0, 3, nome(tau), params)
}

/// The weight-6 Eisenstein series `E6 = 1 - 504 sum sigma_5(n) q^n`.
pub fn eval_e6(tau: TauPoint, params: &SeriesParams) -> Result<FormValue> {
    if tau.im() < REDUCTION_THRESHOLD {
        let (tr, j, _) = reduce_with_factor(tau)?;
        let f = j.norm_sqr().powi(3);
        let inner = eval_e6(tr, &SeriesParams { order: params.order, tol: params.tol / f.max(1.0) })?;
        return Ok(FormValue { value: j.powu(6) * inner.value, tail_bound: inner.tail_bound * f });
    }
    sigma_series(-504.0, 5, nome(tau), params)
}

/// Direct lattice Eisenstein sum `G_k(tau) = sum' (m tau + n)^(-k)` over the
/// window `|m|, |n| <= radius`; the independent oracle for the q-series via
/// `G4 = (pi^4/45) E4` and `G6 = (2 pi^6/945) E6`. The real part of `tau` is
/// shifted by an integer first, which leaves the full sum unchanged and makes
/// 1-periodicity exact for the truncated window as well.
pub fn eval_g_lattice(k: u32, tau: TauPoint, radius: u32) -> Result<Complex64> {
    if k != 4 && k != 6 {
        return Err(Error::InvalidWeight { k });
    }
    debug_assert!(radius >= 10);
    let t = tau.get() - tau.re().round();
    let r = radius as i64;
    let mut acc = Kahan::new();
    for m in -r..=r {
        let mt = (m as f64) * t;
        for n in -r..=r {
            if m == 0 && n == 0 {
                continue;
            }
            let w = mt + n as f64;
            let w2 = w * w;
            let w4 = w2 * w2;
            let term = if k == 4 { w4.finv() } else { (w4 * w2).finv() };
            acc.add(term);
        }
    }
    Ok(acc.value())
}

/// Documented tail bound for [`eval_g_lattice`]: points outside the window
/// satisfy `|m tau + n| >= c * max(|m|, |n|)` with `c` the minimum of
/// `|x tau + y|` over the boundary of the unit square, so the tail is at most
/// `8 c^(-k) R^(2-k) / (k - 2)`.
pub fn lattice_sum_tail_bound(k: u32, tau: TauPoint, radius: u32) -> f64 {
    let t = tau.get() - tau.re().round();
    let mut c = f64::INFINITY;
    // Edges x = +-1: |x t + y|^2 = (y + x re)^2 + im^2, minimised over y in [-1, 1].
    for x in [-1.0, 1.0] {
        let y = (-x * t.re).clamp(-1.0, 1.0);
        c = c.min(((y + x * t.re).powi(2) + (x * t.im).powi(2)).sqrt());
    }
    // Edges y = +-1: quadratic in x.
    let n2 = t.norm_sqr();
    for y in [-1.0, 1.0] {
        let x = (-y * t.re / n2).clamp(-1.0, 1.0);
        c = c.min((x * x * n2 + 2.0 * x * y * t.re + 1.0).max(0.0).sqrt());
    }
    8.0 * c.powi(-(k as i32)) * (radius as f64).powi(2 - k as i32) / (k as f64 - 2.0)
}

/// `exp(2 pi i tau * prefactor) * prod_{n >= 1} (1 - q^n)^r`, the engine
/// behind the discriminant product and its fixed-branch roots. The remaining
/// factor after `N` terms has log-modulus at most `|r| |q|^(N+1) / (1-|q|)^2`.
fn eta_product(
    tau: TauPoint,
    r: i32,
    prefactor: f64,
    params: &SeriesParams,
) -> Result<FormValue> {
    let q = nome(tau);
    let rho = q.norm();
    let mut value = (Complex64::new(0.0, 2.0 * PI * prefactor) * tau.get()).exp();
    let mut qn = Complex64::new(1.0, 0.0);
    let mut best = f64::INFINITY;
    for n in 1..=params.order {
        qn *= q;
        let factor = Complex64::new(1.0, 0.0) - qn;
        value *= if r >= 0 {
            factor.powu(r as u32)
        } else {
            factor.powu((-r) as u32).finv()
        };
        let log_tail = r.unsigned_abs() as f64 * rho.powi(n as i32 + 1)
            / ((1.0 - rho) * (1.0 - rho));
        if log_tail < 0.5 {
            best = value.norm() * log_tail * (1.0 + log_tail);
            if best < params.tol {
                return Ok(FormValue { value, tail_bound: best });
            }
        }
    }
    Err(Error::ToleranceUnreachable { requested: params.tol, achievable: best })
}

/// Which representation of the discriminant to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaMethod {
    /// `(E4^3 - E6^2) / 1728`.
    Eisenstein,
    /// `q prod (1 - q^n)^24`.
    Product,
}

/// The discriminant form of weight 12; both methods agree within their
/// combined tail bounds.
pub fn eval_delta(tau: TauPoint, method: DeltaMethod, params: &SeriesParams) -> Result<FormValue> {
    match method {
        DeltaMethod::Eisenstein => {
            let e4 = eval_e4(tau, params)?;
            let e6 = eval_e6(tau, params)?;
            Ok(e4.powi(3).sub(&e6.powi(2)).scale(Complex64::new(1.0 / 1728.0, 0.0)))
        }
        DeltaMethod::Product => {
            if tau.im() < REDUCTION_THRESHOLD {
                let (tr, j, _) = reduce_with_factor(tau)?;
                let f = j.norm_sqr().powi(6);
                let inner = eval_delta(
                    tr,
                    DeltaMethod::Product,
                    &SeriesParams { order: params.order, tol: params.tol / f.max(1.0) },
                )?;
                return Ok(FormValue {
                    value: j.powu(12) * inner.value,
                    tail_bound: inner.tail_bound * f,
                });
            }
            eta_product(tau, 24, 1.0, params)
        }
    }
}

/// The root `Delta^(1/k)` for `k | 24`, evaluated as
/// `exp(2 pi i tau / k) * prod (1 - q^n)^(24/k)`. This representation is
/// single-valued on the upper half-plane and positive on the imaginary axis,
/// which fixes the branch. No fundamental-domain reduction is applied: the
/// roots pick up multiplier systems under the modular group, so they are only
/// summed directly.
pub fn delta_root(tau: TauPoint, k: u32, params: &SeriesParams) -> Result<FormValue> {
    if k == 0 || 24 % k != 0 {
        return Err(Error::InvalidRoot { k });
    }
    eta_product(tau, (24 / k) as i32, 1.0 / k as f64, params)
}

/// The absolute invariant `J = E4^3 / (E4^3 - E6^2)`, normalised so that
/// `J(i) = 1`.
pub fn eval_j(tau: TauPoint, params: &SeriesParams) -> Result<FormValue> {
    let e4 = eval_e4(tau, params)?;
    let e6 = eval_e6(tau, params)?;
    let num = e4.powi(3);
    let den = num.sub(&e6.powi(2));
    num.div(&den)
}

/// The fixed-branch third root `J^(1/3) = E4 / (12 Delta^(1/3))`, positive on
/// the upper imaginary axis.
pub fn eval_j_cbrt(tau: TauPoint, params: &SeriesParams) -> Result<FormValue> {
    let e4 = eval_e4(tau, params)?;
    let root = delta_root(tau, 3, params)?;
    e4.div(&root.scale(Complex64::new(12.0, 0.0)))
}

/// The fixed-branch square root `(J - 1)^(1/2) = E6 / (24 sqrt(3) Delta^(1/2))`.
pub fn eval_jm1_sqrt(tau: TauPoint, params: &SeriesParams) -> Result<FormValue> {
    let e6 = eval_e6(tau, params)?;
    let root = delta_root(tau, 2, params)?;
    e6.div(&root.scale(Complex64::new(24.0 * 3f64.sqrt(), 0.0)))
}

/// Dimension of the space of modular forms of weight `k` for the full modular
/// group: zero in odd weight, `floor(k/12)` when `k = 2 mod 12`, and
/// `floor(k/12) + 1` otherwise.
pub fn dim_mk(k: u32) -> u32 {
    if k % 2 == 1 {
        return 0;
    }
    if k % 12 == 2 {
        k / 12
    } else {
        k / 12 + 1
    }
}

/// Forms with a normalised derivative `D f = (2 pi i)^(-1) df/dtau`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    E2,
    E4,
    E6,
    Delta,
    J,
}

/// How to compute `D f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivMethod {
    /// The Ramanujan identities and the closed forms derived from them.
    ClosedForm,
    /// Coefficientwise differentiation of the q-expansion (direct summation,
    /// no fundamental-domain reduction).
    Termwise,
}

/// `D f = (1/2 pi i) df/dtau` for the five stock forms.
pub fn eval_d(
    form: Form,
    tau: TauPoint,
    params: &SeriesParams,
    method: DerivMethod,
) -> Result<FormValue> {
    match method {
        DerivMethod::ClosedForm => eval_d_closed(form, tau, params),
        DerivMethod::Termwise => eval_d_termwise(form, tau, params),
    }
}

fn eval_d_closed(form: Form, tau: TauPoint, params: &SeriesParams) -> Result<FormValue> {
    match form {
        Form::E2 => {
            let e2 = eval_e2(tau, params)?;
            let e4 = eval_e4(tau, params)?;
            Ok(e2.powi(2).sub(&e4).scale(Complex64::new(1.0 / 12.0, 0.0)))
        }
        Form::E4 => {
            let e2 = eval_e2(tau, params)?;
            let e4 = eval_e4(tau, params)?;
            let e6 = eval_e6(tau, params)?;
            Ok(e2.mul(&e4).sub(&e6).scale(Complex64::new(1.0 / 3.0, 0.0)))
        }
        Form::E6 => {
            let e2 = eval_e2(tau, params)?;
            let e4 = eval_e4(tau, params)?;
            let e6 = eval_e6(tau, params)?;
            Ok(e2.mul(&e6).sub(&e4.powi(2)).scale(Complex64::new(0.5, 0.0)))
        }
        Form::Delta => {
            let delta = eval_delta(tau, DeltaMethod::Eisenstein, params)?;
            let e2 = eval_e2(tau, params)?;
            Ok(delta.mul(&e2))
        }
        Form::J => {
            // DJ = -2 sqrt(3) (J^(1/3))^2 (J-1)^(1/2) Delta^(1/6), with every
            // fractional power taken on the product-form branch.
            let jc = eval_j_cbrt(tau, params)?;
            let js = eval_jm1_sqrt(tau, params)?;
            let d6 = delta_root(tau, 6, params)?;
            Ok(jc
                .powi(2)
                .mul(&js)
                .mul(&d6)
                .scale(Complex64::new(-2.0 * 3f64.sqrt(), 0.0)))
        }
    }
}

/// Sum `sum c_n n q^n` with `|c_n| <= amp * n^deg * e^(bexp sqrt(n))`.
fn termwise_sum(
    coeffs: &[f64],
    amp: f64,
    deg: i32,
    bexp: f64,
    q: Complex64,
    params: &SeriesParams,
) -> Result<FormValue> {
    let r = q.norm();
    let mut acc = Kahan::new();
    let mut qn = Complex64::new(1.0, 0.0);
    let mut best = f64::INFINITY;
    let last = coeffs.len() - 1;
    for n in 1..=last.min(params.order) {
        qn *= q;
        acc.add(qn * (coeffs[n] * n as f64));
        best = tail_bound(amp, deg + 1, bexp, r, n);
        if best < params.tol {
            return Ok(FormValue { value: acc.value(), tail_bound: best });
        }
    }
    Err(Error::ToleranceUnreachable { requested: params.tol, achievable: best })
}

fn eval_d_termwise(form: Form, tau: TauPoint, params: &SeriesParams) -> Result<FormValue> {
    let q = nome(tau);
    match form {
        Form::E2 | Form::E4 | Form::E6 => {
            let (scale, k) = match form {
                Form::E2 => (-24.0, 1u32),
                Form::E4 => (240.0, 3),
                _ => (-504.0, 5),
            };
            let sigma = divisor_power_sums(k, params.order);
            let coeffs: Vec<f64> = sigma.iter().map(|s| scale * s).collect();
            termwise_sum(&coeffs, scale.abs(), k as i32 + 1, 0.0, q, params)
        }
        Form::Delta => {
            // Delta = sum tau(n) q^n with tau(n) = p_(n-1) of the product.
            let p = eta_power_coeffs(24, params.order);
            let mut coeffs = vec![0.0; params.order + 1];
            coeffs[1..=params.order].copy_from_slice(&p[..params.order]);
            termwise_sum(&coeffs, 1.0, 7, 0.0, q, params)
        }
        Form::J => {
            // Laurent series: the q^(-1) term differentiates to -c(-1)/q.
            let j = j_laurent_coeffs(params.order + 1);
            let mut coeffs = vec![0.0; params.order + 1];
            coeffs[1..=params.order].copy_from_slice(&j[2..=params.order + 1]);
            let positive =
                termwise_sum(&coeffs, 1.0 / 1728.0, 0, 4.0 * PI, q, params)?;
            let principal = -j[0] / q;
            Ok(FormValue {
                value: positive.value + principal,
                tail_bound: positive.tail_bound,
            })
        }
    }
}

/// The Serre derivative `theta_k f = D f - (k/12) E2 f`, mapping weight-k
/// forms to weight k+2. Only the two generators are exposed.
pub fn serre_derivative(form: Form, tau: TauPoint, params: &SeriesParams) -> Result<FormValue> {
    let (weight, f) = match form {
        Form::E4 => (4.0, eval_e4(tau, params)?),
        Form::E6 => (6.0, eval_e6(tau, params)?),
        _ => return Err(Error::InvalidWeight { k: 0 }),
    };
    let df = eval_d_closed(form, tau, params)?;
    let e2 = eval_e2(tau, params)?;
    Ok(df.sub(&e2.mul(&f).scale(Complex64::new(weight / 12.0, 0.0))))
}

/// Exact leading coefficients of `q prod (1 - q^n)^24` in integer arithmetic.
pub fn delta_product_coeffs_exact(n_max: usize) -> Result<Vec<i128>> {
    let p = eta24_coeffs_exact(n_max).ok_or(Error::Overflow)?;
    let mut out = vec![0i128; n_max + 1];
    out[1..=n_max].copy_from_slice(&p[..n_max]);
    Ok(out)
}
