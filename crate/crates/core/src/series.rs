//! Coefficient engines and rigorous truncation-tail bounds for q-series.

use num_complex::Complex64;

/// Kahan-compensated complex summation.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Kahan {
    sum: Complex64,
    carry: Complex64,
}

impl Kahan {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, term: Complex64) {
        let y = term - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> Complex64 {
        self.sum
    }
}

/// Upper bound for `sum_{n > last} amp * n^deg * exp(bexp * sqrt(n)) * r^n`
/// with `0 <= r < 1`. For `n > last` the term ratio is at most
/// `((last+2)/(last+1))^deg * exp(bexp / (2 sqrt(last+1))) * r`; when that is
/// below one, the tail is dominated by a geometric series starting at the
/// first discarded term. Returns infinity when the ratio test fails.
pub(crate) fn tail_bound(amp: f64, deg: i32, bexp: f64, r: f64, last: usize) -> f64 {
    debug_assert!((0.0..1.0).contains(&r));
    if r == 0.0 {
        return 0.0;
    }
    let n1 = (last + 1) as f64;
    let ratio = ((n1 + 1.0) / n1).powi(deg) * (bexp / (2.0 * n1.sqrt())).exp() * r;
    if ratio >= 1.0 {
        return f64::INFINITY;
    }
    let first = amp * n1.powi(deg) * (bexp * n1.sqrt()).exp() * r.powf(n1);
    first / (1.0 - ratio)
}

/// Divisor power sums `sigma_k(n)` for `n = 0..=n_max` (index 0 unused).
/// Exact as long as the values stay below 2^53.
pub(crate) fn divisor_power_sums(k: u32, n_max: usize) -> Vec<f64> {
    let mut sums = vec![0.0; n_max + 1];
    for d in 1..=n_max {
        let dk = (d as f64).powi(k as i32);
        let mut m = d;
        while m <= n_max {
            sums[m] += dk;
            m += d;
        }
    }
    sums
}

/// Coefficients of `prod_{n>=1} (1 - q^n)^r` up to `q^n_max`, for any integer
/// exponent `r`. Uses the logarithmic-derivative recurrence
/// `n p_n = -r sum_{j=1}^{n} sigma_1(j) p_{n-j}`.
pub(crate) fn eta_power_coeffs(r: i32, n_max: usize) -> Vec<f64> {
    let sigma1 = divisor_power_sums(1, n_max);
    let mut p = vec![0.0; n_max + 1];
    p[0] = 1.0;
    for n in 1..=n_max {
        let mut acc = 0.0;
        for j in 1..=n {
            acc += sigma1[j] * p[n - j];
        }
        p[n] = -(r as f64) * acc / n as f64;
    }
    p
}

/// Exact integer coefficients of `prod (1 - q^n)^24` up to `q^n_max`.
pub(crate) fn eta24_coeffs_exact(n_max: usize) -> Option<Vec<i128>> {
    let mut sigma1 = vec![0i128; n_max + 1];
    for d in 1..=n_max {
        let mut m = d;
        while m <= n_max {
            sigma1[m] += d as i128;
            m += d;
        }
    }
    let mut p = vec![0i128; n_max + 1];
    p[0] = 1;
    for n in 1..=n_max {
        let mut acc: i128 = 0;
        for j in 1..=n {
            acc = acc.checked_add(sigma1[j].checked_mul(p[n - j])?)?;
        }
        let num = acc.checked_mul(-24)?;
        debug_assert_eq!(num % n as i128, 0);
        p[n] = num / n as i128;
    }
    Some(p)
}

/// Truncated Cauchy product of two coefficient arrays.
pub(crate) fn convolve(a: &[f64], b: &[f64], n_max: usize) -> Vec<f64> {
    let mut out = vec![0.0; n_max + 1];
    for (i, &ai) in a.iter().enumerate().take(n_max + 1) {
        if ai == 0.0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate().take(n_max + 1 - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Coefficients of the weight-zero invariant `J` as a Laurent series:
/// entry `m` is the coefficient of `q^(m-1)`. Computed from the cube of the
/// weight-4 series divided by the discriminant product.
pub(crate) fn j_laurent_coeffs(n_max: usize) -> Vec<f64> {
    let sigma3 = divisor_power_sums(3, n_max);
    let mut e4 = vec![0.0; n_max + 1];
    e4[0] = 1.0;
    for n in 1..=n_max {
        e4[n] = 240.0 * sigma3[n];
    }
    let e4sq = convolve(&e4, &e4, n_max);
    let e4cube = convolve(&e4sq, &e4, n_max);
    let inv_eta24 = eta_power_coeffs(-24, n_max);
    let mut j = convolve(&e4cube, &inv_eta24, n_max);
    for c in &mut j {
        *c /= 1728.0;
    }
    j
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_sums_match_direct_enumeration() {
        let s1 = divisor_power_sums(1, 12);
        assert_eq!(s1[1], 1.0);
        assert_eq!(s1[6], 12.0);
        assert_eq!(s1[12], 28.0);
        let s3 = divisor_power_sums(3, 4);
        assert_eq!(s3[4], 73.0);
    }

    #[test]
    fn discriminant_product_coefficients() {
        let p = eta_power_coeffs(24, 6);
        assert_eq!(p[0], 1.0);
        assert_eq!(p[1], -24.0);
        assert_eq!(p[2], 252.0);
        assert_eq!(p[3], -1472.0);
        let exact = eta24_coeffs_exact(6).unwrap();
        assert_eq!(exact[1], -24);
        assert_eq!(exact[2], 252);
        assert_eq!(exact[3], -1472);
        assert_eq!(exact[4], 4830);
    }

    #[test]
    fn inverse_product_inverts() {
        let n = 20;
        let p = eta_power_coeffs(2, n);
        let q = eta_power_coeffs(-2, n);
        let conv = convolve(&p, &q, n);
        assert!((conv[0] - 1.0).abs() < 1e-12);
        for c in &conv[1..] {
            assert!(c.abs() < 1e-9);
        }
    }

    #[test]
    fn j_expansion_leading_terms() {
        // 1728 J = 1/q + 744 + 196884 q + 21493760 q^2 + ...
        let j = j_laurent_coeffs(3);
        assert!((j[0] * 1728.0 - 1.0).abs() < 1e-9);
        assert!((j[1] * 1728.0 - 744.0).abs() < 1e-6);
        assert!((j[2] * 1728.0 - 196884.0).abs() < 1e-3);
        assert!((j[3] * 1728.0 - 21493760.0).abs() / 21493760.0 < 1e-12);
    }

    #[test]
    fn tail_bound_dominates_true_tail() {
        // Compare against a brute-force tail for a sigma_1-type series.
        let r: f64 = 0.2;
        let last = 8;
        let bound = tail_bound(24.0, 2, 0.0, r, last);
        let mut true_tail = 0.0;
        for n in (last + 1)..200 {
            true_tail += 24.0 * (n as f64).powi(2) * r.powi(n as i32);
        }
        assert!(bound >= true_tail);
        assert!(bound < 20.0 * true_tail);
    }
}
