//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! with the observed worst residual. Run with `--nocapture` to see the lines
//! for passing criteria too.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use qperiods::geom::{argument_principle_count, verify_boundary_map, ArcTriangle};
use qperiods::group::{rho, tessellate, UnimodularMap};
use qperiods::hypergeo::{
    first_order_residual, hypergeom_residual, schwarzian_closed, schwarzian_p_fd,
    schwarzian_p_residual, OdeFamily, PeriodIndex, TriangleAngles,
};
use qperiods::lattice::{
    legendre_residual, quasi_periods_direct, quasi_periods_modular, Lattice, ZetaParams,
};
use qperiods::pmap::{
    e2_bound_margin, e2_bound_value, e2_transform_residual, equivariance_residual, eval_p,
    find_e2_zero_on_axis, invert_p, ZeroBracket,
};
use qperiods::qforms::{
    delta_product_coeffs_exact, dim_mk, eval_d, eval_delta, eval_e2, eval_e4, eval_e6, eval_j,
    DeltaMethod, DerivMethod, Form, SeriesParams, TauPoint,
};
use qperiods::sphere::{chordal_distance, SpherePoint};
use qperiods::{Error, Result};

const P: SeriesParams = SeriesParams { order: 400, tol: 1e-13 };

fn tau(re: f64, im: f64) -> TauPoint {
    TauPoint::new(Complex64::new(re, im)).unwrap()
}

fn p_eval(z: Complex64) -> Result<SpherePoint> {
    Ok(eval_p(TauPoint::new(z)?, &P)?.sphere())
}

fn report(number: u32, name: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("criterion {number:02} {name}: {verdict} ({detail})");
    assert!(pass, "criterion {number:02} {name}: {detail}");
}

#[test]
fn criterion_01_special_values() {
    let r = rho();
    let p_i = eval_p(tau(0.0, 1.0), &P).unwrap().sphere();
    let d1 = chordal_distance(p_i, SpherePoint::finite(0.0, -1.0));
    let p_rho = eval_p(tau(r.re, r.im), &P).unwrap().sphere();
    let d2 = chordal_distance(p_rho, SpherePoint::Finite(r.conj()));
    let e4 = eval_e4(tau(r.re, r.im), &P).unwrap().value.norm();
    let e6 = eval_e6(tau(0.0, 1.0), &P).unwrap().value.norm();
    let j_i = (eval_j(tau(0.0, 1.0), &P).unwrap().value - 1.0).norm();
    let j_rho = eval_j(tau(r.re, r.im), &P).unwrap().value.norm();
    let worst = [d1, d2, e4, e6, j_i, j_rho].into_iter().fold(0.0, f64::max);
    report(1, "special-values", worst < 1e-12, &format!("worst residual {worst:.2e}"));
}

#[test]
fn criterion_02_legendre_relation() {
    let mut rng = StdRng::seed_from_u64(1002);
    let mut worst_modular: f64 = 0.0;
    for _ in 0..20 {
        let t = Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.9..3.0));
        let scale = Complex64::new(rng.gen_range(0.5..2.0), rng.gen_range(-0.5..0.5));
        let lat = Lattice::new(t * scale, scale).unwrap();
        let qp = quasi_periods_modular(&lat, &P).unwrap();
        worst_modular = worst_modular.max(legendre_residual(&qp, &lat));
    }
    let square = Lattice::new(Complex64::new(0.0, 1.0), Complex64::new(1.0, 0.0)).unwrap();
    let hex = Lattice::new(Complex64::new(0.5, 3f64.sqrt() / 2.0), Complex64::new(1.0, 0.0))
        .unwrap();
    let mut worst_direct: f64 = 0.0;
    let mut worst_extrapolated: f64 = 0.0;
    for lat in [&square, &hex] {
        let plain = quasi_periods_direct(lat, &ZetaParams { radius: 400, extrapolate: false })
            .unwrap();
        worst_direct = worst_direct.max(legendre_residual(&plain, lat));
        let richardson =
            quasi_periods_direct(lat, &ZetaParams { radius: 400, extrapolate: true }).unwrap();
        worst_extrapolated = worst_extrapolated.max(legendre_residual(&richardson, lat));
    }
    let pass = worst_modular < 1e-10 && worst_direct < 5e-2 && worst_extrapolated < 1e-3;
    report(
        2,
        "legendre-relation",
        pass,
        &format!(
            "modular {worst_modular:.2e}, direct {worst_direct:.2e}, extrapolated {worst_extrapolated:.2e}"
        ),
    );
}

#[test]
fn criterion_03_route_agreement() {
    let square = Lattice::new(Complex64::new(0.0, 1.0), Complex64::new(1.0, 0.0)).unwrap();
    let hex = Lattice::new(Complex64::new(0.5, 3f64.sqrt() / 2.0), Complex64::new(1.0, 0.0))
        .unwrap();
    let mut worst: f64 = 0.0;
    for lat in [&square, &hex] {
        let direct = quasi_periods_direct(lat, &ZetaParams { radius: 400, extrapolate: false })
            .unwrap();
        let modular = quasi_periods_modular(lat, &P).unwrap();
        worst = worst.max((direct.eta2 - modular.eta2).norm() / modular.eta2.norm());
    }
    report(3, "route-agreement", worst < 2e-2, &format!("worst relative gap {worst:.2e}"));
}

#[test]
fn criterion_04_ramanujan_identities() {
    let mut rng = StdRng::seed_from_u64(1004);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let t = tau(rng.gen_range(-0.5..0.5), rng.gen_range(0.6..2.0));
        for form in [Form::E2, Form::E4, Form::E6] {
            let closed = eval_d(form, t, &P, DerivMethod::ClosedForm).unwrap().value;
            let termwise = eval_d(form, t, &P, DerivMethod::Termwise).unwrap().value;
            worst = worst.max((closed - termwise).norm());
        }
        let termwise = eval_d(Form::Delta, t, &P, DerivMethod::Termwise).unwrap().value;
        let delta = eval_delta(t, DeltaMethod::Eisenstein, &P).unwrap().value;
        let e2 = eval_e2(t, &P).unwrap().value;
        worst = worst.max((termwise - delta * e2).norm());
    }
    report(4, "ramanujan-identities", worst < 1e-10, &format!("max residual {worst:.2e}"));
}

#[test]
fn criterion_05_transformation_laws() {
    let mut rng = StdRng::seed_from_u64(1005);
    let words: Vec<UnimodularMap> = tessellate(4)
        .into_iter()
        .filter_map(|w| w.as_unimodular())
        .collect();
    let mut worst_e2: f64 = 0.0;
    let mut worst_even: f64 = 0.0;
    for _ in 0..100 {
        let s = words[rng.gen_range(0..words.len())];
        let t = tau(rng.gen_range(-0.5..0.5), rng.gen_range(0.7..2.0));
        worst_e2 = worst_e2.max(e2_transform_residual(&s, t, &P).unwrap());
        let z = t.get();
        let j = s.denominator_at(z);
        let moved = TauPoint::new(s.apply_complex(z)).unwrap();
        let e4_res = (eval_e4(moved, &P).unwrap().value
            - j.powu(4) * eval_e4(t, &P).unwrap().value)
            .norm();
        let e6_res = (eval_e6(moved, &P).unwrap().value
            - j.powu(6) * eval_e6(t, &P).unwrap().value)
            .norm();
        worst_even = worst_even.max(e4_res).max(e6_res);
    }
    let pass = worst_e2 < 1e-9 && worst_even < 1e-9;
    report(
        5,
        "transformation-laws",
        pass,
        &format!("weight-2 {worst_e2:.2e}, weight-4/6 {worst_even:.2e}"),
    );
}

#[test]
fn criterion_06_product_formula() {
    let mut rng = StdRng::seed_from_u64(1006);
    // Tight tolerance so the relative comparison is meaningful where the
    // discriminant itself is small; the upper end of the Im range keeps the
    // Eisenstein route's cancellation above the rounding floor.
    let tight = SeriesParams { order: 400, tol: 1e-20 };
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let t = tau(rng.gen_range(-0.5..0.5), rng.gen_range(0.5..2.2));
        let a = eval_delta(t, DeltaMethod::Eisenstein, &tight).unwrap().value;
        let b = eval_delta(t, DeltaMethod::Product, &tight).unwrap().value;
        worst = worst.max((a - b).norm() / b.norm());
    }
    let coeffs = delta_product_coeffs_exact(3).unwrap();
    let exact = coeffs[1] == 1 && coeffs[2] == -24 && coeffs[3] == 252;
    report(
        6,
        "product-formula",
        worst < 1e-12 && exact,
        &format!("worst relative gap {worst:.2e}, leading coefficients exact: {exact}"),
    );
}

#[test]
fn criterion_07_ode_residuals() {
    let mut rng = StdRng::seed_from_u64(1007);
    let mut first: f64 = 0.0;
    let mut second: f64 = 0.0;
    let mut checked = 0;
    while checked < 50 {
        let t = tau(rng.gen_range(-0.5..0.5), rng.gen_range(0.8..2.5));
        let k = if checked % 2 == 0 { PeriodIndex::First } else { PeriodIndex::Second };
        let (r1, r2) = match first_order_residual(t, k, &P) {
            Ok(r) => r,
            Err(Error::SingularPoint { .. }) => continue,
            Err(e) => panic!("{e}"),
        };
        first = first.max(r1).max(r2);
        for family in [OdeFamily::H, OdeFamily::Omega] {
            second = second.max(hypergeom_residual(t, k, family, &P).unwrap());
        }
        checked += 1;
    }
    let pass = first < 1e-8 && second < 1e-6;
    report(
        7,
        "ode-residuals",
        pass,
        &format!("first-order {first:.2e}, second-order {second:.2e}"),
    );
}

#[test]
fn criterion_08_schwarzian() {
    let mut rng = StdRng::seed_from_u64(1008);
    let mut fd_worst: f64 = 0.0;
    let mut chain_worst: f64 = 0.0;
    let mut checked = 0;
    while checked < 10 {
        let t = tau(rng.gen_range(-0.4..0.4), rng.gen_range(0.9..2.2));
        let fd = match schwarzian_p_residual(t, 1e-3, &P) {
            Ok(r) => r,
            Err(Error::SingularPoint { .. }) => continue,
            Err(e) => panic!("{e}"),
        };
        fd_worst = fd_worst.max(fd);
        // Chain rule through J: {p,tau} = ({p,J} - {tau,J}) (dJ/dtau)^2.
        let j = eval_j(t, &P).unwrap().value;
        if j.norm() < 0.05 || (j - 1.0).norm() < 0.05 {
            continue;
        }
        let p_angles = TriangleAngles { lambda: 2.0 / 3.0, mu: 0.5, nu: 0.0 };
        let t_angles = TriangleAngles { lambda: 1.0 / 3.0, mu: 0.5, nu: 0.0 };
        let s_p_j = schwarzian_closed(&p_angles, j).unwrap();
        let s_t_j = schwarzian_closed(&t_angles, j).unwrap();
        let dj = eval_d(Form::J, t, &P, DerivMethod::ClosedForm).unwrap().value;
        let jprime = Complex64::new(0.0, 2.0 * PI) * dj;
        let rhs = (s_p_j - s_t_j) * jprime * jprime;
        let lhs = schwarzian_p_fd(t, 1e-3, &P).unwrap();
        chain_worst = chain_worst.max((lhs - rhs).norm());
        checked += 1;
    }
    let pass = fd_worst < 1e-6 && chain_worst < 1e-5;
    report(
        8,
        "schwarzian",
        pass,
        &format!("closed-form gap {fd_worst:.2e}, chain rule {chain_worst:.2e}"),
    );
}

#[test]
fn criterion_09_e2_axis_zero() {
    // Bracket validity by signs: E2(i) = 3/pi > 0 and, through the
    // transformation law, E2(i/2) = -4 E2(2i) + 12/pi < 0.
    let high = eval_e2(tau(0.0, 1.0), &P).unwrap().value.re;
    let e2_2i = eval_e2(tau(0.0, 2.0), &P).unwrap().value.re;
    let low_via_law = -4.0 * e2_2i + 12.0 / PI;
    let low_direct = eval_e2(tau(0.0, 0.5), &P).unwrap().value.re;
    let bracket_ok = high > 0.0 && low_via_law < 0.0 && low_direct < 0.0;
    let zero = find_e2_zero_on_axis(&ZeroBracket { lo: 0.5, hi: 1.0 }, 1e-12, &P).unwrap();
    let s = zero.im();
    let residual = eval_e2(zero, &P).unwrap().value.norm();
    let lat = Lattice::new(zero.get(), Complex64::new(1.0, 0.0)).unwrap();
    let qp = quasi_periods_modular(&lat, &P).unwrap();
    let eta2 = qp.eta2.norm();
    let eta1 = (qp.eta1 + Complex64::new(0.0, 2.0 * PI)).norm();
    let pass = bracket_ok
        && s > 0.5
        && s < 1.0
        && residual < 1e-12
        && eta2 < 1e-10
        && eta1 < 1e-10;
    report(
        9,
        "e2-axis-zero",
        pass,
        &format!("s* = {s:.12}, |E2| = {residual:.2e}, |eta2| = {eta2:.2e}, |eta1 + 2 pi i| = {eta1:.2e}"),
    );
}

#[test]
fn criterion_10_e2_bound() {
    let corner = tau(0.0, 3f64.sqrt() / 2.0);
    let bound = e2_bound_value(corner);
    let bound_ok = (bound - 0.105).abs() <= 1e-3;
    let mut rng = StdRng::seed_from_u64(1010);
    let mut worst_margin = f64::INFINITY;
    for _ in 0..200 {
        let t = tau(rng.gen_range(-0.5..0.5), rng.gen_range(3f64.sqrt() / 2.0..4.0));
        worst_margin = worst_margin.min(e2_bound_margin(t, &P).unwrap());
    }
    let pass = bound_ok && worst_margin >= 0.0;
    report(
        10,
        "e2-bound",
        pass,
        &format!("bound at the corner {bound:.5}, smallest margin {worst_margin:.2e}"),
    );
}

#[test]
fn criterion_11_main_theorem() {
    let report_map =
        verify_boundary_map(p_eval, &ArcTriangle::t0(), &ArcTriangle::t1(), 200, 12.0).unwrap();
    let side_worst = report_map
        .sides
        .iter()
        .map(|s| s.max_circle_distance)
        .fold(0.0, f64::max);
    let monotone = report_map.sides.iter().all(|s| s.monotonic);
    let boundary_ok = side_worst < 1e-10
        && monotone
        && report_map.orientation_ok
        && report_map.vertex_max_distance < 1e-10
        && report_map.injectivity_min_separation > 1e-9
        && report_map.local_injectivity_ok == Some(true);

    let interior = [
        (0.25, -0.25),
        (0.1, -0.5),
        (0.4, -0.3),
        (0.25, 0.5),
        (0.1, 1.5),
        (0.45, 2.0),
        (0.05, -0.7),
        (0.3, -0.6),
        (0.45, -0.05),
        (0.2, 3.0),
    ];
    let exterior = [(-0.5, 1.0), (-0.25, 0.5), (0.75, 1.0), (0.25, -1.2), (-0.3, -0.5)];
    let t0 = ArcTriangle::t0();
    let mut counts_ok = true;
    for (re, im) in interior {
        let n = argument_principle_count(p_eval, &t0, Complex64::new(re, im), 200, 12.0)
            .unwrap();
        counts_ok &= n == 1;
    }
    for (re, im) in exterior {
        let n = argument_principle_count(p_eval, &t0, Complex64::new(re, im), 200, 12.0)
            .unwrap();
        counts_ok &= n == 0;
    }
    report(
        11,
        "main-theorem",
        boundary_ok && counts_ok,
        &format!(
            "side distance {side_worst:.2e}, monotone {monotone}, orientation {}, counts {counts_ok}",
            report_map.orientation_ok
        ),
    );
}

#[test]
fn criterion_12_corollaries() {
    let mut rng = StdRng::seed_from_u64(1012);
    let words = tessellate(4);
    let mut worst_equivariance: f64 = 0.0;
    for _ in 0..100 {
        let g = words[rng.gen_range(0..words.len())];
        let t = tau(rng.gen_range(-0.5..0.5), rng.gen_range(0.9..2.5));
        worst_equivariance = worst_equivariance.max(equivariance_residual(&g, t, &P).unwrap());
    }
    let mut inversion_ok = true;
    let mut found_total = 0;
    for _ in 0..5 {
        let w = SpherePoint::finite(rng.gen_range(-0.8..0.8), rng.gen_range(-0.8..2.0));
        let sols = invert_p(w, 3, 1e-9, &P).unwrap();
        inversion_ok &= sols.len() >= 3;
        found_total += sols.len();
        for s in &sols {
            let pv = eval_p(*s, &P).unwrap();
            inversion_ok &= chordal_distance(pv.sphere(), w) < 1e-9;
        }
    }
    let pass = worst_equivariance < 1e-9 && inversion_ok;
    report(
        12,
        "corollaries",
        pass,
        &format!("equivariance {worst_equivariance:.2e}, preimages found {found_total}/15"),
    );
}

#[test]
fn criterion_13_dimension_formula() {
    // Independent table from the two congruence branches, frozen by hand.
    let expected: [(u32, u32); 15] = [
        (2, 0),
        (4, 1),
        (6, 1),
        (8, 1),
        (10, 1),
        (12, 2),
        (14, 1),
        (16, 2),
        (18, 2),
        (20, 2),
        (22, 2),
        (24, 3),
        (26, 2),
        (28, 3),
        (30, 3),
    ];
    let mut pass = true;
    for (k, dim) in expected {
        pass &= dim_mk(k) == dim;
        pass &= dim_mk(k - 1) == 0;
    }
    report(13, "dimension-formula", pass, "k = 2..30 against the frozen table");
}
