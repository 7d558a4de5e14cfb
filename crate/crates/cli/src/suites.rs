//! Verification suites: machine checks of the identities and the mapping
//! theorem, reported as one JSON line per check.

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

#[derive(Debug, Clone, Copy)]
pub struct RunConfig {
    pub params: SeriesParams,
    pub radius: u32,
    pub cutoff: f64,
}

#[derive(Debug, Clone)]
pub struct Check {
    pub suite: &'static str,
    pub name: &'static str,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    fn residual(suite: &'static str, name: &'static str, residual: f64, threshold: f64) -> Check {
        Check { suite, name, residual, threshold, pass: residual < threshold }
    }

    fn flag(suite: &'static str, name: &'static str, pass: bool) -> Check {
        Check { suite, name, residual: if pass { 0.0 } else { 1.0 }, threshold: 1.0, pass }
    }
}

pub const SUITES: [&str; 8] = [
    "legendre",
    "ramanujan",
    "ode",
    "schwarzian",
    "equivariance",
    "theorem-main",
    "bounds",
    "all",
];

pub fn run_suite(name: &str, cfg: &RunConfig) -> Result<Vec<Check>> {
    match name {
        "legendre" => legendre(cfg),
        "ramanujan" => ramanujan(cfg),
        "ode" => ode(cfg),
        "schwarzian" => schwarzian(cfg),
        "equivariance" => equivariance(cfg),
        "theorem-main" => theorem_main(cfg),
        "bounds" => bounds(cfg),
        "all" => {
            let mut out = Vec::new();
            for suite in &SUITES[..7] {
                out.extend(run_suite(suite, cfg)?);
            }
            Ok(out)
        }
        _ => Err(Error::NotFound { diagnostics: format!("unknown suite '{name}'") }),
    }
}

fn tau(re: f64, im: f64) -> TauPoint {
    TauPoint::new(Complex64::new(re, im)).expect("upper half-plane")
}

fn square_lattice() -> Lattice {
    Lattice::new(Complex64::new(0.0, 1.0), Complex64::new(1.0, 0.0)).unwrap()
}

fn hexagonal_lattice() -> Lattice {
    Lattice::new(Complex64::new(0.5, 3f64.sqrt() / 2.0), Complex64::new(1.0, 0.0)).unwrap()
}

fn legendre(cfg: &RunConfig) -> Result<Vec<Check>> {
    let mut rng = StdRng::seed_from_u64(2001);
    let mut modular: f64 = 0.0;
    for _ in 0..20 {
        let t = Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.9..3.0));
        let scale = Complex64::new(rng.gen_range(0.5..2.0), rng.gen_range(-0.5..0.5));
        let lat = Lattice::new(t * scale, scale)?;
        let qp = quasi_periods_modular(&lat, &cfg.params)?;
        modular = modular.max(legendre_residual(&qp, &lat));
    }
    let mut direct: f64 = 0.0;
    let mut extrapolated: f64 = 0.0;
    let mut agreement: f64 = 0.0;
    for lat in [square_lattice(), hexagonal_lattice()] {
        let plain =
            quasi_periods_direct(&lat, &ZetaParams { radius: cfg.radius, extrapolate: false })?;
        direct = direct.max(legendre_residual(&plain, &lat));
        let rich =
            quasi_periods_direct(&lat, &ZetaParams { radius: cfg.radius, extrapolate: true })?;
        extrapolated = extrapolated.max(legendre_residual(&rich, &lat));
        let modular_qp = quasi_periods_modular(&lat, &cfg.params)?;
        agreement =
            agreement.max((plain.eta2 - modular_qp.eta2).norm() / modular_qp.eta2.norm());
    }
    Ok(vec![
        Check::residual("legendre", "modular-route", modular, 1e-10),
        Check::residual("legendre", "direct-route", direct, 5e-2),
        Check::residual("legendre", "extrapolated-route", extrapolated, 1e-3),
        Check::residual("legendre", "route-agreement", agreement, 2e-2),
    ])
}

fn ramanujan(cfg: &RunConfig) -> Result<Vec<Check>> {
    let mut rng = StdRng::seed_from_u64(2002);
    let mut identities: f64 = 0.0;
    let mut d_delta: f64 = 0.0;
    for _ in 0..40 {
        let t = tau(rng.gen_range(-0.5..0.5), rng.gen_range(0.6..2.0));
        for form in [Form::E2, Form::E4, Form::E6] {
            let closed = eval_d(form, t, &cfg.params, DerivMethod::ClosedForm)?.value;
            let termwise = eval_d(form, t, &cfg.params, DerivMethod::Termwise)?.value;
            identities = identities.max((closed - termwise).norm());
        }
        let termwise = eval_d(Form::Delta, t, &cfg.params, DerivMethod::Termwise)?.value;
        let delta = eval_delta(t, DeltaMethod::Eisenstein, &cfg.params)?.value;
        let e2 = eval_e2(t, &cfg.params)?.value;
        d_delta = d_delta.max((termwise - delta * e2).norm());
    }
    let tight = SeriesParams { order: cfg.params.order, tol: 1e-20 };
    let mut methods: f64 = 0.0;
    for _ in 0..20 {
        let t = tau(rng.gen_range(-0.5..0.5), rng.gen_range(0.5..2.2));
        let a = eval_delta(t, DeltaMethod::Eisenstein, &tight)?.value;
        let b = eval_delta(t, DeltaMethod::Product, &tight)?.value;
        methods = methods.max((a - b).norm() / b.norm());
    }
    let coeffs = delta_product_coeffs_exact(3)?;
    let exact = coeffs[1] == 1 && coeffs[2] == -24 && coeffs[3] == 252;
    Ok(vec![
        Check::residual("ramanujan", "derivative-identities", identities, 1e-10),
        Check::residual("ramanujan", "discriminant-derivative", d_delta, 1e-10),
        Check::residual("ramanujan", "product-vs-eisenstein", methods, 1e-12),
        Check::flag("ramanujan", "product-coefficients-exact", exact),
    ])
}

fn ode(cfg: &RunConfig) -> Result<Vec<Check>> {
    let mut rng = StdRng::seed_from_u64(2003);
    let mut first: f64 = 0.0;
    let mut second: f64 = 0.0;
    let mut checked = 0;
    while checked < 20 {
        let t = tau(rng.gen_range(-0.5..0.5), rng.gen_range(0.8..2.5));
        let k = if checked % 2 == 0 { PeriodIndex::First } else { PeriodIndex::Second };
        let (r1, r2) = match first_order_residual(t, k, &cfg.params) {
            Ok(r) => r,
            Err(Error::SingularPoint { .. }) => continue,
            Err(e) => return Err(e),
        };
        first = first.max(r1).max(r2);
        for family in [OdeFamily::H, OdeFamily::Omega] {
            second = second.max(hypergeom_residual(t, k, family, &cfg.params)?);
        }
        checked += 1;
    }
    Ok(vec![
        Check::residual("ode", "first-order-system", first, 1e-8),
        Check::residual("ode", "second-order-equations", second, 1e-6),
    ])
}

fn schwarzian(cfg: &RunConfig) -> Result<Vec<Check>> {
    let mut rng = StdRng::seed_from_u64(2004);
    let mut closed_gap: f64 = 0.0;
    let mut chain: f64 = 0.0;
    let mut checked = 0;
    while checked < 6 {
        let t = tau(rng.gen_range(-0.4..0.4), rng.gen_range(0.9..2.2));
        let gap = match schwarzian_p_residual(t, 1e-3, &cfg.params) {
            Ok(r) => r,
            Err(Error::SingularPoint { .. }) => continue,
            Err(e) => return Err(e),
        };
        closed_gap = closed_gap.max(gap);
        let j = eval_j(t, &cfg.params)?.value;
        if j.norm() < 0.05 || (j - 1.0).norm() < 0.05 {
            continue;
        }
        let p_angles = TriangleAngles { lambda: 2.0 / 3.0, mu: 0.5, nu: 0.0 };
        let t_angles = TriangleAngles { lambda: 1.0 / 3.0, mu: 0.5, nu: 0.0 };
        let s_p = schwarzian_closed(&p_angles, j)?;
        let s_t = schwarzian_closed(&t_angles, j)?;
        let dj = eval_d(Form::J, t, &cfg.params, DerivMethod::ClosedForm)?.value;
        let jprime = Complex64::new(0.0, 2.0 * PI) * dj;
        let rhs = (s_p - s_t) * jprime * jprime;
        let lhs = schwarzian_p_fd(t, 1e-3, &cfg.params)?;
        chain = chain.max((lhs - rhs).norm());
        checked += 1;
    }
    Ok(vec![
        Check::residual("schwarzian", "closed-form", closed_gap, 1e-6),
        Check::residual("schwarzian", "chain-rule", chain, 1e-5),
    ])
}

fn equivariance(cfg: &RunConfig) -> Result<Vec<Check>> {
    let mut rng = StdRng::seed_from_u64(2005);
    let words = tessellate(4);
    let mut moved: f64 = 0.0;
    for _ in 0..60 {
        let g = words[rng.gen_range(0..words.len())];
        let t = tau(rng.gen_range(-0.5..0.5), rng.gen_range(0.9..2.5));
        moved = moved.max(equivariance_residual(&g, t, &cfg.params)?);
    }
    let holomorphic: Vec<UnimodularMap> =
        words.iter().filter_map(|w| w.as_unimodular()).collect();
    let mut laws: f64 = 0.0;
    for _ in 0..60 {
        let s = holomorphic[rng.gen_range(0..holomorphic.len())];
        let t = tau(rng.gen_range(-0.5..0.5), rng.gen_range(0.7..2.0));
        laws = laws.max(e2_transform_residual(&s, t, &cfg.params)?);
        let z = t.get();
        let j = s.denominator_at(z);
        let moved_tau = TauPoint::new(s.apply_complex(z))?;
        laws = laws.max(
            (eval_e4(moved_tau, &cfg.params)?.value - j.powu(4) * eval_e4(t, &cfg.params)?.value)
                .norm(),
        );
        laws = laws.max(
            (eval_e6(moved_tau, &cfg.params)?.value - j.powu(6) * eval_e6(t, &cfg.params)?.value)
                .norm(),
        );
    }
    let mut inversion: f64 = 0.0;
    let mut found_enough = true;
    for _ in 0..2 {
        let w = SpherePoint::finite(rng.gen_range(-0.8..0.8), rng.gen_range(-0.8..2.0));
        let sols = invert_p(w, 3, 1e-9, &cfg.params)?;
        found_enough &= sols.len() >= 3;
        for s in &sols {
            let pv = eval_p(*s, &cfg.params)?;
            inversion = inversion.max(chordal_distance(pv.sphere(), w));
        }
    }
    Ok(vec![
        Check::residual("equivariance", "extended-group", moved, 1e-9),
        Check::residual("equivariance", "transformation-laws", laws, 1e-9),
        Check::residual("equivariance", "inversion-residual", inversion, 1e-9),
        Check::flag("equivariance", "inversion-count", found_enough),
    ])
}

fn theorem_main(cfg: &RunConfig) -> Result<Vec<Check>> {
    let p_eval =
        |z: Complex64| -> Result<SpherePoint> { Ok(eval_p(TauPoint::new(z)?, &cfg.params)?.sphere()) };
    let r = rho();
    let special = [
        chordal_distance(
            eval_p(tau(0.0, 1.0), &cfg.params)?.sphere(),
            SpherePoint::finite(0.0, -1.0),
        ),
        chordal_distance(
            eval_p(tau(r.re, r.im), &cfg.params)?.sphere(),
            SpherePoint::Finite(r.conj()),
        ),
        eval_e4(tau(r.re, r.im), &cfg.params)?.value.norm(),
        eval_e6(tau(0.0, 1.0), &cfg.params)?.value.norm(),
        (eval_j(tau(0.0, 1.0), &cfg.params)?.value - 1.0).norm(),
        eval_j(tau(r.re, r.im), &cfg.params)?.value.norm(),
    ]
    .into_iter()
    .fold(0.0, f64::max);

    let report =
        verify_boundary_map(p_eval, &ArcTriangle::t0(), &ArcTriangle::t1(), 200, cfg.cutoff)?;
    let side = report.sides.iter().map(|s| s.max_circle_distance).fold(0.0, f64::max);
    let structure = report.sides.iter().all(|s| s.monotonic)
        && report.orientation_ok
        && report.injectivity_min_separation > 1e-9
        && report.local_injectivity_ok != Some(false);

    let t0 = ArcTriangle::t0();
    let mut counts = true;
    for (re, im) in [(0.25, -0.25), (0.1, 1.5), (0.4, -0.3), (0.25, 0.5)] {
        counts &=
            argument_principle_count(p_eval, &t0, Complex64::new(re, im), 200, cfg.cutoff)? == 1;
    }
    for (re, im) in [(-0.5, 1.0), (0.75, 1.0)] {
        counts &=
            argument_principle_count(p_eval, &t0, Complex64::new(re, im), 200, cfg.cutoff)? == 0;
    }
    Ok(vec![
        Check::residual("theorem-main", "special-values", special, 1e-12),
        Check::residual("theorem-main", "boundary-distance", side, 1e-10),
        Check::flag("theorem-main", "boundary-structure", structure),
        Check::residual("theorem-main", "vertex-images", report.vertex_max_distance, 1e-10),
        Check::flag("theorem-main", "argument-principle-counts", counts),
    ])
}

fn bounds(cfg: &RunConfig) -> Result<Vec<Check>> {
    let corner = tau(0.0, 3f64.sqrt() / 2.0);
    let corner_gap = (e2_bound_value(corner) - 0.105).abs();
    let mut rng = StdRng::seed_from_u64(2007);
    let mut min_margin = f64::INFINITY;
    for _ in 0..100 {
        let t = tau(rng.gen_range(-0.5..0.5), rng.gen_range(3f64.sqrt() / 2.0..4.0));
        min_margin = min_margin.min(e2_bound_margin(t, &cfg.params)?);
    }
    let zero = find_e2_zero_on_axis(&ZeroBracket::default(), 1e-12, &cfg.params)?;
    let zero_residual = eval_e2(zero, &cfg.params)?.value.norm();
    let lat = Lattice::new(zero.get(), Complex64::new(1.0, 0.0))?;
    let qp = quasi_periods_modular(&lat, &cfg.params)?;
    let singly_periodic = qp
        .eta2
        .norm()
        .max((qp.eta1 + Complex64::new(0.0, 2.0 * PI)).norm());
    let mut dims = true;
    for (k, d) in [(2u32, 0u32), (4, 1), (6, 1), (12, 2), (14, 1), (24, 3), (26, 2), (30, 3)] {
        dims &= dim_mk(k) == d;
    }
    Ok(vec![
        Check::residual("bounds", "corner-bound-value", corner_gap, 1e-3),
        Check::flag("bounds", "margin-nonnegative", min_margin >= 0.0),
        Check::residual("bounds", "axis-zero-residual", zero_residual, 1e-12),
        Check::residual("bounds", "singly-periodic-lattice", singly_periodic, 1e-10),
        Check::flag("bounds", "dimension-table", dims),
    ])
}
