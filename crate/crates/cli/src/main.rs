//! Command-line front end: evaluation of the modular stack and the
//! quasi-period map, verification suites, the axis zero of E2, inversion of
//! p, tessellation rendering, and grid export.
//!
//! Exit codes: 0 success, 1 evaluation or verification failure, 2 bad input.

mod emit;
mod parse;
mod suites;
mod svg;

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;

use qperiods::lattice::{quasi_periods_modular, Lattice};
use qperiods::pmap::{eval_p, find_e2_zero_on_axis, invert_p, ZeroBracket};
use qperiods::qforms::{
    delta_root, eval_delta, eval_e2, eval_e4, eval_e6, eval_j, DeltaMethod, FormValue,
    SeriesParams, TauPoint,
};
use qperiods::sphere::{chordal_distance, SpherePoint};

use emit::{fmt_f64, json_field_f64, json_field_str, json_object, write_output};
use suites::RunConfig;

#[derive(Parser)]
#[command(
    name = "qperiods",
    about = "Quasi-periods of the Weierstrass zeta-function and the ratio map p = eta1/eta2",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Target absolute tolerance for series evaluation.
    #[arg(long, global = true, default_value_t = 1e-13)]
    tol: f64,

    /// Maximum number of q-powers kept in any series.
    #[arg(long, global = true, default_value_t = 400)]
    order: usize,

    /// Window radius for direct lattice sums.
    #[arg(long, global = true, default_value_t = 400)]
    radius: u32,

    /// Truncation height for unbounded triangle sides.
    #[arg(long, global = true, default_value_t = 12.0)]
    cutoff: f64,

    /// Output format (json, csv or svg; each command has its natural default).
    #[arg(long, global = true)]
    format: Option<String>,

    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a quantity at a point or lattice.
    Eval {
        /// One of: E2, E4, E6, Delta, J, p, pprime, eta1, eta2, Omega1,
        /// Omega2, H1, H2.
        quantity: String,
        /// Point of the upper half-plane, e.g. "0.5+0.866i".
        #[arg(long, allow_hyphen_values = true)]
        tau: Option<String>,
        /// Lattice generators "omega1,omega2"; normalised first.
        #[arg(long, allow_hyphen_values = true)]
        lattice: Option<String>,
    },
    /// Run a verification suite (legendre, ramanujan, ode, schwarzian,
    /// equivariance, theorem-main, bounds, all).
    Verify { suite: String },
    /// Locate the zero of E2 on the positive imaginary axis.
    Zeros,
    /// Find preimages of a point under p.
    Invert {
        /// Target value, e.g. "-i".
        #[arg(long, allow_hyphen_values = true)]
        w: String,
        /// Number of distinct preimages requested.
        #[arg(long, default_value_t = 3)]
        count: usize,
    },
    /// Render the reflection tessellation of the fundamental triangle as SVG.
    Tessellate {
        /// Maximum reflection word length.
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// Evaluate p on a grid over the fundamental strip and export CSV rows.
    Grid {
        /// Points per axis.
        #[arg(long, default_value_t = 41)]
        count: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let params = SeriesParams { order: cli.order, tol: cli.tol };
    let tol_ok = cli.tol > 0.0 && cli.tol.is_finite();
    let cutoff_ok = cli.cutoff > 0.0 && cli.cutoff.is_finite();
    if !tol_ok || cli.order == 0 || cli.radius < 10 || !cutoff_ok {
        eprintln!("error: numeric options must be positive (and --radius at least 10)");
        return ExitCode::from(2);
    }
    let cfg = RunConfig { params, radius: cli.radius, cutoff: cli.cutoff };
    let result = match &cli.command {
        Command::Eval { quantity, tau, lattice } => {
            cmd_eval(quantity, tau.as_deref(), lattice.as_deref(), &cli, &params)
        }
        Command::Verify { suite } => cmd_verify(suite, &cli, &cfg),
        Command::Zeros => cmd_zeros(&cli, &params),
        Command::Invert { w, count } => cmd_invert(w, *count, &cli, &params),
        Command::Tessellate { depth } => cmd_tessellate(*depth, &cli),
        Command::Grid { count } => cmd_grid(*count, &cli, &params),
    };
    match result {
        Ok(code) => code,
        Err(CliError::BadInput(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Evaluation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

enum CliError {
    BadInput(String),
    Evaluation(String),
}

impl From<qperiods::Error> for CliError {
    fn from(e: qperiods::Error) -> Self {
        CliError::Evaluation(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Evaluation(format!("cannot write output: {e}"))
    }
}

type CliResult = Result<ExitCode, CliError>;

fn expect_format(cli: &Cli, natural: &str) -> Result<(), CliError> {
    if let Some(f) = &cli.format {
        if f != natural {
            return Err(CliError::BadInput(format!(
                "format '{f}' is not available here (expected {natural})"
            )));
        }
    }
    Ok(())
}

/// Resolve the input point: an explicit tau, or the ratio of a lattice pair.
fn resolve_tau(
    tau: Option<&str>,
    lattice: Option<&str>,
) -> Result<(TauPoint, Option<Lattice>, String), CliError> {
    match (tau, lattice) {
        (Some(t), None) => {
            let z = parse::parse_complex(t).map_err(CliError::BadInput)?;
            let tp = TauPoint::new(z)
                .map_err(|e| CliError::BadInput(format!("--tau: {e}")))?;
            Ok((tp, None, t.to_string()))
        }
        (None, Some(l)) => {
            let (w1, w2) = parse::parse_lattice(l).map_err(CliError::BadInput)?;
            let lat = Lattice::new(w1, w2)
                .map_err(|e| CliError::BadInput(format!("--lattice: {e}")))?;
            Ok((lat.tau(), Some(lat), l.to_string()))
        }
        (Some(_), Some(_)) => {
            Err(CliError::BadInput("give either --tau or --lattice, not both".into()))
        }
        (None, None) => Err(CliError::BadInput("one of --tau or --lattice is required".into())),
    }
}

fn form_value_record(quantity: &str, input: &str, fv: &FormValue) -> String {
    json_object(&[
        json_field_str("quantity", quantity),
        json_field_str("input", input),
        json_field_f64("value_re", fv.value.re),
        json_field_f64("value_im", fv.value.im),
        json_field_f64("tail_bound", fv.tail_bound),
    ])
}

fn cmd_eval(
    quantity: &str,
    tau: Option<&str>,
    lattice: Option<&str>,
    cli: &Cli,
    params: &SeriesParams,
) -> CliResult {
    expect_format(cli, "json")?;
    let (tp, lat, input) = resolve_tau(tau, lattice)?;
    let lat = lat.unwrap_or_else(|| {
        Lattice::new(tp.get(), Complex64::new(1.0, 0.0)).expect("tau is in the upper half-plane")
    });
    let fv = match quantity {
        "E2" | "e2" => eval_e2(tp, params)?,
        "E4" | "e4" => eval_e4(tp, params)?,
        "E6" | "e6" => eval_e6(tp, params)?,
        "Delta" | "delta" => eval_delta(tp, DeltaMethod::Product, params)?,
        "J" | "j" => eval_j(tp, params)?,
        "p" => {
            let e2 = eval_e2(tp, params)?;
            let pv = eval_p(tp, params)?;
            if pv.at_infinity {
                return Err(CliError::Evaluation(
                    "p is at infinity here (E2 vanishes to machine precision)".into(),
                ));
            }
            let denom = e2.value.norm();
            let tail = if denom > e2.tail_bound {
                6.0 / PI * e2.tail_bound / (denom * (denom - e2.tail_bound))
            } else {
                f64::INFINITY
            };
            FormValue { value: pv.value, tail_bound: tail }
        }
        "pprime" => {
            let e4 = eval_e4(tp, params)?;
            let e2 = eval_e2(tp, params)?;
            e4.div(&e2.mul(&e2))?
        }
        "eta1" | "eta2" => {
            let e2 = eval_e2(tp, params)?;
            let qp = quasi_periods_modular(&lat, params)?;
            let scale = PI * PI / (3.0 * lat.omega2().norm());
            let tail = if quantity == "eta2" {
                scale * e2.tail_bound
            } else {
                scale * tp.get().norm() * e2.tail_bound
            };
            let value = if quantity == "eta2" { qp.eta2 } else { qp.eta1 };
            FormValue { value, tail_bound: tail }
        }
        "Omega1" | "Omega2" | "omega1" | "omega2" => {
            let root = delta_root(tp, 12, params)?;
            if quantity.ends_with('2') {
                root
            } else {
                root.scale(tp.get())
            }
        }
        "H1" | "H2" | "h1" | "h2" => {
            let root = delta_root(tp, 12, params)?;
            let e2 = eval_e2(tp, params)?;
            if quantity.ends_with('2') {
                e2.div(&root)?
            } else {
                let numerator = e2
                    .scale(tp.get())
                    .sub(&FormValue::exact(Complex64::new(0.0, 6.0 / PI)));
                numerator.div(&root)?
            }
        }
        other => {
            return Err(CliError::BadInput(format!("unknown quantity '{other}'")));
        }
    };
    let mut line = form_value_record(quantity, &input, &fv);
    line.push('\n');
    write_output(cli.out.as_deref(), &line)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(suite: &str, cli: &Cli, cfg: &RunConfig) -> CliResult {
    expect_format(cli, "json")?;
    if !suites::SUITES.contains(&suite) {
        return Err(CliError::BadInput(format!(
            "unknown suite '{suite}' (try one of {})",
            suites::SUITES.join(", ")
        )));
    }
    let checks = suites::run_suite(suite, cfg)?;
    let mut output = String::new();
    let mut all_pass = true;
    for c in &checks {
        all_pass &= c.pass;
        output.push_str(&json_object(&[
            json_field_str("suite", c.suite),
            json_field_str("check", c.name),
            format!("\"pass\": {}", c.pass),
            json_field_f64("residual", c.residual),
            json_field_f64("threshold", c.threshold),
        ]));
        output.push('\n');
    }
    write_output(cli.out.as_deref(), &output)?;
    if all_pass {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}

fn cmd_zeros(cli: &Cli, params: &SeriesParams) -> CliResult {
    expect_format(cli, "json")?;
    let zero = find_e2_zero_on_axis(&ZeroBracket::default(), params.tol.max(1e-13), params)?;
    let residual = eval_e2(zero, params)?.value.norm();
    let mut line = json_object(&[
        json_field_f64("s_star", zero.im()),
        json_field_f64("E2_residual", residual),
    ]);
    line.push('\n');
    write_output(cli.out.as_deref(), &line)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_invert(w: &str, count: usize, cli: &Cli, params: &SeriesParams) -> CliResult {
    expect_format(cli, "json")?;
    let target = parse::parse_complex(w).map_err(CliError::BadInput)?;
    let target = SpherePoint::Finite(target);
    let solutions = invert_p(target, count, 1e-9, params)?;
    let mut output = String::from("[\n");
    for (k, s) in solutions.iter().enumerate() {
        let pv = eval_p(*s, params)?;
        let residual = chordal_distance(pv.sphere(), target);
        output.push_str("  ");
        output.push_str(&json_object(&[
            json_field_f64("re", s.get().re),
            json_field_f64("im", s.get().im),
            json_field_f64("residual", residual),
        ]));
        if k + 1 < solutions.len() {
            output.push(',');
        }
        output.push('\n');
    }
    output.push_str("]\n");
    write_output(cli.out.as_deref(), &output)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_tessellate(depth: usize, cli: &Cli) -> CliResult {
    expect_format(cli, "svg")?;
    if depth > 12 {
        return Err(CliError::BadInput("depth is limited to 12".into()));
    }
    let doc = svg::render_tessellation(depth);
    write_output(cli.out.as_deref(), &doc)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_grid(count: usize, cli: &Cli, params: &SeriesParams) -> CliResult {
    expect_format(cli, "csv")?;
    if count < 2 {
        return Err(CliError::BadInput("--count must be at least 2".into()));
    }
    let mut output = String::from("re_tau,im_tau,re_p,im_p\n");
    for iy in 0..count {
        for ix in 0..count {
            let re = -0.5 + (ix as f64) / (count - 1) as f64;
            let im = 0.55 + 2.5 * (iy as f64) / (count - 1) as f64;
            let tp = TauPoint::new(Complex64::new(re, im)).expect("grid stays above the axis");
            let pv = eval_p(tp, params)?;
            if pv.at_infinity {
                continue;
            }
            output.push_str(&format!(
                "{},{},{},{}\n",
                fmt_f64(re),
                fmt_f64(im),
                fmt_f64(pv.value.re),
                fmt_f64(pv.value.im)
            ));
        }
    }
    write_output(cli.out.as_deref(), &output)?;
    Ok(ExitCode::SUCCESS)
}
