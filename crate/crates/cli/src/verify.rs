use std::io::Write;
use std::path::PathBuf;

use quermass_core::error::Error;
use quermass_core::flow::{run, FlowConfig, FlowMode};
use quermass_core::geometry::{compute_geometry, kconvex_report_tol, make_shape, Convexity, RadialGraph, ShapeSpec};
use quermass_core::verify::{
    check_af_chain, check_first_variation, check_lemma_integral, check_minkowski, check_monotone_series,
    check_prop1_axisymmetric, check_prop1_convergence, check_prop1_pointwise, check_symfunc_suite, sort_reports, write_report_csv,
    IdentityReport, LagrangianCurve, MonotoneTolerances,
};
use rayon::prelude::*;

use crate::config::{ConfigError, RunConfig};
use crate::run::{initial_graph, shape_error};
use crate::{create_file, CliError, Outcome, Suite};

type Reports = Result<Vec<IdentityReport>, CliError>;

/// Geometric preconditions of a check are configuration problems.
fn precondition(e: Error) -> CliError {
    match e {
        Error::ConeExit { .. } | Error::OutsideCone { .. } | Error::InvalidShape(_) | Error::NonPositiveRadius { .. } => {
            CliError::Config(ConfigError::new("shape", format!("precondition failed: {e}")))
        }
        Error::InvalidGrid(_) => CliError::Config(ConfigError::new("grid.N", e.to_string())),
        other => CliError::Numerical(other.to_string()),
    }
}

fn renamed(mut reports: Vec<IdentityReport>, from: &str, to: &str) -> Vec<IdentityReport> {
    for r in &mut reports {
        r.check = r.check.replacen(from, to, 1);
    }
    reports
}

fn symfunc(cfg: &RunConfig) -> Reports {
    Ok(check_symfunc_suite(cfg.verify.symfunc_samples, 6, cfg.verify.symfunc_seed))
}

fn geometry(cfg: &RunConfig) -> Reports {
    let spec = cfg.shape_spec()?;
    let g = make_shape(&spec, cfg.problem.n, cfg.verify.minkowski_intervals).map_err(shape_error)?;
    let geo = compute_geometry(&g).map_err(precondition)?;
    check_minkowski(&geo, cfg.verify.minkowski_tol).map_err(precondition)
}

/// Conics use their trigonometric parametrization, which resolves them with far
/// fewer points than sampling by polar angle. For `n = 2` the curve is the
/// meridian, with the axis of revolution along `x`.
fn curve_at(spec: &ShapeSpec, n: usize, m: usize) -> quermass_core::Result<LagrangianCurve> {
    match (*spec, n) {
        (ShapeSpec::Sphere { radius }, _) => LagrangianCurve::ellipse(radius, radius, m),
        (ShapeSpec::Ellipse { a, b }, 1) => LagrangianCurve::ellipse(a, b, m),
        (ShapeSpec::EllipsoidOfRevolution { a, c }, 2) => LagrangianCurve::ellipse(c, a, m),
        (_, 1) => LagrangianCurve::from_radial(&make_shape(spec, 1, m)?),
        _ => LagrangianCurve::from_radial(&make_shape(spec, 2, m / 2)?),
    }
}

fn prop1(cfg: &RunConfig) -> Reports {
    let v = &cfg.verify;
    if v.prop1_levels.len() < 2 {
        return Err(ConfigError::new("verify.prop1_levels", "needs at least two (M, dt) levels").into());
    }
    let (n, k) = (cfg.problem.n, cfg.problem.k);
    let round = curve_at(&ShapeSpec::Sphere { radius: 1.0 }, n, 32).map_err(precondition)?;
    let mut out = match n {
        1 => renamed(check_prop1_pointwise(&round, k, v.prop1_dt, v.prop1_tol).map_err(precondition)?, "prop1.", "prop1.circle."),
        _ => renamed(
            check_prop1_axisymmetric(&round, k, v.prop1_dt, v.prop1_tol).map_err(precondition)?,
            "prop1.",
            &format!("prop1.sphere.k{k}."),
        ),
    };
    let spec = cfg.shape_spec()?;
    let ratios = check_prop1_convergence(|m| curve_at(&spec, n, m), n, k, &v.prop1_levels, 4.0, 0.5)
        .map_err(precondition)?;
    out.extend(if n == 1 { ratios } else { renamed(ratios, "prop1.", &format!("prop1.k{k}.")) });
    Ok(out)
}

fn lemma(cfg: &RunConfig) -> Reports {
    let v = &cfg.verify;
    let flow = FlowConfig { mode: FlowMode::Raw, t_max: v.lemma_t_max, ..cfg.flow_config()? };
    let initial = initial_graph(cfg)?;
    let mut out = Vec::new();
    for l in 0..=flow.n {
        let res = check_lemma_integral(&flow, &initial, l, v.lemma_spacing, v.lemma_tol).map_err(|e| {
            match CliError::from_flow(e) {
                CliError::Config(c) if c.key == "spacing" || c.key == "t_max" => CliError::Config(ConfigError::new(
                    format!("verify.lemma_{}", if c.key == "spacing" { "spacing" } else { "t_max" }),
                    c.message,
                )),
                other => other,
            }
        })?;
        out.extend(res.reports.into_iter().map(|mut r| {
            if r.check == "lemma.topological" {
                r.check = format!("lemma.topological.n{}", flow.n);
            }
            r
        }));
    }
    Ok(out)
}

fn cos2(g: &RadialGraph) -> Vec<f64> {
    (0..g.len()).map(|i| (2.0 * g.coord(i)).cos()).collect()
}

fn variation(cfg: &RunConfig) -> Reports {
    let v = &cfg.verify;
    let shape = |spec: ShapeSpec, n: usize, intervals: usize| make_shape(&spec, n, intervals).map_err(precondition);
    let circle = shape(ShapeSpec::Sphere { radius: 1.0 }, 1, 128)?;
    let sphere = shape(ShapeSpec::Sphere { radius: 1.0 }, 2, 128)?;
    let ellipse = shape(ShapeSpec::Ellipse { a: 2.0, b: 1.0 }, 1, 256)?;
    let cases = [
        ("first_variation.circle", &circle, vec![1.0; circle.len()], 0),
        ("first_variation.sphere", &sphere, vec![1.0; sphere.len()], 1),
        ("first_variation.ellipse_cos2", &ellipse, cos2(&ellipse), 0),
    ];
    let mut out = Vec::new();
    for (name, g, rho, l) in cases {
        let mut r = check_first_variation(g, &rho, l, v.variation_probe, v.variation_tol).map_err(precondition)?;
        r.check = name.into();
        out.push(r);
    }
    let g = initial_graph(cfg)?;
    for l in 0..g.n() {
        let mut r = check_first_variation(&g, &cos2(&g), l, v.variation_probe, v.variation_tol).map_err(precondition)?;
        r.check = format!("first_variation.config.l{l}");
        out.push(r);
    }
    Ok(out)
}

fn af(cfg: &RunConfig) -> Reports {
    let geo = compute_geometry(&initial_graph(cfg)?).map_err(shape_error)?;
    let k = cfg.problem.k;
    let report = kconvex_report_tol(&geo, k, cfg.tolerances.cone_tol)
        .map_err(|e| CliError::Config(ConfigError::new("problem.k", e.to_string())))?;
    if report.status == Convexity::Violated {
        return Err(CliError::Config(ConfigError::new(
            "shape",
            format!("precondition failed: surface is not {k}-convex (min sigma = {:?})", report.min_sigma),
        )));
    }
    check_af_chain(&geo, k).map_err(precondition)
}

fn monotone(cfg: &RunConfig) -> Reports {
    let flow = cfg.flow_config()?;
    if flow.mode == FlowMode::Raw {
        return Err(ConfigError::new("problem.mode", "the monotone suite needs normalized or rescaled_raw").into());
    }
    let record = run(&flow, &initial_graph(cfg)?).map_err(|f| CliError::from_flow(f.error))?;
    let v = &cfg.verify;
    let tol = MonotoneTolerances { slack: v.monotone_slack, drift_rate: v.monotone_drift_rate, terminal: v.monotone_terminal };
    check_monotone_series(&record, tol).map_err(precondition)
}

fn suite_fn(suite: Suite) -> fn(&RunConfig) -> Reports {
    match suite {
        Suite::Symfunc => symfunc,
        Suite::Geometry => geometry,
        Suite::Prop1 => prop1,
        Suite::Lemma => lemma,
        Suite::Variation => variation,
        Suite::Af => af,
        Suite::Monotone => monotone,
        Suite::All => unreachable!("expanded by the caller"),
    }
}

/// Runs a suite, writes the report CSV and returns success iff every check passed.
pub fn cmd_verify(suite: Suite, cfg: &RunConfig, quiet: bool) -> Result<Outcome, CliError> {
    let suites: Vec<Suite> = match suite {
        Suite::All => vec![
            Suite::Symfunc,
            Suite::Geometry,
            Suite::Prop1,
            Suite::Lemma,
            Suite::Variation,
            Suite::Af,
            Suite::Monotone,
        ],
        one => vec![one],
    };
    let results: Vec<Reports> = suites.par_iter().map(|&s| suite_fn(s)(cfg)).collect();
    let mut reports = Vec::new();
    for r in results {
        reports.extend(r?);
    }
    sort_reports(&mut reports);

    let path = PathBuf::from(&cfg.output.report_path);
    let mut out = create_file("output.report_path", &path)?;
    write_report_csv(&reports, &mut out)
        .and_then(|_| out.flush())
        .map_err(|e| CliError::io("output.report_path", &path, e))?;

    let failing = reports.iter().filter(|r| !r.pass).count();
    for r in &reports {
        if !quiet || !r.pass {
            println!("{}", r.summary_line());
        }
    }
    if !quiet {
        println!("{} checks, {failing} failing; report written to {}", reports.len(), path.display());
    }
    Ok(if failing == 0 { Outcome::Success } else { Outcome::ToleranceViolation })
}
