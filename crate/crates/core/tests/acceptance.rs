//! Acceptance criteria, one line per criterion. Exits nonzero if any fails.
//!
//! Run with `cargo test -p quermass-core --test acceptance`.

use std::f64::consts::{E, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use quermass_core::flow::{normalization_rt, rescale_state, run, run_observed, FlowConfig, FlowMode, FlowState};
use quermass_core::geometry::{
    compute_geometry, iso_ratio_ball, kconvex_report, make_shape, roundness, Convexity, Perturbation, RadialGraph,
    ShapeSpec,
};
use quermass_core::verify::{
    check_af_chain, check_first_variation, check_lemma_integral, check_minkowski, check_monotone_series,
    check_prop1_convergence, check_prop1_pointwise, check_symfunc_suite, IdentityReport, LagrangianCurve,
    MonotoneTolerances, FIRST_VARIATION_PROBE,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(bool, String), String>;
type Criterion = (&'static str, fn() -> Outcome);

fn sphere(radius: f64) -> ShapeSpec {
    ShapeSpec::Sphere { radius }
}

fn perturbed(eps: f64, perturbation: Perturbation) -> ShapeSpec {
    ShapeSpec::PerturbedSphere { radius: 1.0, eps, perturbation }
}

fn shape(spec: &ShapeSpec, n: usize, intervals: usize) -> Result<RadialGraph, String> {
    make_shape(spec, n, intervals).map_err(|e| e.to_string())
}

/// First failing report, or the one with the largest relative residual.
fn summarize(reports: &[IdentityReport]) -> String {
    let shown = reports
        .iter()
        .find(|r| !r.pass)
        .or_else(|| reports.iter().max_by(|a, b| a.rel_residual.total_cmp(&b.rel_residual)));
    match shown {
        Some(r) => format!("{} checks, worst {}", reports.len(), r.summary_line()),
        None => "no checks".into(),
    }
}

fn all_pass(reports: &[IdentityReport]) -> bool {
    !reports.is_empty() && reports.iter().all(|r| r.pass)
}

fn sphere_exact_solution() -> Outcome {
    let cfg = FlowConfig { intervals: 256, dt_init: 1e-3, dt_max: 1e-3, t_max: 1.0, ..FlowConfig::new(1, 1, FlowMode::Raw) };
    let mut worst_round: f64 = 0.0;
    let mut last = None;
    run_observed(&cfg, &shape(&sphere(1.0), 1, 256)?, |s, _| {
        worst_round = worst_round.max(roundness(&s.graph));
        last = Some(s.graph.mean_radius());
    })
    .map_err(|f| f.to_string())?;
    let err = (last.ok_or("no states observed")? - E).abs() / E;
    Ok((err < 1e-6 && worst_round < 1e-12, format!("mean radius rel err {err:.3e}, max roundness {worst_round:.3e}")))
}

fn normalized_fixed_point() -> Outcome {
    let cfg = FlowConfig { intervals: 128, t_max: 1.0, ..FlowConfig::new(2, 1, FlowMode::Normalized) };
    let (mut drift, mut rate_err): (f64, f64) = (0.0, 0.0);
    let mut failure = None;
    run_observed(&cfg, &shape(&sphere(1.0), 2, 128)?, |s, geo| {
        drift = s.graph.samples().iter().fold(drift, |d, r| d.max((r - 1.0).abs()));
        match normalization_rt(geo, 1) {
            Ok(rt) => rate_err = rate_err.max((rt - 0.5).abs()),
            Err(e) => failure = Some(e.to_string()),
        }
    })
    .map_err(|f| f.to_string())?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok((drift < 1e-8 && rate_err < 1e-10, format!("sup |r - 1| = {drift:.3e}, max |r(t) - 1/2| = {rate_err:.3e}")))
}

fn minkowski_cross_check() -> Outcome {
    let cases = [
        (1, sphere(1.0)),
        (2, sphere(1.0)),
        (1, ShapeSpec::Ellipse { a: 2.0, b: 1.0 }),
        (2, ShapeSpec::EllipsoidOfRevolution { a: 1.5, c: 1.0 }),
        (1, perturbed(0.3, Perturbation::Mode(3))),
        (1, perturbed(0.3, Perturbation::Mode(5))),
        (2, perturbed(0.3, Perturbation::Mode(3))),
        (2, perturbed(0.3, Perturbation::Mode(5))),
        (1, perturbed(0.3, Perturbation::Random { seed: 7, max_mode: 6 })),
        (2, perturbed(0.3, Perturbation::Random { seed: 7, max_mode: 6 })),
    ];
    let mut reports = Vec::new();
    for (n, spec) in cases {
        let geo = compute_geometry(&shape(&spec, n, 512)?).map_err(|e| e.to_string())?;
        reports.extend(check_minkowski(&geo, 1e-6).map_err(|e| e.to_string())?);
    }
    Ok((all_pass(&reports), format!("{} shapes, {}", cases.len(), summarize(&reports))))
}

fn lemma_integrals() -> Outcome {
    let cases = [(1, ShapeSpec::Ellipse { a: 2.0, b: 1.0 }), (2, ShapeSpec::EllipsoidOfRevolution { a: 1.5, c: 1.0 })];
    let mut reports = Vec::new();
    for (n, spec) in cases {
        let cfg = FlowConfig { intervals: 256, t_max: 0.1, ..FlowConfig::new(n, 1, FlowMode::Raw) };
        let initial = shape(&spec, n, 256)?;
        for l in 0..=n {
            let res = check_lemma_integral(&cfg, &initial, l, 1e-3, 1e-3).map_err(|e| e.to_string())?;
            reports.extend(res.reports);
        }
    }
    let topo: Vec<String> = reports
        .iter()
        .filter(|r| r.check == "lemma.topological")
        .map(|r| format!("{:.3e}", r.rel_residual))
        .collect();
    Ok((all_pass(&reports), format!("{}; topological rel residuals [{}]", summarize(&reports), topo.join(", "))))
}

fn prop1() -> Outcome {
    let circle = LagrangianCurve::ellipse(1.0, 1.0, 32).map_err(|e| e.to_string())?;
    let pointwise = check_prop1_pointwise(&circle, 1, 5e-6, 1e-8).map_err(|e| e.to_string())?;
    let levels = [(32, 2e-3), (64, 1e-3), (128, 5e-4)];
    let ratios = check_prop1_convergence(|m| LagrangianCurve::ellipse(2.0, 1.0, m), 1, 1, &levels, 4.0, 0.5)
        .map_err(|e| e.to_string())?;
    let range = |reports: &[IdentityReport]| {
        reports.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r.lhs), hi.max(r.lhs)))
    };
    let (lo, hi) = range(&ratios);
    let worst = pointwise.iter().map(|r| r.abs_residual).fold(0.0, f64::max);
    // Surfaces of revolution, reported alongside.
    let meridian_levels = [(64, 2e-3), (128, 1e-3), (256, 5e-4)];
    let mut surface = Vec::new();
    for k in [1, 2] {
        let reports =
            check_prop1_convergence(|m| LagrangianCurve::ellipse(1.5, 1.0, m), 2, k, &meridian_levels, 4.0, 0.5)
                .map_err(|e| e.to_string())?;
        let (a, b) = range(&reports);
        surface.push(format!("k={k} [{a:.3}, {b:.3}]"));
    }
    Ok((
        all_pass(&pointwise) && all_pass(&ratios),
        format!(
            "circle max residual {worst:.3e}; ellipse Richardson ratios in [{lo:.3}, {hi:.3}]; \
             ellipsoid meridian ratios {}",
            surface.join(", ")
        ),
    ))
}

fn monotonicity() -> Outcome {
    let cases = [
        (FlowConfig { intervals: 256, t_max: 6.0, ..FlowConfig::new(1, 1, FlowMode::RescaledRaw) }, ShapeSpec::Ellipse { a: 2.0, b: 1.0 }),
        (
            FlowConfig { intervals: 128, t_max: 8.0, ..FlowConfig::new(2, 1, FlowMode::Normalized) },
            ShapeSpec::EllipsoidOfRevolution { a: 1.5, c: 1.0 },
        ),
    ];
    let mut pass = true;
    let mut details = Vec::new();
    for (cfg, spec) in cases {
        let start = Instant::now();
        let record = run(&cfg, &shape(&spec, cfg.n, cfg.intervals)?).map_err(|f| f.to_string())?;
        let elapsed = start.elapsed();
        let reports = check_monotone_series(&record, MonotoneTolerances::default()).map_err(|e| e.to_string())?;
        let fast = elapsed < Duration::from_secs(60);
        pass &= all_pass(&reports) && fast;
        let m = cfg.k.min(cfg.n - 1);
        let last = record.last().ok_or("empty record")?;
        let ball = iso_ratio_ball(cfg.n, m).map_err(|e| e.to_string())?;
        details.push(format!(
            "n={} I{m} end {:.3e} from ball, {} rows in {:.1} s ({})",
            cfg.n,
            (last.ratios[m] - ball).abs(),
            record.rows.len(),
            elapsed.as_secs_f64(),
            summarize(&reports)
        ));
    }
    Ok((pass, details.join("; ")))
}

fn gauge_equivalence() -> Outcome {
    let spec = perturbed(0.1, Perturbation::Mode(2));
    let initial = shape(&spec, 2, 256)?;
    let final_state = |mode| -> Result<FlowState, String> {
        let mut last = None;
        run_observed(&FlowConfig { t_max: 1.0, ..FlowConfig::new(2, 1, mode) }, &initial, |s, _| last = Some(s.clone()))
            .map_err(|f| f.to_string())?;
        last.ok_or_else(|| "no states observed".to_string())
    };
    let normalized = final_state(FlowMode::Normalized)?;
    let raw = rescale_state(&final_state(FlowMode::Raw)?);
    let diff = normalized.graph.samples().iter().zip(raw.samples()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok((diff < 1e-6, format!("sup |normalized - rescaled raw| at t=1: {diff:.3e}")))
}

fn af_chain() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut pass = true;
    let mut details = Vec::new();
    for (n, k) in [(1usize, 1usize), (2, 1), (2, 2)] {
        let mut reports = Vec::new();
        let (mut accepted, mut tried) = (0, 0);
        while accepted < 100 {
            tried += 1;
            if tried > 20_000 {
                return Err(format!("could not sample 100 strictly {k}-convex surfaces for n={n}"));
            }
            let spec = perturbed(
                rng.gen_range(0.002..0.12),
                Perturbation::Random { seed: rng.gen(), max_mode: rng.gen_range(2..=6) },
            );
            let Ok(g) = make_shape(&spec, n, 256) else { continue };
            let geo = compute_geometry(&g).map_err(|e| e.to_string())?;
            if kconvex_report(&geo, k).map_err(|e| e.to_string())?.status != Convexity::Strict {
                continue;
            }
            accepted += 1;
            reports.extend(check_af_chain(&geo, k).map_err(|e| e.to_string())?);
        }
        let mut equality: f64 = 0.0;
        for radius in [0.5, 1.0, 2.5] {
            let geo = compute_geometry(&shape(&sphere(radius), n, 512)?).map_err(|e| e.to_string())?;
            for r in check_af_chain(&geo, k).map_err(|e| e.to_string())? {
                equality = equality.max(r.abs_residual / r.rhs.abs());
            }
        }
        pass &= all_pass(&reports) && equality < 1e-10;
        let slack = reports.iter().map(|r| r.rhs - r.lhs).fold(f64::INFINITY, f64::min);
        details.push(format!(
            "(n={n},k={k}) {accepted}/{tried} sampled, min slack {slack:.3e}, sphere gap {equality:.1e}"
        ));
    }
    Ok((pass, details.join("; ")))
}

fn symfunc_suite() -> Outcome {
    let start = Instant::now();
    let reports = check_symfunc_suite(100_000, 6, 0);
    let elapsed = start.elapsed();
    Ok((
        all_pass(&reports) && elapsed < Duration::from_secs(10),
        format!("{} in {:.2} s", summarize(&reports), elapsed.as_secs_f64()),
    ))
}

fn first_variation() -> Outcome {
    let circle = shape(&sphere(1.0), 1, 128)?;
    let sph = shape(&sphere(1.0), 2, 128)?;
    let ellipse = shape(&ShapeSpec::Ellipse { a: 2.0, b: 1.0 }, 1, 256)?;
    let cos2: Vec<f64> = (0..ellipse.len()).map(|i| (2.0 * ellipse.coord(i)).cos()).collect();
    let cases = [(&circle, vec![1.0; circle.len()], 0), (&sph, vec![1.0; sph.len()], 1), (&ellipse, cos2, 0)];
    let mut reports = Vec::new();
    for (g, rho, l) in cases {
        reports.push(check_first_variation(g, &rho, l, FIRST_VARIATION_PROBE, 1e-3).map_err(|e| e.to_string())?);
    }
    let circle_rhs = reports[0].rhs;
    let sphere_rhs = reports[1].rhs;
    let oracles = (circle_rhs - 2.0 * PI).abs() < 1e-8 && (sphere_rhs - 8.0 * PI).abs() < 1e-6;
    Ok((all_pass(&reports) && oracles, summarize(&reports)))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("sphere exact solution", sphere_exact_solution),
        ("normalized flow fixed point", normalized_fixed_point),
        ("Minkowski cross-check", minkowski_cross_check),
        ("integral evolution identity", lemma_integrals),
        ("pointwise evolution equations", prop1),
        ("monotonicity", monotonicity),
        ("gauge equivalence", gauge_equivalence),
        ("Alexandrov-Fenchel chain", af_chain),
        ("symmetric-function suite", symfunc_suite),
        ("first variation", first_variation),
    ];
    let limits = [Some(5.0), None, None, None, None, None, None, None, Some(10.0), None];
    let mut failures = 0;
    for (i, ((name, check), limit)) in criteria.iter().zip(limits).enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        let (pass, detail) = match outcome {
            Ok((pass, detail)) => match limit {
                Some(l) if secs >= l => (false, format!("{detail}; exceeded {l} s")),
                _ => (pass, detail),
            },
            Err(e) => (false, format!("error: {e}")),
        };
        failures += usize::from(!pass);
        println!("criterion {:>2} [{}] {name}: {detail} ({secs:.2} s)", i + 1, if pass { "PASS" } else { "FAIL" });
    }
    println!("acceptance: {}/{} criteria pass", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
