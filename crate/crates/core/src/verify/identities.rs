use super::lagrangian::{CurveFrame, LagrangianCurve};
use super::IdentityReport;
use crate::error::{Error, Result};
use crate::flow::{check_initial, FlowConfig, FlowError, FlowMode, FlowState, Integrator};
use crate::geometry::{compute_geometry, unit_sphere_area, PointwiseGeometry, RadialGraph};
use crate::symfunc::{elem_sym, elem_sym_upto, polarized_sigma_square};

/// Relative accuracy at which `∫σ_n dμ` must match `|S^n|`.
pub const TOPOLOGICAL_TOLERANCE: f64 = 1e-6;
/// Default probe `s/scale` for first variations.
pub const FIRST_VARIATION_PROBE: f64 = 1e-4;

/// Speed `σ_{k−1}/σ_k` of the normal motion at every node, reading `curve` as
/// a plane curve (`n = 1`) or as the meridian of a surface of revolution (`n = 2`).
fn normal_speed(curve: &LagrangianCurve, fr: &CurveFrame, n: usize, k: usize) -> Result<Vec<f64>> {
    let kappa: Vec<Vec<f64>> = match n {
        1 => fr.kappa.iter().map(|&v| vec![v]).collect(),
        _ => curve.axisymmetric_curvatures(fr).iter().map(|c| c.to_vec()).collect(),
    };
    kappa
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let sig = elem_sym_upto(c, k);
            if let Some(m) = (1..=k).find(|&m| !(sig[m] > 0.0)) {
                return Err(Error::ConeExit { k: m, node: j, value: sig[m] });
            }
            Ok(sig[k - 1] / sig[k])
        })
        .collect()
}

fn normal_velocity(curve: &LagrangianCurve, n: usize, k: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let fr = curve.frame();
    let speed = normal_speed(curve, &fr, n, k)?;
    let vx = (0..curve.len()).map(|j| fr.nu_x[j] * speed[j]).collect();
    let vy = (0..curve.len()).map(|j| fr.nu_y[j] * speed[j]).collect();
    Ok((vx, vy))
}

fn evolve(curve: &LagrangianCurve, n: usize, k: usize, dt: f64) -> Result<LagrangianCurve> {
    let (x0, y0) = (curve.x(), curve.y());
    let shift = |v: &(Vec<f64>, Vec<f64>), h: f64| {
        LagrangianCurve::new(
            x0.iter().zip(&v.0).map(|(x, d)| x + h * d).collect(),
            y0.iter().zip(&v.1).map(|(y, d)| y + h * d).collect(),
        )
    };
    let k1 = normal_velocity(curve, n, k)?;
    let k2 = normal_velocity(&shift(&k1, dt / 2.0)?, n, k)?;
    let k3 = normal_velocity(&shift(&k2, dt / 2.0)?, n, k)?;
    let k4 = normal_velocity(&shift(&k3, dt)?, n, k)?;
    let combine = |a: &[f64], b: &[f64], c: &[f64], d: &[f64], base: &[f64]| -> Vec<f64> {
        (0..base.len()).map(|j| base[j] + dt / 6.0 * (a[j] + 2.0 * b[j] + 2.0 * c[j] + d[j])).collect()
    };
    LagrangianCurve::new(combine(&k1.0, &k2.0, &k3.0, &k4.0, x0), combine(&k1.1, &k2.1, &k3.1, &k4.1, y0))
}

/// One Runge–Kutta step of `X_t = ν/κ` at fixed material parameter; `dt` may
/// be negative.
pub fn evolve_normal(curve: &LagrangianCurve, dt: f64) -> Result<LagrangianCurve> {
    evolve(curve, 1, 1, dt)
}

/// One Runge–Kutta step of the meridian of a surface of revolution moving by
/// `X_t = (σ_{k−1}/σ_k)ν`.
pub fn evolve_meridian(curve: &LagrangianCurve, k: usize, dt: f64) -> Result<LagrangianCurve> {
    if k == 0 || k > 2 {
        return Err(Error::DegreeOutOfRange { k, n: 2 });
    }
    evolve(curve, 2, k, dt)
}

/// Central difference of each tracked quantity over `±dt`, compared with its
/// right-hand side at the worst node.
fn worst_residuals(
    names: &[&str],
    plus: &[Vec<f64>],
    minus: &[Vec<f64>],
    rhs: &[Vec<f64>],
    dt: f64,
    tol: f64,
    resolution: &str,
) -> Vec<IdentityReport> {
    names
        .iter()
        .enumerate()
        .map(|(q, name)| {
            let lhs: Vec<f64> = plus[q].iter().zip(&minus[q]).map(|(p, m)| (p - m) / (2.0 * dt)).collect();
            let worst = (0..lhs.len())
                .max_by(|&a, &b| (lhs[a] - rhs[q][a]).abs().total_cmp(&(lhs[b] - rhs[q][b]).abs()))
                .expect("curves have nodes");
            IdentityReport::absolute(*name, lhs[worst], rhs[q][worst], tol).at(resolution)
        })
        .collect()
}

const PROP1_NAMES: [&str; 5] = ["prop1.g", "prop1.dmu", "prop1.h_lower", "prop1.h_mixed", "prop1.sigma1"];

fn prop1_quantities(fr: &CurveFrame) -> Vec<Vec<f64>> {
    let g = fr.mu.iter().map(|m| m * m).collect();
    vec![g, fr.mu.clone(), fr.h11.clone(), fr.kappa.clone(), fr.kappa.clone()]
}

/// Pointwise evolution of `g_11`, `dμ`, `h_11`, `h^1_1` and `σ_1` under the
/// inverse curvature flow of a convex curve, by central differences over
/// `±dt` at fixed material parameter. The comparison is absolute, at the worst node.
pub fn check_prop1_pointwise(curve: &LagrangianCurve, k: usize, dt: f64, tol: f64) -> Result<Vec<IdentityReport>> {
    if k != 1 {
        return Err(Error::DegreeOutOfRange { k, n: 1 });
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    let fr = curve.frame();
    let speed = normal_speed(curve, &fr, 1, 1)?;
    let plus = prop1_quantities(&evolve_normal(curve, dt)?.frame());
    let minus = prop1_quantities(&evolve_normal(curve, -dt)?.frame());

    let m = curve.len();
    let (f_p, f_pp) = curve.diff().d1_d2(&speed);
    let g: Vec<f64> = fr.mu.iter().map(|v| v * v).collect();
    let hess: Vec<f64> = (0..m)
        .map(|j| {
            let christoffel = (fr.x_pp[j] * fr.x_p[j] + fr.y_pp[j] * fr.y_p[j]) / g[j];
            f_pp[j] - christoffel * f_p[j]
        })
        .collect();
    let rhs = vec![
        (0..m).map(|j| 2.0 * speed[j] * fr.h11[j]).collect(),
        (0..m).map(|j| speed[j] * fr.kappa[j] * fr.mu[j]).collect(),
        (0..m).map(|j| -hess[j] + speed[j] * fr.h11[j] * fr.h11[j] / g[j]).collect(),
        (0..m).map(|j| -hess[j] / g[j] - speed[j] * fr.kappa[j] * fr.kappa[j]).collect(),
        (0..m)
            .map(|j| Ok(-hess[j] / g[j] - speed[j] * polarized_sigma_square(&[fr.kappa[j]], 1)?))
            .collect::<Result<_>>()?,
    ];
    Ok(worst_residuals(&PROP1_NAMES, &plus, &minus, &rhs, dt, tol, &format!("M={m} dt={dt:e}")))
}

const PROP1_AXISYMMETRIC_NAMES: [&str; 9] = [
    "prop1.g11",
    "prop1.g22",
    "prop1.dmu",
    "prop1.h11",
    "prop1.h22",
    "prop1.h1_1",
    "prop1.h2_2",
    "prop1.sigma1",
    "prop1.sigma2",
];

/// `g_11, g_22, dμ, h_11, h_22, h^1_1, h^2_2, σ_1, σ_2` of the surface swept by a meridian.
fn axisymmetric_quantities(curve: &LagrangianCurve, fr: &CurveFrame) -> Vec<Vec<f64>> {
    let y = curve.y();
    let kappa = curve.axisymmetric_curvatures(fr);
    let m = curve.len();
    vec![
        fr.mu.iter().map(|v| v * v).collect(),
        y.iter().map(|v| v * v).collect(),
        (0..m).map(|j| fr.mu[j] * y[j].abs()).collect(),
        fr.h11.clone(),
        (0..m).map(|j| y[j] * fr.nu_y[j]).collect(),
        kappa.iter().map(|c| c[0]).collect(),
        kappa.iter().map(|c| c[1]).collect(),
        kappa.iter().map(|c| c[0] + c[1]).collect(),
        kappa.iter().map(|c| c[0] * c[1]).collect(),
    ]
}

/// Mirror symmetry `(x, y)(−p) = (x, −y)(p)` about the axis of revolution.
fn is_meridian(curve: &LagrangianCurve) -> bool {
    let (x, y, m) = (curve.x(), curve.y(), curve.len());
    let scale = x.iter().chain(y).fold(0.0f64, |a, v| a.max(v.abs()));
    let tol = 1e-12 * scale;
    (0..m).all(|j| {
        let mirror = (m - j) % m;
        (x[j] - x[mirror]).abs() <= tol && (y[j] + y[mirror]).abs() <= tol
    })
}

/// Pointwise evolution equations on a surface of revolution in its principal
/// frame, for `k ∈ {1, 2}`. `curve` is the full meridian with the axis along `x`,
/// mirror-symmetric about it; nodes `0` and `M/2` lie on the axis.
///
/// On the axis `g_22 = h_22 = 0`, `h^2_2 = h^1_1` and `∇^2∇_2F = ∇^1∇_1F`.
pub fn check_prop1_axisymmetric(
    curve: &LagrangianCurve,
    k: usize,
    dt: f64,
    tol: f64,
) -> Result<Vec<IdentityReport>> {
    if k == 0 || k > 2 {
        return Err(Error::DegreeOutOfRange { k, n: 2 });
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    if !is_meridian(curve) {
        return Err(Error::InvalidShape("curve is not symmetric about the axis of revolution".into()));
    }
    let fr = curve.frame();
    let speed = normal_speed(curve, &fr, 2, k)?;
    let quantities = |c: LagrangianCurve| axisymmetric_quantities(&c, &c.frame());
    let plus = quantities(evolve_meridian(curve, k, dt)?);
    let minus = quantities(evolve_meridian(curve, k, -dt)?);

    let (m, half, y) = (curve.len(), curve.len() / 2, curve.y());
    let kappa = curve.axisymmetric_curvatures(&fr);
    let (f_p, f_pp) = curve.diff().d1_d2(&speed);
    let g11: Vec<f64> = fr.mu.iter().map(|v| v * v).collect();
    // ∇_1∇_1F and ∇_2∇_2F; the mixed ones follow by raising with g^{ii}.
    let hess1: Vec<f64> = (0..m)
        .map(|j| f_pp[j] - (fr.x_pp[j] * fr.x_p[j] + fr.y_pp[j] * fr.y_p[j]) / g11[j] * f_p[j])
        .collect();
    let hess2: Vec<f64> = (0..m).map(|j| y[j] * fr.y_p[j] * f_p[j] / g11[j]).collect();
    let mixed1: Vec<f64> = (0..m).map(|j| hess1[j] / g11[j]).collect();
    let mixed2: Vec<f64> =
        (0..m).map(|j| if j == 0 || j == half { mixed1[j] } else { hess2[j] / (y[j] * y[j]) }).collect();
    let h22: Vec<f64> = (0..m).map(|j| y[j] * fr.nu_y[j]).collect();
    let sigma_rhs = |order: usize| -> Result<Vec<f64>> {
        (0..m)
            .map(|j| {
                let [k1, k2] = kappa[j];
                // [T_{m−1}] is diagonal here: σ_{m−1} of the other curvature.
                let (t1, t2) = if order == 1 { (1.0, 1.0) } else { (k2, k1) };
                Ok(-(t1 * mixed1[j] + t2 * mixed2[j]) - speed[j] * polarized_sigma_square(&kappa[j], order)?)
            })
            .collect()
    };
    let rhs = vec![
        (0..m).map(|j| 2.0 * speed[j] * fr.h11[j]).collect(),
        (0..m).map(|j| 2.0 * speed[j] * h22[j]).collect(),
        (0..m).map(|j| speed[j] * (kappa[j][0] + kappa[j][1]) * fr.mu[j] * y[j].abs()).collect(),
        (0..m).map(|j| -hess1[j] + speed[j] * fr.h11[j] * kappa[j][0]).collect(),
        (0..m).map(|j| -hess2[j] + speed[j] * h22[j] * kappa[j][1]).collect(),
        (0..m).map(|j| -mixed1[j] - speed[j] * kappa[j][0] * kappa[j][0]).collect(),
        (0..m).map(|j| -mixed2[j] - speed[j] * kappa[j][1] * kappa[j][1]).collect(),
        sigma_rhs(1)?,
        sigma_rhs(2)?,
    ];
    let resolution = format!("n=2 k={k} M={m} dt={dt:e}");
    Ok(worst_residuals(&PROP1_AXISYMMETRIC_NAMES, &plus, &minus, &rhs, dt, tol, &resolution))
}

/// Samples of a raw-flow run used by [`check_lemma_integral`].
#[derive(Debug, Clone)]
pub struct LemmaRun {
    pub l: usize,
    pub times: Vec<f64>,
    /// `∫σ_l dμ` at each sample.
    pub integral: Vec<f64>,
    /// `(l+1)∫σ_{l+1}σ_{k−1}/σ_k dμ` at each sample.
    pub rate: Vec<f64>,
    pub reports: Vec<IdentityReport>,
}

fn lemma_sample(geo: &PointwiseGeometry, l: usize, k: usize) -> Result<(f64, f64)> {
    let integral = geo.integrate(|i| geo.sigma(i, l));
    let rate = if l < geo.n {
        let speed = crate::flow::speed_raw(geo, k)?;
        (l + 1) as f64 * geo.integrate(|i| geo.sigma(i, l + 1) * speed[i])
    } else {
        0.0
    };
    Ok((integral, rate))
}

/// Runs the raw flow, sampling every `spacing` up to `t_max`, and compares the
/// central difference of `∫σ_l dμ` with `(l+1)∫σ_{l+1}σ_{k−1}/σ_k dμ` at every
/// interior sample. For `l = n` it also compares `∫σ_n dμ` with `|S^n|`.
pub fn check_lemma_integral(
    cfg: &FlowConfig,
    initial: &RadialGraph,
    l: usize,
    spacing: f64,
    tol: f64,
) -> std::result::Result<LemmaRun, FlowError> {
    let config_err = |key: &str, message: String| FlowError::Config { key: key.into(), message };
    if cfg.mode != FlowMode::Raw {
        return Err(config_err("mode", "the integral identity is checked on raw runs".into()));
    }
    if l > cfg.n {
        return Err(config_err("l", format!("l = {l} exceeds n = {}", cfg.n)));
    }
    if !(spacing > 0.0) {
        return Err(config_err("spacing", format!("sample spacing must be positive, got {spacing}")));
    }
    let samples = (cfg.t_max / spacing + 1e-9).floor() as usize;
    if samples < 2 {
        return Err(config_err("t_max", format!("t_max = {} leaves fewer than three samples", cfg.t_max)));
    }
    let dense = FlowConfig { dt_init: cfg.dt_init.min(spacing), dt_max: cfg.dt_max.min(spacing), ..cfg.clone() };
    let geo0 = check_initial(&dense, initial)?;
    let mut state = FlowState::initial(initial.clone())?;
    let mut integrator = Integrator::new(&dense);

    let (s0, r0) = lemma_sample(&geo0, l, cfg.k)?;
    let (mut times, mut integral, mut rate) = (vec![0.0], vec![s0], vec![r0]);
    for j in 1..=samples {
        let target = j as f64 * spacing;
        let mut geo = None;
        while state.t < target {
            let (next, g) = integrator.advance(&state, target)?;
            state = next;
            geo = Some(g);
        }
        let (s, r) = lemma_sample(geo.as_ref().expect("at least one step per sample"), l, cfg.k)?;
        times.push(state.t);
        integral.push(s);
        rate.push(r);
    }

    let resolution = format!("n={} k={} N={} spacing={spacing:e}", cfg.n, cfg.k, cfg.intervals);
    let mut worst: Option<IdentityReport> = None;
    for j in 1..samples {
        let fd = (integral[j + 1] - integral[j - 1]) / (2.0 * spacing);
        let scale = if l < cfg.n { rate[j].abs() } else { integral[j].abs() };
        let rep = IdentityReport::relative(format!("lemma.l{l}"), fd, rate[j], scale, tol);
        if worst.as_ref().is_none_or(|w| rep.rel_residual > w.rel_residual || rep.rel_residual.is_nan()) {
            worst = Some(rep);
        }
    }
    let mut reports = vec![worst.unwrap().at(resolution.clone())];
    if l == cfg.n {
        let target = unit_sphere_area(cfg.n);
        let far = integral.iter().copied().max_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs())).unwrap();
        reports.push(
            IdentityReport::relative("lemma.topological", far, target, target, TOPOLOGICAL_TOLERANCE).at(resolution),
        );
    }
    Ok(LemmaRun { l, times, integral, rate, reports })
}

fn variation_integral(curve: &LagrangianCurve, n: usize, l: usize) -> f64 {
    let fr = curve.frame();
    if n == 1 {
        let f: Vec<f64> = fr.kappa.iter().map(|&k| elem_sym(&[k], l)).collect();
        curve.integrate_planar(&f, &fr)
    } else {
        let f: Vec<f64> = curve.axisymmetric_curvatures(&fr).iter().map(|k| elem_sym(k, l)).collect();
        curve.integrate_axisymmetric(&f, &fr)
    }
}

/// `d/ds ∫σ_l dμ` along `X + sρν` at `s = 0`, by central differences with
/// `s = ±probe·mean radius` on the Lagrangian representation, against
/// `(l+1)∫σ_{l+1}ρ dμ` on the radial grid.
pub fn check_first_variation(
    g: &RadialGraph,
    rho: &[f64],
    l: usize,
    probe: f64,
    tol: f64,
) -> Result<IdentityReport> {
    let n = g.n();
    if l > n {
        return Err(Error::DegreeOutOfRange { k: l, n });
    }
    if rho.len() != g.len() {
        return Err(Error::InvalidArgument(format!("rho has {} values for {} nodes", rho.len(), g.len())));
    }
    if !(probe > 0.0) {
        return Err(Error::InvalidArgument(format!("probe must be positive, got {probe}")));
    }
    let curve = LagrangianCurve::from_radial(g)?;
    let rho_full: Vec<f64> = if n == 1 {
        rho.to_vec()
    } else {
        let half = g.intervals();
        (0..2 * half).map(|j| if j <= half { rho[j] } else { rho[2 * half - j] }).collect()
    };
    let s = probe * g.mean_radius();
    let plus = curve.displaced(&rho_full, s)?;
    let minus = curve.displaced(&rho_full, -s)?;
    let base = curve.frame();
    let keeps_orientation = |c: &LagrangianCurve| {
        let fr = c.frame();
        (0..c.len()).all(|j| fr.x_p[j] * base.x_p[j] + fr.y_p[j] * base.y_p[j] > 0.0)
    };
    if ![&plus, &minus].iter().all(|c| c.is_starshaped() && keeps_orientation(c)) {
        return Err(Error::InvalidArgument(format!("variation with s = {s:e} destroys embeddedness")));
    }
    let lhs = (variation_integral(&plus, n, l) - variation_integral(&minus, n, l)) / (2.0 * s);

    let geo = compute_geometry(g)?;
    let rhs = if l < n { (l + 1) as f64 * geo.integrate(|i| geo.sigma(i, l + 1) * rho[i]) } else { 0.0 };
    let scale = if l < n { rhs.abs() } else { variation_integral(&curve, n, l).abs() / g.mean_radius() };
    Ok(IdentityReport::relative(format!("first_variation.n{n}.l{l}"), lhs, rhs, scale, tol)
        .at(format!("N={} s={s:e}", g.intervals())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_shape, ShapeSpec};
    use std::f64::consts::PI;

    fn ellipse_curve(m: usize, a: f64, b: f64) -> LagrangianCurve {
        LagrangianCurve::ellipse(a, b, m).unwrap()
    }

    #[test]
    fn prop1_on_sphere_meridian() {
        // Spheres stay spheres: R' = R/2 for k = 1 and R' = 2R for k = 2, so
        // d/dt σ_1 = −σ_1/2 and −2σ_1 at R = 1.
        let sphere = LagrangianCurve::ellipse(1.0, 1.0, 32).unwrap();
        for (k, rate) in [(1, 0.5), (2, 2.0)] {
            let reports = check_prop1_axisymmetric(&sphere, k, 5e-6, 1e-8).unwrap();
            assert_eq!(reports.len(), 9);
            for r in &reports {
                assert!(r.pass, "k={k}: {}", r.summary_line());
            }
            let sigma1 = reports.iter().find(|r| r.check == "prop1.sigma1").unwrap();
            assert!((sigma1.rhs + 2.0 * rate).abs() < 1e-9, "{}", sigma1.summary_line());
        }
    }

    #[test]
    fn prop1_axisymmetric_needs_a_meridian() {
        let tilted = LagrangianCurve::new(
            (0..32).map(|j| (2.0 * PI * j as f64 / 32.0).cos() + 0.1).collect(),
            (0..32).map(|j| (2.0 * PI * j as f64 / 32.0 + 0.2).sin()).collect(),
        )
        .unwrap();
        assert!(matches!(check_prop1_axisymmetric(&tilted, 1, 1e-4, 1.0), Err(Error::InvalidShape(_))));
        let sphere = LagrangianCurve::ellipse(1.0, 1.0, 32).unwrap();
        assert!(matches!(check_prop1_axisymmetric(&sphere, 3, 1e-4, 1.0), Err(Error::DegreeOutOfRange { .. })));
    }

    #[test]
    fn circle_grows_exponentially() {
        let c = ellipse_curve(32, 1.0, 1.0);
        let next = evolve_normal(&c, 1e-3).unwrap();
        let r = next.x()[0].hypot(next.y()[0]);
        assert!((r - 1e-3f64.exp()).abs() < 1e-15);
    }

    #[test]
    fn prop1_on_circle() {
        let c = ellipse_curve(32, 1.0, 1.0);
        let reports = check_prop1_pointwise(&c, 1, 5e-6, 1e-8).unwrap();
        for r in &reports {
            assert!(r.pass, "{}", r.summary_line());
        }
        // dκ/dt = −κ for the unit circle.
        assert!((reports[4].rhs + 1.0).abs() < 1e-10, "{}", reports[4].summary_line());
        assert!(reports[0].abs_residual < 1e-9, "{}", reports[0].summary_line());
    }

    #[test]
    fn prop1_rejects_nonconvex_and_other_degrees() {
        let m = 64;
        let (x, y) = (0..m)
            .map(|j| {
                let p = 2.0 * PI * j as f64 / m as f64;
                let r = 1.0 + 0.5 * (3.0 * p).cos();
                (r * p.cos(), r * p.sin())
            })
            .unzip();
        let c = LagrangianCurve::new(x, y).unwrap();
        assert!(matches!(check_prop1_pointwise(&c, 1, 1e-4, 1.0), Err(Error::ConeExit { .. })));
        assert!(check_prop1_pointwise(&ellipse_curve(32, 1.0, 1.0), 2, 1e-4, 1.0).is_err());
    }

    #[test]
    fn first_variation_examples() {
        let circle = make_shape(&ShapeSpec::Sphere { radius: 1.0 }, 1, 128).unwrap();
        let r = check_first_variation(&circle, &vec![1.0; 128], 0, FIRST_VARIATION_PROBE, 1e-3).unwrap();
        assert!(r.pass && (r.rhs - 2.0 * PI).abs() < 1e-12, "{}", r.summary_line());

        let sphere = make_shape(&ShapeSpec::Sphere { radius: 1.0 }, 2, 128).unwrap();
        let r = check_first_variation(&sphere, &vec![1.0; 129], 1, FIRST_VARIATION_PROBE, 1e-3).unwrap();
        assert!(r.pass && (r.lhs - 8.0 * PI).abs() < 1e-4, "{}", r.summary_line());

        let ellipse = make_shape(&ShapeSpec::Ellipse { a: 2.0, b: 1.0 }, 1, 256).unwrap();
        let rho: Vec<f64> = (0..256).map(|i| (2.0 * ellipse.coord(i)).cos()).collect();
        let r = check_first_variation(&ellipse, &rho, 0, FIRST_VARIATION_PROBE, 1e-3).unwrap();
        assert!(r.pass, "{}", r.summary_line());
    }

    #[test]
    fn first_variation_rejects_tearing_probe() {
        let circle = make_shape(&ShapeSpec::Sphere { radius: 1.0 }, 1, 64).unwrap();
        let rho: Vec<f64> = (0..64).map(|i| 3.0 * (8.0 * circle.coord(i)).cos()).collect();
        assert!(check_first_variation(&circle, &rho, 0, 0.5, 1e-3).is_err());
    }
}
