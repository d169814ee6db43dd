//! Numerical checks of the evolution equations, integral identities and
//! inequalities. Each check produces [`IdentityReport`]s; none of them panics
//! on a failed comparison.

mod identities;
mod lagrangian;
mod symmetric;

use std::io::{self, Write};

pub use identities::{
    check_first_variation, check_lemma_integral, check_prop1_axisymmetric, check_prop1_pointwise, evolve_meridian,
    evolve_normal, LemmaRun, FIRST_VARIATION_PROBE, TOPOLOGICAL_TOLERANCE,
};
pub use lagrangian::{CurveFrame, LagrangianCurve, SpectralDiff};
pub use symmetric::{check_symfunc_suite, SYMFUNC_TOLERANCE};

use crate::csv::fmt_f64;
use crate::error::{Error, Result};
use crate::flow::{FlowMode, TrajectoryRecord};
use crate::geometry::{
    ball_quermass, iso_ratio_ball, kconvex_report, quermass, quermass_minkowski, quermass_sigma, Convexity,
    PointwiseGeometry,
};

/// How `lhs` and `rhs` are compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// `|lhs − rhs| ≤ tolerance`.
    AbsEqual,
    /// `|lhs − rhs|/scale ≤ tolerance`.
    RelEqual,
    /// `lhs ≤ rhs + tolerance`.
    AtMost,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub check: String,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_residual: f64,
    pub rel_residual: f64,
    pub tolerance: f64,
    pub relation: Relation,
    /// Grid and time resolution the numbers were obtained at.
    pub resolution: String,
    pub pass: bool,
}

impl IdentityReport {
    /// Equality judged on the absolute residual; `rel_residual` is relative to `|rhs|`.
    pub fn absolute(check: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let abs = (lhs - rhs).abs();
        Self::build(check.into(), lhs, rhs, abs, abs / rhs.abs(), tolerance, Relation::AbsEqual, abs <= tolerance)
    }

    /// Equality judged on `|lhs − rhs|/scale`.
    pub fn relative(check: impl Into<String>, lhs: f64, rhs: f64, scale: f64, tolerance: f64) -> Self {
        let abs = (lhs - rhs).abs();
        let rel = abs / scale.abs();
        Self::build(check.into(), lhs, rhs, abs, rel, tolerance, Relation::RelEqual, rel <= tolerance)
    }

    /// The inequality `lhs ≤ rhs`, up to an absolute `tolerance`.
    pub fn at_most(check: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let abs = (lhs - rhs).abs();
        let pass = lhs <= rhs + tolerance;
        Self::build(check.into(), lhs, rhs, abs, abs / rhs.abs(), tolerance, Relation::AtMost, pass)
    }

    #[allow(clippy::too_many_arguments)]
    fn build(
        check: String,
        lhs: f64,
        rhs: f64,
        abs_residual: f64,
        rel_residual: f64,
        tolerance: f64,
        relation: Relation,
        pass: bool,
    ) -> Self {
        let pass = pass && lhs.is_finite() && rhs.is_finite();
        Self { check, lhs, rhs, abs_residual, rel_residual, tolerance, relation, resolution: String::new(), pass }
    }

    pub fn at(mut self, resolution: impl Into<String>) -> Self {
        self.resolution = resolution.into();
        self
    }

    pub fn summary_line(&self) -> String {
        let (op, residual) = match self.relation {
            Relation::AbsEqual => ("=", self.abs_residual),
            Relation::RelEqual => ("=", self.rel_residual),
            Relation::AtMost => ("<=", self.lhs - self.rhs),
        };
        format!(
            "[{}] {}: {:.12e} {op} {:.12e} (residual {:.3e}, tol {:.1e}{}{})",
            if self.pass { "pass" } else { "FAIL" },
            self.check,
            self.lhs,
            self.rhs,
            residual,
            self.tolerance,
            if self.resolution.is_empty() { "" } else { ", " },
            self.resolution
        )
    }
}

/// Stable order for merged reports from independent checks.
pub fn sort_reports(reports: &mut [IdentityReport]) {
    reports.sort_by(|a, b| a.check.cmp(&b.check));
}

pub fn write_report_csv<W: Write>(reports: &[IdentityReport], mut out: W) -> io::Result<()> {
    writeln!(out, "check,lhs,rhs,abs_residual,rel_residual,tolerance,pass")?;
    for r in reports {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.check,
            fmt_f64(r.lhs),
            fmt_f64(r.rhs),
            fmt_f64(r.abs_residual),
            fmt_f64(r.rel_residual),
            fmt_f64(r.tolerance),
            r.pass
        )?;
    }
    Ok(())
}

/// `C_{n,m}∫σ_{m−1}dμ` against `∫uσ_m dμ` for `1 ≤ m ≤ n`.
pub fn check_minkowski(geo: &PointwiseGeometry, tol: f64) -> Result<Vec<IdentityReport>> {
    (1..=geo.n)
        .map(|m| {
            let (a, b) = (quermass_sigma(geo, m)?, quermass_minkowski(geo, m)?);
            Ok(IdentityReport::relative(format!("minkowski.m{m}"), a, b, b, tol)
                .at(format!("n={} N={}", geo.n, geo.intervals)))
        })
        .collect()
}

/// Ratios of the pointwise evolution residuals between consecutive `(M, dt)`
/// levels, each expected within `ratio_tol` of `expected`. Curves (`n = 1`)
/// use [`check_prop1_pointwise`], meridians (`n = 2`) [`check_prop1_axisymmetric`].
pub fn check_prop1_convergence(
    make_curve: impl Fn(usize) -> Result<LagrangianCurve>,
    n: usize,
    k: usize,
    levels: &[(usize, f64)],
    expected: f64,
    ratio_tol: f64,
) -> Result<Vec<IdentityReport>> {
    let residuals = levels
        .iter()
        .map(|&(m, dt)| {
            let curve = make_curve(m)?;
            match n {
                1 => check_prop1_pointwise(&curve, k, dt, f64::INFINITY),
                2 => check_prop1_axisymmetric(&curve, k, dt, f64::INFINITY),
                _ => Err(Error::InvalidArgument(format!("pointwise checks need n = 1 or 2, got {n}"))),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for (w, lv) in residuals.windows(2).zip(levels.windows(2)) {
        for (coarse, fine) in w[0].iter().zip(&w[1]) {
            let ratio = coarse.abs_residual / fine.abs_residual;
            out.push(
                IdentityReport::absolute(format!("{}.ratio.M{}", coarse.check, lv[1].0), ratio, expected, ratio_tol)
                    .at(format!("M={}->{} dt={:e}->{:e}", lv[0].0, lv[1].0, lv[0].1, lv[1].1)),
            );
        }
    }
    Ok(out)
}

/// Absolute slack of the Alexandrov–Fenchel comparisons.
pub const AF_TOLERANCE: f64 = 1e-6;

/// `(V_{n+1−m}/V_{n+1−m}(B))^{1/(n+1−m)} ≤ (V_{n−m}/V_{n−m}(B))^{1/(n−m)}` for
/// `0 ≤ m ≤ min(k, n−1)`.
pub fn check_af_chain(geo: &PointwiseGeometry, k: usize) -> Result<Vec<IdentityReport>> {
    let n = geo.n;
    let report = kconvex_report(geo, k)?;
    if report.status == Convexity::Violated {
        return Err(Error::OutsideCone { k });
    }
    let normalized = |j: usize| -> Result<f64> {
        Ok((quermass(geo, j)? / ball_quermass(n, n + 1 - j)).powf(1.0 / j as f64))
    };
    (0..=k.min(n - 1))
        .map(|m| {
            let lhs = normalized(n + 1 - m)?;
            let rhs = normalized(n - m)?;
            Ok(IdentityReport::at_most(format!("af.m{m}"), lhs, rhs, AF_TOLERANCE)
                .at(format!("n={n} k={k} N={}", geo.intervals)))
        })
        .collect()
}

/// Tolerances for [`check_monotone_series`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotoneTolerances {
    /// Allowed decrease between samples, relative to the value.
    pub slack: f64,
    /// Allowed relative drift of the conserved quantity per unit time.
    pub drift_rate: f64,
    /// Allowed distance of the final ratio from its value on balls.
    pub terminal: f64,
}

impl Default for MonotoneTolerances {
    fn default() -> Self {
        Self { slack: 1e-10, drift_rate: 1e-6, terminal: 1e-4 }
    }
}

/// Monotonicity of `I_m` (`m = min(k, n−1)`), conservation of the quantity the
/// scale gauge fixes (`V_{n−k}`, or `V_{n+1}` when `k = n`), and convergence of
/// `I_m` to its value on balls.
pub fn check_monotone_series(record: &TrajectoryRecord, tol: MonotoneTolerances) -> Result<Vec<IdentityReport>> {
    if record.mode == FlowMode::Raw {
        return Err(Error::InvalidArgument("monotonicity is checked on normalized or rescaled records".into()));
    }
    if record.rows.len() < 2 {
        return Err(Error::InvalidArgument("record needs at least two rows".into()));
    }
    let (n, k) = (record.n, record.k);
    let m = k.min(n - 1);
    let ratios = record.ratio_series(m).expect("I_m is recorded for m <= min(k, n-1)");
    let worst = ratios
        .windows(2)
        .map(|w| (w[1] - w[0]) / w[0].abs())
        .fold(f64::INFINITY, f64::min);
    let monotone = IdentityReport::at_most(format!("monotone.I{m}"), -worst, 0.0, tol.slack);

    let j = if k < n { n - k } else { n + 1 };
    let conserved = record.quermass_series(j).expect("conserved quermassintegral is recorded");
    let times = record.times();
    let span = times.last().unwrap() - times[0];
    let v0 = conserved[0];
    let drift = conserved.iter().map(|v| ((v - v0) / v0).abs()).fold(0.0, f64::max);
    let drift_rate = if span > 0.0 { drift / span } else { drift };
    let conservation = IdentityReport::at_most(format!("conserved.V{j}"), drift_rate, 0.0, tol.drift_rate);

    let ball = iso_ratio_ball(n, m)?;
    let terminal = IdentityReport::absolute(format!("terminal.I{m}"), *ratios.last().unwrap(), ball, tol.terminal);

    let res = format!("n={n} k={k} mode={} samples={}", record.mode.as_str(), record.rows.len());
    Ok([monotone, conservation, terminal].into_iter().map(|r| r.at(res.clone())).collect())
}
