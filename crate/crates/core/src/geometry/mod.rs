//! Starshaped hypersurfaces as radial graphs over `S^n`.
//!
//! Two grids are supported:
//!
//! * `n = 1`: closed curves `r(θ)` sampled at `N` uniform points of `[0, 2π)`;
//! * `n = 2`: axisymmetric surfaces whose meridian profile `r(φ)` is sampled
//!   at `N + 1` uniform points of `[0, π]`, poles included.
//!
//! [`compute_geometry`] reduces a graph to per-node curvatures, support
//! function and area weights, from which the quermassintegrals follow either
//! as curvature integrals or through the Minkowski formula.

mod refine;
mod shape;
mod snapshot;
pub(crate) mod stencil;

use std::f64::consts::PI;

pub use refine::refine;
pub use shape::{make_shape, Perturbation, ShapeSpec};
pub use snapshot::write_snapshot_csv;

use crate::error::{Error, Result};
use crate::symfunc::{self, binomial, cnk};

/// Smallest admissible number of grid intervals.
pub const MIN_INTERVALS: usize = 16;

/// A positive radial function over `S^n`, `n ∈ {1, 2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGraph {
    n: usize,
    intervals: usize,
    r: Vec<f64>,
}

impl RadialGraph {
    /// Wraps samples; for `n = 2` the profile includes both poles.
    pub fn new(n: usize, r: Vec<f64>) -> Result<Self> {
        let intervals = match n {
            1 => r.len(),
            2 => r.len().saturating_sub(1),
            _ => return Err(Error::InvalidGrid(format!("dimension n = {n} is not supported"))),
        };
        Self::check_grid(n, intervals)?;
        if let Some((node, &value)) = r.iter().enumerate().find(|(_, &v)| !(v > 0.0 && v.is_finite())) {
            return Err(Error::NonPositiveRadius { node, value });
        }
        Ok(Self { n, intervals, r })
    }

    pub(crate) fn check_grid(n: usize, intervals: usize) -> Result<()> {
        if n != 1 && n != 2 {
            return Err(Error::InvalidGrid(format!("dimension n = {n} is not supported")));
        }
        if intervals < MIN_INTERVALS || !intervals.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "N = {intervals} must be even and at least {MIN_INTERVALS}"
            )));
        }
        Ok(())
    }

    pub fn from_fn(n: usize, intervals: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::check_grid(n, intervals)?;
        Self::new(n, Self::from_fn_unchecked(n, intervals, f).r)
    }

    pub(crate) fn from_fn_unchecked(n: usize, intervals: usize, f: impl Fn(f64) -> f64) -> Self {
        let len = if n == 1 { intervals } else { intervals + 1 };
        let h = grid_step(n, intervals);
        let r = (0..len).map(|j| f(j as f64 * h)).collect();
        Self { n, intervals, r }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of grid intervals `N`.
    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn samples(&self) -> &[f64] {
        &self.r
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn step(&self) -> f64 {
        grid_step(self.n, self.intervals)
    }

    /// Angle `θ_i` (circle) or polar angle `φ_i` (profile) of node `i`.
    pub fn coord(&self, i: usize) -> f64 {
        i as f64 * self.step()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { n: self.n, intervals: self.intervals, r: self.r.iter().map(|r| r * s).collect() }
    }

    /// Mean of `r` with respect to the round measure on `S^n`.
    pub fn mean_radius(&self) -> f64 {
        match self.n {
            1 => self.r.iter().sum::<f64>() / self.r.len() as f64,
            _ => {
                let h = self.step();
                let q = stencil::simpson_weights(self.intervals, h);
                let (mut s, mut total) = (0.0, 0.0);
                for (j, r) in self.r.iter().enumerate() {
                    let w = q[j] * pole_sin(j, self.intervals, h);
                    s += w * r;
                    total += w;
                }
                s / total
            }
        }
    }
}

fn grid_step(n: usize, intervals: usize) -> f64 {
    if n == 1 {
        2.0 * PI / intervals as f64
    } else {
        PI / intervals as f64
    }
}

/// `sin φ_j`, exactly zero at the poles.
fn pole_sin(j: usize, intervals: usize, h: f64) -> f64 {
    if j == 0 || j == intervals {
        0.0
    } else {
        (j as f64 * h).sin()
    }
}

/// Area of the unit sphere `S^n ⊂ ℝ^{n+1}`.
pub fn unit_sphere_area(n: usize) -> f64 {
    match n {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (n - 1) as f64 * unit_sphere_area(n - 2),
    }
}

/// Per-node geometric data of a radial graph.
#[derive(Debug, Clone)]
pub struct PointwiseGeometry {
    pub n: usize,
    pub intervals: usize,
    pub h: f64,
    pub coord: Vec<f64>,
    pub r: Vec<f64>,
    pub dr: Vec<f64>,
    pub d2r: Vec<f64>,
    /// `w = √(r² + r′²)`.
    pub w: Vec<f64>,
    /// Support function `u = ⟨X, ν⟩ = r²/w`.
    pub u: Vec<f64>,
    /// Area-element density per unit grid coordinate.
    pub density: Vec<f64>,
    /// Quadrature weight times density; `Σ f_i·weight_i ≈ ∫_M f dμ`.
    pub weight: Vec<f64>,
    kappa: Vec<f64>,
    sigma: Vec<f64>,
}

impl PointwiseGeometry {
    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// Principal curvatures at node `i` (meridian first for `n = 2`).
    pub fn kappa(&self, i: usize) -> &[f64] {
        &self.kappa[i * self.n..(i + 1) * self.n]
    }

    /// `σ_m(κ_i)`; zero for `m > n`.
    pub fn sigma(&self, i: usize, m: usize) -> f64 {
        if m > self.n {
            0.0
        } else {
            self.sigma[i * (self.n + 1) + m]
        }
    }

    /// `Σ_i f(i)·dμ_i`.
    pub fn integrate(&self, f: impl Fn(usize) -> f64) -> f64 {
        self.weight.iter().enumerate().map(|(i, w)| f(i) * w).sum()
    }

    /// Minimum of `σ_m` over the nodes, with its location.
    pub fn min_sigma(&self, m: usize) -> (f64, usize) {
        (0..self.len())
            .map(|i| (self.sigma(i, m), i))
            .fold((f64::INFINITY, 0), |a, b| if b.0 < a.0 { b } else { a })
    }

    pub fn max_abs_kappa(&self) -> f64 {
        self.kappa.iter().fold(0.0, |a, k| a.max(k.abs()))
    }

    pub fn area(&self) -> f64 {
        self.weight.iter().sum()
    }
}

/// Curvatures, support function and area weights of `g`.
pub fn compute_geometry(g: &RadialGraph) -> Result<PointwiseGeometry> {
    geometry_from_samples(g.n, g.intervals, &g.r)
}

pub(crate) fn geometry_from_samples(n: usize, intervals: usize, r: &[f64]) -> Result<PointwiseGeometry> {
    RadialGraph::check_grid(n, intervals)?;
    if let Some((node, &value)) = r.iter().enumerate().find(|(_, &v)| !(v > 0.0)) {
        return Err(Error::NonPositiveRadius { node, value });
    }
    let len = r.len();
    let h = grid_step(n, intervals);
    let periodic = n == 1;
    let mut dr = vec![0.0; len];
    let mut d2r = vec![0.0; len];
    stencil::derivatives(r, h, periodic, &mut dr, &mut d2r);

    let quad = if periodic { vec![h; len] } else { stencil::simpson_weights(intervals, h) };
    let mut coord = Vec::with_capacity(len);
    let mut w = Vec::with_capacity(len);
    let mut u = Vec::with_capacity(len);
    let mut density = Vec::with_capacity(len);
    let mut weight = Vec::with_capacity(len);
    let mut kappa = Vec::with_capacity(len * n);
    let mut sigma = vec![0.0; len * (n + 1)];

    for j in 0..len {
        let x = j as f64 * h;
        let (rj, r1, r2) = (r[j], dr[j], d2r[j]);
        let wj = (rj * rj + r1 * r1).sqrt();
        let k_plane = (rj * rj + 2.0 * r1 * r1 - rj * r2) / (wj * wj * wj);
        coord.push(x);
        w.push(wj);
        u.push(rj * rj / wj);
        kappa.push(k_plane);
        let dens = if periodic {
            wj
        } else {
            let s = pole_sin(j, intervals, h);
            // Parallel curvature: horizontal normal component over distance
            // to the axis; at the poles it equals the meridian curvature.
            let k_par = if s == 0.0 { k_plane } else { (rj * s - r1 * x.cos()) / (wj * rj * s) };
            kappa.push(k_par);
            2.0 * PI * rj * s * wj
        };
        density.push(dens);
        weight.push(quad[j] * dens);
        symfunc::elem_sym_into(&kappa[j * n..(j + 1) * n], &mut sigma[j * (n + 1)..(j + 1) * (n + 1)]);
    }

    let geo = PointwiseGeometry { n, intervals, h, coord, r: r.to_vec(), dr, d2r, w, u, density, weight, kappa, sigma };
    for j in 0..len {
        let finite = geo.kappa(j).iter().all(|k| k.is_finite()) && geo.u[j].is_finite() && geo.weight[j].is_finite();
        if !finite {
            return Err(Error::NonFiniteGeometry { node: j });
        }
    }
    Ok(geo)
}

/// `V_{n+1-m} = C_{n,m}·∫σ_{m-1} dμ`, `1 ≤ m ≤ n`.
pub fn quermass_sigma(geo: &PointwiseGeometry, m: usize) -> Result<f64> {
    let c = cnk(geo.n, m)?;
    Ok(c * geo.integrate(|i| geo.sigma(i, m - 1)))
}

/// `V_{n+1-m} = ∫u·σ_m dμ`, `0 ≤ m ≤ n`; `m = 0` gives `(n+1)·Vol(Ω)`.
pub fn quermass_minkowski(geo: &PointwiseGeometry, m: usize) -> Result<f64> {
    if m > geo.n {
        return Err(Error::DegreeOutOfRange { k: m, n: geo.n });
    }
    Ok(geo.integrate(|i| geo.u[i] * geo.sigma(i, m)))
}

/// `V_j` for `1 ≤ j ≤ n+1`: `V_{n+1}` by the Minkowski formula, the rest as
/// curvature integrals.
pub fn quermass(geo: &PointwiseGeometry, j: usize) -> Result<f64> {
    let n = geo.n;
    if j == 0 || j > n + 1 {
        return Err(Error::InvalidArgument(format!("V_{j} is not available for n = {n}")));
    }
    if j == n + 1 {
        quermass_minkowski(geo, 0)
    } else {
        quermass_sigma(geo, n + 1 - j)
    }
}

/// Quermassintegrals `V_{n+1-m}` for `m = 0, …, min(k+1, n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuermassVector {
    pub n: usize,
    /// `values[m] = V_{n+1-m}`.
    pub values: Vec<f64>,
}

impl QuermassVector {
    pub fn compute(geo: &PointwiseGeometry, k: usize) -> Result<Self> {
        let top = (k + 1).min(geo.n);
        let values = (0..=top).map(|m| quermass(geo, geo.n + 1 - m)).collect::<Result<_>>()?;
        Ok(Self { n: geo.n, values })
    }

    /// `V_j`, if it was computed.
    pub fn get(&self, j: usize) -> Option<f64> {
        (self.n + 1).checked_sub(j).and_then(|m| self.values.get(m).copied())
    }
}

fn ratio_from(upper: f64, lower: f64, n: usize, k: usize) -> f64 {
    upper.powf(1.0 / (n + 1 - k) as f64) / lower.powf(1.0 / (n - k) as f64)
}

/// `I_k = V_{n+1-k}^{1/(n+1-k)} / V_{n-k}^{1/(n-k)}`, `0 ≤ k ≤ n-1`.
pub fn iso_ratio(geo: &PointwiseGeometry, k: usize) -> Result<f64> {
    let n = geo.n;
    if k + 1 > n {
        return Err(Error::DegreeOutOfRange { k, n: n - 1 });
    }
    Ok(ratio_from(quermass(geo, n + 1 - k)?, quermass(geo, n - k)?, n, k))
}

/// `V_{n+1-m}(B) = binom(n, m)·|S^n|` for the unit ball.
pub fn ball_quermass(n: usize, m: usize) -> f64 {
    binomial(n, m) * unit_sphere_area(n)
}

/// `I_k(B)`, the value every admissible domain stays below.
pub fn iso_ratio_ball(n: usize, k: usize) -> Result<f64> {
    if n == 0 || k + 1 > n {
        return Err(Error::DegreeOutOfRange { k, n: n.saturating_sub(1) });
    }
    Ok(ratio_from(ball_quermass(n, k), ball_quermass(n, k + 1), n, k))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convexity {
    Strict,
    NonStrict,
    Violated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KConvexReport {
    pub k: usize,
    /// `min_sigma[m-1] = min_i σ_m(κ_i)`.
    pub min_sigma: Vec<f64>,
    pub argmin: Vec<usize>,
    pub status: Convexity,
}

/// k-convexity classification with the default closure tolerance.
pub fn kconvex_report(geo: &PointwiseGeometry, k: usize) -> Result<KConvexReport> {
    kconvex_report_tol(geo, k, symfunc::DEFAULT_CONE_TOL)
}

pub fn kconvex_report_tol(geo: &PointwiseGeometry, k: usize, tol_cone: f64) -> Result<KConvexReport> {
    if k == 0 || k > geo.n {
        return Err(Error::DegreeOutOfRange { k, n: geo.n });
    }
    let (min_sigma, argmin): (Vec<f64>, Vec<usize>) = (1..=k).map(|m| geo.min_sigma(m)).unzip();
    let scale = geo.max_abs_kappa();
    let status = if min_sigma.iter().all(|&s| s > 0.0) {
        Convexity::Strict
    } else if min_sigma.iter().enumerate().all(|(i, &s)| s >= -tol_cone * scale.powi(i as i32 + 1)) {
        Convexity::NonStrict
    } else {
        Convexity::Violated
    };
    Ok(KConvexReport { k, min_sigma, argmin, status })
}

/// `(max r − min r)/mean r`.
pub fn roundness(g: &RadialGraph) -> f64 {
    let (lo, hi) = g.r.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| (lo.min(r), hi.max(r)));
    (hi - lo) / g.mean_radius()
}
