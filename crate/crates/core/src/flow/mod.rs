//! Time integration of `X_t = (σ_{k-1}/σ_k)(κ)·ν` and of its normalized
//! form `X_t = (σ_{k-1}/σ_k − r(t)·u)·ν` in the radial gauge.
//!
//! Along a normal flow with speed `F` the radial function obeys
//! `∂_t r = F·w/r`; since `u·w/r = r`, the normalized flow becomes
//! `∂_t r = F·w/r − r(t)·r`. The two are related by the rescaling
//! `r̃ = e^{−∫r(s)ds}·r`, which the stepper tracks as `log_scale`.

mod record;
mod stepper;

use thiserror::Error;

pub use record::{write_trajectory_csv, TrajectoryRecord, TrajectoryRow};
pub use stepper::{
    normalization_rt, radial_rhs, rescale_state, run, run_observed, speed_raw, stability_cap, step, volume_rate,
    StepOutcome,
};
pub(crate) use stepper::{check_initial, Integrator};

use crate::error::Error;
use crate::geometry::RadialGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowMode {
    /// `X_t = F·ν`; rows report the raw surface.
    Raw,
    /// `X_t = (F − r(t)u)·ν`, only for `k ≤ n−1`.
    Normalized,
    /// The raw flow, reported after rescaling by `e^{−log_scale}`.
    RescaledRaw,
}

impl FlowMode {
    pub fn as_str(self) -> &'static str {
        match self {
            FlowMode::Raw => "raw",
            FlowMode::Normalized => "normalized",
            FlowMode::RescaledRaw => "rescaled_raw",
        }
    }
}

impl std::str::FromStr for FlowMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "raw" => Ok(FlowMode::Raw),
            "normalized" => Ok(FlowMode::Normalized),
            "rescaled_raw" => Ok(FlowMode::RescaledRaw),
            other => Err(format!("unknown flow mode `{other}` (expected raw, normalized or rescaled_raw)")),
        }
    }
}

/// How `log_scale` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScaleGauge {
    /// `k ≤ n−1`: `log_scale = ∫r(s)ds`, integrated with the Runge–Kutta stages;
    /// keeps `V_{n−k}` fixed.
    Normalization,
    /// `k = n`: `r(t)` degenerates, so the scale holds `V_{n+1}` at its initial
    /// value instead.
    Volume,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowConfig {
    pub n: usize,
    pub k: usize,
    pub mode: FlowMode,
    /// Grid intervals `N`.
    pub intervals: usize,
    pub t_max: f64,
    pub dt_init: f64,
    pub dt_max: f64,
    /// Record a row every this many accepted steps.
    pub sample_every: usize,
    /// Allowed relative drift of the conserved quermassintegral per unit time.
    pub tol_conserve: f64,
    /// Stop once the rescaled surface is this round.
    pub tol_round: f64,
    pub cfl_coefficient: f64,
}

impl FlowConfig {
    /// Defaults for a degree-`k` flow on `n`-dimensional surfaces.
    pub fn new(n: usize, k: usize, mode: FlowMode) -> Self {
        Self {
            n,
            k,
            mode,
            intervals: 256,
            t_max: 1.0,
            dt_init: 1e-5,
            dt_max: 1e-2,
            sample_every: 10,
            tol_conserve: 1e-6,
            tol_round: 0.0,
            cfl_coefficient: 0.25,
        }
    }

    pub fn validate(&self) -> Result<(), FlowError> {
        let bad = |key: &str, msg: String| Err(FlowError::Config { key: key.to_string(), message: msg });
        if self.n != 1 && self.n != 2 {
            return bad("n", format!("n = {} is not supported (1 or 2)", self.n));
        }
        if self.k == 0 || self.k > self.n {
            return bad("k", format!("k = {} must satisfy 1 <= k <= n = {}", self.k, self.n));
        }
        if self.mode == FlowMode::Normalized && self.k == self.n {
            return bad("mode", format!("normalized mode needs k <= n-1, got k = n = {}", self.n));
        }
        if let Err(e) = RadialGraph::check_grid(self.n, self.intervals) {
            return bad("N", e.to_string());
        }
        let positive = [
            ("t_max", self.t_max),
            ("dt_init", self.dt_init),
            ("dt_max", self.dt_max),
            ("tol_conserve", self.tol_conserve),
            ("cfl_coefficient", self.cfl_coefficient),
        ];
        for (key, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return bad(key, format!("{key} must be positive, got {v}"));
            }
        }
        if !(self.tol_round.is_finite() && self.tol_round >= 0.0) {
            return bad("tol_round", format!("tol_round must be nonnegative, got {}", self.tol_round));
        }
        if self.dt_init > self.dt_max {
            return bad("dt_init", format!("dt_init = {} exceeds dt_max = {}", self.dt_init, self.dt_max));
        }
        if self.sample_every == 0 {
            return bad("sample_every", "sample_every must be at least 1".into());
        }
        Ok(())
    }

    pub fn gauge(&self) -> ScaleGauge {
        if self.k < self.n {
            ScaleGauge::Normalization
        } else {
            ScaleGauge::Volume
        }
    }
}

/// A point on a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub t: f64,
    pub graph: RadialGraph,
    /// Accumulated `∫₀ᵗ r(s)ds`; zero at `t = 0` and in normalized mode.
    pub log_scale: f64,
    /// `V_{n+1}` at `t = 0`, reference for the volume gauge.
    pub initial_volume: f64,
    pub last_dt: f64,
    pub rejections: usize,
    pub accepted_steps: usize,
}

impl FlowState {
    pub fn initial(graph: RadialGraph) -> Result<Self, FlowError> {
        let geo = crate::geometry::compute_geometry(&graph)?;
        let initial_volume = crate::geometry::quermass_minkowski(&geo, 0)?;
        Ok(Self { t: 0.0, graph, log_scale: 0.0, initial_volume, last_dt: 0.0, rejections: 0, accepted_steps: 0 })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error("invalid flow configuration `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("initial surface is not strictly {k}-convex: min sigma_{m} = {value} at node {node}")]
    InitialNotConvex { k: usize, m: usize, value: f64, node: usize },

    #[error("left the cone Gamma_{k} at t = {t}: sigma_{k} = {value} at node {node}")]
    ConeExit { k: usize, node: usize, value: f64, t: f64 },

    #[error("time step underflow at t = {t} (dt = {dt}); last rejection: {reason}")]
    DtUnderflow { t: f64, dt: f64, reason: String },

    #[error(transparent)]
    Geometry(#[from] Error),
}

/// A failed run, with everything computed up to the failure.
#[derive(Debug, Clone)]
pub struct RunFailure {
    pub error: FlowError,
    pub record: TrajectoryRecord,
    pub last_state: Option<FlowState>,
}

impl std::fmt::Display for RunFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.error.fmt(f)
    }
}

impl std::error::Error for RunFailure {}
