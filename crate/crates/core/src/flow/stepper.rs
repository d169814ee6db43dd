use super::{FlowConfig, FlowError, FlowMode, FlowState, RunFailure, ScaleGauge, TrajectoryRecord, TrajectoryRow};
use crate::error::{Error, Result};
use crate::geometry::{self, compute_geometry, geometry_from_samples, PointwiseGeometry, RadialGraph};
use crate::symfunc::{cnk, elem_sym_gradient};

/// Consecutive acceptances before the step size may double.
const GROWTH_STREAK: usize = 10;
/// Relative step size below which the controller gives up.
const DT_FLOOR: f64 = 1e-12;
/// Relative change of the conserved quantity attributed to rounding.
const ROUNDOFF_DRIFT: f64 = 64.0 * f64::EPSILON;

/// Normal speed `F_i = σ_{k-1}(κ_i)/σ_k(κ_i)`.
pub fn speed_raw(geo: &PointwiseGeometry, k: usize) -> Result<Vec<f64>> {
    if k == 0 || k > geo.n {
        return Err(Error::DegreeOutOfRange { k, n: geo.n });
    }
    (0..geo.len())
        .map(|i| {
            let sk = geo.sigma(i, k);
            if sk > 0.0 {
                Ok(geo.sigma(i, k - 1) / sk)
            } else {
                Err(Error::ConeExit { k, node: i, value: sk })
            }
        })
        .collect()
}

/// `r(t) = ∫σ_{k+1}σ_{k-1}/σ_k dμ / (C_{n,k+1}·∫σ_k dμ)`, the rate that keeps
/// `V_{n−k}` fixed. Only defined for `k ≤ n−1`.
pub fn normalization_rt(geo: &PointwiseGeometry, k: usize) -> Result<f64> {
    let n = geo.n;
    if k == 0 || k + 1 > n {
        return Err(Error::DegreeOutOfRange { k, n: n.saturating_sub(1) });
    }
    let speed = speed_raw(geo, k)?;
    let num = geo.integrate(|i| geo.sigma(i, k + 1) * speed[i]);
    let den = cnk(n, k + 1)? * geo.integrate(|i| geo.sigma(i, k));
    Ok(num / den)
}

/// `∫F dμ / V_{n+1}`: the rate of `ln V_{n+1}/(n+1)` under the raw flow.
pub fn volume_rate(geo: &PointwiseGeometry, k: usize) -> Result<f64> {
    let speed = speed_raw(geo, k)?;
    Ok(geo.integrate(|i| speed[i]) / geometry::quermass_minkowski(geo, 0)?)
}

/// `∂_t r` in the radial gauge.
pub fn radial_rhs(geo: &PointwiseGeometry, mode: FlowMode, k: usize) -> Result<Vec<f64>> {
    let speed = speed_raw(geo, k)?;
    let mut rhs: Vec<f64> = (0..geo.len()).map(|i| speed[i] * geo.w[i] / geo.r[i]).collect();
    if mode == FlowMode::Normalized {
        let rate = normalization_rt(geo, k)?;
        for (v, r) in rhs.iter_mut().zip(&geo.r) {
            *v -= rate * r;
        }
    }
    Ok(rhs)
}

/// Stability bound `cfl·h²·min_i w_i²/Σ_j |∂F/∂κ_j|` from the linearized
/// principal part of the flow. Heuristic.
pub fn stability_cap(geo: &PointwiseGeometry, k: usize, cfl: f64) -> f64 {
    let mut worst = f64::INFINITY;
    for i in 0..geo.len() {
        let kap = geo.kappa(i);
        let (s_lo, s_k) = (geo.sigma(i, k - 1), geo.sigma(i, k));
        let g_k = elem_sym_gradient(kap, k).unwrap_or_default();
        let g_lo = if k >= 2 { elem_sym_gradient(kap, k - 1).unwrap_or_default() } else { vec![0.0; kap.len()] };
        let diffusivity: f64 = (0..kap.len()).map(|j| ((g_lo[j] * s_k - s_lo * g_k[j]) / (s_k * s_k)).abs()).sum();
        if diffusivity > 0.0 {
            worst = worst.min(geo.w[i] * geo.w[i] / diffusivity);
        }
    }
    cfl * geo.h * geo.h * worst
}

/// The rescaled surface `e^{−log_scale}·r`.
pub fn rescale_state(state: &FlowState) -> RadialGraph {
    if state.log_scale == 0.0 {
        return state.graph.clone();
    }
    state.graph.scaled((-state.log_scale).exp())
}

#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum StepOutcome {
    Accepted { state: FlowState, geometry: PointwiseGeometry },
    Rejected { reason: Error },
}

struct Stage {
    rhs: Vec<f64>,
    rate: f64,
}

fn tracks_rate(cfg: &FlowConfig) -> bool {
    cfg.mode != FlowMode::Normalized && cfg.gauge() == ScaleGauge::Normalization
}

fn evaluate(cfg: &FlowConfig, intervals: usize, r: &[f64]) -> Result<(Stage, PointwiseGeometry)> {
    let geo = geometry_from_samples(cfg.n, intervals, r)?;
    let rhs = radial_rhs(&geo, cfg.mode, cfg.k)?;
    let rate = if tracks_rate(cfg) { normalization_rt(&geo, cfg.k)? } else { 0.0 };
    Ok((Stage { rhs, rate }, geo))
}

fn strict_cone_violation(geo: &PointwiseGeometry, k: usize) -> Option<Error> {
    (1..=k).find_map(|m| {
        let (value, node) = geo.min_sigma(m);
        (value <= 0.0).then_some(Error::ConeExit { k: m, node, value })
    })
}

/// `V_{n−k}` of the monitored (rescaled) surface.
fn conserved_quantity(geo: &PointwiseGeometry, k: usize, log_scale: f64) -> Result<f64> {
    let j = geo.n - k;
    Ok(geometry::quermass(geo, j)? * (-(j as f64) * log_scale).exp())
}

/// One classical Runge–Kutta step of size `dt`.
///
/// `Err` means `state` itself is unusable; a step that leaves the admissible
/// set or breaks the conservation law comes back as `Rejected`.
pub fn step(state: &FlowState, dt: f64, cfg: &FlowConfig) -> std::result::Result<StepOutcome, FlowError> {
    let intervals = state.graph.intervals();
    let r0 = state.graph.samples();
    let (s1, geo0) = evaluate(cfg, intervals, r0)?;

    let shifted = |base: &[f64], rhs: &[f64], h: f64| -> Vec<f64> {
        base.iter().zip(rhs).map(|(r, v)| r + h * v).collect()
    };
    let mut stages = vec![s1];
    for frac in [0.5, 0.5, 1.0] {
        let trial = shifted(r0, &stages.last().unwrap().rhs, frac * dt);
        match evaluate(cfg, intervals, &trial) {
            Ok((s, _)) => stages.push(s),
            Err(reason) => return Ok(StepOutcome::Rejected { reason }),
        }
    }
    let r_new: Vec<f64> = (0..r0.len())
        .map(|i| {
            r0[i] + dt / 6.0
                * (stages[0].rhs[i] + 2.0 * stages[1].rhs[i] + 2.0 * stages[2].rhs[i] + stages[3].rhs[i])
        })
        .collect();
    let geo = match geometry_from_samples(cfg.n, intervals, &r_new) {
        Ok(g) => g,
        Err(reason) => return Ok(StepOutcome::Rejected { reason }),
    };
    if let Some(reason) = strict_cone_violation(&geo, cfg.k) {
        return Ok(StepOutcome::Rejected { reason });
    }

    let log_scale = match (cfg.mode, cfg.gauge()) {
        (FlowMode::Normalized, _) => 0.0,
        (_, ScaleGauge::Normalization) => {
            state.log_scale
                + dt / 6.0 * (stages[0].rate + 2.0 * stages[1].rate + 2.0 * stages[2].rate + stages[3].rate)
        }
        (_, ScaleGauge::Volume) => {
            (geometry::quermass_minkowski(&geo, 0)? / state.initial_volume).ln() / (cfg.n + 1) as f64
        }
    };

    if cfg.mode != FlowMode::Raw && cfg.gauge() == ScaleGauge::Normalization {
        let before = conserved_quantity(&geo0, cfg.k, state.log_scale)?;
        let after = conserved_quantity(&geo, cfg.k, log_scale)?;
        let drift = ((after - before) / before).abs();
        let allowed = cfg.tol_conserve * dt + ROUNDOFF_DRIFT;
        if drift > allowed {
            return Ok(StepOutcome::Rejected {
                reason: Error::ConservationDrift { index: cfg.n - cfg.k, drift, allowed },
            });
        }
    }

    let graph = RadialGraph::new(cfg.n, r_new)?;
    let next = FlowState {
        t: state.t + dt,
        graph,
        log_scale,
        initial_volume: state.initial_volume,
        last_dt: dt,
        rejections: state.rejections,
        accepted_steps: state.accepted_steps + 1,
    };
    Ok(StepOutcome::Accepted { state: next, geometry: geo })
}

/// Adaptive driver shared by [`run`] and the verification checks.
pub(crate) struct Integrator<'a> {
    cfg: &'a FlowConfig,
    pub(crate) dt: f64,
    streak: usize,
}

impl<'a> Integrator<'a> {
    pub(crate) fn new(cfg: &'a FlowConfig) -> Self {
        Self { cfg, dt: cfg.dt_init, streak: 0 }
    }

    /// Takes one accepted step without passing `t_limit`, halving on rejection.
    pub(crate) fn advance(
        &mut self,
        state: &FlowState,
        t_limit: f64,
    ) -> std::result::Result<(FlowState, PointwiseGeometry), FlowError> {
        let mut rejections = 0;
        // Drift per unit time at the previous rejected step size.
        let mut last_drift: Option<(f64, f64)> = None;
        loop {
            let remaining = t_limit - state.t;
            let lands = self.dt >= remaining;
            let dt_try = if lands { remaining } else { self.dt };
            match step(state, dt_try, self.cfg)? {
                StepOutcome::Accepted { mut state, geometry } => {
                    if lands {
                        state.t = t_limit;
                    }
                    state.rejections += rejections;
                    self.streak += 1;
                    if self.streak >= GROWTH_STREAK {
                        let cap = stability_cap(&geometry, self.cfg.k, self.cfg.cfl_coefficient);
                        let limit = self.cfg.dt_max.min(cap);
                        self.dt = (2.0 * self.dt).min(limit).max(self.dt);
                        self.streak = 0;
                    }
                    return Ok((state, geometry));
                }
                StepOutcome::Rejected { reason } => {
                    rejections += 1;
                    self.streak = 0;
                    self.dt = dt_try / 2.0;
                    if let Error::ConservationDrift { index, drift, .. } = reason {
                        let rate = drift / dt_try;
                        // The time-stepping part of the drift rate falls 16-fold per halving;
                        // what survives extrapolation to dt = 0 comes from the grid.
                        if let Some((dt_prev, rate_prev)) = last_drift {
                            let limit = (16.0 * rate - rate_prev) / 15.0;
                            if (dt_prev / dt_try - 2.0).abs() < 1e-9 && limit > self.cfg.tol_conserve {
                                return Err(FlowError::DtUnderflow {
                                    t: state.t,
                                    dt: dt_try,
                                    reason: format!(
                                        "V_{index} drifts at {limit:e} per unit time as dt -> 0, above \
                                         tol_conserve = {:e}; refine the grid or relax tol_conserve",
                                        self.cfg.tol_conserve
                                    ),
                                });
                            }
                        }
                        last_drift = Some((dt_try, rate));
                    } else {
                        last_drift = None;
                    }
                    if self.dt < DT_FLOOR * self.cfg.dt_init {
                        return Err(match reason {
                            Error::ConeExit { k, node, value } => FlowError::ConeExit { k, node, value, t: state.t },
                            other => FlowError::DtUnderflow { t: state.t, dt: self.dt, reason: other.to_string() },
                        });
                    }
                }
            }
        }
    }
}

pub(crate) fn make_row(cfg: &FlowConfig, state: &FlowState, geo: &PointwiseGeometry) -> Result<TrajectoryRow> {
    let record = TrajectoryRecord::new(cfg.n, cfg.k, cfg.mode);
    let scale = if cfg.mode == FlowMode::RescaledRaw { (-state.log_scale).exp() } else { 1.0 };
    let quermass = record
        .quermass_indices()
        .iter()
        .map(|&j| Ok(geometry::quermass(geo, j)? * scale.powi(j as i32)))
        .collect::<Result<Vec<f64>>>()?;
    let v = |j: usize| quermass[cfg.n + 1 - j];
    let ratios = record
        .ratio_indices()
        .iter()
        .map(|&m| {
            let (a, b) = (cfg.n + 1 - m, cfg.n - m);
            v(a).powf(1.0 / a as f64) / v(b).powf(1.0 / b as f64)
        })
        .collect();
    let r_t = match cfg.gauge() {
        ScaleGauge::Normalization => normalization_rt(geo, cfg.k)?,
        ScaleGauge::Volume => volume_rate(geo, cfg.k)?,
    };
    Ok(TrajectoryRow {
        t: state.t,
        dt: state.last_dt,
        log_scale: state.log_scale,
        quermass,
        ratios,
        r_t,
        roundness_rescaled: geometry::roundness(&state.graph),
        min_sigma_k: geo.min_sigma(cfg.k).0 * scale.powi(-(cfg.k as i32)),
    })
}

pub(crate) fn check_initial(cfg: &FlowConfig, initial: &RadialGraph) -> std::result::Result<PointwiseGeometry, FlowError> {
    cfg.validate()?;
    if initial.n() != cfg.n || initial.intervals() != cfg.intervals {
        return Err(FlowError::Config {
            key: "N".into(),
            message: format!(
                "initial graph has n = {}, N = {}; configuration expects n = {}, N = {}",
                initial.n(),
                initial.intervals(),
                cfg.n,
                cfg.intervals
            ),
        });
    }
    let geo = compute_geometry(initial)?;
    if let Some(Error::ConeExit { k: m, node, value }) = strict_cone_violation(&geo, cfg.k) {
        return Err(FlowError::InitialNotConvex { k: cfg.k, m, value, node });
    }
    Ok(geo)
}

/// Integrates to `t_max`, or until the rescaled surface is `tol_round`-round.
pub fn run(cfg: &FlowConfig, initial: &RadialGraph) -> std::result::Result<TrajectoryRecord, Box<RunFailure>> {
    run_observed(cfg, initial, |_, _| {})
}

/// [`run`], calling `observer` on the initial state and after every accepted step.
pub fn run_observed(
    cfg: &FlowConfig,
    initial: &RadialGraph,
    mut observer: impl FnMut(&FlowState, &PointwiseGeometry),
) -> std::result::Result<TrajectoryRecord, Box<RunFailure>> {
    let mut record = TrajectoryRecord::new(cfg.n, cfg.k, cfg.mode);
    let fail = |error: FlowError, record: TrajectoryRecord, last_state: Option<FlowState>| {
        Box::new(RunFailure { error, record, last_state })
    };
    let geo = match check_initial(cfg, initial) {
        Ok(g) => g,
        Err(e) => return Err(fail(e, record, None)),
    };
    let mut state = match FlowState::initial(initial.clone()) {
        Ok(s) => s,
        Err(e) => return Err(fail(e, record, None)),
    };
    observer(&state, &geo);
    match make_row(cfg, &state, &geo) {
        Ok(row) => record.rows.push(row),
        Err(e) => return Err(fail(e.into(), record, Some(state))),
    }

    let mut integrator = Integrator::new(cfg);
    let mut since_sample = 0;
    while state.t < cfg.t_max {
        let (next, geo) = match integrator.advance(&state, cfg.t_max) {
            Ok(x) => x,
            Err(e) => return Err(fail(e, record, Some(state))),
        };
        state = next;
        observer(&state, &geo);
        since_sample += 1;
        let done = state.t >= cfg.t_max || geometry::roundness(&state.graph) < cfg.tol_round;
        if since_sample >= cfg.sample_every || done {
            match make_row(cfg, &state, &geo) {
                Ok(row) => record.rows.push(row),
                Err(e) => return Err(fail(e.into(), record, Some(state))),
            }
            since_sample = 0;
        }
        if done {
            break;
        }
    }
    Ok(record)
}
