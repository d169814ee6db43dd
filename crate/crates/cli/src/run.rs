use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use quermass_core::csv::fmt_f64;
use quermass_core::error::Error;
use quermass_core::flow::{rescale_state, run_observed, write_trajectory_csv, FlowMode, FlowState, TrajectoryRecord};
use quermass_core::geometry::{compute_geometry, make_shape, write_snapshot_csv, RadialGraph};

use crate::config::{ConfigError, RunConfig};
use crate::{create_file, CliError, Outcome};

/// Maps shape construction failures to the config key responsible.
pub(crate) fn shape_error(e: Error) -> CliError {
    let key = match e {
        Error::InvalidGrid(_) => "grid.N",
        Error::InvalidShape(_) | Error::NonPositiveRadius { .. } => "shape.params",
        _ => "shape",
    };
    CliError::Config(ConfigError::new(key, e.to_string()))
}

pub(crate) fn initial_graph(cfg: &RunConfig) -> Result<RadialGraph, CliError> {
    let spec = cfg.shape_spec()?;
    make_shape(&spec, cfg.problem.n, cfg.grid.intervals).map_err(shape_error)
}

fn write_snapshot(path: &Path, state: &FlowState, mode: FlowMode, k: usize) -> Result<(), CliError> {
    let graph = if mode == FlowMode::RescaledRaw { rescale_state(state) } else { state.graph.clone() };
    let geo = compute_geometry(&graph).map_err(|e| CliError::Numerical(e.to_string()))?;
    let mut out = create_file("output.snapshot_dir", path)?;
    write_snapshot_csv(&geo, k, &mut out)
        .and_then(|_| out.flush())
        .map_err(|e| CliError::io("output.snapshot_dir", path, e))
}

pub(crate) fn write_trajectory(key: &str, path: &Path, record: &TrajectoryRecord) -> Result<(), CliError> {
    let mut out = create_file(key, path)?;
    write_trajectory_csv(record, &mut out).and_then(|_| out.flush()).map_err(|e| CliError::io(key, path, e))
}

/// Runs the configured flow, writing the trajectory CSV and snapshots.
pub fn cmd_run(cfg: &RunConfig, quiet: bool) -> Result<Outcome, CliError> {
    let flow = cfg.flow_config()?;
    let initial = initial_graph(cfg)?;
    let snap_dir = PathBuf::from(&cfg.output.snapshot_dir);
    fs::create_dir_all(&snap_dir).map_err(|e| CliError::io("output.snapshot_dir", &snap_dir, e))?;
    let every = cfg.output.snapshot_every;

    let mut last: Option<FlowState> = None;
    let mut snapshot_err = None;
    let result = run_observed(&flow, &initial, |state, _| {
        if every > 0 && state.accepted_steps % every == 0 && snapshot_err.is_none() {
            let path = snap_dir.join(format!("snapshot_{:08}.csv", state.accepted_steps));
            snapshot_err = write_snapshot(&path, state, flow.mode, flow.k).err();
        }
        last = Some(state.clone());
    });
    if let Some(e) = snapshot_err {
        return Err(e);
    }
    let trajectory = PathBuf::from(&cfg.output.trajectory_path);
    match result {
        Ok(record) => {
            write_trajectory("output.trajectory_path", &trajectory, &record)?;
            let state = last.expect("observer sees the initial state");
            write_snapshot(&snap_dir.join("snapshot_final.csv"), &state, flow.mode, flow.k)?;
            if !quiet {
                let row = record.last().expect("record holds the initial row");
                let m = flow.k.min(flow.n - 1);
                println!(
                    "t={} I{m}={} roundness={} steps={} rejections={} rows={}",
                    fmt_f64(row.t),
                    fmt_f64(*row.ratios.last().expect("at least I_0")),
                    fmt_f64(row.roundness_rescaled),
                    state.accepted_steps,
                    state.rejections,
                    record.rows.len()
                );
            }
            Ok(Outcome::Success)
        }
        Err(failure) => {
            if !failure.record.rows.is_empty() {
                write_trajectory("output.trajectory_path", &trajectory, &failure.record)?;
            }
            if let Some(state) = &failure.last_state {
                write_snapshot(&snap_dir.join("snapshot_last_valid.csv"), state, flow.mode, flow.k)?;
            }
            Err(CliError::from_flow(failure.error))
        }
    }
}
