use std::io::Write;
use std::path::PathBuf;

use quermass_core::csv::fmt_f64;
use quermass_core::flow::{run, FlowConfig, FlowError, FlowMode, TrajectoryRecord};
use quermass_core::geometry::{make_shape, Perturbation, ShapeSpec};
use quermass_core::verify::{check_monotone_series, MonotoneTolerances};
use rayon::prelude::*;
use serde_json::Value;

use crate::config::{ConfigError, RunConfig, ShapeSection, DEFAULT_MAX_MODE};
use crate::run::{shape_error, write_trajectory};
use crate::{create_file, CliError, Outcome};

#[derive(Debug, Clone)]
struct Combination {
    id: usize,
    shape: ShapeSection,
    spec: ShapeSpec,
    flow: FlowConfig,
}

struct Finished {
    status: &'static str,
    detail: Option<String>,
    record: TrajectoryRecord,
    /// Monotonicity, conservation and terminal flags; absent for raw runs and failures.
    flags: Option<[bool; 3]>,
}

fn perturbations(base: Perturbation, cfg_modes: Option<&[u32]>, seeds: Option<(u64, u64)>) -> Vec<Perturbation> {
    let max_mode = match base {
        Perturbation::Random { max_mode, .. } => max_mode,
        Perturbation::Mode(_) => DEFAULT_MAX_MODE,
    };
    let mut out: Vec<Perturbation> = cfg_modes.unwrap_or_default().iter().map(|&l| Perturbation::Mode(l)).collect();
    if let Some((start, count)) = seeds {
        out.extend((start..start + count).map(|seed| Perturbation::Random { seed, max_mode }));
    }
    if out.is_empty() {
        out.push(base);
    }
    out
}

fn combinations(cfg: &RunConfig) -> Result<Vec<Combination>, CliError> {
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| ConfigError::new("sweep", "sweep needs a `sweep` section"))?;
    let base_flow = cfg.flow_config()?;
    let shapes: Vec<(String, ShapeSection)> = match &sweep.shapes {
        Some(list) => list.iter().enumerate().map(|(i, s)| (format!("sweep.shapes[{i}]"), s.clone())).collect(),
        None => vec![("shape".into(), cfg.shape.clone())],
    };
    let ks = sweep.k.clone().unwrap_or_else(|| vec![cfg.problem.k]);
    let seeds = sweep.seeds.as_ref().map(|s| (s.start, s.count));

    let mut out = Vec::new();
    for (key, section) in shapes {
        let spec = section.spec(&key)?;
        let variants = match spec {
            ShapeSpec::PerturbedSphere { radius, eps, perturbation } => {
                let amplitudes = sweep.eps.clone().unwrap_or_else(|| vec![eps]);
                let mut v = Vec::new();
                for &e in &amplitudes {
                    for p in perturbations(perturbation, sweep.modes.as_deref(), seeds) {
                        v.push(ShapeSpec::PerturbedSphere { radius, eps: e, perturbation: p });
                    }
                }
                v
            }
            other => vec![other],
        };
        for spec in variants {
            for &k in &ks {
                let flow = FlowConfig { k, ..base_flow.clone() };
                flow.validate().map_err(|e| match e {
                    FlowError::Config { key: fk, message } if fk == "k" || fk == "mode" => {
                        ConfigError::new("sweep.k", message)
                    }
                    other => ConfigError::new("sweep", other.to_string()),
                })?;
                out.push(Combination { id: out.len(), shape: ShapeSection::from_spec(&spec), spec, flow });
            }
        }
    }
    Ok(out)
}

fn execute(c: &Combination, tol: MonotoneTolerances) -> Result<Finished, CliError> {
    let initial = make_shape(&c.spec, c.flow.n, c.flow.intervals).map_err(shape_error)?;
    Ok(match run(&c.flow, &initial) {
        Ok(record) => {
            let flags = if c.flow.mode == FlowMode::Raw {
                None
            } else {
                let reports = check_monotone_series(&record, tol).map_err(|e| CliError::Numerical(e.to_string()))?;
                Some([reports[0].pass, reports[1].pass, reports[2].pass])
            };
            Finished { status: "ok", detail: None, record, flags }
        }
        Err(f) => {
            let status = match f.error {
                FlowError::InitialNotConvex { .. } => "not_convex",
                FlowError::ConeExit { .. } => "cone_exit",
                FlowError::DtUnderflow { .. } => "dt_underflow",
                _ => "error",
            };
            Finished { status, detail: Some(f.error.to_string()), record: f.record, flags: None }
        }
    })
}

/// `key=value` pairs joined by `;`, free of CSV separators.
fn describe_params(shape: &ShapeSection) -> String {
    let mut parts: Vec<String> = shape
        .params
        .iter()
        .map(|(k, v)| match v {
            Value::Number(x) if x.is_f64() => format!("{k}={}", fmt_f64(x.as_f64().unwrap_or(f64::NAN))),
            other => format!("{k}={other}"),
        })
        .collect();
    if let Some(seed) = shape.seed {
        parts.push(format!("seed={seed}"));
    }
    parts.join(";")
}

/// Runs every combination, one trajectory file each, plus `index.csv`.
pub fn cmd_sweep(cfg: &RunConfig, quiet: bool) -> Result<Outcome, CliError> {
    let combos = combinations(cfg)?;
    let v = &cfg.verify;
    let tol = MonotoneTolerances { slack: v.monotone_slack, drift_rate: v.monotone_drift_rate, terminal: v.monotone_terminal };
    let dir = PathBuf::from(&cfg.output.sweep_dir);
    let results: Vec<Result<Finished, CliError>> = combos.par_iter().map(|c| execute(c, tol)).collect();

    let index_path = dir.join("index.csv");
    let mut index = create_file("output.sweep_dir", &index_path)?;
    let io = |e| CliError::io("output.sweep_dir", &index_path, e);
    writeln!(index, "id,shape,params,k,status,final_t,final_ratio,monotone,conserved,terminal,pass").map_err(io)?;
    let mut failures = 0;
    for (c, result) in combos.iter().zip(results) {
        let done = result?;
        write_trajectory("output.sweep_dir", &dir.join(format!("traj_{:04}.csv", c.id)), &done.record)?;
        let last = done.record.last();
        let (t, ratio) = match last {
            Some(row) => (fmt_f64(row.t), fmt_f64(*row.ratios.last().expect("at least I_0"))),
            None => (String::new(), String::new()),
        };
        let flag = |i: usize| done.flags.map(|f| f[i].to_string()).unwrap_or_default();
        let pass = done.status == "ok" && done.flags.is_none_or(|f| f.iter().all(|&b| b));
        failures += usize::from(!pass);
        writeln!(
            index,
            "{},{},{},{},{},{t},{ratio},{},{},{},{pass}",
            c.id,
            c.shape.kind,
            describe_params(&c.shape),
            c.flow.k,
            done.status,
            flag(0),
            flag(1),
            flag(2)
        )
        .map_err(io)?;
        if let Some(d) = &done.detail {
            eprintln!("combination {}: {d}", c.id);
        }
        if !quiet {
            println!("combination {} ({} k={}): {} pass={pass}", c.id, c.shape.kind, c.flow.k, done.status);
        }
    }
    index.flush().map_err(io)?;
    if !quiet {
        println!("{} combinations, {failures} failing; index written to {}", combos.len(), index_path.display());
    }
    Ok(if failures == 0 { Outcome::Success } else { Outcome::ToleranceViolation })
}
