use std::fmt;
use std::path::Path;

use quermass_core::flow::{FlowConfig, FlowError, FlowMode};
use quermass_core::geometry::{Perturbation, ShapeSpec};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// A configuration problem, located by its dotted key path.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        Self { key: key.into(), message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.key.is_empty() {
            write!(f, "config error: {}", self.message)
        } else {
            write!(f, "config error at `{}`: {}", self.key, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: Problem,
    pub shape: ShapeSection,
    pub grid: Grid,
    #[serde(default)]
    pub stepping: Stepping,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: Output,
    #[serde(default)]
    pub verify: VerifySection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Problem {
    pub n: usize,
    pub k: usize,
    pub mode: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeSection {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default)]
    pub params: Map<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    #[serde(rename = "N")]
    pub intervals: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Stepping {
    pub dt_init: f64,
    pub dt_max: f64,
    pub t_max: f64,
    pub cfl_coefficient: f64,
    pub sample_every: usize,
}

impl Default for Stepping {
    fn default() -> Self {
        let d = FlowConfig::new(1, 1, FlowMode::Raw);
        Self {
            dt_init: d.dt_init,
            dt_max: d.dt_max,
            t_max: d.t_max,
            cfl_coefficient: d.cfl_coefficient,
            sample_every: d.sample_every,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub tol_conserve: f64,
    pub tol_round: f64,
    pub cone_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        let d = FlowConfig::new(1, 1, FlowMode::Raw);
        Self { tol_conserve: d.tol_conserve, tol_round: d.tol_round, cone_tol: quermass_core::symfunc::DEFAULT_CONE_TOL }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Output {
    pub trajectory_path: String,
    /// Snapshot every this many accepted steps; 0 writes only the final one.
    pub snapshot_every: usize,
    pub snapshot_dir: String,
    pub report_path: String,
    pub sweep_dir: String,
}

impl Default for Output {
    fn default() -> Self {
        Self {
            trajectory_path: "trajectory.csv".into(),
            snapshot_every: 0,
            snapshot_dir: "snapshots".into(),
            report_path: "report.csv".into(),
            sweep_dir: "sweep".into(),
        }
    }
}

/// Resolutions and tolerances of the verification suites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySection {
    pub symfunc_samples: usize,
    pub symfunc_seed: u64,
    /// Grid of the Minkowski cross-check, independent of `grid.N`.
    pub minkowski_intervals: usize,
    pub minkowski_tol: f64,
    pub prop1_dt: f64,
    pub prop1_tol: f64,
    /// `(M, dt)` levels of the convergence-order check.
    pub prop1_levels: Vec<(usize, f64)>,
    pub lemma_spacing: f64,
    pub lemma_t_max: f64,
    pub lemma_tol: f64,
    pub variation_probe: f64,
    pub variation_tol: f64,
    pub monotone_slack: f64,
    pub monotone_drift_rate: f64,
    pub monotone_terminal: f64,
}

impl Default for VerifySection {
    fn default() -> Self {
        Self {
            symfunc_samples: 100_000,
            symfunc_seed: 0,
            minkowski_intervals: 512,
            minkowski_tol: 1e-6,
            prop1_dt: 5e-6,
            prop1_tol: 1e-8,
            prop1_levels: vec![(64, 2e-3), (128, 1e-3), (256, 5e-4)],
            lemma_spacing: 1e-3,
            lemma_t_max: 0.05,
            lemma_tol: 1e-3,
            variation_probe: quermass_core::verify::FIRST_VARIATION_PROBE,
            variation_tol: 1e-3,
            monotone_slack: 1e-10,
            monotone_drift_rate: 1e-6,
            monotone_terminal: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedRange {
    pub start: u64,
    pub count: u64,
}

/// Parameter grid of a sweep. Absent lists fall back to the base configuration.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shapes: Option<Vec<ShapeSection>>,
    /// Amplitudes applied to perturbed spheres.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<f64>>,
    /// Single-mode perturbations `cos(ℓx)` applied to perturbed spheres.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<Vec<usize>>,
    /// Random perturbations of perturbed spheres, one per seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeds: Option<SeedRange>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SphereParams {
    radius: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EllipseParams {
    a: f64,
    b: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EllipsoidParams {
    a: f64,
    c: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PerturbedParams {
    #[serde(default = "unit")]
    radius: f64,
    eps: f64,
    #[serde(default)]
    mode: Option<u32>,
    #[serde(default)]
    max_mode: Option<u32>,
}

fn unit() -> f64 {
    1.0
}

/// Default number of modes in random perturbations.
pub const DEFAULT_MAX_MODE: u32 = 6;

fn typed<T: DeserializeOwned>(value: Value, prefix: &str) -> Result<T, ConfigError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        let key = if path == "." { prefix.to_string() } else { format!("{prefix}.{path}") };
        ConfigError::new(key, e.into_inner().to_string())
    })
}

impl ShapeSection {
    pub fn spec(&self, key: &str) -> Result<ShapeSpec, ConfigError> {
        let params = Value::Object(self.params.clone());
        let pkey = format!("{key}.params");
        let no_seed = |spec: ShapeSpec| match self.seed {
            Some(_) => Err(ConfigError::new(format!("{key}.seed"), "seed is only used by random perturbations")),
            None => Ok(spec),
        };
        match self.kind.as_str() {
            "sphere" => {
                let p: SphereParams = typed(params, &pkey)?;
                no_seed(ShapeSpec::Sphere { radius: p.radius })
            }
            "ellipse" => {
                let p: EllipseParams = typed(params, &pkey)?;
                no_seed(ShapeSpec::Ellipse { a: p.a, b: p.b })
            }
            "ellipsoid_of_revolution" => {
                let p: EllipsoidParams = typed(params, &pkey)?;
                no_seed(ShapeSpec::EllipsoidOfRevolution { a: p.a, c: p.c })
            }
            "perturbed_sphere" => {
                let p: PerturbedParams = typed(params, &pkey)?;
                let perturbation = match (p.mode, p.max_mode, self.seed) {
                    (Some(l), None, None) => Perturbation::Mode(l),
                    (None, max_mode, Some(seed)) => {
                        Perturbation::Random { seed, max_mode: max_mode.unwrap_or(DEFAULT_MAX_MODE) }
                    }
                    (Some(_), Some(_), _) => {
                        return Err(ConfigError::new(format!("{pkey}.max_mode"), "give either mode or max_mode"))
                    }
                    (Some(_), None, Some(_)) => {
                        return Err(ConfigError::new(format!("{key}.seed"), "a single-mode perturbation takes no seed"))
                    }
                    (None, _, None) => {
                        return Err(ConfigError::new(
                            format!("{pkey}.mode"),
                            "perturbed_sphere needs params.mode, or a seed for a random perturbation",
                        ))
                    }
                };
                Ok(ShapeSpec::PerturbedSphere { radius: p.radius, eps: p.eps, perturbation })
            }
            other => Err(ConfigError::new(
                format!("{key}.type"),
                format!("unknown shape `{other}` (sphere, ellipse, ellipsoid_of_revolution, perturbed_sphere)"),
            )),
        }
    }

    pub fn from_spec(spec: &ShapeSpec) -> Self {
        let mut params = Map::new();
        let mut seed = None;
        let kind = match *spec {
            ShapeSpec::Sphere { radius } => {
                params.insert("radius".into(), radius.into());
                "sphere"
            }
            ShapeSpec::Ellipse { a, b } => {
                params.insert("a".into(), a.into());
                params.insert("b".into(), b.into());
                "ellipse"
            }
            ShapeSpec::EllipsoidOfRevolution { a, c } => {
                params.insert("a".into(), a.into());
                params.insert("c".into(), c.into());
                "ellipsoid_of_revolution"
            }
            ShapeSpec::PerturbedSphere { radius, eps, perturbation } => {
                params.insert("radius".into(), radius.into());
                params.insert("eps".into(), eps.into());
                match perturbation {
                    Perturbation::Mode(l) => {
                        params.insert("mode".into(), l.into());
                    }
                    Perturbation::Random { seed: s, max_mode } => {
                        params.insert("max_mode".into(), max_mode.into());
                        seed = Some(s);
                    }
                }
                "perturbed_sphere"
            }
        };
        Self { kind: kind.into(), params, seed }
    }
}

/// Dotted config path of a [`FlowConfig`] field.
fn flow_key(key: &str) -> String {
    match key {
        "n" | "k" | "mode" => format!("problem.{key}"),
        "N" => "grid.N".into(),
        "tol_conserve" | "tol_round" => format!("tolerances.{key}"),
        other => format!("stepping.{other}"),
    }
}

impl RunConfig {
    /// Parses a JSON document, applying `--set` overrides first.
    pub fn from_json(text: &str, overrides: &[String]) -> Result<Self, ConfigError> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| ConfigError::new("", format!("not a valid JSON document: {e}")))?;
        Self::from_value(value, overrides)
    }

    pub fn from_value(mut value: Value, overrides: &[String]) -> Result<Self, ConfigError> {
        for o in overrides {
            apply_override(&mut value, o)?;
        }
        typed(value, "").map_err(|e| ConfigError { key: e.key.trim_start_matches('.').to_string(), ..e })
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("", format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text, overrides)
    }

    /// Ellipse `{2, 1}` under the rescaled inverse curvature flow.
    pub fn default_document() -> Self {
        Self {
            problem: Problem { n: 1, k: 1, mode: "rescaled_raw".into() },
            shape: ShapeSection::from_spec(&ShapeSpec::Ellipse { a: 2.0, b: 1.0 }),
            grid: Grid { intervals: 256 },
            stepping: Stepping { t_max: 3.0, sample_every: 100, ..Stepping::default() },
            tolerances: Tolerances::default(),
            output: Output::default(),
            verify: VerifySection::default(),
            sweep: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn mode(&self) -> Result<FlowMode, ConfigError> {
        self.problem.mode.parse().map_err(|e: String| ConfigError::new("problem.mode", e))
    }

    pub fn shape_spec(&self) -> Result<ShapeSpec, ConfigError> {
        self.shape.spec("shape")
    }

    pub fn flow_config(&self) -> Result<FlowConfig, ConfigError> {
        let cfg = FlowConfig {
            intervals: self.grid.intervals,
            t_max: self.stepping.t_max,
            dt_init: self.stepping.dt_init,
            dt_max: self.stepping.dt_max,
            sample_every: self.stepping.sample_every,
            tol_conserve: self.tolerances.tol_conserve,
            tol_round: self.tolerances.tol_round,
            cfl_coefficient: self.stepping.cfl_coefficient,
            ..FlowConfig::new(self.problem.n, self.problem.k, self.mode()?)
        };
        cfg.validate().map_err(|e| match e {
            FlowError::Config { key, message } => ConfigError::new(flow_key(&key), message),
            other => ConfigError::new("", other.to_string()),
        })?;
        if !(self.tolerances.cone_tol.is_finite() && self.tolerances.cone_tol >= 0.0) {
            return Err(ConfigError::new("tolerances.cone_tol", "cone_tol must be nonnegative"));
        }
        Ok(cfg)
    }
}

/// Applies `a.b.c=value`; the value is read as JSON, or taken as a string.
pub fn apply_override(doc: &mut Value, assignment: &str) -> Result<(), ConfigError> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| ConfigError::new("", format!("override `{assignment}` is not of the form key=value")))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = doc;
    let parts: Vec<&str> = path.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        if part.is_empty() {
            return Err(ConfigError::new(path, "empty key segment"));
        }
        let obj = node
            .as_object_mut()
            .ok_or_else(|| ConfigError::new(parts[..i].join("."), "not a section, cannot set a key inside it"))?;
        if i + 1 == parts.len() {
            obj.insert(part.to_string(), value);
            return Ok(());
        }
        node = obj.entry(part.to_string()).or_insert_with(|| Value::Object(Map::new()));
    }
    unreachable!("split yields at least one segment")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> Value {
        serde_json::json!({
            "problem": {"n": 2, "k": 1, "mode": "normalized"},
            "shape": {"type": "ellipsoid_of_revolution", "params": {"a": 1.5, "c": 1.0}},
            "grid": {"N": 128}
        })
    }

    #[test]
    fn minimal_document_gets_defaults() {
        let c = RunConfig::from_value(base(), &[]).unwrap();
        assert_eq!(c.output.trajectory_path, "trajectory.csv");
        let f = c.flow_config().unwrap();
        assert_eq!((f.n, f.k, f.intervals, f.mode), (2, 1, 128, FlowMode::Normalized));
    }

    #[test]
    fn unknown_keys_are_named() {
        let mut v = base();
        v["stepping"] = serde_json::json!({"dt_inti": 1e-4});
        let e = RunConfig::from_value(v, &[]).unwrap_err();
        assert_eq!(e.key, "stepping.dt_inti", "{e}");
        let mut v = base();
        v["shape"]["params"]["radius"] = 1.0.into();
        let c = RunConfig::from_value(v, &[]).unwrap();
        assert_eq!(c.shape_spec().unwrap_err().key, "shape.params.radius");
        let mut v = base();
        v["colour"] = "red".into();
        assert_eq!(RunConfig::from_value(v, &[]).unwrap_err().key, "colour");
    }

    #[test]
    fn invariant_violations_name_the_key() {
        let c = RunConfig::from_value(base(), &["problem.k=3".into()]).unwrap();
        assert_eq!(c.flow_config().unwrap_err().key, "problem.k");
        let c = RunConfig::from_value(base(), &["grid.N=15".into()]).unwrap();
        assert_eq!(c.flow_config().unwrap_err().key, "grid.N");
        let c = RunConfig::from_value(base(), &["problem.mode=sideways".into()]).unwrap();
        assert_eq!(c.flow_config().unwrap_err().key, "problem.mode");
        let c = RunConfig::from_value(base(), &["stepping.dt_init=1".into()]).unwrap();
        assert_eq!(c.flow_config().unwrap_err().key, "stepping.dt_init");
    }

    #[test]
    fn overrides() {
        let c = RunConfig::from_value(base(), &["stepping.t_max=2.5".into(), "output.snapshot_dir=out/snaps".into()])
            .unwrap();
        assert_eq!(c.stepping.t_max, 2.5);
        assert_eq!(c.output.snapshot_dir, "out/snaps");
        assert!(RunConfig::from_value(base(), &["grid.N.x=1".into()]).is_err());
        assert!(RunConfig::from_value(base(), &["no_equals".into()]).is_err());
    }

    #[test]
    fn round_trip_is_idempotent() {
        let mut v = base();
        v["sweep"] = serde_json::json!({"eps": [0.05, 0.1], "seeds": {"start": 3, "count": 2}});
        let c = RunConfig::from_value(v, &[]).unwrap();
        let once = c.to_json();
        let again = RunConfig::from_json(&once, &[]).unwrap();
        assert_eq!(c, again);
        assert_eq!(once, again.to_json());
        let d = RunConfig::default_document();
        assert_eq!(RunConfig::from_json(&d.to_json(), &[]).unwrap(), d);
    }

    #[test]
    fn shape_sections() {
        let s = |v: Value| serde_json::from_value::<ShapeSection>(v).unwrap().spec("shape");
        assert_eq!(
            s(serde_json::json!({"type": "perturbed_sphere", "params": {"eps": 0.1, "mode": 3}})).unwrap(),
            ShapeSpec::PerturbedSphere { radius: 1.0, eps: 0.1, perturbation: Perturbation::Mode(3) }
        );
        assert_eq!(
            s(serde_json::json!({"type": "perturbed_sphere", "params": {"eps": 0.1}, "seed": 4})).unwrap(),
            ShapeSpec::PerturbedSphere {
                radius: 1.0,
                eps: 0.1,
                perturbation: Perturbation::Random { seed: 4, max_mode: DEFAULT_MAX_MODE }
            }
        );
        assert_eq!(s(serde_json::json!({"type": "perturbed_sphere", "params": {"eps": 0.1}})).unwrap_err().key, "shape.params.mode");
        assert_eq!(s(serde_json::json!({"type": "cube"})).unwrap_err().key, "shape.type");
        assert_eq!(s(serde_json::json!({"type": "sphere", "params": {}})).unwrap_err().key, "shape.params");
        for spec in [
            ShapeSpec::Ellipse { a: 2.0, b: 1.0 },
            ShapeSpec::PerturbedSphere { radius: 2.0, eps: 0.1, perturbation: Perturbation::Random { seed: 9, max_mode: 4 } },
        ] {
            assert_eq!(ShapeSection::from_spec(&spec).spec("shape").unwrap(), spec);
        }
    }
}
