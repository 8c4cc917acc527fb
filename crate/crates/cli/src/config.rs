//! Scenario configuration: one JSON document per run, validated field by
//! field with aggregated error reporting. Unknown keys are rejected.

use std::path::PathBuf;

use serde_json::Value;

use cavity_dw_core::gpe::EDGE_DENSITY_LIMIT;
use cavity_dw_core::two_mode::InitialWell;
use cavity_dw_core::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    GroundSweep,
    Dynamics,
    RampUp,
    RampDown,
    TwoModeCr,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::GroundSweep => "ground_sweep",
            Self::Dynamics => "dynamics",
            Self::RampUp => "ramp_up",
            Self::RampDown => "ramp_down",
            Self::TwoModeCr => "two_mode_cr",
        }
    }

    pub fn all() -> [ScenarioKind; 5] {
        [
            Self::GroundSweep,
            Self::Dynamics,
            Self::RampUp,
            Self::RampDown,
            Self::TwoModeCr,
        ]
    }

    pub fn describe(self) -> &'static str {
        match self {
            Self::GroundSweep => "pump sweep of variational branches and GPE ground states",
            Self::Dynamics => "real-time propagation at fixed pump",
            Self::RampUp => "real-time run with the pump ramped up from its ground state",
            Self::RampDown => "real-time run with the pump ramped down from its ground state",
            Self::TwoModeCr => "two-mode collapse-revival trace for a coherent initial state",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Log,
    Linear,
}

#[derive(Debug, Clone)]
pub struct SweepCfg {
    pub eta_start: f64,
    pub eta_end: f64,
    pub n_points: Option<usize>,
    pub spacing: Spacing,
}

impl SweepCfg {
    pub fn eta_values(&self) -> Vec<f64> {
        let n = self.n_points.unwrap_or(2).max(2);
        (0..n)
            .map(|i| {
                let f = i as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Linear => self.eta_start + (self.eta_end - self.eta_start) * f,
                    Spacing::Log => self.eta_start * (self.eta_end / self.eta_start).powf(f),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct TimeCfg {
    pub t_final: f64,
    pub dt: f64,
    pub snapshot_every: usize,
    pub record_every: usize,
    pub edge_density_limit: f64,
}

#[derive(Debug, Clone)]
pub enum InitialStateCfg {
    Ground,
    RightMode,
    Gaussian { center: f64, width: f64 },
}

#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    pub params: ModelParams,
    pub grid_points: usize,
    pub grid_x_max: f64,
    pub time: Option<TimeCfg>,
    pub initial_state: Option<InitialStateCfg>,
    pub sweep: Option<SweepCfg>,
    pub initial_well: InitialWell,
    pub output_dir: PathBuf,
    /// Raw document, echoed into the run manifest.
    pub raw: Value,
}

#[derive(Debug, Clone)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

struct Checker {
    errors: Vec<ConfigError>,
}

impl Checker {
    fn err(&mut self, path: &str, message: impl Into<String>) {
        self.errors.push(ConfigError {
            path: path.to_string(),
            message: message.into(),
        });
    }

    fn known_keys(&mut self, path: &str, obj: &Value, allowed: &[&str]) {
        if let Some(map) = obj.as_object() {
            for key in map.keys() {
                if !allowed.contains(&key.as_str()) {
                    self.err(
                        &format!("{path}.{key}"),
                        format!("unknown key (allowed: {})", allowed.join(", ")),
                    );
                }
            }
        }
    }

    fn number(&mut self, obj: &Value, path: &str, key: &str) -> Option<f64> {
        match obj.get(key) {
            Some(v) => match v.as_f64() {
                Some(x) if x.is_finite() => Some(x),
                _ => {
                    self.err(&format!("{path}.{key}"), "expected a finite number");
                    None
                }
            },
            None => {
                self.err(&format!("{path}.{key}"), "missing required field");
                None
            }
        }
    }

    fn opt_number(&mut self, obj: &Value, path: &str, key: &str) -> Option<f64> {
        obj.get(key)?;
        self.number(obj, path, key)
    }

    /// A rate: either an oscillator-unit number or {"value": v, "unit": "kappa"}.
    fn rate(&mut self, obj: &Value, path: &str, key: &str, kappa: f64) -> Option<f64> {
        let v = match obj.get(key) {
            Some(v) => v,
            None => {
                self.err(&format!("{path}.{key}"), "missing required field");
                return None;
            }
        };
        self.rate_value(v, &format!("{path}.{key}"), kappa)
    }

    fn rate_value(&mut self, v: &Value, path: &str, kappa: f64) -> Option<f64> {
        if let Some(x) = v.as_f64() {
            if !x.is_finite() {
                self.err(path, "expected a finite number");
                return None;
            }
            return Some(x);
        }
        if v.is_object() {
            self.known_keys(path, v, &["value", "unit"]);
            let value = self.number(v, path, "value")?;
            let unit = match v.get("unit").and_then(|u| u.as_str()) {
                Some(u) => u,
                None => {
                    self.err(&format!("{path}.unit"), "expected \"kappa\" or \"omega\"");
                    return None;
                }
            };
            return match unit {
                "kappa" => Some(value * kappa),
                "omega" => Some(value),
                other => {
                    self.err(
                        &format!("{path}.unit"),
                        format!("unknown unit {other:?} (use \"kappa\" or \"omega\")"),
                    );
                    None
                }
            };
        }
        self.err(path, "expected a number or {\"value\", \"unit\"}");
        None
    }
}

/// Parse and validate a configuration document, reporting every problem found.
pub fn validate_config(text: &str) -> Result<ScenarioConfig, Vec<ConfigError>> {
    let raw: Value = match serde_json::from_str(text) {
        Ok(v) => v,
        Err(e) => {
            return Err(vec![ConfigError {
                path: "$".into(),
                message: format!("invalid JSON: {e}"),
            }])
        }
    };
    let mut c = Checker { errors: Vec::new() };
    if !raw.is_object() {
        c.err("$", "expected a JSON object");
        return Err(c.errors);
    }

    c.known_keys(
        "$",
        &raw,
        &[
            "scenario",
            "params",
            "grid",
            "time",
            "initial_state",
            "sweep",
            "initial_well",
            "output_dir",
        ],
    );

    let kind = match raw.get("scenario").and_then(|v| v.as_str()) {
        Some(name) => {
            let found = ScenarioKind::all().into_iter().find(|k| k.name() == name);
            if found.is_none() {
                c.err(
                    "$.scenario",
                    format!(
                        "unknown scenario {name:?} (one of: {})",
                        ScenarioKind::all()
                            .iter()
                            .map(|k| k.name())
                            .collect::<Vec<_>>()
                            .join(", ")
                    ),
                );
            }
            found
        }
        None => {
            c.err("$.scenario", "missing required field");
            None
        }
    };

    let output_dir = match raw.get("output_dir").and_then(|v| v.as_str()) {
        Some(s) if !s.is_empty() => Some(PathBuf::from(s)),
        _ => {
            c.err("$.output_dir", "missing required path");
            None
        }
    };

    // parameters
    let eta_from_sweep = matches!(
        kind,
        Some(ScenarioKind::GroundSweep | ScenarioKind::RampUp | ScenarioKind::RampDown)
    );
    let params = match raw.get("params") {
        Some(pv) if pv.is_object() => {
            c.known_keys(
                "$.params",
                pv,
                &[
                    "kappa",
                    "delta_c",
                    "u0",
                    "eta",
                    "delta_x",
                    "g_coll",
                    "n_atoms",
                    "barrier_offset",
                ],
            );
            let kappa = c.number(pv, "$.params", "kappa").unwrap_or(f64::NAN);
            if kappa <= 0.0 {
                c.err("$.params.kappa", "must be positive (units of omega)");
            }
            let delta_c = c.rate(pv, "$.params", "delta_c", kappa);
            let u0 = c.rate(pv, "$.params", "u0", kappa);
            let eta = if eta_from_sweep {
                if pv.get("eta").is_some() {
                    c.err("$.params.eta", "set by the sweep block in this scenario");
                }
                Some(0.0)
            } else {
                let e = c.rate(pv, "$.params", "eta", kappa);
                if let Some(e) = e {
                    if e < 0.0 {
                        c.err("$.params.eta", "must be non-negative");
                    }
                }
                e
            };
            let delta_x = c.number(pv, "$.params", "delta_x");
            if let Some(dx) = delta_x {
                if dx <= 0.0 {
                    c.err("$.params.delta_x", "must be positive (units of a_ho)");
                }
            }
            let n_atoms = c.number(pv, "$.params", "n_atoms");
            if let Some(n) = n_atoms {
                if n <= 0.0 {
                    c.err("$.params.n_atoms", "must be positive");
                }
            }
            let g_coll = c.opt_number(pv, "$.params", "g_coll").unwrap_or(0.0);
            let barrier_offset = c.opt_number(pv, "$.params", "barrier_offset").unwrap_or(0.0);
            match (delta_c, u0, eta, delta_x, n_atoms) {
                (Some(delta_c), Some(u0), Some(eta), Some(delta_x), Some(n_atoms))
                    if kappa.is_finite() =>
                {
                    Some(ModelParams {
                        kappa,
                        delta_c,
                        u0,
                        eta,
                        delta_x,
                        g_coll,
                        n_atoms,
                        barrier_offset,
                    })
                }
                _ => None,
            }
        }
        _ => {
            c.err("$.params", "missing required object");
            None
        }
    };

    // grid (optional, defaults to 1024 points over [-12, 12))
    let (mut grid_points, mut grid_x_max) = (1024usize, 12.0f64);
    if let Some(gv) = raw.get("grid") {
        c.known_keys("$.grid", gv, &["n_points", "x_max"]);
        if let Some(n) = c.number(gv, "$.grid", "n_points") {
            if n.fract() != 0.0 || n < 1.0 {
                c.err("$.grid.n_points", "must be a positive integer");
            } else {
                grid_points = n as usize;
            }
        }
        if let Some(x) = c.number(gv, "$.grid", "x_max") {
            grid_x_max = x;
        }
        if let Err(e) = cavity_dw_core::Grid::new(grid_points, grid_x_max) {
            c.err("$.grid", e.to_string());
        }
    }
    if let Some(p) = &params {
        if p.barrier_offset.abs() >= 0.5 * grid_x_max {
            c.err(
                "$.params.barrier_offset",
                format!("must sit well inside the box (|offset| < {})", 0.5 * grid_x_max),
            );
        }
    }

    // time block
    let needs_time = matches!(
        kind,
        Some(
            ScenarioKind::Dynamics
                | ScenarioKind::RampUp
                | ScenarioKind::RampDown
                | ScenarioKind::TwoModeCr
        )
    );
    let mut time = None;
    match raw.get("time") {
        Some(tv) => {
            if !needs_time {
                c.err("$.time", "not used by this scenario");
            }
            c.known_keys(
                "$.time",
                tv,
                &[
                    "t_final",
                    "dt",
                    "snapshot_every",
                    "record_every",
                    "edge_density_limit",
                ],
            );
            let t_final = c.number(tv, "$.time", "t_final").unwrap_or(0.0);
            if t_final <= 0.0 {
                c.err("$.time.t_final", "must be positive");
            }
            let dt = c.number(tv, "$.time", "dt").unwrap_or(0.0);
            if dt <= 0.0 {
                c.err("$.time.dt", "must be positive");
            }
            let snapshot_every = c
                .opt_number(tv, "$.time", "snapshot_every")
                .unwrap_or(0.0)
                .max(0.0) as usize;
            let record_every = c
                .opt_number(tv, "$.time", "record_every")
                .unwrap_or(1.0)
                .max(1.0) as usize;
            let edge_density_limit = c
                .opt_number(tv, "$.time", "edge_density_limit")
                .unwrap_or(EDGE_DENSITY_LIMIT);
            if edge_density_limit <= 0.0 {
                c.err("$.time.edge_density_limit", "must be positive");
            }
            time = Some(TimeCfg {
                t_final,
                dt,
                snapshot_every,
                record_every,
                edge_density_limit,
            });
        }
        None if needs_time => c.err("$.time", "missing required object"),
        None => {}
    }

    // initial state (dynamics only)
    let mut initial_state = None;
    match raw.get("initial_state") {
        Some(iv) => {
            if !matches!(kind, Some(ScenarioKind::Dynamics)) {
                c.err("$.initial_state", "only the dynamics scenario takes one");
            }
            c.known_keys("$.initial_state", iv, &["type", "center", "width"]);
            match iv.get("type").and_then(|v| v.as_str()) {
                Some("ground") => initial_state = Some(InitialStateCfg::Ground),
                Some("right_mode") => initial_state = Some(InitialStateCfg::RightMode),
                Some("gaussian") => {
                    let center = c.number(iv, "$.initial_state", "center").unwrap_or(0.0);
                    let width = c.number(iv, "$.initial_state", "width").unwrap_or(0.0);
                    if width <= 0.0 {
                        c.err("$.initial_state.width", "must be positive");
                    }
                    initial_state = Some(InitialStateCfg::Gaussian { center, width });
                }
                Some(other) => c.err(
                    "$.initial_state.type",
                    format!("unknown type {other:?} (ground, right_mode, gaussian)"),
                ),
                None => c.err("$.initial_state.type", "missing required field"),
            }
            if !matches!(initial_state, Some(InitialStateCfg::Gaussian { .. })) {
                for key in ["center", "width"] {
                    if iv.get(key).is_some()
                        && !matches!(initial_state, Some(InitialStateCfg::Gaussian { .. }))
                    {
                        c.err(
                            &format!("$.initial_state.{key}"),
                            "only valid for type \"gaussian\"",
                        );
                    }
                }
            }
        }
        None if matches!(kind, Some(ScenarioKind::Dynamics)) => {
            c.err("$.initial_state", "missing required object");
        }
        None => {}
    }

    // sweep block (ground_sweep and ramps)
    let needs_sweep = matches!(
        kind,
        Some(ScenarioKind::GroundSweep | ScenarioKind::RampUp | ScenarioKind::RampDown)
    );
    let mut sweep = None;
    match raw.get("sweep") {
        Some(sv) => {
            if !needs_sweep {
                c.err("$.sweep", "not used by this scenario");
            }
            c.known_keys("$.sweep", sv, &["eta_start", "eta_end", "n_points", "spacing"]);
            let kappa = params.as_ref().map(|p| p.kappa).unwrap_or(1.0);
            let eta_start = c.rate(sv, "$.sweep", "eta_start", kappa).unwrap_or(0.0);
            let eta_end = c.rate(sv, "$.sweep", "eta_end", kappa).unwrap_or(0.0);
            if eta_start < 0.0 {
                c.err("$.sweep.eta_start", "must be non-negative");
            }
            if eta_end < 0.0 {
                c.err("$.sweep.eta_end", "must be non-negative");
            }
            let mut n_points = None;
            if matches!(kind, Some(ScenarioKind::GroundSweep)) {
                match c.number(sv, "$.sweep", "n_points") {
                    Some(n) if n.fract() == 0.0 && n >= 2.0 => n_points = Some(n as usize),
                    Some(_) => c.err("$.sweep.n_points", "must be an integer >= 2"),
                    None => {}
                }
                if eta_end <= eta_start {
                    c.err("$.sweep.eta_end", "must exceed eta_start");
                }
                if eta_start <= 0.0 {
                    c.err("$.sweep.eta_start", "must be positive for a sweep");
                }
            } else if sv.get("n_points").is_some() {
                c.err(
                    "$.sweep.n_points",
                    "ramps take their duration from time.t_final",
                );
            }
            let spacing = match sv.get("spacing").and_then(|v| v.as_str()) {
                None => Spacing::Log,
                Some("log") => Spacing::Log,
                Some("linear") => Spacing::Linear,
                Some(other) => {
                    c.err(
                        "$.sweep.spacing",
                        format!("unknown spacing {other:?} (log, linear)"),
                    );
                    Spacing::Log
                }
            };
            sweep = Some(SweepCfg {
                eta_start,
                eta_end,
                n_points,
                spacing,
            });
        }
        None if needs_sweep => c.err("$.sweep", "missing required object"),
        None => {}
    }

    // initial well (two_mode_cr only)
    let mut initial_well = InitialWell::Right;
    if let Some(v) = raw.get("initial_well") {
        if !matches!(kind, Some(ScenarioKind::TwoModeCr)) {
            c.err("$.initial_well", "only the two_mode_cr scenario takes one");
        }
        match v.as_str() {
            Some("right") => initial_well = InitialWell::Right,
            Some("left") => initial_well = InitialWell::Left,
            _ => c.err("$.initial_well", "expected \"right\" or \"left\""),
        }
    }

    if let (Some(kind), Some(params), Some(output_dir)) = (kind, params.clone(), output_dir) {
        if c.errors.is_empty() {
            if let Err(e) = params.validate() {
                c.err("$.params", e.to_string());
            } else {
                return Ok(ScenarioConfig {
                    kind,
                    params,
                    grid_points,
                    grid_x_max,
                    time,
                    initial_state,
                    sweep,
                    initial_well,
                    output_dir,
                    raw,
                });
            }
        }
    }
    Err(c.errors)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_dynamics() -> serde_json::Value {
        serde_json::json!({
            "scenario": "dynamics",
            "params": {
                "kappa": 500.0,
                "delta_c": {"value": 1.0, "unit": "kappa"},
                "u0": {"value": 0.005, "unit": "kappa"},
                "eta": {"value": 25.0, "unit": "kappa"},
                "delta_x": 0.5,
                "n_atoms": 10000.0
            },
            "time": {"t_final": 1.0, "dt": 5e-4},
            "initial_state": {"type": "right_mode"},
            "output_dir": "out"
        })
    }

    #[test]
    fn accepts_minimal_dynamics_and_converts_kappa_rates() {
        let cfg = validate_config(&minimal_dynamics().to_string()).unwrap();
        assert_eq!(cfg.kind, ScenarioKind::Dynamics);
        assert_eq!(cfg.params.eta, 25.0 * 500.0);
        assert_eq!(cfg.params.u0, 2.5);
        assert_eq!(cfg.grid_points, 1024);
    }

    #[test]
    fn missing_scenario_is_a_single_error_naming_the_field() {
        let mut v = minimal_dynamics();
        v.as_object_mut().unwrap().remove("scenario");
        let errs = validate_config(&v.to_string()).unwrap_err();
        assert!(errs.iter().any(|e| e.path == "$.scenario"));
    }

    #[test]
    fn negative_eta_is_a_range_error() {
        let mut v = minimal_dynamics();
        v["params"]["eta"] = serde_json::json!(-3.0);
        let errs = validate_config(&v.to_string()).unwrap_err();
        assert!(errs
            .iter()
            .any(|e| e.path == "$.params.eta" && e.message.contains("non-negative")));
    }

    #[test]
    fn unknown_keys_are_rejected_with_paths() {
        let mut v = minimal_dynamics();
        v["params"]["ettta"] = serde_json::json!(3.0);
        v["tims"] = serde_json::json!({});
        let errs = validate_config(&v.to_string()).unwrap_err();
        assert!(errs.iter().any(|e| e.path == "$.params.ettta"));
        assert!(errs.iter().any(|e| e.path == "$.tims"));
    }

    #[test]
    fn errors_aggregate_rather_than_stop_at_the_first() {
        let v = serde_json::json!({
            "scenario": "dynamics",
            "params": {"kappa": -1.0, "delta_x": -2.0, "n_atoms": 0.0,
                        "delta_c": 1.0, "u0": 1.0, "eta": 1.0},
            "output_dir": "out"
        });
        let errs = validate_config(&v.to_string()).unwrap_err();
        assert!(errs.len() >= 4, "{errs:?}");
    }

    #[test]
    fn barrier_offset_must_stay_inside_the_box() {
        let mut v = minimal_dynamics();
        v["params"]["barrier_offset"] = serde_json::json!(7.0);
        let errs = validate_config(&v.to_string()).unwrap_err();
        assert!(errs.iter().any(|e| e.path == "$.params.barrier_offset"));
    }

    #[test]
    fn sweep_scenarios_reject_params_eta() {
        let v = serde_json::json!({
            "scenario": "ground_sweep",
            "params": {"kappa": 500.0, "delta_c": 500.0, "u0": 5.0, "eta": 1.0,
                        "delta_x": 0.5, "n_atoms": 1.0e4},
            "sweep": {"eta_start": 250.0, "eta_end": 20000.0, "n_points": 40},
            "output_dir": "out"
        });
        let errs = validate_config(&v.to_string()).unwrap_err();
        assert!(errs.iter().any(|e| e.path == "$.params.eta"));
    }

    #[test]
    fn sweep_values_cover_the_requested_range() {
        let sweep = SweepCfg {
            eta_start: 10.0,
            eta_end: 1000.0,
            n_points: Some(5),
            spacing: Spacing::Log,
        };
        let v = sweep.eta_values();
        assert_eq!(v.len(), 5);
        assert!((v[0] - 10.0).abs() < 1e-12);
        assert!((v[4] - 1000.0).abs() < 1e-9);
        assert!((v[2] - 100.0).abs() < 1e-9);
    }
}
