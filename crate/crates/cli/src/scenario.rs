//! Scenario execution: deterministic CSV emission plus a manifest.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use serde_json::json;

use cavity_dw_core::gpe::{
    evolve, ground_state_imaginary_time, localized_modes, EtaSchedule, EvolveOpts,
    GroundStateOpts, PropagationResult,
};
use cavity_dw_core::two_mode::{
    self, collapse_revival_inversion, revival_time, TwoModeModel,
};
use cavity_dw_core::variational::{self, StartGrid, SweepOpts};
use cavity_dw_core::{Grid, OrderParameter};

use crate::config::{InitialStateCfg, ScenarioConfig, ScenarioKind, TimeCfg};
use crate::manifest::Manifest;

#[derive(Debug)]
pub enum RunError {
    Io(std::io::Error),
    Core(cavity_dw_core::Error),
    Numerical(String),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Io(e) => write!(f, "i/o error: {e}"),
            Self::Core(e) => write!(f, "{e}"),
            Self::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e)
    }
}

impl From<cavity_dw_core::Error> for RunError {
    fn from(e: cavity_dw_core::Error) -> Self {
        Self::Core(e)
    }
}

/// 17 significant digits, '.' decimal separator: round-trippable and stable.
fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

struct CsvWriter {
    buf: String,
}

impl CsvWriter {
    fn new(header: &[&str]) -> Self {
        let mut buf = String::new();
        buf.push_str(&header.join(","));
        buf.push('\n');
        Self { buf }
    }

    fn row(&mut self, values: &[f64]) {
        for (i, v) in values.iter().enumerate() {
            if i > 0 {
                self.buf.push(',');
            }
            let _ = write!(self.buf, "{}", fmt_f64(*v));
        }
        self.buf.push('\n');
    }

    fn row_with_int(&mut self, int_prefix: &[(usize, u64)], values: &[f64]) {
        // columns interleaved: ints at given positions, floats elsewhere
        let total = int_prefix.len() + values.len();
        let mut vi = 0;
        for col in 0..total {
            if col > 0 {
                self.buf.push(',');
            }
            if let Some((_, n)) = int_prefix.iter().find(|(pos, _)| *pos == col) {
                let _ = write!(self.buf, "{n}");
            } else {
                let _ = write!(self.buf, "{}", fmt_f64(values[vi]));
                vi += 1;
            }
        }
        self.buf.push('\n');
    }

    fn bytes(self) -> Vec<u8> {
        self.buf.into_bytes()
    }
}

fn write_output(
    manifest: &mut Manifest,
    dir: &Path,
    name: &str,
    bytes: Vec<u8>,
) -> Result<(), RunError> {
    let path = dir.join(name);
    manifest.record(&path, &bytes);
    std::fs::write(&path, bytes)?;
    Ok(())
}

fn propagation_csvs(
    manifest: &mut Manifest,
    dir: &Path,
    res: &PropagationResult,
    with_eta: bool,
    trace_name: &str,
) -> Result<(), RunError> {
    let header: &[&str] = if with_eta {
        &["t", "eta", "Z", "n_ss", "E"]
    } else {
        &["t", "Z", "n_ss", "E"]
    };
    let mut csv = CsvWriter::new(header);
    for i in 0..res.times.len() {
        if with_eta {
            csv.row(&[
                res.times[i],
                res.eta[i],
                res.inversion[i],
                res.photon_number[i],
                res.energy[i],
            ]);
        } else {
            csv.row(&[
                res.times[i],
                res.inversion[i],
                res.photon_number[i],
                res.energy[i],
            ]);
        }
    }
    write_output(manifest, dir, trace_name, csv.bytes())?;

    for (k, (t, psi)) in res.snapshots.iter().enumerate() {
        let mut csv = CsvWriter::new(&["x", "abs_psi"]);
        let grid = psi.grid();
        for (v, &x) in psi.values().iter().zip(grid.x()) {
            csv.row(&[x, v.norm()]);
        }
        let name = format!("snapshot_{k:04}.csv");
        // snapshot time recorded in the manifest through the file itself
        let mut bytes = format!("# t = {}\n", fmt_f64(*t)).into_bytes();
        bytes.extend(csv.bytes());
        write_output(manifest, dir, &name, bytes)?;
    }
    Ok(())
}

fn build_initial_state(
    cfg: &ScenarioConfig,
    grid: &Arc<Grid>,
) -> Result<OrderParameter, RunError> {
    match cfg.initial_state.as_ref().expect("validated") {
        InitialStateCfg::Ground => {
            let gs =
                ground_state_imaginary_time(&cfg.params, grid, None, &GroundStateOpts::default())?;
            if !gs.converged {
                return Err(RunError::Numerical(
                    "ground-state relaxation did not converge".into(),
                ));
            }
            Ok(gs.psi)
        }
        InitialStateCfg::RightMode => {
            let (_, right) = localized_modes(&cfg.params, grid, &GroundStateOpts::default())?;
            Ok(right)
        }
        InitialStateCfg::Gaussian { center, width } => {
            Ok(OrderParameter::gaussian(Arc::clone(grid), *center, *width)?)
        }
    }
}

fn evolve_opts(time: &TimeCfg, schedule: Option<EtaSchedule>) -> EvolveOpts {
    EvolveOpts {
        t_final: time.t_final,
        dt: time.dt,
        schedule,
        snapshot_every: time.snapshot_every,
        record_every: time.record_every,
        edge_density_limit: time.edge_density_limit,
    }
}

/// Execute a validated configuration; emits data files plus `manifest.json`
/// into the output directory. A mid-run numerical failure still emits the
/// partial outputs and is reported through the manifest status and `Err`.
pub fn run_scenario(cfg: &ScenarioConfig, starts: &StartGrid) -> Result<Manifest, RunError> {
    let started = Instant::now();
    let dir = cfg.output_dir.clone();
    std::fs::create_dir_all(&dir)?;
    let mut manifest = Manifest::new(cfg.kind.name(), cfg.raw.clone());
    let grid = Arc::new(Grid::new(cfg.grid_points, cfg.grid_x_max)?);

    let mut failure: Option<String> = None;
    match cfg.kind {
        ScenarioKind::GroundSweep => {
            let sweep_cfg = cfg.sweep.as_ref().expect("validated");
            let etas = sweep_cfg.eta_values();
            let opts = SweepOpts {
                starts: starts.clone(),
                ground_state: GroundStateOpts::default(),
            };
            let points = variational::sweep_pump(&cfg.params, &etas, &grid, &opts)?;
            let mut csv = CsvWriter::new(&[
                "eta",
                "branch_id",
                "sigma",
                "x0",
                "E",
                "n_ss_ansatz",
                "n_ss_gpe",
            ]);
            for pt in &points {
                for (id, b) in pt.branches.iter().enumerate() {
                    csv.row_with_int(
                        &[(1, id as u64)],
                        &[pt.eta, b.sigma, b.x0, b.energy, b.n_ss, pt.gpe.n_ss],
                    );
                }
            }
            write_output(&mut manifest, &dir, "sweep.csv", csv.bytes())?;
        }
        ScenarioKind::Dynamics => {
            let time = cfg.time.as_ref().expect("validated");
            let psi0 = build_initial_state(cfg, &grid)?;
            let res = evolve(&psi0, &cfg.params, &evolve_opts(time, None))?;
            failure = res.failure.clone();
            propagation_csvs(&mut manifest, &dir, &res, false, "dynamics.csv")?;
        }
        ScenarioKind::RampUp | ScenarioKind::RampDown => {
            let time = cfg.time.as_ref().expect("validated");
            let sweep_cfg = cfg.sweep.as_ref().expect("validated");
            let p0 = cfg.params.with_eta(sweep_cfg.eta_start);
            let gs = ground_state_imaginary_time(&p0, &grid, None, &GroundStateOpts::default())?;
            if !gs.converged {
                return Err(RunError::Numerical(
                    "ground-state preparation did not converge".into(),
                ));
            }
            let schedule = EtaSchedule::linear(
                0.0,
                time.t_final,
                sweep_cfg.eta_start,
                sweep_cfg.eta_end,
            );
            let res = evolve(&gs.psi, &p0, &evolve_opts(time, Some(schedule)))?;
            failure = res.failure.clone();
            propagation_csvs(&mut manifest, &dir, &res, true, "ramp.csv")?;
        }
        ScenarioKind::TwoModeCr => {
            let time = cfg.time.as_ref().expect("validated");
            let p = &cfg.params;
            let outcome = two_mode::self_consistent_model(p, &two_mode::default_photon_guesses(p))?;
            let model: TwoModeModel = outcome
                .models
                .into_iter()
                .min_by(|a, b| {
                    a.energy_per_particle()
                        .partial_cmp(&b.energy_per_particle())
                        .unwrap()
                })
                .ok_or_else(|| {
                    RunError::Numerical(format!(
                        "no self-consistent double-well background ({})",
                        outcome
                            .failures
                            .iter()
                            .map(|f| format!("guess {}: {}", f.guess, f.reason))
                            .collect::<Vec<_>>()
                            .join("; ")
                    ))
                })?;
            let n_bar = p.n_atoms;
            let n_max = (n_bar + 12.0 * n_bar.sqrt()).ceil() as usize;
            let dt_sample = time.dt * time.record_every as f64;
            let mut times = Vec::new();
            let mut t = 0.0;
            while t <= time.t_final {
                times.push(t);
                t += dt_sample;
            }
            let z = collapse_revival_inversion(n_bar, &times, &model, n_max, cfg.initial_well)?;
            let mut csv = CsvWriter::new(&["t", "Z_MB"]);
            for (t, z) in times.iter().zip(&z) {
                csv.row(&[*t, *z]);
            }
            write_output(&mut manifest, &dir, "inversion.csv", csv.bytes())?;

            let tunneling: Vec<serde_json::Value> = (0..=n_max)
                .map(|n| json!([n, model.tunneling_t(n as f64)]))
                .collect();
            let sidecar = json!({
                "n_bar": n_bar,
                "sigma": model.coeffs.sigma,
                "x0": model.coeffs.x0,
                "n_ss": model.coeffs.n_ss,
                "revival_time_estimate": revival_time(n_bar, &model),
                "tunneling": tunneling,
            });
            let bytes = serde_json::to_string_pretty(&sidecar)
                .expect("sidecar serializes")
                .into_bytes();
            write_output(&mut manifest, &dir, "two_mode.json", bytes)?;
        }
    }

    if let Some(reason) = &failure {
        manifest.status = format!("failed: {reason}");
    }
    manifest.wall_time_s = started.elapsed().as_secs_f64();
    std::fs::write(dir.join("manifest.json"), manifest.to_json())?;
    if let Some(reason) = failure {
        return Err(RunError::Numerical(reason));
    }
    Ok(manifest)
}

/// Output directory override: a single config maps directly onto `--out`;
/// several configs get per-stem subdirectories.
pub fn apply_out_override(configs: &mut [(PathBuf, ScenarioConfig)], out: &Path) {
    if configs.len() == 1 {
        configs[0].1.output_dir = out.to_path_buf();
        return;
    }
    for (path, cfg) in configs.iter_mut() {
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "run".to_string());
        cfg.output_dir = out.join(stem);
    }
}
