//! Split-step Fourier propagation of the Gross-Pitaevskii equation with the
//! adiabatically eliminated cavity field, in real and imaginary time.
//!
//! One step is a Strang splitting T/2 - V - T/2. The photon number entering
//! V is recomputed from the density after the first half-kinetic stage, which
//! samples the field at the effective midpoint of the step and preserves the
//! second-order accuracy of the splitting.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::cavity;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::units::ModelParams;
use crate::wavefunction::OrderParameter;

/// Default density above which the state is considered to have reached the
/// box edge. Runs in radiative regimes (sudden field spikes ejecting faint
/// high-velocity ripples) may raise the guard explicitly.
pub const EDGE_DENSITY_LIMIT: f64 = 1e-12;

/// How the cavity field is treated during propagation.
#[derive(Debug, Clone, Copy)]
pub enum FieldMode {
    /// n_ss recomputed from the instantaneous density every step.
    SelfConsistent,
    /// n_ss held at the given value.
    Frozen(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeMode {
    Real,
    Imaginary,
}

/// Pump amplitude as a function of time, piecewise linear between breakpoints
/// and clamped outside them.
#[derive(Debug, Clone)]
pub enum EtaSchedule {
    Constant(f64),
    PiecewiseLinear(Vec<(f64, f64)>),
}

impl EtaSchedule {
    pub fn linear(t0: f64, t1: f64, eta0: f64, eta1: f64) -> Self {
        Self::PiecewiseLinear(vec![(t0, eta0), (t1, eta1)])
    }

    pub fn at(&self, t: f64) -> f64 {
        match self {
            Self::Constant(e) => *e,
            Self::PiecewiseLinear(pts) => {
                if pts.is_empty() {
                    return 0.0;
                }
                if t <= pts[0].0 {
                    return pts[0].1;
                }
                for w in pts.windows(2) {
                    let (t0, e0) = w[0];
                    let (t1, e1) = w[1];
                    if t <= t1 {
                        if t1 == t0 {
                            return e1;
                        }
                        return e0 + (e1 - e0) * (t - t0) / (t1 - t0);
                    }
                }
                pts[pts.len() - 1].1
            }
        }
    }
}

pub(crate) struct SpectralOps {
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    inv_n: f64,
}

impl SpectralOps {
    pub(crate) fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(n);
        let ifft = planner.plan_fft_inverse(n);
        let scratch_len = fft
            .get_inplace_scratch_len()
            .max(ifft.get_inplace_scratch_len());
        Self {
            fft,
            ifft,
            scratch: vec![Complex64::default(); scratch_len],
            inv_n: 1.0 / n as f64,
        }
    }

    pub(crate) fn forward(&mut self, buf: &mut [Complex64]) {
        self.fft.process_with_scratch(buf, &mut self.scratch);
    }

    /// Unitary inverse (includes the 1/n factor).
    pub(crate) fn inverse(&mut self, buf: &mut [Complex64]) {
        self.ifft.process_with_scratch(buf, &mut self.scratch);
        for v in buf.iter_mut() {
            *v *= self.inv_n;
        }
    }

    /// d/dx by spectral differentiation.
    pub(crate) fn derivative(&mut self, grid: &Grid, values: &[Complex64]) -> Vec<Complex64> {
        let mut buf = values.to_vec();
        self.forward(&mut buf);
        for (v, &k) in buf.iter_mut().zip(grid.wavenumbers()) {
            *v *= Complex64::new(0.0, k);
        }
        self.inverse(&mut buf);
        buf
    }
}

/// Reusable propagation workspace for a fixed (grid, dt, time mode).
pub struct Propagation {
    grid: Arc<Grid>,
    params: ModelParams,
    dt: f64,
    mode: TimeMode,
    ops: SpectralOps,
    kin_half: Vec<Complex64>,
    mode_profile: Vec<f64>,
    half_x_sq: Vec<f64>,
    edge_limit: f64,
}

impl Propagation {
    pub fn new(grid: Arc<Grid>, params: &ModelParams, dt: f64, mode: TimeMode) -> Result<Self> {
        params.validate()?;
        if !(dt > 0.0) {
            return Err(Error::InvalidParams(format!("dt = {dt} <= 0")));
        }
        let ops = SpectralOps::new(grid.len());
        let kin_half = grid
            .wavenumbers()
            .iter()
            .map(|&k| {
                let theta = 0.25 * dt * k * k; // (dt/2) * k^2/2
                match mode {
                    TimeMode::Real => Complex64::from_polar(1.0, -theta),
                    TimeMode::Imaginary => Complex64::new((-theta).exp(), 0.0),
                }
            })
            .collect();
        let mode_profile = cavity::mode_profile(&grid, params);
        let half_x_sq = grid.x().iter().map(|&x| 0.5 * x * x).collect();
        Ok(Self {
            grid,
            params: params.clone(),
            dt,
            mode,
            ops,
            kin_half,
            mode_profile,
            half_x_sq,
            edge_limit: EDGE_DENSITY_LIMIT,
        })
    }

    /// Raise the edge-density guard for runs that shed faint radiation.
    pub fn set_edge_density_limit(&mut self, limit: f64) {
        self.edge_limit = limit;
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    /// Rebuild the kinetic phase table for a new step size.
    pub fn set_dt(&mut self, dt: f64) -> Result<()> {
        if !(dt > 0.0) {
            return Err(Error::InvalidParams(format!("dt = {dt} <= 0")));
        }
        self.dt = dt;
        for (f, &k) in self.kin_half.iter_mut().zip(self.grid.wavenumbers()) {
            let theta = 0.25 * dt * k * k;
            *f = match self.mode {
                TimeMode::Real => Complex64::from_polar(1.0, -theta),
                TimeMode::Imaginary => Complex64::new((-theta).exp(), 0.0),
            };
        }
        Ok(())
    }

    fn half_kinetic(&mut self, values: &mut [Complex64]) {
        self.ops.forward(values);
        for (v, f) in values.iter_mut().zip(&self.kin_half) {
            *v *= f;
        }
        self.ops.inverse(values);
    }

    /// Advance one step. Returns the photon number used for the potential.
    pub fn step(
        &mut self,
        psi: &mut OrderParameter,
        eta: f64,
        field: FieldMode,
    ) -> Result<f64> {
        let dx = self.grid.spacing();
        let g_n = self.params.g_coll * self.params.n_atoms;

        self.half_kinetic(psi.values_mut());

        // Field sample from the (normalized) midpoint density.
        let (mut overlap, mut norm_sq) = (0.0, 0.0);
        for (v, u) in psi.values().iter().zip(&self.mode_profile) {
            let rho = v.norm_sqr();
            overlap += rho * u;
            norm_sq += rho;
        }
        overlap *= dx;
        norm_sq *= dx;
        if !norm_sq.is_finite() || norm_sq <= 0.0 {
            return Err(Error::Numerical("norm lost during propagation".into()));
        }
        let n_ss = match field {
            FieldMode::Frozen(n) => n,
            FieldMode::SelfConsistent => {
                let y = self.params.u0 * overlap / norm_sq;
                let detuning = self.params.delta_c - self.params.n_atoms * y;
                eta * eta / (self.params.kappa * self.params.kappa + detuning * detuning)
            }
        };

        let density_scale = 1.0 / norm_sq;
        {
            let values = psi.values_mut();
            let pieces = values
                .iter_mut()
                .zip(self.half_x_sq.iter().zip(&self.mode_profile));
            match self.mode {
                TimeMode::Real => {
                    for (value, (&hx, &u)) in pieces {
                        let v = hx
                            + n_ss * self.params.u0 * u
                            + g_n * value.norm_sqr() * density_scale;
                        let (s, c) = (self.dt * v).sin_cos();
                        *value *= Complex64::new(c, -s);
                    }
                }
                TimeMode::Imaginary => {
                    for (value, (&hx, &u)) in pieces {
                        let v = hx
                            + n_ss * self.params.u0 * u
                            + g_n * value.norm_sqr() * density_scale;
                        *value *= (-self.dt * v).exp();
                    }
                }
            }
        }

        self.half_kinetic(psi.values_mut());

        if self.mode == TimeMode::Imaginary {
            let n = psi.norm();
            if !(n > 1e-150) || !n.is_finite() {
                return Err(Error::Numerical("imaginary-time norm collapsed".into()));
            }
            let inv = 1.0 / n;
            for v in psi.values_mut() {
                *v *= inv;
            }
        }

        let edge = psi.values()[0].norm_sqr();
        if !edge.is_finite() {
            return Err(Error::Numerical("non-finite amplitude encountered".into()));
        }
        if edge > self.edge_limit {
            return Err(Error::Numerical(format!(
                "density {edge:.3e} at the domain edge; widen the grid"
            )));
        }
        Ok(n_ss)
    }

    fn hamiltonian_action(&mut self, psi: &OrderParameter, n_ss: f64) -> Vec<Complex64> {
        let g_n = self.params.g_coll * self.params.n_atoms;
        let mut buf = psi.values().to_vec();
        self.ops.forward(&mut buf);
        for (v, &k) in buf.iter_mut().zip(self.grid.wavenumbers()) {
            *v *= 0.5 * k * k;
        }
        self.ops.inverse(&mut buf);
        let pieces = psi
            .values()
            .iter()
            .zip(self.half_x_sq.iter().zip(&self.mode_profile));
        for (b, (value, (&hx, &u))) in buf.iter_mut().zip(pieces) {
            let v = hx + n_ss * self.params.u0 * u + g_n * value.norm_sqr();
            *b += v * value;
        }
        buf
    }

    /// Stationarity defect ||(H - mu) psi|| with the field held at n_ss.
    pub fn residual(&mut self, psi: &OrderParameter, n_ss: f64) -> f64 {
        let h_psi = self.hamiltonian_action(psi, n_ss);
        let dx = self.grid.spacing();
        let mu: f64 = psi
            .values()
            .iter()
            .zip(&h_psi)
            .map(|(p, h)| (p.conj() * h).re)
            .sum::<f64>()
            * dx;
        let r: f64 = psi
            .values()
            .iter()
            .zip(&h_psi)
            .map(|(p, h)| (h - mu * p).norm_sqr())
            .sum::<f64>()
            * dx;
        r.sqrt()
    }
}

fn energy_with(ops: &mut SpectralOps, psi: &OrderParameter, p: &ModelParams, eta: f64) -> f64 {
    let grid = psi.grid();
    let dpsi = ops.derivative(grid, psi.values());
    let kinetic = 0.5 * grid.integrate(dpsi.iter().map(|v| v.norm_sqr()));
    let mut trap = 0.0;
    let mut quartic = 0.0;
    for (v, &x) in psi.values().iter().zip(grid.x()) {
        let rho = v.norm_sqr();
        trap += 0.5 * x * x * rho;
        quartic += rho * rho;
    }
    trap *= grid.spacing();
    quartic *= grid.spacing();
    let y = cavity::overlap_y_unchecked(psi, p);
    let field = -(eta * eta / (p.kappa * p.n_atoms))
        * ((p.delta_c - p.n_atoms * y) / p.kappa).atan();
    kinetic + trap + 0.5 * p.g_coll * p.n_atoms * quartic + field
}

/// Energy per particle whose stationarity condition is the self-consistent
/// equation of motion:
/// E/N = int [ |psi'|^2/2 + x^2 |psi|^2 / 2 + gN |psi|^4 / 2 ] dx
///       - (eta^2 / kappa N) arctan((Delta_c - N Y)/kappa).
pub fn energy_functional(psi: &OrderParameter, p: &ModelParams) -> f64 {
    let mut ops = SpectralOps::new(psi.grid().len());
    energy_with(&mut ops, psi, p, p.eta)
}

/// Population imbalance Z = 1 - 2 int_{x < x_b} |psi|^2 dx, with the split at
/// the barrier center. Uses the trapezoid rule with a linear partial cell.
pub fn inversion(psi: &OrderParameter, p: &ModelParams) -> f64 {
    let grid = psi.grid();
    let rho = psi.density();
    let dx = grid.spacing();
    let t = (p.barrier_offset + grid.x_max()) / dx;
    let jb = (t.floor() as usize).min(grid.len() - 2);
    let frac = t - jb as f64;
    let mut acc = 0.5 * (rho[0] + rho[jb]);
    for r in &rho[1..jb] {
        acc += r;
    }
    acc *= dx;
    if frac > 0.0 {
        let rho_b = rho[jb] + frac * (rho[jb + 1] - rho[jb]);
        acc += frac * dx * 0.5 * (rho[jb] + rho_b);
    }
    1.0 - 2.0 * acc
}

/// Options for imaginary-time relaxation.
#[derive(Debug, Clone)]
pub struct GroundStateOpts {
    pub dtau: f64,
    /// Converged when |dE| per unit imaginary time < tol and the stationarity
    /// residual is below sqrt(tol).
    pub tol: f64,
    pub max_iters: usize,
    pub field: FieldMode,
    /// Project onto odd parity every step (for the antisymmetric mode).
    pub odd_parity: bool,
}

impl Default for GroundStateOpts {
    fn default() -> Self {
        Self {
            dtau: 1e-3,
            tol: 1e-10,
            max_iters: 400_000,
            field: FieldMode::SelfConsistent,
            odd_parity: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GroundStateResult {
    pub psi: OrderParameter,
    pub n_ss: f64,
    pub energy: f64,
    /// ||(H - mu) psi|| at the converged field.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn odd_project(psi: &mut OrderParameter) -> Result<()> {
    let mirrored = psi.mirrored();
    for (v, m) in psi.values_mut().iter_mut().zip(mirrored.values()) {
        *v = 0.5 * (*v - m);
    }
    let n = psi.norm();
    if !(n > 1e-12) {
        return Err(Error::Numerical(
            "odd-parity projection annihilated the state".into(),
        ));
    }
    let inv = 1.0 / n;
    for v in psi.values_mut() {
        *v *= inv;
    }
    Ok(())
}

/// Relax to a stationary state by imaginary-time propagation, updating the
/// cavity photon number along the way (unless frozen). Non-convergence within
/// the iteration cap is reported through the `converged` flag, with the last
/// state attached.
pub fn ground_state_imaginary_time(
    p: &ModelParams,
    grid: &Arc<Grid>,
    init: Option<OrderParameter>,
    opts: &GroundStateOpts,
) -> Result<GroundStateResult> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParams(format!("tol = {} <= 0", opts.tol)));
    }
    let mut psi = match init {
        Some(psi0) => psi0.normalize()?,
        None => OrderParameter::gaussian(Arc::clone(grid), p.barrier_offset, 1.0)?,
    };
    if opts.odd_parity {
        odd_project(&mut psi)?;
    }
    let mut prop = Propagation::new(Arc::clone(grid), p, opts.dtau, TimeMode::Imaginary)?;

    // The split-step fixed point carries an O(dtau^2) bias, so once the energy
    // stalls the step is halved until the stationarity residual is met.
    const CHECK_EVERY: usize = 10;
    let dtau_min = opts.dtau / 1024.0;
    let mut dtau = opts.dtau;
    let mut e_prev = energy_with(&mut prop.ops, &psi, p, p.eta);
    let mut n_ss = 0.0;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iters {
        n_ss = prop.step(&mut psi, p.eta, opts.field)?;
        if opts.odd_parity {
            odd_project(&mut psi)?;
        }
        iterations += 1;
        if iterations % CHECK_EVERY == 0 {
            let e = energy_with(&mut prop.ops, &psi, p, p.eta);
            let rate = (e - e_prev).abs() / (CHECK_EVERY as f64 * dtau);
            e_prev = e;
            if rate < opts.tol {
                if prop.residual(&psi, n_ss) < opts.tol.sqrt() {
                    converged = true;
                    break;
                }
                if dtau <= dtau_min {
                    break;
                }
                dtau *= 0.5;
                prop.set_dt(dtau)?;
            }
        }
    }
    let energy = energy_with(&mut prop.ops, &psi, p, p.eta);
    let residual = prop.residual(&psi, n_ss);
    Ok(GroundStateResult {
        psi,
        n_ss,
        energy,
        residual,
        iterations,
        converged,
    })
}

/// Lowest symmetric and antisymmetric stationary states combined into
/// orthonormal left- and right-localized modes:
/// psi_L = (psi_sym - psi_asym)/sqrt(2), psi_R = (psi_sym + psi_asym)/sqrt(2).
pub fn localized_modes(
    p: &ModelParams,
    grid: &Arc<Grid>,
    opts: &GroundStateOpts,
) -> Result<(OrderParameter, OrderParameter)> {
    if p.barrier_offset != 0.0 {
        return Err(Error::InvalidParams(
            "parity-based mode construction needs a centered barrier".into(),
        ));
    }
    let sym = ground_state_imaginary_time(p, grid, None, opts)?;
    if !sym.converged {
        return Err(Error::NonConvergence("symmetric mode".into()));
    }
    let mut sym = sym.psi;
    let center = sym.values()[grid.center_index()];
    if center.re < 0.0 {
        for v in sym.values_mut() {
            *v = -*v;
        }
    }

    let seed = OrderParameter::from_fn(Arc::clone(grid), |x| {
        Complex64::new(x * (-x * x / 2.0).exp(), 0.0)
    })
    .normalize()?;
    let asym_opts = GroundStateOpts {
        odd_parity: true,
        ..opts.clone()
    };
    let asym = ground_state_imaginary_time(p, grid, Some(seed), &asym_opts)?;
    if !asym.converged {
        return Err(Error::NonConvergence("antisymmetric mode".into()));
    }
    let mut asym = asym.psi;
    let right_mass: f64 = asym
        .values()
        .iter()
        .zip(grid.x())
        .filter(|(_, &x)| x > 0.0)
        .map(|(v, _)| v.re)
        .sum();
    if right_mass < 0.0 {
        for v in asym.values_mut() {
            *v = -*v;
        }
    }

    let inv_sqrt2 = 0.5f64.sqrt();
    let left = OrderParameter::from_values(
        Arc::clone(grid),
        sym.values()
            .iter()
            .zip(asym.values())
            .map(|(s, a)| (s - a) * inv_sqrt2)
            .collect(),
    )?;
    let right = OrderParameter::from_values(
        Arc::clone(grid),
        sym.values()
            .iter()
            .zip(asym.values())
            .map(|(s, a)| (s + a) * inv_sqrt2)
            .collect(),
    )?;
    Ok((left, right))
}

/// Time-resolved observables from a real-time run.
#[derive(Debug, Clone)]
pub struct PropagationResult {
    pub times: Vec<f64>,
    pub inversion: Vec<f64>,
    pub photon_number: Vec<f64>,
    pub energy: Vec<f64>,
    /// Pump amplitude at each recorded time.
    pub eta: Vec<f64>,
    pub snapshots: Vec<(f64, OrderParameter)>,
    pub final_state: OrderParameter,
    /// Set when the propagation aborted mid-run; the recorded series then
    /// cover only the completed portion.
    pub failure: Option<String>,
}

#[derive(Debug, Clone)]
pub struct EvolveOpts {
    pub t_final: f64,
    pub dt: f64,
    pub schedule: Option<EtaSchedule>,
    /// Store a full wavefunction snapshot every this many steps (0 = never).
    pub snapshot_every: usize,
    /// Record scalar observables every this many steps.
    pub record_every: usize,
    /// Runtime guard on the density at the box edge.
    pub edge_density_limit: f64,
}

impl EvolveOpts {
    pub fn new(t_final: f64, dt: f64) -> Self {
        Self {
            t_final,
            dt,
            schedule: None,
            snapshot_every: 0,
            record_every: 1,
            edge_density_limit: EDGE_DENSITY_LIMIT,
        }
    }
}

/// Self-consistent real-time evolution recording Z(t), n_ss(t) and E(t).
pub fn evolve(psi0: &OrderParameter, p: &ModelParams, opts: &EvolveOpts) -> Result<PropagationResult> {
    if !(opts.t_final > 0.0) {
        return Err(Error::InvalidParams(format!(
            "t_final = {} <= 0",
            opts.t_final
        )));
    }
    let record_every = opts.record_every.max(1);
    let grid = Arc::clone(psi0.grid());
    let mut psi = psi0.clone().normalize()?;
    let mut prop = Propagation::new(Arc::clone(&grid), p, opts.dt, TimeMode::Real)?;
    let steps = (opts.t_final / opts.dt).round() as usize;

    let mut result = PropagationResult {
        times: Vec::new(),
        inversion: Vec::new(),
        photon_number: Vec::new(),
        energy: Vec::new(),
        eta: Vec::new(),
        snapshots: Vec::new(),
        final_state: psi.clone(),
        failure: None,
    };
    let mut record = |t: f64, psi: &OrderParameter, prop: &mut Propagation| {
        let eta_t = match &opts.schedule {
            Some(s) => s.at(t),
            None => p.eta,
        };
        let y = cavity::overlap_y_unchecked(psi, p);
        result.times.push(t);
        result
            .photon_number
            .push(cavity::steady_state_photon_number(y, &p.with_eta(eta_t)));
        result.inversion.push(inversion(psi, p));
        result.energy.push(energy_with(&mut prop.ops, psi, p, eta_t));
        result.eta.push(eta_t);
    };

    prop.set_edge_density_limit(opts.edge_density_limit);
    record(0.0, &psi, &mut prop);
    if opts.snapshot_every > 0 {
        result.snapshots.push((0.0, psi.clone()));
    }
    for i in 0..steps {
        let t = i as f64 * opts.dt;
        let eta_t = match &opts.schedule {
            Some(s) => s.at(t),
            None => p.eta,
        };
        if let Err(e) = prop.step(&mut psi, eta_t, FieldMode::SelfConsistent) {
            result.failure = Some(format!("at t = {t:.6}: {e}"));
            break;
        }
        let done = i + 1;
        if done % record_every == 0 || done == steps {
            record(done as f64 * opts.dt, &psi, &mut prop);
        }
        if opts.snapshot_every > 0 && done % opts.snapshot_every == 0 {
            result.snapshots.push((done as f64 * opts.dt, psi.clone()));
        }
    }
    result.final_state = psi;
    Ok(result)
}

/// One-shot split step, mostly for tests; loops should use [`Propagation`].
pub fn step(
    psi: &OrderParameter,
    dt: f64,
    p: &ModelParams,
    mode: TimeMode,
    field: FieldMode,
) -> Result<(OrderParameter, f64)> {
    let mut prop = Propagation::new(Arc::clone(psi.grid()), p, dt, mode)?;
    let mut out = psi.clone();
    let n_ss = prop.step(&mut out, p.eta, field)?;
    Ok((out, n_ss))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn harmonic_params() -> ModelParams {
        ModelParams {
            kappa: 500.0,
            delta_c: 500.0,
            u0: 2.5,
            eta: 0.0,
            delta_x: 0.5,
            g_coll: 0.0,
            n_atoms: 1.0e4,
            barrier_offset: 0.0,
        }
    }

    fn grid() -> Arc<Grid> {
        Arc::new(Grid::new(1024, 12.0).unwrap())
    }

    #[test]
    fn fft_round_trip_is_identity() {
        let g = grid();
        let psi = OrderParameter::gaussian(Arc::clone(&g), 0.7, 0.9).unwrap();
        let mut ops = SpectralOps::new(g.len());
        let mut buf = psi.values().to_vec();
        ops.forward(&mut buf);
        ops.inverse(&mut buf);
        for (a, b) in buf.iter().zip(psi.values()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn real_step_preserves_norm() {
        let p = harmonic_params();
        let psi = OrderParameter::gaussian(grid(), 1.0, 0.8).unwrap();
        let (out, _) = step(&psi, 5e-4, &p, TimeMode::Real, FieldMode::SelfConsistent).unwrap();
        assert!((out.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coherent_state_oscillates_at_trap_frequency() {
        // eta = 0, g = 0: center follows cos(t) exactly
        let p = harmonic_params();
        let g = grid();
        let psi0 = OrderParameter::gaussian(Arc::clone(&g), 1.0, 1.0).unwrap();
        let dt = 1e-3;
        let mut prop = Propagation::new(Arc::clone(&g), &p, dt, TimeMode::Real).unwrap();
        let mut psi = psi0;
        let mut max_err: f64 = 0.0;
        let steps = (2.0 * std::f64::consts::PI / dt) as usize;
        for i in 0..steps {
            prop.step(&mut psi, 0.0, FieldMode::SelfConsistent).unwrap();
            let t = (i + 1) as f64 * dt;
            let center = g.integrate(
                psi.values()
                    .iter()
                    .zip(g.x())
                    .map(|(v, &x)| x * v.norm_sqr()),
            );
            max_err = max_err.max((center - t.cos()).abs());
        }
        assert!(max_err < 1e-3, "max center error {max_err}");
    }

    #[test]
    fn harmonic_ground_state_from_wide_seed() {
        let p = harmonic_params();
        let g = grid();
        let seed = OrderParameter::gaussian(Arc::clone(&g), 0.0, 1.6).unwrap();
        let opts = GroundStateOpts {
            tol: 1e-12,
            ..Default::default()
        };
        let res = ground_state_imaginary_time(&p, &g, Some(seed), &opts).unwrap();
        assert!(res.converged);
        assert!((res.energy - 0.5).abs() < 1e-6, "E = {}", res.energy);
        let c = std::f64::consts::PI.powf(-0.25);
        for (v, &x) in res.psi.values().iter().zip(g.x()) {
            assert!((v.norm() - c * (-x * x / 2.0).exp()).abs() < 1e-6);
        }
    }

    #[test]
    fn ground_state_is_stationary_under_frozen_field() {
        let mut p = harmonic_params();
        p.eta = 2.0 * p.kappa;
        p.u0 = 100.0;
        p.delta_x = 0.4731;
        let g = grid();
        let opts = GroundStateOpts {
            tol: 1e-12,
            ..Default::default()
        };
        let gs = ground_state_imaginary_time(&p, &g, None, &opts).unwrap();
        assert!(gs.converged);
        let mut prop = Propagation::new(Arc::clone(&g), &p, 5e-4, TimeMode::Real).unwrap();
        let mut psi = gs.psi.clone();
        for _ in 0..20_000 {
            prop.step(&mut psi, p.eta, FieldMode::Frozen(gs.n_ss)).unwrap();
        }
        let drift = psi
            .values()
            .iter()
            .zip(gs.psi.values())
            .map(|(a, b)| (a.norm() - b.norm()).abs())
            .fold(0.0f64, f64::max);
        assert!(drift < 1e-6, "amplitude drift {drift}");
    }

    #[test]
    fn energy_functional_harmonic_and_arctan_term() {
        let p = harmonic_params();
        let g = grid();
        let psi = OrderParameter::gaussian(Arc::clone(&g), 0.0, 1.0).unwrap();
        let e = energy_functional(&psi, &p);
        assert!((e - 0.5).abs() < 1e-10);

        // arctan contribution at Y = 0: displace the density far off the mode
        let mut p2 = harmonic_params();
        p2.eta = 3.0 * p2.kappa;
        let far = OrderParameter::gaussian(Arc::clone(&g), 8.0, 0.5).unwrap();
        let e = energy_functional(&far, &p2);
        let bare = {
            let mut p0 = p2.clone();
            p0.eta = 0.0;
            energy_functional(&far, &p0)
        };
        let expected = -(p2.eta * p2.eta / (p2.kappa * p2.n_atoms))
            * (p2.delta_c / p2.kappa).atan();
        assert!((e - bare - expected).abs() < 1e-9);
    }

    #[test]
    fn inversion_symmetry_cases() {
        let p = harmonic_params();
        let g = grid();
        let even = OrderParameter::gaussian(Arc::clone(&g), 0.0, 1.0).unwrap();
        assert!(inversion(&even, &p).abs() < 1e-10);

        let right = OrderParameter::gaussian(Arc::clone(&g), 3.0, 0.5).unwrap();
        assert!(inversion(&right, &p) > 1.0 - 1e-8);

        let skew = OrderParameter::from_fn(Arc::clone(&g), |x| {
            Complex64::new(
                (-(x - 0.9.to_owned()).powi(2) / 1.3).exp() + 0.4 * (-(x + 1.4).powi(2)).exp(),
                0.0,
            )
        })
        .normalize()
        .unwrap();
        let z = inversion(&skew, &p);
        let z_mirror = inversion(&skew.mirrored(), &p);
        assert!((z + z_mirror).abs() < 1e-14);
    }

    #[test]
    fn schedule_interpolates_and_clamps() {
        let s = EtaSchedule::linear(0.0, 10.0, 1.0, 3.0);
        assert_eq!(s.at(-1.0), 1.0);
        assert_eq!(s.at(0.0), 1.0);
        assert!((s.at(5.0) - 2.0).abs() < 1e-15);
        assert_eq!(s.at(10.0), 3.0);
        assert_eq!(s.at(11.0), 3.0);
    }

    #[test]
    fn evolve_records_requested_samples() {
        let p = harmonic_params();
        let psi = OrderParameter::gaussian(grid(), 0.5, 1.0).unwrap();
        let mut opts = EvolveOpts::new(0.1, 1e-3);
        opts.record_every = 10;
        opts.snapshot_every = 50;
        let res = evolve(&psi, &p, &opts).unwrap();
        assert_eq!(res.times.len(), 11);
        assert!(res.times.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(res.snapshots.len(), 3);
        assert!(res
            .inversion
            .iter()
            .all(|z| (-1.0 - 1e-12..=1.0 + 1e-12).contains(z)));
    }
}
