//! Mean-field cavity observables: atom-field overlap, steady-state photon
//! number, effective potential geometry and closed-form regime estimates.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::units::ModelParams;
use crate::wavefunction::OrderParameter;

/// Field state after adiabatic elimination.
#[derive(Debug, Clone, Copy)]
pub struct CavityState {
    /// Steady-state intracavity photon number.
    pub n_ss: f64,
    /// Atom-field overlap Y = int |psi|^2 U0 exp(-(x-x_b)^2/dx^2) dx, units of omega.
    pub y_overlap: f64,
}

/// Gaussian mode profile exp(-(x - barrier_offset)^2 / delta_x^2) on the grid.
pub fn mode_profile(grid: &Grid, p: &ModelParams) -> Vec<f64> {
    let inv = 1.0 / (p.delta_x * p.delta_x);
    grid.x()
        .iter()
        .map(|&x| (-(x - p.barrier_offset).powi(2) * inv).exp())
        .collect()
}

/// Overlap of a normalized density with the cavity mode, in rate units.
pub fn overlap_y(psi: &OrderParameter, p: &ModelParams) -> Result<f64> {
    psi.check_normalized(1e-8)?;
    Ok(overlap_y_unchecked(psi, p))
}

pub(crate) fn overlap_y_unchecked(psi: &OrderParameter, p: &ModelParams) -> f64 {
    let grid = psi.grid();
    let inv = 1.0 / (p.delta_x * p.delta_x);
    let sum: f64 = psi
        .values()
        .iter()
        .zip(grid.x())
        .map(|(v, &x)| v.norm_sqr() * (-(x - p.barrier_offset).powi(2) * inv).exp())
        .sum();
    p.u0 * sum * grid.spacing()
}

/// n_ss = eta^2 / (kappa^2 + (Delta_c - N Y)^2).
pub fn steady_state_photon_number(y: f64, p: &ModelParams) -> f64 {
    let detuning = p.delta_c - p.n_atoms * y;
    p.eta * p.eta / (p.kappa * p.kappa + detuning * detuning)
}

pub fn cavity_state(psi: &OrderParameter, p: &ModelParams) -> Result<CavityState> {
    let y = overlap_y(psi, p)?;
    Ok(CavityState {
        n_ss: steady_state_photon_number(y, p),
        y_overlap: y,
    })
}

/// V_eff(x) = x^2/2 + n_ss U0 exp(-(x - x_b)^2/dx^2), sampled on the grid.
pub fn effective_potential(grid: &Grid, n_ss: f64, p: &ModelParams) -> Vec<f64> {
    mode_profile(grid, p)
        .iter()
        .zip(grid.x())
        .map(|(&u, &x)| 0.5 * x * x + n_ss * p.u0 * u)
        .collect()
}

/// Position of the effective-potential minima relative to the barrier center:
/// x0 = dx sqrt(ln(2 U0 n_ss / dx^2)). Errors when no double well exists.
pub fn well_minimum_position(n_ss: f64, p: &ModelParams) -> Result<f64> {
    let arg = 2.0 * p.u0 * n_ss / (p.delta_x * p.delta_x);
    if !(arg > 1.0) {
        return Err(Error::NoDoubleWell(arg));
    }
    Ok(p.delta_x * arg.ln().sqrt())
}

/// Overlap suppression factor for a centered Gaussian of width sigma:
/// Y = U0 / sqrt(1 + sigma^2/dx^2).
pub fn gaussian_overlap_factor(sigma: f64, delta_x: f64) -> f64 {
    1.0 / (1.0 + sigma * sigma / (delta_x * delta_x)).sqrt()
}

/// Pump amplitude at which the barrier of the pre-transition Gaussian state
/// reaches one trap quantum, n_ss * U0 = 1:
/// eta_c = sqrt((kappa^2 + (Delta_c - N Y_gauss)^2) / U0).
pub fn critical_pump_estimate(p: &ModelParams, sigma_guess: f64) -> f64 {
    let y = p.u0 * gaussian_overlap_factor(sigma_guess, p.delta_x);
    let d = p.delta_c - p.n_atoms * y;
    ((p.kappa * p.kappa + d * d) / p.u0.abs()).sqrt()
}

/// Coupling at which the Gaussian state of width sigma sits exactly on the
/// cavity resonance Delta_c = N Y: U0* = (Delta_c/N) sqrt(1 + sigma^2/dx^2).
pub fn resonance_coupling(p: &ModelParams, sigma_guess: f64) -> f64 {
    p.delta_c / p.n_atoms * (1.0 + sigma_guess * sigma_guess / (p.delta_x * p.delta_x)).sqrt()
}
