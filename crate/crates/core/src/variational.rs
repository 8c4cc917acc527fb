//! Double-peaked Gaussian ansatz: closed-form energy surface, multi-start
//! simplex minimization, branch bookkeeping and the pump-sweep diagram.
//!
//! The ansatz is psi(x) = C [exp(-(x+x0)^2/2s^2) + exp(-(x-x0)^2/2s^2)] with
//! C fixed by normalization. All integrals entering the energy are Gaussian
//! and evaluated in closed form; the grid-sampled route through
//! [`crate::gpe::energy_functional`] serves as a cross-check.

use std::sync::Arc;

use num_complex::Complex64;

use crate::cavity;
use crate::error::{Error, Result};
use crate::gpe::{self, GroundStateOpts, GroundStateResult, SpectralOps};
use crate::grid::Grid;
use crate::units::ModelParams;
use crate::wavefunction::OrderParameter;

const SIGMA_FLOOR: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    SinglePeak,
    DoublePeak,
}

/// A local minimum of E(sigma, x0).
#[derive(Debug, Clone)]
pub struct VariationalPoint {
    pub sigma: f64,
    pub x0: f64,
    pub energy: f64,
    pub n_ss: f64,
    pub branch: Branch,
    pub is_global: bool,
}

/// Normalized ansatz wavefunction sampled on a grid.
pub fn ansatz_density(sigma: f64, x0: f64, grid: &Arc<Grid>) -> Result<OrderParameter> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidParams(format!("sigma = {sigma} <= 0")));
    }
    let x0 = x0.abs();
    let inv = 1.0 / (2.0 * sigma * sigma);
    OrderParameter::from_fn(Arc::clone(grid), |x| {
        let v = (-(x + x0).powi(2) * inv).exp() + (-(x - x0).powi(2) * inv).exp();
        Complex64::new(v, 0.0)
    })
    .normalize()
}

/// Atom-field overlap of the normalized ansatz, in rate units:
/// Y = U0 (dx/sqrt(dx^2+s^2)) (exp(-x0^2/(dx^2+s^2)) + A) / (1 + A),
/// A = exp(-x0^2/s^2).
pub fn variational_y(sigma: f64, x0: f64, p: &ModelParams) -> f64 {
    let a = (-x0 * x0 / (sigma * sigma)).exp();
    let w2 = p.delta_x * p.delta_x + sigma * sigma;
    p.u0 * (p.delta_x / w2.sqrt()) * ((-x0 * x0 / w2).exp() + a) / (1.0 + a)
}

/// Closed-form E(sigma, x0) per particle for the symmetric configuration.
pub fn variational_energy(sigma: f64, x0: f64, p: &ModelParams) -> f64 {
    let x0 = x0.abs();
    let s2 = sigma * sigma;
    let a = (-x0 * x0 / s2).exp();
    let kinetic = 0.25 / s2 - a * x0 * x0 / (2.0 * s2 * s2 * (1.0 + a));
    let trap = 0.25 * s2 + x0 * x0 / (2.0 * (1.0 + a));
    let quartic = {
        let b = (-1.5 * x0 * x0 / s2).exp();
        (2.0 + 8.0 * b + 6.0 * a * a)
            / (4.0 * (1.0 + a) * (1.0 + a) * sigma * (2.0 * std::f64::consts::PI).sqrt())
    };
    let y = variational_y(sigma, x0, p);
    let field = -(p.eta * p.eta / (p.kappa * p.n_atoms))
        * ((p.delta_c - p.n_atoms * y) / p.kappa).atan();
    kinetic + trap + 0.5 * p.g_coll * p.n_atoms * quartic + field
}

/// Gradient of E(sigma, x0) by the quadrature route: analytic parameter
/// derivatives of the normalized ansatz contracted with the grid-evaluated
/// mean-field Hamiltonian, dE/dq = 2 <d_q psi | H[psi] - mu | psi>.
/// Independent of the closed forms above; used as a test oracle.
pub fn variational_gradient(
    sigma: f64,
    x0: f64,
    p: &ModelParams,
    grid: &Arc<Grid>,
) -> Result<(f64, f64)> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidParams(format!("sigma = {sigma} <= 0")));
    }
    let dx = grid.spacing();
    let n = grid.len();
    let s2 = sigma * sigma;

    let mut u = vec![0.0; n];
    let mut du_ds = vec![0.0; n];
    let mut du_dx0 = vec![0.0; n];
    for (j, &x) in grid.x().iter().enumerate() {
        let lp = x + x0;
        let rp = x - x0;
        let gl = (-lp * lp / (2.0 * s2)).exp();
        let gr = (-rp * rp / (2.0 * s2)).exp();
        u[j] = gl + gr;
        du_ds[j] = (gl * lp * lp + gr * rp * rp) / (s2 * sigma);
        du_dx0[j] = (-gl * lp + gr * rp) / s2;
    }
    let norm_sq: f64 = u.iter().map(|v| v * v).sum::<f64>() * dx;
    let norm = norm_sq.sqrt();

    // d/dq (u/||u||) = du/||u|| - u <u, du> / ||u||^3
    let project = |du: &[f64]| -> Vec<f64> {
        let inner: f64 = u.iter().zip(du).map(|(a, b)| a * b).sum::<f64>() * dx;
        u.iter()
            .zip(du)
            .map(|(uj, duj)| duj / norm - uj * inner / (norm * norm_sq))
            .collect()
    };
    let dpsi_ds = project(&du_ds);
    let dpsi_dx0 = project(&du_dx0);

    let psi = OrderParameter::from_values(
        Arc::clone(grid),
        u.iter().map(|&v| Complex64::new(v / norm, 0.0)).collect(),
    )?;
    let y = cavity::overlap_y(&psi, p)?;
    let n_ss = cavity::steady_state_photon_number(y, p);

    let mut ops = SpectralOps::new(n);
    let mut h_psi = psi.values().to_vec();
    ops.forward(&mut h_psi);
    for (v, &k) in h_psi.iter_mut().zip(grid.wavenumbers()) {
        *v *= 0.5 * k * k;
    }
    ops.inverse(&mut h_psi);
    let profile = cavity::mode_profile(grid, p);
    let g_n = p.g_coll * p.n_atoms;
    for (j, &x) in grid.x().iter().enumerate() {
        let v = 0.5 * x * x + n_ss * p.u0 * profile[j] + g_n * psi.values()[j].norm_sqr();
        h_psi[j] += v * psi.values()[j];
    }
    let mu: f64 = psi
        .values()
        .iter()
        .zip(&h_psi)
        .map(|(a, b)| (a.conj() * b).re)
        .sum::<f64>()
        * dx;

    let contract = |dpsi: &[f64]| -> f64 {
        2.0 * dpsi
            .iter()
            .zip(h_psi.iter().zip(psi.values()))
            .map(|(d, (h, v))| d * (h.re - mu * v.re))
            .sum::<f64>()
            * dx
    };
    Ok((contract(&dpsi_ds), contract(&dpsi_dx0)))
}

/// Multi-start grid for the simplex minimizer.
#[derive(Debug, Clone)]
pub struct StartGrid {
    pub sigmas: Vec<f64>,
    pub x0s: Vec<f64>,
}

impl StartGrid {
    /// sigma in {0.3, 0.6, ..., 3.0} x x0 in {0, 0.5, ..., 5}.
    pub fn coarse() -> Self {
        Self {
            sigmas: (1..=10).map(|i| 0.3 * i as f64).collect(),
            x0s: (0..=10).map(|i| 0.5 * i as f64).collect(),
        }
    }

    pub fn fine() -> Self {
        Self {
            sigmas: (1..=20).map(|i| 0.15 * i as f64).collect(),
            x0s: (0..=20).map(|i| 0.25 * i as f64).collect(),
        }
    }
}

impl Default for StartGrid {
    fn default() -> Self {
        Self::coarse()
    }
}

/// Downhill simplex in two dimensions. Returns (point, value, converged).
fn nelder_mead(
    f: &impl Fn([f64; 2]) -> f64,
    start: [f64; 2],
    scale: [f64; 2],
    max_iter: usize,
) -> ([f64; 2], f64, bool) {
    let mut simplex = vec![
        start,
        [start[0] + scale[0], start[1]],
        [start[0], start[1] + scale[1]],
    ];
    let mut values: Vec<f64> = simplex.iter().map(|&p| f(p)).collect();
    let mut converged = false;
    for _ in 0..max_iter {
        let mut order = [0, 1, 2];
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
        simplex = order.iter().map(|&i| simplex[i]).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let diameter = (0..2)
            .map(|d| {
                (simplex[0][d] - simplex[1][d])
                    .abs()
                    .max((simplex[0][d] - simplex[2][d]).abs())
            })
            .fold(0.0f64, f64::max);
        let spread = (values[2] - values[0]).abs();
        if diameter < 1e-10 && spread < 1e-13 * (1.0 + values[0].abs()) {
            converged = true;
            break;
        }

        let centroid = [
            0.5 * (simplex[0][0] + simplex[1][0]),
            0.5 * (simplex[0][1] + simplex[1][1]),
        ];
        let reflect = [
            centroid[0] + (centroid[0] - simplex[2][0]),
            centroid[1] + (centroid[1] - simplex[2][1]),
        ];
        let fr = f(reflect);
        if fr < values[0] {
            let expand = [
                centroid[0] + 2.0 * (centroid[0] - simplex[2][0]),
                centroid[1] + 2.0 * (centroid[1] - simplex[2][1]),
            ];
            let fe = f(expand);
            if fe < fr {
                simplex[2] = expand;
                values[2] = fe;
            } else {
                simplex[2] = reflect;
                values[2] = fr;
            }
        } else if fr < values[1] {
            simplex[2] = reflect;
            values[2] = fr;
        } else {
            let contract = [
                centroid[0] + 0.5 * (simplex[2][0] - centroid[0]),
                centroid[1] + 0.5 * (simplex[2][1] - centroid[1]),
            ];
            let fc = f(contract);
            if fc < values[2] {
                simplex[2] = contract;
                values[2] = fc;
            } else {
                for i in 1..3 {
                    simplex[i] = [
                        simplex[0][0] + 0.5 * (simplex[i][0] - simplex[0][0]),
                        simplex[0][1] + 0.5 * (simplex[i][1] - simplex[0][1]),
                    ];
                    values[i] = f(simplex[i]);
                }
            }
        }
    }
    (simplex[0], values[0], converged)
}

fn objective(p: &ModelParams) -> impl Fn([f64; 2]) -> f64 + '_ {
    move |q: [f64; 2]| {
        let sigma = q[0];
        if sigma < SIGMA_FLOOR {
            return 1e10 * (1.0 + (SIGMA_FLOOR - sigma));
        }
        variational_energy(sigma, q[1].abs(), p)
    }
}

/// 2x2 Hessian of the closed-form energy by central differences.
fn hessian(p: &ModelParams, sigma: f64, x0: f64) -> [[f64; 2]; 2] {
    let h = 1e-3;
    let f = |s: f64, x: f64| variational_energy(s, x, p);
    let fss = (f(sigma + h, x0) - 2.0 * f(sigma, x0) + f(sigma - h, x0)) / (h * h);
    let fxx = (f(sigma, x0 + h) - 2.0 * f(sigma, x0) + f(sigma, x0 - h)) / (h * h);
    let fsx = (f(sigma + h, x0 + h) - f(sigma + h, x0 - h) - f(sigma - h, x0 + h)
        + f(sigma - h, x0 - h))
        / (4.0 * h * h);
    [[fss, fsx], [fsx, fxx]]
}

fn min_eigenvalue(m: [[f64; 2]; 2]) -> f64 {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    0.5 * tr - (0.25 * tr * tr - det).max(0.0).sqrt()
}

fn classify(sigma: f64, x0: f64) -> Branch {
    // local minimum of the density at the center, probed numerically
    let delta = 1e-3 * sigma;
    let amp = |x: f64| {
        (-(x + x0).powi(2) / (2.0 * sigma * sigma)).exp()
            + (-(x - x0).powi(2) / (2.0 * sigma * sigma)).exp()
    };
    let rho0 = amp(0.0).powi(2);
    let rho1 = amp(delta).powi(2);
    if rho1 > rho0 {
        Branch::DoublePeak
    } else {
        Branch::SinglePeak
    }
}

/// Locate all local minima of E(sigma, x0) by multi-start simplex descent.
///
/// Starts that fail to converge are dropped; duplicates within 1e-3 in both
/// coordinates are merged; saddle points are rejected through a positive-
/// definiteness check of the numerical Hessian. The lowest minimum carries
/// `is_global`.
pub fn find_branches(p: &ModelParams, starts: &StartGrid) -> Result<Vec<VariationalPoint>> {
    p.validate()?;
    if p.barrier_offset != 0.0 {
        return Err(Error::InvalidParams(
            "variational ansatz assumes a centered barrier".into(),
        ));
    }
    let f = objective(p);
    let mut candidates: Vec<(f64, f64, f64)> = Vec::new();
    for &s0 in &starts.sigmas {
        for &x00 in &starts.x0s {
            let (q1, _, ok1) = nelder_mead(&f, [s0, x00], [0.1 * s0.max(0.3), 0.25], 4000);
            if !ok1 {
                continue;
            }
            let (q2, e2, ok2) = nelder_mead(&f, q1, [1e-3, 1e-3], 2000);
            if !ok2 {
                continue;
            }
            let sigma = q2[0];
            if sigma < SIGMA_FLOOR {
                continue;
            }
            let mut x0 = q2[1].abs();
            if x0 < 1e-7 {
                x0 = 0.0;
            }
            candidates.push((sigma, x0, e2));
        }
    }
    candidates.sort_by(|a, b| a.2.partial_cmp(&b.2).unwrap());

    // Around a symmetric minimum the x0 direction can be quartically flat,
    // which scatters simplex results across the bowl. Snap such points onto
    // the symmetry axis when that does not cost energy.
    let polished: Vec<(f64, f64, f64)> = candidates
        .iter()
        .map(|&(sigma, x0, e)| {
            if x0 > 0.0 && x0 < 0.05 {
                let (q, e_sym, ok) = nelder_mead(
                    &|q: [f64; 2]| f([q[0], 0.0]),
                    [sigma, 0.0],
                    [1e-3, 0.0],
                    2000,
                );
                if ok && e_sym <= e + 1e-9 * (1.0 + e.abs()) {
                    return (q[0], 0.0, e_sym);
                }
            }
            (sigma, x0, e)
        })
        .collect();

    // Deduplicate in parameter space, and in observable space for minima that
    // converged onto the same physical state through a flat direction.
    let mut found: Vec<(f64, f64, f64, f64)> = Vec::new();
    for (sigma, x0, e) in polished {
        let n_ss = cavity::steady_state_photon_number(variational_y(sigma, x0, p), p);
        let duplicate = found.iter().any(|&(s, x, eb, nb)| {
            ((s - sigma).abs() < 1e-3 && (x - x0).abs() < 1e-3)
                || ((eb - e).abs() < 1e-9 * (1.0 + e.abs())
                    && (nb - n_ss).abs() < 1e-9 * (1.0 + n_ss))
        });
        if duplicate {
            continue;
        }
        // Reject saddles; a vanishing eigenvalue (degenerate symmetric
        // minimum) is admitted within noise.
        if min_eigenvalue(hessian(p, sigma, x0)) < -1e-8 * (1.0 + e.abs()) {
            continue;
        }
        found.push((sigma, x0, e, n_ss));
    }
    if found.is_empty() {
        return Err(Error::NoMinimum);
    }
    let found: Vec<(f64, f64, f64)> = found.into_iter().map(|(s, x, e, _)| (s, x, e)).collect();

    let grid = Arc::new(Grid::default_grid());
    let mut out = Vec::with_capacity(found.len());
    for (i, &(sigma, x0, energy)) in found.iter().enumerate() {
        let psi = ansatz_density(sigma, x0, &grid)?;
        let n_ss = cavity::steady_state_photon_number(cavity::overlap_y(&psi, p)?, p);
        out.push(VariationalPoint {
            sigma,
            x0,
            energy,
            n_ss,
            branch: classify(sigma, x0),
            is_global: i == 0,
        });
    }
    Ok(out)
}

/// One pump value of the bistability diagram.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub eta: f64,
    /// Local minima sorted by energy; index 0 is the global branch.
    pub branches: Vec<VariationalPoint>,
    /// Imaginary-time ground state started from the bare-trap Gaussian.
    pub gpe: GroundStateResult,
    pub gpe_double_peaked: bool,
}

#[derive(Debug, Clone, Default)]
pub struct SweepOpts {
    pub starts: StartGrid,
    pub ground_state: GroundStateOpts,
}

/// Sweep the pump amplitude: variational branches plus the cold-start GPE
/// ground state at every eta.
pub fn sweep_pump(
    p: &ModelParams,
    eta_values: &[f64],
    grid: &Arc<Grid>,
    opts: &SweepOpts,
) -> Result<Vec<SweepPoint>> {
    if eta_values.is_empty() {
        return Err(Error::InvalidParams("empty eta list".into()));
    }
    if eta_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParams("eta values must ascend".into()));
    }
    let mut points = Vec::with_capacity(eta_values.len());
    for &eta in eta_values {
        let pe = p.with_eta(eta);
        let branches = find_branches(&pe, &opts.starts)?;
        let gpe = gpe::ground_state_imaginary_time(&pe, grid, None, &opts.ground_state)?;
        let gpe_double_peaked = gpe.psi.double_peaked();
        points.push(SweepPoint {
            eta,
            branches,
            gpe,
            gpe_double_peaked,
        });
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig3_params(eta: f64) -> ModelParams {
        ModelParams {
            kappa: 500.0,
            delta_c: 500.0,
            u0: 5.0,
            eta,
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
    fn ansatz_prefactor_single_gaussian_limit() {
        let g = grid();
        for sigma in [0.5, 1.0, 1.7] {
            let psi = ansatz_density(sigma, 0.0, &g).unwrap();
            let c = 1.0 / (2.0 * std::f64::consts::PI.powf(0.25) * sigma.sqrt());
            let peak = psi.values()[g.center_index()].re;
            assert!((peak - 2.0 * c).abs() < 1e-10, "sigma = {sigma}");
            assert!((psi.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn well_separated_peaks_carry_half_probability_each() {
        let g = grid();
        let sigma = 0.6;
        let psi = ansatz_density(sigma, 5.0 * sigma, &g).unwrap();
        let p = fig3_params(0.0);
        let z = gpe::inversion(&psi, &p);
        assert!(z.abs() < 1e-9);
        let left: f64 = psi
            .values()
            .iter()
            .zip(g.x())
            .filter(|(_, &x)| x < 0.0)
            .map(|(v, _)| v.norm_sqr())
            .sum::<f64>()
            * g.spacing();
        assert!((left - 0.5).abs() < 1e-9);
    }

    #[test]
    fn eta_zero_energy_reduces_to_harmonic_form() {
        let p = fig3_params(0.0);
        for sigma in [0.6, 1.0, 1.9] {
            let e = variational_energy(sigma, 0.0, &p);
            let expected = 0.25 * (1.0 / (sigma * sigma) + sigma * sigma);
            assert!((e - expected).abs() < 1e-12);
        }
        assert!(variational_energy(1.0, 0.0, &p) <= variational_energy(0.97, 0.0, &p));
        assert!(variational_energy(1.0, 0.0, &p) <= variational_energy(1.03, 0.0, &p));
    }

    #[test]
    fn closed_form_matches_grid_energy() {
        let g = grid();
        // eta = 0, g = 0
        let p = fig3_params(0.0);
        for &(s, x0) in &[(1.0, 0.0), (0.6, 1.4), (1.5, 0.7), (0.45, 2.2)] {
            let psi = ansatz_density(s, x0, &g).unwrap();
            let e_grid = gpe::energy_functional(&psi, &p);
            let e_closed = variational_energy(s, x0, &p);
            assert!(
                (e_grid - e_closed).abs() < 1e-8,
                "(s, x0) = ({s}, {x0}): {e_grid} vs {e_closed}"
            );
        }
        // pumped and interacting
        let mut p = fig3_params(6.0 * 500.0);
        p.g_coll = 0.3;
        for &(s, x0) in &[(0.8, 0.9), (0.5, 1.8)] {
            let psi = ansatz_density(s, x0, &g).unwrap();
            let e_grid = gpe::energy_functional(&psi, &p);
            let e_closed = variational_energy(s, x0, &p);
            assert!((e_grid - e_closed).abs() < 1e-8);
        }
    }

    #[test]
    fn ansatz_overlap_matches_quadrature() {
        let g = grid();
        let p = fig3_params(500.0);
        // closed form against the grid quadrature at moderate separation
        for &(s, x0) in &[(0.7, 1.0), (1.1, 0.4), (0.5, 2.0)] {
            let psi = ansatz_density(s, x0, &g).unwrap();
            let y_quad = cavity::overlap_y(&psi, &p).unwrap();
            let y_closed = variational_y(s, x0, &p);
            assert!((y_quad - y_closed).abs() < 1e-10);
        }
        // far-separated limit drops the normalization cross term:
        // Y -> U0 (J0 + J1) with the bare two-mode overlaps
        let (s, x0) = (0.7, 3.5);
        let psi = ansatz_density(s, x0, &g).unwrap();
        let y_quad = cavity::overlap_y(&psi, &p).unwrap();
        let w2 = p.delta_x * p.delta_x + s * s;
        let j0 = (p.delta_x / w2.sqrt()) * (-x0 * x0 / w2).exp();
        let j1 = (p.delta_x / w2.sqrt()) * (-x0 * x0 / (s * s)).exp();
        assert!((y_quad - p.u0 * (j0 + j1)).abs() < 1e-8);
        // sigma = 1, dx = sigma/2, x0 = 0: the arctan argument carries U0/sqrt(5)
        let y0 = variational_y(1.0, 0.0, &p);
        assert!((y0 - p.u0 / 5.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn gradient_agrees_with_finite_differences() {
        let g = grid();
        let mut p = fig3_params(8.0 * 500.0);
        p.g_coll = 0.1;
        // deterministic pseudo-random feasible points
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut rnd = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let h = 1e-5;
        for _ in 0..20 {
            let sigma = 0.35 + 2.0 * rnd();
            let x0 = 3.5 * rnd();
            let (gs, gx) = variational_gradient(sigma, x0, &p, &g).unwrap();
            let fd_s =
                (variational_energy(sigma + h, x0, &p) - variational_energy(sigma - h, x0, &p))
                    / (2.0 * h);
            let fd_x =
                (variational_energy(sigma, x0 + h, &p) - variational_energy(sigma, x0 - h, &p))
                    / (2.0 * h);
            let scale = fd_s.abs().max(fd_x.abs()).max(1e-6);
            assert!(
                (gs - fd_s).abs() / scale < 1e-5,
                "d/dsigma at ({sigma}, {x0}): {gs} vs {fd_s}"
            );
            assert!(
                (gx - fd_x).abs() / scale < 1e-5,
                "d/dx0 at ({sigma}, {x0}): {gx} vs {fd_x}"
            );
        }
    }

    #[test]
    fn eta_zero_has_exactly_one_branch() {
        let p = fig3_params(0.0);
        let branches = find_branches(&p, &StartGrid::default()).unwrap();
        assert_eq!(branches.len(), 1);
        let b = &branches[0];
        assert!((b.sigma - 1.0).abs() < 1e-6);
        assert!(b.x0.abs() < 1e-6);
        assert!((b.energy - 0.5).abs() < 1e-10);
        assert_eq!(b.branch, Branch::SinglePeak);
        assert!(b.is_global);
    }

    #[test]
    fn bistable_window_has_two_branches_with_distinct_photon_numbers() {
        let p = fig3_params(12.0 * 500.0);
        let branches = find_branches(&p, &StartGrid::default()).unwrap();
        assert!(branches.len() >= 2, "found {}", branches.len());
        let global = &branches[0];
        let other = &branches[1];
        assert_eq!(global.branch, Branch::DoublePeak);
        assert!(global.is_global);
        assert!(global.n_ss > 10.0 * other.n_ss);
        // every reported branch is a strict local minimum
        for b in &branches {
            let h = hessian(&p, b.sigma, b.x0);
            assert!(min_eigenvalue(h) > 0.0);
        }
    }

    #[test]
    fn resonant_coupling_keeps_single_branch() {
        let mut p = fig3_params(0.0);
        p.u0 = cavity::resonance_coupling(&p, 1.0);
        for eta_k in [1.0, 4.0, 8.0] {
            let branches = find_branches(&p.with_eta(eta_k * p.kappa), &StartGrid::default())
                .unwrap();
            assert_eq!(branches.len(), 1, "eta = {eta_k} kappa");
        }
    }

    #[test]
    fn branch_photon_number_is_self_consistent() {
        let p = fig3_params(12.0 * 500.0);
        let g = Arc::new(Grid::default_grid());
        for b in find_branches(&p, &StartGrid::default()).unwrap() {
            let psi = ansatz_density(b.sigma, b.x0, &g).unwrap();
            let n = cavity::steady_state_photon_number(cavity::overlap_y(&psi, &p).unwrap(), &p);
            assert_eq!(n, b.n_ss);
        }
    }

    #[test]
    fn field_term_monotone_in_pump_power() {
        // off resonance at fixed (sigma, x0) the arctan term scales with eta^2
        let (s, x0) = (0.9, 0.8);
        let p1 = fig3_params(2.0 * 500.0);
        let p2 = fig3_params(3.0 * 500.0);
        let d = p1.delta_c - p1.n_atoms * variational_y(s, x0, &p1);
        let sign = -(d / p1.kappa).atan().signum();
        let diff = variational_energy(s, x0, &p2) - variational_energy(s, x0, &p1);
        assert!(diff.signum() == sign, "diff = {diff}, sign = {sign}");
    }

    #[test]
    fn small_eta_limit_matches_closed_form() {
        let p = fig3_params(0.01 * 500.0);
        let branches = find_branches(&p, &StartGrid::default()).unwrap();
        assert_eq!(branches.len(), 1);
        let b = &branches[0];
        let y = p.u0 / (1.0 + 1.0 / (p.delta_x * p.delta_x)).sqrt(); // sigma = 1
        let expected = cavity::steady_state_photon_number(y, &p);
        assert!(
            (b.n_ss - expected).abs() / expected < 1e-3,
            "{} vs {}",
            b.n_ss,
            expected
        );
    }
}
