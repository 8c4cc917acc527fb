//! Two-mode model of the double well: overlap coefficients, self-consistent
//! (sigma, n_ss) backgrounds, number-dependent tunneling, the exact spectrum,
//! coherent-state collapse-revival dynamics and a dense Fock-basis oracle.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::units::ModelParams;

/// Exact inversion of the two-level problem H = [[E_L, -J], [-J, E_R]] with
/// delta = E_L - E_R, starting fully in the right well. Evaluated through the
/// closed SU(2) form of the matrix exponential.
pub fn two_level_inversion(j: f64, delta: f64, t: f64) -> f64 {
    let omega = (j * j + 0.25 * delta * delta).sqrt();
    if omega == 0.0 {
        return 1.0;
    }
    let s = (omega * t).sin() / omega;
    let c = (omega * t).cos();
    // (c_l, c_r) = exp(-i H0 t) (0, 1) with traceless H0
    let cl_im = j * s;
    let cr_re = c;
    let cr_im = 0.5 * delta * s;
    cr_re * cr_re + cr_im * cr_im - cl_im * cl_im
}

/// Closed-form overlap integrals of displaced Gaussians of width sigma at
/// +-x0, under the artificial-orthogonality convention (oscillator units).
#[derive(Debug, Clone, Copy)]
pub struct TwoModeCoefficients {
    pub e0: f64,
    pub e1: f64,
    pub j0: f64,
    pub j1: f64,
    pub s0: f64,
    pub s1: f64,
    pub sigma: f64,
    pub x0: f64,
    pub n_ss: f64,
}

/// Evaluate the six closed forms; n_ss is the steady-state photon number of
/// the Y = U0 J0 N overlap at N = p.n_atoms.
pub fn overlap_coefficients(sigma: f64, x0: f64, p: &ModelParams) -> Result<TwoModeCoefficients> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidParams(format!("sigma = {sigma} <= 0")));
    }
    if x0 < 0.0 {
        return Err(Error::InvalidParams(format!("x0 = {x0} < 0")));
    }
    let s2 = sigma * sigma;
    let a = (-x0 * x0 / s2).exp();
    let w2 = p.delta_x * p.delta_x + s2;
    let j_pref = p.delta_x / w2.sqrt();
    let e0 = 0.25 / s2;
    let mut coeffs = TwoModeCoefficients {
        e0,
        e1: e0 * a,
        j0: j_pref * (-x0 * x0 / w2).exp(),
        j1: j_pref * a,
        s0: 0.5 * (x0 * x0 + 0.5 * s2),
        s1: 0.25 * s2 * a,
        sigma,
        x0,
        n_ss: 0.0,
    };
    coeffs.n_ss = photon_number_from_j0(coeffs.j0, p);
    Ok(coeffs)
}

fn photon_number_from_j0(j0: f64, p: &ModelParams) -> f64 {
    let d = p.delta_c - p.u0 * j0 * p.n_atoms;
    p.eta * p.eta / (p.kappa * p.kappa + d * d)
}

/// Two-mode Hamiltonian H = (E0 + S0) N + f(N) - t(N) B in a fixed geometry.
#[derive(Debug, Clone)]
pub struct TwoModeModel {
    pub coeffs: TwoModeCoefficients,
    pub params: ModelParams,
    /// Constant shift of f(N); dynamically irrelevant for the inversion.
    pub f_offset: f64,
}

impl TwoModeModel {
    pub fn new(coeffs: TwoModeCoefficients, params: ModelParams) -> Self {
        Self {
            coeffs,
            params,
            f_offset: 0.0,
        }
    }

    /// Number-dependent tunneling energy
    /// t(N) = -E1 - S1 - eta^2 U0 J1 / (kappa^2 + (Delta_c - U0 J0 N)^2).
    pub fn tunneling_t(&self, n: f64) -> f64 {
        let c = &self.coeffs;
        let p = &self.params;
        let d = p.delta_c - p.u0 * c.j0 * n;
        -c.e1 - c.s1 - p.eta * p.eta * p.u0 * c.j1 / (p.kappa * p.kappa + d * d)
    }

    /// Diagonal energy shift; carries the same sign convention as the
    /// mean-field energy functional.
    pub fn f_shift(&self, n: f64) -> f64 {
        let p = &self.params;
        let d = p.delta_c - p.u0 * self.coeffs.j0 * n;
        -(p.eta * p.eta / p.kappa) * (d / p.kappa).atan() + self.f_offset
    }

    /// Ansatz energy per particle at this geometry and N = params.n_atoms,
    /// the quantity whose sigma-minimum fixed the width.
    pub fn energy_per_particle(&self) -> f64 {
        eq20_energy(self.coeffs.sigma, self.coeffs.x0, &self.params)
    }

    /// The N+1 equidistant levels E_k = (E0+S0) N + f(N) - t(N) (N - 2k).
    pub fn spectrum(&self, n: u32) -> Vec<f64> {
        let nf = n as f64;
        let base = (self.coeffs.e0 + self.coeffs.s0) * nf + self.f_shift(nf);
        let t = self.tunneling_t(nf);
        (0..=n).map(|k| base - t * (nf - 2.0 * k as f64)).collect()
    }
}

/// Which well holds the initial atoms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitialWell {
    #[default]
    Right,
    Left,
}

/// A guess that could not be iterated to a fixed point.
#[derive(Debug, Clone)]
pub struct GuessFailure {
    pub guess: f64,
    pub reason: String,
}

#[derive(Debug)]
pub struct SelfConsistentOutcome {
    pub models: Vec<TwoModeModel>,
    pub failures: Vec<GuessFailure>,
}

/// Default photon-number guesses spanning the feasible range (0, eta^2/kappa^2).
pub fn default_photon_guesses(p: &ModelParams) -> Vec<f64> {
    let max = (p.eta / p.kappa).powi(2);
    vec![0.01, 1.0, 0.99 * max]
}

fn eq20_energy(sigma: f64, x0: f64, p: &ModelParams) -> f64 {
    let c = match overlap_coefficients(sigma, x0, p) {
        Ok(c) => c,
        Err(_) => return f64::INFINITY,
    };
    let arg = (p.delta_c - p.u0 * p.n_atoms * (c.j0 + c.j1)) / p.kappa;
    c.e0 + c.e1 + c.s0 + c.s1 - (p.eta * p.eta / (p.kappa * p.n_atoms)) * arg.atan()
}

/// Coarse scan plus golden-section refinement of E(sigma) at fixed x0.
fn minimize_sigma(x0: f64, p: &ModelParams) -> f64 {
    const SIGMA_LO: f64 = 0.05;
    const SIGMA_HI: f64 = 4.0;
    const SCAN: usize = 160;
    let mut best = (SIGMA_LO, f64::INFINITY);
    for i in 0..=SCAN {
        let s = SIGMA_LO * (SIGMA_HI / SIGMA_LO).powf(i as f64 / SCAN as f64);
        let e = eq20_energy(s, x0, p);
        if e < best.1 {
            best = (s, e);
        }
    }
    let step = (SIGMA_HI / SIGMA_LO).powf(1.0 / SCAN as f64);
    let (mut a, mut b) = ((best.0 / step).max(SIGMA_LO), (best.0 * step).min(SIGMA_HI));
    let phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let (mut c, mut d) = (b - phi * (b - a), a + phi * (b - a));
    let (mut fc, mut fd) = (eq20_energy(c, x0, p), eq20_energy(d, x0, p));
    for _ in 0..90 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = eq20_energy(c, x0, p);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = eq20_energy(d, x0, p);
        }
        if b - a < 1e-13 * (1.0 + a) {
            break;
        }
    }
    0.5 * (a + b)
}

fn iterate_fixed_point(
    p: &ModelParams,
    n_start: f64,
    mixing: f64,
    max_iter: usize,
) -> std::result::Result<(f64, f64, f64), String> {
    let mut n_ss = n_start;
    for _ in 0..max_iter {
        let arg = 2.0 * p.u0 * n_ss / (p.delta_x * p.delta_x);
        if arg <= 1.0 {
            return Err(format!(
                "no double well at n_ss = {n_ss:.6e} (ln argument {arg:.6e})"
            ));
        }
        let x0 = p.delta_x * arg.ln().sqrt();
        let sigma = minimize_sigma(x0, p);
        let c = overlap_coefficients(sigma, x0, p).map_err(|e| e.to_string())?;
        let n_new = photon_number_from_j0(c.j0, p);
        if (n_new - n_ss).abs() / n_ss.max(1e-300) < 1e-10 {
            return Ok((sigma, x0, n_new));
        }
        n_ss = mixing * n_new + (1.0 - mixing) * n_ss;
    }
    Err("fixed-point iteration did not settle".into())
}

/// Solve the coupled (sigma, n_ss) equations: x0 pinned to the potential
/// minima, sigma from minimizing the two-mode energy at fixed x0, n_ss from
/// the steady-state photon number with Y = U0 J0. Guesses that oscillate are
/// retried with 0.5 mixing; guesses outside the double-well domain are
/// reported and skipped. Distinct fixed points are deduplicated.
pub fn self_consistent_model(p: &ModelParams, guesses: &[f64]) -> Result<SelfConsistentOutcome> {
    p.validate()?;
    if p.barrier_offset != 0.0 {
        return Err(Error::InvalidParams(
            "two-mode closed forms assume a centered barrier".into(),
        ));
    }
    if guesses.is_empty() {
        return Err(Error::InvalidParams("empty guess list".into()));
    }
    let mut models: Vec<TwoModeModel> = Vec::new();
    let mut failures = Vec::new();
    for &guess in guesses {
        let solved = iterate_fixed_point(p, guess, 1.0, 400)
            .or_else(|_| iterate_fixed_point(p, guess, 0.5, 1200));
        match solved {
            Ok((sigma, x0, n_ss)) => {
                let duplicate = models.iter().any(|m| {
                    (m.coeffs.n_ss - n_ss).abs() / n_ss.max(1e-300) < 1e-8
                        && (m.coeffs.sigma - sigma).abs() < 1e-6
                });
                if !duplicate {
                    let mut coeffs = overlap_coefficients(sigma, x0, p)?;
                    coeffs.n_ss = n_ss;
                    models.push(TwoModeModel::new(coeffs, p.clone()));
                }
            }
            Err(reason) => failures.push(GuessFailure { guess, reason }),
        }
    }
    Ok(SelfConsistentOutcome { models, failures })
}

fn poisson_log_weights(n_bar: f64, n_max: usize) -> Vec<f64> {
    let mut log_fact = 0.0;
    let ln_nbar = n_bar.ln();
    (0..=n_max)
        .map(|n| {
            if n > 0 {
                log_fact += (n as f64).ln();
            }
            -n_bar + n as f64 * ln_nbar - log_fact
        })
        .collect()
}

/// Poisson-weighted many-body inversion
/// Z_MB(t) = (1/n_bar) sum_n P(n) n cos(2 t(n) t),
/// summed ascending in n with compensated accumulation.
pub fn collapse_revival_inversion(
    n_bar: f64,
    times: &[f64],
    model: &TwoModeModel,
    n_max: usize,
    well: InitialWell,
) -> Result<Vec<f64>> {
    if !(n_bar > 0.0) {
        return Err(Error::InvalidParams(format!("n_bar = {n_bar} <= 0")));
    }
    if (n_max as f64) < n_bar + 10.0 * n_bar.sqrt() {
        return Err(Error::InvalidParams(format!(
            "n_max = {n_max} below n_bar + 10 sqrt(n_bar)"
        )));
    }
    let log_w = poisson_log_weights(n_bar, n_max);
    let weights: Vec<f64> = log_w.iter().map(|&lw| lw.exp()).collect();
    // geometric bound on the discarded mass: successive weights shrink by
    // at least n_bar/(n_max+1) beyond the truncation
    let ratio = n_bar / (n_max as f64 + 1.0);
    let tail = weights[n_max] * ratio / (1.0 - ratio);
    if tail > 1e-12 {
        return Err(Error::PoissonTruncation(tail));
    }
    let freqs: Vec<f64> = (0..=n_max).map(|n| 2.0 * model.tunneling_t(n as f64)).collect();
    let sign = match well {
        InitialWell::Right => 1.0,
        InitialWell::Left => -1.0,
    };
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let mut sum = 0.0;
        let mut comp = 0.0;
        for n in 0..=n_max {
            let term = weights[n] * n as f64 * (freqs[n] * t).cos();
            let y = term - comp;
            let s = sum + y;
            comp = (s - sum) - y;
            sum = s;
        }
        out.push(sign * sum / n_bar);
    }
    Ok(out)
}

/// Revival-time estimate T_r = pi / |dt/dN| at N = n_bar (central difference,
/// step 1). A vanishing derivative yields the infinite sentinel.
pub fn revival_time(n_bar: f64, model: &TwoModeModel) -> f64 {
    let slope = 0.5 * (model.tunneling_t(n_bar + 1.0) - model.tunneling_t(n_bar - 1.0));
    if slope == 0.0 {
        return f64::INFINITY;
    }
    std::f64::consts::PI / slope.abs()
}

/// Dense Fock-basis evolution of |n, 0> under the sector Hamiltonian:
/// the brute-force oracle. Basis index j counts atoms in the right well.
pub fn exact_fock_evolution(
    n: u32,
    model: &TwoModeModel,
    times: &[f64],
    well: InitialWell,
) -> Result<Vec<f64>> {
    if !(1..=12).contains(&n) {
        return Err(Error::FockDimension(n));
    }
    let dim = (n + 1) as usize;
    let nf = n as f64;
    // The sector-constant diagonal (E0+S0) n + f(n) is a global phase and
    // cannot move any |amplitude|^2; it is dropped so that long-time phases
    // are not polluted by rounding of a large irrelevant offset.
    let t_n = model.tunneling_t(nf);
    let h = DMatrix::from_fn(dim, dim, |r, c| {
        if r.abs_diff(c) == 1 {
            // <j+1| B |j> = sqrt((j+1)(n-j))
            let j = r.min(c) as f64;
            -t_n * ((j + 1.0) * (nf - j)).sqrt()
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(h);
    let q = eig.eigenvectors;
    let lambda = eig.eigenvalues;

    let start = match well {
        InitialWell::Right => dim - 1,
        InitialWell::Left => 0,
    };
    // coefficients of the initial basis vector in the eigenbasis
    let coeff: Vec<f64> = (0..dim).map(|m| q[(start, m)]).collect();

    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let mut z = 0.0;
        let mut norm = 0.0;
        for j in 0..dim {
            let mut re = 0.0;
            let mut im = 0.0;
            for m in 0..dim {
                let (s, c) = (lambda[m] * t).sin_cos();
                re += q[(j, m)] * coeff[m] * c;
                im -= q[(j, m)] * coeff[m] * s;
            }
            let prob = re * re + im * im;
            norm += prob;
            z += prob * (2.0 * j as f64 - nf) / nf;
        }
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Numerical(format!(
                "Fock evolution norm drifted to {norm}"
            )));
        }
        out.push(z);
    }
    Ok(out)
}
