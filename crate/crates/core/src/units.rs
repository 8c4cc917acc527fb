//! Parameter sets and the oscillator-unit convention.
//!
//! Everything downstream works in harmonic-oscillator units: hbar = m = omega = 1,
//! lengths in a_ho = sqrt(hbar / m omega), times in 1/omega, energies in hbar omega.
//! Rates quoted "in units of kappa" are converted once at this boundary.

use crate::error::{Error, Result};

/// Reduced Planck constant, J s.
pub const HBAR_SI: f64 = 1.054_571_817e-34;
/// Unified atomic mass unit, kg.
pub const ATOMIC_MASS_KG: f64 = 1.660_539_066_60e-27;
/// Mass of Rb-87, kg.
pub const RB87_MASS_KG: f64 = 87.0 * ATOMIC_MASS_KG;

/// Physical rates and scales in oscillator units.
///
/// `n_atoms` is real-valued: in the mean-field equations the atom number only
/// enters through products like N*Y, and density scaling maps it continuously.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    /// Cavity decay rate, units of omega.
    pub kappa: f64,
    /// Pump-cavity detuning, units of omega.
    pub delta_c: f64,
    /// Dispersive atom-field coupling per photon, units of omega.
    pub u0: f64,
    /// Pump amplitude, units of omega.
    pub eta: f64,
    /// Cavity mode waist, units of a_ho.
    pub delta_x: f64,
    /// Collisional interaction strength g, units of hbar omega a_ho.
    pub g_coll: f64,
    /// Atom number (real-valued for mean-field scaling).
    pub n_atoms: f64,
    /// Spatial shift of the mode center, units of a_ho. Zero gives the
    /// symmetric (dc Josephson) configuration.
    pub barrier_offset: f64,
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            self.kappa,
            self.delta_c,
            self.u0,
            self.eta,
            self.delta_x,
            self.g_coll,
            self.n_atoms,
            self.barrier_offset,
        ];
        if fields.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("non-finite field".into()));
        }
        if self.kappa <= 0.0 {
            return Err(Error::InvalidParams(format!("kappa = {} <= 0", self.kappa)));
        }
        if self.eta < 0.0 {
            return Err(Error::InvalidParams(format!("eta = {} < 0", self.eta)));
        }
        if self.delta_x <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "delta_x = {} <= 0",
                self.delta_x
            )));
        }
        if self.n_atoms <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "n_atoms = {} <= 0",
                self.n_atoms
            )));
        }
        Ok(())
    }

    /// Same parameters with a different pump amplitude.
    pub fn with_eta(&self, eta: f64) -> Self {
        Self { eta, ..self.clone() }
    }

    /// Density-preserving rescaling (N, U0, eta) -> (l N, U0/l, sqrt(l) eta).
    ///
    /// Leaves n_ss*U0, and with g = 0 the full mean-field problem, invariant.
    pub fn scaled_density(&self, lambda: f64) -> Self {
        Self {
            n_atoms: self.n_atoms * lambda,
            u0: self.u0 / lambda,
            eta: self.eta * lambda.sqrt(),
            ..self.clone()
        }
    }
}

/// Laboratory-frame inputs: kappa in rad/s, other rates as multiples of kappa,
/// lengths already in a_ho.
#[derive(Debug, Clone)]
pub struct SiParams {
    /// Cavity decay rate, rad/s.
    pub kappa: f64,
    /// omega_ratio = kappa / omega.
    pub omega_ratio: f64,
    pub delta_c_per_kappa: f64,
    pub u0_per_kappa: f64,
    pub eta_per_kappa: f64,
    /// Mode waist in units of a_ho.
    pub delta_x: f64,
    /// Interaction strength in oscillator units.
    pub g_coll: f64,
    pub n_atoms: f64,
    pub barrier_offset: f64,
    /// Atomic mass, kg.
    pub mass_kg: f64,
}

impl SiParams {
    pub fn rubidium(kappa: f64, omega_ratio: f64) -> Self {
        Self {
            kappa,
            omega_ratio,
            delta_c_per_kappa: 1.0,
            u0_per_kappa: 0.01,
            eta_per_kappa: 0.0,
            delta_x: 0.5,
            g_coll: 0.0,
            n_atoms: 1.0e4,
            barrier_offset: 0.0,
            mass_kg: RB87_MASS_KG,
        }
    }
}

/// The scales fixed by hbar = m = omega = 1.
#[derive(Debug, Clone, Copy)]
pub struct UnitSystem {
    /// Trap frequency, rad/s.
    pub omega: f64,
    /// Atomic mass, kg.
    pub mass_kg: f64,
}

impl UnitSystem {
    /// Oscillator length a_ho in meters.
    pub fn length_m(&self) -> f64 {
        (HBAR_SI / (self.mass_kg * self.omega)).sqrt()
    }

    /// Time unit 1/omega in seconds.
    pub fn time_s(&self) -> f64 {
        1.0 / self.omega
    }

    /// Energy unit hbar*omega in joules.
    pub fn energy_j(&self) -> f64 {
        HBAR_SI * self.omega
    }

    pub fn rate_to_osc(&self, rate_si: f64) -> f64 {
        rate_si / self.omega
    }

    pub fn rate_to_si(&self, rate_osc: f64) -> f64 {
        rate_osc * self.omega
    }

    pub fn time_to_si(&self, t_osc: f64) -> f64 {
        t_osc / self.omega
    }
}

/// Convert laboratory inputs to oscillator units.
///
/// A rate given as c*kappa maps to c*omega_ratio; omega itself maps to 1.
pub fn to_oscillator_units(raw: &SiParams) -> Result<(ModelParams, UnitSystem)> {
    if !(raw.kappa > 0.0) {
        return Err(Error::InvalidParams(format!("kappa = {} <= 0", raw.kappa)));
    }
    if !(raw.omega_ratio > 0.0) {
        return Err(Error::InvalidParams(format!(
            "omega_ratio = {} <= 0",
            raw.omega_ratio
        )));
    }
    if !(raw.mass_kg > 0.0) {
        return Err(Error::InvalidParams("mass must be positive".into()));
    }
    let units = UnitSystem {
        omega: raw.kappa / raw.omega_ratio,
        mass_kg: raw.mass_kg,
    };
    let kappa = raw.omega_ratio;
    let params = ModelParams {
        kappa,
        delta_c: raw.delta_c_per_kappa * kappa,
        u0: raw.u0_per_kappa * kappa,
        eta: raw.eta_per_kappa * kappa,
        delta_x: raw.delta_x,
        g_coll: raw.g_coll,
        n_atoms: raw.n_atoms,
        barrier_offset: raw.barrier_offset,
    };
    params.validate()?;
    Ok((params, units))
}

/// Recover the laboratory-frame description from oscillator-unit parameters.
pub fn from_oscillator_units(p: &ModelParams, units: &UnitSystem) -> SiParams {
    SiParams {
        kappa: units.rate_to_si(p.kappa),
        omega_ratio: p.kappa,
        delta_c_per_kappa: p.delta_c / p.kappa,
        u0_per_kappa: p.u0 / p.kappa,
        eta_per_kappa: p.eta / p.kappa,
        delta_x: p.delta_x,
        g_coll: p.g_coll,
        n_atoms: p.n_atoms,
        barrier_offset: p.barrier_offset,
        mass_kg: units.mass_kg,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn esslinger_kappa() -> f64 {
        2.0 * PI * 1.3e6
    }

    #[test]
    fn kappa_maps_to_omega_ratio() {
        let raw = SiParams::rubidium(esslinger_kappa(), 500.0);
        let (p, _) = to_oscillator_units(&raw).unwrap();
        assert_eq!(p.kappa, 500.0);
        assert_eq!(p.delta_x, 0.5);
    }

    #[test]
    fn omega_maps_to_one() {
        let raw = SiParams::rubidium(esslinger_kappa(), 500.0);
        let (_, units) = to_oscillator_units(&raw).unwrap();
        assert_eq!(units.rate_to_osc(units.omega), 1.0);
    }

    #[test]
    fn dimensionless_time_100_is_about_6ms() {
        let raw = SiParams::rubidium(esslinger_kappa(), 500.0);
        let (_, units) = to_oscillator_units(&raw).unwrap();
        let t_si = units.time_to_si(100.0);
        // 100 / omega with omega = 2 pi 1.3 MHz / 500
        let expected = 100.0 * 500.0 / (2.0 * PI * 1.3e6);
        assert!((t_si - expected).abs() < 1e-18);
        assert!((t_si - 6.1e-3).abs() < 0.1e-3, "t_si = {t_si}");
    }

    #[test]
    fn fig10_waist_in_oscillator_lengths() {
        // 0.1 um against a_ho for Rb-87 at omega = kappa/500
        let raw = SiParams::rubidium(esslinger_kappa(), 500.0);
        let (_, units) = to_oscillator_units(&raw).unwrap();
        let waist = 0.1e-6 / units.length_m();
        assert!((waist - 0.4731).abs() < 5e-4, "waist = {waist}");
    }

    #[test]
    fn si_round_trip() {
        let mut raw = SiParams::rubidium(esslinger_kappa(), 500.0);
        raw.u0_per_kappa = 0.005;
        raw.eta_per_kappa = 25.0;
        raw.delta_c_per_kappa = 3.0;
        let (p, units) = to_oscillator_units(&raw).unwrap();
        let back = from_oscillator_units(&p, &units);
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1e-300);
        assert!(rel(back.kappa, raw.kappa) < 1e-12);
        assert!(rel(back.eta_per_kappa, raw.eta_per_kappa) < 1e-12);
        assert!(rel(back.u0_per_kappa, raw.u0_per_kappa) < 1e-12);
        assert!(rel(back.delta_c_per_kappa, raw.delta_c_per_kappa) < 1e-12);
    }

    #[test]
    fn rejects_nonpositive_rates() {
        let mut raw = SiParams::rubidium(esslinger_kappa(), 500.0);
        raw.kappa = -1.0;
        assert!(to_oscillator_units(&raw).is_err());
        let mut raw = SiParams::rubidium(esslinger_kappa(), 0.0);
        raw.omega_ratio = 0.0;
        assert!(to_oscillator_units(&raw).is_err());
    }

    #[test]
    fn density_scaling_preserves_barrier_product() {
        let p = ModelParams {
            kappa: 500.0,
            delta_c: 500.0,
            u0: 5.0,
            eta: 2500.0,
            delta_x: 0.5,
            g_coll: 0.0,
            n_atoms: 1.0e4,
            barrier_offset: 0.0,
        };
        for lambda in [2.0, 10.0] {
            let q = p.scaled_density(lambda);
            assert!((q.n_atoms * q.u0 - p.n_atoms * p.u0).abs() < 1e-9);
            assert!((q.eta * q.eta - lambda * p.eta * p.eta).abs() / (p.eta * p.eta) < 1e-12);
        }
    }
}
