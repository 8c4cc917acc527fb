//! Complex order parameter sampled on a [`Grid`].

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Normalized condensate wavefunction. The discrete norm
/// sum |psi_j|^2 dx is kept at 1 by every public constructor.
#[derive(Debug, Clone)]
pub struct OrderParameter {
    grid: Arc<Grid>,
    values: Vec<Complex64>,
}

impl OrderParameter {
    /// Wrap raw samples; does not normalize.
    pub fn from_values(grid: Arc<Grid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "value count {} does not match grid size {}",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    /// Sample a function of x; does not normalize.
    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.x().iter().map(|&x| f(x)).collect();
        Self { grid, values }
    }

    /// Normalized Gaussian exp(-(x - center)^2 / (2 width^2)).
    pub fn gaussian(grid: Arc<Grid>, center: f64, width: f64) -> Result<Self> {
        if !(width > 0.0) {
            return Err(Error::InvalidParams(format!("width = {width} <= 0")));
        }
        Self::from_fn(grid, |x| {
            Complex64::new((-(x - center).powi(2) / (2.0 * width * width)).exp(), 0.0)
        })
        .normalize()
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn norm_sq(&self) -> f64 {
        self.grid
            .integrate(self.values.iter().map(|v| v.norm_sqr()))
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Rescale to unit discrete norm. Fails on (numerically) zero input.
    pub fn normalize(mut self) -> Result<Self> {
        let n = self.norm();
        if !(n > 1e-150) || !n.is_finite() {
            return Err(Error::ZeroNorm);
        }
        let inv = 1.0 / n;
        for v in &mut self.values {
            *v *= inv;
        }
        Ok(self)
    }

    pub fn check_normalized(&self, tol: f64) -> Result<()> {
        let dev = (self.norm() - 1.0).abs();
        if dev > tol {
            return Err(Error::NotNormalized(dev));
        }
        Ok(())
    }

    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    /// psi(-x) under the periodic index convention.
    pub fn mirrored(&self) -> Self {
        let n = self.grid.len();
        let values = (0..n)
            .map(|j| self.values[self.grid.mirror_index(j)])
            .collect();
        Self {
            grid: Arc::clone(&self.grid),
            values,
        }
    }

    /// <self|other> with the grid measure.
    pub fn overlap(&self, other: &Self) -> Complex64 {
        let s: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum();
        s * self.grid.spacing()
    }

    /// True if the density has a local minimum at the grid center.
    pub fn double_peaked(&self) -> bool {
        let rho = self.density();
        let c = self.grid.center_index();
        rho[c] < rho[c - 2] && rho[c] < rho[c + 2]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid() -> Arc<Grid> {
        Arc::new(Grid::new(1024, 12.0).unwrap())
    }

    #[test]
    fn constant_normalizes_to_inverse_sqrt_length() {
        let g = grid();
        let l = 2.0 * g.x_max();
        let psi = OrderParameter::from_fn(Arc::clone(&g), |_| Complex64::new(2.0, 0.0))
            .normalize()
            .unwrap();
        for v in psi.values() {
            assert!((v.re - 1.0 / l.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn normalize_is_idempotent() {
        let g = grid();
        let psi = OrderParameter::gaussian(g, 0.3, 0.9).unwrap();
        let again = psi.clone().normalize().unwrap();
        for (a, b) in psi.values().iter().zip(again.values()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn gaussian_matches_analytic_ground_state() {
        let g = grid();
        let psi = OrderParameter::gaussian(Arc::clone(&g), 0.0, 1.0).unwrap();
        let c = std::f64::consts::PI.powf(-0.25);
        for (v, &x) in psi.values().iter().zip(g.x()) {
            let expected = c * (-x * x / 2.0).exp();
            assert!((v.re - expected).abs() < 1e-8, "x = {x}");
        }
    }

    #[test]
    fn zero_input_is_rejected() {
        let g = grid();
        let psi = OrderParameter::from_fn(g, |_| Complex64::new(0.0, 0.0));
        assert!(matches!(psi.normalize(), Err(Error::ZeroNorm)));
    }

    #[test]
    fn mirror_is_an_involution() {
        let g = grid();
        let psi = OrderParameter::gaussian(g, 1.3, 0.7).unwrap();
        let back = psi.mirrored().mirrored();
        for (a, b) in psi.values().iter().zip(back.values()) {
            assert_eq!(a, b);
        }
    }

    proptest! {
        // normalize(c psi) equals normalize(psi) up to the global phase of c.
        #[test]
        fn normalize_scale_invariant(re in -3.0f64..3.0, im in -3.0f64..3.0) {
            prop_assume!((re * re + im * im).sqrt() > 1e-3);
            let c = Complex64::new(re, im);
            let g = grid();
            let base = OrderParameter::gaussian(Arc::clone(&g), 0.5, 1.1).unwrap();
            let scaled = OrderParameter::from_values(
                Arc::clone(&g),
                base.values().iter().map(|v| v * c).collect(),
            )
            .unwrap()
            .normalize()
            .unwrap();
            let phase = c / c.norm();
            for (a, b) in scaled.values().iter().zip(base.values()) {
                prop_assert!((a - b * phase).norm() < 1e-12);
            }
        }
    }
}
