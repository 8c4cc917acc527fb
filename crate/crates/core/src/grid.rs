//! Uniform spatial grid and its conjugate spectral grid.

use crate::error::{Error, Result};

/// 1-D periodic grid: x_j = -x_max + j * (2 x_max / n), j = 0..n-1,
/// with wavenumbers in the standard FFT ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    n: usize,
    x_max: f64,
    dx: f64,
    x: Vec<f64>,
    k: Vec<f64>,
}

impl Grid {
    /// Requires n_points a power of two >= 256, x_max >= 10 and spacing < 0.1.
    pub fn new(n_points: usize, x_max: f64) -> Result<Self> {
        if n_points < 256 || !n_points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n_points = {n_points} must be a power of two >= 256"
            )));
        }
        if !(x_max >= 10.0) {
            return Err(Error::InvalidGrid(format!("x_max = {x_max} must be >= 10")));
        }
        let dx = 2.0 * x_max / n_points as f64;
        if !(dx < 0.1) {
            return Err(Error::InvalidGrid(format!(
                "spacing {dx} must be below 0.1 a_ho"
            )));
        }
        let x: Vec<f64> = (0..n_points).map(|j| -x_max + j as f64 * dx).collect();
        let dk = std::f64::consts::PI / x_max;
        let k: Vec<f64> = (0..n_points)
            .map(|j| {
                let m = if j < n_points / 2 {
                    j as isize
                } else {
                    j as isize - n_points as isize
                };
                m as f64 * dk
            })
            .collect();
        Ok(Self {
            n: n_points,
            x_max,
            dx,
            x,
            k,
        })
    }

    /// Default production grid: 1024 points over [-12, 12).
    pub fn default_grid() -> Self {
        Self::new(1024, 12.0).expect("default grid parameters are valid")
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn spacing(&self) -> f64 {
        self.dx
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.k
    }

    /// Index of the x = 0 sample.
    pub fn center_index(&self) -> usize {
        self.n / 2
    }

    /// Index of the sample at -x_j under the periodic convention.
    pub fn mirror_index(&self, j: usize) -> usize {
        (self.n - j) % self.n
    }

    /// Quadrature of a sampled function over the full domain. On a uniform
    /// periodic grid the composite trapezoid rule reduces to dx * sum, which is
    /// spectrally accurate for integrands that decay inside the box.
    pub fn integrate(&self, values: impl IntoIterator<Item = f64>) -> f64 {
        values.into_iter().sum::<f64>() * self.dx
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_examples() {
        let g = Grid::new(1024, 12.0).unwrap();
        assert_eq!(g.spacing(), 24.0 / 1024.0);
        let g = Grid::new(512, 12.0).unwrap();
        assert_eq!(g.spacing(), 0.046875);
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert!(Grid::new(100, 12.0).is_err());
        assert!(Grid::new(1000, 12.0).is_err());
    }

    #[test]
    fn rejects_bad_extent() {
        assert!(Grid::new(1024, 9.0).is_err());
        // spacing 0.15 at (256, 20)
        assert!(Grid::new(256, 20.0).is_err());
    }

    #[test]
    fn grid_contains_origin_and_mirror_map() {
        let g = Grid::new(512, 12.0).unwrap();
        assert_eq!(g.x()[g.center_index()], 0.0);
        for j in 1..g.len() {
            assert_eq!(g.x()[g.mirror_index(j)], -g.x()[j]);
        }
        assert_eq!(g.mirror_index(0), 0);
    }

    #[test]
    fn wavenumber_ordering() {
        let g = Grid::new(256, 12.0).unwrap();
        let dk = std::f64::consts::PI / 12.0;
        assert_eq!(g.wavenumbers()[0], 0.0);
        assert!((g.wavenumbers()[1] - dk).abs() < 1e-15);
        assert!((g.wavenumbers()[255] + dk).abs() < 1e-15);
        assert!((g.wavenumbers()[128] + 128.0 * dk).abs() < 1e-12);
    }
}
