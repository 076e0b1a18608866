//! One-dimensional spectral grids and their FFT plans.
//!
//! The Dirichlet basis is realised by odd reflection of `(0, L)` onto a periodic
//! grid of period `2L`, so sine series and the periodic machinery share one FFT.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Periodic,
    Dirichlet,
}

impl std::str::FromStr for Basis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "periodic" => Ok(Basis::Periodic),
            "dirichlet" => Ok(Basis::Dirichlet),
            other => Err(Error::Usage(format!("unknown basis '{other}'"))),
        }
    }
}

/// An immutable grid with precomputed wavenumbers and FFT plans.
pub struct Grid {
    basis: Basis,
    modes: usize,
    size: usize,
    length: f64,
    dealias: bool,
    k: Vec<f64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("basis", &self.basis)
            .field("modes", &self.modes)
            .field("length", &self.length)
            .field("dealias", &self.dealias)
            .finish()
    }
}

impl Grid {
    /// Periodic grid with `n` points on `[0, 2π)`.
    pub fn periodic(n: usize) -> Result<Arc<Grid>> {
        Self::build(Basis::Periodic, n, 2.0 * PI, false)
    }

    /// Sine basis on `(0, π)` with `n − 1` interior points.
    pub fn dirichlet(n: usize) -> Result<Arc<Grid>> {
        Self::build(Basis::Dirichlet, n, PI, false)
    }

    pub fn new(basis: Basis, n: usize, length: f64, dealias: bool) -> Result<Arc<Grid>> {
        Self::build(basis, n, length, dealias)
    }

    /// Default-length grid for the basis.
    pub fn with_basis(basis: Basis, n: usize) -> Result<Arc<Grid>> {
        match basis {
            Basis::Periodic => Self::periodic(n),
            Basis::Dirichlet => Self::dirichlet(n),
        }
    }

    fn build(basis: Basis, n: usize, length: f64, dealias: bool) -> Result<Arc<Grid>> {
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::Usage(format!("grid size {n} must be a power of two ≥ 4")));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::Usage(format!("grid length {length} must be positive")));
        }
        let size = match basis {
            Basis::Periodic => n,
            Basis::Dirichlet => 2 * n,
        };
        let period = match basis {
            Basis::Periodic => length,
            Basis::Dirichlet => 2.0 * length,
        };
        let k = (0..size)
            .map(|j| {
                let j = j as i64;
                let s = size as i64;
                let w = if j < s / 2 { j } else { j - s };
                2.0 * PI * w as f64 / period
            })
            .collect();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(size);
        let inv = planner.plan_fft_inverse(size);
        Ok(Arc::new(Grid { basis, modes: n, size, length, dealias, k, fwd, inv }))
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    /// Number of modes requested at construction.
    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Number of stored samples (doubled for the reflected Dirichlet grid).
    pub fn size(&self) -> usize {
        self.size
    }

    /// Physical domain length.
    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dealias(&self) -> bool {
        self.dealias
    }

    /// Wavenumber of each stored coefficient, in FFT order.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.k
    }

    /// Index of the unpaired Nyquist coefficient.
    pub fn nyquist(&self) -> usize {
        self.size / 2
    }

    /// Sample positions of the stored grid.
    pub fn points(&self) -> Vec<f64> {
        let h = match self.basis {
            Basis::Periodic => self.length / self.size as f64,
            Basis::Dirichlet => self.length / self.modes as f64,
        };
        (0..self.size).map(|j| j as f64 * h).collect()
    }

    /// Physical-to-coefficient transform with `c_k = (1/N) Σ u_j e^{−ikx_j}`.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.fwd.process(data);
        let s = 1.0 / self.size as f64;
        for c in data.iter_mut() {
            *c *= s;
        }
    }

    /// Coefficient-to-physical transform, inverse of [`Grid::forward`].
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.inv.process(data);
    }

    /// 2/3-rule mask: true for retained coefficients.
    pub fn two_thirds_mask(&self) -> Vec<bool> {
        let kmax = (self.size / 2) as f64;
        let scale = self.k[1];
        self.k
            .iter()
            .map(|k| (k / scale).abs() < 2.0 * kmax / 3.0)
            .collect()
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        self.basis == other.basis && self.size == other.size && self.length == other.length
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_power_of_two() {
        assert!(Grid::periodic(48).is_err());
        assert!(Grid::periodic(64).is_ok());
    }

    #[test]
    fn wavenumbers_are_integers_on_default_torus() {
        let g = Grid::periodic(8).unwrap();
        assert_eq!(g.wavenumbers(), &[0.0, 1.0, 2.0, 3.0, -4.0, -3.0, -2.0, -1.0]);
        let d = Grid::dirichlet(8).unwrap();
        assert_eq!(d.size(), 16);
        assert_eq!(d.wavenumbers()[3], 3.0);
    }
}
