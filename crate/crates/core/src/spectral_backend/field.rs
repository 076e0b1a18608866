//! Complex grid functions with lazily converted physical and spectral representations.

use std::borrow::Cow;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use super::grid::{Basis, Grid};
use super::phi::phi;
use crate::error::{Error, Result};
use crate::operator_algebra::OperatorExpr;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Space {
    Physical,
    Spectral,
}

/// Reflection parity used to embed a function on `(0, L)` into the Dirichlet grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    /// Solutions: vanish on the boundary.
    Odd,
    /// Potentials and other multiplicative coefficients.
    Even,
}

/// A sampled complex function on a [`Grid`].
#[derive(Clone, Debug)]
pub struct Field {
    grid: Arc<Grid>,
    data: Vec<Complex64>,
    space: Space,
}

impl Field {
    pub fn from_physical(grid: Arc<Grid>, data: Vec<Complex64>) -> Field {
        assert_eq!(data.len(), grid.size(), "field length must match grid size");
        Field { grid, data, space: Space::Physical }
    }

    pub fn from_spectral(grid: Arc<Grid>, data: Vec<Complex64>) -> Field {
        assert_eq!(data.len(), grid.size(), "field length must match grid size");
        Field { grid, data, space: Space::Spectral }
    }

    pub fn zeros(grid: &Arc<Grid>) -> Field {
        Field::from_spectral(grid.clone(), vec![Complex64::new(0.0, 0.0); grid.size()])
    }

    pub fn constant(grid: &Arc<Grid>, c: Complex64) -> Field {
        Field::from_physical(grid.clone(), vec![c; grid.size()])
    }

    /// Samples `f` at every stored grid point.
    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(f64) -> Complex64) -> Field {
        let data = grid.points().into_iter().map(f).collect();
        Field::from_physical(grid.clone(), data)
    }

    /// Samples `f` on `[0, L]` and reflects it with the given parity onto `[L, 2L)`.
    /// On periodic grids this is the same as [`Field::from_fn`].
    pub fn from_fn_reflected(grid: &Arc<Grid>, parity: Parity, f: impl Fn(f64) -> Complex64) -> Field {
        if grid.basis() == Basis::Periodic {
            return Field::from_fn(grid, f);
        }
        let n = grid.modes();
        let pts = grid.points();
        let mut data = vec![Complex64::new(0.0, 0.0); grid.size()];
        for j in 0..=n {
            data[j] = f(pts[j]);
        }
        if parity == Parity::Odd {
            data[0] = Complex64::new(0.0, 0.0);
            data[n] = Complex64::new(0.0, 0.0);
        }
        for j in 1..n {
            data[2 * n - j] = match parity {
                Parity::Odd => -data[j],
                Parity::Even => data[j],
            };
        }
        Field::from_physical(grid.clone(), data)
    }

    /// `c · e^{ikx}` on a periodic grid, `c · sin(kx)` on a Dirichlet grid.
    pub fn single_mode(grid: &Arc<Grid>, k: i64, c: Complex64) -> Field {
        let mut data = vec![Complex64::new(0.0, 0.0); grid.size()];
        let s = grid.size() as i64;
        let idx = |w: i64| ((w % s + s) % s) as usize;
        match grid.basis() {
            Basis::Periodic => data[idx(k)] = c,
            Basis::Dirichlet => {
                let half = Complex64::new(0.0, -0.5) * c;
                data[idx(k)] = half;
                data[idx(-k)] = -half;
            }
        }
        Field::from_spectral(grid.clone(), data)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Physical samples (transforming if needed).
    pub fn physical(&self) -> Cow<'_, [Complex64]> {
        match self.space {
            Space::Physical => Cow::Borrowed(&self.data),
            Space::Spectral => {
                let mut d = self.data.clone();
                self.grid.inverse(&mut d);
                Cow::Owned(d)
            }
        }
    }

    /// Fourier coefficients in FFT order (transforming if needed).
    pub fn spectral(&self) -> Cow<'_, [Complex64]> {
        match self.space {
            Space::Spectral => Cow::Borrowed(&self.data),
            Space::Physical => {
                let mut d = self.data.clone();
                self.grid.forward(&mut d);
                Cow::Owned(d)
            }
        }
    }

    pub fn into_physical(mut self) -> Field {
        if self.space == Space::Spectral {
            self.grid.inverse(&mut self.data);
            self.space = Space::Physical;
        }
        self
    }

    pub fn into_spectral(mut self) -> Field {
        if self.space == Space::Physical {
            self.grid.forward(&mut self.data);
            self.space = Space::Spectral;
        }
        self
    }

    /// Sine coefficients `b_k` with `u = Σ b_k sin(kx)` (Dirichlet grids only).
    pub fn sine_coefficients(&self) -> Result<Vec<Complex64>> {
        if self.grid.basis() != Basis::Dirichlet {
            return Err(Error::Usage("sine coefficients need a Dirichlet grid".into()));
        }
        let c = self.spectral();
        Ok((1..self.grid.modes()).map(|k| Complex64::new(0.0, 2.0) * c[k]).collect())
    }

    fn check_grid(&self, other: &Field) {
        assert!(self.grid.same_as(&other.grid), "fields live on different grids");
    }

    fn zip_with(&self, other: &Field, f: impl Fn(Complex64, Complex64) -> Complex64, space: Space) -> Field {
        self.check_grid(other);
        let (a, b) = match space {
            Space::Physical => (self.physical(), other.physical()),
            Space::Spectral => (self.spectral(), other.spectral()),
        };
        let data = a.iter().zip(b.iter()).map(|(x, y)| f(*x, *y)).collect();
        Field { grid: self.grid.clone(), data, space }
    }

    pub fn add(&self, other: &Field) -> Field {
        self.zip_with(other, |a, b| a + b, self.space)
    }

    pub fn sub(&self, other: &Field) -> Field {
        self.zip_with(other, |a, b| a - b, self.space)
    }

    /// Pointwise (collocation) product.
    pub fn mul(&self, other: &Field) -> Field {
        self.zip_with(other, |a, b| a * b, Space::Physical)
    }

    pub fn scale(&self, c: Complex64) -> Field {
        let data = self.data.iter().map(|x| x * c).collect();
        Field { grid: self.grid.clone(), data, space: self.space }
    }

    pub fn add_assign_scaled(&mut self, other: &Field, c: Complex64) {
        self.check_grid(other);
        let b = match self.space {
            Space::Physical => other.physical(),
            Space::Spectral => other.spectral(),
        };
        for (x, y) in self.data.iter_mut().zip(b.iter()) {
            *x += c * y;
        }
    }

    pub fn conj(&self) -> Field {
        let data = self.physical().iter().map(|x| x.conj()).collect();
        Field { grid: self.grid.clone(), data, space: Space::Physical }
    }

    /// Pointwise map in physical space.
    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Field {
        let data = self.physical().iter().map(|x| f(*x)).collect();
        Field { grid: self.grid.clone(), data, space: Space::Physical }
    }

    /// Multiplies coefficient `j` by `symbol(k_j)`; the Nyquist coefficient uses
    /// an even extension of the symbol so that real fields stay real.
    pub fn apply_symbol(&self, symbol: impl Fn(f64) -> Complex64) -> Field {
        let mut out = self.spectral().into_owned();
        let ks = self.grid.wavenumbers();
        let ny = self.grid.nyquist();
        for (j, c) in out.iter_mut().enumerate() {
            let s = if j == ny {
                let k = ks[j].abs();
                0.5 * (symbol(k) + symbol(-k))
            } else {
                symbol(ks[j])
            };
            *c *= s;
        }
        Field { grid: self.grid.clone(), data: out, space: Space::Spectral }
    }

    /// Multiplies by precomputed per-coefficient weights.
    pub fn apply_weights(&self, w: &[Complex64]) -> Field {
        assert_eq!(w.len(), self.len());
        let mut out = self.spectral().into_owned();
        for (c, s) in out.iter_mut().zip(w) {
            *c *= s;
        }
        Field { grid: self.grid.clone(), data: out, space: Space::Spectral }
    }

    fn check_resolvable(&self, expr: &OperatorExpr) -> Result<()> {
        if self.grid.basis() == Basis::Dirichlet && expr.uses_dx() {
            return Err(Error::Unsupported("∂x breaks parity on the sine basis".into()));
        }
        Ok(())
    }

    /// Applies an operator expression as a Fourier multiplier.
    pub fn apply_operator(&self, expr: &OperatorExpr) -> Result<Field> {
        self.check_resolvable(expr)?;
        Ok(self.apply_symbol(|k| expr.symbol(k)))
    }

    /// Applies `e^{t·expr}`.
    pub fn semigroup(&self, expr: &OperatorExpr, t: f64) -> Result<Field> {
        self.check_resolvable(expr)?;
        if t < 0.0 && !expr.is_skew() {
            return Err(Error::Usage(format!(
                "backward flow e^{{{t}·({expr})}} of a dissipative operator is undefined"
            )));
        }
        Ok(self.apply_symbol(|k| (t * expr.symbol(k)).exp()))
    }

    /// Applies `φ_j(τ·expr)`.
    pub fn phi_filter(&self, j: u32, expr: &OperatorExpr, tau: f64) -> Result<Field> {
        self.check_resolvable(expr)?;
        if j == 0 {
            return Err(Error::Usage("φ-filters are indexed from 1".into()));
        }
        Ok(self.apply_symbol(|k| phi(j, tau * expr.symbol(k))))
    }

    /// `‖f‖²_{H^s} = L · Σ (1+k²)^s |c_k|²`, so that `s = 0` is the true `L²` norm.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        let c = self.spectral();
        let sum: f64 = c
            .iter()
            .zip(self.grid.wavenumbers())
            .map(|(c, k)| (1.0 + k * k).powf(s) * c.norm_sqr())
            .sum();
        (self.grid.length() * sum).sqrt()
    }

    pub fn l2_norm(&self) -> f64 {
        self.sobolev_norm(0.0)
    }

    /// Largest absolute physical sample.
    pub fn max_abs(&self) -> f64 {
        self.physical().iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// Zeroes coefficients outside the 2/3 band.
    pub fn truncate_two_thirds(&self) -> Field {
        let mask = self.grid.two_thirds_mask();
        let mut out = self.spectral().into_owned();
        for (c, keep) in out.iter_mut().zip(mask) {
            if !keep {
                *c = Complex64::new(0.0, 0.0);
            }
        }
        Field { grid: self.grid.clone(), data: out, space: Space::Spectral }
    }

    /// Boundary samples `u(0)` and `u(L)` (Dirichlet grids).
    pub fn boundary_trace(&self) -> (Complex64, Complex64) {
        let p = self.physical();
        let n = self.grid.modes();
        (p[0], p[n.min(p.len() - 1)])
    }

    /// Snapshot rows `(x, Re u, Im u)` on the physical domain.
    pub fn snapshot(&self) -> Vec<SnapshotRow> {
        let p = self.physical();
        let pts = self.grid.points();
        let count = match self.grid.basis() {
            Basis::Periodic => p.len(),
            Basis::Dirichlet => self.grid.modes() + 1,
        };
        (0..count)
            .map(|j| SnapshotRow { x: pts[j], re: p[j].re, im: p[j].im })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SnapshotRow {
    pub x: f64,
    pub re: f64,
    pub im: f64,
}

/// Exact product of band-limited fields, computed on a zero-padded grid and
/// truncated back to the stored modes.
pub fn dealiased_product(fields: &[&Field]) -> Field {
    assert!(!fields.is_empty());
    let grid = fields[0].grid().clone();
    let m = grid.size();
    let p = fields.len();
    let big = ((p + 1) * m / 2).next_power_of_two();
    let mut planner = rustfft::FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(big);
    let inv = planner.plan_fft_inverse(big);
    let half = m / 2;
    let mut acc = vec![Complex64::new(1.0, 0.0); big];
    for f in fields {
        assert!(f.grid().same_as(&grid));
        let c = f.spectral();
        let mut pad = vec![Complex64::new(0.0, 0.0); big];
        for j in 0..m {
            if j == half {
                continue;
            }
            let dst = if j < half { j } else { big - (m - j) };
            pad[dst] = c[j];
        }
        inv.process(&mut pad);
        for (a, v) in acc.iter_mut().zip(pad) {
            *a *= v;
        }
    }
    fwd.process(&mut acc);
    let s = 1.0 / big as f64;
    let mut out = vec![Complex64::new(0.0, 0.0); m];
    for (j, o) in out.iter_mut().enumerate() {
        if j == half {
            continue;
        }
        let src = if j < half { j } else { big - (m - j) };
        *o = acc[src] * s;
    }
    Field::from_spectral(grid, out)
}

impl std::ops::Add for &Field {
    type Output = Field;
    fn add(self, rhs: &Field) -> Field {
        Field::add(self, rhs)
    }
}

impl std::ops::Sub for &Field {
    type Output = Field;
    fn sub(self, rhs: &Field) -> Field {
        Field::sub(self, rhs)
    }
}

impl std::ops::Mul for &Field {
    type Output = Field;
    fn mul(self, rhs: &Field) -> Field {
        Field::mul(self, rhs)
    }
}
