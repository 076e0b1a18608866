//! Seeded random initial data with prescribed Sobolev regularity.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::field::Field;
use super::grid::{Basis, Grid};

/// Excess decay beyond the `H^s` borderline.
pub const ROUGH_EPS: f64 = 0.01;

fn random_field(grid: &Arc<Grid>, seed: u64, amp: impl Fn(f64) -> f64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = grid.size();
    let ks = grid.wavenumbers();
    let mut c = vec![Complex64::new(0.0, 0.0); size];
    match grid.basis() {
        Basis::Periodic => {
            for j in 0..size {
                let theta: f64 = rng.gen_range(0.0..2.0 * PI);
                if j == grid.nyquist() {
                    continue;
                }
                c[j] = Complex64::from_polar(amp(ks[j].abs()), theta);
            }
        }
        Basis::Dirichlet => {
            // u = Σ b_k sin(kx) ⇒ c_{±k} = ∓ i b_k / 2
            for k in 1..grid.modes() {
                let theta: f64 = rng.gen_range(0.0..2.0 * PI);
                let b = Complex64::from_polar(amp(ks[k].abs()), theta);
                let half = Complex64::new(0.0, -0.5) * b;
                c[k] = half;
                c[size - k] = -half;
            }
        }
    }
    Field::from_spectral(grid.clone(), c)
}

/// Coefficients `(1+|k|)^{−(s+1/2+ε)} e^{iθ_k}`, normalised to `‖·‖_{H^s} = 1`.
pub fn rough_data(s: f64, seed: u64, grid: &Arc<Grid>) -> Field {
    let f = random_field(grid, seed, |k| (1.0 + k).powf(-(s + 0.5 + ROUGH_EPS)));
    let n = f.sobolev_norm(s);
    f.scale(Complex64::new(1.0 / n, 0.0))
}

/// Coefficients `e^{−|k|} e^{iθ_k}`, normalised to unit `L²` norm and scaled by `amplitude`.
pub fn smooth_data(seed: u64, grid: &Arc<Grid>, amplitude: f64) -> Field {
    let f = random_field(grid, seed, |k| (-k).exp());
    let n = f.l2_norm();
    f.scale(Complex64::new(amplitude / n, 0.0))
}

/// Real-valued variant of [`rough_data`]: `Re` of the complex draw, renormalised.
pub fn rough_real_data(s: f64, seed: u64, grid: &Arc<Grid>) -> Field {
    let f = rough_data(s, seed, grid).map(|z| Complex64::new(z.re, 0.0));
    let n = f.sobolev_norm(s);
    f.scale(Complex64::new(1.0 / n, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalised_and_deterministic() {
        let g = Grid::periodic(64).unwrap();
        let a = rough_data(1.0, 7, &g);
        let b = rough_data(1.0, 7, &g);
        assert!((a.sobolev_norm(1.0) - 1.0).abs() < 1e-10);
        assert_eq!(a.spectral().as_ref(), b.spectral().as_ref());
    }

    #[test]
    fn dirichlet_data_has_zero_trace() {
        let g = Grid::dirichlet(32).unwrap();
        let a = rough_data(1.0, 3, &g);
        let (l, r) = a.boundary_trace();
        assert!(l.norm() < 1e-13 && r.norm() < 1e-13);
    }
}
