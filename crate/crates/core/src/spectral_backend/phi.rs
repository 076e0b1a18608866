//! Filter functions `φ_j(σ) = ∫₀¹ t^{j−1}/(j−1)! e^{σt} dt`.
//!
//! `φ₁(σ) = (e^σ − 1)/σ` and `φ₂(σ) = (e^σ − φ₁(σ))/σ`, so that `φ₂(0) = 1/2`
//! and `σφ₂ + φ₁ = e^σ`. Each `φ_j` is the exact value of a monomial-weighted
//! exponential integral: `∫₀^τ ξ^{j−1} e^{ξa} dξ = (j−1)! τ^j φ_j(τa)`.

use num_complex::Complex64;

/// Radius below which the power series is used.
const SERIES_RADIUS: f64 = 1.0;
const SERIES_TERMS: usize = 32;

/// Evaluates `φ_j(σ)` for `j ≥ 1`.
pub fn phi(j: u32, sigma: Complex64) -> Complex64 {
    assert!(j >= 1, "φ_j is defined for j ≥ 1");
    if sigma.norm() < SERIES_RADIUS {
        return phi_series(j, sigma);
    }
    // φ_{j+1} = (e^σ/j! − φ_j)/σ
    let e = sigma.exp();
    let mut p = (e - 1.0) / sigma;
    let mut fact = 1.0;
    for i in 1..j {
        fact *= i as f64;
        p = (e / fact - p) / sigma;
    }
    p
}

/// `Σ_n σ^n / (n! (j−1)! (n+j))`.
fn phi_series(j: u32, sigma: Complex64) -> Complex64 {
    let jf = j as f64;
    let mut fact_j = 1.0;
    for i in 1..j {
        fact_j *= i as f64;
    }
    let mut term = Complex64::new(1.0 / fact_j, 0.0);
    let mut sum = term / jf;
    for n in 1..SERIES_TERMS {
        term = term * sigma / n as f64;
        let add = term / (n as f64 + jf);
        sum += add;
        if add.norm() <= 1e-18 * sum.norm() {
            break;
        }
    }
    sum
}
