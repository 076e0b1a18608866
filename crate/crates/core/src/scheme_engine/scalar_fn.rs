//! Univariate nonlinearities closed under differentiation.

use std::fmt;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::operator_algebra::{coef, coef_to_c64, Coef};

/// A scalar function `f(u)` with closed-form derivatives of every order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScalarFn {
    /// `Σ_j c_j u^j`.
    Poly(Vec<Coef>),
    /// `c · sin(a·u + q·π/2)`; `q = 1` gives a cosine.
    Trig { c: Coef, a: Rational64, quarter: u8 },
}

impl ScalarFn {
    pub fn poly(coeffs: Vec<Coef>) -> Self {
        let mut v = coeffs;
        while v.last().is_some_and(|c| c.is_zero()) {
            v.pop();
        }
        ScalarFn::Poly(v)
    }

    /// `c · u^n`.
    pub fn monomial(c: Coef, n: usize) -> Self {
        let mut v = vec![Coef::zero(); n + 1];
        v[n] = c;
        Self::poly(v)
    }

    pub fn identity() -> Self {
        Self::monomial(coef(1, 0), 1)
    }

    pub fn sin(a: Rational64) -> Self {
        ScalarFn::Trig { c: coef(1, 0), a, quarter: 0 }
    }

    pub fn cos(a: Rational64) -> Self {
        ScalarFn::Trig { c: coef(1, 0), a, quarter: 1 }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ScalarFn::Poly(v) => v.is_empty(),
            ScalarFn::Trig { c, .. } => c.is_zero(),
        }
    }

    /// `Some((a, b))` when `f(u) = a + b·u`.
    pub fn affine_parts(&self) -> Option<(Coef, Coef)> {
        match self {
            ScalarFn::Poly(v) if v.len() <= 2 => Some((
                v.first().copied().unwrap_or_else(Coef::zero),
                v.get(1).copied().unwrap_or_else(Coef::zero),
            )),
            _ => None,
        }
    }

    /// Constant value when `f` does not depend on `u`.
    pub fn constant_value(&self) -> Option<Coef> {
        match self {
            ScalarFn::Poly(v) if v.len() <= 1 => Some(v.first().copied().unwrap_or_else(Coef::zero)),
            _ => None,
        }
    }

    pub fn derivative(&self) -> ScalarFn {
        match self {
            ScalarFn::Poly(v) => {
                let d = v
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(j, c)| *c * coef(j as i64, 0))
                    .collect();
                ScalarFn::poly(d)
            }
            ScalarFn::Trig { c, a, quarter } => ScalarFn::Trig {
                c: *c * Coef::new(*a, Rational64::zero()),
                a: *a,
                quarter: (quarter + 1) % 4,
            },
        }
    }

    /// `f^{(n)}`.
    pub fn nth_derivative(&self, n: u32) -> ScalarFn {
        (0..n).fold(self.clone(), |f, _| f.derivative())
    }

    /// Largest `n` with `f^{(n)} ≠ 0`; `None` for an infinite family.
    pub fn max_nonzero_derivative(&self) -> Option<u32> {
        match self {
            ScalarFn::Poly(v) => Some(v.len().saturating_sub(1) as u32),
            ScalarFn::Trig { .. } => None,
        }
    }

    pub fn eval(&self, u: Complex64) -> Complex64 {
        match self {
            ScalarFn::Poly(v) => v
                .iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, c| acc * u + coef_to_c64(c)),
            ScalarFn::Trig { c, a, quarter } => {
                let a = a.to_f64().unwrap_or(f64::NAN);
                let x = u * a;
                let s = match quarter % 4 {
                    0 => x.sin(),
                    1 => x.cos(),
                    2 => -x.sin(),
                    _ => -x.cos(),
                };
                coef_to_c64(c) * s
            }
        }
    }
}

impl fmt::Display for ScalarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarFn::Poly(v) => {
                if v.is_empty() {
                    return write!(f, "0");
                }
                let mut parts = Vec::new();
                for (j, c) in v.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let cs = crate::operator_algebra::fmt_coef(c);
                    let mono = match j {
                        0 => cs,
                        1 => format!("{cs}·u"),
                        _ => format!("{cs}·u^{j}"),
                    };
                    parts.push(mono);
                }
                write!(f, "{}", parts.join(" + "))
            }
            ScalarFn::Trig { c, a, quarter } => {
                let base = if quarter % 2 == 0 { "sin" } else { "cos" };
                let sign = if quarter % 4 >= 2 { "-" } else { "" };
                write!(f, "{sign}{}·{base}({}·u)", crate::operator_algebra::fmt_coef(c), a)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_derivatives_terminate() {
        let f = ScalarFn::monomial(coef(0, -1), 2);
        assert_eq!(f.derivative(), ScalarFn::monomial(coef(0, -2), 1));
        assert_eq!(f.nth_derivative(2), ScalarFn::monomial(coef(0, -2), 0));
        assert!(f.nth_derivative(3).is_zero());
        assert_eq!(f.max_nonzero_derivative(), Some(2));
    }

    #[test]
    fn trig_derivatives_cycle() {
        let half = Rational64::new(1, 2);
        let s = ScalarFn::sin(half);
        let u = Complex64::new(0.7, 0.2);
        let h = 1e-6;
        let fd = (s.eval(u + h) - s.eval(u - h)) / (2.0 * h);
        assert!((s.derivative().eval(u) - fd).norm() < 1e-9);
        assert!((s.nth_derivative(4).eval(u) - s.eval(u) / 16.0).norm() < 1e-15);
    }
}
