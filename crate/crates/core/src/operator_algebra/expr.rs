//! Exact operator expressions over a small basis of Fourier-diagonal generators.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::{Complex, Complex64};
use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Exact complex-rational coefficient.
pub type Coef = Complex<Rational64>;

/// Builds `a + b·i` with integer parts.
pub fn coef(re: i64, im: i64) -> Coef {
    Complex::new(Rational64::from_integer(re), Rational64::from_integer(im))
}

/// Builds `(a + b·i) / d`.
pub fn coef_frac(re: i64, im: i64, den: i64) -> Coef {
    Complex::new(Rational64::new(re, den), Rational64::new(im, den))
}

/// Converts an exact coefficient to floating point.
pub fn coef_to_c64(c: &Coef) -> Complex64 {
    Complex64::new(
        c.re.to_f64().unwrap_or(f64::NAN),
        c.im.to_f64().unwrap_or(f64::NAN),
    )
}

fn cmp_coef(a: &Coef, b: &Coef) -> Ordering {
    a.re.cmp(&b.re).then_with(|| a.im.cmp(&b.im))
}

/// Operator generators. All are Fourier multipliers on the periodic or sine basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Generator {
    /// Identity (bounded, order 0).
    Identity,
    /// First derivative `∂_x` (order 1, periodic basis only).
    Dx,
    /// `⟨∇⟩_m = (−Δ + m²)^{1/2}` with the given mass (order 1). Mass 0 gives `|∇|`.
    Bracket(Rational64),
    /// Laplacian `Δ` (order 2).
    Laplacian,
}

impl Generator {
    /// Differential order used for domain comparisons.
    pub fn order(&self) -> u32 {
        match self {
            Generator::Identity => 0,
            Generator::Dx | Generator::Bracket(_) => 1,
            Generator::Laplacian => 2,
        }
    }

    /// Fourier symbol at wavenumber `k`.
    pub fn symbol(&self, k: f64) -> Complex64 {
        match self {
            Generator::Identity => Complex64::new(1.0, 0.0),
            Generator::Dx => Complex64::new(0.0, k),
            Generator::Bracket(m) => {
                let m = m.to_f64().unwrap_or(0.0);
                Complex64::new((k * k + m * m).sqrt(), 0.0)
            }
            Generator::Laplacian => Complex64::new(-k * k, 0.0),
        }
    }

    fn label(&self) -> String {
        match self {
            Generator::Identity => "Id".to_string(),
            Generator::Dx => "∂x".to_string(),
            Generator::Bracket(m) if m.is_zero() => "|∇|".to_string(),
            Generator::Bracket(m) => format!("⟨∇⟩_{}", m),
            Generator::Laplacian => "Δ".to_string(),
        }
    }
}

/// A finite combination `Σ c_g · g` of generators with exact coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OperatorExpr {
    terms: BTreeMap<Generator, Coef>,
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    generator: Generator,
    coef: Coef,
}

impl Serialize for OperatorExpr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<TermRepr> = self
            .terms
            .iter()
            .map(|(g, c)| TermRepr { generator: *g, coef: *c })
            .collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for OperatorExpr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<TermRepr>::deserialize(d)?;
        let mut e = OperatorExpr::zero();
        for t in v {
            e = e + OperatorExpr::term(t.generator, t.coef);
        }
        Ok(e)
    }
}

impl OperatorExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `c · g`.
    pub fn term(g: Generator, c: Coef) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(g, c);
        }
        Self { terms }
    }

    pub fn identity() -> Self {
        Self::term(Generator::Identity, Coef::one())
    }

    pub fn laplacian() -> Self {
        Self::term(Generator::Laplacian, Coef::one())
    }

    pub fn dx() -> Self {
        Self::term(Generator::Dx, Coef::one())
    }

    /// `⟨∇⟩_m` with rational mass `m`.
    pub fn bracket(mass: Rational64) -> Self {
        Self::term(Generator::Bracket(mass), Coef::one())
    }

    /// `|∇| = ⟨∇⟩_0`.
    pub fn abs_grad() -> Self {
        Self::bracket(Rational64::zero())
    }

    pub fn scale(&self, c: Coef) -> Self {
        let mut out = Self::zero();
        for (g, a) in &self.terms {
            out = out + Self::term(*g, *a * c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Generator, &Coef)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, g: &Generator) -> Coef {
        self.terms.get(g).copied().unwrap_or_else(Coef::zero)
    }

    /// Largest generator order with a nonzero coefficient; 0 for the zero operator.
    pub fn domain_order(&self) -> u32 {
        self.terms.keys().map(|g| g.order()).max().unwrap_or(0)
    }

    /// The part made of top-order generators.
    pub fn top_part(&self) -> Self {
        let d = self.domain_order();
        let terms = self
            .terms
            .iter()
            .filter(|(g, _)| g.order() == d)
            .map(|(g, c)| (*g, *c))
            .collect();
        Self { terms }
    }

    /// The top-order generators present.
    pub fn top_support(&self) -> Vec<Generator> {
        self.top_part().terms.keys().copied().collect()
    }

    /// Returns `Some(rest)` when `self = dominant + rest` with
    /// `domain_order(dominant) > domain_order(rest)`.
    pub fn split_off(&self, dominant: &OperatorExpr) -> Option<OperatorExpr> {
        if dominant.is_zero() {
            return None;
        }
        let rest = self.clone() - dominant.clone();
        if rest.domain_order() < dominant.domain_order()
            && dominant.top_part() == *dominant
        {
            Some(rest)
        } else {
            None
        }
    }

    /// Fourier symbol at wavenumber `k`.
    pub fn symbol(&self, k: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|(g, c)| coef_to_c64(c) * g.symbol(k))
            .sum()
    }

    /// Exact symbol at `k = 0`.
    pub fn symbol_at_zero(&self) -> Coef {
        self.terms
            .iter()
            .map(|(g, c)| match g {
                Generator::Identity => *c,
                Generator::Bracket(m) => *c * Coef::new(m.abs(), Rational64::zero()),
                Generator::Dx | Generator::Laplacian => Coef::zero(),
            })
            .fold(Coef::zero(), |a, b| a + b)
    }

    /// Whether the expression contains `∂_x`.
    pub fn uses_dx(&self) -> bool {
        self.terms.contains_key(&Generator::Dx)
    }

    /// True when the symbol is purely imaginary for every `k` (generates a unitary group).
    pub fn is_skew(&self) -> bool {
        self.terms.iter().all(|(g, c)| match g {
            Generator::Dx => c.im.is_zero(),
            _ => c.re.is_zero(),
        })
    }
}

impl PartialOrd for OperatorExpr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OperatorExpr {
    fn cmp(&self, other: &Self) -> Ordering {
        let a: Vec<_> = self.terms.iter().collect();
        let b: Vec<_> = other.terms.iter().collect();
        for ((ga, ca), (gb, cb)) in a.iter().zip(b.iter()) {
            let o = ga.cmp(gb).then_with(|| cmp_coef(ca, cb));
            if o != Ordering::Equal {
                return o;
            }
        }
        a.len().cmp(&b.len())
    }
}

impl Add for OperatorExpr {
    type Output = OperatorExpr;
    fn add(mut self, rhs: OperatorExpr) -> OperatorExpr {
        for (g, c) in rhs.terms {
            let e = self.terms.entry(g).or_insert_with(Coef::zero);
            *e = *e + c;
            if e.is_zero() {
                self.terms.remove(&g);
            }
        }
        self
    }
}

impl Neg for OperatorExpr {
    type Output = OperatorExpr;
    fn neg(self) -> OperatorExpr {
        self.scale(-Coef::one())
    }
}

impl Sub for OperatorExpr {
    type Output = OperatorExpr;
    fn sub(self, rhs: OperatorExpr) -> OperatorExpr {
        self + (-rhs)
    }
}

impl Mul<OperatorExpr> for Coef {
    type Output = OperatorExpr;
    fn mul(self, rhs: OperatorExpr) -> OperatorExpr {
        rhs.scale(self)
    }
}

fn fmt_rational(r: &Rational64) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn fmt_coef(c: &Coef) -> String {
    let one = Rational64::one();
    match (c.re.is_zero(), c.im.is_zero()) {
        (true, true) => "0".into(),
        (false, true) => fmt_rational(&c.re),
        (true, false) => {
            if c.im == one {
                "i".into()
            } else if c.im == -one {
                "-i".into()
            } else {
                format!("{}*i", fmt_rational(&c.im))
            }
        }
        (false, false) => {
            let sign = if c.im.is_negative() { "-" } else { "+" };
            format!("({}{}{}*i)", fmt_rational(&c.re), sign, fmt_rational(&c.im.abs()))
        }
    }
}

impl fmt::Display for OperatorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (g, c) in self.terms.iter().rev() {
            let cs = fmt_coef(c);
            let piece = match cs.as_str() {
                "1" => g.label(),
                "-1" => format!("-{}", g.label()),
                _ => format!("{}*{}", cs, g.label()),
            };
            if first {
                write!(f, "{}", piece)?;
                first = false;
            } else if let Some(stripped) = piece.strip_prefix('-') {
                write!(f, " - {}", stripped)?;
            } else {
                write!(f, " + {}", piece)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn i_lap() -> OperatorExpr {
        OperatorExpr::laplacian().scale(coef(0, 1))
    }

    #[test]
    fn orders_and_top_part() {
        let e = i_lap() + OperatorExpr::dx() + OperatorExpr::identity();
        assert_eq!(e.domain_order(), 2);
        assert_eq!(e.top_part(), i_lap());
        assert_eq!(OperatorExpr::zero().domain_order(), 0);
    }

    #[test]
    fn cancellation_prunes() {
        let e = i_lap() - i_lap();
        assert!(e.is_zero());
    }

    #[test]
    fn pretty_print() {
        assert_eq!(i_lap().scale(coef(-2, 0)).to_string(), "-2*i*Δ");
        assert_eq!(OperatorExpr::zero().to_string(), "0");
    }

    #[test]
    fn split_requires_strict_dominance() {
        let e = i_lap() + OperatorExpr::dx();
        assert_eq!(e.split_off(&i_lap()), Some(OperatorExpr::dx()));
        assert_eq!(OperatorExpr::dx().split_off(&OperatorExpr::dx()), Some(OperatorExpr::zero()));
        assert_eq!(OperatorExpr::identity().split_off(&OperatorExpr::identity()), None);
    }

    #[test]
    fn json_round_trip() {
        let e = i_lap() + OperatorExpr::bracket(Rational64::new(1, 2));
        let s = serde_json::to_string(&e).unwrap();
        let back: OperatorExpr = serde_json::from_str(&s).unwrap();
        assert_eq!(back, e);
    }
}
