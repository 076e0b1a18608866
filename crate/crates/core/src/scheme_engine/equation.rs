//! Equation data: components, linear parts and factorised nonlinearities.
//!
//! A system `∂_t u_o − L_o u_o = Σ_𝔩 ℬ_{o,𝔩} ∏_{ô} f^𝔩_{o,ô}(u_ô) · V_𝔩`
//! is described by one [`Component`] per label `o` and one [`Interaction`]
//! per pair `(o, 𝔩)`.

use num_rational::Rational64;
use serde::Serialize;

use super::scalar_fn::ScalarFn;
use super::term::{MultFactor, Multiplier};
use crate::error::{Error, Result};
use crate::operator_algebra::{coef, Coef, OperatorExpr};
use crate::spectral_backend::Field;
use crate::tree_core::{MinusLabel, PlusLabel};

use std::collections::BTreeMap;

#[derive(Clone, Debug, Serialize)]
pub struct Component {
    pub label: PlusLabel,
    pub op: OperatorExpr,
    /// The component carrying the complex conjugate.
    pub conjugate: PlusLabel,
}

#[derive(Clone, Debug, Serialize)]
pub struct Interaction {
    pub component: PlusLabel,
    pub driver: MinusLabel,
    /// Outer multiplier `ℬ_{o,𝔩}`.
    pub outer: Multiplier,
    /// Input name of `V_𝔩`; `None` for `V_𝔩 = 1`.
    pub potential: Option<String>,
    /// `ô ↦ f^𝔩_{o,ô}`, in a fixed order.
    pub factors: Vec<(PlusLabel, ScalarFn)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EquationKind {
    Gp,
    Nls,
    Sg,
}

impl std::str::FromStr for EquationKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gp" => Ok(EquationKind::Gp),
            "nls" => Ok(EquationKind::Nls),
            "sg" => Ok(EquationKind::Sg),
            other => Err(Error::Validation(format!("unknown equation `{other}` (expected gp, nls or sg)"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EquationSpec {
    pub kind: EquationKind,
    pub components: Vec<Component>,
    pub interactions: Vec<Interaction>,
    /// Mass in `⟨∇⟩_m`, for equations that use it.
    pub mass: Option<Rational64>,
}

pub const O: &str = "o";
pub const O_BAR: &str = "ō";
pub const POTENTIAL: &str = "V";
pub const POTENTIAL_BAR: &str = "V̄";

fn lab(s: &str) -> PlusLabel {
    PlusLabel::new(s)
}

fn i_laplacian(sign: i64) -> OperatorExpr {
    OperatorExpr::laplacian().scale(coef(0, sign))
}

fn pair(o: (&str, OperatorExpr), ob: (&str, OperatorExpr)) -> Vec<Component> {
    vec![
        Component { label: lab(o.0), op: o.1, conjugate: lab(ob.0) },
        Component { label: lab(ob.0), op: ob.1, conjugate: lab(o.0) },
    ]
}

impl EquationSpec {
    /// Cubic Schrödinger with potential: `i∂_t u = −Δu + |u|²u + V u`.
    pub fn gp() -> Self {
        let sq = |c: Coef| ScalarFn::monomial(c, 2);
        let lin = |c: Coef| ScalarFn::monomial(c, 1);
        let id = ScalarFn::identity;
        let unit = Multiplier::scalar(coef(1, 0));
        let interactions = vec![
            Interaction {
                component: lab(O),
                driver: MinusLabel(0),
                outer: unit.clone(),
                potential: None,
                factors: vec![(lab(O), sq(coef(0, -1))), (lab(O_BAR), id())],
            },
            Interaction {
                component: lab(O),
                driver: MinusLabel(1),
                outer: unit.clone(),
                potential: Some(POTENTIAL.into()),
                factors: vec![(lab(O), lin(coef(0, -1)))],
            },
            Interaction {
                component: lab(O_BAR),
                driver: MinusLabel(0),
                outer: unit.clone(),
                potential: None,
                factors: vec![(lab(O), id()), (lab(O_BAR), sq(coef(0, 1)))],
            },
            Interaction {
                component: lab(O_BAR),
                driver: MinusLabel(1),
                outer: unit,
                potential: Some(POTENTIAL_BAR.into()),
                factors: vec![(lab(O_BAR), lin(coef(0, 1)))],
            },
        ];
        EquationSpec {
            kind: EquationKind::Gp,
            components: pair((O, i_laplacian(1)), (O_BAR, i_laplacian(-1))),
            interactions,
            mass: None,
        }
    }

    /// The potential-free cubic equation: the `𝔩 = 0` part of [`EquationSpec::gp`].
    pub fn nls() -> Self {
        let mut e = Self::gp();
        e.kind = EquationKind::Nls;
        e.interactions.retain(|i| i.driver == MinusLabel(0));
        e
    }

    /// Sine-Gordon `∂_t² z − Δz + m² z = −sin z` in the first-order variable
    /// `u = z − i⟨∇⟩_m⁻¹ ∂_t z`, using `sin(Re u) = sin(u/2)cos(ū/2) + cos(u/2)sin(ū/2)`.
    pub fn sg(mass: Rational64) -> Self {
        let bracket = OperatorExpr::bracket(mass);
        let half = Rational64::new(1, 2);
        let (s, c) = (ScalarFn::sin(half), ScalarFn::cos(half));
        let outer = |sign: i64| Multiplier::scalar(coef(0, sign)).then(MultFactor::Inv(bracket.clone()));
        let interactions = vec![
            Interaction {
                component: lab(O),
                driver: MinusLabel(0),
                outer: outer(1),
                potential: None,
                factors: vec![(lab(O), s.clone()), (lab(O_BAR), c.clone())],
            },
            Interaction {
                component: lab(O),
                driver: MinusLabel(1),
                outer: outer(1),
                potential: None,
                factors: vec![(lab(O), c.clone()), (lab(O_BAR), s.clone())],
            },
            Interaction {
                component: lab(O_BAR),
                driver: MinusLabel(0),
                outer: outer(-1),
                potential: None,
                factors: vec![(lab(O), c.clone()), (lab(O_BAR), s.clone())],
            },
            Interaction {
                component: lab(O_BAR),
                driver: MinusLabel(1),
                outer: outer(-1),
                potential: None,
                factors: vec![(lab(O), s), (lab(O_BAR), c)],
            },
        ];
        EquationSpec {
            kind: EquationKind::Sg,
            components: pair(
                (O, bracket.scale(coef(0, 1))),
                (O_BAR, bracket.scale(coef(0, -1))),
            ),
            interactions,
            mass: Some(mass),
        }
    }

    pub fn from_kind(kind: EquationKind) -> Self {
        match kind {
            EquationKind::Gp => Self::gp(),
            EquationKind::Nls => Self::nls(),
            EquationKind::Sg => Self::sg(Rational64::from_integer(1)),
        }
    }

    pub fn component(&self, o: &PlusLabel) -> Result<&Component> {
        self.components
            .iter()
            .find(|c| &c.label == o)
            .ok_or_else(|| Error::Spec(format!("unknown component `{o}`")))
    }

    pub fn op(&self, o: &PlusLabel) -> Result<&OperatorExpr> {
        Ok(&self.component(o)?.op)
    }

    pub fn interaction(&self, o: &PlusLabel, l: MinusLabel) -> Option<&Interaction> {
        self.interactions.iter().find(|i| &i.component == o && i.driver == l)
    }

    pub fn interactions_of<'a>(&'a self, o: &'a PlusLabel) -> impl Iterator<Item = &'a Interaction> + 'a {
        self.interactions.iter().filter(move |i| &i.component == o)
    }

    /// Whether the equation has a driver with a nontrivial potential.
    pub fn uses_potential(&self) -> bool {
        self.interactions.iter().any(|i| i.potential.is_some())
    }

    /// Input map `{o: v, ō: v̄, V: V, V̄: V̄}`.
    pub fn inputs(&self, v: &Field, potential: Option<&Field>) -> BTreeMap<String, Field> {
        let mut m = BTreeMap::new();
        m.insert(O.to_string(), v.clone());
        m.insert(O_BAR.to_string(), v.conj());
        if let Some(p) = potential {
            m.insert(POTENTIAL.to_string(), p.clone());
            m.insert(POTENTIAL_BAR.to_string(), p.conj());
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gp_has_two_drivers_per_component() {
        let e = EquationSpec::gp();
        assert_eq!(e.interactions_of(&lab(O)).count(), 2);
        assert!(e.interaction(&lab(O_BAR), MinusLabel(1)).unwrap().potential.as_deref() == Some(POTENTIAL_BAR));
        assert_eq!(EquationSpec::nls().interactions.len(), 2);
    }
}
