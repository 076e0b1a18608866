//! Elementary differentials `Υ^𝔩_o(T)` of the Duhamel expansion.
//!
//! For `T = λ^k_𝔩 ∏ ℐ_{oᵢ}(Tᵢ)` the coefficient is obtained by applying one
//! derivative `D_{oᵢ}` per child and `k` time derivatives to
//! `∏_ô e^{ξL_ô} f^𝔩_{o,ô}(v_ô)`. Time derivatives distribute over the factors
//! by Leibniz and act through commutators, so every term has the form
//! `c ∏_ô e^{ξL_ô} C^{ℓ_ô}[f^{(j_ô)}, L_ô](v_ô)`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use super::equation::EquationSpec;
use super::kernel::compositions;
use super::term::{commutator, factorial, input, pointwise, product, slot, Term};
use crate::error::{Error, Result};
use crate::operator_algebra::{coef, fmt_coef, Coef, OperatorExpr};
use crate::tree_core::{DecoratedTree, PlusLabel};

/// `e^{ξL} u` with `u` independent of `ξ`.
#[derive(Clone, Debug)]
pub struct UpsFactor {
    pub label: PlusLabel,
    pub op: OperatorExpr,
    pub term: Term,
}

#[derive(Clone, Debug)]
pub struct UpsTerm {
    pub coef: Coef,
    pub factors: Vec<UpsFactor>,
}

impl UpsTerm {
    /// Value at `ξ = 0`: the plain product.
    pub fn at_zero(&self) -> Option<Term> {
        let p = product(self.factors.iter().map(|f| f.term.clone()).collect())?;
        super::term::scale(self.coef, 0, p)
    }
}

impl fmt::Display for UpsTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_coef(&self.coef))?;
        for x in &self.factors {
            write!(f, "·[e^{{ξ({})}} {}]", x.op, x.term)?;
        }
        Ok(())
    }
}

/// `C^ℓ[f, L](v_ô)`, or `None` when it vanishes.
pub fn commutator_factor(f: &super::scalar_fn::ScalarFn, l: &OperatorExpr, ell: u32, label: &PlusLabel) -> Option<Term> {
    let template = pointwise(f.clone(), slot(0))?;
    commutator(template, vec![l.clone(); ell as usize], vec![input(&label.0)])
}

/// Terms of `Υ^𝔩_o(T)`; the empty vector means `Υ = 0`.
pub fn upsilon(eq: &EquationSpec, o: &PlusLabel, t: &DecoratedTree) -> Result<Vec<UpsTerm>> {
    let driver = t
        .root
        .driver
        .ok_or_else(|| Error::Usage(format!("tree {t} has an undecorated root")))?;
    let inter = eq
        .interaction(o, driver)
        .ok_or_else(|| Error::Spec(format!("no interaction for ({o}, {driver})")))?;
    let mut counts: BTreeMap<&PlusLabel, u32> = BTreeMap::new();
    for c in t.children() {
        if !inter.factors.iter().any(|(l, _)| l == &c.edge) {
            return Err(Error::Spec(format!(
                "edge `{}` is not an argument of the ({o}, {driver}) nonlinearity",
                c.edge
            )));
        }
        *counts.entry(&c.edge).or_default() += 1;
    }
    let k = t.root.poly_power;
    let kf = factorial(k as u64) as i64;
    let mut out = Vec::new();
    'comp: for ells in compositions(k, inter.factors.len()) {
        let mut c = coef(kf, 0);
        let mut factors = Vec::new();
        for ((label, f), &ell) in inter.factors.iter().zip(&ells) {
            c /= coef(factorial(ell as u64) as i64, 0);
            let j = counts.get(label).copied().unwrap_or(0);
            let l = eq.op(label)?;
            match commutator_factor(&f.nth_derivative(j), l, ell, label) {
                Some(term) => factors.push(UpsFactor { label: label.clone(), op: l.clone(), term }),
                None => continue 'comp,
            }
        }
        if !c.is_zero() {
            out.push(UpsTerm { coef: c, factors });
        }
    }
    Ok(out)
}

/// `Υ(v, 0)` as one term; `None` when it vanishes.
pub fn upsilon_at_zero(terms: &[UpsTerm]) -> Option<Term> {
    super::term::sum_opt(terms.iter().map(|t| t.at_zero()))
}

/// Whether `Υ` is structurally nonzero.
pub fn upsilon_nonzero(eq: &EquationSpec, o: &PlusLabel, t: &DecoratedTree) -> Result<bool> {
    Ok(!upsilon(eq, o, t)?.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree_core::MinusLabel;

    fn o() -> PlusLabel {
        PlusLabel::new("o")
    }

    #[test]
    fn cubic_leaf_has_one_term() {
        let eq = EquationSpec::gp();
        let u = upsilon(&eq, &o(), &DecoratedTree::leaf(0)).unwrap();
        assert_eq!(u.len(), 1);
        assert_eq!(u[0].factors.len(), 2);
    }

    #[test]
    fn linear_potential_term_has_no_time_derivative() {
        let eq = EquationSpec::gp();
        assert!(upsilon(&eq, &o(), &DecoratedTree::leaf_poly(1, 1)).unwrap().is_empty());
        assert_eq!(upsilon(&eq, &o(), &DecoratedTree::leaf_poly(0, 1)).unwrap().len(), 1);
    }

    #[test]
    fn third_derivative_of_square_vanishes() {
        let eq = EquationSpec::gp();
        let ch = vec![(o(), DecoratedTree::leaf(0)); 3];
        let t = DecoratedTree::node(0, MinusLabel(0), ch);
        assert!(upsilon(&eq, &o(), &t).unwrap().is_empty());
    }
}
