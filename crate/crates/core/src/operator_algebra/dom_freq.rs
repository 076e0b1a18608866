//! Dominant and lower-order frequencies of planted trees.

use super::expr::OperatorExpr;
use super::set::{max_op, ominus, oplus, p_dom, OperatorSet};
use crate::error::{Error, Result};
use crate::scheme_engine::EquationSpec;
use crate::tree_core::{DecoratedTree, PlusLabel};

/// Splits a planted tree `ℐ_o(T)` into `(o, T)`.
fn unplant(p: &DecoratedTree) -> Result<(&PlusLabel, &DecoratedTree)> {
    if !p.is_planted() {
        return Err(Error::Usage(format!("expected a planted tree, got {p}")));
    }
    let c = &p.children()[0];
    Ok((&c.edge, &c.tree))
}

/// Frequencies entering the node `λ_𝔩 ∏ ℐ_{oᵢ}(Tᵢ)` integrated along `o`:
/// the linear parts of the factors of `(o, 𝔩)` and the dominant
/// frequencies of each child.
pub fn r_dom_node(t: &DecoratedTree, o: &PlusLabel, eq: &EquationSpec) -> Result<OperatorSet> {
    let driver = t
        .root
        .driver
        .ok_or_else(|| Error::Usage(format!("node {t} carries no driver label")))?;
    let inter = eq
        .interaction(o, driver)
        .ok_or_else(|| Error::Spec(format!("no interaction for ({o}, {driver})")))?;
    let mut s = OperatorSet::new();
    for (ob, _) in &inter.factors {
        s.insert(eq.op(ob)?.clone());
    }
    for c in t.children() {
        s = s.union(&r_dom(&crate::tree_core::graft(&c.edge, &c.tree), eq)?);
    }
    Ok(s)
}

/// `−L_o ⊕ 𝓡^o_dom(T)` for `P = ℐ_o(T)`.
fn shifted(p: &DecoratedTree, eq: &EquationSpec) -> Result<(OperatorExpr, OperatorSet)> {
    let (o, t) = unplant(p)?;
    let lo = eq.op(o)?.clone();
    let s = oplus(&-lo.clone(), &r_dom_node(t, o, eq)?);
    Ok((lo, s))
}

/// Dominant frequency `𝓛_dom(ℐ_o(T)) = p_dom(−L_o ⊕ 𝓡^o_dom(T))`.
pub fn l_dom(p: &DecoratedTree, eq: &EquationSpec) -> Result<OperatorExpr> {
    let (_, s) = shifted(p, eq)?;
    p_dom(&s)
}

/// `𝓡_dom(ℐ_o(T)) = L_o ⊕ max(𝓛_dom, −L_o ⊕ 𝓡^o_dom(T))`.
pub fn r_dom(p: &DecoratedTree, eq: &EquationSpec) -> Result<OperatorSet> {
    let (lo, s) = shifted(p, eq)?;
    let ld = p_dom(&s)?;
    Ok(oplus(&lo, &max_op(&ld, &s)))
}

/// Lower-order frequencies `S ⊖ p_dom(S)` with `S = −L_o ⊕ 𝓡^o_dom(T)`.
pub fn r_low(p: &DecoratedTree, eq: &EquationSpec) -> Result<OperatorSet> {
    let (_, s) = shifted(p, eq)?;
    let ld = p_dom(&s)?;
    Ok(ominus(&s, &ld))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator_algebra::coef;
    use crate::tree_core::{graft, DecoratedTree};

    #[test]
    fn cubic_leaf_has_doubled_dominant_frequency() {
        let eq = EquationSpec::gp();
        let o = PlusLabel::new("o");
        let p = graft(&o, &DecoratedTree::leaf(0));
        let l = OperatorExpr::laplacian().scale(coef(0, 1));
        assert_eq!(l_dom(&p, &eq).unwrap(), l.scale(coef(-2, 0)));
        let rd: OperatorSet = [l.clone(), -l.clone()].into_iter().collect();
        assert_eq!(r_dom(&p, &eq).unwrap(), rd);
        assert_eq!(r_low(&p, &eq).unwrap(), [OperatorExpr::zero()].into_iter().collect());
    }

    #[test]
    fn non_planted_input_is_rejected() {
        let eq = EquationSpec::gp();
        assert!(l_dom(&DecoratedTree::leaf(0), &eq).is_err());
    }
}
