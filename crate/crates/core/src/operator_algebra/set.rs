//! Finite operator sets and the dominant-part maps `p_dom`, `⊕`, `⊖`, `max`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::expr::OperatorExpr;
use crate::error::{Error, Result};

/// A finite set of operators; duplicates collapse.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorSet(BTreeSet<OperatorExpr>);

impl OperatorSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, e: OperatorExpr) {
        self.0.insert(e);
    }

    pub fn union(&self, other: &OperatorSet) -> OperatorSet {
        OperatorSet(self.0.union(&other.0).cloned().collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = &OperatorExpr> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, e: &OperatorExpr) -> bool {
        self.0.contains(e)
    }
}

impl FromIterator<OperatorExpr> for OperatorSet {
    fn from_iter<I: IntoIterator<Item = OperatorExpr>>(iter: I) -> Self {
        OperatorSet(iter.into_iter().collect())
    }
}

impl fmt::Display for OperatorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

/// Dominant part of a set of operators.
///
/// The elements of largest differential order form the smallest-domain class.
/// If they share one top-order part that strictly dominates every remainder,
/// that part is returned; otherwise the result is 0.
pub fn p_dom(s: &OperatorSet) -> Result<OperatorExpr> {
    if s.is_empty() {
        return Err(Error::Usage("p_dom of an empty operator set".into()));
    }
    let d = s.iter().map(|a| a.domain_order()).max().unwrap_or(0);
    if d == 0 {
        return Ok(OperatorExpr::zero());
    }
    let mut tops = s.iter().filter(|a| a.domain_order() == d).map(|a| a.top_part());
    let first = tops.next().expect("class of maximal order is nonempty");
    if tops.all(|t| t == first) {
        Ok(first)
    } else {
        Ok(OperatorExpr::zero())
    }
}

/// `L ⊕ S = {L + A : A ∈ S}`.
pub fn oplus(l: &OperatorExpr, s: &OperatorSet) -> OperatorSet {
    s.iter().map(|a| l.clone() + a.clone()).collect()
}

/// Replaces every element of the form `L + rest` with `ord(rest) < ord(L)` by `rest`.
pub fn ominus(s: &OperatorSet, l: &OperatorExpr) -> OperatorSet {
    s.iter()
        .map(|a| a.split_off(l).unwrap_or_else(|| a.clone()))
        .collect()
}

/// Maps elements dominated by `L` to `L` and all others to 0.
pub fn max_op(l: &OperatorExpr, s: &OperatorSet) -> OperatorSet {
    s.iter()
        .map(|a| {
            if a.split_off(l).is_some() {
                l.clone()
            } else {
                OperatorExpr::zero()
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator_algebra::expr::coef;

    fn l() -> OperatorExpr {
        OperatorExpr::laplacian().scale(coef(0, 1))
    }

    fn set(v: &[OperatorExpr]) -> OperatorSet {
        v.iter().cloned().collect()
    }

    #[test]
    fn empty_set_is_usage_error() {
        assert!(p_dom(&OperatorSet::new()).is_err());
    }

    #[test]
    fn oplus_identity_and_shift() {
        let s = set(&[l(), -l()]);
        assert_eq!(oplus(&OperatorExpr::zero(), &s), s);
        assert_eq!(oplus(&-l(), &s), set(&[OperatorExpr::zero(), l().scale(coef(-2, 0))]));
        assert_eq!(oplus(&l(), &set(&[OperatorExpr::zero()])), set(&[l()]));
    }

    #[test]
    fn ominus_and_max_rules() {
        let s = set(&[l() + OperatorExpr::dx(), OperatorExpr::dx()]);
        assert_eq!(ominus(&set(&[l() + OperatorExpr::dx()]), &l()), set(&[OperatorExpr::dx()]));
        assert_eq!(ominus(&s, &OperatorExpr::zero()), s);
        assert_eq!(max_op(&l(), &s), set(&[l(), OperatorExpr::zero()]));
        assert_eq!(max_op(&OperatorExpr::zero(), &s), set(&[OperatorExpr::zero()]));
    }

    #[test]
    fn mixed_first_order_generators_have_no_common_part() {
        let m = num_rational::Rational64::from_integer(1);
        let s = set(&[OperatorExpr::bracket(m), OperatorExpr::dx()]);
        assert!(p_dom(&s).unwrap().is_zero());
    }
}
