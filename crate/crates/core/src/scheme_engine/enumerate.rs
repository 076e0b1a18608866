//! Enumeration of the trees contributing to a scheme of given order.

use super::equation::EquationSpec;
use super::upsilon::upsilon_nonzero;
use crate::error::Result;
use crate::tree_core::{n_plus, DecoratedTree, PlusLabel};

/// Nonempty multisets of `items` (indices nondecreasing) with total weight at most `budget`.
fn multisets(items: &[(PlusLabel, DecoratedTree, u32)], budget: u32) -> Vec<Vec<(PlusLabel, DecoratedTree)>> {
    fn go(
        items: &[(PlusLabel, DecoratedTree, u32)],
        start: usize,
        budget: u32,
        cur: &mut Vec<(PlusLabel, DecoratedTree)>,
        out: &mut Vec<Vec<(PlusLabel, DecoratedTree)>>,
    ) {
        out.push(cur.clone());
        for i in start..items.len() {
            let (l, t, w) = &items[i];
            if *w <= budget {
                cur.push((l.clone(), t.clone()));
                go(items, i, budget - w, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(items, 0, budget, &mut Vec::new(), &mut out);
    out
}

/// Trees `T` with `n₊(T) ≤ budget` and nonvanishing `Υ` at every node,
/// integrated along component `o`.
fn grow(eq: &EquationSpec, o: &PlusLabel, budget: u32) -> Result<Vec<DecoratedTree>> {
    let mut out = Vec::new();
    for inter in eq.interactions_of(o) {
        for k in 0..=budget {
            let rest = budget - k;
            let mut items = Vec::new();
            if rest >= 1 {
                for (ob, _) in &inter.factors {
                    for t in grow(eq, ob, rest - 1)? {
                        let w = 1 + n_plus(&t);
                        items.push((ob.clone(), t, w));
                    }
                }
            }
            for children in multisets(&items, rest) {
                let t = DecoratedTree::node(k, inter.driver, children);
                if upsilon_nonzero(eq, o, &t)? {
                    out.push(t);
                }
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// `𝒯^p_o`: all trees with `n₊(T) ≤ p − 1` and `Π ℐ_o(T) ≠ 0`, in canonical order.
pub fn enumerate_trees(eq: &EquationSpec, p: u32, o: &PlusLabel) -> Result<Vec<DecoratedTree>> {
    if p == 0 {
        return Ok(vec![]);
    }
    let mut out = grow(eq, o, p - 1)?;
    out.sort_by(|a, b| n_plus(a).cmp(&n_plus(b)).then_with(|| a.cmp(b)));
    Ok(out)
}
