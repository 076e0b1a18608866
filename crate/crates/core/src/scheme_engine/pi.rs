//! The recursive approximation `Π^r_{o,A}`, local-error forms and full schemes.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::enumerate::enumerate_trees;
use super::equation::EquationSpec;
use super::kernel::{k_approx, k_approx_part, remainder, select_branch, Branch, Integrand, IntegrandFactor, PhiPart, TimeTerm};
use super::term::{input, mult, one, product, scale, sum, sum_opt, Multiplier, Term};
use super::upsilon::{upsilon, upsilon_at_zero};
use crate::error::{Error, Result};
use crate::operator_algebra::{coef, r_dom, Coef, OperatorExpr, OperatorSet};
use crate::tree_core::{graft, project_dr, symmetry_factor_root, DecoratedTree, PlusLabel};

/// Regularity `H^s` assumed for the initial data, and the spatial basis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RegularityDomain {
    pub s: f64,
}

impl RegularityDomain {
    pub fn new(s: f64) -> Self {
        RegularityDomain { s }
    }
}

/// `Π̃^r_{o,A}(T)`: the integrand of `ℐ_o(T)` as a sum of ξ-monomials.
pub fn pi_tilde(eq: &EquationSpec, o: &PlusLabel, t: &DecoratedTree, r: i32, dom: RegularityDomain) -> Result<Vec<Integrand>> {
    let ups = upsilon(eq, o, t)?;
    if ups.is_empty() {
        return Ok(vec![]);
    }
    let driver = t.root.driver.expect("upsilon checked the driver");
    let inter = eq.interaction(o, driver).expect("upsilon checked the interaction");
    let k = t.root.poly_power;
    let sym = coef(symmetry_factor_root(t) as i64, 0);
    // children as polynomials in ξ: Vec<(power, coef, body)>
    let mut child_polys: Vec<Vec<(u32, Coef, Term)>> = Vec::new();
    for c in t.children() {
        let terms = pi_approx(eq, &c.edge, &c.tree, r - k as i32, dom)?;
        if terms.is_empty() {
            return Ok(vec![]);
        }
        let mut poly = Vec::new();
        for (_, tt) in terms {
            if !tt.monomial {
                return Err(Error::Unsupported(format!(
                    "child ℐ_{}({}) is not polynomial in time at s = {}; nested oscillatory children are not supported",
                    c.edge, c.tree, dom.s
                )));
            }
            poly.push((tt.tau_power, tt.coef, tt.body));
        }
        child_polys.push(poly);
    }
    let mut out = Vec::new();
    let mut combos: Vec<(u32, Coef, Vec<Term>)> = vec![(0, coef(1, 0), vec![])];
    for poly in &child_polys {
        let mut next = Vec::new();
        for (p, c, ts) in &combos {
            for (p2, c2, t2) in poly {
                let mut v = ts.clone();
                v.push(t2.clone());
                next.push((p + p2, *c * c2, v));
            }
        }
        combos = next;
    }
    for u in &ups {
        for (p, c, ws) in &combos {
            let mut factors: Vec<IntegrandFactor> = u
                .factors
                .iter()
                .map(|f| IntegrandFactor { op: f.op.clone(), term: f.term.clone() })
                .collect();
            if let Some(name) = &inter.potential {
                factors.push(IntegrandFactor { op: OperatorExpr::zero(), term: input(name) });
            }
            for w in ws {
                factors.push(IntegrandFactor { op: OperatorExpr::zero(), term: w.clone() });
            }
            out.push(Integrand {
                coef: u.coef * c / sym,
                xi_power: k + p,
                outer: inter.outer.clone(),
                factors,
            });
        }
    }
    Ok(out)
}

/// `Π^r_{o,A}(ℐ_o(T))(τ)`: the terms of the approximation, each tagged with
/// the branch used. Empty when `𝒟_r` annihilates the tree.
pub fn pi_approx(
    eq: &EquationSpec,
    o: &PlusLabel,
    t: &DecoratedTree,
    r: i32,
    dom: RegularityDomain,
) -> Result<Vec<(Branch, TimeTerm)>> {
    if project_dr(&graft(o, t), r).is_zero() {
        return Ok(vec![]);
    }
    let lo = eq.op(o)?.clone();
    let mut out = Vec::new();
    for f in pi_tilde(eq, o, t, r - 1, dom)? {
        let (b, terms) = k_approx(&f, &lo, r, dom.s)?;
        out.extend(terms.into_iter().map(|x| (b.clone(), x)));
    }
    Ok(out)
}

/// `Π^r ℐ_o(T)` as a single term.
pub fn pi_term(eq: &EquationSpec, o: &PlusLabel, t: &DecoratedTree, r: i32, dom: RegularityDomain) -> Result<Option<Term>> {
    Ok(sum_opt(pi_approx(eq, o, t, r, dom)?.iter().map(|(_, x)| x.to_term())))
}

/// One summand of the dominant decomposition of `Π^r ℐ_o(T)`.
#[derive(Clone, Debug, Serialize)]
pub struct DecompositionSummand {
    /// The tree whose dominant frequencies this summand oscillates with;
    /// `None` for the `𝟏`-summand.
    pub subtree: Option<DecoratedTree>,
    /// `ℛ_dom` of `subtree`, empty for the `𝟏`-summand.
    pub dominant: OperatorSet,
    #[serde(skip)]
    pub term: Term,
}

/// Splits `Π^r ℐ_o(T)` into the part oscillating with `ℛ_dom(ℐ_o(T))` and the
/// `𝟏`-summand left over from integrating `e^{ξL_dom}` exactly. The summands
/// add up to [`pi_term`]. Only defined when every outer multiplier of `o` is
/// scalar.
pub fn dominant_decomposition(
    eq: &EquationSpec,
    o: &PlusLabel,
    t: &DecoratedTree,
    r: i32,
    dom: RegularityDomain,
) -> Result<Vec<DecompositionSummand>> {
    if eq.interactions_of(o).any(|i| !i.outer.factors.is_empty()) {
        return Err(Error::Unsupported(format!(
            "dominant decomposition needs scalar outer multipliers; component {o} has an operator outer layer"
        )));
    }
    if project_dr(&graft(o, t), r).is_zero() {
        return Ok(vec![]);
    }
    let lo = eq.op(o)?.clone();
    let (mut osc, mut poly) = (Vec::new(), Vec::new());
    for f in pi_tilde(eq, o, t, r - 1, dom)? {
        if let Branch::Resonant { .. } = select_branch(&f, &lo, r, dom.s)? {
            osc.extend(k_approx_part(&f, &lo, r, dom.s, PhiPart::Oscillatory)?.1);
            poly.extend(k_approx_part(&f, &lo, r, dom.s, PhiPart::Polynomial)?.1);
        } else {
            poly.extend(k_approx(&f, &lo, r, dom.s)?.1);
        }
    }
    let mut out = Vec::new();
    if let Some(term) = sum_opt(osc.iter().map(TimeTerm::to_term)) {
        let planted = graft(o, t);
        out.push(DecompositionSummand { dominant: r_dom(&planted, eq)?, subtree: Some(planted), term });
    }
    if let Some(term) = sum_opt(poly.iter().map(TimeTerm::to_term)) {
        out.push(DecompositionSummand { subtree: None, dominant: OperatorSet::new(), term });
    }
    Ok(out)
}

/// Local-error forms `ℒ^r_low(ℐ_o(T))`: a list of terms whose sizes bound
/// `Π ℐ_o(T) − Π^r_A ℐ_o(T)` up to a factor `τ^{r+2}`.
pub fn local_error_term(
    eq: &EquationSpec,
    o: &PlusLabel,
    t: &DecoratedTree,
    r: i32,
    dom: RegularityDomain,
) -> Result<Vec<Term>> {
    if r < 0 {
        return Ok(vec![one()]);
    }
    let lo = eq.op(o)?.clone();
    let mut out = local_error_node(eq, o, t, r - 1, dom)?;
    for f in pi_tilde(eq, o, t, r - 1, dom)? {
        out.extend(remainder(&f, &lo, r, dom.s)?);
    }
    Ok(out)
}

/// `ℒ^{r,o}_low(λ^ℓ ∏ ℐ(Tᵢ)) = ℬ(Υ(v,0)/S · V · Σᵢ ℒ^{r−ℓ}_low(ℐ(Tᵢ)))`,
/// with the empty sum read as 1.
fn local_error_node(eq: &EquationSpec, o: &PlusLabel, t: &DecoratedTree, r: i32, dom: RegularityDomain) -> Result<Vec<Term>> {
    let ups = upsilon(eq, o, t)?;
    let Some(u0) = upsilon_at_zero(&ups) else {
        return Ok(vec![]);
    };
    let driver = t.root.driver.expect("upsilon checked the driver");
    let inter = eq.interaction(o, driver).expect("upsilon checked the interaction");
    let sym = coef(symmetry_factor_root(t) as i64, 0);
    let Some(mut base) = scale(coef(1, 0) / sym, 0, u0) else {
        return Ok(vec![]);
    };
    if let Some(name) = &inter.potential {
        base = product(vec![base, input(name)]).expect("nonzero product");
    }
    let k = t.root.poly_power as i32;
    let mut children = Vec::new();
    for c in t.children() {
        children.extend(local_error_term(eq, &c.edge, &c.tree, r - k, dom)?);
    }
    if t.children().is_empty() {
        children.push(one());
    }
    Ok(children
        .into_iter()
        .filter_map(|e| product(vec![base.clone(), e]).and_then(|p| mult(inter.outer.clone(), p)))
        .collect())
}

/// Contribution of one tree to a scheme.
#[derive(Clone, Debug, Serialize)]
pub struct TreeContribution {
    pub tree: DecoratedTree,
    pub branches: Vec<Branch>,
    #[serde(skip)]
    pub term: Option<Term>,
    pub display: String,
}

/// A derived scheme for one component: `e^{τL_o}v + Σ_T Π^r ℐ_o(T)`.
#[derive(Clone, Debug, Serialize)]
pub struct Scheme {
    pub component: PlusLabel,
    pub order: u32,
    pub regularity: RegularityDomain,
    pub contributions: Vec<TreeContribution>,
    #[serde(skip)]
    pub term: Term,
}

impl Scheme {
    pub fn trees(&self) -> Vec<&DecoratedTree> {
        self.contributions.iter().map(|c| &c.tree).collect()
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{}^{{n+1}} = e^{{τL_{}}} {} + Σ over {} trees  (order {}, s = {})",
            self.component,
            self.component,
            self.component,
            self.contributions.len(),
            self.order,
            self.regularity.s
        )?;
        for c in &self.contributions {
            let b: Vec<String> = c.branches.iter().map(|b| b.to_string()).collect();
            writeln!(f, "  [{}] {}", c.tree, b.join("; "))?;
            writeln!(f, "      {}", c.display)?;
        }
        Ok(())
    }
}

/// Builds the order-`p` scheme for component `o` at regularity `dom`.
pub fn build_scheme(eq: &EquationSpec, o: &PlusLabel, p: u32, dom: RegularityDomain) -> Result<Scheme> {
    if p == 0 {
        return Err(Error::Validation("scheme order must be at least 1".into()));
    }
    let r = p as i32 - 1;
    let lo = eq.op(o)?.clone();
    let free = mult(Multiplier::exp(lo), input(&o.0)).expect("semigroup of an input is nonzero");
    let mut parts = vec![free];
    let mut contributions = Vec::new();
    for t in enumerate_trees(eq, p, o)? {
        let terms = pi_approx(eq, o, &t, r, dom)?;
        let mut branches: Vec<Branch> = Vec::new();
        for (b, _) in &terms {
            if !branches.contains(b) {
                branches.push(b.clone());
            }
        }
        let term = sum_opt(terms.iter().map(|(_, x)| x.to_term()));
        if let Some(x) = &term {
            parts.push(x.clone());
        }
        let display = term.as_ref().map(|x| x.to_string()).unwrap_or_else(|| "0".into());
        contributions.push(TreeContribution { tree: t, branches, term, display });
    }
    let term = sum(parts).expect("scheme contains the free flow");
    Ok(Scheme { component: o.clone(), order: p, regularity: dom, contributions, term })
}

/// Trees grouped by `n₊`, for reporting.
pub fn census(eq: &EquationSpec, o: &PlusLabel, p: u32) -> Result<BTreeMap<u32, Vec<DecoratedTree>>> {
    let mut m: BTreeMap<u32, Vec<DecoratedTree>> = BTreeMap::new();
    for t in enumerate_trees(eq, p, o)? {
        m.entry(crate::tree_core::n_plus(&t)).or_default().push(t);
    }
    Ok(m)
}
