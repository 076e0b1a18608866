//! Decorated rooted trees encoding Duhamel iterated integrals.
//!
//! A tree `λ^ℓ_𝔩 ∏ᵢ ℐ_{oᵢ}(Tᵢ)` has a root carrying a monomial power `ℓ` and a
//! driver label `𝔩`, and children attached by edges labelled with equation
//! components `oᵢ`. Planted trees `ℐ_o(T)` have an undecorated root and one edge.
//! Trees are kept in canonical form (children sorted), so derived equality is
//! equality of non-planar trees.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Edge decoration: the equation component an integral propagates along.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PlusLabel(pub String);

impl PlusLabel {
    pub fn new(s: &str) -> Self {
        PlusLabel(s.to_string())
    }
}

impl fmt::Display for PlusLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Node decoration selecting the potential `V_𝔩` and nonlinearity family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MinusLabel(pub u32);

impl fmt::Display for MinusLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Root decoration `(ℓ, 𝔩)`; planted roots carry `(0, none)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeDecoration {
    pub poly_power: u32,
    pub driver: Option<MinusLabel>,
}

impl NodeDecoration {
    pub fn bare() -> Self {
        NodeDecoration { poly_power: 0, driver: None }
    }
}

/// One child of a node: edge label and the subtree hanging from it.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Child {
    pub edge: PlusLabel,
    pub tree: DecoratedTree,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DecoratedTree {
    pub root: NodeDecoration,
    children: Vec<Child>,
    /// Approximation order `r` attached by [`project_dr`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root_order: Option<i32>,
}

impl DecoratedTree {
    /// `λ^ℓ_𝔩 ∏ ℐ_{oᵢ}(Tᵢ)` in canonical form.
    pub fn node(poly_power: u32, driver: MinusLabel, children: Vec<(PlusLabel, DecoratedTree)>) -> Self {
        let mut t = DecoratedTree {
            root: NodeDecoration { poly_power, driver: Some(driver) },
            children: children.into_iter().map(|(edge, tree)| Child { edge, tree }).collect(),
            root_order: None,
        };
        t.children.sort();
        t
    }

    /// Leaf `λ_𝔩` (with `ℓ = 0`).
    pub fn leaf(driver: u32) -> Self {
        Self::node(0, MinusLabel(driver), vec![])
    }

    /// Leaf `λ^ℓ_𝔩`.
    pub fn leaf_poly(driver: u32, poly_power: u32) -> Self {
        Self::node(poly_power, MinusLabel(driver), vec![])
    }

    pub fn children(&self) -> &[Child] {
        &self.children
    }

    pub fn is_planted(&self) -> bool {
        self.root == NodeDecoration::bare() && self.children.len() == 1
    }

    /// Returns the tree with children re-sorted recursively. Constructors already
    /// canonicalise; this exists for trees assembled by deserialisation.
    pub fn canonical(&self) -> DecoratedTree {
        let mut children: Vec<Child> = self
            .children
            .iter()
            .map(|c| Child { edge: c.edge.clone(), tree: c.tree.canonical() })
            .collect();
        children.sort();
        DecoratedTree { root: self.root, children, root_order: self.root_order }
    }

    /// Number of edges.
    pub fn edge_count(&self) -> usize {
        self.children.iter().map(|c| 1 + c.tree.edge_count()).sum()
    }

    /// Number of nodes.
    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(|c| c.tree.node_count()).sum::<usize>()
    }

    /// Same tree without the approximation-order tag.
    pub fn untagged(&self) -> DecoratedTree {
        DecoratedTree { root: self.root, children: self.children.clone(), root_order: None }
    }

    /// Graphviz DOT rendering with stable node numbering.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = format!("digraph \"{name}\" {{\n  rankdir=BT;\n");
        let mut counter = 0usize;
        self.dot_rec(&mut out, &mut counter);
        out.push_str("}\n");
        out
    }

    fn dot_rec(&self, out: &mut String, counter: &mut usize) -> usize {
        let id = *counter;
        *counter += 1;
        let label = match self.root.driver {
            Some(d) => format!("({},{})", self.root.poly_power, d),
            None => "∅".to_string(),
        };
        out.push_str(&format!("  n{id} [label=\"{label}\"];\n"));
        for c in &self.children {
            let cid = c.tree.dot_rec(out, counter);
            out.push_str(&format!("  n{cid} -> n{id} [label=\"{}\"];\n", c.edge));
        }
        id
    }
}

impl fmt::Display for DecoratedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(d) = self.root.driver {
            if self.root.poly_power == 0 {
                parts.push(format!("λ{d}"));
            } else {
                parts.push(format!("λ{d}^{}", self.root.poly_power));
            }
        }
        for c in &self.children {
            parts.push(format!("I_{}({})", c.edge, c.tree));
        }
        if parts.is_empty() {
            return write!(f, "1");
        }
        write!(f, "{}", parts.join("·"))?;
        if let Some(r) = self.root_order {
            write!(f, " [r={r}]")?;
        }
        Ok(())
    }
}

/// A commutative product of planted trees; the empty forest is the unit `𝟏`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Forest(Vec<DecoratedTree>);

impl Forest {
    pub fn unit() -> Self {
        Forest(Vec::new())
    }

    pub fn new(trees: Vec<DecoratedTree>) -> Result<Self> {
        if let Some(t) = trees.iter().find(|t| !t.is_planted()) {
            return Err(Error::Usage(format!("forest factor {t} is not planted")));
        }
        let mut v = trees;
        v.sort();
        Ok(Forest(v))
    }

    pub fn product(&self, other: &Forest) -> Forest {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        v.sort();
        Forest(v)
    }

    pub fn trees(&self) -> &[DecoratedTree] {
        &self.0
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }
}

/// `ℐ_o(T)`: a new bare root joined to `T` by an `o`-edge.
pub fn graft(o: &PlusLabel, t: &DecoratedTree) -> DecoratedTree {
    DecoratedTree {
        root: NodeDecoration::bare(),
        children: vec![Child { edge: o.clone(), tree: t.untagged() }],
        root_order: None,
    }
}

/// Splits `T = λ^ℓ_𝔩 ∏ ℐ_{oᵢ}(Tᵢ)` into its root decoration and children.
pub fn decompose(t: &DecoratedTree) -> (u32, Option<MinusLabel>, Vec<(PlusLabel, DecoratedTree)>) {
    (
        t.root.poly_power,
        t.root.driver,
        t.children.iter().map(|c| (c.edge.clone(), c.tree.clone())).collect(),
    )
}

/// Rebuilds a tree from the pieces returned by [`decompose`].
pub fn regraft(poly_power: u32, driver: Option<MinusLabel>, children: Vec<(PlusLabel, DecoratedTree)>) -> DecoratedTree {
    let mut t = DecoratedTree {
        root: NodeDecoration { poly_power, driver },
        children: children.into_iter().map(|(edge, tree)| Child { edge, tree }).collect(),
        root_order: None,
    };
    t.children.sort();
    t
}

/// Longest leaf-to-root count of edges plus monomial decorations.
/// A childless node contributes its own `ℓ`.
pub fn deg(t: &DecoratedTree) -> i32 {
    let own = t.root.poly_power as i32;
    match t.children.iter().map(|c| deg(&c.tree)).max() {
        None => own,
        Some(m) => own + 1 + m,
    }
}

/// Degree of a forest: the maximum over its trees, 0 for `𝟏`.
pub fn deg_forest(f: &Forest) -> i32 {
    f.trees().iter().map(deg).max().unwrap_or(0)
}

/// `Σ_v 𝔫(v) + |E|`: the number of time integrations contributed by `T`.
pub fn n_plus(t: &DecoratedTree) -> u32 {
    t.root.poly_power + t.children.iter().map(|c| 1 + n_plus(&c.tree)).sum::<u32>()
}

/// Outcome of the truncation map: a tagged tree or the absorbing zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Projection {
    Zero,
    Tree(DecoratedTree),
}

impl Projection {
    pub fn is_zero(&self) -> bool {
        matches!(self, Projection::Zero)
    }

    pub fn tree(&self) -> Option<&DecoratedTree> {
        match self {
            Projection::Zero => None,
            Projection::Tree(t) => Some(t),
        }
    }
}

/// `𝒟_r`: tags `T` with order `r`, or returns zero when the truncation
/// condition fails. A planted tree `ℐ_o(S)` survives iff `r + 1 ≥ deg(ℐ_o(S))`;
/// any other tree survives iff each child `ℐ^{r−ℓ}_{oᵢ}(Tᵢ)` does.
pub fn project_dr(t: &DecoratedTree, r: i32) -> Projection {
    if r < -1 {
        return Projection::Zero;
    }
    let keep = if t.is_planted() {
        r + 1 >= deg(t)
    } else {
        let rr = t.root.poly_power as i32;
        t.children.iter().all(|c| (r - rr) + 1 >= 1 + deg(&c.tree))
    };
    if keep {
        let mut out = t.untagged();
        out.root_order = Some(r);
        Projection::Tree(out)
    } else {
        Projection::Zero
    }
}

/// `𝒟_r(𝟏) = 𝟏` when `r ≥ −1`, else zero.
pub fn project_dr_unit(r: i32) -> bool {
    r >= -1
}

fn factorial(n: u64) -> u64 {
    (1..=n).product::<u64>().max(1)
}

/// `S_root(λ^k ∏(ℐ_{oᵢ}(T_{i,j}))^{β_{i,j}}) = k! ∏ β_{i,j}!`.
pub fn symmetry_factor_root(t: &DecoratedTree) -> u64 {
    let mut s = factorial(t.root.poly_power as u64);
    let mut i = 0;
    let ch = &t.children;
    while i < ch.len() {
        let mut j = i + 1;
        while j < ch.len() && ch[j] == ch[i] {
            j += 1;
        }
        s *= factorial((j - i) as u64);
        i = j;
    }
    s
}
