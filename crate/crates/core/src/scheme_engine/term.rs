//! Symbolic scheme terms: a small expression DAG over fields.
//!
//! Terms are built through smart constructors that fold constants and drop
//! structural zeros, so `None` stands for the zero term throughout.
//! Commutators `C^m[H, L₁…L_m](args)` keep their compact form for display and
//! are expanded on demand through the identity
//! `C[H, L](w) = −L H(w) + Σᵢ DᵢH(w)[L wᵢ]`.

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::scalar_fn::ScalarFn;
use crate::operator_algebra::{coef, coef_to_c64, fmt_coef, Coef, OperatorExpr};
use crate::spectral_backend::phi;

/// One factor of a Fourier multiplier; `τ` is the step size.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum MultFactor {
    /// `A`.
    Op(OperatorExpr),
    /// `A⁻¹`, with `0` on the kernel of `A`.
    Inv(OperatorExpr),
    /// `e^{τA}`.
    Exp(OperatorExpr),
    /// `Σ c_j φ_j(τA)`.
    PhiComb { terms: Vec<(Coef, u32)>, op: OperatorExpr },
    /// Oscillatory part of `Σ c_j φ_j(τA)`: `e^{σ} Σ_j c_j Σ_{i<j} (−1)^i σ^{−i−1}/(j−1−i)!`.
    PhiOsc { terms: Vec<(Coef, u32)>, op: OperatorExpr },
    /// Non-oscillatory part of `Σ c_j φ_j(τA)`: `Σ_j c_j (−1)^j σ^{−j}`.
    PhiPoly { terms: Vec<(Coef, u32)>, op: OperatorExpr },
}

/// Below this `|σ|` the split of a φ-combination puts everything in the
/// non-oscillatory part.
const SPLIT_FLOOR: f64 = 1e-9;

fn phi_osc(j: u32, s: Complex64) -> Complex64 {
    if s.norm() < SPLIT_FLOOR {
        return Complex64::zero();
    }
    let mut acc = Complex64::zero();
    let mut fact = 1.0;
    for m in 1..j {
        fact *= m as f64;
    }
    // i runs 0..j, (j−1−i)! runs from (j−1)! down to 0!
    let mut f = fact;
    for i in 0..j {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign / (f * s.powu(i + 1));
        let d = (j - 1 - i) as f64;
        if d > 0.0 {
            f /= d;
        }
    }
    s.exp() * acc
}

fn phi_poly(j: u32, s: Complex64) -> Complex64 {
    if s.norm() < SPLIT_FLOOR {
        return phi(j, s);
    }
    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
    sign / s.powu(j)
}

impl MultFactor {
    pub fn op(&self) -> &OperatorExpr {
        match self {
            MultFactor::Op(a) | MultFactor::Inv(a) | MultFactor::Exp(a) => a,
            MultFactor::PhiComb { op, .. } | MultFactor::PhiOsc { op, .. } | MultFactor::PhiPoly { op, .. } => op,
        }
    }

    /// Weight at symbol value `a = A(k)` for step `τ`.
    pub fn weight(&self, a: Complex64, tau: f64) -> Complex64 {
        let comb = |terms: &[(Coef, u32)], f: &dyn Fn(u32, Complex64) -> Complex64| {
            terms.iter().map(|(c, j)| coef_to_c64(c) * f(*j, a * tau)).sum::<Complex64>()
        };
        match self {
            MultFactor::Op(_) => a,
            MultFactor::Inv(_) => {
                if a.norm() == 0.0 {
                    Complex64::zero()
                } else {
                    1.0 / a
                }
            }
            MultFactor::Exp(_) => (a * tau).exp(),
            MultFactor::PhiComb { terms, .. } => comb(terms, &phi),
            MultFactor::PhiOsc { terms, .. } => comb(terms, &phi_osc),
            MultFactor::PhiPoly { terms, .. } => comb(terms, &phi_poly),
        }
    }

    /// Exact value at `k = 0` when it does not depend on `τ`.
    fn zero_mode(&self) -> Option<Coef> {
        let a = self.op().symbol_at_zero();
        match self {
            MultFactor::Op(_) => Some(a),
            MultFactor::Inv(_) => {
                if a.is_zero() {
                    Some(Coef::zero())
                } else {
                    Some(Coef::one() / a)
                }
            }
            MultFactor::Exp(_) => a.is_zero().then(Coef::one),
            MultFactor::PhiComb { terms, .. } => a.is_zero().then(|| {
                terms
                    .iter()
                    .map(|(c, j)| *c / coef(factorial(*j as u64) as i64, 0))
                    .fold(Coef::zero(), |x, y| x + y)
            }),
            MultFactor::PhiOsc { .. } | MultFactor::PhiPoly { .. } => None,
        }
    }

    /// Whether the weight reads `τ`.
    pub fn uses_tau(&self) -> bool {
        !matches!(self, MultFactor::Op(_) | MultFactor::Inv(_))
    }
}

pub(crate) fn factorial(n: u64) -> u64 {
    (1..=n).product::<u64>().max(1)
}

/// `c · ∏ factors`, a Fourier multiplier.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Multiplier {
    pub coef: Coef,
    pub factors: Vec<MultFactor>,
}

impl Multiplier {
    pub fn scalar(c: Coef) -> Self {
        Multiplier { coef: c, factors: vec![] }
    }

    pub fn single(f: MultFactor) -> Self {
        Multiplier { coef: Coef::one(), factors: vec![f] }
    }

    pub fn op(a: OperatorExpr) -> Self {
        Self::single(MultFactor::Op(a))
    }

    pub fn exp(a: OperatorExpr) -> Self {
        Self::single(MultFactor::Exp(a))
    }

    pub fn with_coef(mut self, c: Coef) -> Self {
        self.coef *= c;
        self
    }

    pub fn then(mut self, f: MultFactor) -> Self {
        self.factors.push(f);
        self
    }

    pub fn compose(&self, other: &Multiplier) -> Multiplier {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        Multiplier { coef: self.coef * other.coef, factors }
    }

    pub fn is_zero(&self) -> bool {
        self.coef.is_zero() || self.factors.iter().any(|f| matches!(f, MultFactor::Op(a) if a.is_zero()))
    }

    /// Weight at wavenumber `k`.
    pub fn weight(&self, k: f64, tau: f64) -> Complex64 {
        self.factors
            .iter()
            .fold(coef_to_c64(&self.coef), |w, f| w * f.weight(f.op().symbol(k), tau))
    }

    fn zero_mode(&self) -> Option<Coef> {
        self.factors
            .iter()
            .try_fold(self.coef, |w, f| f.zero_mode().map(|z| w * z))
    }

    pub fn uses_dx(&self) -> bool {
        self.factors.iter().any(|f| f.op().uses_dx())
    }

    /// `Σ ord(A)` over plain operator factors.
    pub fn differential_order(&self) -> u32 {
        self.factors
            .iter()
            .map(|f| match f {
                MultFactor::Op(a) => a.domain_order(),
                _ => 0,
            })
            .sum()
    }
}

/// A term node together with its cached slot flag.
#[derive(Debug)]
pub struct TermNode {
    node: Node,
    slotted: bool,
}

pub type Term = Arc<TermNode>;

#[derive(Debug)]
pub enum Node {
    /// A named input field (`o`, `ō`, `V`, …).
    Input(String),
    /// Argument placeholder inside a commutator template.
    Slot(usize),
    /// Constant field.
    Const(Coef),
    /// `c · τ^p · child`.
    Scale { coef: Coef, tau_power: u32, child: Term },
    Mult { mult: Multiplier, child: Term },
    /// `f(child)` evaluated pointwise.
    Pointwise { f: ScalarFn, child: Term },
    Product(Vec<Term>),
    Sum(Vec<Term>),
    /// `C^m[template, word](args)`.
    Commutator {
        template: Term,
        word: Vec<OperatorExpr>,
        args: Vec<Term>,
        expanded: OnceLock<Option<Term>>,
    },
}

impl TermNode {
    pub fn node(&self) -> &Node {
        &self.node
    }

    pub fn has_slots(&self) -> bool {
        self.slotted
    }

    /// Constant value if this term is a constant field.
    pub fn as_const(&self) -> Option<Coef> {
        match self.node {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }
}

fn wrap(node: Node) -> Term {
    let slotted = match &node {
        Node::Input(_) | Node::Const(_) => false,
        Node::Slot(_) => true,
        Node::Scale { child, .. } | Node::Mult { child, .. } | Node::Pointwise { child, .. } => child.slotted,
        Node::Product(v) | Node::Sum(v) => v.iter().any(|t| t.slotted),
        Node::Commutator { args, .. } => args.iter().any(|t| t.slotted),
    };
    Arc::new(TermNode { node, slotted })
}

pub fn input(name: &str) -> Term {
    wrap(Node::Input(name.to_string()))
}

pub fn slot(i: usize) -> Term {
    wrap(Node::Slot(i))
}

pub fn constant(c: Coef) -> Option<Term> {
    (!c.is_zero()).then(|| wrap(Node::Const(c)))
}

pub fn one() -> Term {
    wrap(Node::Const(Coef::one()))
}

/// `c · τ^p · t`.
pub fn scale(c: Coef, tau_power: u32, t: Term) -> Option<Term> {
    if c.is_zero() {
        return None;
    }
    if c.is_one() && tau_power == 0 {
        return Some(t);
    }
    match &t.node {
        Node::Const(k) if tau_power == 0 => constant(c * k),
        Node::Scale { coef: c2, tau_power: p2, child } => scale(c * c2, tau_power + p2, child.clone()),
        _ => Some(wrap(Node::Scale { coef: c, tau_power, child: t })),
    }
}

/// Applies a Fourier multiplier.
pub fn mult(m: Multiplier, t: Term) -> Option<Term> {
    if m.is_zero() {
        return None;
    }
    if m.factors.is_empty() {
        return scale(m.coef, 0, t);
    }
    match &t.node {
        Node::Const(c) => {
            if let Some(z) = m.zero_mode() {
                return constant(z * c);
            }
            Some(wrap(Node::Mult { mult: m, child: t }))
        }
        Node::Mult { mult: inner, child } => mult(m.compose(inner), child.clone()),
        _ => Some(wrap(Node::Mult { mult: m, child: t })),
    }
}

/// `L t` for an operator expression.
pub fn apply_op(a: &OperatorExpr, t: Term) -> Option<Term> {
    if a.is_zero() {
        return None;
    }
    mult(Multiplier::op(a.clone()), t)
}

/// `f(t)` pointwise.
pub fn pointwise(f: ScalarFn, t: Term) -> Option<Term> {
    if f.is_zero() {
        return None;
    }
    if let Some(c) = f.constant_value() {
        return constant(c);
    }
    if let (Node::Const(c), ScalarFn::Poly(v)) = (&t.node, &f) {
        let mut acc = Coef::zero();
        for a in v.iter().rev() {
            acc = acc * c + a;
        }
        return constant(acc);
    }
    if let Some((a, b)) = f.affine_parts() {
        return sum_opt([constant(a), scale(b, 0, t)]);
    }
    Some(wrap(Node::Pointwise { f, child: t }))
}

/// Product; an empty product is the constant 1.
pub fn product(factors: Vec<Term>) -> Option<Term> {
    let mut c = Coef::one();
    let mut rest = Vec::new();
    for t in factors {
        match &t.node {
            Node::Const(k) => c *= k,
            Node::Product(inner) => rest.extend(inner.iter().cloned()),
            _ => rest.push(t),
        }
    }
    if c.is_zero() {
        return None;
    }
    let body = match rest.len() {
        0 => return constant(c),
        1 => rest.pop().expect("one factor"),
        _ => wrap(Node::Product(rest)),
    };
    scale(c, 0, body)
}

/// Sum of the nonzero summands; the empty sum is zero.
pub fn sum(terms: Vec<Term>) -> Option<Term> {
    let mut c = Coef::zero();
    let mut rest = Vec::new();
    for t in terms {
        match &t.node {
            Node::Const(k) => c += k,
            Node::Sum(inner) => rest.extend(inner.iter().cloned()),
            _ => rest.push(t),
        }
    }
    if let Some(k) = constant(c) {
        rest.push(k);
    }
    match rest.len() {
        0 => None,
        1 => rest.pop(),
        _ => Some(wrap(Node::Sum(rest))),
    }
}

pub fn sum_opt(terms: impl IntoIterator<Item = Option<Term>>) -> Option<Term> {
    sum(terms.into_iter().flatten().collect())
}

/// `C^m[template, word](args)`. An empty word is plain substitution.
pub fn commutator(template: Term, word: Vec<OperatorExpr>, args: Vec<Term>) -> Option<Term> {
    if word.is_empty() {
        return Some(substitute(&template, &args));
    }
    if word.iter().any(|l| l.is_zero()) || is_slot_linear(&template).is_some() {
        // Fourier multipliers commute, so linear templates have vanishing commutators.
        return None;
    }
    if !template.slotted {
        return expand_commutator(&template, &word, args.len());
    }
    let node = Node::Commutator { template, word, args, expanded: OnceLock::new() };
    let t = wrap(node);
    t.expansion().as_ref()?;
    Some(t)
}

/// `Some(i)` when `t` is a multiplier chain applied to slot `i`.
fn is_slot_linear(t: &Term) -> Option<usize> {
    match &t.node {
        Node::Slot(i) => Some(*i),
        Node::Scale { child, .. } | Node::Mult { child, .. } => is_slot_linear(child),
        _ => None,
    }
}

impl TermNode {
    /// Expanded form of a commutator node, computed once.
    pub fn expansion(&self) -> &Option<Term> {
        match &self.node {
            Node::Commutator { template, word, args, expanded } => expanded.get_or_init(|| {
                expand_commutator(template, word, args.len()).map(|t| substitute(&t, args))
            }),
            _ => panic!("expansion of a non-commutator node"),
        }
    }
}

/// One commutator step `C[H, L]` on a template with `arity` slots.
pub fn commutator_step(h: &Term, l: &OperatorExpr, arity: usize) -> Option<Term> {
    if is_slot_linear(h).is_some() {
        return None;
    }
    let mut parts = vec![apply_op(&-l.clone(), h.clone())];
    for i in 0..arity {
        if let Some(dir) = apply_op(l, slot(i)) {
            parts.push(derivative(h, i, &dir));
        }
    }
    sum_opt(parts)
}

/// Nested commutator over a word, returned as a template.
pub fn expand_commutator(h: &Term, word: &[OperatorExpr], arity: usize) -> Option<Term> {
    let mut cur = h.clone();
    for l in word {
        cur = commutator_step(&cur, l, arity)?;
    }
    Some(cur)
}

/// Replaces slot `i` by `args[i]`.
pub fn substitute(t: &Term, args: &[Term]) -> Term {
    if !t.slotted {
        return t.clone();
    }
    let zero_or = |x: Option<Term>| x.unwrap_or_else(|| wrap(Node::Const(Coef::zero())));
    match &t.node {
        Node::Slot(i) => args[*i].clone(),
        Node::Scale { coef, tau_power, child } => zero_or(scale(*coef, *tau_power, substitute(child, args))),
        Node::Mult { mult: m, child } => zero_or(mult(m.clone(), substitute(child, args))),
        Node::Pointwise { f, child } => zero_or(pointwise(f.clone(), substitute(child, args))),
        Node::Product(v) => zero_or(product(v.iter().map(|c| substitute(c, args)).collect())),
        Node::Sum(v) => zero_or(sum(v.iter().map(|c| substitute(c, args)).collect())),
        Node::Commutator { template, word, args: inner, .. } => {
            let new_args = inner.iter().map(|a| substitute(a, args)).collect();
            zero_or(commutator(template.clone(), word.clone(), new_args))
        }
        Node::Input(_) | Node::Const(_) => t.clone(),
    }
}

/// Directional derivative of `t` in slot `i` along `dir`.
pub fn derivative(t: &Term, i: usize, dir: &Term) -> Option<Term> {
    if !t.slotted {
        return None;
    }
    match &t.node {
        Node::Slot(j) => (*j == i).then(|| dir.clone()),
        Node::Input(_) | Node::Const(_) => None,
        Node::Scale { coef, tau_power, child } => scale(*coef, *tau_power, derivative(child, i, dir)?),
        Node::Mult { mult: m, child } => mult(m.clone(), derivative(child, i, dir)?),
        Node::Pointwise { f, child } => {
            let d = derivative(child, i, dir)?;
            let fp = pointwise(f.derivative(), child.clone())?;
            product(vec![fp, d])
        }
        Node::Product(v) => sum_opt((0..v.len()).map(|k| {
            let d = derivative(&v[k], i, dir)?;
            let mut fs: Vec<Term> = v.clone();
            fs[k] = d;
            product(fs)
        })),
        Node::Sum(v) => sum_opt(v.iter().map(|c| derivative(c, i, dir))),
        Node::Commutator { .. } => derivative(t.expansion().as_ref()?, i, dir),
    }
}

/// Number of derivatives a term consumes beyond its inputs: operator orders
/// add up along a chain, products take the maximum, and each commutator
/// with `L` costs `max(ord L − 1, 0)`.
pub fn derivative_cost(t: &Term) -> u32 {
    match &t.node {
        Node::Input(_) | Node::Slot(_) | Node::Const(_) => 0,
        Node::Scale { child, .. } | Node::Pointwise { child, .. } => derivative_cost(child),
        Node::Mult { mult, child } => mult.differential_order() + derivative_cost(child),
        Node::Product(v) | Node::Sum(v) => v.iter().map(derivative_cost).max().unwrap_or(0),
        Node::Commutator { template, word, args, .. } => {
            let inner = derivative_cost(template).max(args.iter().map(derivative_cost).max().unwrap_or(0));
            inner + word.iter().map(|l| l.domain_order().saturating_sub(1)).sum::<u32>()
        }
    }
}

/// Names of the inputs a term reads.
pub fn inputs_of(t: &Term, out: &mut std::collections::BTreeSet<String>) {
    match &t.node {
        Node::Input(n) => {
            out.insert(n.clone());
        }
        Node::Slot(_) | Node::Const(_) => {}
        Node::Scale { child, .. } | Node::Mult { child, .. } | Node::Pointwise { child, .. } => inputs_of(child, out),
        Node::Product(v) | Node::Sum(v) => v.iter().for_each(|c| inputs_of(c, out)),
        Node::Commutator { template, args, .. } => {
            inputs_of(template, out);
            args.iter().for_each(|c| inputs_of(c, out));
        }
    }
}

fn fmt_comb(terms: &[(Coef, u32)], op: &OperatorExpr, tag: &str) -> String {
    let parts: Vec<String> = terms
        .iter()
        .map(|(c, j)| {
            let cs = fmt_coef(c);
            let body = format!("φ{tag}{j}(τ·({op}))");
            if cs == "1" {
                body
            } else {
                format!("{cs}·{body}")
            }
        })
        .collect();
    if parts.len() == 1 {
        parts[0].clone()
    } else {
        format!("[{}]", parts.join(" + "))
    }
}

impl fmt::Display for MultFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MultFactor::Op(a) => write!(f, "({a})"),
            MultFactor::Inv(a) => write!(f, "({a})⁻¹"),
            MultFactor::Exp(a) => write!(f, "e^{{τ·({a})}}"),
            MultFactor::PhiComb { terms, op } => write!(f, "{}", fmt_comb(terms, op, "")),
            MultFactor::PhiOsc { terms, op } => write!(f, "{}", fmt_comb(terms, op, "osc")),
            MultFactor::PhiPoly { terms, op } => write!(f, "{}", fmt_comb(terms, op, "poly")),
        }
    }
}

impl fmt::Display for Multiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        if !self.coef.is_one() || self.factors.is_empty() {
            write!(f, "{}", fmt_coef(&self.coef))?;
            first = false;
        }
        for x in &self.factors {
            if !first {
                write!(f, "·")?;
            }
            write!(f, "{x}")?;
            first = false;
        }
        Ok(())
    }
}

impl fmt::Display for TermNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.node {
            Node::Input(n) => write!(f, "{n}"),
            Node::Slot(i) => write!(f, "#{i}"),
            Node::Const(c) => write!(f, "{}", fmt_coef(c)),
            Node::Scale { coef, tau_power, child } => {
                write!(f, "{}", fmt_coef(coef))?;
                match tau_power {
                    0 => {}
                    1 => write!(f, "·τ")?,
                    p => write!(f, "·τ^{p}")?,
                }
                write!(f, "·{child}")
            }
            Node::Mult { mult, child } => write!(f, "{mult}[{child}]"),
            Node::Pointwise { f: g, child } => write!(f, "({g})∘({child})"),
            Node::Product(v) => {
                let parts: Vec<String> = v.iter().map(|t| format!("({t})")).collect();
                write!(f, "{}", parts.join("·"))
            }
            Node::Sum(v) => {
                let parts: Vec<String> = v.iter().map(|t| t.to_string()).collect();
                write!(f, "{}", parts.join(" + "))
            }
            Node::Commutator { template, word, args, .. } => {
                let ls: Vec<String> = word.iter().map(|l| l.to_string()).collect();
                let xs: Vec<String> = args.iter().map(|a| a.to_string()).collect();
                write!(f, "C[{template}; {}]({})", ls.join(", "), xs.join(", "))
            }
        }
    }
}

impl Serialize for TermNode {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match &self.node {
            Node::Input(n) => {
                let mut st = s.serialize_struct("Input", 2)?;
                st.serialize_field("node", "input")?;
                st.serialize_field("name", n)?;
                st.end()
            }
            Node::Slot(i) => {
                let mut st = s.serialize_struct("Slot", 2)?;
                st.serialize_field("node", "slot")?;
                st.serialize_field("index", i)?;
                st.end()
            }
            Node::Const(c) => {
                let mut st = s.serialize_struct("Const", 2)?;
                st.serialize_field("node", "const")?;
                st.serialize_field("value", c)?;
                st.end()
            }
            Node::Scale { coef, tau_power, child } => {
                let mut st = s.serialize_struct("Scale", 4)?;
                st.serialize_field("node", "scale")?;
                st.serialize_field("coef", coef)?;
                st.serialize_field("tau_power", tau_power)?;
                st.serialize_field("child", child.as_ref())?;
                st.end()
            }
            Node::Mult { mult, child } => {
                let mut st = s.serialize_struct("Mult", 3)?;
                st.serialize_field("node", "multiplier")?;
                st.serialize_field("multiplier", mult)?;
                st.serialize_field("child", child.as_ref())?;
                st.end()
            }
            Node::Pointwise { f, child } => {
                let mut st = s.serialize_struct("Pointwise", 3)?;
                st.serialize_field("node", "pointwise")?;
                st.serialize_field("function", f)?;
                st.serialize_field("child", child.as_ref())?;
                st.end()
            }
            Node::Product(v) => {
                let mut st = s.serialize_struct("Product", 2)?;
                st.serialize_field("node", "product")?;
                st.serialize_field("factors", &v.iter().map(|t| t.as_ref()).collect::<Vec<_>>())?;
                st.end()
            }
            Node::Sum(v) => {
                let mut st = s.serialize_struct("Sum", 2)?;
                st.serialize_field("node", "sum")?;
                st.serialize_field("terms", &v.iter().map(|t| t.as_ref()).collect::<Vec<_>>())?;
                st.end()
            }
            Node::Commutator { template, word, args, .. } => {
                let mut st = s.serialize_struct("Commutator", 4)?;
                st.serialize_field("node", "commutator")?;
                st.serialize_field("template", template.as_ref())?;
                st.serialize_field("word", word)?;
                st.serialize_field("args", &args.iter().map(|t| t.as_ref()).collect::<Vec<_>>())?;
                st.end()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l() -> OperatorExpr {
        OperatorExpr::laplacian().scale(coef(0, 1))
    }

    #[test]
    fn commutator_of_linear_template_vanishes() {
        let t = mult(Multiplier::exp(l()), slot(0)).unwrap();
        assert!(commutator(t, vec![l()], vec![input("o")]).is_none());
        assert!(commutator(slot(0), vec![l()], vec![input("o")]).is_none());
    }

    #[test]
    fn commutator_of_square_expands_to_three_terms() {
        let sq = product(vec![slot(0), slot(0)]).unwrap();
        let c = commutator(sq, vec![l()], vec![input("o")]).unwrap();
        let e = c.expansion().clone().unwrap();
        // −L(v²) + (Lv)·v + v·(Lv)
        match e.node() {
            Node::Sum(v) => assert_eq!(v.len(), 3),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(derivative_cost(&c), 1);
    }

    #[test]
    fn constants_fold_through_multipliers() {
        let c = constant(coef(0, -1)).unwrap();
        let e = mult(Multiplier::exp(l()), c).unwrap();
        assert_eq!(e.as_const(), Some(coef(0, -1)));
        assert!(apply_op(&l(), one()).is_none());
    }

    #[test]
    fn phi_split_resums() {
        let terms = vec![(coef(1, 0), 1), (coef(-2, 1), 3)];
        for s in [Complex64::new(0.0, 0.7), Complex64::new(0.0, -3.0), Complex64::new(0.0, 0.0)] {
            let op = OperatorExpr::identity();
            let full = MultFactor::PhiComb { terms: terms.clone(), op: op.clone() }.weight(s, 1.0);
            let a = MultFactor::PhiOsc { terms: terms.clone(), op: op.clone() }.weight(s, 1.0);
            let b = MultFactor::PhiPoly { terms: terms.clone(), op }.weight(s, 1.0);
            assert!((full - a - b).norm() < 1e-12, "{s}");
        }
    }
}
