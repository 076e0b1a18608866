//! The ξ-integration kernel `𝒦^r_{o,A}` and its remainder forms.
//!
//! An integrand is a sum of monomials `c ξ^ℓ ℬ(∏ᵢ e^{ξLᵢ} uᵢ)` with `uᵢ`
//! independent of `ξ`. Writing `Aᵢ = Lᵢ − L_o`, each monomial is integrated
//! against `e^{(τ−ξ)L_o}` in one of three ways:
//!
//! * full Taylor expansion, when every term of order `≤ r − ℓ + 1` costs at
//!   most `s` derivatives;
//! * resonant: the dominant part `L_dom = p_dom{Aᵢ}` is integrated exactly
//!   through φ-functions and the rest is Taylor expanded;
//! * non-resonant (`L_dom = 0`): everything but the outer group is Taylor expanded.

use num_traits::{One, Zero};
use serde::Serialize;

use super::term::{
    apply_op, commutator, derivative_cost, expand_commutator, factorial, mult, product, scale, slot, MultFactor,
    Multiplier, Term,
};
use crate::error::{Error, Result};
use crate::operator_algebra::{coef, p_dom, Coef, OperatorExpr, OperatorSet};

/// One factor `e^{ξL} u` of an integrand monomial.
#[derive(Clone, Debug)]
pub struct IntegrandFactor {
    pub op: OperatorExpr,
    pub term: Term,
}

/// `c ξ^ℓ ℬ(∏ e^{ξLᵢ} uᵢ)`.
#[derive(Clone, Debug)]
pub struct Integrand {
    pub coef: Coef,
    pub xi_power: u32,
    pub outer: Multiplier,
    pub factors: Vec<IntegrandFactor>,
}

/// `c τ^p body`; `monomial` marks bodies that do not depend on `τ`.
#[derive(Clone, Debug)]
pub struct TimeTerm {
    pub coef: Coef,
    pub tau_power: u32,
    pub body: Term,
    pub monomial: bool,
}

impl TimeTerm {
    pub fn to_term(&self) -> Option<Term> {
        scale(self.coef, self.tau_power, self.body.clone())
    }
}

/// How a monomial was integrated.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "branch", rename_all = "snake_case")]
pub enum Branch {
    FullTaylor,
    Resonant { dominant: OperatorExpr },
    NonResonant,
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Branch::FullTaylor => f.write_str("full Taylor"),
            Branch::Resonant { dominant } => write!(f, "resonant, L_dom = {dominant}"),
            Branch::NonResonant => f.write_str("non-resonant"),
        }
    }
}

pub(crate) fn compositions(k: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 0 {
        return if k == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=k {
        for mut rest in compositions(k - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// All multi-indices of length `parts` with total degree at most `q`.
fn indices_upto(q: i32, parts: usize) -> Vec<Vec<u32>> {
    (0..=q.max(-1)).flat_map(|t| compositions(t as u32, parts)).collect()
}

fn binomial(n: u32, k: u32) -> i64 {
    (factorial(n as u64) / (factorial(k as u64) * factorial((n - k) as u64))) as i64
}

fn fact(n: u32) -> Coef {
    coef(factorial(n as u64) as i64, 0)
}

fn apply_pow(op: &OperatorExpr, k: u32, t: Term) -> Option<Term> {
    (0..k).try_fold(t, |acc, _| apply_op(op, acc))
}

/// Derivative cost of `G_{n,k} = L_o^n ℬ(∏ Lᵢ^{kᵢ} uᵢ)`; `None` when `G` vanishes.
fn taylor_cost(f: &Integrand, lo: &OperatorExpr, n: u32, ks: &[u32]) -> Option<u32> {
    let mut inner = 0;
    for (fac, &k) in f.factors.iter().zip(ks) {
        if k > 0 && fac.op.is_zero() {
            return None;
        }
        inner = inner.max(k * fac.op.domain_order() + derivative_cost(&fac.term));
    }
    Some(n * lo.domain_order() + inner)
}

/// The resonance data of a monomial.
struct Resonance {
    a: Vec<OperatorExpr>,
    dominant: OperatorExpr,
    /// Lower-order remainder for members of the dominant group.
    low: Vec<Option<OperatorExpr>>,
}

fn resonance(f: &Integrand, lo: &OperatorExpr) -> Result<Resonance> {
    let a: Vec<OperatorExpr> = f.factors.iter().map(|x| x.op.clone() - lo.clone()).collect();
    let set: OperatorSet = a.iter().cloned().collect();
    let dominant = if set.is_empty() { OperatorExpr::zero() } else { p_dom(&set)? };
    let low = a
        .iter()
        .map(|ai| if dominant.is_zero() { None } else { ai.split_off(&dominant) })
        .collect();
    Ok(Resonance { a, dominant, low })
}

/// Chooses the integration branch for one monomial at order `r` and regularity `s`.
pub fn select_branch(f: &Integrand, lo: &OperatorExpr, r: i32, s: f64) -> Result<Branch> {
    let ell = f.xi_power as i32;
    let bound = r - ell + 1;
    let admitted = indices_upto(bound, f.factors.len() + 1).iter().all(|idx| {
        match taylor_cost(f, lo, idx[0], &idx[1..]) {
            None => true,
            Some(c) => c as f64 <= s + 1e-12,
        }
    });
    if admitted {
        return Ok(Branch::FullTaylor);
    }
    let res = resonance(f, lo)?;
    if res.dominant.is_zero() {
        Ok(Branch::NonResonant)
    } else {
        Ok(Branch::Resonant { dominant: res.dominant })
    }
}

/// `∫₀^τ (ξ−τ)^m ξ^Q e^{ξa} dξ = τ^{m+Q+1} Σᵢ C(m,i)(−1)^{m−i}(Q+i)! φ_{Q+i+1}(τa)`.
fn xi_integral_phi(m: u32, q: u32) -> Vec<(Coef, u32)> {
    (0..=m)
        .map(|i| {
            let sign = if (m - i) % 2 == 0 { 1 } else { -1 };
            (coef(sign * binomial(m, i), 0) * fact(q + i), q + i + 1)
        })
        .collect()
}

/// Slots of a subset, as a product template.
fn group_product(idx: &[usize]) -> Option<Term> {
    product(idx.iter().map(|&i| slot(i)).collect())
}

/// Shared assembly of `ℬ(C^m[H, L_o](args))`.
fn outer_commutator(f: &Integrand, h: Term, lo: &OperatorExpr, m: u32, args: Vec<Term>) -> Option<Term> {
    let inner = commutator(h, vec![lo.clone(); m as usize], args)?;
    mult(f.outer.clone(), inner)
}

/// Which part of the exactly integrated `e^{ξL_dom}` factor a resonant term keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhiPart {
    Whole,
    /// The part still oscillating with `e^{τL_dom}`.
    Oscillatory,
    /// The remainder, polynomial in `(τL_dom)⁻¹`.
    Polynomial,
}

/// `𝒦^r_{o,A}` applied to one monomial.
pub fn k_approx(f: &Integrand, lo: &OperatorExpr, r: i32, s: f64) -> Result<(Branch, Vec<TimeTerm>)> {
    k_approx_part(f, lo, r, s, PhiPart::Whole)
}

/// [`k_approx`] keeping only one part of the φ-filters of the resonant branch.
pub fn k_approx_part(f: &Integrand, lo: &OperatorExpr, r: i32, s: f64, part: PhiPart) -> Result<(Branch, Vec<TimeTerm>)> {
    let ell = f.xi_power as i32;
    if ell > r {
        return Err(Error::Usage(format!("monomial power ξ^{ell} exceeds the order r = {r}")));
    }
    let branch = select_branch(f, lo, r, s)?;
    let nf = f.factors.len();
    let mut out = Vec::new();
    match &branch {
        Branch::FullTaylor => {
            for idx in indices_upto(r - ell, nf + 1) {
                let (n, ks) = (idx[0], &idx[1..]);
                let Some(args) = f
                    .factors
                    .iter()
                    .zip(ks)
                    .map(|(x, &k)| apply_pow(&x.op, k, x.term.clone()))
                    .collect::<Option<Vec<_>>>()
                else {
                    continue;
                };
                let Some(body) = product(args).and_then(|p| mult(f.outer.clone(), p)).and_then(|b| apply_pow(lo, n, b))
                else {
                    continue;
                };
                let sk: u32 = ks.iter().sum();
                let q = f.xi_power + sk;
                let mut c = f.coef * fact(q) / fact(n + q + 1);
                for &k in ks {
                    c /= fact(k);
                }
                out.push(TimeTerm { coef: c, tau_power: n + q + 1, body, monomial: true });
            }
        }
        Branch::Resonant { dominant } => {
            let res = resonance(f, lo)?;
            let dom: Vec<usize> = (0..nf).filter(|&i| res.low[i].is_some()).collect();
            let rest: Vec<usize> = (0..nf).filter(|&i| res.low[i].is_none()).collect();
            for idx in indices_upto(r - ell, nf + 3) {
                let (n, m, p, ks) = (idx[0], idx[1], idx[2], &idx[3..]);
                if rest.is_empty() && n > 0 {
                    continue;
                }
                let Some(args) = (0..nf)
                    .map(|i| {
                        let a = res.low[i].clone().unwrap_or_else(|| res.a[i].clone());
                        apply_pow(&a, ks[i], f.factors[i].term.clone())
                    })
                    .collect::<Option<Vec<_>>>()
                else {
                    continue;
                };
                let rest_part = if rest.is_empty() {
                    None
                } else {
                    let Some(t) = group_product(&rest)
                        .and_then(|g| expand_commutator(&g, &vec![lo.clone(); n as usize], nf))
                        .and_then(|t| mult(Multiplier::exp(lo.clone()), t))
                    else {
                        continue;
                    };
                    Some(t)
                };
                let sk: u32 = ks.iter().sum();
                for a in 0..=p {
                    let mut word = vec![dominant.clone(); a as usize];
                    word.extend(std::iter::repeat(lo.clone()).take((p - a) as usize));
                    let q = f.xi_power + sk + a;
                    let (terms, op) = (xi_integral_phi(m, q), dominant.clone());
                    let phi = match part {
                        PhiPart::Whole => MultFactor::PhiComb { terms, op },
                        PhiPart::Oscillatory => MultFactor::PhiOsc { terms, op },
                        PhiPart::Polynomial => MultFactor::PhiPoly { terms, op },
                    };
                    let Some(dom_part) = group_product(&dom)
                        .and_then(|g| expand_commutator(&g, &word, nf))
                        .and_then(|t| mult(Multiplier::single(phi).then(MultFactor::Exp(lo.clone())), t))
                    else {
                        continue;
                    };
                    let h = match &rest_part {
                        Some(rp) => product(vec![rp.clone(), dom_part]),
                        None => Some(dom_part),
                    };
                    let Some(body) = h.and_then(|h| outer_commutator(f, h, lo, m, args.clone())) else {
                        continue;
                    };
                    let mut c = f.coef * coef(binomial(p, a), 0) / (fact(m) * fact(n) * fact(p));
                    for &k in ks {
                        c /= fact(k);
                    }
                    out.push(TimeTerm { coef: c, tau_power: n + (p - a) + m + q + 1, body, monomial: false });
                }
            }
        }
        Branch::NonResonant => {
            let res = resonance(f, lo)?;
            let all: Vec<usize> = (0..nf).collect();
            for idx in indices_upto(r - ell, nf + 2) {
                let (n, m, ks) = (idx[0], idx[1], &idx[2..]);
                let Some(args) = (0..nf)
                    .map(|i| apply_pow(&res.a[i], ks[i], f.factors[i].term.clone()))
                    .collect::<Option<Vec<_>>>()
                else {
                    continue;
                };
                let Some(body) = group_product(&all)
                    .and_then(|g| expand_commutator(&g, &vec![lo.clone(); n as usize], nf))
                    .and_then(|t| mult(Multiplier::exp(lo.clone()), t))
                    .and_then(|h| outer_commutator(f, h, lo, m, args))
                else {
                    continue;
                };
                let sk: u32 = ks.iter().sum();
                let q = f.xi_power + sk;
                let sign = if m % 2 == 0 { Coef::one() } else { -Coef::one() };
                // ∫₀^τ (ξ−τ)^m ξ^q dξ = (−1)^m m! q! τ^{m+q+1} / (m+q+1)!
                let mut c = f.coef * sign * fact(q) / (fact(n) * fact(m + q + 1));
                for &k in ks {
                    c /= fact(k);
                }
                out.push(TimeTerm { coef: c, tau_power: n + m + q + 1, body, monomial: false });
            }
        }
    }
    out.retain(|t| !t.coef.is_zero());
    Ok((branch, out))
}

/// Remainder forms `R^r_{o,A}` of one monomial: the terms whose size bounds
/// the local error of [`k_approx`]. Coefficients are dropped.
pub fn remainder(f: &Integrand, lo: &OperatorExpr, r: i32, s: f64) -> Result<Vec<Term>> {
    let ell = f.xi_power as i32;
    let top = r - ell + 1;
    if top < 0 {
        return Ok(vec![]);
    }
    let top = top as u32;
    let nf = f.factors.len();
    let branch = select_branch(f, lo, r, s)?;
    let mut out = Vec::new();
    match branch {
        Branch::FullTaylor => {
            for idx in compositions(top, nf + 1) {
                let (n, ks) = (idx[0], &idx[1..]);
                let body = f
                    .factors
                    .iter()
                    .zip(ks)
                    .map(|(x, &k)| apply_pow(&x.op, k, x.term.clone()))
                    .collect::<Option<Vec<_>>>()
                    .and_then(product)
                    .and_then(|p| mult(f.outer.clone(), p))
                    .and_then(|b| apply_pow(lo, n, b));
                out.extend(body);
            }
        }
        Branch::Resonant { dominant } => {
            let res = resonance(f, lo)?;
            let dom: Vec<usize> = (0..nf).filter(|&i| res.low[i].is_some()).collect();
            let rest: Vec<usize> = (0..nf).filter(|&i| res.low[i].is_none()).collect();
            let shifted = dominant.clone() + lo.clone();
            for idx in compositions(top, nf + 3) {
                let (n, m, p, ks) = (idx[0], idx[1], idx[2], &idx[3..]);
                if rest.is_empty() && n > 0 {
                    continue;
                }
                let args = (0..nf)
                    .map(|i| {
                        let a = res.low[i].clone().unwrap_or_else(|| res.a[i].clone());
                        apply_pow(&a, ks[i], f.factors[i].term.clone())
                    })
                    .collect::<Option<Vec<_>>>();
                let dom_part = group_product(&dom).and_then(|g| expand_commutator(&g, &vec![shifted.clone(); p as usize], nf));
                let h = if rest.is_empty() {
                    dom_part
                } else {
                    let rp = group_product(&rest).and_then(|g| expand_commutator(&g, &vec![lo.clone(); n as usize], nf));
                    match (rp, dom_part) {
                        (Some(a), Some(b)) => product(vec![a, b]),
                        _ => None,
                    }
                };
                if let (Some(h), Some(args)) = (h, args) {
                    out.extend(outer_commutator(f, h, lo, m, args));
                }
            }
        }
        Branch::NonResonant => {
            let res = resonance(f, lo)?;
            let all: Vec<usize> = (0..nf).collect();
            for idx in compositions(top, nf + 2) {
                let (n, m, ks) = (idx[0], idx[1], &idx[2..]);
                let args = (0..nf)
                    .map(|i| apply_pow(&res.a[i], ks[i], f.factors[i].term.clone()))
                    .collect::<Option<Vec<_>>>();
                let h = group_product(&all).and_then(|g| expand_commutator(&g, &vec![lo.clone(); n as usize], nf));
                if let (Some(h), Some(args)) = (h, args) {
                    out.extend(outer_commutator(f, h, lo, m, args));
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme_engine::term::input;

    fn l() -> OperatorExpr {
        OperatorExpr::laplacian().scale(coef(0, 1))
    }

    fn cubic() -> Integrand {
        let sq = product(vec![input("o"), input("o")]).unwrap();
        Integrand {
            coef: coef(0, -1),
            xi_power: 0,
            outer: Multiplier::scalar(Coef::one()),
            factors: vec![
                IntegrandFactor { op: l(), term: sq },
                IntegrandFactor { op: -l(), term: input("ō") },
            ],
        }
    }

    #[test]
    fn branch_depends_on_regularity() {
        assert_eq!(select_branch(&cubic(), &l(), 0, 2.0).unwrap(), Branch::FullTaylor);
        assert_eq!(
            select_branch(&cubic(), &l(), 0, 1.0).unwrap(),
            Branch::Resonant { dominant: l().scale(coef(-2, 0)) }
        );
    }

    #[test]
    fn first_order_resonant_term_is_a_single_phi_filter() {
        let (_, terms) = k_approx(&cubic(), &l(), 0, 1.0).unwrap();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].tau_power, 1);
    }

    #[test]
    fn xi_integral_weights() {
        // ∫₀¹ (t−1) e^{σt} dt = φ₂ − φ₁
        assert_eq!(xi_integral_phi(1, 0), vec![(coef(-1, 0), 1), (coef(1, 0), 2)]);
    }
}
