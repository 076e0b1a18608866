//! Reference values of the iterated integrals `Π ℐ_o(T)(τ)` by nested
//! adaptive quadrature, and the Duhamel residual of a truncated expansion.

use std::sync::Arc;

use num_complex::Complex64;

use super::enumerate::enumerate_trees;
use super::equation::EquationSpec;
use super::eval::{multiplier_weights, multiply, Evaluator, Inputs};
use super::quadrature::integrate;
use super::upsilon::upsilon;
use crate::error::{Error, Result};
use crate::operator_algebra::{coef_to_c64, OperatorExpr};
use crate::spectral_backend::{Field, Grid};
use crate::tree_core::{symmetry_factor_root, DecoratedTree, PlusLabel};

/// Default absolute tolerance of the quadrature oracle.
pub const ORACLE_TOL: f64 = 1e-12;

/// `Π ℐ_o(T)` with all ξ-independent data precomputed.
pub struct ExactTree {
    grid: Arc<Grid>,
    lo: OperatorExpr,
    outer: Vec<Complex64>,
    ups: Vec<(Complex64, Vec<(OperatorExpr, Field)>)>,
    potential: Option<Field>,
    poly_power: u32,
    children: Vec<ExactTree>,
    tol: f64,
}

impl ExactTree {
    pub fn new(eq: &EquationSpec, o: &PlusLabel, t: &DecoratedTree, inputs: &Inputs, tol: f64) -> Result<Self> {
        let grid = inputs
            .values()
            .next()
            .ok_or_else(|| Error::Usage("no input fields".into()))?
            .grid()
            .clone();
        let driver = t
            .root
            .driver
            .ok_or_else(|| Error::Usage(format!("tree {t} has an undecorated root")))?;
        let inter = eq
            .interaction(o, driver)
            .ok_or_else(|| Error::Spec(format!("no interaction for ({o}, {driver})")))?;
        let mut ev = Evaluator::new(grid.clone(), 0.0);
        let sym = symmetry_factor_root(t) as f64;
        let mut ups = Vec::new();
        for u in upsilon(eq, o, t)? {
            let mut fs = Vec::new();
            for f in &u.factors {
                fs.push((f.op.clone(), ev.eval(&f.term, inputs)?));
            }
            ups.push((coef_to_c64(&u.coef) / sym, fs));
        }
        let potential = match &inter.potential {
            None => None,
            Some(name) => Some(
                inputs
                    .get(name)
                    .cloned()
                    .ok_or_else(|| Error::Spec(format!("missing input field `{name}`")))?,
            ),
        };
        let children = t
            .children()
            .iter()
            .map(|c| ExactTree::new(eq, &c.edge, &c.tree, inputs, tol))
            .collect::<Result<Vec<_>>>()?;
        Ok(ExactTree {
            outer: multiplier_weights(&grid, &inter.outer, 0.0)?,
            grid,
            lo: eq.op(o)?.clone(),
            ups,
            potential,
            poly_power: t.root.poly_power,
            children,
            tol,
        })
    }

    /// `Π̃_o(T)(ξ)`.
    pub fn integrand(&self, xi: f64) -> Result<Field> {
        let mut acc = Field::zeros(&self.grid);
        let mut shared = Vec::new();
        if let Some(p) = &self.potential {
            shared.push(p.clone());
        }
        for c in &self.children {
            shared.push(c.value(xi)?);
        }
        for (c, fs) in &self.ups {
            let mut parts = fs
                .iter()
                .map(|(op, f)| f.semigroup(op, xi))
                .collect::<Result<Vec<_>>>()?;
            parts.extend(shared.iter().cloned());
            acc.add_assign_scaled(&multiply(&parts), *c);
        }
        let acc = acc.apply_weights(&self.outer);
        Ok(acc.scale(Complex64::new(xi.powi(self.poly_power as i32), 0.0)))
    }

    /// `Π ℐ_o(T)(t) = ∫₀^t e^{(t−ξ)L_o} Π̃_o(T)(ξ) dξ`.
    pub fn value(&self, t: f64) -> Result<Field> {
        let mut f = |xi: f64| -> Result<Vec<Complex64>> {
            let g = self.integrand(xi)?.semigroup(&self.lo, t - xi)?;
            Ok(g.spectral().into_owned())
        };
        let v = integrate(&mut f, 0.0, t, self.tol, self.grid.length())?;
        Ok(Field::from_spectral(self.grid.clone(), v))
    }
}

/// `Π ℐ_o(T)(τ)` by quadrature.
pub fn pi_exact(eq: &EquationSpec, o: &PlusLabel, t: &DecoratedTree, inputs: &Inputs, tau: f64) -> Result<Field> {
    ExactTree::new(eq, o, t, inputs, ORACLE_TOL)?.value(tau)
}

/// `w^r_o(τ) − [e^{τL_o}v + ∫₀^τ e^{(τ−ξ)L_o} N_o(w^r(ξ)) dξ]` where
/// `w^r_c = e^{ξL_c}v_c + Σ_{n₊(T) ≤ r} Π ℐ_c(T)`. Of size `O(τ^{r+2})`.
pub fn duhamel_residual(eq: &EquationSpec, o: &PlusLabel, r: u32, inputs: &Inputs, tau: f64) -> Result<Field> {
    let grid = inputs
        .get(&o.0)
        .ok_or_else(|| Error::Spec(format!("missing input field `{o}`")))?
        .grid()
        .clone();
    let mut comps = Vec::new();
    for c in &eq.components {
        let trees = enumerate_trees(eq, r + 1, &c.label)?
            .iter()
            .map(|t| ExactTree::new(eq, &c.label, t, inputs, ORACLE_TOL))
            .collect::<Result<Vec<_>>>()?;
        let v = inputs
            .get(&c.label.0)
            .ok_or_else(|| Error::Spec(format!("missing input field `{}`", c.label)))?
            .clone();
        comps.push((c.label.clone(), c.op.clone(), v, trees));
    }
    let w = |label: &PlusLabel, xi: f64| -> Result<Field> {
        let (_, op, v, trees) = comps.iter().find(|c| &c.0 == label).expect("component registered");
        let mut acc = v.semigroup(op, xi)?;
        for t in trees {
            acc = acc.add(&t.value(xi)?);
        }
        Ok(acc)
    };
    let w_all = |xi: f64| -> Result<Vec<(PlusLabel, Field)>> {
        comps.iter().map(|c| Ok((c.0.clone(), w(&c.0, xi)?))).collect()
    };
    let lo = eq.op(o)?.clone();
    let outers: Vec<(Vec<Complex64>, &super::equation::Interaction)> = eq
        .interactions_of(o)
        .map(|i| Ok((multiplier_weights(&grid, &i.outer, 0.0)?, i)))
        .collect::<Result<Vec<_>>>()?;
    let mut integrand = |xi: f64| -> Result<Vec<Complex64>> {
        let ws = w_all(xi)?;
        let mut acc = Field::zeros(&grid);
        for (wts, inter) in &outers {
            let mut parts = Vec::new();
            for (label, f) in &inter.factors {
                let wl = &ws.iter().find(|x| &x.0 == label).expect("component registered").1;
                parts.push(wl.map(|z| f.eval(z)));
            }
            if let Some(name) = &inter.potential {
                parts.push(inputs[name].clone());
            }
            acc = acc.add(&multiply(&parts).apply_weights(wts));
        }
        Ok(acc.semigroup(&lo, tau - xi)?.spectral().into_owned())
    };
    let duhamel = integrate(&mut integrand, 0.0, tau, ORACLE_TOL * tau, grid.length())?;
    let w_tau = w(o, tau)?;
    let free = inputs[&o.0].semigroup(&lo, tau)?;
    let d = Field::from_spectral(grid.clone(), duhamel);
    Ok(w_tau.sub(&free).sub(&d))
}
