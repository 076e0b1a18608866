//! Numerical evaluation of scheme terms on a spectral grid.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_complex::Complex64;

use super::term::{Multiplier, Node, Term};
use crate::error::{Error, Result};
use crate::operator_algebra::coef_to_c64;
use crate::spectral_backend::{dealiased_product, Basis, Field, Grid};

/// Named input fields.
pub type Inputs = BTreeMap<String, Field>;

/// Per-coefficient weights of a multiplier, Nyquist-averaged like
/// [`Field::apply_symbol`].
pub fn multiplier_weights(grid: &Grid, m: &Multiplier, tau: f64) -> Result<Vec<Complex64>> {
    if grid.basis() == Basis::Dirichlet && m.uses_dx() {
        return Err(Error::Unsupported("∂x breaks parity on the sine basis".into()));
    }
    let ny = grid.nyquist();
    Ok(grid
        .wavenumbers()
        .iter()
        .enumerate()
        .map(|(j, &k)| {
            if j == ny {
                0.5 * (m.weight(k.abs(), tau) + m.weight(-k.abs(), tau))
            } else {
                m.weight(k, tau)
            }
        })
        .collect())
}

/// Product of fields, dealiased when the grid asks for it.
pub fn multiply(fields: &[Field]) -> Field {
    let grid = fields[0].grid();
    if grid.dealias() && fields.len() > 1 {
        return dealiased_product(&fields.iter().collect::<Vec<_>>());
    }
    let mut it = fields.iter();
    let first = it.next().expect("nonempty product").clone();
    it.fold(first, |acc, f| acc.mul(f))
}

/// Evaluates terms at a fixed step size, caching multiplier weights across
/// calls and memoising slot-free subterms within one call. Structurally equal
/// subterms share one memo entry: each node is interned once by its printed
/// form, and the held `Term` keeps its address from being reused.
pub struct Evaluator {
    grid: Arc<Grid>,
    tau: f64,
    weights: HashMap<usize, (Term, Arc<Vec<Complex64>>)>,
    ids: HashMap<usize, (Term, usize)>,
    interned: HashMap<String, usize>,
}

impl Evaluator {
    pub fn new(grid: Arc<Grid>, tau: f64) -> Self {
        Evaluator { grid, tau, weights: HashMap::new(), ids: HashMap::new(), interned: HashMap::new() }
    }

    fn struct_id(&mut self, t: &Term) -> usize {
        let key = Arc::as_ptr(t) as usize;
        if let Some((_, id)) = self.ids.get(&key) {
            return *id;
        }
        let next = self.interned.len();
        let id = *self.interned.entry(t.to_string()).or_insert(next);
        self.ids.insert(key, (t.clone(), id));
        id
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    /// Value of a slot-free term.
    pub fn eval(&mut self, t: &Term, inputs: &Inputs) -> Result<Field> {
        let mut memo = HashMap::new();
        self.eval_in(t, inputs, &[], &mut memo)
    }

    fn multiplier_weights(&mut self, t: &Term, m: &Multiplier) -> Result<Arc<Vec<Complex64>>> {
        let key = Arc::as_ptr(t) as usize;
        if let Some((_, w)) = self.weights.get(&key) {
            return Ok(w.clone());
        }
        let w = Arc::new(multiplier_weights(&self.grid, m, self.tau)?);
        self.weights.insert(key, (t.clone(), w.clone()));
        Ok(w)
    }

    fn eval_in(
        &mut self,
        t: &Term,
        inputs: &Inputs,
        slots: &[Field],
        memo: &mut HashMap<usize, Field>,
    ) -> Result<Field> {
        let slot_free = !t.has_slots();
        let key = if slot_free { self.struct_id(t) } else { 0 };
        if slot_free {
            if let Some(f) = memo.get(&key) {
                return Ok(f.clone());
            }
        }
        let out = match t.node() {
            Node::Input(name) => {
                let f = inputs
                    .get(name)
                    .ok_or_else(|| Error::Spec(format!("missing input field `{name}`")))?;
                if !f.grid().same_as(&self.grid) {
                    return Err(Error::Usage(format!("input `{name}` lives on a different grid")));
                }
                f.clone()
            }
            Node::Slot(i) => slots
                .get(*i)
                .cloned()
                .ok_or_else(|| Error::Usage(format!("unbound slot #{i}")))?,
            Node::Const(c) => Field::constant(&self.grid, coef_to_c64(c)),
            Node::Scale { coef, tau_power, child } => {
                let f = self.eval_in(child, inputs, slots, memo)?;
                f.scale(coef_to_c64(coef) * self.tau.powi(*tau_power as i32))
            }
            Node::Mult { mult, child } => {
                let w = self.multiplier_weights(t, mult)?;
                let f = self.eval_in(child, inputs, slots, memo)?;
                f.apply_weights(&w)
            }
            Node::Pointwise { f, child } => {
                let x = self.eval_in(child, inputs, slots, memo)?;
                x.map(|z| f.eval(z))
            }
            Node::Product(v) => {
                let fs = v
                    .iter()
                    .map(|c| self.eval_in(c, inputs, slots, memo))
                    .collect::<Result<Vec<_>>>()?;
                multiply(&fs)
            }
            Node::Sum(v) => {
                let mut it = v.iter();
                let mut acc = self.eval_in(it.next().expect("nonempty sum"), inputs, slots, memo)?;
                for c in it {
                    let f = self.eval_in(c, inputs, slots, memo)?;
                    acc.add_assign_scaled(&f, Complex64::new(1.0, 0.0));
                }
                acc
            }
            Node::Commutator { .. } => match t.expansion() {
                None => Field::zeros(&self.grid),
                Some(e) => self.eval_in(e, inputs, slots, memo)?,
            },
        };
        if slot_free {
            memo.insert(key, out.clone());
        }
        Ok(out)
    }
}
