//! Hand-coded Gross–Pitaevskii and sine-Gordon integrators, classical
//! baselines, filter stabilisation, the Klein–Gordon change of variables and
//! a Richardson-certified reference solver.
//!
//! Conventions: `i∂_t u = −Δu + |u|²u + V u` for GP and
//! `∂_t u = i⟨∇⟩_m u + i⟨∇⟩_m⁻¹ sin(Re u)` for sine-Gordon in the variable
//! `u = z − i⟨∇⟩_m⁻¹ ∂_t z`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scheme_engine::{build_scheme, multiply, EquationKind, EquationSpec, Evaluator, RegularityDomain};
use crate::spectral_backend::{phi, Field, Grid};
use crate::tree_core::PlusLabel;

/// Agreement demanded of two successive Richardson extrapolations.
pub const REFERENCE_TOL: f64 = 1e-9;

/// Minimal ratio `τ / τ_ref` between a tested step and the reference step.
pub const REFERENCE_REFINEMENT: f64 = 64.0;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeId {
    Gp1,
    Gp1Classical,
    Gp2,
    Gp2Stab,
    Sg1,
    Sg1Classical,
    Engine,
}

impl SchemeId {
    pub fn is_sine_gordon(self) -> bool {
        matches!(self, SchemeId::Sg1 | SchemeId::Sg1Classical)
    }

    pub fn name(self) -> &'static str {
        match self {
            SchemeId::Gp1 => "gp1",
            SchemeId::Gp1Classical => "gp1_classical",
            SchemeId::Gp2 => "gp2",
            SchemeId::Gp2Stab => "gp2_stab",
            SchemeId::Sg1 => "sg1",
            SchemeId::Sg1Classical => "sg1_classical",
            SchemeId::Engine => "engine",
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "gp1" => SchemeId::Gp1,
            "gp1_classical" => SchemeId::Gp1Classical,
            "gp2" => SchemeId::Gp2,
            "gp2_stab" => SchemeId::Gp2Stab,
            "sg1" => SchemeId::Sg1,
            "sg1_classical" => SchemeId::Sg1Classical,
            "engine" | "engine-derived" => SchemeId::Engine,
            other => return Err(Error::Usage(format!("unknown scheme '{other}'"))),
        })
    }
}

/// What the engine-derived stepper is built from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EngineSpec {
    pub kind: EquationKind,
    pub order: u32,
    pub sobolev: f64,
}

/// A validated stepping configuration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepperConfig {
    pub scheme: SchemeId,
    pub tau: f64,
    pub mass: Rational64,
    pub stab_order: u32,
    pub engine: Option<EngineSpec>,
}

impl StepperConfig {
    pub fn new(scheme: SchemeId, tau: f64) -> Result<Self> {
        Self { scheme, tau, mass: Rational64::from_integer(1), stab_order: 2, engine: None }.validated()
    }

    pub fn engine(spec: EngineSpec, tau: f64) -> Result<Self> {
        Self { scheme: SchemeId::Engine, tau, mass: Rational64::from_integer(1), stab_order: 2, engine: Some(spec) }
            .validated()
    }

    pub fn with_tau(&self, tau: f64) -> Result<Self> {
        Self { tau, ..self.clone() }.validated()
    }

    pub fn with_mass(&self, mass: Rational64) -> Result<Self> {
        Self { mass, ..self.clone() }.validated()
    }

    pub fn with_stab_order(&self, p: u32) -> Result<Self> {
        Self { stab_order: p, ..self.clone() }.validated()
    }

    fn uses_mass(&self) -> bool {
        self.scheme.is_sine_gordon() || self.engine.is_some_and(|e| e.kind == EquationKind::Sg)
    }

    fn validated(self) -> Result<Self> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::Validation(format!("step size must be positive, got {}", self.tau)));
        }
        if self.uses_mass() && self.mass.is_zero() {
            return Err(Error::Validation("sine-Gordon needs a nonzero mass".into()));
        }
        if self.scheme == SchemeId::Gp2Stab && self.stab_order < 1 {
            return Err(Error::Validation("stabiliser order must be at least 1".into()));
        }
        match (self.scheme, &self.engine) {
            (SchemeId::Engine, None) => Err(Error::Validation("engine stepper needs an equation and order".into())),
            (SchemeId::Engine, Some(e)) if e.order == 0 => {
                Err(Error::Validation("scheme order must be at least 1".into()))
            }
            _ => Ok(self),
        }
    }
}

/// Per-mode weights of `symbol`, with the Nyquist coefficient averaged over
/// `±k` like [`Field::apply_symbol`].
fn symbol_weights(grid: &Grid, symbol: impl Fn(f64) -> Complex64) -> Vec<Complex64> {
    let ny = grid.nyquist();
    grid.wavenumbers()
        .iter()
        .enumerate()
        .map(|(j, &k)| if j == ny { 0.5 * (symbol(k.abs()) + symbol(-k.abs())) } else { symbol(k) })
        .collect()
}

fn prod(a: &Field, b: &Field) -> Field {
    multiply(&[a.clone(), b.clone()])
}

fn zeros_like(u: &Field, v: Option<&Field>) -> Field {
    v.cloned().unwrap_or_else(|| Field::zeros(u.grid()))
}

fn check_grid(u: &Field, v: &Field) -> Result<()> {
    if u.grid().same_as(v.grid()) {
        Ok(())
    } else {
        Err(Error::Usage("solution and potential live on different grids".into()))
    }
}

/// `Ψ_p = φ₁(iτ|∇|)^{p−1}`; the identity for `p = 1`.
pub fn filter(f: &Field, tau: f64, p: u32) -> Field {
    f.apply_symbol(|k| filter_symbol(k, tau, p))
}

fn filter_symbol(k: f64, tau: f64, p: u32) -> Complex64 {
    phi(1, I * tau * k.abs()).powu(p.saturating_sub(1))
}

/// Multipliers of the GP schemes at a fixed grid and step size. `e` is
/// `e^{iτΔ}`, `e_phi{j}_{c}` is `e^{iτΔ}φ_j(−c·iτΔ)`, `e_res_{c}` is
/// `e^{iτΔ}(φ₁ − φ₂)(−c·iτΔ)`.
struct GpKernel {
    grid: Arc<Grid>,
    tau: f64,
    lap: Vec<Complex64>,
    e: Vec<Complex64>,
    e_phi1_1: Vec<Complex64>,
    e_phi1_2: Vec<Complex64>,
    e_phi2_2: Vec<Complex64>,
    e_res_1: Vec<Complex64>,
    e_res_2: Vec<Complex64>,
    psi: Option<Vec<Complex64>>,
}

impl GpKernel {
    fn new(grid: &Arc<Grid>, tau: f64, stab: Option<u32>) -> Self {
        let w = |f: &dyn Fn(f64) -> Complex64| symbol_weights(grid, f);
        let e = |k: f64| (-I * tau * k * k).exp();
        let s = |c: f64, k: f64| I * tau * c * k * k;
        GpKernel {
            grid: grid.clone(),
            tau,
            lap: w(&|k| I * (-k * k)),
            e: w(&e),
            e_phi1_1: w(&|k| e(k) * phi(1, s(1.0, k))),
            e_phi1_2: w(&|k| e(k) * phi(1, s(2.0, k))),
            e_phi2_2: w(&|k| e(k) * phi(2, s(2.0, k))),
            e_res_1: w(&|k| e(k) * (phi(1, s(1.0, k)) - phi(2, s(1.0, k)))),
            e_res_2: w(&|k| e(k) * (phi(1, s(2.0, k)) - phi(2, s(2.0, k)))),
            psi: stab.map(|p| w(&|k| filter_symbol(k, tau, p))),
        }
    }

    fn check(&self, u: &Field, v: &Field) -> Result<()> {
        check_grid(u, v)?;
        if u.grid().same_as(&self.grid) {
            Ok(())
        } else {
            Err(Error::Usage("field lives on a different grid than the stepper".into()))
        }
    }

    /// `iΔ f`.
    fn il(&self, f: &Field) -> Field {
        f.apply_weights(&self.lap)
    }

    fn psi(&self, f: Field) -> Field {
        match &self.psi {
            Some(w) => f.apply_weights(w),
            None => f,
        }
    }

    fn gp1(&self, u: &Field, v: &Field) -> Result<Field> {
        self.check(u, v)?;
        let ub = u.conj();
        let a = prod(&u.apply_weights(&self.e), &v.apply_weights(&self.e_phi1_1));
        let b = prod(&prod(u, u).apply_weights(&self.e), &ub.apply_weights(&self.e_phi1_2));
        Ok(u.apply_weights(&self.e).sub(&a.add(&b).scale(I * self.tau)))
    }

    fn gp1_classical(&self, u: &Field, v: &Field) -> Result<Field> {
        self.check(u, v)?;
        let n = prod(u, v).add(&multiply(&[u.clone(), u.clone(), u.conj()]));
        Ok(u.apply_weights(&self.e).sub(&n.scale(I * self.tau)))
    }

    /// `𝒞[H, iΔ](a, b) = −iΔ H(a,b) + H(iΔa, b) + H(a, iΔb)` for
    /// `H(x, y) = (e^{iτΔ}x)(res·y)`.
    fn resonant_commutator(&self, a: &Field, b: &Field, res: &[Complex64]) -> Field {
        let h = |x: &Field, y: &Field| prod(&x.apply_weights(&self.e), &y.apply_weights(res));
        self.il(&h(a, b)).scale(re(-1.0)).add(&h(&self.il(a), b)).add(&h(a, &self.il(b)))
    }

    /// `𝒞[u², iΔ](u) = −iΔ(u²) + 2u·iΔu`.
    fn square_commutator(&self, u: &Field) -> Field {
        self.il(&prod(u, u)).scale(re(-1.0)).add(&prod(u, &self.il(u)).scale(re(2.0)))
    }

    fn gp2(&self, u: &Field, v: &Field) -> Result<Field> {
        self.check(u, v)?;
        let tau = self.tau;
        let ub = u.conj();
        let vb = v.conj();
        let u2 = prod(u, u);
        let first = prod(&u2.apply_weights(&self.e), &ub.apply_weights(&self.e_phi1_2))
            .add(&prod(&u.apply_weights(&self.e), &v.apply_weights(&self.e_phi1_1)));
        let comm = self
            .resonant_commutator(&u2, &ub, &self.e_res_2)
            .add(&self.resonant_commutator(u, v, &self.e_res_1));
        let sq = prod(
            &self.psi(self.square_commutator(u)).apply_weights(&self.e),
            &ub.apply_weights(&self.e_phi2_2),
        );
        let m = prod(u, &ub);
        let tail = multiply(&[u.clone(), m.clone(), m.clone()])
            .add(&multiply(&[u.clone(), m.clone(), v.clone()]).scale(re(3.0)))
            .sub(&multiply(&[u.clone(), m, vb]))
            .add(&multiply(&[u.clone(), v.clone(), v.clone()]));
        let t2 = tau * tau;
        Ok(u.apply_weights(&self.e)
            .sub(&first.scale(I * tau))
            .add(&self.psi(comm).scale(I * t2))
            .sub(&sq.scale(I * t2))
            .sub(&tail.scale(re(0.5 * t2))))
    }
}

/// The first-order resonance-based GP step.
pub fn step_gp1(u: &Field, v: &Field, tau: f64) -> Result<Field> {
    GpKernel::new(u.grid(), tau, None).gp1(u, v)
}

/// Lie-type baseline `e^{iτΔ}u − iτ(uV + u²ū)`.
pub fn step_gp1_classical(u: &Field, v: &Field, tau: f64) -> Result<Field> {
    GpKernel::new(u.grid(), tau, None).gp1_classical(u, v)
}

/// The second-order resonance-based GP step.
///
/// The two `(φ₁−φ₂)` commutator lines enter with `+iτ²`: the ξ-integral that
/// produces them carries the weight `(ξ−τ)`, and the quadrature oracle
/// confirms `O(τ³)` per tree only with this sign.
pub fn step_gp2(u: &Field, v: &Field, tau: f64) -> Result<Field> {
    GpKernel::new(u.grid(), tau, None).gp2(u, v)
}

/// [`step_gp2`] with `Ψ_p` in front of every commutator term.
pub fn step_gp2_stab(u: &Field, v: &Field, tau: f64, p: u32) -> Result<Field> {
    GpKernel::new(u.grid(), tau, Some(p)).gp2(u, v)
}

fn nonzero_mass(mass: Rational64) -> Result<f64> {
    if mass.is_zero() {
        return Err(Error::Validation("sine-Gordon needs a nonzero mass".into()));
    }
    Ok(mass.to_f64().unwrap_or(0.0))
}

fn bracket_symbol(k: f64, m: f64) -> f64 {
    (k * k + m * m).sqrt()
}

fn inv_bracket(f: &Field, m: f64) -> Field {
    f.apply_symbol(|k| re(1.0 / bracket_symbol(k, m)))
}

fn half_sin(f: &Field) -> Field {
    f.map(|z| (0.5 * z).sin())
}

fn half_cos(f: &Field) -> Field {
    f.map(|z| (0.5 * z).cos())
}

/// Multipliers of the sine-Gordon schemes: `e = e^{iτ⟨∇⟩}`,
/// `e_phi = e^{iτ⟨∇⟩}φ₁(−2iτ⟨∇⟩)`, `inv = iτ⟨∇⟩⁻¹`.
struct SgKernel {
    e: Vec<Complex64>,
    e_phi: Vec<Complex64>,
    inv: Vec<Complex64>,
}

impl SgKernel {
    fn new(grid: &Arc<Grid>, mass: Rational64, tau: f64) -> Result<Self> {
        let m = nonzero_mass(mass)?;
        let e = |k: f64| (I * tau * bracket_symbol(k, m)).exp();
        Ok(SgKernel {
            e: symbol_weights(grid, e),
            e_phi: symbol_weights(grid, |k| e(k) * phi(1, -2.0 * I * tau * bracket_symbol(k, m))),
            inv: symbol_weights(grid, |k| I * tau / bracket_symbol(k, m)),
        })
    }

    fn sg1(&self, u: &Field) -> Field {
        let ub = u.conj();
        let a = prod(&half_sin(u).apply_weights(&self.e), &half_cos(&ub).apply_weights(&self.e_phi));
        let b = prod(&half_cos(u).apply_weights(&self.e), &half_sin(&ub).apply_weights(&self.e_phi));
        u.apply_weights(&self.e).add(&a.add(&b).apply_weights(&self.inv))
    }

    fn sg1_classical(&self, u: &Field) -> Field {
        let ub = u.conj();
        let n = prod(&half_sin(u), &half_cos(&ub)).add(&prod(&half_cos(u), &half_sin(&ub)));
        u.apply_weights(&self.e).add(&n.apply_weights(&self.inv))
    }
}

/// The first-order resonance-based sine-Gordon step.
pub fn step_sg1(u: &Field, mass: Rational64, tau: f64) -> Result<Field> {
    Ok(SgKernel::new(u.grid(), mass, tau)?.sg1(u))
}

/// Classical baseline `e^{iτ⟨∇⟩}u + iτ⟨∇⟩⁻¹ sin(Re u)` in split form.
pub fn step_sg1_classical(u: &Field, mass: Rational64, tau: f64) -> Result<Field> {
    Ok(SgKernel::new(u.grid(), mass, tau)?.sg1_classical(u))
}

/// `u = z − i⟨∇⟩_m⁻¹ z_t`.
pub fn kg_to_u(z: &Field, zt: &Field, mass: Rational64) -> Result<Field> {
    let m = nonzero_mass(mass)?;
    check_grid(z, zt)?;
    Ok(z.sub(&inv_bracket(zt, m).scale(I)))
}

/// Inverse of [`kg_to_u`]: `z = Re u`, `z_t = −⟨∇⟩_m Im u`.
pub fn u_to_kg(u: &Field, mass: Rational64) -> Result<(Field, Field)> {
    let m = nonzero_mass(mass)?;
    let z = u.map(|x| re(x.re));
    let im = u.map(|x| re(x.im));
    Ok((z, im.apply_symbol(|k| re(-bracket_symbol(k, m)))))
}

/// An engine-derived scheme bound to a grid and step size.
struct EngineStepper {
    eq: EquationSpec,
    term: crate::scheme_engine::Term,
    eval: Evaluator,
}

enum Kernel {
    Gp(GpKernel),
    Sg(SgKernel),
    Engine(Box<EngineStepper>),
}

/// A configured one-step map with its multipliers precomputed.
pub struct Stepper {
    config: StepperConfig,
    potential: Option<Field>,
    kernel: Kernel,
}

impl Stepper {
    /// Binds a configuration to a grid. GP schemes use a zero potential when
    /// none is given.
    pub fn new(config: StepperConfig, grid: &Arc<Grid>, potential: Option<&Field>) -> Result<Self> {
        if let Some(p) = potential {
            if !p.grid().same_as(grid) {
                return Err(Error::Usage("potential lives on a different grid".into()));
            }
        }
        let tau = config.tau;
        let kernel = match config.scheme {
            SchemeId::Engine => {
                let spec = config.engine.expect("validated engine configuration");
                let eq = match spec.kind {
                    EquationKind::Sg => EquationSpec::sg(config.mass),
                    k => EquationSpec::from_kind(k),
                };
                let scheme = build_scheme(&eq, &PlusLabel::new("o"), spec.order, RegularityDomain::new(spec.sobolev))?;
                Kernel::Engine(Box::new(EngineStepper { eq, term: scheme.term, eval: Evaluator::new(grid.clone(), tau) }))
            }
            SchemeId::Sg1 | SchemeId::Sg1Classical => Kernel::Sg(SgKernel::new(grid, config.mass, tau)?),
            SchemeId::Gp2Stab => Kernel::Gp(GpKernel::new(grid, tau, Some(config.stab_order))),
            _ => Kernel::Gp(GpKernel::new(grid, tau, None)),
        };
        Ok(Stepper { config, potential: potential.cloned(), kernel })
    }

    pub fn config(&self) -> &StepperConfig {
        &self.config
    }

    pub fn tau(&self) -> f64 {
        self.config.tau
    }

    pub fn step(&mut self, u: &Field) -> Result<Field> {
        let v = || zeros_like(u, self.potential.as_ref());
        match (&mut self.kernel, self.config.scheme) {
            (Kernel::Gp(k), SchemeId::Gp1) => k.gp1(u, &v()),
            (Kernel::Gp(k), SchemeId::Gp1Classical) => k.gp1_classical(u, &v()),
            (Kernel::Gp(k), _) => k.gp2(u, &v()),
            (Kernel::Sg(k), SchemeId::Sg1) => Ok(k.sg1(u)),
            (Kernel::Sg(k), _) => Ok(k.sg1_classical(u)),
            (Kernel::Engine(e), _) => {
                let pot = if e.eq.uses_potential() { Some(zeros_like(u, self.potential.as_ref())) } else { None };
                let inputs = e.eq.inputs(u, pot.as_ref());
                e.eval.eval(&e.term, &inputs)
            }
        }
    }

    /// Number of steps that reach `t_end` exactly.
    pub fn steps_to(&self, t_end: f64) -> Result<usize> {
        steps_to(t_end, self.config.tau)
    }

    /// Runs from `u0` to `t_end`.
    pub fn run(&mut self, u0: &Field, t_end: f64) -> Result<Field> {
        let n = self.steps_to(t_end)?;
        let mut u = u0.clone();
        for _ in 0..n {
            u = self.step(&u)?;
        }
        Ok(u)
    }
}

fn steps_to(t_end: f64, tau: f64) -> Result<usize> {
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::Validation(format!("final time must be nonnegative, got {t_end}")));
    }
    let n = (t_end / tau).round();
    if (n * tau - t_end).abs() > 1e-9 * t_end.max(1.0) {
        return Err(Error::Validation(format!("τ = {tau} does not divide T = {t_end}")));
    }
    Ok(n as usize)
}

/// A certified high-accuracy solution.
#[derive(Clone, Debug)]
pub struct Reference {
    pub solution: Field,
    /// Finest step used.
    pub tau: f64,
    /// `‖R₁ − R₂‖_{L²}` between the two Richardson extrapolations.
    pub agreement: f64,
    /// `‖u_h − u_{h/2}‖ / ‖u_{h/2} − u_{h/4}‖`, about 4 for a second-order method.
    pub ratio: f64,
}

/// Halvings of the reference step tried before the reference is declared
/// unconverged.
pub const REFERENCE_MAX_HALVINGS: u32 = 3;

/// Runs at `h`, `h/2`, `h/4` reduced to an extrapolation.
fn extrapolate(runs: &[Field; 3], h: f64) -> Reference {
    let [a, b, c] = runs;
    let d1 = a.sub(b);
    let d2 = b.sub(c);
    // u_h = u + Ch² + O(h³) ⇒ u ≈ u_{h/2} + (u_{h/2} − u_h)/3
    let r1 = b.sub(&d1.scale(re(1.0 / 3.0)));
    let r2 = c.sub(&d2.scale(re(1.0 / 3.0)));
    Reference { agreement: r1.sub(&r2).l2_norm(), ratio: d1.l2_norm() / d2.l2_norm(), solution: r2, tau: h / 4.0 }
}

/// Halves `h` until two successive extrapolations agree to [`REFERENCE_TOL`],
/// reusing the finer runs of the previous triple.
fn certify(run: impl Fn(f64) -> Result<Field> + Sync, h: f64) -> Result<Reference> {
    let (a, (b, c)) = rayon::join(|| run(h), || rayon::join(|| run(h / 2.0), || run(h / 4.0)));
    let mut runs = [a?, b?, c?];
    let mut h = h;
    for halving in 0..=REFERENCE_MAX_HALVINGS {
        let r = extrapolate(&runs, h);
        if r.agreement <= REFERENCE_TOL {
            return Ok(r);
        }
        if halving == REFERENCE_MAX_HALVINGS {
            return Err(Error::Oracle(format!(
                "reference at τ = {:.3e} not converged: Richardson extrapolations differ by {:.3e} > {REFERENCE_TOL:.0e}",
                r.tau, r.agreement
            )));
        }
        h /= 2.0;
        let [_, b, c] = runs;
        runs = [b, c, run(h / 4.0)?];
    }
    unreachable!("the last halving returns")
}

/// Richardson-certified solution of a second-order one-step method run at
/// `h`, `h/2`, `h/4` and finer if needed. `step(u, τ)` advances by one step
/// of size `τ`.
pub fn reference_solve_with<F>(step: F, u0: &Field, t_end: f64, h: f64) -> Result<Reference>
where
    F: Fn(&Field, f64) -> Result<Field> + Sync,
{
    let run = |tau: f64| -> Result<Field> {
        let mut u = u0.clone();
        for _ in 0..steps_to(t_end, tau)? {
            u = step(&u, tau)?;
        }
        Ok(u)
    };
    certify(run, h)
}

/// Largest `τ_ref ≤ τ_min / 64` dividing `t_end` into a power-of-two number of steps.
pub fn reference_tau(tau_min: f64, t_end: f64) -> f64 {
    let target = tau_min / REFERENCE_REFINEMENT;
    let n = (t_end / target).log2().ceil().max(0.0);
    t_end / 2f64.powi(n as i32)
}

/// The reference method for an equation: `gp2` for GP and NLS, the
/// engine-derived second-order scheme with smooth-data branches for sine-Gordon.
pub fn reference_config(kind: EquationKind, tau: f64, mass: Rational64) -> Result<StepperConfig> {
    match kind {
        EquationKind::Gp | EquationKind::Nls => StepperConfig::new(SchemeId::Gp2, tau),
        EquationKind::Sg => StepperConfig::engine(EngineSpec { kind, order: 2, sobolev: REFERENCE_SOBOLEV }, tau)?
            .with_mass(mass),
    }
}

/// Regularity assumed by the sine-Gordon reference: high enough that every
/// branch is a full Taylor expansion.
pub const REFERENCE_SOBOLEV: f64 = 10.0;

/// Richardson-certified solution of `kind` from `u0` to `t_end`, at a
/// reference step refined at least 64× below `tau_min`.
pub fn reference_solve(
    kind: EquationKind,
    u0: &Field,
    potential: Option<&Field>,
    mass: Rational64,
    t_end: f64,
    tau_min: f64,
) -> Result<Reference> {
    let h = reference_tau(tau_min, t_end);
    let base = reference_config(kind, h, mass)?;
    let pot = if kind == EquationKind::Nls { None } else { potential };
    let grid = u0.grid().clone();
    let run = |tau: f64| -> Result<Field> { Stepper::new(base.with_tau(tau)?, &grid, pot)?.run(u0, t_end) };
    certify(run, h)
}
