//! Symbolic derivation of tree-based schemes and their numerical evaluation.

mod enumerate;
mod equation;
mod eval;
mod exact;
mod kernel;
mod pi;
mod quadrature;
mod scalar_fn;
pub mod term;
mod upsilon;

pub use enumerate::enumerate_trees;
pub use equation::{Component, EquationKind, EquationSpec, Interaction, O, O_BAR, POTENTIAL, POTENTIAL_BAR};
pub use eval::{multiplier_weights, multiply, Evaluator, Inputs};
pub use exact::{duhamel_residual, pi_exact, ExactTree, ORACLE_TOL};
pub use kernel::{k_approx, k_approx_part, remainder, select_branch, Branch, Integrand, IntegrandFactor, PhiPart, TimeTerm};
pub use pi::{
    build_scheme, census, dominant_decomposition, DecompositionSummand, local_error_term, pi_approx, pi_term, pi_tilde, RegularityDomain, Scheme,
    TreeContribution,
};
pub use quadrature::integrate;
pub use scalar_fn::ScalarFn;
pub use term::{MultFactor, Multiplier, Term};
pub use upsilon::{upsilon, upsilon_at_zero, UpsFactor, UpsTerm};
