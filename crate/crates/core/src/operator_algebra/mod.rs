//! Linear differential operators as Fourier multipliers, operator sets and
//! dominant-frequency extraction.

mod dom_freq;
pub mod expr;
mod set;

pub use dom_freq::{l_dom, r_dom, r_dom_node, r_low};
pub use expr::{coef, coef_frac, coef_to_c64, fmt_coef, Coef, Generator, OperatorExpr};
pub use set::{max_op, ominus, oplus, p_dom, OperatorSet};
