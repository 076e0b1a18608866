//! Spectral grids, fields, Fourier multipliers and φ-filters.

mod field;
mod grid;
mod phi;
mod rough;

pub use field::{dealiased_product, Field, Parity, SnapshotRow, Space};
pub use grid::{Basis, Grid};
pub use phi::phi;
pub use rough::{rough_data, rough_real_data, smooth_data, ROUGH_EPS};
