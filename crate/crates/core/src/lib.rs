//! Irrotational flows around bodies with protruding corners.
//!
//! Incompressible flows around Kármán–Trefftz lenses are computed in closed
//! form ([`conformal`]); compressible subsonic flows are computed by a
//! finite-volume stream-function solver ([`solver`]) on body-fitted grids
//! ([`grid`]) with far-field data from [`farfield`]. [`analysis`] gathers the
//! corner-singularity, Kutta-incompatibility and non-existence experiments.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` deliberately rejects NaN

pub mod analysis;
pub mod conformal;
pub mod experiments;
pub mod farfield;
pub mod gas;
pub mod grid;
pub mod linalg;
pub mod par;
pub mod solver;

pub use conformal::{kutta_gamma, Corner, KTProfile};
pub use gas::GasModel;
