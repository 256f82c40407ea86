//! Paracontrolled calculus on the periodic torus.
//!
//! Fields live on a uniform grid of `[0, L)^d`, `d` in {1, 2}. Products of
//! distributions are split into paraproducts and a resonant term using
//! Littlewood-Paley blocks; the commutators of paracontrolled calculus are
//! computed on the grid and used to assemble renormalized solvers for
//! singular SPDEs and the Anderson Hamiltonian.

// Argument checks are written `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod anderson;
pub mod error;
pub mod experiments;
pub mod io;
pub mod ops;
pub mod solvers;
pub mod spectral;
pub mod stochastic;

pub use error::{Error, Result};
pub use ops::{Paracalc, TimeField};
pub use spectral::{Field, Partition, TorusGrid};
