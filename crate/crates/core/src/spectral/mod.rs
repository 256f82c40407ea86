//! Grids, fields, FFT, Littlewood-Paley blocks and regularity estimation.

pub mod fft;
mod field;
mod grid;
pub mod lp;

pub use field::{Field, Spectrum};
pub use grid::TorusGrid;
pub use lp::{
    besov_norm, block_of_mode, default_window, estimate_regularity, linear_fit, lp_decompose, lp_decompose_with,
    slope_stderr, smooth_cutoff, LpDecomposition, Partition, RegularityEstimate,
};
