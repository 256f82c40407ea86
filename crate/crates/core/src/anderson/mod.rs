//! The two-dimensional Anderson Hamiltonian and the one-dimensional singular resolvent.

mod eigen;
mod hamiltonian;
mod resolvent;
mod tail;

pub use eigen::{dense_spectrum, eigensolve, laplacian_spectrum, EigenConfig, SpectrumReport};
pub use hamiltonian::{
    apply, apply_classical, apply_hamiltonian, build_phi, domain_map, potential, symmetry_defect, AndersonEnhancement,
    ApplyMode, StronglyParacontrolled,
};
pub use resolvent::{dense_resolvent, solve_resolvent_1d, solve_with, ResolventData, ResolventSolution};
pub use tail::{lambda1_of, lambda1_samples, lambda1_tail, survival_fit, TailReport, MIN_TAIL_SAMPLES};

use crate::spectral::{lp_decompose, Field};

/// `(sum_i 2^{2 i alpha} ||Delta_i f||_{L^2}^2)^{1/2}` over the sharp blocks.
pub fn sobolev_norm(f: &Field, alpha: f64) -> f64 {
    lp_decompose(f)
        .blocks()
        .iter()
        .enumerate()
        .map(|(b, d)| 2f64.powf(2.0 * (b as f64 - 1.0) * alpha) * d.l2_norm().powi(2))
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::TorusGrid;

    #[test]
    fn sobolev_norm_of_a_mode() {
        let g = TorusGrid::new(2, 32).unwrap();
        let f = Field::mode(g, [5, 0], 1.0, 0.0);
        // |k| = 5 sits in block 2
        let want = 4f64.powf(0.5) * f.l2_norm();
        assert!((sobolev_norm(&f, 0.5) - want).abs() < 1e-12);
        assert!((sobolev_norm(&f, 0.0) - f.l2_norm()).abs() < 1e-12);
    }
}
