use serde::{Deserialize, Serialize};

use super::Mollifier;
use crate::spectral::TorusGrid;

/// Which divergent expectation a counterterm cancels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RenormKind {
    /// `E[X o xi]` with `-Delta X = xi`: `sum_{k != 0} rho^2 / (4 pi^2 |k|^2)`.
    GpamResonant,
    /// Stationary `E[X^2]` for `(d/dt - Delta + 1) X = xi`: `sum_{k != 0} rho^2 / (2 (1 + 4 pi^2 |k|^2))`.
    Phi42Wick,
    /// Stationary `E[(d_x X)^2]` for `(d/dt - Delta) X = xi`: `sum_{k != 0} rho^2 / 2`.
    KpzSquare,
}

/// Counterterm on the grid; sums run over the grid modes in storage order.
pub fn renormalization_constant(grid: &TorusGrid, eps: f64, kernel: Mollifier, kind: RenormKind) -> f64 {
    let vol = grid.volume();
    let mut acc = 0.0;
    for idx in 1..grid.len() {
        let rho = kernel.symbol(grid, idx, eps);
        if rho == 0.0 {
            continue;
        }
        let lam = grid.neg_laplacian_symbol(idx);
        let r2 = rho * rho / vol;
        acc += match kind {
            RenormKind::GpamResonant => r2 / lam,
            RenormKind::Phi42Wick => r2 / (2.0 * (1.0 + lam)),
            RenormKind::KpzSquare => r2 / 2.0,
        };
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_grow_as_eps_shrinks() {
        let g = TorusGrid::new(2, 128).unwrap();
        for kind in [RenormKind::GpamResonant, RenormKind::Phi42Wick] {
            let a = renormalization_constant(&g, 0.1, Mollifier::Gaussian, kind);
            let b = renormalization_constant(&g, 0.05, Mollifier::Gaussian, kind);
            assert!(b > a && a > 0.0);
        }
    }

    #[test]
    fn fejer_constant_is_finite_sum_over_support() {
        let g = TorusGrid::new(1, 64).unwrap();
        // support |k| < 4: k = +-1, +-2, +-3
        let c = renormalization_constant(&g, 0.25, Mollifier::Fejer, RenormKind::KpzSquare);
        let expect = (0.75f64.powi(2) + 0.5f64.powi(2) + 0.25f64.powi(2)) * 2.0 / 2.0;
        assert!((c - expect).abs() < 1e-14);
    }
}
