//! Counterterms diverge logarithmically as the mollification is removed.

use paracalc::stochastic::{renormalization_constant, Mollifier, RenormKind};
use paracalc::{Result, TorusGrid};

fn main() -> Result<()> {
    let grid = TorusGrid::new(2, 256)?;
    println!("{:>8} {:>10} {:>12} {:>12}", "eps", "kernel", "gpam c_eps", "phi42 c1");
    for kernel in [Mollifier::Gaussian, Mollifier::Fejer] {
        for k in 2..=6 {
            let eps = 0.5f64.powi(k);
            let c = renormalization_constant(&grid, eps, kernel, RenormKind::GpamResonant);
            let w = renormalization_constant(&grid, eps, kernel, RenormKind::Phi42Wick);
            println!("{eps:>8.5} {kernel:>10} {c:>12.5} {w:>12.5}");
        }
    }
    println!("slope against log(1/eps) is 1/(2 pi) = {:.5} for gPAM", 1.0 / (2.0 * std::f64::consts::PI));
    Ok(())
}
