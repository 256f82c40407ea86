//! Littlewood-Paley blocks of white noise and the estimated regularity.

use paracalc::spectral::{besov_norm, estimate_regularity, lp_decompose_with};
use paracalc::stochastic::{sample_white_noise, synthesize_gaussian};
use paracalc::{Partition, Result, TorusGrid};

fn main() -> Result<()> {
    let grid = TorusGrid::new(2, 256)?;
    let xi = sample_white_noise(grid, 1);

    for partition in [Partition::Sharp, Partition::Smooth] {
        let d = lp_decompose_with(&xi, partition);
        let gap = (d.reconstruct().try_sub(&xi)?).sup_norm();
        println!("{partition:?}: {} blocks, reconstruction error {gap:.2e}", d.blocks().len());
        for (b, s) in d.sup_norms().iter().enumerate() {
            println!("  block {:>2}  sup {s:.4}", b as i32 - 1);
        }
    }

    let est = estimate_regularity(&xi, None)?;
    println!("white noise: alpha_hat = {:.3} +- {:.3} (expected -1)", est.alpha_hat, est.slope_stderr);
    println!("B^-1.5_inf,inf norm = {:.4}", besov_norm(&xi, -1.5));

    for alpha in [-0.5, 0.5] {
        let f = synthesize_gaussian(grid, alpha, 2);
        let est = estimate_regularity(&f, None)?;
        println!("synthesized alpha {alpha:+}: alpha_hat = {:.3}", est.alpha_hat);
    }
    Ok(())
}
