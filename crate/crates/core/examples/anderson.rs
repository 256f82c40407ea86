//! Top of the spectrum of the 2D Anderson Hamiltonian, and the 1D resolvent.

use paracalc::anderson::{
    dense_resolvent, dense_spectrum, eigensolve, laplacian_spectrum, solve_resolvent_1d, ApplyMode, EigenConfig,
};
use paracalc::stochastic::{enhance_gpam, sample_white_noise, Mollifier};
use paracalc::{Field, Paracalc, Result, TorusGrid};

fn main() -> Result<()> {
    let pc = Paracalc::default();
    let grid = TorusGrid::new(2, 32)?;
    let e = enhance_gpam(grid, 0.125, Mollifier::Gaussian, 3)?;
    let r = eigensolve(&pc, &e, &EigenConfig::new(5))?;
    let dense = dense_spectrum(&pc, &e, ApplyMode::Paracontrolled)?;
    println!("c_eps = {:.4}, Krylov dim {}", r.c_eps, r.krylov_dim);
    for (k, (l, res)) in r.eigenvalues.iter().zip(&r.residuals).enumerate() {
        println!("  lambda_{} = {l:+.6}  (dense {:+.6}, residual {res:.1e})", k + 1, dense[k]);
    }
    println!("Laplacian alone: {:?}", laplacian_spectrum(&grid, 5));

    let grid = TorusGrid::new(1, 256)?;
    let xi = sample_white_noise(grid, 9);
    let phi = Field::from_fn(grid, |x| (2.0 * std::f64::consts::PI * x[0]).cos());
    let s = solve_resolvent_1d(&pc, &xi, 50.0, &phi, 1e-12, 200)?;
    let lu = dense_resolvent(&xi, 50.0, &phi)?;
    println!(
        "1D resolvent: {} iterations, residual {:.1e}, against LU {:.1e}",
        s.iterations,
        s.residual,
        s.u.try_sub(&lu)?.sup_norm()
    );
    Ok(())
}
