//! Dynamic Phi^4_2: Da Prato-Debussche against the direct renormalized scheme.

use paracalc::solvers::{solve_phi42_dd, solve_phi42_direct, SolverConfig};
use paracalc::stochastic::{wick_data_from, Mollifier, Phi42Noise};
use paracalc::{Result, TorusGrid};

fn main() -> Result<()> {
    let grid = TorusGrid::new(2, 64)?;
    let t_final = 0.25;
    let mut noise = Phi42Noise::sample(grid, t_final / 512.0, 512, 0.125, Mollifier::Gaussian, 11);
    println!("c1 = {:.5}", noise.c1());
    for _ in 0..4 {
        let cfg = SolverConfig::new(t_final, noise.dt, 64);
        let dd = solve_phi42_dd(&wick_data_from(&noise), &cfg)?;
        let direct = solve_phi42_direct(&noise, noise.c1(), &cfg)?;
        let gap = dd.final_state().try_sub(direct.final_state())?.sup_norm();
        println!("dt {:.2e}  sup gap {gap:.3e}", noise.dt);
        noise = noise.coarsen()?;
    }
    Ok(())
}
