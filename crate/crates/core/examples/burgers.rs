//! Stochastic Burgers type equations in 1D and the mesoscopic model.

use paracalc::solvers::{
    simulate_mesoscopic, solve_csbe, solve_csbe_direct, solve_gsbe, solve_gsbe_direct, ScalarFn, SolverConfig,
    UniversalityConfig,
};
use paracalc::stochastic::{enhance_csbe, enhance_gsbe, steps_for, Mollifier};
use paracalc::{Result, TorusGrid};

fn main() -> Result<()> {
    let grid = TorusGrid::new(1, 128)?;
    let cfg = SolverConfig::new(0.05, 1e-3, 128);
    let steps = steps_for(cfg.dt, cfg.t_final)?;

    let g = ScalarFn::affine(1.0, 0.5);
    let e = enhance_gsbe(grid, 0.0625, Mollifier::Gaussian, cfg.dt, steps, 5)?;
    let a = solve_gsbe(&e, &g, &cfg)?;
    let b = solve_gsbe_direct(&e.xi, &g, &cfg)?;
    println!("gSBE  paracontrolled vs classical: {:.2e}", a.final_state().try_sub(b.final_state())?.sup_norm());

    let e = enhance_csbe(grid, 0.0625, Mollifier::Gaussian, cfg.dt, steps, 5)?;
    let a = solve_csbe(&e, 1.0, &cfg)?;
    let b = solve_csbe_direct(&e.xi, 1.0, &cfg)?;
    println!("cSBE  paracontrolled vs classical: {:.2e}", a.final_state().try_sub(b.final_state())?.sup_norm());

    let u = UniversalityConfig::new(ScalarFn::polynomial(&[0.0, 0.0, 1.0]), 0.25, 5);
    let cfg = SolverConfig::new(0.01, 1e-3, 32);
    let (m, chi) = simulate_mesoscopic(&u, &cfg)?;
    println!("mesoscopic u(T) sup {:.4}, chi_eps mean {:.4}", m.final_state().sup_norm(), chi.last().mean());
    Ok(())
}
