//! Bony decomposition of a product and the regularity gain of the commutators.

use paracalc::spectral::estimate_regularity;
use paracalc::stochastic::{sample_white_noise, synthesize_lacunary};
use paracalc::{Paracalc, Result, TorusGrid};

fn main() -> Result<()> {
    let pc = Paracalc::default();
    let grid2 = TorusGrid::new(2, 64)?;
    let f = sample_white_noise(grid2, 3);
    let g = sample_white_noise(grid2, 4);
    let p = pc.paraproducts(&f, &g)?;
    let sum = p.less.try_add(&p.resonant)?.try_add(&p.greater)?;
    println!("f g - (f<g + f o g + f>g) = {:.2e}", sum.try_sub(&f.try_mul(&g)?)?.sup_norm());

    // Lacunary inputs of prescribed regularity on a long 1D grid.
    let grid = TorusGrid::new(1, 4096)?;
    let (a, b, c) = (0.6, 0.5, -0.9);
    let f = synthesize_lacunary(grid, a, 10);
    let g = synthesize_lacunary(grid, b, 11);
    let h = synthesize_lacunary(grid, c, 12);

    let reg = |x: &paracalc::Field| estimate_regularity(x, None).map(|e| e.alpha_hat);
    let cfgh = pc.commutator_c(&f, &g, &h)?;
    let naive = pc.resonant(&pc.para_less(&f, &g)?, &h)?;
    println!("(f<g) o h      : {:+.3}", reg(&naive)?);
    println!("C(f, g, h)     : {:+.3}  (b + c = {:+.1})", reg(&cfgh)?, b + c);
    println!("g o h          : {:+.3}", reg(&pc.resonant(&g, &h)?)?);

    let t = pc.commutator_t(&h, &f, &g)?;
    println!("swap T(h, f, g): {:+.3}", reg(&t)?);
    Ok(())
}
