use serde::{Deserialize, Serialize};

use crate::error::{check_grids, Result};
use crate::spectral::{Field, LpDecomposition, Partition};

/// Paraproduct context; the partition selects sharp or smooth blocks.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Paracalc {
    pub partition: Partition,
}

/// The three pieces of `f g = f < g + f o g + f > g`.
#[derive(Clone, Debug)]
pub struct Paraproducts {
    pub less: Field,
    pub resonant: Field,
    pub greater: Field,
}

fn less_from(df: &LpDecomposition, dg: &LpDecomposition) -> Field {
    let grid = df.grid;
    let mut acc = Field::zeros(grid);
    let mut low = Field::zeros(grid);
    let fb = df.blocks();
    let gb = dg.blocks();
    // storage index b is block b - 1; S_{j-2} f needs blocks with index <= j - 2
    for b in 2..gb.len() {
        low.axpy(1.0, &fb[b - 2]).expect("same grid");
        let d = acc.data_mut();
        for ((a, l), g) in d.iter_mut().zip(low.data()).zip(gb[b].data()) {
            *a += l * g;
        }
    }
    acc
}

fn resonant_from(df: &LpDecomposition, dg: &LpDecomposition) -> Field {
    let grid = df.grid;
    let fb = df.blocks();
    let gb = dg.blocks();
    let nb = fb.len();
    let mut acc = Field::zeros(grid);
    for (b, fblk) in fb.iter().enumerate() {
        let lo = b.saturating_sub(1);
        let hi = (b + 1).min(nb - 1);
        let d = acc.data_mut();
        for (j, fv) in fblk.data().iter().enumerate() {
            let mut s = 0.0;
            for gbl in &gb[lo..=hi] {
                s += gbl.data()[j];
            }
            d[j] += fv * s;
        }
    }
    acc
}

impl Paracalc {
    pub fn new(partition: Partition) -> Self {
        Self { partition }
    }

    pub fn sharp() -> Self {
        Self::new(Partition::Sharp)
    }

    pub fn smooth() -> Self {
        Self::new(Partition::Smooth)
    }

    pub fn decompose(&self, f: &Field) -> LpDecomposition {
        LpDecomposition::new(f, self.partition)
    }

    /// `f < g = sum_j S_{j-2} f Delta_j g`
    pub fn para_less(&self, f: &Field, g: &Field) -> Result<Field> {
        check_grids(f.grid(), g.grid())?;
        Ok(less_from(&self.decompose(f), &self.decompose(g)))
    }

    /// `f > g = g < f`
    pub fn para_greater(&self, f: &Field, g: &Field) -> Result<Field> {
        self.para_less(g, f)
    }

    /// `f o g = sum_{|i-j| <= 1} Delta_i f Delta_j g`
    pub fn resonant(&self, f: &Field, g: &Field) -> Result<Field> {
        check_grids(f.grid(), g.grid())?;
        Ok(resonant_from(&self.decompose(f), &self.decompose(g)))
    }

    pub fn paraproducts(&self, f: &Field, g: &Field) -> Result<Paraproducts> {
        check_grids(f.grid(), g.grid())?;
        let df = self.decompose(f);
        let dg = self.decompose(g);
        Ok(Paraproducts { less: less_from(&df, &dg), resonant: resonant_from(&df, &dg), greater: less_from(&dg, &df) })
    }

    /// `R_F(f) = F(f) - F'(f) < f`
    pub fn paralinearize_remainder(
        &self,
        func: impl Fn(f64) -> f64,
        deriv: impl Fn(f64) -> f64,
        f: &Field,
    ) -> Result<Field> {
        let ff = f.map(func);
        let df = f.map(deriv);
        ff.try_sub(&self.para_less(&df, f)?)
    }

    /// `C(f, g, h) = (f < g) o h - f (g o h)`
    pub fn commutator_c(&self, f: &Field, g: &Field, h: &Field) -> Result<Field> {
        let dh = self.decompose(h);
        let fg = self.para_less(f, g)?;
        let a = resonant_from(&self.decompose(&fg), &dh);
        let b = resonant_from(&self.decompose(g), &dh);
        a.try_sub(&f.try_mul(&b)?)
    }

    /// `C2(f, g, h, k) = C(f < g, h, k) - f C(g, h, k)`
    pub fn commutator_c2(&self, f: &Field, g: &Field, h: &Field, k: &Field) -> Result<Field> {
        let fg = self.para_less(f, g)?;
        let a = self.commutator_c(&fg, h, k)?;
        let b = self.commutator_c(g, h, k)?;
        a.try_sub(&f.try_mul(&b)?)
    }

    /// `T(f, g, h) = f < (g < h) - g < (f < h)`
    pub fn commutator_t(&self, f: &Field, g: &Field, h: &Field) -> Result<Field> {
        let a = self.para_less(f, &self.para_less(g, h)?)?;
        let b = self.para_less(g, &self.para_less(f, h)?)?;
        a.try_sub(&b)
    }
}

pub fn para_less(f: &Field, g: &Field) -> Result<Field> {
    Paracalc::default().para_less(f, g)
}

pub fn para_greater(f: &Field, g: &Field) -> Result<Field> {
    Paracalc::default().para_greater(f, g)
}

pub fn resonant(f: &Field, g: &Field) -> Result<Field> {
    Paracalc::default().resonant(f, g)
}

pub fn paralinearize_remainder(func: impl Fn(f64) -> f64, deriv: impl Fn(f64) -> f64, f: &Field) -> Result<Field> {
    Paracalc::default().paralinearize_remainder(func, deriv, f)
}

pub fn commutator_c(f: &Field, g: &Field, h: &Field) -> Result<Field> {
    Paracalc::default().commutator_c(f, g, h)
}

pub fn commutator_c2(f: &Field, g: &Field, h: &Field, k: &Field) -> Result<Field> {
    Paracalc::default().commutator_c2(f, g, h, k)
}

pub fn commutator_t(f: &Field, g: &Field, h: &Field) -> Result<Field> {
    Paracalc::default().commutator_t(f, g, h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::TorusGrid;

    fn fields() -> (Field, Field) {
        let g = TorusGrid::new(2, 32).unwrap();
        let f = Field::from_fn(g, |x| (6.0 * x[0]).sin() + (2.0 * std::f64::consts::PI * 9.0 * x[1]).cos());
        let h = Field::from_fn(g, |x| (x[0] * 40.0).cos() * (x[1] * 12.0).sin());
        (f, h)
    }

    #[test]
    fn pieces_sum_to_product() {
        let (f, g) = fields();
        for pc in [Paracalc::sharp(), Paracalc::smooth()] {
            let p = pc.paraproducts(&f, &g).unwrap();
            let sum = &(&p.less + &p.resonant) + &p.greater;
            assert!((&sum - &(&f * &g)).sup_norm() < 1e-10);
        }
    }

    #[test]
    fn low_mode_times_high_mode_is_pure_paraproduct() {
        let g = TorusGrid::new(1, 256).unwrap();
        let lo = Field::mode(g, [1, 0], 1.0, 0.0);
        let hi = Field::mode(g, [64, 0], 1.0, 0.0);
        let pc = Paracalc::sharp();
        let p = pc.paraproducts(&lo, &hi).unwrap();
        assert!(p.resonant.sup_norm() < 1e-12);
        assert!(p.greater.sup_norm() < 1e-12);
        assert!((&p.less - &(&lo * &hi)).sup_norm() < 1e-12);
    }
}
