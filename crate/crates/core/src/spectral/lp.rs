//! Littlewood-Paley blocks, Besov norms and the regularity estimator.
//!
//! Block `Delta_{-1}` is the zero mode, `Delta_i` for `0 <= i < i_max` collects
//! `2^i <= |k|_inf < 2^{i+1}`, and the top block `Delta_{i_max}` takes everything
//! from `2^{i_max}` up to Nyquist. The smooth partition replaces the sharp
//! indicator of `S_i = sum_{j <= i} Delta_j` with `psi(|k|_inf / 2^{i+1})`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Field, Spectrum, TorusGrid};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Partition {
    Sharp,
    #[default]
    Smooth,
}

/// `psi(x) = 1` for `x <= SMOOTH_PLATEAU`, `0` for `x >= 1`.
pub const SMOOTH_PLATEAU: f64 = 0.6;

fn bump(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        (-1.0 / s).exp()
    }
}

/// C-infinity cutoff used by the smooth partition.
pub fn smooth_cutoff(x: f64) -> f64 {
    let t = ((x - SMOOTH_PLATEAU) / (1.0 - SMOOTH_PLATEAU)).clamp(0.0, 1.0);
    let a = bump(1.0 - t);
    let b = bump(t);
    a / (a + b)
}

/// Sharp block index of an integer wavenumber.
pub fn block_of_mode(grid: &TorusGrid, k: [i64; 2]) -> i32 {
    let m = k[0].unsigned_abs().max(k[1].unsigned_abs());
    sharp_block(m, grid.i_max())
}

fn sharp_block(m: u64, i_max: i32) -> i32 {
    if m == 0 {
        -1
    } else {
        (63 - m.leading_zeros() as i32).min(i_max)
    }
}

/// Per mode: storage index `b` (0 is `Delta_{-1}`) carrying weight `w`, with `1 - w` in `b + 1`.
pub(crate) struct ModeWeights {
    pub block: Vec<u8>,
    pub weight: Vec<f64>,
}

fn build_weights(grid: &TorusGrid, partition: Partition) -> ModeWeights {
    let i_max = grid.i_max();
    let mut block = Vec::with_capacity(grid.len());
    let mut weight = Vec::with_capacity(grid.len());
    for idx in 0..grid.len() {
        let m = grid.kinf(idx);
        match partition {
            Partition::Sharp => {
                block.push((sharp_block(m, i_max) + 1) as u8);
                weight.push(1.0);
            }
            Partition::Smooth => {
                if m == 0 {
                    block.push(0);
                    weight.push(1.0);
                    continue;
                }
                // cumulative S_i for i = 0 .. i_max - 1, S_{i_max} = 1
                let mut prev = 0.0;
                let mut found = None;
                for i in 0..=i_max {
                    let s = if i == i_max { 1.0 } else { smooth_cutoff(m as f64 / (1u64 << (i + 1)) as f64) };
                    if s > prev {
                        found = Some((i, s - prev));
                        break;
                    }
                    prev = s;
                }
                let (i, w) = found.expect("S_i_max = 1");
                block.push((i + 1) as u8);
                weight.push(w);
            }
        }
    }
    ModeWeights { block, weight }
}

thread_local! {
    static WEIGHTS: RefCell<HashMap<(usize, usize, Partition), Arc<ModeWeights>>> =
        RefCell::new(HashMap::new());
}

pub(crate) fn mode_weights(grid: &TorusGrid, partition: Partition) -> Arc<ModeWeights> {
    WEIGHTS.with(|w| {
        w.borrow_mut()
            .entry((grid.dim, grid.n, partition))
            .or_insert_with(|| Arc::new(build_weights(grid, partition)))
            .clone()
    })
}

/// Fourier multiplier of block `i` (`-1 <= i <= i_max`) at a flat spectral position.
pub fn block_multiplier(grid: &TorusGrid, partition: Partition, i: i32, idx: usize) -> f64 {
    let w = mode_weights(grid, partition);
    let b = (i + 1) as u8;
    if w.block[idx] == b {
        w.weight[idx]
    } else if w.block[idx] + 1 == b {
        1.0 - w.weight[idx]
    } else {
        0.0
    }
}

/// Split a spectrum into its block fields (index 0 is `Delta_{-1}`).
pub(crate) fn spectrum_blocks(s: &Spectrum, partition: Partition) -> Vec<Field> {
    let grid = s.grid;
    let w = mode_weights(&grid, partition);
    let nb = grid.block_count();
    let mut parts = vec![vec![Complex64::default(); grid.len()]; nb];
    let mut used = vec![false; nb];
    for (idx, c) in s.coeffs.iter().enumerate() {
        let b = w.block[idx] as usize;
        let wt = w.weight[idx];
        parts[b][idx] = c * wt;
        used[b] = true;
        if wt < 1.0 && b + 1 < nb {
            parts[b + 1][idx] = c * (1.0 - wt);
            used[b + 1] = true;
        }
    }
    parts
        .into_iter()
        .zip(used)
        .map(|(coeffs, u)| if u { Spectrum { grid, coeffs }.to_field() } else { Field::zeros(grid) })
        .collect()
}

/// Blocks `Delta_{-1} f, ..., Delta_{i_max} f`; their sum is `f`.
#[derive(Clone, Debug)]
pub struct LpDecomposition {
    pub grid: TorusGrid,
    pub partition: Partition,
    blocks: Vec<Field>,
}

impl LpDecomposition {
    pub fn new(f: &Field, partition: Partition) -> Self {
        Self { grid: *f.grid(), partition, blocks: spectrum_blocks(&f.spectrum(), partition) }
    }

    pub fn i_max(&self) -> i32 {
        self.grid.i_max()
    }

    /// Block `Delta_i`; zero outside `-1..=i_max`.
    pub fn block(&self, i: i32) -> Field {
        if i < -1 || i > self.i_max() {
            Field::zeros(self.grid)
        } else {
            self.blocks[(i + 1) as usize].clone()
        }
    }

    pub fn blocks(&self) -> &[Field] {
        &self.blocks
    }

    /// `S_j f = sum_{i <= j} Delta_i f`.
    pub fn partial_sum(&self, j: i32) -> Field {
        let mut acc = Field::zeros(self.grid);
        for i in -1..=j.min(self.i_max()) {
            acc.axpy(1.0, &self.blocks[(i + 1) as usize]).expect("same grid");
        }
        acc
    }

    pub fn reconstruct(&self) -> Field {
        self.partial_sum(self.i_max())
    }

    /// `||Delta_i f||_inf` for `i = -1..=i_max`.
    pub fn sup_norms(&self) -> Vec<f64> {
        self.blocks.iter().map(Field::sup_norm).collect()
    }
}

/// Sharp Littlewood-Paley decomposition.
pub fn lp_decompose(f: &Field) -> LpDecomposition {
    LpDecomposition::new(f, Partition::Sharp)
}

pub fn lp_decompose_with(f: &Field, partition: Partition) -> LpDecomposition {
    LpDecomposition::new(f, partition)
}

/// `sup_i 2^{i alpha} ||Delta_i f||_inf`.
pub fn besov_norm(f: &Field, alpha: f64) -> f64 {
    lp_decompose(f)
        .sup_norms()
        .iter()
        .enumerate()
        .map(|(b, m)| 2f64.powf((b as f64 - 1.0) * alpha) * m)
        .fold(0.0, f64::max)
}

/// Least-squares fit of `log2 ||Delta_i f||_inf` against `i`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RegularityEstimate {
    pub alpha_hat: f64,
    pub slope_stderr: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub i_range: (i32, i32),
    pub block_norms: Vec<f64>,
}

pub fn default_window(grid: &TorusGrid) -> (i32, i32) {
    (2, grid.i_max() - 1)
}

pub fn estimate_regularity(f: &Field, window: Option<(i32, i32)>) -> Result<RegularityEstimate> {
    let grid = *f.grid();
    let (lo, hi) = window.unwrap_or_else(|| default_window(&grid));
    if lo < 0 || hi > grid.i_max() || hi - lo < 1 {
        return Err(Error::InvalidArgument(format!(
            "regression window [{lo}, {hi}] needs two blocks within [0, {}]",
            grid.i_max()
        )));
    }
    let norms = lp_decompose(f).sup_norms();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in lo..=hi {
        let m = norms[(i + 1) as usize];
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::Degenerate(format!("block {i} has norm {m}")));
        }
        xs.push(i as f64);
        ys.push(m.log2());
    }
    let (slope, intercept, r2) = linear_fit(&xs, &ys);
    Ok(RegularityEstimate {
        alpha_hat: -slope,
        slope_stderr: slope_stderr(&xs, &ys, slope, intercept),
        intercept,
        r_squared: r2,
        i_range: (lo, hi),
        block_norms: norms,
    })
}

/// Ordinary least squares `y = a x + b`; returns `(a, b, R^2)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let a = sxy / sxx;
    let b = my - a * mx;
    let r2 = if syy > 0.0 { (sxy * sxy) / (sxx * syy) } else { 1.0 };
    (a, b, r2)
}

/// Standard error of the fitted slope; zero for a two-point fit.
pub fn slope_stderr(xs: &[f64], ys: &[f64], a: f64, b: f64) -> f64 {
    let n = xs.len();
    if n < 3 {
        return 0.0;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sse: f64 = xs.iter().zip(ys).map(|(x, y)| (y - a * x - b).powi(2)).sum();
    (sse / (n - 2) as f64 / sxx).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_limits() {
        assert_eq!(smooth_cutoff(0.5), 1.0);
        assert_eq!(smooth_cutoff(1.0), 0.0);
        let mid = smooth_cutoff(0.8);
        assert!((mid - 0.5).abs() < 1e-12);
    }

    #[test]
    fn single_modes_land_in_expected_blocks() {
        let g = TorusGrid::new(2, 256).unwrap();
        for (k, b) in [(0, -1), (1, 0), (2, 1), (5, 2), (8, 3), (64, 6), (128, 6)] {
            assert_eq!(block_of_mode(&g, [k, 0]), b, "k = {k}");
        }
    }

    #[test]
    fn smooth_powers_of_two_stay_in_one_block() {
        let g = TorusGrid::new(1, 256).unwrap();
        for p in 0..7 {
            let k = 1i64 << p;
            let idx = k as usize;
            let i = block_of_mode(&g, [k, 0]);
            assert_eq!(block_multiplier(&g, Partition::Smooth, i, idx), 1.0, "k = {k}");
        }
    }

    #[test]
    fn smooth_blocks_sum_to_one() {
        let g = TorusGrid::new(1, 128).unwrap();
        for idx in 0..g.len() {
            let s: f64 = (-1..=g.i_max()).map(|i| block_multiplier(&g, Partition::Smooth, i, idx)).sum();
            assert!((s - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn fit_recovers_line() {
        let xs = [1.0, 2.0, 3.0];
        let ys = [1.0, 3.0, 5.0];
        let (a, b, r2) = linear_fit(&xs, &ys);
        assert!((a - 2.0).abs() < 1e-12 && (b + 1.0).abs() < 1e-12 && (r2 - 1.0).abs() < 1e-12);
    }
}
