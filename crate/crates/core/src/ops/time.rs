//! Time-dependent fields, heat semigroup, Duhamel integral and the
//! intertwined paraproduct, all with first-order exponential time differencing.

use num_complex::Complex64;

use super::Paracalc;
use crate::error::{check_grids, Error, Result};
use crate::spectral::{Field, Spectrum, TorusGrid};

/// Sequence of fields on a time mesh `t_0 < t_1 < ... < t_M`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeField {
    pub grid: TorusGrid,
    pub times: Vec<f64>,
    pub frames: Vec<Field>,
}

impl TimeField {
    pub fn new(times: Vec<f64>, frames: Vec<Field>) -> Result<Self> {
        if times.is_empty() || times.len() != frames.len() {
            return Err(Error::TimeMismatch(format!("{} times for {} frames", times.len(), frames.len())));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::TimeMismatch("times must increase".into()));
        }
        let grid = *frames[0].grid();
        for f in &frames {
            check_grids(&grid, f.grid())?;
        }
        Ok(Self { grid, times, frames })
    }

    pub fn uniform_times(dt: f64, steps: usize) -> Vec<f64> {
        (0..=steps).map(|m| m as f64 * dt).collect()
    }

    pub fn from_fn(grid: TorusGrid, times: Vec<f64>, f: impl Fn(f64) -> Field) -> Result<Self> {
        let frames = times.iter().map(|&t| f(t)).collect::<Vec<_>>();
        for fr in &frames {
            check_grids(&grid, fr.grid())?;
        }
        Self::new(times, frames)
    }

    pub fn constant_in_time(f: &Field, times: Vec<f64>) -> Result<Self> {
        let frames = vec![f.clone(); times.len()];
        Self::new(times, frames)
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn steps(&self) -> usize {
        self.frames.len() - 1
    }

    pub fn dt(&self, m: usize) -> f64 {
        self.times[m + 1] - self.times[m]
    }

    pub fn last(&self) -> &Field {
        self.frames.last().expect("non-empty")
    }

    pub fn sup_norm(&self) -> f64 {
        self.frames.iter().map(Field::sup_norm).fold(0.0, f64::max)
    }

    pub fn same_mesh(&self, other: &TimeField) -> Result<()> {
        check_grids(&self.grid, &other.grid)?;
        if self.times.len() != other.times.len()
            || self.times.iter().zip(&other.times).any(|(a, b)| (a - b).abs() > 1e-12 * (1.0 + a.abs()))
        {
            return Err(Error::TimeMismatch("time meshes differ".into()));
        }
        Ok(())
    }

    pub fn map_frames(&self, f: impl Fn(&Field) -> Result<Field>) -> Result<TimeField> {
        let frames = self.frames.iter().map(f).collect::<Result<Vec<_>>>()?;
        TimeField::new(self.times.clone(), frames)
    }

    pub fn zip_frames(&self, other: &TimeField, f: impl Fn(&Field, &Field) -> Result<Field>) -> Result<TimeField> {
        self.same_mesh(other)?;
        let frames = self.frames.iter().zip(&other.frames).map(|(a, b)| f(a, b)).collect::<Result<Vec<_>>>()?;
        TimeField::new(self.times.clone(), frames)
    }

    pub fn try_add(&self, other: &TimeField) -> Result<TimeField> {
        self.zip_frames(other, |a, b| a.try_add(b))
    }

    pub fn try_sub(&self, other: &TimeField) -> Result<TimeField> {
        self.zip_frames(other, |a, b| a.try_sub(b))
    }

    pub fn scale(&self, c: f64) -> TimeField {
        TimeField {
            grid: self.grid,
            times: self.times.clone(),
            frames: self.frames.iter().map(|f| f.scale(c)).collect(),
        }
    }
}

/// `phi1(z) = (1 - e^{-z}) / z`
pub fn phi1(z: f64) -> f64 {
    if z.abs() < 1e-8 {
        1.0 - 0.5 * z
    } else {
        -(-z).exp_m1() / z
    }
}

/// Mode-wise ETD coefficients for `d/dt + mass + (-Delta)` over a step `dt`.
#[derive(Clone, Debug)]
pub struct EtdStep {
    pub dt: f64,
    pub decay: Vec<f64>,
    pub weight: Vec<f64>,
}

impl EtdStep {
    pub fn new(grid: &TorusGrid, dt: f64, mass: f64) -> Self {
        let mut decay = Vec::with_capacity(grid.len());
        let mut weight = Vec::with_capacity(grid.len());
        for idx in 0..grid.len() {
            let lam = grid.neg_laplacian_symbol(idx) + mass;
            decay.push((-lam * dt).exp());
            weight.push(dt * phi1(lam * dt));
        }
        Self { dt, decay, weight }
    }

    /// `w <- e^{-lambda dt} w + dt phi1(lambda dt) v`
    pub fn advance(&self, w: &mut [Complex64], v: &[Complex64]) {
        for (i, c) in w.iter_mut().enumerate() {
            *c = *c * self.decay[i] + v[i] * self.weight[i];
        }
    }

    pub fn propagate(&self, w: &mut [Complex64]) {
        for (c, d) in w.iter_mut().zip(&self.decay) {
            *c *= d;
        }
    }
}

/// `e^{t (Delta - mass)} f`
pub fn heat_propagate(f: &Field, t: f64, mass: f64) -> Field {
    let g = *f.grid();
    f.apply_multiplier(|i| (-(g.neg_laplacian_symbol(i) + mass) * t).exp())
}

/// `w2(z) = (z - 1 + e^{-z}) / z^2`, the weight of the slope term in linear-interpolation ETD.
pub fn phi2(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        0.5 - z / 6.0 + z * z / 24.0
    } else {
        (z + (-z).exp_m1()) / (z * z)
    }
}

fn etd_for(grid: &TorusGrid, dt: f64, cache: &mut Option<EtdStep>) -> EtdStep {
    match cache {
        Some(s) if (s.dt - dt).abs() <= 1e-14 * dt => s.clone(),
        _ => {
            let s = EtdStep::new(grid, dt, 0.0);
            *cache = Some(s.clone());
            s
        }
    }
}

/// `J(v)(t) = int_0^t P_{t-s} v(s) ds` with the left-endpoint ETD rule; `J(v)(0) = 0`.
pub fn duhamel_j(v: &TimeField) -> TimeField {
    let grid = v.grid;
    let mut w = Spectrum::zeros(grid);
    let mut frames = vec![Field::zeros(grid)];
    let mut cache = None;
    for m in 0..v.steps() {
        let step = etd_for(&grid, v.dt(m), &mut cache);
        let vs = v.frames[m].spectrum();
        step.advance(&mut w.coeffs, &vs.coeffs);
        frames.push(w.to_field());
    }
    TimeField { grid, times: v.times.clone(), frames }
}

/// `(d/dt - Delta) g`, inverted from the ETD step so that `J(L g) + P_t g(0) = g` exactly.
/// The last frame repeats the previous one.
pub fn heat_operator(g: &TimeField) -> TimeField {
    let grid = g.grid;
    let mut frames = Vec::with_capacity(g.len());
    let mut cache = None;
    let mut prev = g.frames[0].spectrum();
    for m in 0..g.steps() {
        let step = etd_for(&grid, g.dt(m), &mut cache);
        let next = g.frames[m + 1].spectrum();
        let mut r = Spectrum::zeros(grid);
        for i in 0..grid.len() {
            r.coeffs[i] = (next.coeffs[i] - prev.coeffs[i] * step.decay[i]) / step.weight[i];
        }
        frames.push(r.to_field());
        prev = next;
    }
    let last = frames.last().cloned().unwrap_or_else(|| Field::zeros(grid));
    frames.push(last);
    TimeField { grid, times: g.times.clone(), frames }
}

impl Paracalc {
    /// `f ⊘ g = J(f < L g)` with `L g` given on the same mesh.
    pub fn intertwined_para(&self, f: &TimeField, lg: &TimeField) -> Result<TimeField> {
        let integrand = f.zip_frames(lg, |a, b| self.para_less(a, b))?;
        Ok(duhamel_j(&integrand))
    }

    /// `H(f, g) = L(f ⊘ g) - f < L g`, where `L` is the exact operator applied to the
    /// piecewise-linear interpolant of `v = f < L g`. Since `f ⊘ g` intertwines exactly in
    /// continuous time, what remains is the quadrature defect of the left-endpoint rule,
    /// `-dt phi2(lambda dt) (v_{m+1} - v_m) / dt` per mode, which is `O(dt)`.
    /// The last frame repeats the previous one.
    pub fn heat_commutator_h(&self, f: &TimeField, g: &TimeField, lg: Option<&TimeField>) -> Result<TimeField> {
        f.same_mesh(g)?;
        let owned;
        let lg = match lg {
            Some(l) => {
                l.same_mesh(g)?;
                l
            }
            None => {
                owned = heat_operator(g);
                &owned
            }
        };
        let v = f.zip_frames(lg, |a, b| self.para_less(a, b))?;
        let w = duhamel_j(&v);
        let grid = f.grid;
        let mut frames = Vec::with_capacity(f.len());
        for m in 0..f.steps() {
            let h = f.dt(m);
            let w0 = w.frames[m].spectrum();
            let w1 = w.frames[m + 1].spectrum();
            let v0 = v.frames[m].spectrum();
            let v1 = v.frames[m + 1].spectrum();
            let mut r = Spectrum::zeros(grid);
            for i in 0..grid.len() {
                let z = grid.neg_laplacian_symbol(i) * h;
                let exact = (w1.coeffs[i] - w0.coeffs[i] * (-z).exp()) / h;
                let interp = v0.coeffs[i] * phi1(z) + (v1.coeffs[i] - v0.coeffs[i]) * phi2(z);
                r.coeffs[i] = exact - interp;
            }
            frames.push(r.to_field());
        }
        let last = frames.last().cloned().unwrap_or_else(|| Field::zeros(grid));
        frames.push(last);
        TimeField::new(f.times.clone(), frames)
    }
}

pub fn intertwined_para(f: &TimeField, lg: &TimeField) -> Result<TimeField> {
    Paracalc::default().intertwined_para(f, lg)
}

pub fn heat_commutator_h(f: &TimeField, g: &TimeField, lg: Option<&TimeField>) -> Result<TimeField> {
    Paracalc::default().heat_commutator_h(f, g, lg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duhamel_of_constant_source_is_exact() {
        let g = TorusGrid::new(1, 32).unwrap();
        let f = Field::mode(g, [2, 0], 1.0, 0.0);
        let v = TimeField::constant_in_time(&f, TimeField::uniform_times(0.01, 10)).unwrap();
        let w = duhamel_j(&v);
        let lam = 4.0 * std::f64::consts::PI.powi(2) * 4.0;
        let expect = f.scale((1.0 - (-lam * 0.1).exp()) / lam);
        assert!((w.last() - &expect).sup_norm() < 1e-13);
    }

    #[test]
    fn heat_operator_inverts_duhamel() {
        let g = TorusGrid::new(1, 32).unwrap();
        let times = TimeField::uniform_times(0.005, 8);
        let u = TimeField::from_fn(g, times, |t| Field::mode(g, [3, 0], 1.0 + t, t)).unwrap();
        let lu = heat_operator(&u);
        let back = duhamel_j(&lu);
        for (m, fr) in back.frames.iter().enumerate() {
            let free = heat_propagate(&u.frames[0], u.times[m], 0.0);
            assert!((&(fr + &free) - &u.frames[m]).sup_norm() < 1e-11);
        }
    }

    #[test]
    fn h_vanishes_for_time_constant_integrand() {
        let g = TorusGrid::new(1, 64).unwrap();
        let times = TimeField::uniform_times(0.002, 6);
        let f = TimeField::constant_in_time(&Field::mode(g, [1, 0], 1.0, 0.0), times.clone()).unwrap();
        let lg = TimeField::constant_in_time(&Field::mode(g, [16, 0], 1.0, 0.3), times.clone()).unwrap();
        let h = Paracalc::default().heat_commutator_h(&f, &lg, Some(&lg)).unwrap();
        assert!(h.sup_norm() < 1e-9);
    }

    #[test]
    fn phi2_series_matches_closed_form() {
        for z in [1e-3f64, 0.5, 3.0] {
            let closed = (z - 1.0 + (-z).exp()) / (z * z);
            assert!((phi2(z) - closed).abs() < 1e-9, "z = {z}");
        }
    }

    #[test]
    fn phi1_limits() {
        assert!((phi1(0.0) - 1.0).abs() < 1e-15);
        assert!((phi1(1e-3) - (1.0 - (-1e-3f64).exp()) / 1e-3).abs() < 1e-12);
    }
}
