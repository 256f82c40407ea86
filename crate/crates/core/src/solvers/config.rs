use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ops::TimeField;
use crate::spectral::{Field, Partition, TorusGrid};
use crate::stochastic::steps_for;

/// Smooth scalar function with its first two derivatives.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ScalarFn {
    /// `sum_i coeffs[i] x^i`
    Polynomial { coeffs: Vec<f64> },
    /// `amplitude sin(frequency x + phase) + offset`
    Sine { amplitude: f64, frequency: f64, phase: f64, offset: f64 },
}

impl ScalarFn {
    pub fn constant(c: f64) -> Self {
        ScalarFn::Polynomial { coeffs: vec![c] }
    }

    /// `a + b x`
    pub fn affine(a: f64, b: f64) -> Self {
        ScalarFn::Polynomial { coeffs: vec![a, b] }
    }

    pub fn identity() -> Self {
        Self::affine(0.0, 1.0)
    }

    pub fn polynomial(coeffs: &[f64]) -> Self {
        ScalarFn::Polynomial { coeffs: coeffs.to_vec() }
    }

    pub fn sine(amplitude: f64, frequency: f64) -> Self {
        ScalarFn::Sine { amplitude, frequency, phase: 0.0, offset: 0.0 }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.nth(0, x)
    }

    pub fn d1(&self, x: f64) -> f64 {
        self.nth(1, x)
    }

    pub fn d2(&self, x: f64) -> f64 {
        self.nth(2, x)
    }

    fn nth(&self, order: u32, x: f64) -> f64 {
        match self {
            ScalarFn::Polynomial { coeffs } => {
                let mut acc = 0.0;
                for (i, c) in coeffs.iter().enumerate().skip(order as usize).rev() {
                    let mut fall = 1.0;
                    for j in 0..order as usize {
                        fall *= (i - j) as f64;
                    }
                    acc = acc * x + c * fall;
                }
                acc
            }
            ScalarFn::Sine { amplitude, frequency, phase, offset } => {
                let arg = frequency * x + phase;
                let w = frequency.powi(order as i32) * amplitude;
                match order % 4 {
                    0 => w * arg.sin() + if order == 0 { *offset } else { 0.0 },
                    1 => w * arg.cos(),
                    2 => -w * arg.sin(),
                    _ => -w * arg.cos(),
                }
            }
        }
    }

    pub fn apply(&self, f: &Field) -> Field {
        f.map(|x| self.value(x))
    }

    pub fn apply_d1(&self, f: &Field) -> Field {
        f.map(|x| self.d1(x))
    }

    pub fn apply_d2(&self, f: &Field) -> Field {
        f.map(|x| self.d2(x))
    }

    /// True when the first derivative vanishes identically.
    pub fn is_constant(&self) -> bool {
        match self {
            ScalarFn::Polynomial { coeffs } => coeffs.iter().skip(1).all(|c| *c == 0.0),
            ScalarFn::Sine { amplitude, frequency, .. } => *amplitude == 0.0 || *frequency == 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub t_final: f64,
    pub dt: f64,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_condition: Option<Field>,
    #[serde(default = "default_tol")]
    pub fixpoint_tol: f64,
    #[serde(default = "default_max_iter")]
    pub fixpoint_max_iter: usize,
    #[serde(default = "default_blowup")]
    pub blowup_bound: f64,
    #[serde(default)]
    pub partition: Partition,
}

fn default_tol() -> f64 {
    1e-10
}

fn default_max_iter() -> usize {
    50
}

fn default_blowup() -> f64 {
    1e6
}

impl SolverConfig {
    pub fn new(t_final: f64, dt: f64, n: usize) -> Self {
        Self {
            t_final,
            dt,
            n,
            initial_condition: None,
            fixpoint_tol: default_tol(),
            fixpoint_max_iter: default_max_iter(),
            blowup_bound: default_blowup(),
            partition: Partition::default(),
        }
    }

    pub fn with_initial_condition(mut self, f: Field) -> Self {
        self.initial_condition = Some(f);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !(self.t_final >= self.dt) {
            return Err(Error::InvalidArgument(format!(
                "need dt > 0 and T >= dt (dt = {}, T = {})",
                self.dt, self.t_final
            )));
        }
        if !(self.fixpoint_tol > 0.0) || self.fixpoint_max_iter == 0 || !(self.blowup_bound > 0.0) {
            return Err(Error::InvalidArgument("tolerances and bounds must be positive".into()));
        }
        Ok(())
    }

    pub fn steps(&self) -> Result<usize> {
        self.validate()?;
        steps_for(self.dt, self.t_final)
    }

    pub fn times(&self) -> Result<Vec<f64>> {
        Ok(TimeField::uniform_times(self.dt, self.steps()?))
    }

    /// Checks that `grid` has `n` points per axis.
    pub fn check_grid(&self, grid: &TorusGrid) -> Result<()> {
        if grid.n != self.n {
            return Err(Error::InvalidGrid(format!("config asks for n = {}, data has n = {}", self.n, grid.n)));
        }
        Ok(())
    }

    /// Checks a time field against the configured mesh.
    pub fn check_mesh(&self, tf: &TimeField) -> Result<()> {
        self.check_grid(&tf.grid)?;
        let steps = self.steps()?;
        if tf.steps() != steps || (0..steps).any(|m| (tf.dt(m) - self.dt).abs() > 1e-12 * self.dt.max(1.0)) {
            return Err(Error::TimeMismatch(format!(
                "data has {} steps, config wants {} steps of {}",
                tf.steps(),
                steps,
                self.dt
            )));
        }
        Ok(())
    }

    pub fn initial(&self, grid: TorusGrid) -> Result<Field> {
        match &self.initial_condition {
            None => Ok(Field::zeros(grid)),
            Some(f) if *f.grid() == grid => Ok(f.clone()),
            Some(f) => Err(Error::GridMismatch { left: grid, right: *f.grid() }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Equation {
    Phi42,
    Gpam,
    Gsbe,
    Csbe,
    Kpz,
    PamHo,
    Mesoscopic,
}

impl Equation {
    pub const ALL: [Equation; 7] = [
        Equation::Phi42,
        Equation::Gpam,
        Equation::Gsbe,
        Equation::Csbe,
        Equation::Kpz,
        Equation::PamHo,
        Equation::Mesoscopic,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Equation::Phi42 => "phi42",
            Equation::Gpam => "gpam",
            Equation::Gsbe => "gsbe",
            Equation::Csbe => "csbe",
            Equation::Kpz => "kpz",
            Equation::PamHo => "pam-ho",
            Equation::Mesoscopic => "mesoscopic",
        }
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Equation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Equation::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Unknown { kind: "equation", name: s.to_string() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_derivatives() {
        let p = ScalarFn::polynomial(&[1.0, 2.0, 0.0, 0.5]);
        assert_eq!(p.value(2.0), 1.0 + 4.0 + 4.0);
        assert_eq!(p.d1(2.0), 2.0 + 6.0);
        assert_eq!(p.d2(2.0), 6.0);
    }

    #[test]
    fn sine_derivatives() {
        let s = ScalarFn::sine(2.0, 3.0);
        let x = 0.4f64;
        assert!((s.d1(x) - 6.0 * (3.0 * x).cos()).abs() < 1e-14);
        assert!((s.d2(x) + 18.0 * (3.0 * x).sin()).abs() < 1e-14);
    }

    #[test]
    fn equation_names_round_trip() {
        for e in Equation::ALL {
            assert_eq!(e.name().parse::<Equation>().unwrap(), e);
        }
        assert!("phi43".parse::<Equation>().is_err());
    }
}
