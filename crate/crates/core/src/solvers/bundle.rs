use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Equation;
use crate::error::{Error, Result};
use crate::io::{write_time_field, Provenance};
use crate::ops::{EtdStep, TimeField};
use crate::spectral::{Field, Spectrum, TorusGrid};
use crate::stochastic::NoiseInfo;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub blowup: bool,
    pub blowup_time: Option<f64>,
    /// Fixpoint iterations summed over all steps.
    pub iterations: usize,
    pub residuals: BTreeMap<String, f64>,
}

#[derive(Clone, Debug)]
pub struct SolutionBundle {
    pub equation: Equation,
    pub solution: TimeField,
    pub components: BTreeMap<String, TimeField>,
    pub provenance: NoiseInfo,
    pub diagnostics: Diagnostics,
}

#[derive(Serialize)]
struct Manifest<'a> {
    equation: Equation,
    grid: TorusGrid,
    times: &'a [f64],
    files: BTreeMap<String, String>,
    provenance: &'a NoiseInfo,
    diagnostics: &'a Diagnostics,
}

impl SolutionBundle {
    pub fn component(&self, name: &str) -> Result<&TimeField> {
        self.components.get(name).ok_or_else(|| Error::Unknown { kind: "component", name: name.to_string() })
    }

    pub fn final_state(&self) -> &Field {
        self.solution.last()
    }

    /// Writes `solution.pfld`, one file per component and `manifest.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let prov = |component: &str| Provenance {
            seed: self.provenance.seed,
            eps: Some(self.provenance.eps),
            kernel: self.provenance.kernel.map(|k| k.to_string()),
            equation: Some(self.equation.to_string()),
            component: Some(component.to_string()),
        };
        let mut files = BTreeMap::new();
        write_time_field(&dir.join("solution.pfld"), &self.solution, prov("solution"))?;
        files.insert("solution".to_string(), "solution.pfld".to_string());
        for (name, tf) in &self.components {
            let file = format!("{name}.pfld");
            write_time_field(&dir.join(&file), tf, prov(name))?;
            files.insert(name.clone(), file);
        }
        let manifest = Manifest {
            equation: self.equation,
            grid: self.solution.grid,
            times: &self.solution.times,
            files,
            provenance: &self.provenance,
            diagnostics: &self.diagnostics,
        };
        fs::write(dir.join("manifest.json"), serde_json::to_vec_pretty(&manifest)?)?;
        Ok(())
    }
}

/// Frame recorder shared by the time steppers: collects named tracks, stops on blowup
/// and truncates every track to the same length.
pub(crate) struct Recorder {
    times: Vec<f64>,
    tracks: Vec<Vec<Field>>,
    bound: f64,
    pub diagnostics: Diagnostics,
}

impl Recorder {
    pub fn new(times: Vec<f64>, tracks: usize, bound: f64) -> Self {
        Self { times, tracks: vec![Vec::new(); tracks], bound, diagnostics: Diagnostics::default() }
    }

    /// Pushes one frame per track; returns false (and flags blowup) if any frame is
    /// non-finite or exceeds the bound.
    pub fn push(&mut self, frames: Vec<Field>) -> bool {
        debug_assert_eq!(frames.len(), self.tracks.len());
        let m = self.tracks[0].len();
        let ok = frames.iter().all(|f| f.is_finite() && f.sup_norm() <= self.bound);
        if !ok {
            self.diagnostics.blowup = true;
            self.diagnostics.blowup_time = Some(self.times[m]);
            return false;
        }
        for (t, f) in self.tracks.iter_mut().zip(frames) {
            t.push(f);
        }
        true
    }

    pub fn finish(mut self) -> Result<(Vec<TimeField>, Diagnostics)> {
        let len = self.tracks[0].len();
        if len == 0 {
            return Err(Error::Degenerate("initial data already outside the blowup bound".into()));
        }
        self.times.truncate(len);
        let mut out = Vec::with_capacity(self.tracks.len());
        for frames in self.tracks {
            out.push(TimeField::new(self.times.clone(), frames)?);
        }
        Ok((out, self.diagnostics))
    }
}

/// State held in Fourier space and advanced by first-order ETD.
pub(crate) struct EtdState {
    pub spec: Spectrum,
    step: EtdStep,
}

impl EtdState {
    pub fn new(initial: &Field, dt: f64, mass: f64) -> Self {
        let grid = *initial.grid();
        Self { spec: initial.spectrum(), step: EtdStep::new(&grid, dt, mass) }
    }

    pub fn zeros(grid: TorusGrid, dt: f64, mass: f64) -> Self {
        Self::new(&Field::zeros(grid), dt, mass)
    }

    /// `w <- e^{-lambda dt} w + dt phi1(lambda dt) source`
    pub fn advance(&mut self, source: &Field) {
        let s = source.spectrum();
        self.step.advance(&mut self.spec.coeffs, &s.coeffs);
    }

    /// Advance with a source given in Fourier space plus an additive increment.
    pub fn advance_with(&mut self, source: &Spectrum, increment: Option<&[num_complex::Complex64]>) {
        self.step.advance(&mut self.spec.coeffs, &source.coeffs);
        if let Some(inc) = increment {
            for (c, d) in self.spec.coeffs.iter_mut().zip(inc) {
                *c += d;
            }
        }
    }

    pub fn field(&self) -> Field {
        self.spec.to_field()
    }
}
