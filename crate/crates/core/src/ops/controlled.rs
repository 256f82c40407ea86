use super::{Paracalc, TimeField};
use crate::error::Result;
use crate::spectral::{estimate_regularity, Field};

/// `u = u' < X + u#` for a time-independent reference `X`.
#[derive(Clone, Debug)]
pub struct ParacontrolledFunction {
    pub derivative: Field,
    pub reference: Field,
    pub remainder: Field,
}

impl ParacontrolledFunction {
    pub fn decompose(pc: &Paracalc, u: &Field, derivative: &Field, reference: &Field) -> Result<Self> {
        let remainder = u.try_sub(&pc.para_less(derivative, reference)?)?;
        Ok(Self { derivative: derivative.clone(), reference: reference.clone(), remainder })
    }

    pub fn reconstruct(&self, pc: &Paracalc) -> Result<Field> {
        pc.para_less(&self.derivative, &self.reference)?.try_add(&self.remainder)
    }

    /// Estimated regularity of `u#` minus that of `X`.
    pub fn remainder_gain(&self, window: Option<(i32, i32)>) -> Result<f64> {
        let r = estimate_regularity(&self.remainder, window)?;
        let x = estimate_regularity(&self.reference, window)?;
        Ok(r.alpha_hat - x.alpha_hat)
    }
}

/// `u = u' ⊘ X + u#` on a time mesh, with `L X` supplied.
#[derive(Clone, Debug)]
pub struct ParacontrolledPath {
    pub derivative: TimeField,
    pub reference: TimeField,
    pub remainder: TimeField,
}

impl ParacontrolledPath {
    pub fn decompose(
        pc: &Paracalc,
        u: &TimeField,
        derivative: &TimeField,
        reference: &TimeField,
        l_reference: &TimeField,
    ) -> Result<Self> {
        let w = pc.intertwined_para(derivative, l_reference)?;
        Ok(Self { derivative: derivative.clone(), reference: reference.clone(), remainder: u.try_sub(&w)? })
    }

    pub fn remainder_gain(&self, window: Option<(i32, i32)>) -> Result<f64> {
        let r = estimate_regularity(self.remainder.last(), window)?;
        let x = estimate_regularity(self.reference.last(), window)?;
        Ok(r.alpha_hat - x.alpha_hat)
    }
}
