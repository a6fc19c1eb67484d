use super::axis::Axis;
use super::norm::normalize_pmf;
use crate::error::{CdError, Result};

/// Probability mass function over a labeled finite alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDist {
    axis: Axis,
    pmf: Vec<f64>,
}

impl FiniteDist {
    pub fn new(axis: Axis, mut pmf: Vec<f64>) -> Result<Self> {
        if pmf.len() != axis.len() {
            return Err(CdError::Invalid(format!(
                "pmf length {} does not match alphabet size {} of `{}`",
                pmf.len(),
                axis.len(),
                axis.name()
            )));
        }
        normalize_pmf(&mut pmf)?;
        Ok(Self { axis, pmf })
    }

    pub fn uniform(axis: Axis) -> Self {
        let n = axis.len();
        Self { axis, pmf: vec![1.0 / n as f64; n] }
    }

    pub fn point_mass(axis: Axis, index: usize) -> Result<Self> {
        if index >= axis.len() {
            return Err(CdError::Domain(format!("point mass index {index} out of range")));
        }
        let mut pmf = vec![0.0; axis.len()];
        pmf[index] = 1.0;
        Ok(Self { axis, pmf })
    }

    /// Bernoulli(p) on the binary alphabet `{0, 1}`, with `P(1) = p`.
    pub fn bernoulli(name: impl Into<String>, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(CdError::Domain(format!("Bernoulli parameter {p} outside [0, 1]")));
        }
        Ok(Self { axis: Axis::binary(name), pmf: vec![1.0 - p, p] })
    }

    pub fn axis(&self) -> &Axis {
        &self.axis
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn len(&self) -> usize {
        self.pmf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pmf.is_empty()
    }
}
