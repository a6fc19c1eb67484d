use crate::error::{CdError, Result};

/// Per-symbol distortion table `d(s, s_hat) >= 0` between a state alphabet and
/// a reconstruction alphabet.
#[derive(Debug, Clone)]
pub struct DistortionFn {
    state_labels: Vec<String>,
    recon_labels: Vec<String>,
    values: Vec<f64>,
}

impl DistortionFn {
    pub fn new(state_labels: Vec<String>, recon_labels: Vec<String>, values: Vec<f64>) -> Result<Self> {
        if values.len() != state_labels.len() * recon_labels.len() {
            return Err(CdError::Invalid(format!(
                "distortion table length {} does not match {}x{}",
                values.len(),
                state_labels.len(),
                recon_labels.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(CdError::Invalid("distortion entries must be finite and nonnegative".into()));
        }
        Ok(Self { state_labels, recon_labels, values })
    }

    /// Hamming distortion `1{s != s_hat}` on a shared alphabet.
    pub fn hamming(labels: &[String]) -> Self {
        let n = labels.len();
        let mut values = vec![1.0; n * n];
        for i in 0..n {
            values[i * n + i] = 0.0;
        }
        Self { state_labels: labels.to_vec(), recon_labels: labels.to_vec(), values }
    }

    /// Squared error between numeric state and reconstruction points.
    pub fn squared_error(state_points: &[f64], recon_points: &[f64]) -> Self {
        let state_labels: Vec<String> = state_points.iter().map(|v| format!("{v}")).collect();
        let recon_labels: Vec<String> = recon_points.iter().map(|v| format!("{v}")).collect();
        let mut values = Vec::with_capacity(state_points.len() * recon_points.len());
        for &s in state_points {
            for &r in recon_points {
                values.push((s - r) * (s - r));
            }
        }
        Self { state_labels, recon_labels, values }
    }

    /// All-zero distortion: no estimation task.
    pub fn zero(state_labels: &[String], recon_labels: &[String]) -> Self {
        Self {
            state_labels: state_labels.to_vec(),
            recon_labels: recon_labels.to_vec(),
            values: vec![0.0; state_labels.len() * recon_labels.len()],
        }
    }

    pub fn state_labels(&self) -> &[String] {
        &self.state_labels
    }

    pub fn recon_labels(&self) -> &[String] {
        &self.recon_labels
    }

    pub fn n_states(&self) -> usize {
        self.state_labels.len()
    }

    pub fn n_recons(&self) -> usize {
        self.recon_labels.len()
    }

    pub fn value(&self, state: usize, recon: usize) -> f64 {
        self.values[state * self.recon_labels.len() + recon]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}
