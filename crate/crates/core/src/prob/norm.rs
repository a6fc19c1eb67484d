use crate::error::{CdError, Result};

/// Mass within this distance from 1 is treated as exact.
pub const MASS_TOL: f64 = 1e-9;
/// Mass within this distance from 1 is silently renormalized; beyond it the input is rejected.
pub const RENORM_TOL: f64 = 1e-6;
/// Entries below this magnitude may be clamped to zero instead of rejected.
const NEG_CLAMP: f64 = 1e-12;

/// Validates nonnegativity and total mass of a pmf slice, renormalizing in place
/// when the mass is within [`RENORM_TOL`] of 1.
pub fn normalize_pmf(p: &mut [f64]) -> Result<()> {
    for v in p.iter_mut() {
        if !v.is_finite() {
            return Err(CdError::Invalid(format!("non-finite probability {v}")));
        }
        if *v < 0.0 {
            if *v > -NEG_CLAMP {
                *v = 0.0;
            } else {
                return Err(CdError::NegativeProbability(*v));
            }
        }
    }
    let mass: f64 = p.iter().sum();
    if (mass - 1.0).abs() <= MASS_TOL {
        return Ok(());
    }
    if (mass - 1.0).abs() <= RENORM_TOL {
        for v in p.iter_mut() {
            *v /= mass;
        }
        return Ok(());
    }
    Err(CdError::NotNormalized(mass))
}
