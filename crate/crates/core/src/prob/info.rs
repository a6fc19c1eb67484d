//! Scalar information quantities. Everything is measured in bits; use
//! [`bits_to_nats`] / [`nats_to_bits`] to compare with natural-log expressions.

use super::dist::FiniteDist;
use crate::error::{CdError, Result};

pub const LN_2: f64 = std::f64::consts::LN_2;

pub fn bits_to_nats(bits: f64) -> f64 {
    bits * LN_2
}

pub fn nats_to_bits(nats: f64) -> f64 {
    nats / LN_2
}

/// `-sum p log2 p` with the convention `0 log 0 = 0`.
pub fn entropy_pmf(pmf: &[f64]) -> f64 {
    pmf.iter().map(|&p| if p > 0.0 { -p * p.log2() } else { 0.0 }).sum()
}

/// Shannon entropy of a distribution in bits.
pub fn entropy(dist: &FiniteDist) -> f64 {
    entropy_pmf(dist.pmf())
}

/// Binary entropy `H2(p) = -p log2 p - (1-p) log2 (1-p)`, zero at both endpoints.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(CdError::Domain(format!("binary_entropy argument {p} outside [0, 1]")));
    }
    Ok(entropy_pmf(&[p, 1.0 - p]))
}

/// Binary convolution `p * q = p(1-q) + (1-p)q`, the crossover probability of
/// cascaded binary symmetric channels.
pub fn star_convolve(p: f64, q: f64) -> Result<f64> {
    for v in [p, q] {
        if !(0.0..=1.0).contains(&v) {
            return Err(CdError::Domain(format!("star_convolve argument {v} outside [0, 1]")));
        }
    }
    Ok(p * (1.0 - q) + (1.0 - p) * q)
}

/// Inverts `H2` on `[0, 1/2]` by bisection.
pub fn binary_entropy_inverse(h: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&h) {
        return Err(CdError::Domain(format!("entropy value {h} outside [0, 1]")));
    }
    let (mut lo, mut hi) = (0.0_f64, 0.5_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if entropy_pmf(&[mid, 1.0 - mid]) < h {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
