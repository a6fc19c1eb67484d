//! Closed-form quadratic-Gaussian results and their covariance-algebra
//! counterparts.
//!
//! The scalar channel is `Y = X + S + W` with state `S ~ N(0, Q)`, noise
//! `W ~ N(0, N)`, input power `P`, squared-error distortion, and transmitter
//! side information `S_T = S + W_T`, `W_T ~ N(0, N_T)`.

pub mod bc;
pub mod mac;
mod system;

pub use bc::{qg_bc_surfaces, QgBcInputs, QgBcPoint};
pub use mac::{qg_mac_regions, QgMacInputs, QgMacRegions, QgMacSample};
pub use system::{minus, GaussianSystem, GaussianSystemBuilder};

use crate::error::{CdError, Result};

/// Parameter record for the scalar quadratic-Gaussian channel.
/// `n_t = f64::INFINITY` means useless side information and is handled by the
/// analytic limit rather than by large-number substitution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QGParams {
    pub p: f64,
    pub q: f64,
    pub n: f64,
    pub n_t: f64,
}

impl QGParams {
    pub fn new(p: f64, q: f64, n: f64, n_t: f64) -> Result<Self> {
        if !(p >= 0.0) || !(q > 0.0) || !(n > 0.0) || !(n_t >= 0.0) {
            return Err(CdError::Domain(format!(
                "invalid Gaussian parameters P={p}, Q={q}, N={n}, N_T={n_t}"
            )));
        }
        Ok(Self { p, q, n, n_t })
    }

    /// MMSE of `S` from `(S_T, S + W)`: the infimum of reachable distortion
    /// with an unconstrained-rate description.
    pub fn sit_floor(&self) -> f64 {
        if self.n_t.is_infinite() {
            return self.q * self.n / (self.q + self.n);
        }
        let inv = 1.0 / self.q + 1.0 / self.n + if self.n_t > 0.0 { 1.0 / self.n_t } else { return 0.0 };
        1.0 / inv
    }
}

/// Least distortion at which any positive rate is feasible:
/// `(Q^2 N^2 + Q N N_T (P+Q+N)) / ((P+Q+N)(QN + Q N_T + N N_T))`.
pub fn qg_d_min(prm: &QGParams) -> f64 {
    let QGParams { p, q, n, n_t } = *prm;
    if n_t.is_infinite() {
        return q * n / (q + n);
    }
    (q * q * n * n + q * n * n_t * (p + q + n)) / ((p + q + n) * (q * n + q * n_t + n * n_t))
}

/// The capacity-distortion function
/// `C(D) = 1/2 [log(1 + P/(Q+N)) - log+ (Q^2 N^2 / ((Q+N)(D(QN + Q N_T + N N_T) - Q N N_T)))]`
/// in bits, defined for `D >= qg_d_min`.
pub fn c_qg(d: f64, prm: &QGParams) -> Result<f64> {
    let QGParams { p, q, n, n_t } = *prm;
    let cap = 0.5 * (1.0 + p / (q + n)).log2();
    if n_t.is_infinite() {
        if d < q * n / (q + n) - 1e-12 {
            return Err(CdError::InfeasibleDistortion(d));
        }
        return Ok(cap);
    }
    if d < qg_d_min(prm) - 1e-12 {
        return Err(CdError::InfeasibleDistortion(d));
    }
    let denom = (q + n) * (d * (q * n + q * n_t + n * n_t) - q * n * n_t);
    let penalty = if denom <= 0.0 {
        // Only reachable through the feasibility slack right at the threshold.
        cap
    } else {
        0.5 * (q * q * n * n / denom).log2().max(0.0)
    };
    Ok(cap - penalty)
}

/// Compression-noise variance of the single optimal description `V = S_T + E`:
/// `d^2 = (D(QN + Q N_T + N N_T) - Q N N_T) / (QN - DQ - DN)`.
///
/// Valid for `sit_floor <= D < QN/(Q+N)`; the upper endpoint is the
/// no-description limit where `d^2` diverges.
pub fn qg_d2(d: f64, prm: &QGParams) -> Result<f64> {
    let QGParams { q, n, n_t, .. } = *prm;
    if n_t.is_infinite() {
        return Err(CdError::Domain("no useful description exists for infinite N_T".into()));
    }
    let num = d * (q * n + q * n_t + n * n_t) - q * n * n_t;
    let den = q * n - d * q - d * n;
    if num < -1e-12 || den <= 0.0 {
        return Err(CdError::InfeasibleDistortion(d));
    }
    Ok(num.max(0.0) / den)
}

/// Per-description noise variance when `k` equal independent descriptions
/// `V_i = S_T + E_i` jointly achieve distortion `D`: their precision adds, so
/// each needs variance `k * qg_d2(D)`.
pub fn qg_equal_split_d2(d: f64, prm: &QGParams, k: usize) -> Result<f64> {
    Ok(k as f64 * qg_d2(d, prm)?)
}

/// Coefficients of the linear MMSE estimator `h(v, y - x)` for a single
/// description `V = S_T + E`, `E ~ N(0, d2)`:
/// `h = (QN v + (Q N_T + d2 Q)(y - x)) / (QN + Q N_T + N N_T + d2 (Q + N))`.
#[derive(Debug, Clone, Copy)]
pub struct MmseCoeffs {
    pub v_coef: f64,
    pub y_minus_x_coef: f64,
    /// Achieved mean squared error, `Var(S | V, S + W)`.
    pub mse: f64,
}

pub fn qg_mmse_estimator_coeffs(prm: &QGParams, d2: f64) -> Result<MmseCoeffs> {
    let QGParams { q, n, n_t, .. } = *prm;
    if d2 < 0.0 {
        return Err(CdError::Domain(format!("description variance {d2} must be nonnegative")));
    }
    if d2.is_infinite() || n_t.is_infinite() {
        // The description carries nothing: estimate from the channel residue.
        return Ok(MmseCoeffs {
            v_coef: 0.0,
            y_minus_x_coef: q / (q + n),
            mse: q * n / (q + n),
        });
    }
    let den = q * n + q * n_t + n * n_t + d2 * (q + n);
    let eff = n_t + d2;
    let mse = if eff > 0.0 {
        1.0 / (1.0 / q + 1.0 / n + 1.0 / eff)
    } else {
        0.0
    };
    Ok(MmseCoeffs { v_coef: q * n / den, y_minus_x_coef: (q * n_t + d2 * q) / den, mse })
}
