//! Quadratic-Gaussian degraded broadcast surfaces.
//!
//! Channel: `Y1 = X + S + W1`, `Y2 = Y1 + W2` with superposition input
//! `X = U + X'`, `U ~ N(0, aP)`, `X' ~ N(0, (1-a)P)`, and additive state
//! descriptions `V_k = S_T + E_k`. For this family every feedback choice
//! `Z = psi(Y1, Y2)` yields the same mutual-information terms (given
//! `(S_T, U, X, Y1, Y2)` the descriptions are independent noise), so the
//! perfect-feedback substitution `Z = (Y1, Y2)` is used throughout.

use crate::error::{CdError, Result};
use crate::gaussian::system::{minus, GaussianSystem, GaussianSystemBuilder};
use crate::gaussian::{qg_d2, QGParams};

#[derive(Debug, Clone)]
pub struct QgBcInputs {
    pub p: f64,
    pub q: f64,
    pub n1: f64,
    pub n2: f64,
    pub n_t: f64,
    /// Weak-user distortion target; `f64::INFINITY` drops the second description.
    pub d2_target: f64,
    pub alpha_grid: Vec<f64>,
    pub d1sq_grid: Vec<f64>,
}

/// One grid point of the broadcast trade-off surfaces. Rates are clamped at
/// zero; the `raw` fields keep the unclamped values.
#[derive(Debug, Clone, Copy)]
pub struct QgBcPoint {
    pub alpha: f64,
    pub d1_sq: f64,
    pub d2_sq: f64,
    pub r1_sim: f64,
    pub r1_seq: f64,
    pub r2_sim: f64,
    pub r2_seq: f64,
    pub r1_sim_raw: f64,
    pub r1_seq_raw: f64,
    pub r2_sim_raw: f64,
    pub r2_seq_raw: f64,
    pub d1: f64,
    pub d2_check: f64,
    /// Decoder-1 gain of simultaneous decoding, `I(X; V2 | U, Y1)`.
    pub gap: f64,
}

/// Evaluates the simultaneous and sequential surfaces over the
/// `(alpha, d1^2)` grid; alphas whose `d2^2` is infeasible are dropped.
pub fn qg_bc_surfaces(inp: &QgBcInputs) -> Result<Vec<QgBcPoint>> {
    if inp.alpha_grid.is_empty() || inp.d1sq_grid.is_empty() {
        return Err(CdError::Domain("empty grid".into()));
    }
    let mut out = Vec::new();
    for &alpha in &inp.alpha_grid {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(CdError::Domain(format!("alpha {alpha} outside [0, 1]")));
        }
        // Effective single-user channel for the weak user: the private layer
        // acts as extra noise.
        let n_eff = (1.0 - alpha) * inp.p + inp.n1 + inp.n2;
        let d2_sq = if inp.d2_target.is_infinite() {
            f64::INFINITY
        } else {
            let prm = QGParams::new(alpha * inp.p, inp.q, n_eff, inp.n_t)?;
            match qg_d2(inp.d2_target, &prm) {
                Ok(v) => v,
                Err(_) => continue,
            }
        };
        for &d1_sq in &inp.d1sq_grid {
            if d1_sq < 0.0 {
                return Err(CdError::Domain(format!("d1^2 {d1_sq} must be nonnegative")));
            }
            out.push(eval_point(inp, alpha, d1_sq, d2_sq)?);
        }
    }
    Ok(out)
}

fn eval_point(inp: &QgBcInputs, alpha: f64, d1_sq: f64, d2_sq: f64) -> Result<QgBcPoint> {
    let sys = build_system(inp, alpha, d1_sq, d2_sq);
    // Z = (Y1, Y2); overlaps with conditioning sets are dropped.
    let z: [&str; 2] = ["Y1", "Y2"];

    let i_u_y2 = sys.cond_mutual_information(&["U"], &["Y2"], &[])?;
    let pen2_sim = sys.cond_mutual_information(
        &["V2"],
        &minus(&[&["S_T", "X"][..], &z[..]].concat(), &["U", "Y2"]),
        &["U", "Y2"],
    )?;
    let pen2_alt = sys.cond_mutual_information(
        &["V2"],
        &minus(&[&["S_T"][..], &z[..]].concat(), &["U", "X", "Y1"]),
        &["U", "X", "Y1"],
    )?;
    let pen1 = sys.cond_mutual_information(
        &["V1"],
        &minus(&[&["S_T"][..], &z[..]].concat(), &["U", "X", "V2", "Y1"]),
        &["U", "X", "V2", "Y1"],
    )?;
    let i_x_v2y1_u = sys.cond_mutual_information(&["X"], &["V2", "Y1"], &["U"])?;
    let i_x_y1_u = sys.cond_mutual_information(&["X"], &["Y1"], &["U"])?;
    let gap = sys.cond_mutual_information(&["X"], &["V2"], &["U", "Y1"])?;

    let r1_sim_raw = i_x_v2y1_u - pen1;
    let r1_seq_raw = i_x_y1_u - pen1;
    let r2_sim_raw = i_u_y2 - pen2_sim;
    let r2_seq_raw = i_u_y2 - pen2_sim.max(pen2_alt);
    let d1 = sys.conditional_variance("S", &["U", "X", "V1", "V2", "Y1"])?;
    let d2_check = sys.conditional_variance("S", &["U", "V2", "Y2"])?;

    Ok(QgBcPoint {
        alpha,
        d1_sq,
        d2_sq,
        r1_sim: r1_sim_raw.max(0.0),
        r1_seq: r1_seq_raw.max(0.0),
        r2_sim: r2_sim_raw.max(0.0),
        r2_seq: r2_seq_raw.max(0.0),
        r1_sim_raw,
        r1_seq_raw,
        r2_sim_raw,
        r2_seq_raw,
        d1,
        d2_check,
        gap,
    })
}

fn build_system(inp: &QgBcInputs, alpha: f64, d1_sq: f64, d2_sq: f64) -> GaussianSystem {
    let mut b = GaussianSystemBuilder::new();
    b.source("U", alpha * inp.p)
        .source("Xp", (1.0 - alpha) * inp.p)
        .source("S", inp.q)
        .source("W1", inp.n1)
        .source("W2", inp.n2)
        .source("WT", inp.n_t);
    // An infinite description variance means the description is pure noise;
    // substituting an independent unit-variance variable realizes that limit
    // exactly in every mutual-information and conditional-variance term.
    if d1_sq.is_infinite() {
        b.source("V1", 1.0);
    } else {
        b.source("E1", d1_sq);
    }
    if d2_sq.is_infinite() {
        b.source("V2", 1.0);
    } else {
        b.source("E2", d2_sq);
    }
    b.linear("X", &[("U", 1.0), ("Xp", 1.0)])
        .linear("Y1", &[("X", 1.0), ("S", 1.0), ("W1", 1.0)])
        .linear("Y2", &[("X", 1.0), ("S", 1.0), ("W1", 1.0), ("W2", 1.0)])
        .linear("S_T", &[("S", 1.0), ("WT", 1.0)]);
    if !d1_sq.is_infinite() {
        b.linear("V1", &[("S_T", 1.0), ("E1", 1.0)]);
    }
    if !d2_sq.is_infinite() {
        b.linear("V2", &[("S_T", 1.0), ("E2", 1.0)]);
    }
    b.build()
}
