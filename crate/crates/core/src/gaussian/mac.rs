//! Quadratic-Gaussian multiple-access regions.
//!
//! Channel `Y = X1 + X2 + S + W` with perfect feedback at both encoders,
//! shared side information `S_T = S + W_T`, and the cooperative
//! parameterization `W_k = X_k`, `X_k = sqrt(a_k P_k) U + U_k`,
//! `V_k = S_T + E_k`. Three region families are produced: the sampled
//! cooperative inner region, the time-sharing baseline between the two
//! single-user points, and the full-cooperation (pooled-power) outer bound.

use crate::error::{CdError, Result};
use crate::gaussian::system::{GaussianSystem, GaussianSystemBuilder};
use crate::gaussian::{c_qg, QGParams};
use crate::geometry::convex_hull_2d;

#[derive(Debug, Clone)]
pub struct QgMacInputs {
    pub p1: f64,
    pub p2: f64,
    pub q: f64,
    pub n: f64,
    pub n_t: f64,
    pub d1_sq: f64,
    pub d2_sq: f64,
    pub alpha1_grid: Vec<f64>,
    pub alpha2_grid: Vec<f64>,
}

/// Rate bounds of one `(alpha1, alpha2)` sample, clamped at zero.
#[derive(Debug, Clone, Copy)]
pub struct QgMacSample {
    pub alpha1: f64,
    pub alpha2: f64,
    pub r1: f64,
    pub r2: f64,
    pub sum_a: f64,
    pub sum_b: f64,
}

#[derive(Debug, Clone)]
pub struct QgMacRegions {
    /// Distortion achieved by the two descriptions; the same for every sample.
    pub distortion: f64,
    pub samples: Vec<QgMacSample>,
    /// Convex hull (counterclockwise) of the union of sample pentagons.
    pub proposed_hull: Vec<[f64; 2]>,
    /// Single-user capacities bounding the time-sharing segment; `None` when
    /// the distortion is infeasible for that user alone.
    pub ts_corner_1: Option<f64>,
    pub ts_corner_2: Option<f64>,
    /// Full-cooperation sum-rate bound with pooled power
    /// `P1 + P2 + 2 sqrt(P1 P2)`.
    pub outer_sum: f64,
}

pub fn qg_mac_regions(inp: &QgMacInputs) -> Result<QgMacRegions> {
    if inp.alpha1_grid.is_empty() || inp.alpha2_grid.is_empty() {
        return Err(CdError::Domain("empty grid".into()));
    }
    for g in inp.alpha1_grid.iter().chain(&inp.alpha2_grid) {
        if !(0.0..=1.0).contains(g) {
            return Err(CdError::Domain(format!("alpha {g} outside [0, 1]")));
        }
    }
    if inp.d1_sq < 0.0 || inp.d2_sq < 0.0 {
        return Err(CdError::Domain("description variances must be nonnegative".into()));
    }

    // D = Var(S | V1, V2, S + W); independent of the power splits.
    let probe = build_system(inp, 0.0, 0.0);
    let distortion = probe.conditional_variance("S", &["V1", "V2", "SW"])?;

    let mut samples = Vec::new();
    let mut hull_points: Vec<[f64; 2]> = vec![[0.0, 0.0]];
    for &a1 in &inp.alpha1_grid {
        for &a2 in &inp.alpha2_grid {
            let s = eval_sample(inp, a1, a2)?;
            for v in pentagon_vertices(&s) {
                hull_points.push(v);
            }
            samples.push(s);
        }
    }
    let proposed_hull = convex_hull_2d(&hull_points)?;

    let ts_corner_1 = c_qg(distortion, &QGParams::new(inp.p1, inp.q, inp.n, inp.n_t)?).ok();
    let ts_corner_2 = c_qg(distortion, &QGParams::new(inp.p2, inp.q, inp.n, inp.n_t)?).ok();

    let pooled = inp.p1 + inp.p2 + 2.0 * (inp.p1 * inp.p2).sqrt();
    let outer = build_pooled_system(inp, pooled);
    let outer_sum = (outer.cond_mutual_information(&["X"], &["Y"], &[])?
        - outer.cond_mutual_information(&["V1", "V2"], &["S_T"], &["X", "Y"])?)
    .max(0.0);

    Ok(QgMacRegions {
        distortion,
        samples,
        proposed_hull,
        ts_corner_1,
        ts_corner_2,
        outer_sum,
    })
}

fn eval_sample(inp: &QgMacInputs, a1: f64, a2: f64) -> Result<QgMacSample> {
    let sys = build_system(inp, a1, a2);
    // W_k = X_k and Z_k = Y; overlaps reduce the formal sets below.
    let pen1 = sys.cond_mutual_information(&["V1"], &["S_T", "Y"], &["U", "X1", "X2"])?;
    let pen2 = sys.cond_mutual_information(&["V2"], &["S_T", "Y"], &["U", "X1", "X2"])?;
    let coop1 = sys.cond_mutual_information(&["X1"], &["Y"], &["S_T", "U", "X2"])?;
    let coop2 = sys.cond_mutual_information(&["X2"], &["Y"], &["S_T", "U", "X1"])?;

    let r1 = sys.cond_mutual_information(&["V1"], &["Y"], &["U", "X1", "X2", "V2"])? + coop1 - pen1;
    let r2 = sys.cond_mutual_information(&["V2"], &["Y"], &["U", "X1", "X2", "V1"])? + coop2 - pen2;
    let sum_a = sys.cond_mutual_information(&["V1", "V2"], &["Y"], &["U", "X1", "X2"])?
        + coop1
        + coop2
        - pen1
        - pen2;
    let sum_b = sys.cond_mutual_information(&["U", "X1", "X2", "V1", "V2"], &["Y"], &[])?
        - pen1
        - pen2;
    Ok(QgMacSample {
        alpha1: a1,
        alpha2: a2,
        r1: r1.max(0.0),
        r2: r2.max(0.0),
        sum_a: sum_a.max(0.0),
        sum_b: sum_b.max(0.0),
    })
}

fn pentagon_vertices(s: &QgMacSample) -> Vec<[f64; 2]> {
    let cap = s.sum_a.min(s.sum_b);
    let r1 = s.r1.min(cap);
    let r2 = s.r2.min(cap);
    let mut v = vec![[r1, 0.0], [0.0, r2]];
    if s.r1 + s.r2 > cap {
        if cap - s.r2 >= 0.0 {
            v.push([cap - s.r2, s.r2]);
        }
        if cap - s.r1 >= 0.0 {
            v.push([s.r1, cap - s.r1]);
        }
    } else {
        v.push([s.r1, s.r2]);
    }
    v
}

fn build_system(inp: &QgMacInputs, a1: f64, a2: f64) -> GaussianSystem {
    let mut b = GaussianSystemBuilder::new();
    b.source("U", 1.0)
        .source("U1", (1.0 - a1) * inp.p1)
        .source("U2", (1.0 - a2) * inp.p2)
        .source("S", inp.q)
        .source("W", inp.n)
        .source("WT", inp.n_t)
        .source("E1", inp.d1_sq)
        .source("E2", inp.d2_sq);
    b.linear("X1", &[("U", (a1 * inp.p1).sqrt()), ("U1", 1.0)])
        .linear("X2", &[("U", (a2 * inp.p2).sqrt()), ("U2", 1.0)])
        .linear("Y", &[("X1", 1.0), ("X2", 1.0), ("S", 1.0), ("W", 1.0)])
        .linear("SW", &[("S", 1.0), ("W", 1.0)])
        .linear("S_T", &[("S", 1.0), ("WT", 1.0)])
        .linear("V1", &[("S_T", 1.0), ("E1", 1.0)])
        .linear("V2", &[("S_T", 1.0), ("E2", 1.0)]);
    b.build()
}

fn build_pooled_system(inp: &QgMacInputs, pooled: f64) -> GaussianSystem {
    let mut b = GaussianSystemBuilder::new();
    b.source("X", pooled)
        .source("S", inp.q)
        .source("W", inp.n)
        .source("WT", inp.n_t)
        .source("E1", inp.d1_sq)
        .source("E2", inp.d2_sq);
    b.linear("Y", &[("X", 1.0), ("S", 1.0), ("W", 1.0)])
        .linear("S_T", &[("S", 1.0), ("WT", 1.0)])
        .linear("V1", &[("S_T", 1.0), ("E1", 1.0)])
        .linear("V2", &[("S_T", 1.0), ("E2", 1.0)]);
    b.build()
}
