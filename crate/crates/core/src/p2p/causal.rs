//! Causal transmitter state information via Shannon strategies.
//!
//! With the state observation available causally, the encoder picks a strategy
//! letter `U` and transmits `X = f(U, S_T)`. Folding the strategy map into the
//! channel yields an equivalent strictly-causal scenario over the composite
//! state `(S, S_T)` with input `U`, which the standard solver handles.

use ndarray::{ArrayD, IxDyn};

use crate::error::{CdError, Result};
use crate::estimation::Estimator;
use crate::opt::SolverOptions;
use crate::prob::{Axis, DistortionFn, FiniteDist, JointTable, Kernel};

use super::compiled::CompiledP2P;
use super::{
    best_feasible, bisect_toward_target, lagrangian_sweep, Candidate, P2PScenario, DIST_SLACK,
};

#[derive(Debug, Clone)]
pub struct CausalOptions {
    /// Strategy alphabet size. `None` uses the canonical strategy alphabet of
    /// size `|X|^|S_T|` (every map `S_T -> X` as one letter), which needs no
    /// enumeration; `Some(k)` enumerates all `|X|^(k |S_T|)` strategy maps.
    pub u_size: Option<usize>,
    pub inner: SolverOptions,
}

impl Default for CausalOptions {
    fn default() -> Self {
        Self { u_size: None, inner: SolverOptions::default() }
    }
}

/// A solved causal operating point.
#[derive(Debug, Clone)]
pub struct CausalCDPoint {
    pub target_distortion: f64,
    pub rate: f64,
    pub raw_objective: f64,
    pub distortion: f64,
    /// Strategy map `(u, s_t) -> x`, row-major in `u`.
    pub strategy: Vec<usize>,
    pub p_u: FiniteDist,
    pub compressor: Kernel,
    pub estimator: Estimator,
}

/// Causal capacity-distortion point: maximizes `I(U;Y) - I(V;S_T|U,Y)` over
/// the strategy distribution, the strategy map and the compressor, subject to
/// the distortion budget.
pub fn causal_cd(scen: &P2PScenario, target: f64, opts: &CausalOptions) -> Result<CausalCDPoint> {
    let nx = scen.input_axis().len();
    let nst = scen.sit_axis().len();
    let maps: Vec<(usize, Vec<usize>)> = match opts.u_size {
        None => {
            let nu = nx.checked_pow(nst as u32).ok_or_else(|| {
                CdError::Domain("canonical strategy alphabet overflows".into())
            })?;
            vec![(nu, canonical_strategy(nx, nst))]
        }
        Some(nu) => {
            let digits = nu * nst;
            let count = (nx as f64).powi(digits as i32);
            if count > 2e5 {
                return Err(CdError::Domain(format!(
                    "strategy enumeration of {count:.0} maps is too large"
                )));
            }
            enumerate_maps(nx, digits).into_iter().map(|m| (nu, m)).collect()
        }
    };

    let mut best: Option<(CausalCDPoint, f64)> = None;
    for (nu, map) in maps {
        let derived = shannon_scenario(scen, nu, &map)?;
        let nv = opts.inner.v_size.unwrap_or(derived.v_size).max(1);
        let c = CompiledP2P::new(&derived, nv);
        let mut cands = lagrangian_sweep(&c, &opts.inner);
        bisect_toward_target(&c, &mut cands, target, &opts.inner);
        let Some(cand) = best_feasible(&cands, target) else { continue };
        let better = match &best {
            None => true,
            Some((_, obj)) => cand.eval.raw_obj > *obj,
        };
        if better {
            let point = causal_point(&c, &derived, scen, cand, nu, &map, target)?;
            best = Some((point, cand.eval.raw_obj));
        }
    }
    best.map(|(p, _)| p).ok_or(CdError::InfeasibleDistortion(target))
}

/// Canonical strategy: `U` enumerates every map `S_T -> X` in mixed radix.
fn canonical_strategy(nx: usize, nst: usize) -> Vec<usize> {
    let nu = nx.pow(nst as u32);
    let mut table = Vec::with_capacity(nu * nst);
    for u in 0..nu {
        let mut rem = u;
        let mut digits = vec![0usize; nst];
        for d in (0..nst).rev() {
            digits[d] = rem % nx;
            rem /= nx;
        }
        table.extend(digits);
    }
    table
}

fn enumerate_maps(nx: usize, digits: usize) -> Vec<Vec<usize>> {
    let total = nx.pow(digits as u32);
    (0..total)
        .map(|mut idx| {
            let mut m = vec![0usize; digits];
            for d in (0..digits).rev() {
                m[d] = idx % nx;
                idx /= nx;
            }
            m
        })
        .collect()
}

/// Builds the equivalent strictly-causal scenario: composite state
/// `(S, S_T)`, input `U`, channel `P(y | u, (s, s_t)) = P(y | f(u, s_t), s)`.
fn shannon_scenario(scen: &P2PScenario, nu: usize, map: &[usize]) -> Result<P2PScenario> {
    let s_axis = scen.state_axis();
    let st_axis = scen.sit_axis();
    let y_axis = scen.output_axis();
    let (ns, nst, ny) = (s_axis.len(), st_axis.len(), y_axis.len());

    let comp_labels: Vec<String> = (0..ns * nst)
        .map(|i| format!("{}|{}", s_axis.labels()[i / nst], st_axis.labels()[i % nst]))
        .collect();
    let comp_axis = Axis::new("S", comp_labels.clone())?;
    let sit_axis = st_axis.clone();

    // P(S' = (s, s_t), S_T' = s_t).
    let mut vals = vec![0.0; ns * nst * nst];
    for s in 0..ns {
        for st in 0..nst {
            vals[(s * nst + st) * nst + st] = scen.pss_t.values()[[s, st]];
        }
    }
    let pss_t = JointTable::new(
        vec![comp_axis.clone(), sit_axis.clone()],
        ArrayD::from_shape_vec(IxDyn(&[ns * nst, nst]), vals).expect("shape"),
    )?;

    let u_axis = Axis::indexed("X", nu); // the derived scenario's input is U
    let mut chan_table = vec![0.0; nu * ns * nst * ny];
    for u in 0..nu {
        for s in 0..ns {
            for st in 0..nst {
                let x = map[u * nst + st];
                for y in 0..ny {
                    chan_table[((u * ns * nst) + s * nst + st) * ny + y] =
                        scen.chan.prob(x * ns + s, y);
                }
            }
        }
    }
    let chan = Kernel::new(vec![u_axis, comp_axis.clone()], vec![y_axis.clone()], chan_table)?;

    // Distortion on the composite state ignores the appended SIT digit.
    let mut dvals = Vec::with_capacity(ns * nst * scen.distortion.n_recons());
    for s in 0..ns {
        for _st in 0..nst {
            for r in 0..scen.distortion.n_recons() {
                dvals.push(scen.distortion.value(s, r));
            }
        }
    }
    let distortion =
        DistortionFn::new(comp_labels, scen.distortion.recon_labels().to_vec(), dvals)?;

    P2PScenario::new(pss_t, chan, scen.feedback.clone(), distortion)
}

fn causal_point(
    c: &CompiledP2P,
    derived: &P2PScenario,
    scen: &P2PScenario,
    cand: &Candidate,
    nu: usize,
    map: &[usize],
    target: f64,
) -> Result<CausalCDPoint> {
    let u_axis = Axis::indexed("U", nu);
    let p_u = FiniteDist::new(u_axis.clone(), cand.px.clone())?;
    let v_axis = derived.v_axis(c.nv);
    let compressor = Kernel::new(
        vec![u_axis.clone(), scen.sit_axis().clone(), scen.feedback.output().clone()],
        vec![v_axis.clone()],
        cand.k.clone(),
    )?;
    let h = c.derive_estimator(&cand.k);
    let estimator = Estimator::new(
        vec![u_axis, v_axis, scen.output_axis().clone()],
        h,
        scen.distortion.recon_labels().to_vec(),
    )?;
    debug_assert!(cand.eval.distortion <= target + DIST_SLACK);
    Ok(CausalCDPoint {
        target_distortion: target,
        rate: cand.eval.raw_obj.max(0.0),
        raw_objective: cand.eval.raw_obj,
        distortion: cand.eval.distortion,
        strategy: map.to_vec(),
        p_u,
        compressor,
        estimator,
    })
}
