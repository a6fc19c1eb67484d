//! Point-to-point capacity-distortion function: the rate objective
//! `I(X;Y) - I(V;S_T|X,Y)`, its maximization over the input law and the state
//! compressor, the minimum-distortion program, the causal Shannon-strategy
//! variant, and the radar special case.
//!
//! The distortion constraint is handled by a Lagrangian sweep over a geometric
//! multiplier grid with bisection refinement; each multiplier value is solved
//! by multi-start alternating ascent (exact Blahut-Arimoto input block,
//! exponentiated-gradient compressor block). Solutions are certified lower
//! bounds; global optimality is only guaranteed where the exhaustive oracles
//! confirm it.

mod causal;
mod compiled;

pub use causal::{causal_cd, CausalCDPoint, CausalOptions};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{CdError, Result};
use crate::estimation::Estimator;
use crate::geometry::concave_envelope;
use crate::opt::{derive_seed, dirichlet1, SolverOptions};
use crate::prob::{build_joint_p2p, Axis, DetMap, DistortionFn, FiniteDist, JointTable, Kernel};

pub(crate) use compiled::{CompiledP2P, EvalResult};

/// Feasibility slack on the distortion constraint.
pub const DIST_SLACK: f64 = 1e-6;

/// One point-to-point scenario: state prior with transmitter side information,
/// channel, deterministic feedback map, distortion table, and the compression
/// alphabet size.
#[derive(Debug, Clone)]
pub struct P2PScenario {
    pub pss_t: JointTable,
    pub chan: Kernel,
    pub feedback: DetMap,
    pub distortion: DistortionFn,
    pub v_size: usize,
}

impl P2PScenario {
    pub fn new(
        pss_t: JointTable,
        chan: Kernel,
        feedback: DetMap,
        distortion: DistortionFn,
    ) -> Result<Self> {
        let pss_t = if pss_t.axes()[0].name() == "S" { pss_t } else { pss_t.permute(&["S", "S_T"])? };
        if pss_t.axes().len() != 2 || pss_t.axes()[1].name() != "S_T" {
            return Err(CdError::Invalid("state table must have axes (S, S_T)".into()));
        }
        let in_names: Vec<&str> = chan.inputs().iter().map(Axis::name).collect();
        let out_names: Vec<&str> = chan.outputs().iter().map(Axis::name).collect();
        if in_names != ["X", "S"] || out_names != ["Y"] {
            return Err(CdError::Invalid("channel must be (X, S) -> Y".into()));
        }
        if chan.inputs()[1] != pss_t.axes()[0] {
            return Err(CdError::AlphabetMismatch("S".into()));
        }
        if feedback.inputs() != &chan.outputs()[..] || feedback.output().name() != "Z" {
            return Err(CdError::Invalid("feedback must map Y -> Z".into()));
        }
        if distortion.state_labels() != pss_t.axes()[0].labels() {
            return Err(CdError::AlphabetMismatch("S".into()));
        }
        let v_default = chan.inputs()[0].len() * pss_t.axes()[1].len() * feedback.output().len() + 2;
        Ok(Self { pss_t, chan, feedback, distortion, v_size: v_default })
    }

    pub fn with_v_size(mut self, v: usize) -> Self {
        self.v_size = v;
        self
    }

    pub fn state_axis(&self) -> &Axis {
        &self.pss_t.axes()[0]
    }

    pub fn sit_axis(&self) -> &Axis {
        &self.pss_t.axes()[1]
    }

    pub fn input_axis(&self) -> &Axis {
        &self.chan.inputs()[0]
    }

    pub fn output_axis(&self) -> &Axis {
        &self.chan.outputs()[0]
    }

    pub fn v_axis(&self, nv: usize) -> Axis {
        Axis::indexed("V", nv)
    }

    /// Assembles the full factorized joint for given input law and compressor.
    pub fn joint(&self, px: &FiniteDist, comp: &Kernel) -> Result<JointTable> {
        build_joint_p2p(&self.pss_t, px, &self.chan, &self.feedback, comp)
    }
}

/// The rate objective `I(X;Y) - I(V;S_T|X,Y)` evaluated on an assembled joint.
/// May be negative for poor variable choices.
pub fn cd_objective(joint: &JointTable) -> Result<f64> {
    let i_xy = joint.cond_mutual_information(&["X"], &["Y"], &[])?;
    let pen = joint.cond_mutual_information(&["V"], &["S_T"], &["X", "Y"])?;
    Ok(i_xy - pen)
}

/// A solved point on the capacity-distortion curve.
#[derive(Debug, Clone)]
pub struct CDPoint {
    pub target_distortion: f64,
    /// Achievable rate, clamped at zero (sending nothing is always available).
    pub rate: f64,
    /// The unclamped objective value.
    pub raw_objective: f64,
    /// Achieved distortion, at most `target_distortion + 1e-6`.
    pub distortion: f64,
    pub input: FiniteDist,
    pub compressor: Kernel,
    pub estimator: Estimator,
}

#[derive(Debug, Clone)]
pub(crate) struct Candidate {
    pub rho: f64,
    pub px: Vec<f64>,
    pub k: Vec<f64>,
    pub eval: EvalResult,
}

const K_STEPS_PER_ITER: usize = 4;

/// Alternating ascent on the Lagrangian at a fixed multiplier from one random start.
pub(crate) fn solve_at_rho(c: &CompiledP2P, rho: f64, seed: u64, opts: &SolverOptions) -> Candidate {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut px = dirichlet1(&mut rng, c.nx);
    let mut k = Vec::with_capacity(c.k_len());
    for _ in 0..c.k_len() / c.nv {
        k.extend(dirichlet1(&mut rng, c.nv));
    }
    let mut h = c.derive_estimator(&k);
    let mut lr = 1.0_f64;
    let mut grad = vec![0.0; c.k_len()];
    let mut history: Vec<f64> = Vec::new();

    let mut current = c.eval_with_estimator(&px, &k, &h);
    for iter in 0..opts.max_iters {
        px = c.best_px(&k, &h, rho);
        for _ in 0..K_STEPS_PER_ITER {
            let base = c.eval_with_estimator(&px, &k, &h).lagrangian(rho);
            c.grad_k(&px, &k, &h, rho, &mut grad);
            let mut accepted = false;
            let mut try_lr = lr;
            for _ in 0..5 {
                let cand = eg_step(&k, &grad, try_lr, c.nv);
                let val = c.eval_with_estimator(&px, &cand, &h).lagrangian(rho);
                if val > base + 1e-15 {
                    k = cand;
                    lr = (try_lr * 1.5).min(64.0);
                    accepted = true;
                    break;
                }
                try_lr *= 0.25;
            }
            if !accepted {
                lr = (lr * 0.5).max(1e-4);
                break;
            }
        }
        h = c.derive_estimator(&k);
        current = c.eval_with_estimator(&px, &k, &h);
        let l = current.lagrangian(rho);
        history.push(l);
        if iter >= 10 && l - history[history.len() - 11] < opts.tol {
            break;
        }
    }
    Candidate { rho, px, k, eval: current }
}

fn eg_step(k: &[f64], grad: &[f64], lr: f64, nv: usize) -> Vec<f64> {
    let mut out = vec![0.0; k.len()];
    for row in 0..k.len() / nv {
        let base = row * nv;
        let gmax = grad[base..base + nv].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut z = 0.0;
        for v in 0..nv {
            let e = (lr * (grad[base + v] - gmax)).clamp(-700.0, 0.0);
            out[base + v] = (k[base + v].max(1e-300)) * e.exp();
            z += out[base + v];
        }
        for v in 0..nv {
            out[base + v] /= z;
        }
    }
    out
}

/// Multi-start Lagrangian sweep over the multiplier grid. Results are
/// deterministic for a fixed seed regardless of worker count: every
/// `(multiplier, start)` pair derives its own stream and the per-multiplier
/// best is reduced in task order.
pub(crate) fn lagrangian_sweep(c: &CompiledP2P, opts: &SolverOptions) -> Vec<Candidate> {
    let rhos = opts.rho_values();
    let tasks: Vec<(usize, usize)> = (0..rhos.len())
        .flat_map(|ri| (0..opts.starts).map(move |s| (ri, s)))
        .collect();
    let solved: Vec<Candidate> = tasks
        .par_iter()
        .map(|&(ri, s)| {
            let seed = derive_seed(opts.seed, ((ri as u64) << 32) | s as u64);
            solve_at_rho(c, rhos[ri], seed, opts)
        })
        .collect();
    let mut best: Vec<Option<Candidate>> = vec![None; rhos.len()];
    for (task, cand) in tasks.iter().zip(solved) {
        let slot = &mut best[task.0];
        let better = match slot {
            None => true,
            Some(prev) => cand.eval.lagrangian(cand.rho) > prev.eval.lagrangian(prev.rho),
        };
        if better {
            *slot = Some(cand);
        }
    }
    let mut out: Vec<Candidate> = best.into_iter().flatten().collect();
    out.extend(deterministic_candidates(c));
    out
}

/// Point-mass inputs with a constant compressor: always-available operating
/// points (zero rate, radar-style estimation), independent of the multiplier.
fn deterministic_candidates(c: &CompiledP2P) -> Vec<Candidate> {
    let k = c.constant_k();
    let h = c.derive_estimator(&k);
    (0..c.nx)
        .map(|x| {
            let mut px = vec![0.0; c.nx];
            px[x] = 1.0;
            let eval = c.eval_with_estimator(&px, &k, &h);
            Candidate { rho: f64::INFINITY, px, k: k.clone(), eval }
        })
        .collect()
}

fn bisect_toward_target(
    c: &CompiledP2P,
    cands: &mut Vec<Candidate>,
    target: f64,
    opts: &SolverOptions,
) {
    for _ in 0..opts.bisection_steps {
        let mut lo: Option<f64> = None; // largest rho with distortion above target
        let mut hi: Option<f64> = None; // smallest rho with distortion at or below target
        for cand in cands.iter() {
            if !cand.rho.is_finite() {
                continue;
            }
            if cand.eval.distortion > target + DIST_SLACK {
                lo = Some(lo.map_or(cand.rho, |v: f64| v.max(cand.rho)));
            } else {
                hi = Some(hi.map_or(cand.rho, |v: f64| v.min(cand.rho)));
            }
        }
        let (lo, hi) = match (lo, hi) {
            (Some(l), Some(h)) if h > l => (l, h),
            _ => return,
        };
        if hi - lo < 1e-6 * (1.0 + hi) {
            return;
        }
        let mid = if lo == 0.0 { hi / 2.0 } else { (lo * hi).sqrt() };
        let per_start: Vec<Candidate> = (0..opts.starts)
            .into_par_iter()
            .map(|s| {
                let seed = derive_seed(opts.seed, 0xB15E_C000 ^ ((s as u64) << 8) ^ mid.to_bits());
                solve_at_rho(c, mid, seed, opts)
            })
            .collect();
        if let Some(best) = per_start
            .into_iter()
            .reduce(|a, b| if b.eval.lagrangian(mid) > a.eval.lagrangian(mid) { b } else { a })
        {
            cands.push(best);
        }
    }
}

/// Feasible-set polish: alternate the exact constrained input block with
/// compressor steps accepted only when they keep the distortion budget and
/// raise the raw objective.
fn constrained_polish(c: &CompiledP2P, seed_cand: &Candidate, target: f64) -> Candidate {
    let mut px = seed_cand.px.clone();
    let mut k = seed_cand.k.clone();
    let mut h = c.derive_estimator(&k);
    let rho_dir = if seed_cand.rho.is_finite() { seed_cand.rho } else { 1.0 };
    let mut grad = vec![0.0; c.k_len()];
    let mut best = c.eval_with_estimator(&px, &k, &h);
    let mut lr = 0.5_f64;
    let mut stall = 0usize;
    for _ in 0..300 {
        if let Some(p) = c.best_px_constrained(&k, &h, target + 0.5 * DIST_SLACK) {
            let e = c.eval_with_estimator(&p, &k, &h);
            if e.raw_obj > best.raw_obj && e.distortion <= target + DIST_SLACK {
                px = p;
                best = e;
            }
        }
        c.grad_k(&px, &k, &h, rho_dir, &mut grad);
        let mut improved = false;
        let mut try_lr = lr;
        for _ in 0..4 {
            let cand_k = eg_step(&k, &grad, try_lr, c.nv);
            let cand_h = c.derive_estimator(&cand_k);
            let e = c.eval_with_estimator(&px, &cand_k, &cand_h);
            if e.distortion <= target + DIST_SLACK && e.raw_obj > best.raw_obj + 1e-13 {
                k = cand_k;
                h = cand_h;
                best = e;
                lr = (try_lr * 1.5).min(16.0);
                improved = true;
                break;
            }
            try_lr *= 0.25;
        }
        if !improved {
            lr = (lr * 0.5).max(1e-4);
            stall += 1;
            if stall > 20 {
                break;
            }
        } else {
            stall = 0;
        }
    }
    Candidate { rho: rho_dir, px, k, eval: best }
}

fn candidate_to_point(c: &CompiledP2P, scen: &P2PScenario, cand: &Candidate, target: f64) -> Result<CDPoint> {
    let v_axis = scen.v_axis(c.nv);
    let input = FiniteDist::new(scen.input_axis().clone(), cand.px.clone())?;
    let compressor = Kernel::new(
        vec![scen.input_axis().clone(), scen.sit_axis().clone(), scen.feedback.output().clone()],
        vec![v_axis.clone()],
        cand.k.clone(),
    )?;
    let h = c.derive_estimator(&cand.k);
    let estimator = Estimator::new(
        vec![scen.input_axis().clone(), v_axis, scen.output_axis().clone()],
        h,
        scen.distortion.recon_labels().to_vec(),
    )?;
    Ok(CDPoint {
        target_distortion: target,
        rate: cand.eval.raw_obj.max(0.0),
        raw_objective: cand.eval.raw_obj,
        distortion: cand.eval.distortion,
        input,
        compressor,
        estimator,
    })
}

fn best_feasible(cands: &[Candidate], target: f64) -> Option<&Candidate> {
    cands
        .iter()
        .filter(|c| c.eval.distortion <= target + DIST_SLACK)
        .max_by(|a, b| a.eval.raw_obj.partial_cmp(&b.eval.raw_obj).unwrap())
}

/// Best rate found subject to `E[d] <= target + 1e-6`.
///
/// Errors with [`CdError::InfeasibleDistortion`] when the target is below
/// every achievable distortion the sweep can reach.
pub fn solve_cd(scen: &P2PScenario, target: f64, opts: &SolverOptions) -> Result<CDPoint> {
    let nv = opts.v_size.unwrap_or(scen.v_size).max(1);
    let c = CompiledP2P::new(scen, nv);
    let mut cands = lagrangian_sweep(&c, opts);
    bisect_toward_target(&c, &mut cands, target, opts);
    let seed_cand = match best_feasible(&cands, target) {
        Some(cand) => cand.clone(),
        None => return Err(CdError::InfeasibleDistortion(target)),
    };
    let polished = constrained_polish(&c, &seed_cand, target);
    let final_cand = if polished.eval.raw_obj > seed_cand.eval.raw_obj
        && polished.eval.distortion <= target + DIST_SLACK
    {
        polished
    } else {
        seed_cand
    };
    candidate_to_point(&c, scen, &final_cand, target)
}

/// A capacity-distortion curve point after envelope post-processing.
#[derive(Debug, Clone)]
pub struct CurvePoint {
    pub target_distortion: f64,
    /// Time-sharing envelope value at this distortion.
    pub rate: f64,
    /// The best pure operating point found.
    pub point: CDPoint,
}

/// Solves the curve on a distortion grid and lifts it to its non-decreasing
/// concave upper envelope (time-sharing closure). Grid points below every
/// achievable distortion are skipped.
pub fn cd_curve(scen: &P2PScenario, d_grid: &[f64], opts: &SolverOptions) -> Result<Vec<CurvePoint>> {
    if d_grid.is_empty() {
        return Err(CdError::Domain("empty distortion grid".into()));
    }
    if d_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CdError::Domain("distortion grid must be sorted ascending".into()));
    }
    let nv = opts.v_size.unwrap_or(scen.v_size).max(1);
    let c = CompiledP2P::new(scen, nv);
    let mut cands = lagrangian_sweep(&c, opts);
    bisect_toward_target(&c, &mut cands, d_grid[0], opts);

    let mut raw: Vec<(f64, CDPoint)> = Vec::new();
    for &d in d_grid {
        if let Some(cand) = best_feasible(&cands, d) {
            raw.push((d, candidate_to_point(&c, scen, cand, d)?));
        }
    }
    if raw.is_empty() {
        return Err(CdError::InfeasibleDistortion(d_grid[0]));
    }
    let curve: Vec<(f64, f64)> = raw.iter().map(|(d, p)| (*d, p.rate)).collect();
    let env = concave_envelope(&curve)?;
    Ok(raw
        .into_iter()
        .zip(env)
        .map(|((d, point), (_, rate))| CurvePoint { target_distortion: d, rate, point })
        .collect())
}

/// Upper bound on the minimum achievable distortion: the least distortion seen
/// across the sweep among candidates with a nonnegative objective.
pub fn d_min(scen: &P2PScenario, opts: &SolverOptions) -> Result<f64> {
    let nv = opts.v_size.unwrap_or(scen.v_size).max(1);
    let c = CompiledP2P::new(scen, nv);
    let cands = lagrangian_sweep(&c, opts);
    cands
        .iter()
        .filter(|cand| cand.eval.raw_obj >= -1e-9)
        .map(|cand| cand.eval.distortion)
        .min_by(|a, b| a.partial_cmp(b).unwrap())
        .ok_or_else(|| CdError::Invalid("no candidate with nonnegative objective".into()))
}

/// Result of the radar (pure sensing) reduction: per-input Bayes distortions
/// and the best deterministic transmit symbol.
#[derive(Debug, Clone)]
pub struct RadarResult {
    pub per_input: Vec<f64>,
    pub best_index: usize,
    pub best_symbol: String,
    pub best_distortion: f64,
}

/// Minimum estimation distortion of a sensing-only system: a deterministic
/// transmit symbol attains the optimum, so it suffices to scan inputs and
/// apply the Bayes estimator to the echo.
pub fn radar_min_distortion(
    prior: &FiniteDist,
    echo: &Kernel,
    d: &DistortionFn,
) -> Result<RadarResult> {
    let in_names: Vec<&str> = echo.inputs().iter().map(Axis::name).collect();
    if in_names.len() != 2 || echo.outputs().len() != 1 {
        return Err(CdError::Invalid("echo kernel must be (X, S) -> Y".into()));
    }
    let (x_axis, s_axis) = (&echo.inputs()[0], &echo.inputs()[1]);
    if s_axis.labels() != prior.axis().labels() {
        return Err(CdError::AlphabetMismatch(s_axis.name().to_string()));
    }
    if d.state_labels() != s_axis.labels() {
        return Err(CdError::AlphabetMismatch("S".into()));
    }
    let (nx, ns, ny, nr) = (x_axis.len(), s_axis.len(), echo.n_output_cells(), d.n_recons());
    let mut per_input = Vec::with_capacity(nx);
    for x in 0..nx {
        let mut total = 0.0;
        for y in 0..ny {
            let mut best = f64::INFINITY;
            for r in 0..nr {
                let mut v = 0.0;
                for s in 0..ns {
                    v += prior.pmf()[s] * echo.prob(x * ns + s, y) * d.value(s, r);
                }
                best = best.min(v);
            }
            total += best;
        }
        per_input.push(total);
    }
    let best_index = per_input
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    Ok(RadarResult {
        best_distortion: per_input[best_index],
        best_symbol: x_axis.labels()[best_index].clone(),
        best_index,
        per_input,
    })
}
