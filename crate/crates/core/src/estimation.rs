//! Optimal Bayes estimation and distortion evaluation.
//!
//! The minimum expected distortion given an observation tuple is achieved by a
//! deterministic map picking, per observation, the reconstruction minimizing
//! the posterior expected distortion. Randomized estimators cannot do better,
//! so estimators here are plain lookup tables.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CdError, Result};
use crate::prob::{Axis, DistortionFn, JointTable};

/// Deterministic map from an observation tuple to a reconstruction symbol.
#[derive(Debug, Clone)]
pub struct Estimator {
    obs_axes: Vec<Axis>,
    map: Vec<usize>,
    recon_labels: Vec<String>,
}

impl Estimator {
    pub fn new(obs_axes: Vec<Axis>, map: Vec<usize>, recon_labels: Vec<String>) -> Result<Self> {
        let n_obs: usize = obs_axes.iter().map(Axis::len).product();
        if map.len() != n_obs {
            return Err(CdError::Invalid(format!(
                "estimator table length {} does not match observation cells {}",
                map.len(),
                n_obs
            )));
        }
        if map.iter().any(|&r| r >= recon_labels.len()) {
            return Err(CdError::Invalid("estimator output index out of range".into()));
        }
        Ok(Self { obs_axes, map, recon_labels })
    }

    pub fn obs_axes(&self) -> &[Axis] {
        &self.obs_axes
    }

    pub fn obs_axis_names(&self) -> Vec<&str> {
        self.obs_axes.iter().map(Axis::name).collect()
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn recon_labels(&self) -> &[String] {
        &self.recon_labels
    }

    /// Reconstruction index for a flat observation index.
    pub fn lookup_flat(&self, obs_flat: usize) -> usize {
        self.map[obs_flat]
    }
}

/// Posterior-optimal estimator of `state_axis` from `obs_axes` under distortion `d`.
///
/// Ties are broken toward the lowest reconstruction index; observation tuples
/// with zero probability map to the prior-optimal reconstruction.
pub fn bayes_estimator(
    joint: &JointTable,
    state_axis: &str,
    obs_axes: &[&str],
    d: &DistortionFn,
) -> Result<Estimator> {
    if obs_axes.is_empty() {
        return Err(CdError::Domain("estimator needs at least one observation axis".into()));
    }
    let state = joint.axis(state_axis)?.clone();
    if state.labels() != d.state_labels() {
        return Err(CdError::AlphabetMismatch(state_axis.to_string()));
    }
    let ns = state.len();
    let nr = d.n_recons();

    // Arrange as P(state, obs...) and scan observation columns.
    let mut order: Vec<&str> = vec![state_axis];
    order.extend_from_slice(obs_axes);
    let marg = joint.marginalize(&order)?.permute(&order)?;
    let obs_axes_owned: Vec<Axis> = marg.axes()[1..].to_vec();
    let n_obs: usize = obs_axes_owned.iter().map(Axis::len).product();
    let flat = marg.values().as_slice().expect("standard layout");

    // Prior-optimal fallback for zero-probability observations.
    let mut prior = vec![0.0; ns];
    for s in 0..ns {
        for o in 0..n_obs {
            prior[s] += flat[s * n_obs + o];
        }
    }
    let prior_best = argmin_expected(&prior, d, ns, nr);

    let mut map = Vec::with_capacity(n_obs);
    let mut posterior = vec![0.0; ns];
    for o in 0..n_obs {
        let mut mass = 0.0;
        for s in 0..ns {
            posterior[s] = flat[s * n_obs + o];
            mass += posterior[s];
        }
        map.push(if mass > 0.0 { argmin_expected(&posterior, d, ns, nr) } else { prior_best });
    }
    Estimator::new(obs_axes_owned, map, d.recon_labels().to_vec())
}

fn argmin_expected(weights: &[f64], d: &DistortionFn, ns: usize, nr: usize) -> usize {
    let mut best = 0usize;
    let mut best_val = f64::INFINITY;
    for r in 0..nr {
        let mut v = 0.0;
        for s in 0..ns {
            v += weights[s] * d.value(s, r);
        }
        if v < best_val {
            best_val = v;
            best = r;
        }
    }
    best
}

/// Expected distortion `E[d(S, est(obs))]` of an estimator on a joint law.
pub fn expected_distortion(
    joint: &JointTable,
    state_axis: &str,
    est: &Estimator,
    d: &DistortionFn,
) -> Result<f64> {
    let obs_names = est.obs_axis_names();
    let mut order: Vec<&str> = vec![state_axis];
    order.extend_from_slice(&obs_names);
    let marg = joint.marginalize(&order)?.permute(&order)?;
    for (have, want) in marg.axes()[1..].iter().zip(est.obs_axes()) {
        if have != want {
            return Err(CdError::AlphabetMismatch(want.name().to_string()));
        }
    }
    let ns = marg.axes()[0].len();
    let n_obs: usize = est.obs_axes().iter().map(Axis::len).product();
    let flat = marg.values().as_slice().expect("standard layout");
    let mut total = 0.0;
    for s in 0..ns {
        for o in 0..n_obs {
            let p = flat[s * n_obs + o];
            if p > 0.0 {
                total += p * d.value(s, est.lookup_flat(o));
            }
        }
    }
    Ok(total)
}

/// Minimum expected Hamming distortion when estimating `S ~ Bern(p1)` from
/// `V = S xor W`, `W ~ Bern(p2)`: equals `min(p1, p2)` for `p1, p2 <= 1/2`.
pub fn bern_xor_min_distortion(p1: f64, p2: f64) -> Result<f64> {
    for p in [p1, p2] {
        if !(0.0..=0.5).contains(&p) {
            return Err(CdError::Domain(format!("parameter {p} outside [0, 1/2]")));
        }
    }
    Ok(p1.min(p2))
}

/// Constructs the joint `P(S, V)` of the XOR observation model above.
pub fn bern_xor_joint(p1: f64, p2: f64) -> Result<JointTable> {
    let axes = vec![Axis::binary("S"), Axis::binary("V")];
    let (q1, q2) = (1.0 - p1, 1.0 - p2);
    let values = ndarray::ArrayD::from_shape_vec(
        ndarray::IxDyn(&[2, 2]),
        vec![q1 * q2, q1 * p2, p1 * p2, p1 * q2],
    )
    .expect("static shape");
    JointTable::new(axes, values)
}

/// Checks that `S - V - W` is a Markov chain in `joint` (total-variation
/// residual of `P(w | v, s)` against `P(w | v)` within `tol`), then returns the
/// Bayes distortions using `(V, W)` and `V` alone. Under the Markov condition
/// the two are equal: the side observation `W` carries no extra information.
pub fn markov_reduction_check(
    joint: &JointTable,
    state_axis: &str,
    v_axes: &[&str],
    w_axes: &[&str],
    d: &DistortionFn,
    tol: f64,
) -> Result<(f64, f64)> {
    let residual = markov_residual(joint, state_axis, v_axes, w_axes)?;
    if residual > tol {
        return Err(CdError::MarkovViolated(residual));
    }
    let mut vw: Vec<&str> = v_axes.to_vec();
    vw.extend_from_slice(w_axes);
    let est_vw = bayes_estimator(joint, state_axis, &vw, d)?;
    let est_v = bayes_estimator(joint, state_axis, v_axes, d)?;
    let with_w = expected_distortion(joint, state_axis, &est_vw, d)?;
    let without_w = expected_distortion(joint, state_axis, &est_v, d)?;
    Ok((with_w, without_w))
}

/// Max over positive-mass `(v, s)` cells of the TV distance between
/// `P(w | v, s)` and `P(w | v)`.
pub fn markov_residual(
    joint: &JointTable,
    state_axis: &str,
    v_axes: &[&str],
    w_axes: &[&str],
) -> Result<f64> {
    let mut given_vs: Vec<&str> = v_axes.to_vec();
    given_vs.push(state_axis);
    let (k_vs, mass_vs) = joint.conditional(w_axes, &given_vs)?;
    let (k_v, _) = joint.conditional(w_axes, v_axes)?;
    let n_out = k_vs.n_output_cells();
    let ns = joint.axis(state_axis)?.len();
    let mut worst = 0.0_f64;
    for (row, &mass) in mass_vs.iter().enumerate() {
        if mass <= 0.0 {
            continue;
        }
        // Row layout of `k_vs` is (v..., s); strip the trailing state digit.
        let v_row = row / ns;
        let mut tv = 0.0;
        for o in 0..n_out {
            tv += (k_vs.prob(row, o) - k_v.prob(v_row, o)).abs();
        }
        worst = worst.max(0.5 * tv);
    }
    Ok(worst)
}

/// Seeded i.i.d. sampling estimate of the expected distortion.
///
/// Returns the sample mean and its standard error. Deterministic for a fixed
/// seed; parallel shards should derive distinct seeds.
pub fn monte_carlo_distortion(
    joint: &JointTable,
    state_axis: &str,
    est: &Estimator,
    d: &DistortionFn,
    n: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(CdError::Domain("sample count must be at least 1".into()));
    }
    let obs_names = est.obs_axis_names();
    let mut order: Vec<&str> = vec![state_axis];
    order.extend_from_slice(&obs_names);
    let marg = joint.marginalize(&order)?.permute(&order)?;
    let flat = marg.values().as_slice().expect("standard layout");
    let n_obs: usize = est.obs_axes().iter().map(Axis::len).product();

    // Cumulative distribution over flattened (state, obs) cells.
    let mut cdf = Vec::with_capacity(flat.len());
    let mut acc = 0.0;
    for &p in flat {
        acc += p;
        cdf.push(acc);
    }
    let total = acc;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; flat.len()];
    for _ in 0..n {
        let u: f64 = rng.gen::<f64>() * total;
        let cell = cdf.partition_point(|&c| c <= u).min(flat.len() - 1);
        counts[cell] += 1;
    }

    let mut mean = 0.0;
    for (cell, &c) in counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let (s, o) = (cell / n_obs, cell % n_obs);
        mean += c as f64 * d.value(s, est.lookup_flat(o));
    }
    mean /= n as f64;

    let mut ss = 0.0;
    for (cell, &c) in counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let (s, o) = (cell / n_obs, cell % n_obs);
        let x = d.value(s, est.lookup_flat(o));
        ss += c as f64 * (x - mean) * (x - mean);
    }
    let stderr = if n > 1 { (ss / (n as f64 - 1.0)).sqrt() / (n as f64).sqrt() } else { 0.0 };
    Ok((mean, stderr))
}
