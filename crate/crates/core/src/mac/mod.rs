//! Multiple-access channel: the cooperative (feedback-decoding) inner region,
//! its no-feedback reduction, the full-cooperation outer bound, the
//! monostatic-uplink trade-off, and the double-usage example.

use ndarray::{ArrayD, IxDyn};

use crate::error::{CdError, Result};
use crate::estimation::{bayes_estimator, expected_distortion};
use crate::geometry::concave_envelope;
use crate::opt::{ba_with_cost, mi_bits, SolverOptions};
use crate::p2p::{solve_cd, P2PScenario};
use crate::prob::{
    binary_entropy_inverse, build_joint_mac, Axis, DetMap, DistortionFn, FiniteDist, JointTable,
    Kernel, LN_2,
};

/// Two-encoder multiple-access scenario with per-encoder side information and
/// deterministic feedback.
#[derive(Debug, Clone)]
pub struct MACScenario {
    /// Joint over `(S, S1, S2)`.
    pub psss: JointTable,
    /// `(X1, X2, S) -> Y`.
    pub chan: Kernel,
    pub phi1: DetMap,
    pub phi2: DetMap,
    pub d: DistortionFn,
}

impl MACScenario {
    pub fn new(
        psss: JointTable,
        chan: Kernel,
        phi1: DetMap,
        phi2: DetMap,
        d: DistortionFn,
    ) -> Result<Self> {
        let names: Vec<&str> = psss.axes().iter().map(Axis::name).collect();
        if names != ["S", "S1", "S2"] {
            return Err(CdError::Invalid("state table must have axes (S, S1, S2)".into()));
        }
        let in_names: Vec<&str> = chan.inputs().iter().map(Axis::name).collect();
        let out_names: Vec<&str> = chan.outputs().iter().map(Axis::name).collect();
        if in_names != ["X1", "X2", "S"] || out_names != ["Y"] {
            return Err(CdError::Invalid("channel must be (X1, X2, S) -> Y".into()));
        }
        if chan.inputs()[2] != psss.axes()[0] {
            return Err(CdError::AlphabetMismatch("S".into()));
        }
        for (phi, z) in [(&phi1, "Z1"), (&phi2, "Z2")] {
            let f_in: Vec<&str> = phi.inputs().iter().map(Axis::name).collect();
            if f_in != ["Y"] || phi.output().name() != z {
                return Err(CdError::Invalid(format!("feedback must map Y -> {z}")));
            }
        }
        if d.state_labels() != psss.axes()[0].labels() {
            return Err(CdError::AlphabetMismatch("S".into()));
        }
        Ok(Self { psss, chan, phi1, phi2, d })
    }

    pub fn state_axis(&self) -> &Axis {
        &self.psss.axes()[0]
    }

    pub fn x1_axis(&self) -> &Axis {
        &self.chan.inputs()[0]
    }

    pub fn x2_axis(&self) -> &Axis {
        &self.chan.inputs()[1]
    }
}

/// One choice of the cooperative-region variables.
#[derive(Debug, Clone)]
pub struct MACVars {
    pub p_u: FiniteDist,
    /// `(U) -> (W1, X1)`.
    pub enc1: Kernel,
    /// `(U) -> (W2, X2)`.
    pub enc2: Kernel,
    /// `(U, W1, W2, X1, S1, Z1) -> V1`.
    pub comp1: Kernel,
    /// `(U, W1, W2, X2, S2, Z2) -> V2`.
    pub comp2: Kernel,
}

pub fn mac_build_joint(scen: &MACScenario, vars: &MACVars) -> Result<JointTable> {
    build_joint_mac(
        &scen.psss, &vars.p_u, &vars.enc1, &vars.enc2, &scen.chan, &scen.phi1, &scen.phi2,
        &vars.comp1, &vars.comp2,
    )
}

/// The four rate bounds of the cooperative inner region (clamped, with raw
/// values) plus the Bayes distortion of the full-observation estimator.
#[derive(Debug, Clone, Copy)]
pub struct MacInnerBounds {
    pub r1: f64,
    pub r2: f64,
    pub sum_a: f64,
    pub sum_b: f64,
    pub r1_raw: f64,
    pub r2_raw: f64,
    pub sum_a_raw: f64,
    pub sum_b_raw: f64,
    pub distortion: f64,
}

impl MacInnerBounds {
    /// Largest sum rate inside the pentagon.
    pub fn sum_rate(&self) -> f64 {
        (self.r1 + self.r2).min(self.sum_a).min(self.sum_b)
    }
}

/// Evaluates, term by term:
/// `R1 < I(X1,V1; Y | U,W1,W2,X2,V2) + I(W1; Z2 | S2,U,W2,X2) - I(V1; S1,Z1 | U,W1,W2,X1)`,
/// its mirror for `R2`, and the two sum bounds.
pub fn mac_inner_bounds(scen: &MACScenario, vars: &MACVars) -> Result<MacInnerBounds> {
    let joint = mac_build_joint(scen, vars)?;
    let pen1 = joint.cond_mutual_information(&["V1"], &["S1", "Z1"], &["U", "W1", "W2", "X1"])?;
    let pen2 = joint.cond_mutual_information(&["V2"], &["S2", "Z2"], &["U", "W1", "W2", "X2"])?;
    let coop1 = joint.cond_mutual_information(&["W1"], &["Z2"], &["S2", "U", "W2", "X2"])?;
    let coop2 = joint.cond_mutual_information(&["W2"], &["Z1"], &["S1", "U", "W1", "X1"])?;
    let r1_raw = joint
        .cond_mutual_information(&["X1", "V1"], &["Y"], &["U", "W1", "W2", "X2", "V2"])?
        + coop1
        - pen1;
    let r2_raw = joint
        .cond_mutual_information(&["X2", "V2"], &["Y"], &["U", "W1", "W2", "X1", "V1"])?
        + coop2
        - pen2;
    let sum_a_raw = joint
        .cond_mutual_information(&["X1", "X2", "V1", "V2"], &["Y"], &["U", "W1", "W2"])?
        + coop1
        + coop2
        - pen1
        - pen2;
    let sum_b_raw = joint
        .cond_mutual_information(&["U", "W1", "W2", "X1", "X2", "V1", "V2"], &["Y"], &[])?
        - pen1
        - pen2;

    let h = bayes_estimator(
        &joint,
        "S",
        &["U", "W1", "W2", "X1", "X2", "V1", "V2", "Y"],
        &scen.d,
    )?;
    let distortion = expected_distortion(&joint, "S", &h, &scen.d)?;
    Ok(MacInnerBounds {
        r1: r1_raw.max(0.0),
        r2: r2_raw.max(0.0),
        sum_a: sum_a_raw.max(0.0),
        sum_b: sum_b_raw.max(0.0),
        r1_raw,
        r2_raw,
        sum_a_raw,
        sum_b_raw,
        distortion,
    })
}

/// Achievable region at a distortion budget from evaluated samples: the hull
/// of the admissible samples' pentagons plus pairwise time-sharing mixtures
/// whose averaged distortion meets the budget.
pub fn mac_sampled_region(points: &[MacInnerBounds], d: f64) -> Vec<[f64; 2]> {
    let tol = 1e-12;
    let mut verts: Vec<[f64; 2]> = vec![[0.0, 0.0]];
    for p in points {
        if p.distortion <= d + tol {
            for v in pentagon(p) {
                verts.push(v);
            }
        }
    }
    for (i, p) in points.iter().enumerate() {
        for q in points.iter().skip(i + 1) {
            let (dp, dq) = (p.distortion, q.distortion);
            let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
            let denom = dp - dq;
            if denom.abs() < 1e-15 {
                if dq > d + tol {
                    continue;
                }
            } else {
                let bound = (d - dq) / denom;
                if denom > 0.0 {
                    hi = hi.min(bound);
                } else {
                    lo = lo.max(bound);
                }
            }
            if lo > hi {
                continue;
            }
            for lam in [lo, hi] {
                let lam = lam.clamp(0.0, 1.0);
                for vp in pentagon(p) {
                    for vq in pentagon(q) {
                        verts.push([
                            lam * vp[0] + (1.0 - lam) * vq[0],
                            lam * vp[1] + (1.0 - lam) * vq[1],
                        ]);
                    }
                }
            }
        }
    }
    crate::geometry::convex_hull_2d(&verts).expect("nonempty vertex set")
}

fn pentagon(p: &MacInnerBounds) -> Vec<[f64; 2]> {
    let cap = p.sum_a.min(p.sum_b);
    let r1 = p.r1.min(cap);
    let r2 = p.r2.min(cap);
    let mut v = vec![[r1, 0.0], [0.0, r2]];
    if p.r1 + p.r2 > cap {
        if cap - p.r2 >= 0.0 {
            v.push([cap - p.r2, p.r2]);
        }
        if cap - p.r1 >= 0.0 {
            v.push([p.r1, cap - p.r1]);
        }
    } else {
        v.push([p.r1, p.r2]);
    }
    v
}

#[derive(Debug, Clone, Copy)]
pub struct MacOuterPoint {
    pub sum: f64,
    pub sum_raw: f64,
    pub distortion: f64,
}

/// Full-cooperation sum bound
/// `R1 + R2 < I(X1,X2; Y) - I(V1,V2; S1,S2 | X1,X2,Y)` at one choice of the
/// cooperative input joint and the description kernel
/// `(X1, X2, S1, S2, Z1, Z2) -> (V1, V2)`.
pub fn mac_outer_sum(
    scen: &MACScenario,
    p_x1x2: &JointTable,
    comp: &Kernel,
) -> Result<MacOuterPoint> {
    let joint = outer_joint(scen, p_x1x2, comp)?;
    let sum_raw = joint.cond_mutual_information(&["X1", "X2"], &["Y"], &[])?
        - joint.cond_mutual_information(&["V1", "V2"], &["S1", "S2"], &["X1", "X2", "Y"])?;
    let h = bayes_estimator(&joint, "S", &["X1", "X2", "V1", "V2", "Y"], &scen.d)?;
    let distortion = expected_distortion(&joint, "S", &h, &scen.d)?;
    Ok(MacOuterPoint { sum: sum_raw.max(0.0), sum_raw, distortion })
}

fn outer_joint(scen: &MACScenario, p_x1x2: &JointTable, comp: &Kernel) -> Result<JointTable> {
    use crate::prob::JointBuilder;
    let names: Vec<&str> = p_x1x2.axes().iter().map(Axis::name).collect();
    if names != ["X1", "X2"] {
        return Err(CdError::Invalid("cooperative input must be over (X1, X2)".into()));
    }
    let mut b = JointBuilder::from_table(&scen.psss);
    let factor = Kernel::from_joint_factor(
        p_x1x2.axes().to_vec(),
        p_x1x2.values().as_slice().expect("standard layout").to_vec(),
    )?;
    b.apply_kernel(&factor)?;
    b.apply_kernel(&scen.chan)?;
    b.apply_map(&scen.phi1)?;
    b.apply_map(&scen.phi2)?;
    b.apply_kernel(comp)?;
    Ok(b.finish())
}

/// Best full-cooperation outer sum at a distortion budget, computed by the
/// point-to-point solver on the composite scenario (input `(X1, X2)`, side
/// information `(S1, S2)`, feedback `(Z1, Z2)`).
pub fn mac_outer_max_sum(scen: &MACScenario, target: f64, opts: &SolverOptions) -> Result<f64> {
    let p2p = cooperative_p2p(scen)?;
    Ok(solve_cd(&p2p, target, opts)?.rate)
}

/// The composite point-to-point scenario equivalent to full encoder cooperation.
pub fn cooperative_p2p(scen: &MACScenario) -> Result<P2PScenario> {
    let x1 = scen.x1_axis();
    let x2 = scen.x2_axis();
    let s1 = &scen.psss.axes()[1];
    let s2 = &scen.psss.axes()[2];
    let y = &scen.chan.outputs()[0];
    let (n1, n2, ns1, ns2, ny) = (x1.len(), x2.len(), s1.len(), s2.len(), y.len());
    let ns = scen.state_axis().len();

    let x_labels: Vec<String> = (0..n1 * n2)
        .map(|i| format!("{}|{}", x1.labels()[i / n2], x2.labels()[i % n2]))
        .collect();
    let x_axis = Axis::new("X", x_labels)?;
    let st_labels: Vec<String> = (0..ns1 * ns2)
        .map(|i| format!("{}|{}", s1.labels()[i / ns2], s2.labels()[i % ns2]))
        .collect();
    let st_axis = Axis::new("S_T", st_labels)?;

    let mut pv = vec![0.0; ns * ns1 * ns2];
    for s in 0..ns {
        for a in 0..ns1 {
            for b in 0..ns2 {
                pv[s * ns1 * ns2 + a * ns2 + b] = scen.psss.values()[[s, a, b]];
            }
        }
    }
    let pss_t = JointTable::new(
        vec![scen.state_axis().clone(), st_axis],
        ArrayD::from_shape_vec(IxDyn(&[ns, ns1 * ns2]), pv).expect("shape"),
    )?;

    let mut chan_table = vec![0.0; n1 * n2 * ns * ny];
    for x1i in 0..n1 {
        for x2i in 0..n2 {
            for s in 0..ns {
                for yi in 0..ny {
                    chan_table[((x1i * n2 + x2i) * ns + s) * ny + yi] =
                        scen.chan.prob((x1i * n2 + x2i) * ns + s, yi);
                }
            }
        }
    }
    let chan = Kernel::new(vec![x_axis, scen.state_axis().clone()], vec![y.clone()], chan_table)?;

    let nz1 = scen.phi1.output().len();
    let nz2 = scen.phi2.output().len();
    let z_labels: Vec<String> = (0..nz1 * nz2)
        .map(|i| {
            format!(
                "{}|{}",
                scen.phi1.output().labels()[i / nz2],
                scen.phi2.output().labels()[i % nz2]
            )
        })
        .collect();
    let z_axis = Axis::new("Z", z_labels)?;
    let fb_table: Vec<usize> =
        (0..ny).map(|yi| scen.phi1.map(yi) * nz2 + scen.phi2.map(yi)).collect();
    let feedback = DetMap::new(vec![y.clone()], z_axis, fb_table)?;

    P2PScenario::new(pss_t, chan, feedback, scen.d.clone())
}

/// Monostatic-uplink trade-off `C(D) = max I(X1; Y' | U, X2)` subject to the
/// estimation budget, for independent inputs conditioned on a time-sharing
/// letter `U`.
///
/// With `U` fixed, the rate is a `P(X2)`-weighted mixture of per-`x2`
/// single-input capacities and the distortion is bilinear, so the whole
/// trade-off is the non-decreasing concave envelope of the per-`x2` Lagrangian
/// sweeps; `U` mixtures are exactly the envelope's chords.
pub fn c_mu(
    prior: &FiniteDist,
    chan: &Kernel,
    d: &DistortionFn,
    target: f64,
    rho_grid: &[f64],
) -> Result<f64> {
    let cloud = c_mu_cloud(prior, chan, d, rho_grid)?;
    let dmin = cloud.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    if target < dmin - 1e-9 {
        return Err(CdError::InfeasibleDistortion(target));
    }
    envelope_at(&cloud, target)
}

/// The operating points traced by the per-`x2` sweeps: `(distortion, rate)`.
pub fn c_mu_cloud(
    prior: &FiniteDist,
    chan: &Kernel,
    d: &DistortionFn,
    rho_grid: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let ns = prior.len();
    let in_names: Vec<&str> = chan.inputs().iter().map(Axis::name).collect();
    if in_names != ["X1", "X2", "S"] || chan.inputs()[2].len() != ns {
        return Err(CdError::Invalid("channel must be (X1, X2, S) -> Y'".into()));
    }
    let n1 = chan.inputs()[0].len();
    let n2 = chan.inputs()[1].len();
    let ny = chan.n_output_cells();
    let nr = d.n_recons();

    // Per-(x1, x2) Bayes distortion; independent of the input laws.
    let mut e = vec![0.0; n1 * n2];
    for x1 in 0..n1 {
        for x2 in 0..n2 {
            let mut acc = 0.0;
            for y in 0..ny {
                let mut best = f64::INFINITY;
                for r in 0..nr {
                    let mut v = 0.0;
                    for s in 0..ns {
                        v += prior.pmf()[s]
                            * chan.prob((x1 * n2 + x2) * ns + s, y)
                            * d.value(s, r);
                    }
                    best = best.min(v);
                }
                acc += best;
            }
            e[x1 * n2 + x2] = acc;
        }
    }

    let mut cloud = Vec::new();
    for x2 in 0..n2 {
        let chan_x2: Vec<Vec<f64>> = (0..n1)
            .map(|x1| {
                let mut row = vec![0.0; ny];
                for y in 0..ny {
                    for s in 0..ns {
                        row[y] += prior.pmf()[s] * chan.prob((x1 * n2 + x2) * ns + s, y);
                    }
                }
                row
            })
            .collect();
        for &rho in rho_grid {
            let cost: Vec<f64> = (0..n1).map(|x1| -rho * e[x1 * n2 + x2] * LN_2).collect();
            let p1 = ba_with_cost(&chan_x2, &cost, 1e-13, 2000).0;
            let dist: f64 = p1.iter().enumerate().map(|(x1, p)| p * e[x1 * n2 + x2]).sum();
            cloud.push((dist, mi_bits(&p1, &chan_x2)));
        }
        // Pure letters give the distortion extremes.
        for x1 in 0..n1 {
            cloud.push((e[x1 * n2 + x2], 0.0));
        }
    }
    Ok(cloud)
}

/// Non-decreasing concave envelope of a `(distortion, rate)` cloud, evaluated
/// at a budget.
fn envelope_at(cloud: &[(f64, f64)], target: f64) -> Result<f64> {
    let mut pts: Vec<(f64, f64)> = cloud.to_vec();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // Collapse duplicate abscissae to their best rate.
    let mut curve: Vec<(f64, f64)> = Vec::new();
    for (x, y) in pts {
        match curve.last_mut() {
            Some(last) if (x - last.0).abs() < 1e-15 => last.1 = last.1.max(y),
            _ => curve.push((x, y)),
        }
    }
    if curve.len() == 1 {
        return Ok(curve[0].1);
    }
    let env = concave_envelope(&curve)?;
    // Evaluate at the budget: envelope value at the largest x <= target,
    // interpolating within the segment containing it.
    if target >= env.last().unwrap().0 {
        return Ok(env.last().unwrap().1);
    }
    let mut i = 0;
    while i + 1 < env.len() && env[i + 1].0 <= target {
        i += 1;
    }
    if i + 1 == env.len() {
        return Ok(env[i].1);
    }
    let (x0, y0) = env[i];
    let (x1, y1) = env[i + 1];
    Ok(y0 + (y1 - y0) * (target - x0) / (x1 - x0))
}

/// Report of the three configurations of the double-usage example.
#[derive(Debug, Clone)]
pub struct DoubleUsageReport {
    /// `Bern(p)` parameter of each state component, solved from `H2(p) = 1/2`.
    pub t_prior: f64,
    /// `V2 = T_{X2}`: full rates but positive distortion.
    pub config_a: MacInnerBounds,
    /// No descriptions: largest `R1` bound over the `P(X2)` grid.
    pub config_b_max_r1: f64,
    pub config_b_bounds: Vec<(f64, f64)>,
    /// `V2 = S`: sum rate capped at 1 but zero distortion.
    pub config_c: MacInnerBounds,
}

/// Binary channel `Y = (X1 xor T_{X2}, X2)` with state `S = (T0, T1)`,
/// `H(T0) = H(T1) = 1/2`, side information `S2 = S` at encoder 2 only, no
/// feedback, and summed Hamming distortion on the two state components.
/// The three description choices are evaluated through the generic
/// inner-bound machinery, with uniform independent inputs.
pub fn double_usage_example(b_grid: usize) -> Result<DoubleUsageReport> {
    let p = binary_entropy_inverse(0.5)?;
    let scen = double_usage_scenario(p)?;

    let config_a = mac_inner_bounds(&scen, &double_usage_vars(&scen, DoubleUsageChoice::EchoComponent, 0.5)?)?;
    let config_c = mac_inner_bounds(&scen, &double_usage_vars(&scen, DoubleUsageChoice::FullState, 0.5)?)?;

    let mut config_b_bounds = Vec::with_capacity(b_grid);
    let mut max_r1 = f64::NEG_INFINITY;
    for i in 0..b_grid {
        let p2 = i as f64 / (b_grid - 1) as f64;
        let b = mac_inner_bounds(&scen, &double_usage_vars(&scen, DoubleUsageChoice::None, p2)?)?;
        max_r1 = max_r1.max(b.r1_raw);
        config_b_bounds.push((p2, b.r1_raw));
    }

    Ok(DoubleUsageReport {
        t_prior: p,
        config_a,
        config_b_max_r1: max_r1,
        config_b_bounds,
        config_c,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DoubleUsageChoice {
    /// `V2 = {}` (and `V1 = {}`).
    None,
    /// `V2 = T_{X2}`, the component observed through the channel.
    EchoComponent,
    /// `V2 = S = (T0, T1)`.
    FullState,
}

/// The double-usage fixture: composite state and output alphabets, encoder 2
/// holding the full state as side information.
pub fn double_usage_scenario(p: f64) -> Result<MACScenario> {
    let s_labels: Vec<String> = ["00", "01", "10", "11"].iter().map(|s| s.to_string()).collect();
    let s_axis = Axis::new("S", s_labels.clone())?;
    let s1_axis = Axis::indexed("S1", 1);
    let s2_axis = Axis::new("S2", s_labels.clone())?;
    let mut pv = vec![0.0; 4 * 1 * 4];
    for t0 in 0..2usize {
        for t1 in 0..2usize {
            let s = t0 * 2 + t1;
            let w = (if t0 == 1 { p } else { 1.0 - p }) * (if t1 == 1 { p } else { 1.0 - p });
            pv[s * 4 + s] = w; // S2 copies S
        }
    }
    let psss = JointTable::new(
        vec![s_axis.clone(), s1_axis, s2_axis],
        ArrayD::from_shape_vec(IxDyn(&[4, 1, 4]), pv).expect("shape"),
    )?;

    let x1_axis = Axis::binary("X1");
    let x2_axis = Axis::binary("X2");
    let y_labels: Vec<String> = ["00", "01", "10", "11"].iter().map(|s| s.to_string()).collect();
    let y_axis = Axis::new("Y", y_labels)?;
    let chan = Kernel::from_fn(
        vec![x1_axis, x2_axis, s_axis],
        vec![y_axis.clone()],
        |inp, out| {
            let (x1, x2, s) = (inp[0], inp[1], inp[2]);
            let (t0, t1) = (s / 2, s % 2);
            let t = if x2 == 0 { t0 } else { t1 };
            let y1 = x1 ^ t;
            if out[0] == y1 * 2 + x2 {
                1.0
            } else {
                0.0
            }
        },
    )?;
    let phi1 = DetMap::constant(vec![y_axis.clone()], "Z1");
    let phi2 = DetMap::constant(vec![y_axis], "Z2");

    // d(S, (T0^, T1^)) = 1{T0 != T0^} + 1{T1 != T1^}.
    let mut dv = Vec::with_capacity(16);
    for s in 0..4usize {
        let (t0, t1) = (s / 2, s % 2);
        for r in 0..4usize {
            let (r0, r1) = (r / 2, r % 2);
            dv.push((if t0 != r0 { 1.0 } else { 0.0 }) + (if t1 != r1 { 1.0 } else { 0.0 }));
        }
    }
    let d = DistortionFn::new(s_labels.clone(), s_labels, dv)?;
    MACScenario::new(psss, chan, phi1, phi2, d)
}

/// Variables for one configuration: trivial cooperative layers, uniform `X1`,
/// `X2 ~ Bern(p2)`, and the chosen second description.
pub fn double_usage_vars(
    scen: &MACScenario,
    choice: DoubleUsageChoice,
    p2: f64,
) -> Result<MACVars> {
    let u_axis = Axis::indexed("U", 1);
    let p_u = FiniteDist::uniform(u_axis.clone());
    let w1_axis = Axis::indexed("W1", 1);
    let w2_axis = Axis::indexed("W2", 1);
    let enc1 = Kernel::from_fn(
        vec![u_axis.clone()],
        vec![w1_axis.clone(), scen.x1_axis().clone()],
        |_, _| 0.5,
    )?;
    let enc2 = Kernel::from_fn(
        vec![u_axis.clone()],
        vec![w2_axis.clone(), scen.x2_axis().clone()],
        move |_, out| if out[1] == 1 { p2 } else { 1.0 - p2 },
    )?;
    let comp1 = Kernel::from_fn(
        vec![
            u_axis.clone(),
            w1_axis.clone(),
            w2_axis.clone(),
            scen.x1_axis().clone(),
            scen.psss.axes()[1].clone(),
            scen.phi1.output().clone(),
        ],
        vec![Axis::indexed("V1", 1)],
        |_, _| 1.0,
    )?;
    let comp2_inputs = vec![
        u_axis,
        w1_axis,
        w2_axis,
        scen.x2_axis().clone(),
        scen.psss.axes()[2].clone(),
        scen.phi2.output().clone(),
    ];
    let comp2 = match choice {
        DoubleUsageChoice::None => {
            Kernel::from_fn(comp2_inputs, vec![Axis::indexed("V2", 1)], |_, _| 1.0)?
        }
        DoubleUsageChoice::EchoComponent => Kernel::from_fn(
            comp2_inputs,
            vec![Axis::binary("V2")],
            |inp, out| {
                let (x2, s2) = (inp[3], inp[4]);
                let (t0, t1) = (s2 / 2, s2 % 2);
                let t = if x2 == 0 { t0 } else { t1 };
                if out[0] == t {
                    1.0
                } else {
                    0.0
                }
            },
        )?,
        DoubleUsageChoice::FullState => Kernel::from_fn(
            comp2_inputs,
            vec![Axis::indexed("V2", 4)],
            |inp, out| if out[0] == inp[4] { 1.0 } else { 0.0 },
        )?,
    };
    Ok(MACVars { p_u, enc1, enc2, comp1, comp2 })
}
