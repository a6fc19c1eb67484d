//! Degraded broadcast channel: degradedness verification, the simultaneous
//! and sequential achievable regions, the outer bound, the binary
//! codeword-compression example, and the monostatic-downlink trade-off.

mod nnls;

use nalgebra::{DMatrix, DVector};
use ndarray::{ArrayD, IxDyn};

use crate::error::{CdError, Result};
use crate::estimation::{bayes_estimator, expected_distortion};
use crate::opt::{ba_with_cost, mi_bits};
use crate::prob::{
    binary_entropy, build_joint_bc, star_convolve, Axis, DetMap, DistortionFn, FiniteDist,
    JointTable, Kernel, LN_2,
};

/// Two-user degraded broadcast scenario. Decoder 1 is the stronger user.
#[derive(Debug, Clone)]
pub struct BCScenario {
    pub pss_t: JointTable,
    /// `(X, S) -> (Y1, Y2)`.
    pub chan: Kernel,
    /// `(Y1, Y2) -> Z`.
    pub feedback: DetMap,
    pub d1: DistortionFn,
    pub d2: DistortionFn,
}

impl BCScenario {
    pub fn new(
        pss_t: JointTable,
        chan: Kernel,
        feedback: DetMap,
        d1: DistortionFn,
        d2: DistortionFn,
    ) -> Result<Self> {
        let pss_t = if pss_t.axes()[0].name() == "S" { pss_t } else { pss_t.permute(&["S", "S_T"])? };
        let in_names: Vec<&str> = chan.inputs().iter().map(Axis::name).collect();
        let out_names: Vec<&str> = chan.outputs().iter().map(Axis::name).collect();
        if in_names != ["X", "S"] || out_names != ["Y1", "Y2"] {
            return Err(CdError::Invalid("broadcast channel must be (X, S) -> (Y1, Y2)".into()));
        }
        if chan.inputs()[1] != pss_t.axes()[0] {
            return Err(CdError::AlphabetMismatch("S".into()));
        }
        let fb_in: Vec<&str> = feedback.inputs().iter().map(Axis::name).collect();
        if fb_in != ["Y1", "Y2"] || feedback.output().name() != "Z" {
            return Err(CdError::Invalid("feedback must map (Y1, Y2) -> Z".into()));
        }
        for d in [&d1, &d2] {
            if d.state_labels() != pss_t.axes()[0].labels() {
                return Err(CdError::AlphabetMismatch("S".into()));
            }
        }
        Ok(Self { pss_t, chan, feedback, d1, d2 })
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
}

/// One choice of the region variables: the cloud-center/input joint and the
/// two-description compressor.
#[derive(Debug, Clone)]
pub struct BCVars {
    /// Joint over `(U, X)`.
    pub p_ux: JointTable,
    /// `(U, X, S_T, Z) -> (V1, V2)`.
    pub comp: Kernel,
}

pub fn bc_build_joint(scen: &BCScenario, vars: &BCVars) -> Result<JointTable> {
    build_joint_bc(&scen.pss_t, &vars.p_ux, &scen.chan, &scen.feedback, &vars.comp)
}

/// Rate bounds of one variable sample, clamped at zero with raw values kept.
#[derive(Debug, Clone, Copy)]
pub struct BcInnerBounds {
    pub r1: f64,
    pub r2: f64,
    pub r1_raw: f64,
    pub r2_raw: f64,
    pub d1: f64,
    pub d2: f64,
}

fn bc_distortions(scen: &BCScenario, joint: &JointTable) -> Result<(f64, f64)> {
    let h1 = bayes_estimator(joint, "S", &["U", "X", "V1", "V2", "Y1"], &scen.d1)?;
    let h2 = bayes_estimator(joint, "S", &["U", "V2", "Y2"], &scen.d2)?;
    let d1 = expected_distortion(joint, "S", &h1, &scen.d1)?;
    let d2 = expected_distortion(joint, "S", &h2, &scen.d2)?;
    Ok((d1, d2))
}

/// Simultaneous-decoding bounds:
/// `R2 < I(U;Y2) - I(V2; S_T,Z,X | U,Y2)`,
/// `R1 < I(X; V2,Y1 | U) - I(V1; S_T,Z | U,X,V2,Y1)`.
pub fn bc_region_simultaneous(scen: &BCScenario, vars: &BCVars) -> Result<BcInnerBounds> {
    let joint = bc_build_joint(scen, vars)?;
    let r2_raw = joint.cond_mutual_information(&["U"], &["Y2"], &[])?
        - joint.cond_mutual_information(&["V2"], &["S_T", "Z", "X"], &["U", "Y2"])?;
    let r1_raw = joint.cond_mutual_information(&["X"], &["V2", "Y1"], &["U"])?
        - joint.cond_mutual_information(&["V1"], &["S_T", "Z"], &["U", "X", "V2", "Y1"])?;
    let (d1, d2) = bc_distortions(scen, &joint)?;
    Ok(BcInnerBounds { r1: r1_raw.max(0.0), r2: r2_raw.max(0.0), r1_raw, r2_raw, d1, d2 })
}

/// Sequential-decoding (binning) bounds:
/// `R2 < I(U;Y2) - max(I(V2; S_T,Z,X | U,Y2), I(V2; S_T,Z | U,X,Y1))`,
/// `R1 < I(X; Y1 | U) - I(V1; S_T,Z | U,X,V2,Y1)`.
pub fn bc_region_sequential(scen: &BCScenario, vars: &BCVars) -> Result<BcInnerBounds> {
    let joint = bc_build_joint(scen, vars)?;
    let pen2_sim = joint.cond_mutual_information(&["V2"], &["S_T", "Z", "X"], &["U", "Y2"])?;
    let pen2_alt = joint.cond_mutual_information(&["V2"], &["S_T", "Z"], &["U", "X", "Y1"])?;
    let r2_raw = joint.cond_mutual_information(&["U"], &["Y2"], &[])? - pen2_sim.max(pen2_alt);
    let r1_raw = joint.cond_mutual_information(&["X"], &["Y1"], &["U"])?
        - joint.cond_mutual_information(&["V1"], &["S_T", "Z"], &["U", "X", "V2", "Y1"])?;
    let (d1, d2) = bc_distortions(scen, &joint)?;
    Ok(BcInnerBounds { r1: r1_raw.max(0.0), r2: r2_raw.max(0.0), r1_raw, r2_raw, d1, d2 })
}

#[derive(Debug, Clone, Copy)]
pub struct BcOuterBounds {
    pub r1: f64,
    pub r2: f64,
    pub sum: f64,
    pub r1_raw: f64,
    pub r2_raw: f64,
    pub sum_raw: f64,
    pub d1: f64,
    pub d2: f64,
}

/// Outer-bound evaluation:
/// `R2 < I(U;Y2) - I(V2; Y1 | U,Y2)`,
/// `R1 < I(X;Y1|U) - I(V1; S_T | U,X,V2,Y1)`,
/// `R1 + R2 < I(X;Y1) - I(S_T; V1,V2 | U,X,Y1,Y2)`.
pub fn bc_outer(scen: &BCScenario, vars: &BCVars) -> Result<BcOuterBounds> {
    let joint = bc_build_joint(scen, vars)?;
    let r2_raw = joint.cond_mutual_information(&["U"], &["Y2"], &[])?
        - joint.cond_mutual_information(&["V2"], &["Y1"], &["U", "Y2"])?;
    let r1_raw = joint.cond_mutual_information(&["X"], &["Y1"], &["U"])?
        - joint.cond_mutual_information(&["V1"], &["S_T"], &["U", "X", "V2", "Y1"])?;
    let sum_raw = joint.cond_mutual_information(&["X"], &["Y1"], &[])?
        - joint.cond_mutual_information(&["S_T"], &["V1", "V2"], &["U", "X", "Y1", "Y2"])?;
    let (d1, d2) = bc_distortions(scen, &joint)?;
    Ok(BcOuterBounds {
        r1: r1_raw.max(0.0),
        r2: r2_raw.max(0.0),
        sum: sum_raw.max(0.0),
        r1_raw,
        r2_raw,
        sum_raw,
        d1,
        d2,
    })
}

/// Achievable rate region assembled from evaluated variable samples at a
/// distortion budget `(d1, d2)`: the convex hull of the admissible samples'
/// rate rectangles together with pairwise time-sharing mixtures whose averaged
/// distortions meet the budget. Returns the hull vertices (counterclockwise).
pub fn bc_sampled_region(points: &[BcInnerBounds], d1: f64, d2: f64) -> Vec<[f64; 2]> {
    let tol = 1e-12;
    let mut verts: Vec<[f64; 2]> = vec![[0.0, 0.0]];
    let corner = |p: &BcInnerBounds| [p.r1, p.r2];
    for p in points {
        if p.d1 <= d1 + tol && p.d2 <= d2 + tol {
            let c = corner(p);
            verts.push([c[0], 0.0]);
            verts.push([0.0, c[1]]);
            verts.push(c);
        }
    }
    for (i, p) in points.iter().enumerate() {
        for q in points.iter().skip(i + 1) {
            // lambda interval where both mixed distortions meet the budget.
            let mut lo = 0.0_f64;
            let mut hi = 1.0_f64;
            for (dp, dq, budget) in [(p.d1, q.d1, d1), (p.d2, q.d2, d2)] {
                // lambda dp + (1 - lambda) dq <= budget
                let denom = dp - dq;
                if denom.abs() < 1e-15 {
                    if dq > budget + tol {
                        lo = 1.0;
                        hi = 0.0;
                    }
                } else {
                    let bound = (budget - dq) / denom;
                    if denom > 0.0 {
                        hi = hi.min(bound);
                    } else {
                        lo = lo.max(bound);
                    }
                }
            }
            if lo > hi {
                continue;
            }
            for lam in [lo, hi, 0.5 * (lo + hi)] {
                let lam = lam.clamp(0.0, 1.0);
                let (cp, cq) = (corner(p), corner(q));
                verts.push([
                    lam * cp[0] + (1.0 - lam) * cq[0],
                    lam * cp[1] + (1.0 - lam) * cq[1],
                ]);
            }
        }
    }
    crate::geometry::convex_hull_2d(&verts).expect("nonempty vertex set")
}

/// Degradedness classification with witnesses.
#[derive(Debug, Clone)]
pub enum Degradedness {
    /// `(X, S_T) - Y1 - Y2` holds on the induced joint; the witness is the
    /// pooled transition `P(Y2 | Y1)`.
    Physical { witness: Kernel },
    /// A stochastic matrix `P(Y2 | Y1~)` reproduces the weak user's channel
    /// law for every `(x, s_T)`; `residual` is the largest equation violation.
    Statistical { witness: Kernel, residual: f64 },
    /// Neither holds; `residual` certifies the best statistical fit.
    NotDegraded { residual: f64 },
}

impl Degradedness {
    pub fn is_physical(&self) -> bool {
        matches!(self, Degradedness::Physical { .. })
    }

    pub fn is_statistical_or_better(&self) -> bool {
        !matches!(self, Degradedness::NotDegraded { .. })
    }
}

const PHYSICAL_TOL: f64 = 1e-9;
const STATISTICAL_TOL: f64 = 1e-8;

/// Checks degradedness of the broadcast channel under a uniform input probe
/// and returns the strongest property that holds.
pub fn check_degraded(scen: &BCScenario) -> Result<Degradedness> {
    let s_axis = scen.state_axis();
    let st_axis = scen.sit_axis();
    let x_axis = scen.input_axis();
    let y1_axis = &scen.chan.outputs()[0];
    let y2_axis = &scen.chan.outputs()[1];
    let (ns, nst, nx, ny1, ny2) =
        (s_axis.len(), st_axis.len(), x_axis.len(), y1_axis.len(), y2_axis.len());

    // Probe joint P(x, s_T, y1, y2) with uniform X.
    let mut probe = vec![0.0; nx * nst * ny1 * ny2];
    let pv = scen.pss_t.values();
    for x in 0..nx {
        for s in 0..ns {
            for st in 0..nst {
                let w = pv[[s, st]] / nx as f64;
                if w == 0.0 {
                    continue;
                }
                for y1 in 0..ny1 {
                    for y2 in 0..ny2 {
                        probe[((x * nst + st) * ny1 + y1) * ny2 + y2] +=
                            w * scen.chan.prob(x * ns + s, y1 * ny2 + y2);
                    }
                }
            }
        }
    }

    // Pooled conditional P(y2 | y1).
    let mut pooled = vec![0.0; ny1 * ny2];
    for cell in 0..nx * nst {
        for y1 in 0..ny1 {
            for y2 in 0..ny2 {
                pooled[y1 * ny2 + y2] += probe[(cell * ny1 + y1) * ny2 + y2];
            }
        }
    }
    let mut pooled_cond = vec![0.0; ny1 * ny2];
    for y1 in 0..ny1 {
        let mass: f64 = pooled[y1 * ny2..(y1 + 1) * ny2].iter().sum();
        for y2 in 0..ny2 {
            pooled_cond[y1 * ny2 + y2] =
                if mass > 0.0 { pooled[y1 * ny2 + y2] / mass } else { 1.0 / ny2 as f64 };
        }
    }

    // Physical: P(y2 | y1, x, s_T) must match the pooled conditional.
    let mut physical = true;
    'outer: for cell in 0..nx * nst {
        for y1 in 0..ny1 {
            let mass: f64 = (0..ny2).map(|y2| probe[(cell * ny1 + y1) * ny2 + y2]).sum();
            if mass <= 0.0 {
                continue;
            }
            let mut tv = 0.0;
            for y2 in 0..ny2 {
                tv += (probe[(cell * ny1 + y1) * ny2 + y2] / mass - pooled_cond[y1 * ny2 + y2]).abs();
            }
            if 0.5 * tv > PHYSICAL_TOL {
                physical = false;
                break 'outer;
            }
        }
    }
    let witness_axes = (vec![y1_axis.renamed("Y1~")], vec![y2_axis.clone()]);
    if physical {
        let witness = Kernel::new(witness_axes.0, witness_axes.1, pooled_cond)?;
        return Ok(Degradedness::Physical { witness });
    }

    // Statistical: linear feasibility of B Q = C with row-stochastic Q, where
    // B[(x,sT), y1] = P(y1 | x, sT) and C[(x,sT), y2] = P(y2 | x, sT).
    let mut rows: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    for x in 0..nx {
        for st in 0..nst {
            let cell = x * nst + st;
            let mass: f64 = (0..ny1 * ny2).map(|i| probe[cell * ny1 * ny2 + i]).sum();
            if mass <= 0.0 {
                continue;
            }
            let mut b_row = vec![0.0; ny1];
            let mut c_row = vec![0.0; ny2];
            for y1 in 0..ny1 {
                for y2 in 0..ny2 {
                    let p = probe[(cell * ny1 + y1) * ny2 + y2] / mass;
                    b_row[y1] += p;
                    c_row[y2] += p;
                }
            }
            rows.push((b_row, c_row));
        }
    }
    let n_unknown = ny1 * ny2;
    let n_eq = rows.len() * ny2 + ny1;
    let mut a = DMatrix::zeros(n_eq, n_unknown);
    let mut b = DVector::zeros(n_eq);
    for (r, (b_row, c_row)) in rows.iter().enumerate() {
        for y2 in 0..ny2 {
            let eq = r * ny2 + y2;
            for y1 in 0..ny1 {
                a[(eq, y1 * ny2 + y2)] = b_row[y1];
            }
            b[eq] = c_row[y2];
        }
    }
    for y1 in 0..ny1 {
        let eq = rows.len() * ny2 + y1;
        for y2 in 0..ny2 {
            a[(eq, y1 * ny2 + y2)] = 1.0;
        }
        b[eq] = 1.0;
    }
    let (q, residual) = nnls::nnls(&a, &b, 50 * n_unknown);
    let res_inf = residual.amax();
    if res_inf <= STATISTICAL_TOL {
        let witness = Kernel::new(witness_axes.0, witness_axes.1, q.as_slice().to_vec())?;
        Ok(Degradedness::Statistical { witness, residual: res_inf })
    } else {
        Ok(Degradedness::NotDegraded { residual: res_inf })
    }
}

/// Closed-form bounds of one scheme of the binary broadcast example,
/// paired with the generic evaluator's values on the explicitly constructed
/// finite system. Rates are raw (unclamped).
#[derive(Debug, Clone, Copy)]
pub struct BinarySchemePoint {
    pub r1_closed: f64,
    pub r2_closed: f64,
    pub d1_closed: f64,
    pub d2_closed: f64,
    pub r1_eval: f64,
    pub r2_eval: f64,
    pub d1_eval: f64,
    pub d2_eval: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct BinaryBcPoint {
    pub alpha: f64,
    /// No descriptions: `V2 = {}`.
    pub scheme_a: BinarySchemePoint,
    /// Codeword compression: `V2 = U xor X`.
    pub scheme_b: BinarySchemePoint,
}

/// Binary degraded broadcast channel `Y1 = X xor S1`, `Y2 = Y1 xor S2` with
/// `S1 ~ Bern(p1)`, `S2 ~ Bern(p2)`, no side information or feedback, and
/// superposition input `X = U xor V`, `V ~ Bern(alpha)`.
///
/// Emits, per grid alpha, the two schemes' closed-form bounds together with
/// the generic simultaneous-decoding evaluation of the same finite system.
pub fn binary_bc_example(p1: f64, p2: f64, alpha_grid: &[f64]) -> Result<Vec<BinaryBcPoint>> {
    if !(0.0 < p1 && p1 < p2 && p2 < 0.5) {
        return Err(CdError::Domain(format!("need 0 < p1 < p2 < 1/2, got {p1}, {p2}")));
    }
    let scen = binary_bc_scenario(p1, p2)?;
    let p_tilde2 = star_convolve(p1, p2)?;
    let mut out = Vec::with_capacity(alpha_grid.len());
    for &alpha in alpha_grid {
        if !(0.0..=0.5).contains(&alpha) {
            return Err(CdError::Domain(format!("alpha {alpha} outside [0, 1/2]")));
        }
        let vars_a = binary_bc_vars(&scen, alpha, false)?;
        let vars_b = binary_bc_vars(&scen, alpha, true)?;
        let eval_a = bc_region_simultaneous(&scen, &vars_a)?;
        let eval_b = bc_region_simultaneous(&scen, &vars_b)?;

        let scheme_a = BinarySchemePoint {
            r1_closed: binary_entropy(star_convolve(alpha, p1)?)? - binary_entropy(p1)?,
            r2_closed: 1.0 - binary_entropy(star_convolve(alpha, p_tilde2)?)?,
            d1_closed: 0.0,
            d2_closed: star_convolve(alpha, p1)?.min(p2),
            r1_eval: eval_a.r1_raw,
            r2_eval: eval_a.r2_raw,
            d1_eval: eval_a.d1,
            d2_eval: eval_a.d2,
        };
        let scheme_b = BinarySchemePoint {
            r1_closed: binary_entropy(alpha)?,
            r2_closed: 1.0 - binary_entropy(alpha)? - binary_entropy(p_tilde2)?,
            d1_closed: 0.0,
            d2_closed: p1.min(p2),
            r1_eval: eval_b.r1_raw,
            r2_eval: eval_b.r2_raw,
            d1_eval: eval_b.d1,
            d2_eval: eval_b.d2,
        };
        out.push(BinaryBcPoint { alpha, scheme_a, scheme_b });
    }
    Ok(out)
}

/// The explicit finite system behind [`binary_bc_example`]: composite state
/// `S = (S1, S2)` with per-user Hamming interests expressed through the
/// distortion tables.
pub fn binary_bc_scenario(p1: f64, p2: f64) -> Result<BCScenario> {
    let s_labels: Vec<String> = ["00", "01", "10", "11"].iter().map(|s| s.to_string()).collect();
    let s_axis = Axis::new("S", s_labels.clone())?;
    let st_axis = Axis::indexed("S_T", 1);
    let mut ps = vec![0.0; 4];
    for s1 in 0..2 {
        for s2 in 0..2 {
            let w1 = if s1 == 1 { p1 } else { 1.0 - p1 };
            let w2 = if s2 == 1 { p2 } else { 1.0 - p2 };
            ps[s1 * 2 + s2] = w1 * w2;
        }
    }
    let pss_t = JointTable::new(
        vec![s_axis.clone(), st_axis],
        ArrayD::from_shape_vec(IxDyn(&[4, 1]), ps).expect("shape"),
    )?;
    let x_axis = Axis::binary("X");
    let y1_axis = Axis::binary("Y1");
    let y2_axis = Axis::binary("Y2");
    let chan = Kernel::from_fn(
        vec![x_axis, s_axis.clone()],
        vec![y1_axis.clone(), y2_axis.clone()],
        |inp, out| {
            let (x, s) = (inp[0], inp[1]);
            let (s1, s2) = (s / 2, s % 2);
            let y1 = x ^ s1;
            let y2 = y1 ^ s2;
            if out[0] == y1 && out[1] == y2 {
                1.0
            } else {
                0.0
            }
        },
    )?;
    let feedback = DetMap::constant(vec![y1_axis, y2_axis], "Z");
    let recon: Vec<String> = vec!["0".into(), "1".into()];
    let mut d1v = Vec::with_capacity(8);
    let mut d2v = Vec::with_capacity(8);
    for s in 0..4usize {
        let (s1, s2) = (s / 2, s % 2);
        for r in 0..2usize {
            d1v.push(if r == s1 { 0.0 } else { 1.0 });
            d2v.push(if r == s2 { 0.0 } else { 1.0 });
        }
    }
    let d1 = DistortionFn::new(s_labels.clone(), recon.clone(), d1v)?;
    let d2 = DistortionFn::new(s_labels, recon, d2v)?;
    BCScenario::new(pss_t, chan, feedback, d1, d2)
}

/// Superposition variables for the binary example: `P(U) = 1/2`,
/// `X = U xor V` with `V ~ Bern(alpha)`; scheme B discloses `V` as `V2`.
pub fn binary_bc_vars(scen: &BCScenario, alpha: f64, disclose_v: bool) -> Result<BCVars> {
    let u_axis = Axis::binary("U");
    let x_axis = scen.input_axis().clone();
    let mut ux = vec![0.0; 4];
    for u in 0..2usize {
        for x in 0..2usize {
            ux[u * 2 + x] = 0.5 * if u == x { 1.0 - alpha } else { alpha };
        }
    }
    let p_ux = JointTable::new(
        vec![u_axis.clone(), x_axis.clone()],
        ArrayD::from_shape_vec(IxDyn(&[2, 2]), ux).expect("shape"),
    )?;
    let inputs = vec![u_axis, x_axis, scen.sit_axis().clone(), scen.feedback.output().clone()];
    let comp = if disclose_v {
        Kernel::from_fn(
            inputs,
            vec![Axis::indexed("V1", 1), Axis::binary("V2")],
            |inp, out| {
                let v = inp[0] ^ inp[1];
                if out[1] == v {
                    1.0
                } else {
                    0.0
                }
            },
        )?
    } else {
        Kernel::from_fn(inputs, vec![Axis::indexed("V1", 1), Axis::indexed("V2", 1)], |_, _| 1.0)?
    };
    Ok(BCVars { p_ux, comp })
}

/// Monostatic-downlink trade-off: maximum downlink rate `I(X; Y2' | S)` over
/// the input law subject to the echo-estimation budget
/// `E[d1(S, h*(X, Y1'))] <= target`.
///
/// The objective is concave in the input and the constraint is linear, so a
/// Blahut-Arimoto ascent with a bisected multiplier solves it to tolerance.
pub fn c_md(
    prior: &FiniteDist,
    echo: &Kernel,
    downlink: &Kernel,
    d1: &DistortionFn,
    target: f64,
) -> Result<f64> {
    let ns = prior.len();
    let nx = echo.inputs()[0].len();
    if echo.inputs().len() != 2 || echo.inputs()[1].len() != ns {
        return Err(CdError::Invalid("echo kernel must be (X, S) -> Y1'".into()));
    }
    if downlink.inputs().len() != 2 || downlink.inputs()[1].len() != ns || downlink.inputs()[0].len() != nx
    {
        return Err(CdError::Invalid("downlink kernel must be (X, S) -> Y2'".into()));
    }
    let ny1 = echo.n_output_cells();
    let ny2 = downlink.n_output_cells();
    let nr = d1.n_recons();

    // Per-letter Bayes sensing distortion; independent of the input law.
    let mut e = vec![0.0; nx];
    for x in 0..nx {
        let mut acc = 0.0;
        for y1 in 0..ny1 {
            let mut best = f64::INFINITY;
            for r in 0..nr {
                let mut v = 0.0;
                for s in 0..ns {
                    v += prior.pmf()[s] * echo.prob(x * ns + s, y1) * d1.value(s, r);
                }
                best = best.min(v);
            }
            acc += best;
        }
        e[x] = acc;
    }
    let e_min = e.iter().cloned().fold(f64::INFINITY, f64::min);
    if target < e_min - 1e-9 {
        return Err(CdError::InfeasibleDistortion(target));
    }

    // I(X; Y2' | S) = I(X; (S, Y2')) since X and S are independent.
    let chan_eff: Vec<Vec<f64>> = (0..nx)
        .map(|x| {
            let mut row = vec![0.0; ns * ny2];
            for s in 0..ns {
                for y2 in 0..ny2 {
                    row[s * ny2 + y2] = prior.pmf()[s] * downlink.prob(x * ns + s, y2);
                }
            }
            row
        })
        .collect();

    let solve_at = |sigma: f64| -> (Vec<f64>, f64) {
        let cost: Vec<f64> = e.iter().map(|ex| -sigma * ex * LN_2).collect();
        let p = ba_with_cost(&chan_eff, &cost, 1e-13, 2000).0;
        let dist: f64 = p.iter().zip(&e).map(|(p, e)| p * e).sum();
        (p, dist)
    };

    let (p0, d0) = solve_at(0.0);
    if d0 <= target + 1e-12 {
        return Ok(mi_bits(&p0, &chan_eff));
    }
    let mut hi = 1.0;
    while solve_at(hi).1 > target && hi < 1e9 {
        hi *= 4.0;
    }
    let mut lo = 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if solve_at(mid).1 > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (p_lo, d_lo) = solve_at(lo);
    let (p_hi, d_hi) = solve_at(hi);
    if d_lo <= target + 1e-12 {
        return Ok(mi_bits(&p_lo, &chan_eff).max(mi_bits(&p_hi, &chan_eff)));
    }
    // Mix the bracketing solutions onto the boundary: the constraint is linear
    // in the input law and the rate concave, so the mixture is feasible and at
    // least as good as the chord.
    let t = if d_lo > d_hi { ((d_lo - target) / (d_lo - d_hi)).clamp(0.0, 1.0) } else { 1.0 };
    let mixed: Vec<f64> = p_lo.iter().zip(&p_hi).map(|(a, b)| (1.0 - t) * a + t * b).collect();
    Ok(mi_bits(&mixed, &chan_eff))
}
