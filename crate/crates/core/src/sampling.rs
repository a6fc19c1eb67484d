//! Seeded random generators for distributions, kernels and whole scenarios.
//! Used by the property suites and the CLI's sampled-region runs.

use ndarray::{ArrayD, IxDyn};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::opt::dirichlet1;
use crate::prob::{Axis, DetMap, DistortionFn, FiniteDist, JointTable, Kernel};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_dist<R: Rng>(rng: &mut R, axis: Axis) -> FiniteDist {
    let pmf = dirichlet1(rng, axis.len());
    FiniteDist::new(axis, pmf).expect("dirichlet sample is a valid pmf")
}

pub fn random_joint<R: Rng>(rng: &mut R, axes: Vec<Axis>) -> JointTable {
    let n: usize = axes.iter().map(Axis::len).product();
    let shape: Vec<usize> = axes.iter().map(Axis::len).collect();
    let values = ArrayD::from_shape_vec(IxDyn(&shape), dirichlet1(rng, n)).expect("shape");
    JointTable::new(axes, values).expect("dirichlet sample is a valid joint")
}

pub fn random_kernel<R: Rng>(rng: &mut R, inputs: Vec<Axis>, outputs: Vec<Axis>) -> Kernel {
    let n_in: usize = inputs.iter().map(Axis::len).product::<usize>().max(1);
    let n_out: usize = outputs.iter().map(Axis::len).product();
    let mut table = Vec::with_capacity(n_in * n_out);
    for _ in 0..n_in {
        table.extend(dirichlet1(rng, n_out));
    }
    Kernel::new(inputs, outputs, table).expect("dirichlet rows are valid")
}

/// Random nonnegative distortion table with entries in [0, 1].
pub fn random_distortion<R: Rng>(rng: &mut R, states: &[String], recons: &[String]) -> DistortionFn {
    let values: Vec<f64> = (0..states.len() * recons.len()).map(|_| rng.gen::<f64>()).collect();
    DistortionFn::new(states.to_vec(), recons.to_vec(), values).expect("entries in range")
}

/// Joint `P(s) P(v | s) P(w | v)`: a Markov chain S - V - W by construction.
pub fn random_markov_chain_joint<R: Rng>(rng: &mut R, ns: usize, nv: usize, nw: usize) -> JointTable {
    let ps = dirichlet1(rng, ns);
    let pv_s: Vec<Vec<f64>> = (0..ns).map(|_| dirichlet1(rng, nv)).collect();
    let pw_v: Vec<Vec<f64>> = (0..nv).map(|_| dirichlet1(rng, nw)).collect();
    let axes = vec![Axis::indexed("S", ns), Axis::indexed("V", nv), Axis::indexed("W", nw)];
    let mut values = Vec::with_capacity(ns * nv * nw);
    for s in 0..ns {
        for v in 0..nv {
            for w in 0..nw {
                values.push(ps[s] * pv_s[s][v] * pw_v[v][w]);
            }
        }
    }
    let arr = ArrayD::from_shape_vec(IxDyn(&[ns, nv, nw]), values).expect("shape");
    JointTable::new(axes, arr).expect("product of pmfs")
}

/// Standard normal via Box-Muller, deterministic for a fixed ChaCha stream.
pub fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Alphabet sizes for a random point-to-point system.
#[derive(Debug, Clone, Copy)]
pub struct P2PSizes {
    pub ns: usize,
    pub nst: usize,
    pub nx: usize,
    pub ny: usize,
    /// `0` draws a random feedback map; `1` forces absent feedback.
    pub nz: usize,
}

impl Default for P2PSizes {
    fn default() -> Self {
        Self { ns: 2, nst: 2, nx: 2, ny: 2, nz: 1 }
    }
}

pub fn random_p2p_scenario<R: Rng>(rng: &mut R, sizes: P2PSizes) -> crate::p2p::P2PScenario {
    let s = Axis::indexed("S", sizes.ns);
    let st = Axis::indexed("S_T", sizes.nst);
    let x = Axis::indexed("X", sizes.nx);
    let y = Axis::indexed("Y", sizes.ny);
    let pss_t = random_joint(rng, vec![s.clone(), st]);
    let chan = random_kernel(rng, vec![x, s.clone()], vec![y.clone()]);
    let feedback = if sizes.nz <= 1 {
        DetMap::constant(vec![y], "Z")
    } else {
        let table: Vec<usize> = (0..sizes.ny).map(|_| rng.gen_range(0..sizes.nz)).collect();
        DetMap::new(vec![y], Axis::indexed("Z", sizes.nz), table).expect("valid map")
    };
    let d = random_distortion(rng, s.labels(), s.labels());
    crate::p2p::P2PScenario::new(pss_t, chan, feedback, d).expect("consistent axes")
}

/// Alphabet sizes for random broadcast systems and variables.
#[derive(Debug, Clone, Copy)]
pub struct BcSizes {
    pub ns: usize,
    pub nst: usize,
    pub nx: usize,
    pub ny1: usize,
    pub ny2: usize,
    pub nz: usize,
    pub nu: usize,
    pub nv1: usize,
    pub nv2: usize,
}

impl Default for BcSizes {
    fn default() -> Self {
        Self { ns: 2, nst: 2, nx: 2, ny1: 2, ny2: 2, nz: 1, nu: 2, nv1: 2, nv2: 2 }
    }
}

pub fn random_bc_scenario<R: Rng>(rng: &mut R, sizes: BcSizes) -> crate::bc::BCScenario {
    let s = Axis::indexed("S", sizes.ns);
    let st = Axis::indexed("S_T", sizes.nst);
    let x = Axis::indexed("X", sizes.nx);
    let y1 = Axis::indexed("Y1", sizes.ny1);
    let y2 = Axis::indexed("Y2", sizes.ny2);
    let pss_t = random_joint(rng, vec![s.clone(), st]);
    let chan = random_kernel(rng, vec![x, s.clone()], vec![y1.clone(), y2.clone()]);
    let feedback = if sizes.nz <= 1 {
        DetMap::constant(vec![y1, y2], "Z")
    } else {
        let n_in = sizes.ny1 * sizes.ny2;
        let table: Vec<usize> = (0..n_in).map(|_| rng.gen_range(0..sizes.nz)).collect();
        DetMap::new(vec![y1, y2], Axis::indexed("Z", sizes.nz), table).expect("valid map")
    };
    let d1 = random_distortion(rng, s.labels(), s.labels());
    let d2 = random_distortion(rng, s.labels(), s.labels());
    crate::bc::BCScenario::new(pss_t, chan, feedback, d1, d2).expect("consistent axes")
}

pub fn random_bc_vars<R: Rng>(
    rng: &mut R,
    scen: &crate::bc::BCScenario,
    sizes: BcSizes,
) -> crate::bc::BCVars {
    let u = Axis::indexed("U", sizes.nu);
    let p_ux = random_joint(rng, vec![u.clone(), scen.input_axis().clone()]);
    let comp = random_kernel(
        rng,
        vec![u, scen.input_axis().clone(), scen.sit_axis().clone(), scen.feedback.output().clone()],
        vec![Axis::indexed("V1", sizes.nv1), Axis::indexed("V2", sizes.nv2)],
    );
    crate::bc::BCVars { p_ux, comp }
}

/// Alphabet sizes for random multiple-access systems and variables.
#[derive(Debug, Clone, Copy)]
pub struct MacSizes {
    pub ns: usize,
    pub ns1: usize,
    pub ns2: usize,
    pub nx1: usize,
    pub nx2: usize,
    pub ny: usize,
    pub nz1: usize,
    pub nz2: usize,
    pub nu: usize,
    pub nw1: usize,
    pub nw2: usize,
    pub nv1: usize,
    pub nv2: usize,
}

impl Default for MacSizes {
    fn default() -> Self {
        Self {
            ns: 2,
            ns1: 2,
            ns2: 2,
            nx1: 2,
            nx2: 2,
            ny: 2,
            nz1: 1,
            nz2: 1,
            nu: 2,
            nw1: 2,
            nw2: 2,
            nv1: 2,
            nv2: 2,
        }
    }
}

pub fn random_mac_scenario<R: Rng>(rng: &mut R, sizes: MacSizes) -> crate::mac::MACScenario {
    let s = Axis::indexed("S", sizes.ns);
    let s1 = Axis::indexed("S1", sizes.ns1);
    let s2 = Axis::indexed("S2", sizes.ns2);
    let x1 = Axis::indexed("X1", sizes.nx1);
    let x2 = Axis::indexed("X2", sizes.nx2);
    let y = Axis::indexed("Y", sizes.ny);
    let psss = random_joint(rng, vec![s.clone(), s1, s2]);
    let chan = random_kernel(rng, vec![x1, x2, s.clone()], vec![y.clone()]);
    let mk_phi = |rng: &mut R, nz: usize, name: &str| {
        if nz <= 1 {
            DetMap::constant(vec![y.clone()], name)
        } else {
            let table: Vec<usize> = (0..sizes.ny).map(|_| rng.gen_range(0..nz)).collect();
            DetMap::new(vec![y.clone()], Axis::indexed(name, nz), table).expect("valid map")
        }
    };
    let phi1 = mk_phi(rng, sizes.nz1, "Z1");
    let phi2 = mk_phi(rng, sizes.nz2, "Z2");
    let d = random_distortion(rng, s.labels(), s.labels());
    crate::mac::MACScenario::new(psss, chan, phi1, phi2, d).expect("consistent axes")
}

pub fn random_mac_vars<R: Rng>(
    rng: &mut R,
    scen: &crate::mac::MACScenario,
    sizes: MacSizes,
) -> crate::mac::MACVars {
    let u = Axis::indexed("U", sizes.nu);
    let w1 = Axis::indexed("W1", sizes.nw1);
    let w2 = Axis::indexed("W2", sizes.nw2);
    let p_u = random_dist(rng, u.clone());
    let enc1 = random_kernel(rng, vec![u.clone()], vec![w1.clone(), scen.x1_axis().clone()]);
    let enc2 = random_kernel(rng, vec![u.clone()], vec![w2.clone(), scen.x2_axis().clone()]);
    let comp1 = random_kernel(
        rng,
        vec![
            u.clone(),
            w1.clone(),
            w2.clone(),
            scen.x1_axis().clone(),
            scen.psss.axes()[1].clone(),
            scen.phi1.output().clone(),
        ],
        vec![Axis::indexed("V1", sizes.nv1)],
    );
    let comp2 = random_kernel(
        rng,
        vec![u, w1, w2, scen.x2_axis().clone(), scen.psss.axes()[2].clone(), scen.phi2.output().clone()],
        vec![Axis::indexed("V2", sizes.nv2)],
    );
    crate::mac::MACVars { p_u, enc1, enc2, comp1, comp2 }
}
