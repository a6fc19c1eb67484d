//! Shared optimization machinery for the capacity-distortion solvers:
//! simplex sampling, seed derivation, Blahut-Arimoto ascent with per-letter
//! costs, and the geometric Lagrange-multiplier grid used by every
//! distortion-constrained sweep.

use rand::distributions::Open01;
use rand::Rng;

use crate::prob::LN_2;

/// Solver options shared by the discrete capacity-distortion solvers.
#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Size of the compression alphabet; `None` picks `|X||S_T||Z| + 2`.
    pub v_size: Option<usize>,
    /// Number of random restarts per multiplier value.
    pub starts: usize,
    /// Master seed; every restart derives its own stream from it.
    pub seed: u64,
    /// Cap on alternating-ascent iterations.
    pub max_iters: usize,
    /// Stop once the objective improves less than this over ten iterations.
    pub tol: f64,
    /// Lagrange multiplier grid; `None` uses [`default_rho_grid`].
    pub rho_grid: Option<Vec<f64>>,
    /// Extra bisection steps refining the multiplier toward a target distortion.
    pub bisection_steps: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            v_size: None,
            starts: 20,
            seed: 0,
            max_iters: 5000,
            tol: 1e-7,
            rho_grid: None,
            bisection_steps: 12,
        }
    }
}

impl SolverOptions {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_starts(mut self, starts: usize) -> Self {
        self.starts = starts;
        self
    }

    pub fn with_v_size(mut self, v: usize) -> Self {
        self.v_size = Some(v);
        self
    }

    pub fn rho_values(&self) -> Vec<f64> {
        self.rho_grid.clone().unwrap_or_else(default_rho_grid)
    }
}

/// `{0} + geometric 2^-6 ... 2^10`: multipliers spanning rate-dominated to
/// distortion-dominated regimes.
pub fn default_rho_grid() -> Vec<f64> {
    let mut grid = vec![0.0];
    let mut rho = 2.0_f64.powi(-6);
    while rho <= 1024.0 + 1e-12 {
        grid.push(rho);
        rho *= 2.0;
    }
    grid
}

/// SplitMix64 step, used to derive independent per-start seeds from a master
/// seed so results do not depend on scheduling or worker count.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    let mut z = master ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Dirichlet(1) sample: uniform over the probability simplex.
pub fn dirichlet1<R: Rng>(rng: &mut R, k: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..k).map(|_| -rng.sample::<f64, _>(Open01).ln()).collect();
    let sum: f64 = v.iter().sum();
    for x in &mut v {
        *x /= sum;
    }
    v
}

/// Blahut-Arimoto ascent maximizing `I(X; Y) + sum_x p(x) cost(x)` over the
/// input simplex, with `chan[x][y] = P(y | x)` and costs in nats.
///
/// The objective is concave in `p`, so the fixed point is the global optimum.
/// Returns the maximizing distribution and the objective value in nats.
pub fn ba_with_cost(chan: &[Vec<f64>], cost_nats: &[f64], tol: f64, max_iters: usize) -> (Vec<f64>, f64) {
    let nx = chan.len();
    let ny = chan[0].len();
    let mut p = vec![1.0 / nx as f64; nx];
    let mut q = vec![0.0; ny];
    let mut t = vec![0.0; nx];
    let mut prev = f64::NEG_INFINITY;
    for _ in 0..max_iters {
        for y in 0..ny {
            q[y] = (0..nx).map(|x| p[x] * chan[x][y]).sum();
        }
        for x in 0..nx {
            let mut div = 0.0;
            for y in 0..ny {
                let c = chan[x][y];
                if c > 0.0 && q[y] > 0.0 {
                    div += c * (c / q[y]).ln();
                }
            }
            t[x] = div + cost_nats[x];
        }
        // Objective at the current iterate.
        let value: f64 = (0..nx).map(|x| p[x] * t[x]).sum();
        if value - prev < tol && value.is_finite() {
            return (p, value);
        }
        prev = value;
        let m = t.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut z = 0.0;
        for x in 0..nx {
            p[x] *= (t[x] - m).exp();
            z += p[x];
        }
        for x in 0..nx {
            p[x] /= z;
        }
    }
    let value: f64 = {
        for y in 0..ny {
            q[y] = (0..nx).map(|x| p[x] * chan[x][y]).sum();
        }
        let mut v = 0.0;
        for x in 0..nx {
            for y in 0..ny {
                let c = chan[x][y];
                if p[x] > 0.0 && c > 0.0 && q[y] > 0.0 {
                    v += p[x] * c * (c / q[y]).ln();
                }
            }
            v += p[x] * cost_nats[x];
        }
        v
    };
    (p, value)
}

/// Mutual information in bits of an input pmf through a row-stochastic channel.
pub fn mi_bits(p: &[f64], chan: &[Vec<f64>]) -> f64 {
    let ny = chan[0].len();
    let mut q = vec![0.0; ny];
    for (x, row) in chan.iter().enumerate() {
        for y in 0..ny {
            q[y] += p[x] * row[y];
        }
    }
    let mut v = 0.0;
    for (x, row) in chan.iter().enumerate() {
        if p[x] == 0.0 {
            continue;
        }
        for y in 0..ny {
            let c = row[y];
            if c > 0.0 && q[y] > 0.0 {
                v += p[x] * c * (c / q[y]).ln();
            }
        }
    }
    v / LN_2
}

/// Mutual information in bits of an unnormalized nonnegative matrix `m[i][j]`,
/// interpreting it as a joint law after normalization. Zero-mass matrices give 0.
pub fn mi_bits_unnormalized(m: &[f64], rows: usize, cols: usize) -> f64 {
    let total: f64 = m.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    let mut r = vec![0.0; rows];
    let mut c = vec![0.0; cols];
    for i in 0..rows {
        for j in 0..cols {
            r[i] += m[i * cols + j];
            c[j] += m[i * cols + j];
        }
    }
    let mut v = 0.0;
    for i in 0..rows {
        for j in 0..cols {
            let p = m[i * cols + j];
            if p > 0.0 {
                v += p * ((p * total) / (r[i] * c[j])).ln();
            }
        }
    }
    v / total / LN_2
}
