//! Flattened evaluation path for the point-to-point objective.
//!
//! The public API works on labeled tables; the solver inner loop works on raw
//! arrays compiled from the scenario once. Both paths are checked against each
//! other in the test suite.

use crate::opt::{ba_with_cost, mi_bits, mi_bits_unnormalized};
use crate::prob::{Axis, LN_2};

use super::P2PScenario;

/// Scenario compiled to flat arrays.
///
/// Index layouts: `p_sst[s][st]`, `chan[x][s][y]`, compressor rows
/// `k[x][st][z][v]`, estimator `h[x][v][y]`.
pub(crate) struct CompiledP2P {
    pub ns: usize,
    pub nst: usize,
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub nv: usize,
    pub nr: usize,
    pub p_sst: Vec<f64>,
    pub chan: Vec<f64>,
    pub phi: Vec<usize>,
    pub dvals: Vec<f64>,
    /// `P(y | x)`, fixed by the channel and state prior.
    pub p_y_given_x: Vec<Vec<f64>>,
    /// `a[x][y][st] = P(y, st | x)`.
    a: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct EvalResult {
    pub i_xy: f64,
    pub penalty: f64,
    pub raw_obj: f64,
    pub distortion: f64,
}

impl EvalResult {
    pub fn lagrangian(&self, rho: f64) -> f64 {
        self.raw_obj - rho * self.distortion
    }
}

impl CompiledP2P {
    pub fn new(scen: &P2PScenario, nv: usize) -> Self {
        let s_axis = scen.state_axis();
        let st_axis = scen.sit_axis();
        let x_axis = scen.input_axis();
        let y_axis = scen.output_axis();
        let (ns, nst, nx, ny) = (s_axis.len(), st_axis.len(), x_axis.len(), y_axis.len());
        let nz = scen.feedback.output().len();
        let nr = scen.distortion.n_recons();

        let mut p_sst = vec![0.0; ns * nst];
        let pv = scen.pss_t.values();
        for s in 0..ns {
            for st in 0..nst {
                p_sst[s * nst + st] = pv[[s, st]];
            }
        }
        let mut chan = vec![0.0; nx * ns * ny];
        for x in 0..nx {
            for s in 0..ns {
                for y in 0..ny {
                    chan[(x * ns + s) * ny + y] = scen.chan.prob(x * ns + s, y);
                }
            }
        }
        let phi: Vec<usize> = (0..ny).map(|y| scen.feedback.map(y)).collect();
        let dvals = scen.distortion.values().to_vec();

        let mut p_y_given_x = vec![vec![0.0; ny]; nx];
        let mut a = vec![0.0; nx * ny * nst];
        for x in 0..nx {
            for s in 0..ns {
                for st in 0..nst {
                    let w = p_sst[s * nst + st];
                    if w == 0.0 {
                        continue;
                    }
                    for y in 0..ny {
                        let c = chan[(x * ns + s) * ny + y];
                        if c == 0.0 {
                            continue;
                        }
                        p_y_given_x[x][y] += w * c;
                        a[(x * ny + y) * nst + st] += w * c;
                    }
                }
            }
        }
        Self { ns, nst, nx, ny, nz, nv, nr, p_sst, chan, phi, dvals, p_y_given_x, a }
    }

    pub fn k_len(&self) -> usize {
        self.nx * self.nst * self.nz * self.nv
    }

    #[inline]
    fn k_at<'a>(&self, k: &'a [f64], x: usize, st: usize, z: usize) -> &'a [f64] {
        let base = ((x * self.nst + st) * self.nz + z) * self.nv;
        &k[base..base + self.nv]
    }

    pub fn i_xy_bits(&self, px: &[f64]) -> f64 {
        mi_bits(px, &self.p_y_given_x)
    }

    /// `I(V; S_T | X, Y)` in bits.
    pub fn penalty_bits(&self, px: &[f64], k: &[f64]) -> f64 {
        let mut total = 0.0;
        let mut m = vec![0.0; self.nst * self.nv];
        for x in 0..self.nx {
            if px[x] == 0.0 {
                continue;
            }
            total += px[x] * self.penalty_for_x(x, k, &mut m);
        }
        total
    }

    /// Per-letter penalty `sum_y P(y|x) I(V; S_T | X=x, Y=y)` in bits.
    fn penalty_for_x(&self, x: usize, k: &[f64], m: &mut [f64]) -> f64 {
        let mut acc = 0.0;
        for y in 0..self.ny {
            let z = self.phi[y];
            let mut mass = 0.0;
            for st in 0..self.nst {
                let w = self.a[(x * self.ny + y) * self.nst + st];
                let row = self.k_at(k, x, st, z);
                for v in 0..self.nv {
                    m[st * self.nv + v] = w * row[v];
                }
                mass += w;
            }
            if mass > 0.0 {
                acc += mass * mi_bits_unnormalized(m, self.nst, self.nv);
            }
        }
        acc
    }

    /// Bayes estimator `h[x][v][y]` of the state from `(X, V, Y)`; does not
    /// depend on the input distribution because the posterior
    /// `P(s | x, v, y)` cancels `P(x)`.
    pub fn derive_estimator(&self, k: &[f64]) -> Vec<usize> {
        let mut h = vec![0usize; self.nx * self.nv * self.ny];
        let mut post = vec![0.0; self.ns];
        for x in 0..self.nx {
            for v in 0..self.nv {
                for y in 0..self.ny {
                    let z = self.phi[y];
                    post.iter_mut().for_each(|p| *p = 0.0);
                    for s in 0..self.ns {
                        let c = self.chan[(x * self.ns + s) * self.ny + y];
                        if c == 0.0 {
                            continue;
                        }
                        let mut acc = 0.0;
                        for st in 0..self.nst {
                            acc += self.p_sst[s * self.nst + st] * self.k_at(k, x, st, z)[v];
                        }
                        post[s] = acc * c;
                    }
                    let mut best = 0usize;
                    let mut best_val = f64::INFINITY;
                    for r in 0..self.nr {
                        let mut val = 0.0;
                        for s in 0..self.ns {
                            val += post[s] * self.dvals[s * self.nr + r];
                        }
                        if val < best_val {
                            best_val = val;
                            best = r;
                        }
                    }
                    h[(x * self.nv + v) * self.ny + y] = best;
                }
            }
        }
        h
    }

    /// Expected distortion per input letter under a fixed estimator.
    pub fn distortion_per_x(&self, k: &[f64], h: &[usize]) -> Vec<f64> {
        let mut e = vec![0.0; self.nx];
        for x in 0..self.nx {
            let mut acc = 0.0;
            for s in 0..self.ns {
                for st in 0..self.nst {
                    let w = self.p_sst[s * self.nst + st];
                    if w == 0.0 {
                        continue;
                    }
                    for y in 0..self.ny {
                        let c = self.chan[(x * self.ns + s) * self.ny + y];
                        if c == 0.0 {
                            continue;
                        }
                        let z = self.phi[y];
                        let row = self.k_at(k, x, st, z);
                        for v in 0..self.nv {
                            if row[v] > 0.0 {
                                let r = h[(x * self.nv + v) * self.ny + y];
                                acc += w * c * row[v] * self.dvals[s * self.nr + r];
                            }
                        }
                    }
                }
            }
            e[x] = acc;
        }
        e
    }

    /// Per-letter penalty in bits for every input symbol.
    pub fn penalty_per_x(&self, k: &[f64]) -> Vec<f64> {
        let mut m = vec![0.0; self.nst * self.nv];
        (0..self.nx).map(|x| self.penalty_for_x(x, k, &mut m)).collect()
    }

    pub fn eval(&self, px: &[f64], k: &[f64]) -> EvalResult {
        let h = self.derive_estimator(k);
        self.eval_with_estimator(px, k, &h)
    }

    pub fn eval_with_estimator(&self, px: &[f64], k: &[f64], h: &[usize]) -> EvalResult {
        let i_xy = self.i_xy_bits(px);
        let penalty = self.penalty_bits(px, k);
        let e = self.distortion_per_x(k, h);
        let distortion = px.iter().zip(&e).map(|(p, e)| p * e).sum();
        EvalResult { i_xy, penalty, raw_obj: i_xy - penalty, distortion }
    }

    /// Gradient of the Lagrangian `I(X;Y) - I(V;S_T|X,Y) - rho E[d]` with
    /// respect to the compressor entries, holding the estimator fixed
    /// (envelope theorem: the estimator is posterior-optimal). In nats.
    pub fn grad_k(&self, px: &[f64], k: &[f64], h: &[usize], rho: f64, grad: &mut [f64]) {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut m = vec![0.0; self.nst * self.nv];
        let mut c = vec![0.0; self.nv];
        for x in 0..self.nx {
            if px[x] == 0.0 {
                continue;
            }
            // Penalty part: dP/dK[x,st,z,v] = px sum_{y: phi(y)=z} a (ln m - ln c_v).
            for y in 0..self.ny {
                let z = self.phi[y];
                c.iter_mut().for_each(|v| *v = 0.0);
                for st in 0..self.nst {
                    let w = self.a[(x * self.ny + y) * self.nst + st];
                    let row = self.k_at(k, x, st, z);
                    for v in 0..self.nv {
                        let mv = w * row[v];
                        m[st * self.nv + v] = mv;
                        c[v] += mv;
                    }
                }
                for st in 0..self.nst {
                    let w = self.a[(x * self.ny + y) * self.nst + st];
                    if w == 0.0 {
                        continue;
                    }
                    let base = ((x * self.nst + st) * self.nz + z) * self.nv;
                    for v in 0..self.nv {
                        let mv = m[st * self.nv + v];
                        let term = if mv > 0.0 && c[v] > 0.0 { w * (mv / c[v]).ln() } else { 0.0 };
                        grad[base + v] -= px[x] * term;
                    }
                }
            }
            // Distortion part, linear in K.
            if rho != 0.0 {
                for s in 0..self.ns {
                    for st in 0..self.nst {
                        let w = self.p_sst[s * self.nst + st];
                        if w == 0.0 {
                            continue;
                        }
                        for y in 0..self.ny {
                            let cch = self.chan[(x * self.ns + s) * self.ny + y];
                            if cch == 0.0 {
                                continue;
                            }
                            let z = self.phi[y];
                            let base = ((x * self.nst + st) * self.nz + z) * self.nv;
                            for v in 0..self.nv {
                                let r = h[(x * self.nv + v) * self.ny + y];
                                grad[base + v] -=
                                    rho * LN_2 * px[x] * w * cch * self.dvals[s * self.nr + r];
                            }
                        }
                    }
                }
            }
        }
    }

    /// Exact input-block maximization of the Lagrangian at fixed compressor:
    /// the objective is `I(X;Y) + sum_x p(x) c(x)` with constant per-letter
    /// costs, concave in `p`, solved by Blahut-Arimoto ascent.
    pub fn best_px(&self, k: &[f64], h: &[usize], rho: f64) -> Vec<f64> {
        let g = self.penalty_per_x(k);
        let e = self.distortion_per_x(k, h);
        let cost: Vec<f64> = (0..self.nx)
            .map(|x| -(g[x] * LN_2) - rho * e[x] * LN_2)
            .collect();
        ba_with_cost(&self.p_y_given_x, &cost, 1e-12, 500).0
    }

    /// Input-block maximization under a hard distortion budget
    /// `sum_x p(x) e(x) <= budget` (linear constraint, concave objective):
    /// bisects an inner multiplier and mixes the bracketing solutions onto the
    /// constraint boundary.
    pub fn best_px_constrained(&self, k: &[f64], h: &[usize], budget: f64) -> Option<Vec<f64>> {
        let g = self.penalty_per_x(k);
        let e = self.distortion_per_x(k, h);
        let base_cost: Vec<f64> = g.iter().map(|gx| -(gx * LN_2)).collect();
        let solve = |sigma: f64| -> (Vec<f64>, f64) {
            let cost: Vec<f64> = (0..self.nx)
                .map(|x| base_cost[x] - sigma * e[x] * LN_2)
                .collect();
            let p = ba_with_cost(&self.p_y_given_x, &cost, 1e-12, 500).0;
            let d: f64 = p.iter().zip(&e).map(|(p, e)| p * e).sum();
            (p, d)
        };
        let (p0, d0) = solve(0.0);
        if d0 <= budget + 1e-12 {
            return Some(p0);
        }
        let mut lo = 0.0;
        let mut hi = 1.0;
        let mut d_hi;
        loop {
            let (_, d) = solve(hi);
            d_hi = d;
            if d_hi <= budget || hi > 1e9 {
                break;
            }
            hi *= 4.0;
        }
        if d_hi > budget {
            let min_e = e.iter().cloned().fold(f64::INFINITY, f64::min);
            if min_e > budget + 1e-9 {
                return None;
            }
            // Fall back to the pure minimum-distortion letter.
            let xmin = e
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .map(|(i, _)| i)
                .unwrap();
            let mut p = vec![0.0; self.nx];
            p[xmin] = 1.0;
            return Some(p);
        }
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            let (_, d) = solve(mid);
            if d > budget {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (p_lo, d_lo) = solve(lo);
        let (p_hi, d_hi) = solve(hi);
        if d_lo <= budget + 1e-12 {
            return Some(p_lo);
        }
        // Mix onto the boundary; the constraint is linear in p.
        let t = if d_lo > d_hi { ((d_lo - budget) / (d_lo - d_hi)).clamp(0.0, 1.0) } else { 1.0 };
        let mixed: Vec<f64> = p_lo
            .iter()
            .zip(&p_hi)
            .map(|(a, b)| (1.0 - t) * a + t * b)
            .collect();
        Some(mixed)
    }

    /// Uniform-row compressor: `V` independent of everything.
    pub fn constant_k(&self) -> Vec<f64> {
        vec![1.0 / self.nv as f64; self.k_len()]
    }

    pub fn estimator_obs_axes(&self, scen: &P2PScenario, v_axis: &Axis) -> Vec<Axis> {
        vec![scen.input_axis().clone(), v_axis.clone(), scen.output_axis().clone()]
    }
}
