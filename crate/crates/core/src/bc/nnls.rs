//! Lawson-Hanson nonnegative least squares, used as the feasibility engine
//! for the statistical-degradedness linear system.

use nalgebra::{DMatrix, DVector};

/// Minimizes `||A x - b||_2` subject to `x >= 0`.
/// Returns the solution and the residual vector `A x - b`.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>, max_iter: usize) -> (DVector<f64>, DVector<f64>) {
    let n = a.ncols();
    let mut x = DVector::zeros(n);
    let mut passive = vec![false; n];
    let tol = 1e-13 * a.amax().max(1.0) * b.amax().max(1.0);

    let mut w = a.transpose() * (b - a * &x);
    for _ in 0..max_iter {
        // Most violated stationarity condition among the active (zero) set.
        let mut best: Option<(usize, f64)> = None;
        for i in 0..n {
            if !passive[i] && w[i] > tol {
                if best.map_or(true, |(_, v)| w[i] > v) {
                    best = Some((i, w[i]));
                }
            }
        }
        let Some((j, _)) = best else { break };
        passive[j] = true;

        loop {
            let idx: Vec<usize> = (0..n).filter(|&i| passive[i]).collect();
            let sub = a.select_columns(idx.iter());
            let z_p = lstsq(&sub, b);
            if z_p.iter().all(|&v| v > tol) {
                x.fill(0.0);
                for (k, &i) in idx.iter().enumerate() {
                    x[i] = z_p[k];
                }
                break;
            }
            // Step toward z until the first passive coordinate hits zero.
            let mut alpha = f64::INFINITY;
            for (k, &i) in idx.iter().enumerate() {
                if z_p[k] <= tol {
                    let denom = x[i] - z_p[k];
                    if denom > 0.0 {
                        alpha = alpha.min(x[i] / denom);
                    }
                }
            }
            if !alpha.is_finite() {
                alpha = 0.0;
            }
            for (k, &i) in idx.iter().enumerate() {
                x[i] += alpha * (z_p[k] - x[i]);
            }
            for &i in &idx {
                if x[i] <= tol {
                    x[i] = 0.0;
                    passive[i] = false;
                }
            }
            if !passive.iter().any(|&p| p) {
                break;
            }
        }
        w = a.transpose() * (b - a * &x);
    }
    let residual = a * &x - b;
    (x, residual)
}

fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let svd = a.clone().svd(true, true);
    svd.solve(b, 1e-12).expect("svd solve")
}
