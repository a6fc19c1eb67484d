//! Jointly Gaussian variable systems assembled from explicit linear models.
//!
//! Every region term in the quadratic-Gaussian examples is evaluated as a
//! log-determinant on one shared covariance matrix, so a single assembly
//! routine is the source of truth and the closed forms serve as cross-checks.

use nalgebra::{DMatrix, DVector};

use crate::error::{CdError, Result};
use crate::prob::LN_2;

/// Relative eigenvalue threshold below which a direction counts as deterministic.
const EIG_FLOOR: f64 = 1e-12;

/// Zero-mean jointly Gaussian variables identified by name.
#[derive(Debug, Clone)]
pub struct GaussianSystem {
    names: Vec<String>,
    cov: DMatrix<f64>,
}

/// Builds a system from independent sources and linear combinations.
#[derive(Debug, Default)]
pub struct GaussianSystemBuilder {
    names: Vec<String>,
    /// Rows express each variable over the source basis.
    rows: Vec<Vec<f64>>,
    source_vars: Vec<f64>,
}

impl GaussianSystemBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds an independent source with the given variance.
    pub fn source(&mut self, name: impl Into<String>, variance: f64) -> &mut Self {
        let name = name.into();
        assert!(variance >= 0.0, "variance of `{name}` must be nonnegative");
        for row in &mut self.rows {
            row.push(0.0);
        }
        let mut row = vec![0.0; self.source_vars.len()];
        row.push(1.0);
        self.rows.push(row);
        self.source_vars.push(variance);
        self.names.push(name);
        self
    }

    /// Adds a variable defined as a linear combination of existing variables.
    pub fn linear(&mut self, name: impl Into<String>, terms: &[(&str, f64)]) -> &mut Self {
        let mut row = vec![0.0; self.source_vars.len()];
        for (dep, coef) in terms {
            let idx = self
                .names
                .iter()
                .position(|n| n == dep)
                .unwrap_or_else(|| panic!("unknown variable `{dep}`"));
            for (j, v) in self.rows[idx].iter().enumerate() {
                row[j] += coef * v;
            }
        }
        self.rows.push(row);
        self.names.push(name.into());
        self
    }

    pub fn build(&self) -> GaussianSystem {
        let n = self.names.len();
        let k = self.source_vars.len();
        let mut b = DMatrix::zeros(n, k);
        for (i, row) in self.rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                b[(i, j)] = *v;
            }
        }
        let d = DMatrix::from_diagonal(&DVector::from_vec(self.source_vars.clone()));
        let mut cov = &b * d * b.transpose();
        // Exact symmetrization.
        for i in 0..n {
            for j in (i + 1)..n {
                let v = 0.5 * (cov[(i, j)] + cov[(j, i)]);
                cov[(i, j)] = v;
                cov[(j, i)] = v;
            }
        }
        GaussianSystem { names: self.names.clone(), cov }
    }
}

impl GaussianSystem {
    pub fn new(names: Vec<String>, cov: DMatrix<f64>) -> Result<Self> {
        if cov.nrows() != names.len() || cov.ncols() != names.len() {
            return Err(CdError::Invalid("covariance shape mismatch".into()));
        }
        let sym = (&cov - cov.transpose()).abs().max();
        if sym > 1e-9 {
            return Err(CdError::Invalid("covariance must be symmetric".into()));
        }
        let eig = cov.clone().symmetric_eigen();
        let scale = cov.trace().abs().max(1.0);
        if eig.eigenvalues.iter().any(|&l| l < -1e-9 * scale) {
            return Err(CdError::Invalid("covariance must be positive semidefinite".into()));
        }
        Ok(Self { names, cov })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.cov
    }

    fn indices(&self, set: &[&str]) -> Result<Vec<usize>> {
        set.iter()
            .map(|n| {
                self.names
                    .iter()
                    .position(|m| m == n)
                    .ok_or_else(|| CdError::UnknownAxis((*n).to_string()))
            })
            .collect()
    }

    fn submatrix(&self, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
        DMatrix::from_fn(rows.len(), cols.len(), |i, j| self.cov[(rows[i], cols[j])])
    }

    /// Conditional covariance of `a` given `c` via the Schur complement with a
    /// pseudo-inverse, so deterministic (zero-variance) conditioners are fine.
    fn cond_cov(&self, a: &[usize], c: &[usize]) -> DMatrix<f64> {
        let saa = self.submatrix(a, a);
        if c.is_empty() {
            return saa;
        }
        let sac = self.submatrix(a, c);
        let scc = self.submatrix(c, c);
        let scc_pinv = sym_pinv(&scc);
        &saa - &sac * scc_pinv * sac.transpose()
    }

    /// Conditional mutual information `I(A; B | C)` in bits via
    /// `0.5 log2 (pdet Sigma_A|C / pdet Sigma_A|BC)` with rank bookkeeping:
    /// a rank drop after conditioning on `B` means infinite information.
    pub fn cond_mutual_information(&self, a: &[&str], b: &[&str], c: &[&str]) -> Result<f64> {
        check_disjoint(&[a, b, c])?;
        if a.is_empty() || b.is_empty() {
            return Ok(0.0);
        }
        let ai = self.indices(a)?;
        let bi = self.indices(b)?;
        let ci = self.indices(c)?;
        let mut bci = bi.clone();
        bci.extend_from_slice(&ci);
        let s_ac = self.cond_cov(&ai, &ci);
        let s_abc = self.cond_cov(&ai, &bci);
        let scale = self.cov.trace().abs().max(1.0);
        let (ld_ac, rk_ac) = pdet_log_rank(&s_ac, scale);
        let (ld_abc, rk_abc) = pdet_log_rank(&s_abc, scale);
        if rk_abc < rk_ac {
            return Ok(f64::INFINITY);
        }
        Ok(0.5 * (ld_ac - ld_abc) / LN_2)
    }

    pub fn mutual_information(&self, a: &[&str], b: &[&str]) -> Result<f64> {
        self.cond_mutual_information(a, b, &[])
    }

    /// Conditional variance of a scalar variable given a set.
    pub fn conditional_variance(&self, target: &str, given: &[&str]) -> Result<f64> {
        let t = self.indices(&[target])?;
        let g = self.indices(given)?;
        let cc = self.cond_cov(&t, &g);
        Ok(cc[(0, 0)].max(0.0))
    }
}

fn check_disjoint(groups: &[&[&str]]) -> Result<()> {
    let mut seen: Vec<&str> = Vec::new();
    for g in groups {
        for n in *g {
            if seen.contains(n) {
                return Err(CdError::OverlappingAxes((*n).to_string()));
            }
            seen.push(n);
        }
    }
    Ok(())
}

/// Symmetric pseudo-inverse by eigendecomposition.
fn sym_pinv(m: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = m.clone().symmetric_eigen();
    let scale = m.trace().abs().max(1.0) * EIG_FLOOR;
    let n = m.nrows();
    let mut inv = DMatrix::zeros(n, n);
    for k in 0..n {
        let l = eig.eigenvalues[k];
        if l.abs() > scale {
            let v = eig.eigenvectors.column(k);
            inv += DMatrix::from_fn(n, n, |i, j| v[i] * v[j] / l);
        }
    }
    inv
}

/// Log pseudo-determinant (product of eigenvalues above the floor) and rank.
fn pdet_log_rank(m: &DMatrix<f64>, scale: f64) -> (f64, usize) {
    if m.nrows() == 0 {
        return (0.0, 0);
    }
    let eig = m.clone().symmetric_eigen();
    let floor = scale * EIG_FLOOR;
    let mut log_det = 0.0;
    let mut rank = 0usize;
    for &l in eig.eigenvalues.iter() {
        if l > floor {
            log_det += l.ln();
            rank += 1;
        }
    }
    (log_det, rank)
}

/// Set difference helper for region formulas where a conditioning variable
/// also appears in the information set.
pub fn minus<'a>(set: &[&'a str], drop: &[&'a str]) -> Vec<&'a str> {
    set.iter().copied().filter(|s| !drop.contains(s)).collect()
}
