use super::axis::{check_unique_names, Axis};
use super::dist::FiniteDist;
use super::norm::normalize_pmf;
use crate::error::{CdError, Result};

/// Conditional pmf table `P(outputs | inputs)`, stored row-major with input
/// axes leading. Each input row must sum to 1.
#[derive(Debug, Clone)]
pub struct Kernel {
    inputs: Vec<Axis>,
    outputs: Vec<Axis>,
    table: Vec<f64>,
}

impl Kernel {
    pub fn new(inputs: Vec<Axis>, outputs: Vec<Axis>, mut table: Vec<f64>) -> Result<Self> {
        let all: Vec<Axis> = inputs.iter().chain(outputs.iter()).cloned().collect();
        check_unique_names(&all)?;
        if outputs.is_empty() {
            return Err(CdError::Invalid("kernel needs at least one output axis".into()));
        }
        let n_in: usize = inputs.iter().map(Axis::len).product::<usize>().max(1);
        let n_out: usize = outputs.iter().map(Axis::len).product();
        if table.len() != n_in * n_out {
            return Err(CdError::Invalid(format!(
                "kernel table length {} does not match {}x{}",
                table.len(),
                n_in,
                n_out
            )));
        }
        for row in 0..n_in {
            normalize_pmf(&mut table[row * n_out..(row + 1) * n_out])?;
        }
        Ok(Self { inputs, outputs, table })
    }

    pub(crate) fn new_unchecked(inputs: Vec<Axis>, outputs: Vec<Axis>, table: Vec<f64>) -> Self {
        Self { inputs, outputs, table }
    }

    /// Kernel with no inputs: an unconditional distribution on `outputs`.
    pub fn from_dist(dist: &FiniteDist) -> Self {
        Self {
            inputs: Vec::new(),
            outputs: vec![dist.axis().clone()],
            table: dist.pmf().to_vec(),
        }
    }

    /// Independent joint factor with no inputs (used for `P(U, X)` style blocks).
    pub fn from_joint_factor(axes: Vec<Axis>, table: Vec<f64>) -> Result<Self> {
        Self::new(Vec::new(), axes, table)
    }

    /// Builds a kernel from nonnegative weights, normalizing each input row.
    /// Intended for discretized continuous kernels where the weights are
    /// unnormalized densities.
    pub fn from_fn_normalized(
        inputs: Vec<Axis>,
        outputs: Vec<Axis>,
        f: impl Fn(&[usize], &[usize]) -> f64,
    ) -> Result<Self> {
        let mut k = Self::from_fn_raw(inputs, outputs, f)?;
        let n_out = k.n_output_cells();
        for row in 0..k.n_input_cells() {
            let slice = &mut k.table[row * n_out..(row + 1) * n_out];
            let mass: f64 = slice.iter().sum();
            if mass <= 0.0 {
                return Err(CdError::Invalid(format!("kernel row {row} has zero mass")));
            }
            for v in slice.iter_mut() {
                *v /= mass;
            }
        }
        Self::new(k.inputs, k.outputs, k.table)
    }

    /// Builds a kernel from a function of (input indices, output indices).
    pub fn from_fn(
        inputs: Vec<Axis>,
        outputs: Vec<Axis>,
        f: impl Fn(&[usize], &[usize]) -> f64,
    ) -> Result<Self> {
        let k = Self::from_fn_raw(inputs, outputs, f)?;
        Self::new(k.inputs, k.outputs, k.table)
    }

    fn from_fn_raw(
        inputs: Vec<Axis>,
        outputs: Vec<Axis>,
        f: impl Fn(&[usize], &[usize]) -> f64,
    ) -> Result<Self> {
        let in_dims: Vec<usize> = inputs.iter().map(Axis::len).collect();
        let out_dims: Vec<usize> = outputs.iter().map(Axis::len).collect();
        let n_in: usize = in_dims.iter().product::<usize>().max(1);
        let n_out: usize = out_dims.iter().product();
        let mut table = Vec::with_capacity(n_in * n_out);
        let mut in_idx = vec![0usize; in_dims.len()];
        for _ in 0..n_in {
            let mut out_idx = vec![0usize; out_dims.len()];
            for _ in 0..n_out {
                table.push(f(&in_idx, &out_idx));
                increment(&mut out_idx, &out_dims);
            }
            increment(&mut in_idx, &in_dims);
        }
        Ok(Self { inputs, outputs, table })
    }

    pub fn inputs(&self) -> &[Axis] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[Axis] {
        &self.outputs
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn n_input_cells(&self) -> usize {
        self.inputs.iter().map(Axis::len).product::<usize>().max(1)
    }

    pub fn n_output_cells(&self) -> usize {
        self.outputs.iter().map(Axis::len).product()
    }

    /// `P(out | in)` by flat row/column index.
    pub fn prob(&self, in_flat: usize, out_flat: usize) -> f64 {
        self.table[in_flat * self.n_output_cells() + out_flat]
    }

    /// Maximum absolute entrywise difference against another kernel of identical shape.
    pub fn max_abs_diff(&self, other: &Kernel) -> Result<f64> {
        if self.table.len() != other.table.len() {
            return Err(CdError::Invalid("kernel shapes differ".into()));
        }
        Ok(self
            .table
            .iter()
            .zip(&other.table)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

/// Odometer increment over mixed-radix digits; returns to all-zeros after the last cell.
pub(crate) fn increment(idx: &mut [usize], dims: &[usize]) {
    for i in (0..idx.len()).rev() {
        idx[i] += 1;
        if idx[i] < dims[i] {
            return;
        }
        idx[i] = 0;
    }
}

/// Deterministic symbol-to-symbol map, stored as a lookup table over the flat
/// input index. Converted to a 0/1 kernel when entering a joint factorization.
#[derive(Debug, Clone)]
pub struct DetMap {
    inputs: Vec<Axis>,
    output: Axis,
    table: Vec<usize>,
}

impl DetMap {
    pub fn new(inputs: Vec<Axis>, output: Axis, table: Vec<usize>) -> Result<Self> {
        let n_in: usize = inputs.iter().map(Axis::len).product::<usize>().max(1);
        if table.len() != n_in {
            return Err(CdError::Invalid(format!(
                "map table length {} does not match input cells {}",
                table.len(),
                n_in
            )));
        }
        if table.iter().any(|&t| t >= output.len()) {
            return Err(CdError::Invalid("map output index out of range".into()));
        }
        Ok(Self { inputs, output, table })
    }

    /// The identity feedback `Z = Y` (output alphabet copies the input's).
    pub fn identity(input: Axis, output_name: impl Into<String>) -> Self {
        let n = input.len();
        let output = input.renamed(output_name);
        Self { inputs: vec![input], output, table: (0..n).collect() }
    }

    /// Constant map onto a single-symbol alphabet: models absent feedback `Z = {}`.
    pub fn constant(inputs: Vec<Axis>, output_name: impl Into<String>) -> Self {
        let n_in: usize = inputs.iter().map(Axis::len).product::<usize>().max(1);
        let output = Axis::indexed(output_name, 1);
        Self { inputs, output, table: vec![0; n_in] }
    }

    pub fn inputs(&self) -> &[Axis] {
        &self.inputs
    }

    pub fn output(&self) -> &Axis {
        &self.output
    }

    pub fn map(&self, in_flat: usize) -> usize {
        self.table[in_flat]
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn to_kernel(&self) -> Kernel {
        let n_in = self.table.len();
        let n_out = self.output.len();
        let mut table = vec![0.0; n_in * n_out];
        for (i, &o) in self.table.iter().enumerate() {
            table[i * n_out + o] = 1.0;
        }
        Kernel::new_unchecked(self.inputs.clone(), vec![self.output.clone()], table)
    }
}
