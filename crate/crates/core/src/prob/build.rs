//! Assembly of factorized joint laws. Every scenario in this crate is a chain
//! of factors (marginal blocks, kernels, deterministic maps); the builder
//! multiplies them into one dense [`JointTable`], appending the new axes of
//! each factor on the right.

use ndarray::{ArrayD, Dimension, IxDyn};

use super::axis::{check_unique_names, Axis};
use super::dist::FiniteDist;
use super::joint::JointTable;
use super::kernel::{DetMap, Kernel};
use crate::error::{CdError, Result};

/// Refuse dense joints above this many cells.
pub const CELL_GUARDRAIL: usize = 100_000_000;

pub struct JointBuilder {
    axes: Vec<Axis>,
    values: ArrayD<f64>,
}

impl JointBuilder {
    pub fn from_table(t: &JointTable) -> Self {
        Self { axes: t.axes().to_vec(), values: t.values().clone() }
    }

    pub fn product_dist(&mut self, dist: &FiniteDist) -> Result<&mut Self> {
        self.apply_kernel(&Kernel::from_dist(dist))
    }

    /// Multiplies in `P(outputs | inputs)`; the kernel's input axes must match
    /// already-present axes by name and alphabet.
    pub fn apply_kernel(&mut self, k: &Kernel) -> Result<&mut Self> {
        let mut in_pos = Vec::with_capacity(k.inputs().len());
        for axis in k.inputs() {
            let pos = self
                .axes
                .iter()
                .position(|a| a.name() == axis.name())
                .ok_or_else(|| CdError::UnknownAxis(axis.name().to_string()))?;
            if self.axes[pos] != *axis {
                return Err(CdError::AlphabetMismatch(axis.name().to_string()));
            }
            in_pos.push(pos);
        }
        let mut new_axes = self.axes.clone();
        new_axes.extend(k.outputs().iter().cloned());
        check_unique_names(&new_axes)?;

        let out_dims: Vec<usize> = k.outputs().iter().map(Axis::len).collect();
        let n_out: usize = out_dims.iter().product();
        let new_shape: Vec<usize> = new_axes.iter().map(Axis::len).collect();
        let total: usize = new_shape.iter().product();
        if total > CELL_GUARDRAIL {
            return Err(CdError::TooLarge { cells: total, limit: CELL_GUARDRAIL });
        }
        let mut out = Vec::with_capacity(total);
        let in_strides: Vec<usize> = {
            // flat index of the kernel input tuple within its own mixed radix
            let dims: Vec<usize> = k.inputs().iter().map(Axis::len).collect();
            let mut s = vec![1usize; dims.len()];
            for i in (0..dims.len().saturating_sub(1)).rev() {
                s[i] = s[i + 1] * dims[i + 1];
            }
            s
        };
        for (idx, &v) in self.values.indexed_iter() {
            let idx = idx.slice();
            let mut in_flat = 0usize;
            for (j, &pos) in in_pos.iter().enumerate() {
                in_flat += idx[pos] * in_strides[j];
            }
            let row = &k.table()[in_flat * n_out..(in_flat + 1) * n_out];
            if v == 0.0 {
                out.extend(std::iter::repeat(0.0).take(n_out));
            } else {
                out.extend(row.iter().map(|p| v * p));
            }
        }
        self.values = ArrayD::from_shape_vec(IxDyn(&new_shape), out)
            .map_err(|e| CdError::Invalid(e.to_string()))?;
        self.axes = new_axes;
        Ok(self)
    }

    pub fn apply_map(&mut self, m: &DetMap) -> Result<&mut Self> {
        self.apply_kernel(&m.to_kernel())
    }

    pub fn finish(self) -> JointTable {
        JointTable::new_unchecked(self.axes, self.values)
    }
}

fn expect_axes(k: &Kernel, inputs: &[&str], outputs: &[&str]) -> Result<()> {
    let in_names: Vec<&str> = k.inputs().iter().map(Axis::name).collect();
    let out_names: Vec<&str> = k.outputs().iter().map(Axis::name).collect();
    if in_names != inputs || out_names != outputs {
        return Err(CdError::Invalid(format!(
            "kernel axes ({in_names:?} -> {out_names:?}) do not match expected ({inputs:?} -> {outputs:?})"
        )));
    }
    Ok(())
}

/// Point-to-point joint `P(S, S_T, X, Y, Z, V) =
/// P(S, S_T) P(X) P(Y | X, S) 1{Z = phi(Y)} P(V | X, S_T, Z)`.
pub fn build_joint_p2p(
    pss_t: &JointTable,
    px: &FiniteDist,
    chan: &Kernel,
    feedback: &DetMap,
    comp: &Kernel,
) -> Result<JointTable> {
    let base = canonical_state_table(pss_t, &["S", "S_T"])?;
    if px.axis().name() != "X" {
        return Err(CdError::Invalid("input distribution must be on axis `X`".into()));
    }
    expect_axes(chan, &["X", "S"], &["Y"])?;
    let fb_names: Vec<&str> = feedback.inputs().iter().map(Axis::name).collect();
    if fb_names != ["Y"] || feedback.output().name() != "Z" {
        return Err(CdError::Invalid("feedback map must be Y -> Z".into()));
    }
    expect_axes(comp, &["X", "S_T", "Z"], &["V"])?;

    let mut b = JointBuilder::from_table(&base);
    b.product_dist(px)?;
    b.apply_kernel(chan)?;
    b.apply_map(feedback)?;
    b.apply_kernel(comp)?;
    Ok(b.finish())
}

/// Broadcast joint `P(S, S_T, U, X, Y1, Y2, Z, V1, V2) =
/// P(S, S_T) P(U, X) P(Y1, Y2 | X, S) 1{Z = psi(Y1, Y2)} P(V1, V2 | U, X, S_T, Z)`.
pub fn build_joint_bc(
    pss_t: &JointTable,
    p_ux: &JointTable,
    chan: &Kernel,
    feedback: &DetMap,
    comp: &Kernel,
) -> Result<JointTable> {
    let base = canonical_state_table(pss_t, &["S", "S_T"])?;
    let ux = canonical_state_table(p_ux, &["U", "X"])?;
    expect_axes(chan, &["X", "S"], &["Y1", "Y2"])?;
    let fb_names: Vec<&str> = feedback.inputs().iter().map(Axis::name).collect();
    if fb_names != ["Y1", "Y2"] || feedback.output().name() != "Z" {
        return Err(CdError::Invalid("feedback map must be (Y1, Y2) -> Z".into()));
    }
    expect_axes(comp, &["U", "X", "S_T", "Z"], &["V1", "V2"])?;

    let mut b = JointBuilder::from_table(&base);
    let ux_factor = Kernel::from_joint_factor(
        ux.axes().to_vec(),
        ux.values().as_slice().expect("standard layout").to_vec(),
    )?;
    b.apply_kernel(&ux_factor)?;
    b.apply_kernel(chan)?;
    b.apply_map(feedback)?;
    b.apply_kernel(comp)?;
    Ok(b.finish())
}

/// Multiple-access joint over `(S, S1, S2, U, W1, X1, W2, X2, Y, Z1, Z2, V1, V2)`:
/// `P(S, S1, S2) P(U) P(W1, X1 | U) P(W2, X2 | U) P(Y | X1, X2, S)
///  1{Z1 = phi1(Y)} 1{Z2 = phi2(Y)} P(V1 | U, W1, W2, X1, S1, Z1) P(V2 | U, W1, W2, X2, S2, Z2)`.
pub fn build_joint_mac(
    psss: &JointTable,
    p_u: &FiniteDist,
    enc1: &Kernel,
    enc2: &Kernel,
    chan: &Kernel,
    phi1: &DetMap,
    phi2: &DetMap,
    comp1: &Kernel,
    comp2: &Kernel,
) -> Result<JointTable> {
    let base = canonical_state_table(psss, &["S", "S1", "S2"])?;
    if p_u.axis().name() != "U" {
        return Err(CdError::Invalid("common layer distribution must be on axis `U`".into()));
    }
    expect_axes(enc1, &["U"], &["W1", "X1"])?;
    expect_axes(enc2, &["U"], &["W2", "X2"])?;
    expect_axes(chan, &["X1", "X2", "S"], &["Y"])?;
    for (phi, z) in [(phi1, "Z1"), (phi2, "Z2")] {
        let names: Vec<&str> = phi.inputs().iter().map(Axis::name).collect();
        if names != ["Y"] || phi.output().name() != z {
            return Err(CdError::Invalid(format!("feedback map must be Y -> {z}")));
        }
    }
    expect_axes(comp1, &["U", "W1", "W2", "X1", "S1", "Z1"], &["V1"])?;
    expect_axes(comp2, &["U", "W1", "W2", "X2", "S2", "Z2"], &["V2"])?;

    // Cheap pre-check before any allocation.
    let cells: usize = [
        base.cells(),
        p_u.len(),
        enc1.n_output_cells(),
        enc2.n_output_cells(),
        chan.n_output_cells(),
        phi1.output().len(),
        phi2.output().len(),
        comp1.n_output_cells(),
        comp2.n_output_cells(),
    ]
    .iter()
    .product();
    if cells > CELL_GUARDRAIL {
        return Err(CdError::TooLarge { cells, limit: CELL_GUARDRAIL });
    }

    let mut b = JointBuilder::from_table(&base);
    b.product_dist(p_u)?;
    b.apply_kernel(enc1)?;
    b.apply_kernel(enc2)?;
    b.apply_kernel(chan)?;
    b.apply_map(phi1)?;
    b.apply_map(phi2)?;
    b.apply_kernel(comp1)?;
    b.apply_kernel(comp2)?;
    Ok(b.finish())
}

/// Accepts the state block in any axis order and permutes it to `expected`.
fn canonical_state_table(t: &JointTable, expected: &[&str]) -> Result<JointTable> {
    let names: Vec<&str> = t.axes().iter().map(Axis::name).collect();
    if names == expected {
        return Ok(t.clone());
    }
    t.permute(expected)
}
