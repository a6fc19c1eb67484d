use ndarray::{ArrayD, Axis as NdAxis, IxDyn};

use super::axis::{check_unique_names, positions, Axis};
use super::info::entropy_pmf;
use super::kernel::Kernel;
use super::norm::normalize_pmf;
use crate::error::{CdError, Result};

/// Dense joint probability table over labeled finite axes.
///
/// The table is the universal carrier for every discrete computation in this
/// crate: factorized channel laws are assembled into one `JointTable`, and all
/// information quantities are read off it by marginalization.
#[derive(Debug, Clone)]
pub struct JointTable {
    axes: Vec<Axis>,
    values: ArrayD<f64>,
}

impl JointTable {
    /// Validates shape, nonnegativity and unit mass (renormalizing drift below 1e-6).
    pub fn new(axes: Vec<Axis>, mut values: ArrayD<f64>) -> Result<Self> {
        check_unique_names(&axes)?;
        let shape: Vec<usize> = axes.iter().map(Axis::len).collect();
        if values.shape() != shape.as_slice() {
            return Err(CdError::Invalid(format!(
                "value shape {:?} does not match axes {:?}",
                values.shape(),
                shape
            )));
        }
        normalize_pmf(values.as_slice_mut().expect("standard layout"))?;
        Ok(Self { axes, values })
    }

    pub(crate) fn new_unchecked(axes: Vec<Axis>, values: ArrayD<f64>) -> Self {
        Self { axes, values }
    }

    pub fn from_pmf(axis: Axis, pmf: Vec<f64>) -> Result<Self> {
        let values = ArrayD::from_shape_vec(IxDyn(&[pmf.len()]), pmf)
            .map_err(|e| CdError::Invalid(e.to_string()))?;
        Self::new(vec![axis], values)
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn values(&self) -> &ArrayD<f64> {
        &self.values
    }

    pub fn axis(&self, name: &str) -> Result<&Axis> {
        let idx = self.axis_index(name)?;
        Ok(&self.axes[idx])
    }

    pub fn axis_index(&self, name: &str) -> Result<usize> {
        self.axes
            .iter()
            .position(|a| a.name() == name)
            .ok_or_else(|| CdError::UnknownAxis(name.to_string()))
    }

    pub fn cells(&self) -> usize {
        self.values.len()
    }

    pub fn total_mass(&self) -> f64 {
        self.values.sum()
    }

    /// Sums out every axis not listed in `keep`. The kept axes stay in their
    /// original order, so keeping all axes is the identity.
    pub fn marginalize(&self, keep: &[&str]) -> Result<JointTable> {
        if keep.is_empty() {
            return Err(CdError::Domain("marginalize requires a nonempty axis set".into()));
        }
        let kept = positions(&self.axes, keep)?;
        let mut keep_mask = vec![false; self.axes.len()];
        for &k in &kept {
            if keep_mask[k] {
                return Err(CdError::DuplicateAxis(self.axes[k].name().to_string()));
            }
            keep_mask[k] = true;
        }
        let mut values = self.values.clone();
        let mut axes = self.axes.clone();
        for i in (0..axes.len()).rev() {
            if !keep_mask[i] {
                values = values.sum_axis(NdAxis(i));
                axes.remove(i);
            }
        }
        Ok(JointTable { axes, values })
    }

    /// Reorders axes to `order` (which must list every axis exactly once).
    pub fn permute(&self, order: &[&str]) -> Result<JointTable> {
        if order.len() != self.axes.len() {
            return Err(CdError::Invalid("permutation must list every axis".into()));
        }
        let perm = positions(&self.axes, order)?;
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            if seen[p] {
                return Err(CdError::DuplicateAxis(self.axes[p].name().to_string()));
            }
            seen[p] = true;
        }
        let axes: Vec<Axis> = perm.iter().map(|&p| self.axes[p].clone()).collect();
        let values = self.values.clone().permuted_axes(IxDyn(&perm));
        let values = values.as_standard_layout().to_owned();
        Ok(JointTable { axes, values })
    }

    /// Joint entropy of the listed axes in bits.
    pub fn entropy_of(&self, axes: &[&str]) -> Result<f64> {
        let marg = self.marginalize(axes)?;
        Ok(entropy_pmf(marg.values.as_slice().expect("standard layout")))
    }

    /// Conditional mutual information `I(A; B | C)` in bits, with `I(A; B | {}) = I(A; B)`.
    ///
    /// Computed as `H(A,C) + H(B,C) - H(A,B,C) - H(C)`; all four entropies come
    /// from marginals of the same table, so absolute continuity holds by
    /// construction. Tiny negative values (within numerical noise) are returned
    /// as-is rather than clamped.
    pub fn cond_mutual_information(&self, a: &[&str], b: &[&str], c: &[&str]) -> Result<f64> {
        self.check_disjoint(&[a, b, c])?;
        if a.is_empty() || b.is_empty() {
            return Ok(0.0);
        }
        let ac = union(a, c);
        let bc = union(b, c);
        let ab = union(a, b);
        let abc = union(&refs(&ab), c);
        let h_ac = self.entropy_of(&refs(&ac))?;
        let h_bc = self.entropy_of(&refs(&bc))?;
        let h_abc = self.entropy_of(&refs(&abc))?;
        let h_c = if c.is_empty() { 0.0 } else { self.entropy_of(c)? };
        Ok(h_ac + h_bc - h_abc - h_c)
    }

    pub fn mutual_information(&self, a: &[&str], b: &[&str]) -> Result<f64> {
        self.cond_mutual_information(a, b, &[])
    }

    /// Extracts the conditional law `P(outputs | given)` as a kernel, together
    /// with the probability mass of each conditioning cell. Zero-mass cells get
    /// a uniform row.
    pub fn conditional(&self, outputs: &[&str], given: &[&str]) -> Result<(Kernel, Vec<f64>)> {
        self.check_disjoint(&[outputs, given])?;
        let marg = self.marginalize(&union_refs(given, outputs))?;
        let order: Vec<&str> = given.iter().chain(outputs.iter()).copied().collect();
        let arranged = marg.permute(&order)?;
        let in_axes: Vec<Axis> = arranged.axes[..given.len()].to_vec();
        let out_axes: Vec<Axis> = arranged.axes[given.len()..].to_vec();
        let n_in: usize = in_axes.iter().map(Axis::len).product::<usize>().max(1);
        let n_out: usize = out_axes.iter().map(Axis::len).product();
        let flat = arranged.values.as_slice().expect("standard layout");
        let mut table = Vec::with_capacity(flat.len());
        let mut masses = Vec::with_capacity(n_in);
        for row in 0..n_in {
            let slice = &flat[row * n_out..(row + 1) * n_out];
            let mass: f64 = slice.iter().sum();
            masses.push(mass);
            if mass > 0.0 {
                table.extend(slice.iter().map(|v| v / mass));
            } else {
                table.extend(std::iter::repeat(1.0 / n_out as f64).take(n_out));
            }
        }
        let kernel = Kernel::new_unchecked(in_axes, out_axes, table);
        Ok((kernel, masses))
    }

    fn check_disjoint(&self, groups: &[&[&str]]) -> Result<()> {
        let mut seen: Vec<&str> = Vec::new();
        for g in groups {
            for name in *g {
                self.axis_index(name)?;
                if seen.contains(name) {
                    return Err(CdError::OverlappingAxes((*name).to_string()));
                }
                seen.push(name);
            }
        }
        Ok(())
    }
}

fn union(a: &[&str], b: &[&str]) -> Vec<String> {
    let mut out: Vec<String> = a.iter().map(|s| s.to_string()).collect();
    for s in b {
        if !out.iter().any(|x| x == s) {
            out.push(s.to_string());
        }
    }
    out
}

fn union_refs<'a>(a: &[&'a str], b: &[&'a str]) -> Vec<&'a str> {
    let mut out: Vec<&str> = a.to_vec();
    for s in b {
        if !out.contains(s) {
            out.push(s);
        }
    }
    out
}

fn refs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

/// Free-function form of [`JointTable::cond_mutual_information`].
pub fn cond_mutual_information(
    joint: &JointTable,
    a: &[&str],
    b: &[&str],
    c: &[&str],
) -> Result<f64> {
    joint.cond_mutual_information(a, b, c)
}

/// Free-function form of [`JointTable::marginalize`].
pub fn marginalize(joint: &JointTable, keep: &[&str]) -> Result<JointTable> {
    joint.marginalize(keep)
}
