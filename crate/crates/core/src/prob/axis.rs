use crate::error::{CdError, Result};

/// A named finite alphabet. Two axes are compatible when both name and labels agree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Axis {
    name: String,
    labels: Vec<String>,
}

impl Axis {
    pub fn new(name: impl Into<String>, labels: Vec<String>) -> Result<Self> {
        let name = name.into();
        if labels.is_empty() {
            return Err(CdError::Invalid(format!("axis `{name}` has empty alphabet")));
        }
        for i in 0..labels.len() {
            for j in (i + 1)..labels.len() {
                if labels[i] == labels[j] {
                    return Err(CdError::Invalid(format!(
                        "axis `{name}` repeats label `{}`",
                        labels[i]
                    )));
                }
            }
        }
        Ok(Self { name, labels })
    }

    /// Alphabet `{0, 1, ..., n-1}` with decimal labels.
    pub fn indexed(name: impl Into<String>, n: usize) -> Self {
        let labels = (0..n).map(|i| i.to_string()).collect();
        Self { name: name.into(), labels }
    }

    /// Binary alphabet `{0, 1}`.
    pub fn binary(name: impl Into<String>) -> Self {
        Self::indexed(name, 2)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label_index(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| CdError::Invalid(format!("axis `{}` has no label `{label}`", self.name)))
    }

    pub fn renamed(&self, name: impl Into<String>) -> Self {
        Self { name: name.into(), labels: self.labels.clone() }
    }
}

/// Resolves `names` to positions within `axes`, requiring each name to exist.
pub fn positions(axes: &[Axis], names: &[&str]) -> Result<Vec<usize>> {
    names
        .iter()
        .map(|n| {
            axes.iter()
                .position(|a| a.name() == *n)
                .ok_or_else(|| CdError::UnknownAxis((*n).to_string()))
        })
        .collect()
}

pub fn check_unique_names(axes: &[Axis]) -> Result<()> {
    for i in 0..axes.len() {
        for j in (i + 1)..axes.len() {
            if axes[i].name() == axes[j].name() {
                return Err(CdError::DuplicateAxis(axes[i].name().to_string()));
            }
        }
    }
    Ok(())
}
