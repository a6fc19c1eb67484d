//! Versioned JSON scenario schema. Tables are row-major with explicit axis
//! labels so files are bit-exact, diff-able and language-neutral.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use cdtrade_core::error::{CdError, Result};
use cdtrade_core::prob::{Axis, DetMap, DistortionFn, FiniteDist, JointTable, Kernel};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ScenarioSpec {
    pub version: u32,
    #[serde(flatten)]
    pub scenario: Scenario,
    #[serde(default)]
    pub solver: SolverSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Scenario {
    /// Quadratic-Gaussian point-to-point curves, one per side-information
    /// noise level.
    QgP2p { p: f64, q: f64, n: f64, n_t_values: Vec<f64>, d_grid: Grid },
    /// Quadratic-Gaussian degraded broadcast surfaces at a fixed weak-user
    /// distortion.
    QgBc {
        p: f64,
        q: f64,
        n1: f64,
        n2: f64,
        n_t: f64,
        d2: f64,
        alpha_grid: Grid,
        d1sq_grid: Grid,
    },
    /// Quadratic-Gaussian multiple-access regions at fixed description noises.
    QgMac {
        p1: f64,
        p2: f64,
        q: f64,
        n: f64,
        n_t: f64,
        d1_sq: f64,
        d2_sq: f64,
        alpha1_grid: Grid,
        alpha2_grid: Grid,
    },
    /// Binary degraded broadcast example with and without codeword disclosure.
    BinaryBc { p1: f64, p2: f64, alpha_grid: Grid },
    /// Self-contained double-usage fixture.
    DoubleUsage {
        #[serde(default = "default_x2_grid")]
        x2_grid: usize,
    },
    /// Pure sensing: best deterministic transmit symbol.
    Radar { prior: DistSpec, echo: KernelSpec, distortion: DistortionSpec },
    /// Discrete point-to-point capacity-distortion curve.
    P2p {
        pss_t: TableSpec,
        chan: KernelSpec,
        feedback: FeedbackSpec,
        distortion: DistortionSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        v_size: Option<usize>,
        d_grid: Grid,
    },
    /// Causal variant via Shannon strategies.
    P2pCausal {
        pss_t: TableSpec,
        chan: KernelSpec,
        feedback: FeedbackSpec,
        distortion: DistortionSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        u_size: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        v_size: Option<usize>,
        d_grid: Grid,
    },
    /// Discrete broadcast: sampled variable family, all three region systems.
    Bc {
        pss_t: TableSpec,
        chan: KernelSpec,
        feedback: FeedbackSpec,
        d1: DistortionSpec,
        d2: DistortionSpec,
        #[serde(default = "default_layer")]
        u_size: usize,
        #[serde(default = "default_layer")]
        v1_size: usize,
        #[serde(default = "default_layer")]
        v2_size: usize,
        #[serde(default = "default_samples")]
        samples: usize,
    },
    /// Discrete multiple access: sampled variable family.
    Mac {
        psss: TableSpec,
        chan: KernelSpec,
        phi1: FeedbackSpec,
        phi2: FeedbackSpec,
        distortion: DistortionSpec,
        #[serde(default = "default_layer")]
        u_size: usize,
        #[serde(default = "default_layer")]
        w_size: usize,
        #[serde(default = "default_layer")]
        v_size: usize,
        #[serde(default = "default_samples")]
        samples: usize,
    },
    /// Monostatic downlink: rate versus echo-estimation budget.
    IsacMd {
        prior: DistSpec,
        echo: KernelSpec,
        downlink: KernelSpec,
        distortion: DistortionSpec,
        d_grid: Grid,
    },
    /// Monostatic uplink: uplink rate versus sensing budget.
    IsacMu {
        prior: DistSpec,
        chan: KernelSpec,
        distortion: DistortionSpec,
        d_grid: Grid,
    },
}

fn default_x2_grid() -> usize {
    256
}

fn default_layer() -> usize {
    2
}

fn default_samples() -> usize {
    200
}

impl Scenario {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Scenario::QgP2p { .. } => "qg-p2p",
            Scenario::QgBc { .. } => "qg-bc",
            Scenario::QgMac { .. } => "qg-mac",
            Scenario::BinaryBc { .. } => "binary-bc",
            Scenario::DoubleUsage { .. } => "double-usage",
            Scenario::Radar { .. } => "radar",
            Scenario::P2p { .. } => "p2p",
            Scenario::P2pCausal { .. } => "p2p-causal",
            Scenario::Bc { .. } => "bc",
            Scenario::Mac { .. } => "mac",
            Scenario::IsacMd { .. } => "isac-md",
            Scenario::IsacMu { .. } => "isac-mu",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct SolverSpec {
    pub seed: u64,
    pub starts: usize,
    pub v_size: Option<usize>,
}

impl Default for SolverSpec {
    fn default() -> Self {
        Self { seed: 0, starts: 20, v_size: None }
    }
}

impl SolverSpec {
    pub fn to_options(&self) -> cdtrade_core::opt::SolverOptions {
        cdtrade_core::opt::SolverOptions {
            seed: self.seed,
            starts: self.starts,
            v_size: self.v_size,
            ..Default::default()
        }
    }
}

/// Either an explicit list or an inclusive linear range.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Grid {
    Explicit(Vec<f64>),
    Linspace { start: f64, stop: f64, count: usize },
}

impl Grid {
    pub fn values(&self) -> Result<Vec<f64>> {
        match self {
            Grid::Explicit(v) => {
                if v.is_empty() {
                    return Err(CdError::Domain("empty grid".into()));
                }
                Ok(v.clone())
            }
            Grid::Linspace { start, stop, count } => {
                if *count == 0 {
                    return Err(CdError::Domain("grid count must be positive".into()));
                }
                if *count == 1 {
                    return Ok(vec![*start]);
                }
                Ok((0..*count)
                    .map(|i| start + (stop - start) * i as f64 / (*count as f64 - 1.0))
                    .collect())
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AxisSpec {
    pub name: String,
    pub labels: Vec<String>,
}

impl AxisSpec {
    pub fn to_axis(&self) -> Result<Axis> {
        Axis::new(self.name.clone(), self.labels.clone())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TableSpec {
    pub axes: Vec<AxisSpec>,
    /// Row-major over the axes in order.
    pub values: Vec<f64>,
}

impl TableSpec {
    pub fn to_joint(&self) -> Result<JointTable> {
        let axes: Vec<Axis> = self.axes.iter().map(AxisSpec::to_axis).collect::<Result<_>>()?;
        let shape: Vec<usize> = axes.iter().map(Axis::len).collect();
        let arr = ndarray_from(self.values.clone(), &shape)?;
        JointTable::new(axes, arr)
    }
}

fn ndarray_from(values: Vec<f64>, shape: &[usize]) -> Result<ndarray::ArrayD<f64>> {
    ndarray::ArrayD::from_shape_vec(ndarray::IxDyn(shape), values)
        .map_err(|e| CdError::Invalid(e.to_string()))
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct KernelSpec {
    pub inputs: Vec<AxisSpec>,
    pub outputs: Vec<AxisSpec>,
    /// Row-major: inputs fastest-last, then outputs.
    pub values: Vec<f64>,
}

impl KernelSpec {
    pub fn to_kernel(&self) -> Result<Kernel> {
        let inputs: Vec<Axis> = self.inputs.iter().map(AxisSpec::to_axis).collect::<Result<_>>()?;
        let outputs: Vec<Axis> =
            self.outputs.iter().map(AxisSpec::to_axis).collect::<Result<_>>()?;
        Kernel::new(inputs, outputs, self.values.clone())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DistSpec {
    pub axis: AxisSpec,
    pub pmf: Vec<f64>,
}

impl DistSpec {
    pub fn to_dist(&self) -> Result<FiniteDist> {
        FiniteDist::new(self.axis.to_axis()?, self.pmf.clone())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DistortionSpec {
    pub states: Vec<String>,
    pub recons: Vec<String>,
    pub values: Vec<f64>,
}

impl DistortionSpec {
    pub fn to_distortion(&self) -> Result<DistortionFn> {
        DistortionFn::new(self.states.clone(), self.recons.clone(), self.values.clone())
    }
}

/// Deterministic feedback: absent, full, or an explicit symbol table.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum FeedbackSpec {
    Named(String),
    Table { z_labels: Vec<String>, table: Vec<usize> },
}

impl FeedbackSpec {
    /// Resolves against the feedback input axes and the output axis name.
    pub fn to_map(&self, inputs: Vec<Axis>, z_name: &str) -> Result<DetMap> {
        match self {
            FeedbackSpec::Named(s) if s == "none" => Ok(DetMap::constant(inputs, z_name)),
            FeedbackSpec::Named(s) if s == "identity" => {
                if inputs.len() == 1 {
                    Ok(DetMap::identity(inputs.into_iter().next().unwrap(), z_name))
                } else {
                    // Full disclosure of a product observation.
                    let n: usize = inputs.iter().map(Axis::len).product();
                    let z = Axis::indexed(z_name, n);
                    DetMap::new(inputs, z, (0..n).collect())
                }
            }
            FeedbackSpec::Named(s) => {
                Err(CdError::Invalid(format!("unknown feedback `{s}`; use none/identity or a table")))
            }
            FeedbackSpec::Table { z_labels, table } => {
                let z = Axis::new(z_name, z_labels.clone())?;
                DetMap::new(inputs, z, table.clone())
            }
        }
    }
}

/// Applies `key=value` overrides onto the raw JSON document; the value text is
/// parsed as JSON when possible and kept as a string otherwise.
pub fn apply_overrides(doc: &mut Value, overrides: &[String]) -> Result<()> {
    for item in overrides {
        let Some((path, raw)) = item.split_once('=') else {
            return Err(CdError::Invalid(format!("override `{item}` is not key=value")));
        };
        let parsed: Value =
            serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        let mut cursor = &mut *doc;
        let parts: Vec<&str> = path.split('.').collect();
        for (i, part) in parts.iter().enumerate() {
            let last = i + 1 == parts.len();
            if let Ok(idx) = part.parse::<usize>() {
                let arr = cursor
                    .as_array_mut()
                    .ok_or_else(|| CdError::Invalid(format!("`{path}`: not an array at `{part}`")))?;
                if idx >= arr.len() {
                    return Err(CdError::Invalid(format!("`{path}`: index {idx} out of range")));
                }
                if last {
                    arr[idx] = parsed.clone();
                } else {
                    cursor = &mut arr[idx];
                }
            } else {
                let obj = cursor
                    .as_object_mut()
                    .ok_or_else(|| CdError::Invalid(format!("`{path}`: not an object at `{part}`")))?;
                if last {
                    obj.insert(part.to_string(), parsed.clone());
                } else {
                    cursor = obj
                        .get_mut(*part)
                        .ok_or_else(|| CdError::Invalid(format!("`{path}`: missing key `{part}`")))?;
                }
            }
        }
    }
    Ok(())
}

pub fn parse_spec(text: &str, overrides: &[String]) -> Result<ScenarioSpec> {
    let mut doc: Value =
        serde_json::from_str(text).map_err(|e| CdError::Invalid(format!("spec parse: {e}")))?;
    apply_overrides(&mut doc, overrides)?;
    let spec: ScenarioSpec = serde_json::from_value(doc)
        .map_err(|e| CdError::Invalid(format!("spec schema: {e}")))?;
    if spec.version != SCHEMA_VERSION {
        return Err(CdError::Invalid(format!(
            "unsupported spec version {} (expected {SCHEMA_VERSION})",
            spec.version
        )));
    }
    Ok(spec)
}

/// Builtin figure specs shipped as data files.
pub fn builtin(name: &str) -> Option<&'static str> {
    match name {
        "fig2" => Some(include_str!("../specs/fig2.json")),
        "fig4" => Some(include_str!("../specs/fig4.json")),
        "fig5" => Some(include_str!("../specs/fig5.json")),
        "fig6" => Some(include_str!("../specs/fig6.json")),
        "double-usage" => Some(include_str!("../specs/double-usage.json")),
        _ => None,
    }
}

pub fn builtin_names() -> &'static [&'static str] {
    &["fig2", "fig4", "fig5", "fig6", "double-usage"]
}
