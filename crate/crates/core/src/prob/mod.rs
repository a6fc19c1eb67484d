//! Finite-alphabet probability machinery: labeled joint tables,
//! marginalization and conditioning, entropies and conditional mutual
//! information, and constructors for the factorized joint laws of the
//! point-to-point, broadcast and multiple-access scenarios.
//!
//! All types are immutable after construction and safe to share across
//! threads; all operations are pure.

mod axis;
mod build;
mod dist;
mod distortion;
mod info;
mod joint;
mod kernel;
mod norm;

pub use axis::{positions, Axis};
pub use build::{build_joint_bc, build_joint_mac, build_joint_p2p, JointBuilder, CELL_GUARDRAIL};
pub use dist::FiniteDist;
pub use distortion::DistortionFn;
pub use info::{
    binary_entropy, binary_entropy_inverse, bits_to_nats, entropy, entropy_pmf, nats_to_bits,
    star_convolve, LN_2,
};
pub use joint::{cond_mutual_information, marginalize, JointTable};
pub use kernel::{DetMap, Kernel};
pub use norm::{MASS_TOL, RENORM_TOL};
