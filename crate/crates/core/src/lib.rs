//! Capacity–distortion trade-offs for joint message transmission and
//! channel-state estimation over state-dependent memoryless channels.
//!
//! The crate provides:
//!
//! - labeled finite probability tables with entropy and conditional mutual
//!   information ([`prob`]),
//! - Bayes estimators and distortion evaluation ([`estimation`]),
//! - capacity–distortion solvers for point-to-point channels with strictly
//!   causal or causal transmitter state information and deterministic
//!   feedback ([`p2p`]),
//! - achievable-region evaluators for degraded broadcast and multiple-access
//!   channels ([`bc`], [`mac`]),
//! - closed-form quadratic-Gaussian results evaluated through covariance
//!   algebra ([`gaussian`]),
//! - 2-D region geometry: hulls, concave envelopes, Pareto fronts
//!   ([`geometry`]).
//!
//! All information quantities are reported in bits; convert with
//! [`prob::bits_to_nats`] when comparing against natural-log expressions.

pub mod bc;
pub mod error;
pub mod estimation;
pub mod gaussian;
pub mod geometry;
pub mod mac;
pub mod opt;
pub mod p2p;
pub mod prob;
pub mod sampling;

pub use error::{CdError, Result};
