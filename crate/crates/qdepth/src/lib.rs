//! Depth-based multivariate two-sample homogeneity testing.
//!
//! The crate computes five data-depth functions (euclidean, mahalanobis,
//! halfspace, projection, spatial), the Q quality-index statistics with
//! their max/min variants and asymptotic p-values, decompositions of
//! Q - 1/2 under a Gaussian reference model, a seeded Monte Carlo harness
//! that verifies the claimed convergence rates, scale curves, and a fuzzy
//! c-means cluster-then-test pipeline. The `qdepth` binary wraps it all.

pub mod cli;
pub mod cluster;
pub mod decomposition;
pub mod depth;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod numerics;
pub mod qstat;
pub mod ratestudy;

pub use depth::{compute_depth, DataSet, DepthKind, DepthSpec, DepthVector};
pub use error::{Error, Result};
pub use qstat::{q_pair, run_test, QPair, TestReport};
