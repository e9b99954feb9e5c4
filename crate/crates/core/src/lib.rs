//! Numerical workbench for mushroom billiard pairs: planar domains whose
//! closed geodesics match length for length, yet whose Dirichlet Laplacians
//! differ.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod billiards;
pub mod cli;
pub mod export;
pub mod geometry;
pub mod perturbation;
pub mod quad;
pub mod rng;
pub mod spectral;
