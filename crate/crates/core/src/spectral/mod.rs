//! Dirichlet eigenvalues by the method of fundamental solutions, boundary
//! traces of eigenfunctions, and a finite-difference cross-check.

mod basis;
mod eigen;
mod fd;
mod strips;
mod trace;

pub use basis::{y0, y1, BasisOptions, HelmholtzBasis};
pub use eigen::{
    eigen_table_csv, find_eigs, ground_state, indicator, scan_csv, EigenPair, EigenSearch,
    IndicatorEval, Solver, SpectralOptions, Warning,
};
pub use fd::{fd_oracle, FdOptions, FdResult};
pub use strips::{strip_rule, StripDirection};
pub use trace::{normal_trace, BoundaryTrace, TraceSample, MIN_TRACE_NODES};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("ill-conditioned collocation system: {0}")]
    IllConditioned(String),
    #[error("point ({x}, {y}) lies outside the domain")]
    OutsideDomain { x: f64, y: f64 },
    #[error("grid too coarse: {nodes} interior nodes (need at least {min})")]
    GridTooCoarse { nodes: usize, min: usize },
    #[error("no eigenvalue found in k range ({k_min}, {k_max})")]
    NotFound { k_min: f64, k_max: f64 },
}
