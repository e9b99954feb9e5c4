//! First variation of the ground-state eigenvalue under bottom bumps,
//! the evenness test for the squared normal derivative, the pair-rate
//! certificate and a random sampling of admissible bumps.

mod certify;
mod fdcheck;
mod hadamard;
mod scan;

pub use certify::{
    certify, certify_with_ground, Certificate, CertifyOptions, EigenSummary, LengthSummary,
    Outcome, Verdict,
};
pub use fdcheck::{fd_rate_check, FdRateReport};
pub use hadamard::{
    evenness_defect, hadamard_rate, hadamard_rate_normal, pair_rates, pair_rates_with_error,
    squared_normal_derivative, EvennessEstimate, RatePair, MIN_EVENNESS_SAMPLES, PANEL_NODES,
};
pub use scan::{genericity_scan, GenericitySample, GenericityScan, ScanRanges};

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::billiards::BilliardError;
use crate::geometry::{BumpSpec, DomainSpec, GeometryError, Region};
use crate::spectral::{
    find_eigs, normal_trace, BoundaryTrace, EigenPair, Solver, SpectralError, SpectralOptions,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PerturbationError {
    #[error("perturbation support ({lo}, {hi}) is not admissible: {reason}")]
    SupportViolation { lo: f64, hi: f64, reason: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Billiard(#[from] BilliardError),
}

/// Profile `f(x) = Σ bump.height(x) <= 0` on the bottom and its amplitude.
/// The bottom point `(x, 0)` moves to `(x, ε f(x))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSpec {
    pub bumps: Vec<BumpSpec>,
    pub epsilon: f64,
}

impl PerturbationSpec {
    pub fn new(bumps: Vec<BumpSpec>, epsilon: f64) -> Self {
        Self { bumps, epsilon }
    }

    /// The bumps rescaled to unit maximal depth, so that `ε` is the depth
    /// of the deepest perturbed bump.
    pub fn unit_depth(bumps: &[BumpSpec], epsilon: f64) -> Self {
        let d = bumps.iter().map(|b| b.depth).fold(0.0, f64::max);
        let bumps = if d > 0.0 {
            bumps.iter().map(|b| b.scaled(1.0 / d)).collect()
        } else {
            vec![]
        };
        Self { bumps, epsilon }
    }

    /// `f(x)`.
    pub fn profile(&self, x: f64) -> f64 {
        self.bumps.iter().map(|b| b.height(x)).sum()
    }

    /// The dual profile `f(-x)`.
    pub fn mirrored(&self) -> Self {
        let mut bumps: Vec<BumpSpec> = self.bumps.iter().map(|b| b.mirrored()).collect();
        bumps.sort_by(|x, y| x.center.total_cmp(&y.center));
        Self {
            bumps,
            epsilon: self.epsilon,
        }
    }

    /// Focal bumps of the perturbed domain at amplitude `eps`.
    pub fn bumps_at(&self, eps: f64) -> Vec<BumpSpec> {
        self.bumps.iter().map(|b| b.scaled(eps)).collect()
    }

    /// Even profile: the mirrored bump list equals the original.
    pub fn is_self_dual(&self) -> bool {
        let m = self.mirrored();
        let mut own = self.bumps.clone();
        own.sort_by(|x, y| x.center.total_cmp(&y.center));
        own.len() == m.bumps.len()
            && own.iter().zip(&m.bumps).all(|(p, q)| {
                (p.center - q.center).abs() <= 1e-14
                    && p.half_width == q.half_width
                    && p.depth == q.depth
            })
    }

    /// Every bump support lies in the focal zone of `domain` with its
    /// clearance, away from the outer bumps.
    pub fn check_support(&self, domain: &DomainSpec) -> Result<(), PerturbationError> {
        for b in &self.bumps {
            let (lo, hi) = b.support();
            if !b.is_valid() {
                return Err(PerturbationError::SupportViolation {
                    lo,
                    hi,
                    reason: "half-width and depth must be positive".into(),
                });
            }
            if !domain.focal_interval_ok(lo, hi) {
                return Err(PerturbationError::SupportViolation {
                    lo,
                    hi,
                    reason: format!(
                        "outside the focal zone (-{c}, {c}) with clearance {}",
                        domain.clearance(),
                        c = domain.ellipse_spec().c()
                    ),
                });
            }
        }
        Ok(())
    }
}

/// The interval `J = (x1, x2)` with `0 < x1 < x2` and its dual `(-x2, -x1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentPair {
    pub x1: f64,
    pub x2: f64,
}

impl SegmentPair {
    pub fn new(x1: f64, x2: f64) -> Result<Self, PerturbationError> {
        if x1 > 0.0 && x2 > x1 && x2.is_finite() {
            Ok(Self { x1, x2 })
        } else {
            Err(PerturbationError::InvalidInput(format!(
                "need 0 < x1 < x2, got ({x1}, {x2})"
            )))
        }
    }

    /// `J = (0.1 c, 0.9 c)`.
    pub fn default_for(domain: &DomainSpec) -> Self {
        let c = domain.ellipse_spec().c();
        Self {
            x1: 0.1 * c,
            x2: 0.9 * c,
        }
    }

    pub fn dual(&self) -> (f64, f64) {
        (-self.x2, -self.x1)
    }

    pub fn check(&self, domain: &DomainSpec) -> Result<(), PerturbationError> {
        if domain.focal_interval_ok(self.x1, self.x2)
            && domain.focal_interval_ok(-self.x2, -self.x1)
        {
            Ok(())
        } else {
            Err(PerturbationError::SupportViolation {
                lo: self.x1,
                hi: self.x2,
                reason: "segment pair leaves the flat focal zone".into(),
            })
        }
    }
}

/// `k` range and scan density for locating a ground state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchWindow {
    pub k_min: f64,
    pub k_max: f64,
    pub n_scan: usize,
}

/// Half-width in `k` of the refinement window around a known minimum.
pub const NEAR_WINDOW: f64 = 1e-3;

/// A second, coarser discretization used to estimate errors of derived
/// quantities: sources 15% sparser and more strongly graded.
pub fn coarse_options(opts: &SpectralOptions) -> SpectralOptions {
    let mut o = *opts;
    o.basis.n_src = (opts.basis.n_src as f64 * 0.85).round() as usize;
    o.basis.grading = opts.basis.grading / 0.85;
    o.basis.hmin_rel = opts.basis.hmin_rel / 0.85;
    o.basis.hmin_max_rel = opts.basis.hmin_max_rel / 0.85;
    o
}

/// Refine the indicator minimum in `[k - hw, k + hw]` and accept it only
/// if the indicator falls below the acceptance tolerance.
pub fn eigenpair_near(
    region: Arc<dyn Region>,
    k: f64,
    half_width: f64,
    opts: &SpectralOptions,
) -> Result<EigenPair, PerturbationError> {
    let solver = Solver::new(region, *opts)?;
    let (lo, hi) = (k - half_width, k + half_width);
    let (kk, bracket) = solver.refine(lo, hi)?;
    let pair = solver.eigenpair(kk, bracket)?;
    if pair.indicator > opts.accept_tol {
        return Err(SpectralError::NotFound {
            k_min: lo,
            k_max: hi,
        }
        .into());
    }
    Ok(pair)
}

/// Ground state on two discretizations; their differences drive every
/// error estimate in this module.
#[derive(Clone)]
pub struct GroundState {
    pub fine: Arc<EigenPair>,
    pub coarse: Arc<EigenPair>,
}

impl GroundState {
    pub fn solve(
        region: Arc<dyn Region>,
        window: SearchWindow,
        opts: &SpectralOptions,
    ) -> Result<Self, PerturbationError> {
        let found = find_eigs(
            region.clone(),
            window.k_min,
            window.k_max,
            window.n_scan,
            opts,
        )?;
        let fine = found
            .pairs
            .into_iter()
            .next()
            .ok_or(SpectralError::NotFound {
                k_min: window.k_min,
                k_max: window.k_max,
            })?;
        Self::from_fine(region, fine, opts)
    }

    /// Add the coarse companion of an already computed ground state.
    pub fn from_fine(
        region: Arc<dyn Region>,
        fine: EigenPair,
        opts: &SpectralOptions,
    ) -> Result<Self, PerturbationError> {
        let coarse = eigenpair_near(region, fine.k, NEAR_WINDOW, &coarse_options(opts))?;
        Ok(Self {
            fine: Arc::new(fine),
            coarse: Arc::new(coarse),
        })
    }

    /// The same ground state on the mirror image, which must be `region`.
    pub fn reflected(&self, region: Arc<dyn Region>) -> Self {
        Self {
            fine: Arc::new(self.fine.reflected(region.clone())),
            coarse: Arc::new(self.coarse.reflected(region)),
        }
    }

    pub fn traces(
        &self,
        n_nodes: usize,
    ) -> Result<(BoundaryTrace, BoundaryTrace), PerturbationError> {
        Ok((
            normal_trace(&self.fine, n_nodes)?,
            normal_trace(&self.coarse, n_nodes)?,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_depth_and_mirror() {
        let f = PerturbationSpec::unit_depth(&[BumpSpec::new(-0.8, 0.3, 0.25)], 1e-3);
        assert_eq!(f.bumps[0].depth, 1.0);
        assert_eq!(f.bumps_at(1e-3)[0].depth, 1e-3);
        assert_eq!(f.mirrored().bumps[0].center, 0.8);
        assert!((f.profile(-0.8) + 1.0).abs() < 1e-15);
        assert!(!f.is_self_dual());
        assert!(PerturbationSpec::new(vec![BumpSpec::new(0.0, 0.3, 1.0)], 1.0).is_self_dual());
        assert!(PerturbationSpec::unit_depth(&[], 1.0).bumps.is_empty());
    }

    #[test]
    fn segment_pairs_are_validated() {
        assert!(SegmentPair::new(-0.1, 1.0).is_err());
        assert!(SegmentPair::new(1.0, 0.5).is_err());
        assert_eq!(SegmentPair::new(0.2, 0.9).unwrap().dual(), (-0.9, -0.2));
    }
}
