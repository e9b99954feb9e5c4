use std::sync::Arc;

use serde::Serialize;

use super::eigen::EigenPair;
use super::SpectralError;
use crate::export::{fmt17, Csv};
use crate::geometry::{Curve, Point};
use crate::quad::{graded, GaussLegendre};

pub const MIN_TRACE_NODES: usize = 64;
const ORDER: usize = 16;
const CORNER_LEVELS: usize = 8;
const BUMP_PANELS: usize = 16;
const BUMP_LEVELS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceSample {
    pub s: f64,
    pub position: Point,
    pub normal: Point,
    pub dpsi_dnu: f64,
    /// Arc-length quadrature weight.
    pub weight: f64,
}

/// Normal derivative of an eigenfunction sampled at boundary quadrature
/// nodes.
#[derive(Debug, Clone, Serialize)]
pub struct BoundaryTrace {
    pub samples: Vec<TraceSample>,
    #[serde(skip)]
    pair: Arc<EigenPair>,
}

impl BoundaryTrace {
    pub fn pair(&self) -> &Arc<EigenPair> {
        &self.pair
    }

    /// `∂ψ/∂ν` at any boundary point with outward normal `normal`.
    pub fn dpsi_dnu_at(&self, p: Point, normal: Point) -> f64 {
        self.pair.grad(p).dot(&normal)
    }

    /// `∫ (∂νψ)² (x·ν) dσ`, equal to `2λ` for a normalized eigenfunction.
    pub fn rellich(&self) -> f64 {
        self.samples
            .iter()
            .map(|t| t.weight * t.dpsi_dnu * t.dpsi_dnu * t.position.dot(&t.normal))
            .sum()
    }

    /// `|rellich / 2λ - 1|`.
    pub fn rellich_defect(&self) -> f64 {
        (self.rellich() / (2.0 * self.pair.lambda) - 1.0).abs()
    }

    /// Sign changes of `∂νψ` among samples whose magnitude exceeds `floor`
    /// times the largest one.
    pub fn sign_changes(&self, floor: f64) -> usize {
        let max = self
            .samples
            .iter()
            .map(|t| t.dpsi_dnu.abs())
            .fold(0.0, f64::max);
        let signs: Vec<bool> = self
            .samples
            .iter()
            .filter(|t| t.dpsi_dnu.abs() > floor * max)
            .map(|t| t.dpsi_dnu > 0.0)
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Columns: s, x, y, dpsi_dnu, weight.
    pub fn to_csv(&self) -> String {
        let mut c = Csv::new(&["s", "x", "y", "dpsi_dnu", "weight"]);
        for t in &self.samples {
            c.row([
                fmt17(t.s),
                fmt17(t.position.x),
                fmt17(t.position.y),
                fmt17(t.dpsi_dnu),
                fmt17(t.weight),
            ]);
        }
        c.finish()
    }
}

/// Sample `∂νψ` on composite 16-point Gauss–Legendre panels, about
/// `n_nodes` nodes in total spread by arc length, with panels graded
/// toward corners.
pub fn normal_trace(pair: &Arc<EigenPair>, n_nodes: usize) -> Result<BoundaryTrace, SpectralError> {
    if n_nodes < MIN_TRACE_NODES {
        return Err(SpectralError::InvalidInput(format!(
            "need at least {MIN_TRACE_NODES} trace nodes, got {n_nodes}"
        )));
    }
    let boundary = pair.region().boundary();
    let rule = GaussLegendre::new(ORDER);
    let total = n_nodes.div_ceil(ORDER);
    let perimeter = boundary.perimeter();
    let near_corner = |p: Point| {
        boundary
            .corners()
            .iter()
            .any(|c| (p - c).norm() < 1e-9 * perimeter)
    };
    let mut samples = Vec::with_capacity(n_nodes + 4 * CORNER_LEVELS * ORDER);
    for piece in boundary.pieces() {
        let mut panels = ((total as f64 * piece.length / perimeter).round() as usize).max(1);
        let mut ends = (
            near_corner(boundary.eval(piece.s0).position),
            near_corner(boundary.eval(piece.s0 + piece.length).position),
        );
        let mut levels = CORNER_LEVELS;
        if let Curve::Graph { .. } = piece.curve {
            // the flanks of a bump bend sharply just inside its support
            panels = panels.max(BUMP_PANELS);
            ends = (true, true);
            levels = BUMP_LEVELS;
        }
        for (s, w) in graded(
            &rule,
            piece.s0,
            piece.s0 + piece.length,
            panels,
            ends,
            levels,
        ) {
            let bp = boundary.eval(s);
            samples.push(TraceSample {
                s,
                position: bp.position,
                normal: bp.normal,
                dpsi_dnu: pair.grad(bp.position).dot(&bp.normal),
                weight: w,
            });
        }
    }
    Ok(BoundaryTrace {
        samples,
        pair: pair.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Disk;
    use crate::spectral::{BasisOptions, Solver, SpectralOptions};

    #[test]
    fn disk_trace_is_constant_and_satisfies_rellich() {
        let opts = SpectralOptions {
            basis: BasisOptions {
                n_src: 60,
                ..Default::default()
            },
            ..Default::default()
        };
        let s = Solver::new(Arc::new(Disk::new(1.0)), opts).unwrap();
        let (k, w) = s.refine(2.3, 2.5).unwrap();
        let p = Arc::new(s.eigenpair(k, w).unwrap());
        let t = normal_trace(&p, 128).unwrap();
        let mean = t.samples.iter().map(|x| x.dpsi_dnu).sum::<f64>() / t.samples.len() as f64;
        assert!(t
            .samples
            .iter()
            .all(|x| (x.dpsi_dnu / mean - 1.0).abs() < 1e-8));
        assert!(t.rellich_defect() < 1e-8, "{}", t.rellich_defect());
        assert_eq!(t.sign_changes(1e-6), 0);
        assert!(normal_trace(&p, 10).is_err());
    }
}
