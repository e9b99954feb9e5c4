use serde::Serialize;

use super::{PerturbationError, PerturbationSpec, SegmentPair};
use crate::geometry::{PieceTag, Point};
use crate::quad::{composite, GaussLegendre};
use crate::spectral::{BoundaryTrace, EigenPair};

/// Gauss–Legendre nodes placed on each bump support.
pub const PANEL_NODES: usize = 128;
pub const MIN_EVENNESS_SAMPLES: usize = 16;
const ORDER: usize = 16;

/// Reject abscissas where `(x, 0)` is not on a straight piece of the bottom.
fn check_flat(pair: &EigenPair, x: f64, support: (f64, f64)) -> Result<(), PerturbationError> {
    let region = pair.region();
    let (piece, _, dist) = region.boundary().locate_point(Point::new(x, 0.0));
    let tag = region.boundary().pieces()[piece].tag;
    if tag == PieceTag::Flat && dist <= 1e-12 * region.bbox().diameter() {
        Ok(())
    } else {
        Err(PerturbationError::SupportViolation {
            lo: support.0,
            hi: support.1,
            reason: format!("bottom is not flat at x = {x}"),
        })
    }
}

/// `(∂νψ)²` at the bottom point `(x, 0)`, where `ν = (0, -1)`.
pub fn squared_normal_derivative(pair: &EigenPair, x: f64) -> f64 {
    pair.grad(Point::new(x, 0.0)).y.powi(2)
}

/// `dλ/dε = ∫ (∂νψ)² f dx` for the bottom displacement `(x, 0) -> (x, ε f(x))`.
/// Each bump support gets its own composite panel of [`PANEL_NODES`] nodes,
/// so the rule is exactly linear in the bump list.
pub fn hadamard_rate(
    trace: &BoundaryTrace,
    f: &PerturbationSpec,
) -> Result<f64, PerturbationError> {
    let pair = trace.pair();
    let rule = GaussLegendre::new(ORDER);
    let mut total = 0.0;
    for b in &f.bumps {
        let support = b.support();
        check_flat(pair, support.0, support)?;
        check_flat(pair, support.1, support)?;
        let mut part = 0.0;
        for (x, w) in composite(&rule, support.0, support.1, PANEL_NODES / ORDER) {
            check_flat(pair, x, support)?;
            part += w * squared_normal_derivative(pair, x) * b.height(x);
        }
        total += part;
    }
    Ok(total)
}

/// `dλ/dt = -∫ (∂νψ)² V dσ` for a normal boundary velocity `V`, on the
/// trace's own nodes. A disk with `V = 1` gives `-2λ`.
pub fn hadamard_rate_normal(trace: &BoundaryTrace, velocity: impl Fn(Point) -> f64) -> f64 {
    -trace
        .samples
        .iter()
        .map(|t| t.weight * t.dpsi_dnu * t.dpsi_dnu * velocity(t.position))
        .sum::<f64>()
}

/// `(d1, d2)`: rates of `f` and of its mirror image on the same trace.
pub fn pair_rates(
    trace: &BoundaryTrace,
    f: &PerturbationSpec,
) -> Result<(f64, f64), PerturbationError> {
    Ok((
        hadamard_rate(trace, f)?,
        hadamard_rate(trace, &f.mirrored())?,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatePair {
    pub d1: f64,
    pub d2: f64,
    pub d1_coarse: f64,
    pub d2_coarse: f64,
    /// `|d1 - d1_coarse| + |d2 - d2_coarse|`.
    pub error: f64,
}

impl RatePair {
    pub fn gap(&self) -> f64 {
        (self.d1 - self.d2).abs()
    }
}

/// [`pair_rates`] on a fine and a coarse trace of the same ground state.
pub fn pair_rates_with_error(
    fine: &BoundaryTrace,
    coarse: &BoundaryTrace,
    f: &PerturbationSpec,
) -> Result<RatePair, PerturbationError> {
    let (d1, d2) = pair_rates(fine, f)?;
    let (d1_coarse, d2_coarse) = pair_rates(coarse, f)?;
    Ok(RatePair {
        d1,
        d2,
        d1_coarse,
        d2_coarse,
        error: (d1 - d1_coarse).abs() + (d2 - d2_coarse).abs(),
    })
}

fn sample_q(
    trace: &BoundaryTrace,
    seg: &SegmentPair,
    n: usize,
) -> Result<(Vec<f64>, Vec<f64>), PerturbationError> {
    if n < MIN_EVENNESS_SAMPLES {
        return Err(PerturbationError::InvalidInput(format!(
            "need at least {MIN_EVENNESS_SAMPLES} samples, got {n}"
        )));
    }
    let pair = trace.pair();
    let support = (seg.x1, seg.x2);
    let mut plus = Vec::with_capacity(n);
    let mut minus = Vec::with_capacity(n);
    for i in 0..n {
        let x = seg.x1 + (i as f64 + 0.5) / n as f64 * (seg.x2 - seg.x1);
        check_flat(pair, x, support)?;
        check_flat(pair, -x, support)?;
        plus.push(squared_normal_derivative(pair, x));
        minus.push(squared_normal_derivative(pair, -x));
    }
    Ok((plus, minus))
}

fn norm(v: impl Iterator<Item = f64>) -> f64 {
    v.map(|x| x * x).sum::<f64>().sqrt()
}

/// `‖q(x) - q(-x)‖ / ‖q(x) + q(-x)‖` over `n` midpoints of `J`, with
/// `q = (∂νψ)²` on the bottom.
pub fn evenness_defect(
    trace: &BoundaryTrace,
    seg: &SegmentPair,
    n_samples: usize,
) -> Result<f64, PerturbationError> {
    let (p, m) = sample_q(trace, seg, n_samples)?;
    let num = norm(p.iter().zip(&m).map(|(a, b)| a - b));
    let den = norm(p.iter().zip(&m).map(|(a, b)| a + b));
    Ok(if den > 0.0 { num / den } else { 0.0 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvennessEstimate {
    pub defect: f64,
    pub coarse_defect: f64,
    /// Bound on the defect's sensitivity to the discretization: the larger
    /// of the fine/coarse difference and the relative perturbation of `q`
    /// on both segments.
    pub error: f64,
    pub n_samples: usize,
    pub segment: SegmentPair,
}

impl EvennessEstimate {
    pub fn compute(
        fine: &BoundaryTrace,
        coarse: &BoundaryTrace,
        seg: &SegmentPair,
        n_samples: usize,
    ) -> Result<Self, PerturbationError> {
        let defect = evenness_defect(fine, seg, n_samples)?;
        let coarse_defect = evenness_defect(coarse, seg, n_samples)?;
        let (pf, mf) = sample_q(fine, seg, n_samples)?;
        let (pc, mc) = sample_q(coarse, seg, n_samples)?;
        let den = norm(pf.iter().zip(&mf).map(|(a, b)| a + b));
        let dq = norm(pf.iter().zip(&pc).map(|(a, b)| a - b))
            + norm(mf.iter().zip(&mc).map(|(a, b)| a - b));
        let rel = if den > 0.0 { dq / den } else { 0.0 };
        Ok(Self {
            defect,
            coarse_defect,
            error: rel.max((defect - coarse_defect).abs()),
            n_samples,
            segment: *seg,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_domain, build_ellipse, BumpSpec, Disk, Region};
    use crate::spectral::{normal_trace, BasisOptions, Solver, SpectralOptions};
    use std::sync::Arc;

    fn ground_trace(region: Arc<dyn Region>, lo: f64, hi: f64, n_src: usize) -> BoundaryTrace {
        let opts = SpectralOptions {
            basis: BasisOptions {
                n_src,
                ..Default::default()
            },
            ..Default::default()
        };
        let s = Solver::new(region, opts).unwrap();
        let (k, w) = s.refine(lo, hi).unwrap();
        normal_trace(&Arc::new(s.eigenpair(k, w).unwrap()), 256).unwrap()
    }

    fn half_ellipse() -> crate::geometry::DomainSpec {
        build_domain(build_ellipse(2.0, 1.0).unwrap(), vec![], vec![], 0.0).unwrap()
    }

    #[test]
    fn disk_uniform_growth_gives_minus_two_lambda() {
        let t = ground_trace(Arc::new(Disk::new(1.0)), 2.3, 2.5, 60);
        let r = hadamard_rate_normal(&t, |_| 1.0);
        let lambda = t.pair().lambda;
        assert!((r / (-2.0 * lambda) - 1.0).abs() < 1e-8, "{r}");
    }

    #[test]
    fn rate_identities_on_the_half_ellipse() {
        let d = half_ellipse();
        let t = ground_trace(Arc::new(d.clone()), 3.40, 3.45, 200);
        let f = PerturbationSpec::new(vec![BumpSpec::new(-0.8, 0.3, 1.0)], 1e-3);
        let g = PerturbationSpec::new(vec![BumpSpec::new(0.4, 0.2, 1.0)], 1e-3);
        assert_eq!(
            hadamard_rate(&t, &PerturbationSpec::new(vec![], 1e-3)).unwrap(),
            0.0
        );
        let (rf, rg) = (
            hadamard_rate(&t, &f).unwrap(),
            hadamard_rate(&t, &g).unwrap(),
        );
        assert!(rf < 0.0 && rg < 0.0);
        let combo =
            PerturbationSpec::new(vec![f.bumps[0].scaled(0.3), g.bumps[0].scaled(2.5)], 1e-3);
        let rc = hadamard_rate(&t, &combo).unwrap();
        assert!(
            (rc - (0.3 * rf + 2.5 * rg)).abs() <= 1e-12 * rc.abs(),
            "{rc}"
        );
        // an even profile has equal rates on any domain
        let even = PerturbationSpec::new(vec![BumpSpec::new(0.0, 0.4, 1.0)], 1e-3);
        let (d1, d2) = pair_rates(&t, &even).unwrap();
        assert_eq!(d1, d2);
        // the half-ellipse is self-dual
        let (d1, d2) = pair_rates(&t, &f).unwrap();
        assert!((d1 - d2).abs() <= 1e-7 * d1.abs(), "{d1} {d2}");
        let seg = SegmentPair::default_for(&d);
        assert!(evenness_defect(&t, &seg, 64).unwrap() < 1e-6);
        assert!(evenness_defect(&t, &seg, 8).is_err());
    }

    #[test]
    fn reflection_identity_and_support_checks() {
        let d = build_domain(
            build_ellipse(2.0, 1.0).unwrap(),
            vec![
                BumpSpec::new(-1.85, 0.06, 0.05),
                BumpSpec::new(1.80, 0.05, 0.07),
            ],
            vec![],
            0.0,
        )
        .unwrap();
        let region: Arc<dyn Region> = Arc::new(d.clone());
        let t = ground_trace(region, 3.40, 3.45, 200);
        let mirror: Arc<dyn Region> = Arc::new(d.reflected());
        let tm = normal_trace(&Arc::new(t.pair().reflected(mirror)), 256).unwrap();
        let f = PerturbationSpec::new(vec![BumpSpec::new(-0.8, 0.3, 1.0)], 1e-3);
        let a = hadamard_rate(&t, &f.mirrored()).unwrap();
        let b = hadamard_rate(&tm, &f).unwrap();
        assert!((a - b).abs() <= 1e-12 * a.abs(), "{a} {b}");
        // over an outer bump the bottom is not flat
        let bad = PerturbationSpec::new(vec![BumpSpec::new(-1.85, 0.05, 1.0)], 1e-3);
        assert!(matches!(
            hadamard_rate(&t, &bad),
            Err(PerturbationError::SupportViolation { .. })
        ));
        assert!(bad.check_support(&d).is_err());
        assert!(f.check_support(&d).is_ok());
    }
}
