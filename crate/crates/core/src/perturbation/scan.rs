use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{pair_rates_with_error, PerturbationError, PerturbationSpec};
use crate::geometry::{BumpSpec, DomainSpec};
use crate::rng;
use crate::spectral::BoundaryTrace;

/// Log-uniform sampling ranges for the random focal bumps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRanges {
    pub half_width: (f64, f64),
    pub depth: (f64, f64),
}

impl Default for ScanRanges {
    fn default() -> Self {
        Self {
            half_width: (0.05, 0.5),
            depth: (0.01, 0.3),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GenericitySample {
    pub bump: BumpSpec,
    pub d1: f64,
    pub d2: f64,
    pub gap: f64,
    pub error: f64,
    /// `safety_factor · error`.
    pub threshold: f64,
    pub exceeds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GenericityScan {
    pub seed: u64,
    pub safety_factor: f64,
    pub ranges: ScanRanges,
    /// `None` for an empty scan.
    pub fraction: Option<f64>,
    /// Quantiles 0, 0.1, 0.5, 0.9, 1 of `gap / threshold`.
    pub ratio_quantiles: Vec<f64>,
    pub samples: Vec<GenericitySample>,
}

const MAX_DRAWS: usize = 10_000;

fn log_uniform(r: &mut impl Rng, (lo, hi): (f64, f64)) -> f64 {
    (r.gen_range(lo.ln()..=hi.ln())).exp()
}

/// Draw sample `i`: center uniform in the left half of the focal zone,
/// half-width and depth log-uniform, redrawn until admissible.
fn draw(
    omega: &DomainSpec,
    ranges: &ScanRanges,
    seed: u64,
    i: usize,
) -> Result<BumpSpec, PerturbationError> {
    let c = omega.ellipse_spec().c();
    let lo = -c + omega.clearance();
    let mut r = rng::stream(seed, rng::streams::GENERICITY, i as u64);
    for _ in 0..MAX_DRAWS {
        let center = r.gen_range(lo..0.0);
        let half_width = log_uniform(&mut r, ranges.half_width);
        let depth = log_uniform(&mut r, ranges.depth);
        let b = BumpSpec::new(center, half_width, depth);
        let (l, h) = b.support();
        if omega.focal_interval_ok(l, h) {
            return Ok(b);
        }
    }
    Err(PerturbationError::InvalidInput(format!(
        "no admissible bump within {MAX_DRAWS} draws; check the sampling ranges"
    )))
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let (i, t) = (pos.floor() as usize, pos.fract());
    if i + 1 < sorted.len() {
        sorted[i] * (1.0 - t) + sorted[i + 1] * t
    } else {
        sorted[i]
    }
}

/// Rates `d1, d2` of `n_samples` random admissible focal bumps on the
/// traces of the unperturbed ground state; a sample counts when
/// `|d1 - d2|` exceeds `safety_factor` times its error estimate.
pub fn genericity_scan(
    omega: &DomainSpec,
    fine: &BoundaryTrace,
    coarse: &BoundaryTrace,
    n_samples: usize,
    seed: u64,
    ranges: &ScanRanges,
    safety_factor: f64,
) -> Result<GenericityScan, PerturbationError> {
    let ok = |r: (f64, f64)| r.0 > 0.0 && r.1 >= r.0 && r.1.is_finite();
    if !ok(ranges.half_width) || !ok(ranges.depth) {
        return Err(PerturbationError::InvalidInput(
            "sampling ranges must satisfy 0 < lo <= hi".into(),
        ));
    }
    let samples: Vec<GenericitySample> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let bump = draw(omega, ranges, seed, i)?;
            let r = pair_rates_with_error(fine, coarse, &PerturbationSpec::new(vec![bump], 1.0))?;
            let threshold = safety_factor * r.error;
            Ok(GenericitySample {
                bump,
                d1: r.d1,
                d2: r.d2,
                gap: r.gap(),
                error: r.error,
                threshold,
                exceeds: r.gap() > threshold,
            })
        })
        .collect::<Result<_, PerturbationError>>()?;
    let fraction = (!samples.is_empty())
        .then(|| samples.iter().filter(|s| s.exceeds).count() as f64 / samples.len() as f64);
    let mut ratios: Vec<f64> = samples
        .iter()
        .map(|s| {
            if s.threshold > 0.0 {
                s.gap / s.threshold
            } else if s.gap > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        })
        .collect();
    ratios.sort_by(|a, b| a.total_cmp(b));
    let ratio_quantiles = if ratios.is_empty() {
        vec![]
    } else {
        [0.0, 0.1, 0.5, 0.9, 1.0]
            .iter()
            .map(|&q| quantile(&ratios, q))
            .collect()
    };
    Ok(GenericityScan {
        seed,
        safety_factor,
        ranges: *ranges,
        fraction,
        ratio_quantiles,
        samples,
    })
}
