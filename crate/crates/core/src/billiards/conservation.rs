use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::dichotomy::random_interior;
use super::dynamics::{trace, Ray};
use crate::geometry::Region;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriftSample {
    pub index: usize,
    pub bounces: usize,
    pub abandoned: bool,
    /// `max μ - min μ` over the chords of the trajectory.
    pub drift: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConservationReport {
    pub n_traj: usize,
    pub n_bounces: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub abandoned: usize,
    /// Largest drift among completed trajectories.
    pub max_drift: f64,
    pub samples: Vec<DriftSample>,
    pub pass: bool,
}

/// Spread of the caustic parameter along `n_traj` random trajectories.
/// Abandoned trajectories (corner or grazing hits) are excluded from the
/// verdict.
pub fn conservation_check(
    region: &dyn Region,
    n_traj: usize,
    n_bounces: usize,
    seed: u64,
    tolerance: f64,
) -> ConservationReport {
    let samples: Vec<DriftSample> = (0..n_traj)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(seed, rng::streams::CONSERVATION, i as u64);
            let start = random_interior(region, &mut r);
            let angle = r.gen_range(0.0..2.0 * PI);
            let t = trace(region, &Ray::from_angle(start, angle), n_bounces);
            DriftSample {
                index: i,
                bounces: t.bounces.len(),
                abandoned: t.is_abandoned(),
                drift: t.mu_drift(),
            }
        })
        .collect();
    let done = samples.iter().filter(|s| !s.abandoned);
    let max_drift = done.map(|s| s.drift).fold(0.0, f64::max);
    ConservationReport {
        n_traj,
        n_bounces,
        seed,
        tolerance,
        abandoned: samples.iter().filter(|s| s.abandoned).count(),
        max_drift,
        pass: max_drift <= tolerance,
        samples,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_domain, build_ellipse};

    #[test]
    fn half_ellipse_conserves_mu() {
        let d = build_domain(build_ellipse(2.0, 1.0).unwrap(), vec![], vec![], 0.0).unwrap();
        let r = conservation_check(&d, 10, 200, 3, 1e-9);
        assert!(r.pass, "{}", r.max_drift);
        assert_eq!(r.samples.len(), 10);
    }
}
