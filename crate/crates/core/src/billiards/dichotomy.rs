use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::dynamics::{
    classify, trace, zone_consistency_failures, CrossingClass, Ray, Trajectory, ZoneTag,
};
use crate::geometry::{MushroomPair, Point, Region};
use crate::rng;

#[derive(Debug, Clone, Serialize)]
pub struct TrajectoryVisit {
    /// 1 or 2.
    pub domain: u8,
    pub index: usize,
    pub start: Point,
    pub angle: f64,
    pub zones: Vec<ZoneTag>,
    pub bounces: usize,
    pub abandoned: bool,
    /// Visits both an M bump and a B bump.
    pub violation: bool,
    /// Flat-bottom bounces on the wrong side of a focus for their chord class.
    pub zone_failures: usize,
    /// Chords above the axis whose class contradicts the bump visited.
    pub class_failures: usize,
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct DomainStats {
    pub trajectories: usize,
    pub abandoned: usize,
    pub violations: usize,
    pub zone_failures: usize,
    pub class_failures: usize,
    pub visited_m: usize,
    pub visited_b: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct DichotomyReport {
    pub n_traj: usize,
    pub n_bounces: usize,
    pub seed: u64,
    pub omega1: DomainStats,
    pub omega2: DomainStats,
    pub trajectories: Vec<TrajectoryVisit>,
    pub pass: bool,
}

impl DichotomyReport {
    pub fn violations(&self) -> usize {
        self.omega1.violations + self.omega2.violations
    }

    pub fn abandoned(&self) -> usize {
        self.omega1.abandoned + self.omega2.abandoned
    }

    pub fn zone_failures(&self) -> usize {
        self.omega1.zone_failures + self.omega2.zone_failures
    }
}

/// Uniform point in the region by rejection from its bounding box.
pub(crate) fn random_interior(region: &dyn Region, r: &mut ChaCha8Rng) -> Point {
    let bb = region.bbox();
    loop {
        let p = Point::new(
            r.gen_range(bb.min.x..bb.max.x),
            r.gen_range(bb.min.y..bb.max.y),
        );
        if region.contains(p) {
            return p;
        }
    }
}

fn class_failures(region: &dyn Region, t: &Trajectory) -> usize {
    let Some(e) = region.ellipse() else {
        return 0;
    };
    let want = if t.visits(ZoneTag::BumpM) {
        CrossingClass::FocalCrossing
    } else if t.visits(ZoneTag::BumpB) {
        CrossingClass::Outer
    } else {
        return 0;
    };
    let mut from = t.start;
    let mut bad = 0;
    for b in &t.bounces {
        if from.y >= 0.0 || b.position.y >= 0.0 {
            if let Some(mu) = b.mu {
                let c = classify(&e, mu);
                if c != want && c != CrossingClass::Separatrix {
                    bad += 1;
                }
            }
        }
        from = b.position;
    }
    bad
}

fn run_one(
    region: &dyn Region,
    domain: u8,
    index: usize,
    n_bounces: usize,
    seed: u64,
) -> TrajectoryVisit {
    let mut r = rng::stream(
        seed,
        rng::streams::DICHOTOMY,
        ((domain as u64) << 40) | index as u64,
    );
    let start = random_interior(region, &mut r);
    let angle = r.gen_range(0.0..2.0 * PI);
    let t = trace(region, &Ray::from_angle(start, angle), n_bounces);
    let zones: Vec<ZoneTag> = [
        ZoneTag::Arc,
        ZoneTag::FlatFocal,
        ZoneTag::FlatOuter,
        ZoneTag::BumpM,
        ZoneTag::BumpB,
        ZoneTag::Corner,
    ]
    .into_iter()
    .filter(|z| t.visits(*z))
    .collect();
    TrajectoryVisit {
        domain,
        index,
        start,
        angle,
        violation: t.visits(ZoneTag::BumpM) && t.visits(ZoneTag::BumpB),
        zone_failures: region
            .ellipse()
            .map_or(0, |e| zone_consistency_failures(&e, &t)),
        class_failures: class_failures(region, &t),
        bounces: t.bounces.len(),
        abandoned: t.is_abandoned(),
        zones,
    }
}

fn stats(visits: &[TrajectoryVisit]) -> DomainStats {
    let mut s = DomainStats::default();
    for v in visits {
        s.trajectories += 1;
        if v.abandoned {
            s.abandoned += 1;
            continue;
        }
        s.violations += v.violation as usize;
        s.zone_failures += v.zone_failures;
        s.class_failures += v.class_failures;
        s.visited_m += v.zones.contains(&ZoneTag::BumpM) as usize;
        s.visited_b += v.zones.contains(&ZoneTag::BumpB) as usize;
    }
    s
}

/// Launch `n_traj` random trajectories in each member of the pair and count
/// those that reach both a focal-zone and an outer-zone bump. Abandoned
/// trajectories are reported but do not enter the verdict.
pub fn dichotomy_check(
    pair: &MushroomPair,
    n_traj: usize,
    n_bounces: usize,
    seed: u64,
) -> DichotomyReport {
    let domains: [(&dyn Region, u8); 2] = [(&pair.omega1, 1), (&pair.omega2, 2)];
    let mut trajectories = Vec::with_capacity(2 * n_traj);
    let mut per = [DomainStats::default(); 2];
    for (k, (region, id)) in domains.into_iter().enumerate() {
        let v: Vec<TrajectoryVisit> = (0..n_traj)
            .into_par_iter()
            .map(|i| run_one(region, id, i, n_bounces, seed))
            .collect();
        per[k] = stats(&v);
        trajectories.extend(v);
    }
    let pass = per
        .iter()
        .all(|s| s.violations == 0 && s.zone_failures == 0);
    DichotomyReport {
        n_traj,
        n_bounces,
        seed,
        omega1: per[0],
        omega2: per[1],
        trajectories,
        pass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_ellipse, make_pair, BumpSpec, MushroomPair};

    fn pair() -> MushroomPair {
        make_pair(
            build_ellipse(2.0, 1.0).unwrap(),
            BumpSpec::new(-1.85, 0.06, 0.05),
            BumpSpec::new(1.80, 0.05, 0.07),
            BumpSpec::new(-0.8, 0.3, 0.25),
        )
        .unwrap()
    }

    #[test]
    fn empty_run_passes() {
        let r = dichotomy_check(&pair(), 0, 10, 1);
        assert!(r.pass);
        assert!(r.trajectories.is_empty());
    }

    #[test]
    fn small_run_has_no_violations() {
        let r = dichotomy_check(&pair(), 60, 200, 5);
        assert!(r.pass, "{:?} {:?}", r.omega1, r.omega2);
        assert_eq!(r.omega1.class_failures + r.omega2.class_failures, 0);
        assert!(r.omega1.visited_m > 0 && r.omega1.visited_b > 0);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let a = dichotomy_check(&pair(), 10, 50, 9);
        let b = dichotomy_check(&pair(), 10, 50, 9);
        for (x, y) in a.trajectories.iter().zip(&b.trajectories) {
            assert_eq!(x.start, y.start);
            assert_eq!(x.zones, y.zones);
        }
    }
}
