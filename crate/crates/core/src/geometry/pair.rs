use serde::{Deserialize, Serialize};

use super::bump::BumpSpec;
use super::domain::{build_domain, DomainSpec, Zone};
use super::ellipse::EllipseSpec;
use super::GeometryError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairStatus {
    /// Nondual outer bumps and a non-self-dual focal bump.
    Valid,
    /// Outer bumps are dual: the two domains are mirror images.
    Isometric,
    /// Focal bumps are self-dual: the two domains coincide.
    Identical,
}

/// The pair `(omega1, omega2)`; `omega2` carries the mirrored focal bumps.
#[derive(Debug, Clone, PartialEq)]
pub struct MushroomPair {
    pub omega1: DomainSpec,
    pub omega2: DomainSpec,
    pub b_dual: bool,
    pub m_self_dual: bool,
}

fn mirror_list(v: &[BumpSpec]) -> Vec<BumpSpec> {
    let mut m: Vec<BumpSpec> = v.iter().map(|b| b.mirrored()).collect();
    m.sort_by(|x, y| x.center.total_cmp(&y.center));
    m
}

fn lists_match(x: &[BumpSpec], y: &[BumpSpec], tol: f64) -> bool {
    x.len() == y.len()
        && x.iter().zip(y).all(|(p, q)| {
            (p.center - q.center).abs() <= tol
                && (p.half_width - q.half_width).abs() <= tol
                && (p.depth - q.depth).abs() <= tol
        })
}

impl MushroomPair {
    /// Pair a domain with the copy whose focal bumps are mirrored.
    pub fn from_domain(omega1: DomainSpec) -> Result<Self, GeometryError> {
        let tol = 1e-12 * omega1.ellipse_spec().a();
        let mirrored = mirror_list(omega1.focal_bumps());
        let omega2 = omega1.with_focal_bumps(mirrored.clone())?;
        let b_dual = lists_match(
            &mirror_list(omega1.outer_bumps()),
            omega1.outer_bumps(),
            tol,
        );
        let m_self_dual = lists_match(&mirrored, omega1.focal_bumps(), tol);
        Ok(Self {
            omega1,
            omega2,
            b_dual,
            m_self_dual,
        })
    }

    pub fn status(&self) -> PairStatus {
        if self.m_self_dual {
            PairStatus::Identical
        } else if self.b_dual {
            PairStatus::Isometric
        } else {
            PairStatus::Valid
        }
    }

    /// The underlying domain without focal bumps.
    pub fn base(&self) -> DomainSpec {
        self.omega1
            .with_focal_bumps(vec![])
            .expect("removing focal bumps keeps a valid domain")
    }
}

pub fn make_pair(
    ellipse: EllipseSpec,
    b1: BumpSpec,
    b2: BumpSpec,
    m: BumpSpec,
) -> Result<MushroomPair, GeometryError> {
    let omega1 = build_domain(ellipse, vec![b1, b2], vec![m], 0.0)?;
    let zone_err = |index: usize, b: &BumpSpec, zone: Zone, list: &'static str| {
        let c = ellipse.c();
        let a = ellipse.a();
        let (zl, zh) = match zone {
            Zone::LeftOuter => (-a, -c),
            Zone::Focal => (-c, c),
            Zone::RightOuter => (c, a),
        };
        let (lo, hi) = b.support();
        GeometryError::ZoneViolation {
            list,
            index,
            lo,
            hi,
            zone: zone.name(),
            zone_lo: zl,
            zone_hi: zh,
            clearance: omega1.clearance(),
        }
    };
    if omega1.zone_of(b1.center) != Some(Zone::LeftOuter) {
        return Err(zone_err(0, &b1, Zone::LeftOuter, "outer"));
    }
    if omega1.zone_of(b2.center) != Some(Zone::RightOuter) {
        return Err(zone_err(1, &b2, Zone::RightOuter, "outer"));
    }
    MushroomPair::from_domain(omega1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_ellipse, reflect, Region};

    fn running() -> (EllipseSpec, BumpSpec, BumpSpec, BumpSpec) {
        (
            build_ellipse(2.0, 1.0).unwrap(),
            BumpSpec::new(-1.85, 0.06, 0.05),
            BumpSpec::new(1.80, 0.05, 0.07),
            BumpSpec::new(-0.8, 0.3, 0.25),
        )
    }

    #[test]
    fn running_example_is_valid() {
        let (e, b1, b2, m) = running();
        let p = make_pair(e, b1, b2, m).unwrap();
        assert!(!p.b_dual && !p.m_self_dual);
        assert_eq!(p.status(), PairStatus::Valid);
        assert_eq!(p.omega2.focal_bumps()[0].center, 0.8);
        assert_eq!(p.omega1.outer_bumps(), p.omega2.outer_bumps());
    }

    #[test]
    fn dual_outer_bumps_flag_isometry() {
        let (e, b1, _, m) = running();
        let p = make_pair(e, b1, b1.mirrored(), m).unwrap();
        assert!(p.b_dual);
        assert_eq!(p.status(), PairStatus::Isometric);
        assert_eq!(reflect(&p.omega1), p.omega2);
    }

    #[test]
    fn centered_focal_bump_is_self_dual() {
        let (e, b1, b2, _) = running();
        let p = make_pair(e, b1, b2, BumpSpec::new(0.0, 0.3, 0.2)).unwrap();
        assert!(p.m_self_dual);
        assert_eq!(p.status(), PairStatus::Identical);
        assert_eq!(p.omega1, p.omega2);
    }

    #[test]
    fn misplaced_b1_rejected() {
        let (e, _, b2, m) = running();
        let r = make_pair(e, BumpSpec::new(1.9, 0.03, 0.02), b2, m);
        assert!(matches!(r, Err(GeometryError::ZoneViolation { .. })));
    }

    #[test]
    fn omega2_matches_reflection_of_omega1_away_from_outer_zones() {
        let (e, b1, b2, m) = running();
        let p = make_pair(e, b1, b2, m).unwrap();
        let r2 = reflect(&p.omega2);
        // focal parts agree pointwise
        for k in 0..200 {
            let x = -1.5 + 3.0 * k as f64 / 199.0;
            assert!((p.omega1.bottom(x) - r2.bottom(x)).abs() <= 1e-12);
            assert_eq!(p.omega1.vertical_sections(x), r2.vertical_sections(x));
        }
    }
}
