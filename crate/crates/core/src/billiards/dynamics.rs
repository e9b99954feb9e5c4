use serde::{Deserialize, Serialize};

use super::BilliardError;
use crate::geometry::{EllipseSpec, PieceTag, Point, Region};

/// Minimal travel distance before a boundary hit counts.
pub const MIN_TRAVEL: f64 = 1e-10;
/// Rays closer than this to tangency (in angle) are abandoned.
pub const GRAZING_TOL: f64 = 1e-6;
/// Corner exclusion radius relative to the domain half-width.
pub const CORNER_TOL: f64 = 1e-6;
/// Band around `b^2` treated as the separatrix.
pub const SEPARATRIX_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    pub origin: Point,
    pub direction: Point,
}

impl Ray {
    /// Normalizes `direction`.
    pub fn new(origin: Point, direction: Point) -> Self {
        Self {
            origin,
            direction: direction.normalize(),
        }
    }

    pub fn from_angle(origin: Point, angle: f64) -> Self {
        Self {
            origin,
            direction: Point::new(angle.cos(), angle.sin()),
        }
    }
}

/// Where a bounce landed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ZoneTag {
    #[serde(rename = "arc")]
    Arc,
    #[serde(rename = "flat-focal")]
    FlatFocal,
    #[serde(rename = "flat-outer")]
    FlatOuter,
    #[serde(rename = "bump-M")]
    BumpM,
    #[serde(rename = "bump-B")]
    BumpB,
    #[serde(rename = "corner-region")]
    Corner,
}

impl ZoneTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            ZoneTag::Arc => "arc",
            ZoneTag::FlatFocal => "flat-focal",
            ZoneTag::FlatOuter => "flat-outer",
            ZoneTag::BumpM => "bump-M",
            ZoneTag::BumpB => "bump-B",
            ZoneTag::Corner => "corner-region",
        }
    }

    pub fn bit(&self) -> u8 {
        1 << (*self as u8)
    }
}

/// Confocal family crossed by a chord's supporting line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CrossingClass {
    /// Crosses the major axis strictly between the foci (hyperbolic caustic).
    FocalCrossing,
    /// Crosses at or beyond the foci (elliptic caustic).
    Outer,
    Separatrix,
}

impl CrossingClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            CrossingClass::FocalCrossing => "focal-crossing",
            CrossingClass::Outer => "outer",
            CrossingClass::Separatrix => "separatrix",
        }
    }
}

/// Confocal conic parameter of the line through `p` and `q`: for the line
/// `u x + v y = w`, `(a^2 u^2 + b^2 v^2 - w^2) / (u^2 + v^2)`.
pub fn caustic_parameter(ellipse: &EllipseSpec, p: Point, q: Point) -> f64 {
    let d = q - p;
    let len = d.norm();
    let (u, v) = (-d.y / len, d.x / len);
    let w = u * p.x + v * p.y;
    let (a, b) = (ellipse.a(), ellipse.b());
    a * a * u * u + b * b * v * v - w * w
}

pub fn classify(ellipse: &EllipseSpec, mu: f64) -> CrossingClass {
    let b2 = ellipse.b() * ellipse.b();
    if mu > b2 + SEPARATRIX_TOL {
        CrossingClass::FocalCrossing
    } else if mu < b2 - SEPARATRIX_TOL {
        CrossingClass::Outer
    } else {
        CrossingClass::Separatrix
    }
}

pub fn zone_tag(region: &dyn Region, tag: PieceTag, p: Point) -> ZoneTag {
    match tag {
        PieceTag::Arc => ZoneTag::Arc,
        PieceTag::Fillet => ZoneTag::Corner,
        PieceTag::OuterBump => ZoneTag::BumpB,
        PieceTag::FocalBump => ZoneTag::BumpM,
        PieceTag::Side => ZoneTag::FlatOuter,
        PieceTag::Flat => match region.ellipse() {
            Some(e) if p.x.abs() < e.c() => ZoneTag::FlatFocal,
            Some(_) => ZoneTag::FlatOuter,
            None => ZoneTag::FlatFocal,
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bounce {
    pub index: usize,
    /// Arc-length parameter of the hit.
    pub s: f64,
    pub position: Point,
    pub incoming: Point,
    pub outgoing: Point,
    /// Caustic parameter of the chord ending at this bounce.
    pub mu: Option<f64>,
    pub zone: ZoneTag,
}

/// Length scale for the corner exclusion disk.
fn half_width(region: &dyn Region) -> f64 {
    match region.ellipse() {
        Some(e) => e.a(),
        None => 0.5 * (region.bbox().max.x - region.bbox().min.x),
    }
}

/// Advance a ray to its next boundary hit and reflect it.
pub fn step(region: &dyn Region, ray: &Ray) -> Result<Bounce, BilliardError> {
    let boundary = region.boundary();
    let hit = boundary
        .first_hit(ray.origin, ray.direction, MIN_TRAVEL)
        .ok_or(BilliardError::Escaped)?;
    if boundary.corner_distance(hit.point) <= CORNER_TOL * half_width(region) {
        return Err(BilliardError::GrazingOrCorner {
            point: hit.point,
            corner: true,
        });
    }
    let frame = boundary.frame(hit.piece, hit.t);
    let n = frame.normal();
    let cos = ray.direction.dot(&n);
    if cos < 0.0 {
        return Err(BilliardError::Escaped);
    }
    if cos < GRAZING_TOL {
        return Err(BilliardError::GrazingOrCorner {
            point: hit.point,
            corner: false,
        });
    }
    let outgoing = (ray.direction - 2.0 * cos * n).normalize();
    let tag = boundary.pieces()[hit.piece].tag;
    Ok(Bounce {
        index: 0,
        s: boundary.s_of(hit.piece, hit.t),
        position: hit.point,
        incoming: ray.direction,
        outgoing,
        mu: region
            .ellipse()
            .map(|e| caustic_parameter(&e, ray.origin, hit.point)),
        zone: zone_tag(region, tag, hit.point),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub start: Point,
    pub bounces: Vec<Bounce>,
    /// Why the trajectory stopped early, if it did.
    pub abandoned: Option<String>,
}

impl Trajectory {
    pub fn is_abandoned(&self) -> bool {
        self.abandoned.is_some()
    }

    /// Bit set of visited zones.
    pub fn zones(&self) -> u8 {
        self.bounces.iter().fold(0, |acc, b| acc | b.zone.bit())
    }

    pub fn visits(&self, z: ZoneTag) -> bool {
        self.zones() & z.bit() != 0
    }

    /// Spread of the caustic parameter over all chords.
    pub fn mu_drift(&self) -> f64 {
        let mus = self.bounces.iter().filter_map(|b| b.mu);
        let (lo, hi) = mus.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), m| {
            (l.min(m), h.max(m))
        });
        if hi >= lo {
            hi - lo
        } else {
            0.0
        }
    }
}

/// Follow `n_bounces` reflections; a corner or grazing hit ends the
/// trajectory early with `abandoned` set.
pub fn trace(region: &dyn Region, ray: &Ray, n_bounces: usize) -> Trajectory {
    let mut bounces = Vec::with_capacity(n_bounces);
    let mut current = *ray;
    let mut abandoned = None;
    for i in 0..n_bounces {
        match step(region, &current) {
            Ok(mut b) => {
                b.index = i;
                current = Ray {
                    origin: b.position,
                    direction: b.outgoing,
                };
                bounces.push(b);
            }
            Err(e) => {
                abandoned = Some(e.to_string());
                break;
            }
        }
    }
    Trajectory {
        start: ray.origin,
        bounces,
        abandoned,
    }
}

/// Zone consistency on the bump-free bottom: a chord with `mu > b^2` lands
/// at `|x| < c`, one with `mu < b^2` at `|x| > c`. Returns the number of
/// violating bounces.
pub fn zone_consistency_failures(ellipse: &EllipseSpec, traj: &Trajectory) -> usize {
    let c = ellipse.c();
    traj.bounces
        .iter()
        .filter(|b| matches!(b.zone, ZoneTag::FlatFocal | ZoneTag::FlatOuter))
        .filter(|b| match b.mu.map(|m| classify(ellipse, m)) {
            Some(CrossingClass::FocalCrossing) => b.position.x.abs() >= c,
            Some(CrossingClass::Outer) => b.position.x.abs() <= c,
            _ => false,
        })
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_domain, build_ellipse, DomainSpec};

    fn half_ellipse() -> DomainSpec {
        build_domain(build_ellipse(2.0, 1.0).unwrap(), vec![], vec![], 0.0).unwrap()
    }

    #[test]
    fn normal_incidence_on_top() {
        let d = half_ellipse();
        let b = step(&d, &Ray::new(Point::new(0.0, 0.5), Point::new(0.0, 1.0))).unwrap();
        assert!((b.position - Point::new(0.0, 1.0)).norm() < 1e-14);
        assert!((b.outgoing - Point::new(0.0, -1.0)).norm() < 1e-14);
        assert_eq!(b.zone, ZoneTag::Arc);
    }

    #[test]
    fn flat_wall_reflection() {
        let d = half_ellipse();
        let b = step(&d, &Ray::new(Point::new(0.0, 0.5), Point::new(0.0, -1.0))).unwrap();
        assert!(b.position.norm() < 1e-14);
        assert!((b.outgoing - Point::new(0.0, 1.0)).norm() < 1e-14);
        assert_eq!(b.zone, ZoneTag::FlatFocal);
    }

    #[test]
    fn corner_hit_abandoned() {
        let d = half_ellipse();
        let o = Point::new(0.0, 0.5);
        let r = step(&d, &Ray::new(o, Point::new(2.0, 0.0) - o));
        assert!(matches!(
            r,
            Err(BilliardError::GrazingOrCorner { corner: true, .. })
        ));
    }

    #[test]
    fn caustic_closed_forms() {
        let e = build_ellipse(2.0, 1.0).unwrap();
        let mu = caustic_parameter(&e, Point::new(-1.0, 0.0), Point::new(1.0, 0.0));
        assert!((mu - 1.0).abs() < 1e-15);
        assert_eq!(classify(&e, mu), CrossingClass::Separatrix);
        let mu = caustic_parameter(&e, Point::new(0.0, -1.0), Point::new(0.0, 1.0));
        assert!((mu - 4.0).abs() < 1e-15);
        assert_eq!(classify(&e, mu), CrossingClass::FocalCrossing);
    }

    #[test]
    fn lines_through_focus_are_separatrix() {
        let e = build_ellipse(2.0, 1.0).unwrap();
        let f = Point::new(e.c(), 0.0);
        for k in 0..100 {
            let ang = 0.0314 * k as f64 + 0.01;
            let p = f + Point::new(ang.cos(), ang.sin());
            let mu = caustic_parameter(&e, f, p);
            assert!((mu - 1.0).abs() < 1e-14, "angle {ang}: mu = {mu}");
        }
    }

    #[test]
    fn vertical_orbit_is_period_two() {
        let d = half_ellipse();
        let t = trace(&d, &Ray::new(Point::new(0.0, 0.3), Point::new(0.0, 1.0)), 6);
        assert!(!t.is_abandoned());
        for (i, b) in t.bounces.iter().enumerate() {
            let y = if i % 2 == 0 { 1.0 } else { 0.0 };
            assert!((b.position - Point::new(0.0, y)).norm() < 1e-13);
            assert!((b.mu.unwrap() - 4.0).abs() < 1e-12);
        }
    }
}
