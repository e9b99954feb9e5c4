use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::boundary::{Boundary, Curve, PieceTag};
use super::bump::{bottom_height, BumpSpec};
use super::ellipse::EllipseSpec;
use super::{BBox, GeometryError, Point, Region};

/// Default zone clearance as a fraction of the semi-major axis.
pub const DEFAULT_CLEARANCE_FRACTION: f64 = 0.005;

/// The three admissible bump zones of the bottom segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Zone {
    LeftOuter,
    Focal,
    RightOuter,
}

impl Zone {
    pub fn name(&self) -> &'static str {
        match self {
            Zone::LeftOuter => "left outer",
            Zone::Focal => "focal",
            Zone::RightOuter => "right outer",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildOptions {
    /// Absolute clearance from zone endpoints; `None` uses `0.005 a`.
    pub clearance: Option<f64>,
    /// Skip zone/overlap checks (negative controls only).
    pub validate: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            clearance: None,
            validate: true,
        }
    }
}

/// Serializable description of a domain, the `geometry` block of a config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub ellipse: EllipseSpec,
    #[serde(default)]
    pub corner_rounding: f64,
    #[serde(default)]
    pub outer_bumps: Vec<BumpSpec>,
    #[serde(default)]
    pub focal_bumps: Vec<BumpSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clearance: Option<f64>,
}

/// Corner rounding circle near the right corner; the left one is its mirror.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Fillet {
    radius: f64,
    /// Abscissa of the circle center (and of the bottom tangent point).
    xc: f64,
    /// Polar angle (about the center) of the tangent point on the ellipse.
    alpha: f64,
    /// Tangent point on the ellipse.
    top: Point,
    /// Ellipse parameter of the tangent point.
    theta: f64,
}

impl Fillet {
    fn new(e: &EllipseSpec, r: f64) -> Result<Self, GeometryError> {
        let (a, b) = (e.a(), e.b());
        if !(r.is_finite() && r > 0.0 && r < 0.5 * b) {
            return Err(GeometryError::InvalidRounding {
                radius: r,
                reason: format!("need 0 <= r < b/2 = {}", 0.5 * b),
            });
        }
        // center = P(theta) - r n_out(theta) must sit at height r
        let h = |th: f64| {
            let nn = (b * b * th.cos().powi(2) + a * a * th.sin().powi(2)).sqrt();
            b * th.sin() - r * a * th.sin() / nn - r
        };
        let mut lo = 0.0;
        let mut hi = 0.5 * PI;
        // first sign change from the corner side
        let n = 2000;
        for k in 1..=n {
            let th = 0.5 * PI * k as f64 / n as f64;
            if h(th) > 0.0 {
                hi = th;
                lo = 0.5 * PI * (k - 1) as f64 / n as f64;
                break;
            }
        }
        let theta = super::brent_root(&h, lo, hi, h(lo), h(hi));
        let nn = (b * b * theta.cos().powi(2) + a * a * theta.sin().powi(2)).sqrt();
        let n_out = Point::new(b * theta.cos() / nn, a * theta.sin() / nn);
        let top = e.point(theta);
        let center = top - r * n_out;
        Ok(Self {
            radius: r,
            xc: center.x,
            alpha: n_out.y.atan2(n_out.x),
            top,
            theta,
        })
    }

    /// Whether `p` (with `p.x >= 0`) lies in the region cut off by the
    /// right fillet.
    fn cuts(&self, p: Point) -> bool {
        let q = Point::new(p.x - self.xc, p.y - self.radius);
        if q.x <= 0.0 {
            return false;
        }
        let ang = q.y.atan2(q.x);
        ang >= -0.5 * PI && ang <= self.alpha && q.norm() > self.radius
    }
}

/// A mushroom domain: upper half-ellipse arc over a bottom graph
/// `y = g(x) <= 0` built from mollifier bumps.
#[derive(Debug, Clone)]
pub struct DomainSpec {
    ellipse: EllipseSpec,
    outer_bumps: Vec<BumpSpec>,
    focal_bumps: Vec<BumpSpec>,
    corner_rounding: f64,
    clearance: f64,
    fillet: Option<Fillet>,
    boundary: Arc<Boundary>,
}

impl PartialEq for DomainSpec {
    fn eq(&self, other: &Self) -> bool {
        self.ellipse == other.ellipse
            && self.outer_bumps == other.outer_bumps
            && self.focal_bumps == other.focal_bumps
            && self.corner_rounding == other.corner_rounding
            && self.clearance == other.clearance
    }
}

fn sort_bumps(v: &mut [BumpSpec]) {
    v.sort_by(|x, y| x.center.total_cmp(&y.center));
}

pub fn build_domain(
    ellipse: EllipseSpec,
    outer: Vec<BumpSpec>,
    focal: Vec<BumpSpec>,
    rounding: f64,
) -> Result<DomainSpec, GeometryError> {
    DomainSpec::build(ellipse, outer, focal, rounding, BuildOptions::default())
}

/// Duality reflection `x -> -x` of a domain.
pub fn reflect(domain: &DomainSpec) -> DomainSpec {
    domain.reflected()
}

impl DomainSpec {
    pub fn build(
        ellipse: EllipseSpec,
        mut outer: Vec<BumpSpec>,
        mut focal: Vec<BumpSpec>,
        rounding: f64,
        opts: BuildOptions,
    ) -> Result<Self, GeometryError> {
        sort_bumps(&mut outer);
        sort_bumps(&mut focal);
        let clearance = opts
            .clearance
            .unwrap_or(DEFAULT_CLEARANCE_FRACTION * ellipse.a());
        if !(rounding.is_finite() && rounding >= 0.0) {
            return Err(GeometryError::InvalidRounding {
                radius: rounding,
                reason: "must be finite and non-negative".into(),
            });
        }
        let fillet = if rounding > 0.0 {
            Some(Fillet::new(&ellipse, rounding)?)
        } else {
            None
        };
        for (list, bumps) in [("outer", &outer), ("focal", &focal)] {
            for (index, b) in bumps.iter().enumerate() {
                if !b.is_valid() {
                    return Err(GeometryError::InvalidBump { list, index });
                }
            }
        }
        let spec = Self {
            ellipse,
            outer_bumps: outer,
            focal_bumps: focal,
            corner_rounding: rounding,
            clearance,
            fillet,
            boundary: Arc::new(Boundary::new(vec![], vec![])),
        };
        if opts.validate {
            spec.validate()?;
        }
        let boundary = spec.assemble_boundary();
        Ok(Self {
            boundary: Arc::new(boundary),
            ..spec
        })
    }

    pub fn from_config(cfg: &DomainConfig) -> Result<Self, GeometryError> {
        Self::build(
            cfg.ellipse,
            cfg.outer_bumps.clone(),
            cfg.focal_bumps.clone(),
            cfg.corner_rounding,
            BuildOptions {
                clearance: cfg.clearance,
                validate: true,
            },
        )
    }

    pub fn to_config(&self) -> DomainConfig {
        DomainConfig {
            ellipse: self.ellipse,
            corner_rounding: self.corner_rounding,
            outer_bumps: self.outer_bumps.clone(),
            focal_bumps: self.focal_bumps.clone(),
            clearance: Some(self.clearance),
        }
    }

    fn validate(&self) -> Result<(), GeometryError> {
        let a = self.ellipse.a();
        let c = self.ellipse.c();
        let d = self.clearance;
        let edge = self.fillet.map_or(a, |f| f.xc);
        let zone_bounds = |z: Zone| match z {
            Zone::LeftOuter => (-edge.min(a), -c),
            Zone::Focal => (-c, c),
            Zone::RightOuter => (c, edge.min(a)),
        };
        let check = |list: &'static str, index: usize, b: &BumpSpec, zones: &[Zone]| {
            let (lo, hi) = b.support();
            let fits = zones.iter().any(|&z| {
                let (zl, zh) = zone_bounds(z);
                lo >= zl + d && hi <= zh - d
            });
            if fits {
                return Ok(());
            }
            // report the zone containing the center
            let z = if b.center < -c {
                Zone::LeftOuter
            } else if b.center > c {
                Zone::RightOuter
            } else {
                Zone::Focal
            };
            let (zl, zh) = zone_bounds(z);
            Err(GeometryError::ZoneViolation {
                list,
                index,
                lo,
                hi,
                zone: z.name(),
                zone_lo: zl,
                zone_hi: zh,
                clearance: d,
            })
        };
        for (i, b) in self.outer_bumps.iter().enumerate() {
            check("outer", i, b, &[Zone::LeftOuter, Zone::RightOuter])?;
        }
        for (i, b) in self.focal_bumps.iter().enumerate() {
            check("focal", i, b, &[Zone::Focal])?;
        }
        let mut all: Vec<(String, BumpSpec)> = self
            .outer_bumps
            .iter()
            .enumerate()
            .map(|(i, b)| (format!("outer #{i}"), *b))
            .chain(
                self.focal_bumps
                    .iter()
                    .enumerate()
                    .map(|(i, b)| (format!("focal #{i}"), *b)),
            )
            .collect();
        all.sort_by(|x, y| x.1.support().0.total_cmp(&y.1.support().0));
        for w in all.windows(2) {
            if w[0].1.support().1 > w[1].1.support().0 {
                return Err(GeometryError::OverlapViolation {
                    first: format!("{} {:?}", w[0].0, w[0].1.support()),
                    second: format!("{} {:?}", w[1].0, w[1].1.support()),
                });
            }
        }
        Ok(())
    }

    fn assemble_boundary(&self) -> Boundary {
        let a = self.ellipse.a();
        let b = self.ellipse.b();
        let edge = self.fillet.map_or(a, |f| f.xc);
        let mut bumps: Vec<(BumpSpec, PieceTag)> = self
            .outer_bumps
            .iter()
            .map(|&b| (b, PieceTag::OuterBump))
            .chain(self.focal_bumps.iter().map(|&b| (b, PieceTag::FocalBump)))
            .collect();
        bumps.sort_by(|x, y| x.0.center.total_cmp(&y.0.center));
        let mut parts = Vec::new();
        let mut x = -edge;
        for (bump, tag) in bumps {
            let (lo, hi) = bump.support();
            let lo = lo.max(x);
            if lo > x {
                parts.push((
                    Curve::Line {
                        start: Point::new(x, 0.0),
                        end: Point::new(lo, 0.0),
                    },
                    PieceTag::Flat,
                ));
            }
            parts.push((Curve::Graph { bump }, tag));
            x = hi;
        }
        if edge > x {
            parts.push((
                Curve::Line {
                    start: Point::new(x, 0.0),
                    end: Point::new(edge, 0.0),
                },
                PieceTag::Flat,
            ));
        }
        let mut corners = Vec::new();
        match self.fillet {
            None => {
                parts.push((
                    Curve::Ellipse {
                        center: Point::zeros(),
                        a,
                        b,
                        t0: 0.0,
                        t1: PI,
                    },
                    PieceTag::Arc,
                ));
                corners.push(Point::new(-a, 0.0));
                corners.push(Point::new(a, 0.0));
            }
            Some(f) => {
                let right = Curve::Circle {
                    center: Point::new(f.xc, f.radius),
                    radius: f.radius,
                    t0: -0.5 * PI,
                    t1: f.alpha,
                };
                let left = right.mirrored();
                parts.push((right, PieceTag::Fillet));
                parts.push((
                    Curve::Ellipse {
                        center: Point::zeros(),
                        a,
                        b,
                        t0: f.theta,
                        t1: PI - f.theta,
                    },
                    PieceTag::Arc,
                ));
                parts.push((left, PieceTag::Fillet));
            }
        }
        Boundary::new(parts, corners)
    }

    pub fn reflected(&self) -> Self {
        let mut outer: Vec<BumpSpec> = self.outer_bumps.iter().map(|b| b.mirrored()).collect();
        let mut focal: Vec<BumpSpec> = self.focal_bumps.iter().map(|b| b.mirrored()).collect();
        sort_bumps(&mut outer);
        sort_bumps(&mut focal);
        let spec = Self {
            outer_bumps: outer,
            focal_bumps: focal,
            boundary: Arc::new(Boundary::new(vec![], vec![])),
            ..self.clone()
        };
        let boundary = spec.assemble_boundary();
        Self {
            boundary: Arc::new(boundary),
            ..spec
        }
    }

    /// Same base and outer bumps, different focal bumps (validated).
    pub fn with_focal_bumps(&self, focal: Vec<BumpSpec>) -> Result<Self, GeometryError> {
        Self::build(
            self.ellipse,
            self.outer_bumps.clone(),
            focal,
            self.corner_rounding,
            BuildOptions {
                clearance: Some(self.clearance),
                validate: true,
            },
        )
    }

    pub fn ellipse_spec(&self) -> &EllipseSpec {
        &self.ellipse
    }

    pub fn outer_bumps(&self) -> &[BumpSpec] {
        &self.outer_bumps
    }

    pub fn focal_bumps(&self) -> &[BumpSpec] {
        &self.focal_bumps
    }

    pub fn corner_rounding(&self) -> f64 {
        self.corner_rounding
    }

    pub fn clearance(&self) -> f64 {
        self.clearance
    }

    pub fn perimeter(&self) -> f64 {
        self.boundary.perimeter()
    }

    pub fn shared_boundary(&self) -> Arc<Boundary> {
        Arc::clone(&self.boundary)
    }

    /// Bottom profile `g(x)`.
    pub fn bottom(&self, x: f64) -> f64 {
        bottom_height(&self.outer_bumps, x) + bottom_height(&self.focal_bumps, x)
    }

    /// Half-open interval of the bottom that is a straight line.
    pub fn flat_extent(&self) -> f64 {
        self.fillet.map_or(self.ellipse.a(), |f| f.xc)
    }

    pub fn zone_of(&self, x: f64) -> Option<Zone> {
        let c = self.ellipse.c();
        let a = self.ellipse.a();
        if x <= -a || x >= a {
            None
        } else if x < -c {
            Some(Zone::LeftOuter)
        } else if x > c {
            Some(Zone::RightOuter)
        } else {
            Some(Zone::Focal)
        }
    }

    /// Whether the x-interval `(lo, hi)` lies in the focal zone with the
    /// domain's clearance and the bottom is flat on it apart from focal bumps.
    pub fn focal_interval_ok(&self, lo: f64, hi: f64) -> bool {
        let c = self.ellipse.c();
        lo >= -c + self.clearance
            && hi <= c - self.clearance
            && self.outer_bumps.iter().all(|b| {
                let (l, h) = b.support();
                h <= lo || l >= hi
            })
    }

    fn x_extent(&self) -> f64 {
        self.fillet.map_or(self.ellipse.a(), |f| f.xc + f.radius)
    }
}

impl Region for DomainSpec {
    fn boundary(&self) -> &Boundary {
        &self.boundary
    }

    fn contains(&self, p: Point) -> bool {
        if !(p.x.abs() < self.x_extent()) {
            return false;
        }
        if p.y <= 0.0 {
            if p.x.abs() >= self.flat_extent() {
                return false;
            }
            return p.y > self.bottom(p.x);
        }
        if !self.ellipse.contains(p) {
            return false;
        }
        match self.fillet {
            Some(f) => !f.cuts(Point::new(p.x.abs(), p.y)),
            None => true,
        }
    }

    fn bbox(&self) -> BBox {
        let depth = self
            .outer_bumps
            .iter()
            .chain(&self.focal_bumps)
            .map(|b| b.depth)
            .fold(0.0, f64::max);
        let a = self.x_extent();
        BBox {
            min: Point::new(-a, -depth),
            max: Point::new(a, self.ellipse.b()),
        }
    }

    fn vertical_sections(&self, x: f64) -> Vec<(f64, f64)> {
        let ax = x.abs();
        if ax >= self.x_extent() {
            return vec![];
        }
        match self.fillet {
            None => vec![(self.bottom(x), self.ellipse.upper_y(x))],
            Some(f) => {
                if ax <= f.xc {
                    return vec![(self.bottom(x), self.ellipse.upper_y(x))];
                }
                let dx = ax - f.xc;
                let root = (f.radius * f.radius - dx * dx).max(0.0).sqrt();
                let lo = f.radius - root;
                let hi = if ax <= f.top.x {
                    self.ellipse.upper_y(x)
                } else {
                    f.radius + root
                };
                vec![(lo, hi)]
            }
        }
    }

    fn horizontal_sections(&self, y: f64) -> Vec<(f64, f64)> {
        let b = self.ellipse.b();
        if y >= b {
            return vec![];
        }
        if y >= 0.0 {
            let mut half = self.ellipse.a() * (1.0 - (y / b).powi(2)).max(0.0).sqrt();
            if let Some(f) = self.fillet {
                if y < f.top.y {
                    let dy = y - f.radius;
                    half = f.xc + (f.radius * f.radius - dy * dy).max(0.0).sqrt();
                }
            }
            return vec![(-half, half)];
        }
        let mut out: Vec<(f64, f64)> = self
            .outer_bumps
            .iter()
            .chain(&self.focal_bumps)
            .filter_map(|bump| bump.level_crossings(y))
            .collect();
        out.sort_by(|p, q| p.0.total_cmp(&q.0));
        out
    }

    fn x_breaks(&self) -> Vec<f64> {
        let mut v = vec![-self.x_extent(), self.x_extent(), 0.0];
        for bump in self.outer_bumps.iter().chain(&self.focal_bumps) {
            let (lo, hi) = bump.support();
            v.extend([lo, bump.center, hi]);
        }
        if let Some(f) = self.fillet {
            v.extend([-f.xc, f.xc, -f.top.x, f.top.x]);
        }
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    fn y_breaks(&self) -> Vec<f64> {
        let mut v = vec![0.0, self.ellipse.b()];
        for bump in self.outer_bumps.iter().chain(&self.focal_bumps) {
            v.push(-bump.depth);
        }
        if let Some(f) = self.fillet {
            v.extend([f.radius, f.top.y]);
        }
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    fn ellipse(&self) -> Option<EllipseSpec> {
        Some(self.ellipse)
    }

    fn feature_scale(&self, piece: usize) -> f64 {
        let diam = self.bbox().diameter();
        let pieces = self.boundary.pieces();
        let own = |k: usize| match pieces[k].curve {
            Curve::Graph { bump } => 2.0 * bump.half_width,
            Curve::Line { .. } => pieces[k].length,
            Curve::Circle { radius, .. } => 2.0 * radius,
            Curve::Ellipse { .. } => diam,
        };
        let mut scale = own(piece);
        // a flat piece inherits the width of neighboring bumps
        if matches!(pieces[piece].curve, Curve::Line { .. }) {
            for k in [piece.wrapping_sub(1), piece + 1] {
                if k < pieces.len() {
                    if let Curve::Graph { bump } = pieces[k].curve {
                        scale = scale.min(4.0 * bump.half_width);
                    }
                }
            }
        }
        scale.min(diam)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_ellipse;

    fn e21() -> EllipseSpec {
        build_ellipse(2.0, 1.0).unwrap()
    }

    #[test]
    fn bare_perimeter() {
        let d = build_domain(e21(), vec![], vec![], 0.0).unwrap();
        // half of the full ellipse perimeter (9.688448220547675...) plus 2a
        assert!((d.perimeter() - (4.844_224_110_273_838 + 4.0)).abs() < 1e-9);
    }

    #[test]
    fn zone_violation_at_focus() {
        let r = build_domain(e21(), vec![BumpSpec::new(-1.7, 0.1, 0.05)], vec![], 0.0);
        assert!(matches!(r, Err(GeometryError::ZoneViolation { .. })));
        let r = build_domain(e21(), vec![], vec![BumpSpec::new(-1.7, 0.1, 0.05)], 0.0);
        assert!(matches!(
            r,
            Err(GeometryError::ZoneViolation { list: "focal", .. })
        ));
    }

    #[test]
    fn outer_bump_in_focal_zone_rejected() {
        let r = build_domain(e21(), vec![BumpSpec::new(0.0, 0.1, 0.05)], vec![], 0.0);
        assert!(matches!(
            r,
            Err(GeometryError::ZoneViolation { list: "outer", .. })
        ));
    }

    #[test]
    fn overlap_detected() {
        let r = build_domain(
            e21(),
            vec![],
            vec![
                BumpSpec::new(-0.8, 0.1, 0.05),
                BumpSpec::new(-0.7, 0.1, 0.05),
            ],
            0.0,
        );
        assert!(matches!(r, Err(GeometryError::OverlapViolation { .. })));
    }

    #[test]
    fn unchecked_build_allows_straddling_bump() {
        let d = DomainSpec::build(
            e21(),
            vec![],
            vec![BumpSpec::new(-1.73, 0.1, 0.05)],
            0.0,
            BuildOptions {
                clearance: None,
                validate: false,
            },
        );
        assert!(d.is_ok());
    }

    #[test]
    fn contains_matches_sections() {
        let d = build_domain(
            e21(),
            vec![BumpSpec::new(-1.85, 0.06, 0.05)],
            vec![BumpSpec::new(-0.8, 0.3, 0.25)],
            0.0,
        )
        .unwrap();
        assert!(d.contains(Point::new(-0.8, -0.2)));
        assert!(!d.contains(Point::new(-0.8, -0.26)));
        assert!(!d.contains(Point::new(0.3, -0.01)));
        assert!(d.contains(Point::new(0.3, 0.01)));
        assert!(!d.contains(Point::new(0.0, 1.0)));
        let s = d.horizontal_sections(-0.1);
        assert_eq!(s.len(), 1);
        assert!(d.contains(Point::new(0.5 * (s[0].0 + s[0].1), -0.1)));
    }

    #[test]
    fn rounding_is_tangent_and_self_dual() {
        let d = build_domain(e21(), vec![], vec![], 0.1).unwrap();
        let f = d.fillet.unwrap();
        // circle center at distance r from the ellipse tangent point
        assert!(((Point::new(f.xc, f.radius) - f.top).norm() - 0.1).abs() < 1e-12);
        assert_eq!(reflect(&d), d);
        let b = d.boundary();
        assert!(b.corners().is_empty());
        assert_eq!(b.winding_number(Point::new(0.0, 0.5), 4000), 1);
        // cut-off corner
        assert!(!d.contains(Point::new(f.xc + 0.099, 0.002)));
        assert!(d.contains(Point::new(f.xc + 0.05, f.radius)));
    }

    #[test]
    fn reflect_is_involution() {
        let d = build_domain(
            e21(),
            vec![
                BumpSpec::new(-1.85, 0.06, 0.05),
                BumpSpec::new(1.8, 0.05, 0.07),
            ],
            vec![BumpSpec::new(-0.5, 0.2, 0.1)],
            0.0,
        )
        .unwrap();
        let r = reflect(&d);
        assert_eq!(r.focal_bumps()[0].center, 0.5);
        assert_eq!(reflect(&r), d);
        assert_ne!(r, d);
    }
}
