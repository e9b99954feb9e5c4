//! Mushroom domains: the half-ellipse base, bottom bumps, the duality
//! reflection `x -> -x`, and a few validation shapes sharing the same
//! [`Region`] interface.

mod boundary;
mod bump;
mod domain;
mod ellipse;
mod pair;
mod shapes;

pub use boundary::{
    brent_root, cross, Boundary, BoundaryPoint, Curve, Frame, Hit, Piece, PieceTag,
};
pub use bump::{bottom_height, bump_profile, bump_profile_d1, bump_profile_d2, BumpSpec};
pub use domain::{build_domain, reflect, BuildOptions, DomainConfig, DomainSpec, Zone};
pub use ellipse::{build_ellipse, EllipseSpec};
pub use pair::{make_pair, MushroomPair, PairStatus};
pub use shapes::{Disk, FullEllipse, HalfDisk, Rectangle};

use thiserror::Error;

pub type Point = nalgebra::Vector2<f64>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("degenerate ellipse: need a > b > 0, got a = {a}, b = {b}")]
    DegenerateEllipse { a: f64, b: f64 },
    #[error("{list} bump #{index} with support ({lo}, {hi}) leaves the {zone} zone ({zone_lo}, {zone_hi}) with clearance {clearance}")]
    ZoneViolation {
        list: &'static str,
        index: usize,
        lo: f64,
        hi: f64,
        zone: &'static str,
        zone_lo: f64,
        zone_hi: f64,
        clearance: f64,
    },
    #[error("bump supports overlap: {first} and {second}")]
    OverlapViolation { first: String, second: String },
    #[error("invalid bump {list} #{index}: half_width and depth must be positive and finite")]
    InvalidBump { list: &'static str, index: usize },
    #[error("invalid corner rounding {radius}: {reason}")]
    InvalidRounding { radius: f64, reason: String },
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    pub min: Point,
    pub max: Point,
}

impl BBox {
    pub fn diameter(&self) -> f64 {
        (self.max - self.min).norm()
    }
}

/// A bounded open planar domain with a piecewise smooth boundary.
pub trait Region: Send + Sync {
    fn boundary(&self) -> &Boundary;

    /// Strict interior test.
    fn contains(&self, p: Point) -> bool;

    fn bbox(&self) -> BBox;

    /// Sorted intervals of `y` where `(x, y)` lies inside.
    fn vertical_sections(&self, x: f64) -> Vec<(f64, f64)>;

    /// Sorted intervals of `x` where `(x, y)` lies inside.
    fn horizontal_sections(&self, y: f64) -> Vec<(f64, f64)>;

    /// Abscissas where the vertical sections change smoothness.
    fn x_breaks(&self) -> Vec<f64>;

    /// Ordinates where the horizontal sections change smoothness.
    fn y_breaks(&self) -> Vec<f64>;

    /// Base ellipse for caustic classification, if any.
    fn ellipse(&self) -> Option<EllipseSpec> {
        None
    }

    /// Unsigned curvature scale below which boundary features live near
    /// the given piece (used for source placement).
    fn feature_scale(&self, _piece: usize) -> f64 {
        self.bbox().diameter()
    }
}

/// Mirror image under the duality reflection.
#[inline]
pub fn mirror_point(p: Point) -> Point {
    Point::new(-p.x, p.y)
}
