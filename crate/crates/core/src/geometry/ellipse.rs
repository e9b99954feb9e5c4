use serde::{Deserialize, Serialize};

use super::{GeometryError, Point};

/// The half-ellipse base of a mushroom: centered at the origin, major axis
/// along x, foci at `(±c, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawEllipse", into = "RawEllipse")]
pub struct EllipseSpec {
    a: f64,
    b: f64,
}

#[derive(Serialize, Deserialize)]
struct RawEllipse {
    a: f64,
    b: f64,
}

impl TryFrom<RawEllipse> for EllipseSpec {
    type Error = GeometryError;
    fn try_from(raw: RawEllipse) -> Result<Self, Self::Error> {
        build_ellipse(raw.a, raw.b)
    }
}

impl From<EllipseSpec> for RawEllipse {
    fn from(e: EllipseSpec) -> Self {
        RawEllipse { a: e.a, b: e.b }
    }
}

pub fn build_ellipse(a: f64, b: f64) -> Result<EllipseSpec, GeometryError> {
    if !(a.is_finite() && b.is_finite()) || b <= 0.0 || a <= b {
        return Err(GeometryError::DegenerateEllipse { a, b });
    }
    Ok(EllipseSpec { a, b })
}

impl EllipseSpec {
    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Focal half-distance, `sqrt(a^2 - b^2)`.
    pub fn c(&self) -> f64 {
        ((self.a - self.b) * (self.a + self.b)).sqrt()
    }

    pub fn foci(&self) -> (Point, Point) {
        let c = self.c();
        (Point::new(-c, 0.0), Point::new(c, 0.0))
    }

    pub fn center(&self) -> Point {
        Point::new(0.0, 0.0)
    }

    pub fn point(&self, theta: f64) -> Point {
        Point::new(self.a * theta.cos(), self.b * theta.sin())
    }

    /// Upper half height at abscissa `x` (zero outside `[-a, a]`).
    pub fn upper_y(&self, x: f64) -> f64 {
        let r = 1.0 - (x / self.a).powi(2);
        if r <= 0.0 {
            0.0
        } else {
            self.b * r.sqrt()
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        (p.x / self.a).powi(2) + (p.y / self.b).powi(2) < 1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn focal_distance() {
        let e = build_ellipse(2.0, 1.0).unwrap();
        assert!((e.c() - 3f64.sqrt()).abs() < 1e-15);
        let e = build_ellipse(5.0, 3.0).unwrap();
        assert_eq!(e.c(), 4.0);
        let (f, g) = e.foci();
        assert_eq!((f.x, g.x), (-4.0, 4.0));
    }

    #[test]
    fn degenerate_ellipses_rejected() {
        assert!(matches!(
            build_ellipse(1.0, 1.0),
            Err(GeometryError::DegenerateEllipse { .. })
        ));
        assert!(build_ellipse(1.0, 0.0).is_err());
        assert!(build_ellipse(1.0, 2.0).is_err());
        assert!(build_ellipse(f64::NAN, 0.5).is_err());
    }

    #[test]
    fn serde_validates() {
        let e: EllipseSpec = serde_json::from_str(r#"{"a":2.0,"b":1.0}"#).unwrap();
        assert_eq!(e.a(), 2.0);
        assert!(serde_json::from_str::<EllipseSpec>(r#"{"a":1.0,"b":1.0}"#).is_err());
    }
}
