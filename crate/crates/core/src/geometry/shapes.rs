//! Validation shapes with closed-form spectra or orbit sets.

use std::f64::consts::PI;

use super::boundary::{Boundary, Curve, PieceTag};
use super::ellipse::EllipseSpec;
use super::{BBox, Point, Region};

/// Disk of given radius centered at the origin.
#[derive(Debug, Clone)]
pub struct Disk {
    pub radius: f64,
    boundary: Boundary,
}

impl Disk {
    pub fn new(radius: f64) -> Self {
        let boundary = Boundary::new(
            vec![(
                Curve::Circle {
                    center: Point::zeros(),
                    radius,
                    t0: 0.0,
                    t1: 2.0 * PI,
                },
                PieceTag::Arc,
            )],
            vec![],
        );
        Self { radius, boundary }
    }
}

fn chord(r: f64, u: f64) -> f64 {
    (r * r - u * u).max(0.0).sqrt()
}

impl Region for Disk {
    fn boundary(&self) -> &Boundary {
        &self.boundary
    }
    fn contains(&self, p: Point) -> bool {
        p.norm() < self.radius
    }
    fn bbox(&self) -> BBox {
        BBox {
            min: Point::new(-self.radius, -self.radius),
            max: Point::new(self.radius, self.radius),
        }
    }
    fn vertical_sections(&self, x: f64) -> Vec<(f64, f64)> {
        if x.abs() >= self.radius {
            return vec![];
        }
        let h = chord(self.radius, x);
        vec![(-h, h)]
    }
    fn horizontal_sections(&self, y: f64) -> Vec<(f64, f64)> {
        self.vertical_sections(y)
    }
    fn x_breaks(&self) -> Vec<f64> {
        vec![-self.radius, 0.0, self.radius]
    }
    fn y_breaks(&self) -> Vec<f64> {
        self.x_breaks()
    }
}

/// Upper half-disk `{|p| < r, y > 0}`.
#[derive(Debug, Clone)]
pub struct HalfDisk {
    pub radius: f64,
    boundary: Boundary,
}

impl HalfDisk {
    pub fn new(radius: f64) -> Self {
        let boundary = Boundary::new(
            vec![
                (
                    Curve::Line {
                        start: Point::new(-radius, 0.0),
                        end: Point::new(radius, 0.0),
                    },
                    PieceTag::Flat,
                ),
                (
                    Curve::Circle {
                        center: Point::zeros(),
                        radius,
                        t0: 0.0,
                        t1: PI,
                    },
                    PieceTag::Arc,
                ),
            ],
            vec![Point::new(-radius, 0.0), Point::new(radius, 0.0)],
        );
        Self { radius, boundary }
    }
}

impl Region for HalfDisk {
    fn boundary(&self) -> &Boundary {
        &self.boundary
    }
    fn contains(&self, p: Point) -> bool {
        p.y > 0.0 && p.norm() < self.radius
    }
    fn bbox(&self) -> BBox {
        BBox {
            min: Point::new(-self.radius, 0.0),
            max: Point::new(self.radius, self.radius),
        }
    }
    fn vertical_sections(&self, x: f64) -> Vec<(f64, f64)> {
        if x.abs() >= self.radius {
            return vec![];
        }
        vec![(0.0, chord(self.radius, x))]
    }
    fn horizontal_sections(&self, y: f64) -> Vec<(f64, f64)> {
        if y <= 0.0 || y >= self.radius {
            return vec![];
        }
        let h = chord(self.radius, y);
        vec![(-h, h)]
    }
    fn x_breaks(&self) -> Vec<f64> {
        vec![-self.radius, 0.0, self.radius]
    }
    fn y_breaks(&self) -> Vec<f64> {
        vec![0.0, self.radius]
    }
}

/// Axis-aligned rectangle `[0, w] x [0, h]`.
#[derive(Debug, Clone)]
pub struct Rectangle {
    pub width: f64,
    pub height: f64,
    boundary: Boundary,
}

impl Rectangle {
    pub fn new(width: f64, height: f64) -> Self {
        let c = [
            Point::new(0.0, 0.0),
            Point::new(width, 0.0),
            Point::new(width, height),
            Point::new(0.0, height),
        ];
        let parts = (0..4)
            .map(|i| {
                (
                    Curve::Line {
                        start: c[i],
                        end: c[(i + 1) % 4],
                    },
                    PieceTag::Side,
                )
            })
            .collect();
        Self {
            width,
            height,
            boundary: Boundary::new(parts, c.to_vec()),
        }
    }
}

impl Region for Rectangle {
    fn boundary(&self) -> &Boundary {
        &self.boundary
    }
    fn contains(&self, p: Point) -> bool {
        p.x > 0.0 && p.x < self.width && p.y > 0.0 && p.y < self.height
    }
    fn bbox(&self) -> BBox {
        BBox {
            min: Point::zeros(),
            max: Point::new(self.width, self.height),
        }
    }
    fn vertical_sections(&self, x: f64) -> Vec<(f64, f64)> {
        if x <= 0.0 || x >= self.width {
            return vec![];
        }
        vec![(0.0, self.height)]
    }
    fn horizontal_sections(&self, y: f64) -> Vec<(f64, f64)> {
        if y <= 0.0 || y >= self.height {
            return vec![];
        }
        vec![(0.0, self.width)]
    }
    fn x_breaks(&self) -> Vec<f64> {
        vec![0.0, self.width]
    }
    fn y_breaks(&self) -> Vec<f64> {
        vec![0.0, self.height]
    }
}

/// Full ellipse, the integrable billiard used to validate orbit search.
#[derive(Debug, Clone)]
pub struct FullEllipse {
    pub spec: EllipseSpec,
    boundary: Boundary,
}

impl FullEllipse {
    pub fn new(spec: EllipseSpec) -> Self {
        let boundary = Boundary::new(
            vec![(
                Curve::Ellipse {
                    center: Point::zeros(),
                    a: spec.a(),
                    b: spec.b(),
                    t0: 0.0,
                    t1: 2.0 * PI,
                },
                PieceTag::Arc,
            )],
            vec![],
        );
        Self { spec, boundary }
    }
}

impl Region for FullEllipse {
    fn boundary(&self) -> &Boundary {
        &self.boundary
    }
    fn contains(&self, p: Point) -> bool {
        self.spec.contains(p)
    }
    fn bbox(&self) -> BBox {
        BBox {
            min: Point::new(-self.spec.a(), -self.spec.b()),
            max: Point::new(self.spec.a(), self.spec.b()),
        }
    }
    fn vertical_sections(&self, x: f64) -> Vec<(f64, f64)> {
        if x.abs() >= self.spec.a() {
            return vec![];
        }
        let h = self.spec.upper_y(x);
        vec![(-h, h)]
    }
    fn horizontal_sections(&self, y: f64) -> Vec<(f64, f64)> {
        let (a, b) = (self.spec.a(), self.spec.b());
        if y.abs() >= b {
            return vec![];
        }
        let h = a * (1.0 - (y / b).powi(2)).sqrt();
        vec![(-h, h)]
    }
    fn x_breaks(&self) -> Vec<f64> {
        vec![-self.spec.a(), 0.0, self.spec.a()]
    }
    fn y_breaks(&self) -> Vec<f64> {
        vec![-self.spec.b(), 0.0, self.spec.b()]
    }
    fn ellipse(&self) -> Option<EllipseSpec> {
        Some(self.spec)
    }
}
