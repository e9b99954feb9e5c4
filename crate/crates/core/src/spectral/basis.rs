//! Fundamental-solution basis `Y0(k |x - y_j|)` with sources `y_j` pushed
//! outside the boundary.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::SpectralError;
use crate::geometry::{Curve, Point, Region};
use crate::rng;

/// Node placement parameters. Lengths marked "relative" are fractions of
/// the bounding-box diameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BasisOptions {
    /// Target number of sources.
    pub n_src: usize,
    /// Collocation points per source, at least 2.
    pub col_per_src: usize,
    pub n_interior: usize,
    /// Largest source offset (relative).
    pub offset_max_rel: f64,
    /// Source spacing grows like `grading * distance` from a bump edge.
    pub grading: f64,
    /// Smallest spacing near a bump edge, relative to the bump half-width...
    pub hmin_rel: f64,
    /// ...but never above this (relative).
    pub hmin_max_rel: f64,
    /// Offset as a multiple of the local spacing.
    pub offset_ratio: f64,
    /// Offset as a multiple of the distance to the nearest bump edge.
    pub edge_offset: f64,
    /// Offset cap as a fraction of the radius of curvature where the
    /// boundary bends away from the domain.
    pub curvature_cap: f64,
    /// Node density multiplier on bump supports.
    pub bump_density: f64,
    pub seed: u64,
}

impl Default for BasisOptions {
    fn default() -> Self {
        Self {
            n_src: 400,
            col_per_src: 2,
            n_interior: 60,
            offset_max_rel: 0.15,
            grading: 0.07,
            hmin_rel: 0.01,
            hmin_max_rel: 5e-4,
            offset_ratio: 2.0,
            edge_offset: 0.5,
            curvature_cap: 0.5,
            bump_density: 1.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HelmholtzBasis {
    pub sources: Vec<Point>,
    pub offsets: Vec<f64>,
    pub collocation: Vec<Point>,
    /// Dense boundary points for residual checks (4x collocation).
    pub check: Vec<Point>,
    pub interior: Vec<Point>,
}

#[inline]
pub fn y0(x: f64) -> f64 {
    libm::y0(x)
}

#[inline]
pub fn y1(x: f64) -> f64 {
    libm::y1(x)
}

/// Bump support ends along the boundary, as `(s, half_width)`.
fn edges(region: &dyn Region) -> Vec<(f64, f64)> {
    let b = region.boundary();
    b.pieces()
        .iter()
        .filter_map(|p| match p.curve {
            Curve::Graph { bump } => {
                Some([(p.s0, bump.half_width), (p.s0 + p.length, bump.half_width)])
            }
            _ => None,
        })
        .flatten()
        .collect()
}

struct Spacing {
    h0: f64,
    grading: f64,
    perimeter: f64,
    /// `(s, smallest spacing)` at each bump support end.
    edges: Vec<(f64, f64)>,
}

impl Spacing {
    fn edge_distance(&self, s: f64) -> f64 {
        self.edges
            .iter()
            .map(|&(e, _)| {
                let d = (s - e).abs();
                d.min(self.perimeter - d)
            })
            .fold(f64::INFINITY, f64::min)
    }

    fn h(&self, s: f64, on_bump: bool, density: f64) -> f64 {
        let mut h = if on_bump { self.h0 / density } else { self.h0 };
        for &(e, hmin) in &self.edges {
            let d = (s - e).abs();
            let d = d.min(self.perimeter - d);
            h = h.min((self.grading * d).max(hmin));
        }
        h
    }
}

/// Node positions (arc length) on `[s0, s0 + len]` equidistributing `1/h`.
fn piece_nodes(s0: f64, len: f64, hmin: f64, h: impl Fn(f64) -> f64) -> Vec<f64> {
    let fine = ((4.0 * len / hmin).ceil() as usize).max(4000);
    let ds = len / fine as f64;
    let mut cum = Vec::with_capacity(fine + 1);
    cum.push(0.0);
    let mut acc = 0.0;
    for i in 0..fine {
        let a = s0 + i as f64 * ds;
        // Simpson on each fine cell
        acc += ds / 6.0 * (1.0 / h(a) + 4.0 / h(a + 0.5 * ds) + 1.0 / h(a + ds));
        cum.push(acc);
    }
    let n = (acc.ceil() as usize).max(2);
    (0..=n)
        .map(|j| {
            let target = acc * j as f64 / n as f64;
            let i = cum.partition_point(|&c| c < target).clamp(1, fine);
            let frac = (target - cum[i - 1]) / (cum[i] - cum[i - 1]).max(f64::MIN_POSITIVE);
            s0 + (i as f64 - 1.0 + frac) * ds
        })
        .collect()
}

fn node_intervals(region: &dyn Region, sp: &Spacing, density: f64) -> Vec<(f64, f64)> {
    let b = region.boundary();
    let mut out = Vec::new();
    for p in b.pieces() {
        let on_bump = matches!(p.curve, Curve::Graph { .. });
        let hmin = sp.edges.iter().map(|e| e.1).fold(sp.h0, f64::min);
        let nodes = piece_nodes(p.s0, p.length, hmin, |s| sp.h(s, on_bump, density));
        out.extend(nodes.windows(2).map(|w| (w[0], w[1])));
    }
    out
}

impl HelmholtzBasis {
    pub fn build(region: &dyn Region, opts: &BasisOptions) -> Result<Self, SpectralError> {
        if opts.col_per_src < 2 {
            return Err(SpectralError::InvalidInput(
                "need at least two collocation points per source".into(),
            ));
        }
        if opts.n_src < 8 {
            return Err(SpectralError::InvalidInput(
                "need at least 8 sources".into(),
            ));
        }
        let boundary = region.boundary();
        let diam = region.bbox().diameter();
        let perimeter = boundary.perimeter();
        let mut sp = Spacing {
            h0: perimeter / opts.n_src as f64,
            grading: opts.grading,
            perimeter,
            edges: edges(region)
                .into_iter()
                .map(|(s, w)| (s, (opts.hmin_rel * w).min(opts.hmin_max_rel * diam)))
                .collect(),
        };
        // pick the base spacing so the node count matches the target
        let count = |sp: &Spacing| node_intervals(region, sp, opts.bump_density).len();
        let (mut lo, mut hi) = (perimeter / (4.0 * opts.n_src as f64), perimeter / 4.0);
        for _ in 0..40 {
            sp.h0 = (lo * hi).sqrt();
            if count(&sp) > opts.n_src {
                lo = sp.h0;
            } else {
                hi = sp.h0;
            }
        }
        sp.h0 = hi;
        let intervals = node_intervals(region, &sp, opts.bump_density);

        let dmax = opts.offset_max_rel * diam;
        let mut sources = Vec::with_capacity(intervals.len());
        let mut offsets = Vec::with_capacity(intervals.len());
        let mut collocation = Vec::new();
        let mut check = Vec::new();
        let m = opts.col_per_src;
        for &(s_a, s_b) in &intervals {
            let h = s_b - s_a;
            let mid = 0.5 * (s_a + s_b);
            let bp = boundary.eval(mid);
            let mut d =
                dmax.min((opts.offset_ratio * h).max(opts.edge_offset * sp.edge_distance(mid)));
            if bp.curvature < 0.0 {
                d = d.min(opts.curvature_cap / -bp.curvature);
            }
            // keep the source clear of the rest of the boundary
            let mut src = bp.position + d * bp.normal;
            for _ in 0..20 {
                let (_, _, dist) = boundary.locate_point(src);
                if !region.contains(src) && dist >= 0.5 * d {
                    break;
                }
                d *= 0.5;
                src = bp.position + d * bp.normal;
            }
            if region.contains(src) {
                return Err(SpectralError::InvalidInput(format!(
                    "source at ({}, {}) falls inside the domain",
                    src.x, src.y
                )));
            }
            sources.push(src);
            offsets.push(d);
            for j in 0..m {
                collocation.push(
                    boundary
                        .eval(s_a + h * (j as f64 + 0.5) / m as f64)
                        .position,
                );
            }
            for j in 0..4 * m {
                check.push(
                    boundary
                        .eval(s_a + h * (j as f64 + 0.25) / (4 * m) as f64)
                        .position,
                );
            }
        }
        let interior = interior_nodes(region, opts.n_interior, opts.seed);
        Ok(Self {
            sources,
            offsets,
            collocation,
            check,
            interior,
        })
    }

    pub fn n_src(&self) -> usize {
        self.sources.len()
    }

    pub fn n_col(&self) -> usize {
        self.collocation.len()
    }

    /// Rows: `points`, columns: sources.
    pub fn matrix(&self, k: f64, points: &[Point]) -> DMatrix<f64> {
        DMatrix::from_fn(points.len(), self.sources.len(), |i, j| {
            y0(k * (points[i] - self.sources[j]).norm())
        })
    }

    /// Stacked boundary and interior blocks.
    pub fn system(&self, k: f64) -> DMatrix<f64> {
        let nb = self.collocation.len();
        let n = self.sources.len();
        DMatrix::from_fn(nb + self.interior.len(), n, |i, j| {
            let p = if i < nb {
                self.collocation[i]
            } else {
                self.interior[i - nb]
            };
            y0(k * (p - self.sources[j]).norm())
        })
    }

    /// Basis combination and its gradient at `p`.
    pub fn eval(&self, k: f64, coeffs: &[f64], p: Point) -> (f64, Point) {
        let mut v = 0.0;
        let mut g = Point::zeros();
        for (c, s) in coeffs.iter().zip(&self.sources) {
            let d = p - s;
            let r = d.norm();
            v += c * y0(k * r);
            g -= (c * k * y1(k * r) / r) * d;
        }
        (v, g)
    }

    /// Basis for the mirror-image domain under `x -> -x`.
    pub fn mirrored(&self) -> Self {
        let m = |v: &[Point]| v.iter().map(|p| Point::new(-p.x, p.y)).collect();
        Self {
            sources: m(&self.sources),
            offsets: self.offsets.clone(),
            collocation: m(&self.collocation),
            check: m(&self.check),
            interior: m(&self.interior),
        }
    }
}

/// Fixed random interior points kept away from the boundary.
fn interior_nodes(region: &dyn Region, n: usize, seed: u64) -> Vec<Point> {
    use rand::Rng;
    let bb = region.bbox();
    let margin = 0.03 * bb.diameter();
    let boundary = region.boundary();
    let mut out = Vec::with_capacity(n);
    let mut r = rng::stream(seed, rng::streams::INTERIOR_NODES, 0);
    let mut tries = 0;
    while out.len() < n && tries < 1000 * n.max(1) {
        tries += 1;
        let p = Point::new(
            r.gen_range(bb.min.x..bb.max.x),
            r.gen_range(bb.min.y..bb.max.y),
        );
        if region.contains(p) && boundary.locate_point(p).2 >= margin {
            out.push(p);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_domain, build_ellipse, BumpSpec, Disk};

    #[test]
    fn bessel_reference_values() {
        assert!((libm::j0(1.0) - 0.7651976865579666).abs() < 1e-15);
        assert!((y0(1.0) - 0.08825696421567696).abs() < 1e-15);
        assert!((libm::j1(1.0) - 0.44005058574493355).abs() < 1e-15);
        assert!((y1(1.0) + 0.7812128213002887).abs() < 1e-15);
    }

    #[test]
    fn disk_sources_are_exterior_and_counted() {
        let d = Disk::new(1.0);
        let b = HelmholtzBasis::build(
            &d,
            &BasisOptions {
                n_src: 60,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(b.n_src(), 60);
        assert_eq!(b.n_col(), 120);
        assert_eq!(b.check.len(), 480);
        assert!(b.sources.iter().all(|s| s.norm() > 1.0));
        assert!(b.interior.iter().all(|p| p.norm() < 1.0));
    }

    #[test]
    fn bump_edges_are_graded() {
        let d = build_domain(
            build_ellipse(2.0, 1.0).unwrap(),
            vec![],
            vec![BumpSpec::new(-0.8, 0.3, 0.25)],
            0.0,
        )
        .unwrap();
        let b = HelmholtzBasis::build(
            &d,
            &BasisOptions {
                n_src: 400,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(b.n_src() <= 400 && b.n_src() >= 380, "{}", b.n_src());
        assert!(b.sources.iter().all(|s| !d.contains(*s)));
        let near_edge = b.offsets.iter().cloned().fold(f64::INFINITY, f64::min);
        let far = b.offsets.iter().cloned().fold(0.0, f64::max);
        assert!(near_edge < 0.02 && far > 0.3, "{near_edge} {far}");
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let d = Disk::new(1.0);
        let b = HelmholtzBasis::build(
            &d,
            &BasisOptions {
                n_src: 20,
                ..Default::default()
            },
        )
        .unwrap();
        let c: Vec<f64> = (0..b.n_src()).map(|i| (i as f64 * 0.7).sin()).collect();
        let p = Point::new(0.2, -0.3);
        let (_, g) = b.eval(3.0, &c, p);
        let e = 1e-6;
        let fx = (b.eval(3.0, &c, p + Point::new(e, 0.0)).0
            - b.eval(3.0, &c, p - Point::new(e, 0.0)).0)
            / (2.0 * e);
        let fy = (b.eval(3.0, &c, p + Point::new(0.0, e)).0
            - b.eval(3.0, &c, p - Point::new(0.0, e)).0)
            / (2.0 * e);
        assert!((fx - g.x).abs() < 1e-6 * (1.0 + g.x.abs()));
        assert!((fy - g.y).abs() < 1e-6 * (1.0 + g.y.abs()));
    }
}
