//! Area quadrature on a region by Gauss–Legendre strips.
//!
//! The outer variable runs over intervals between the region's smoothness
//! breaks. Section lengths can have square-root endpoints there (the arc
//! meeting the major axis, the tip of a bump), so each interval is mapped
//! through the cubic `3τ² - 2τ³`, which flattens both ends. The inner
//! variable runs over each section with composite panels split at the
//! other direction's breaks. Vertical
//! and horizontal strips give two independent rules for the same integral.

use crate::geometry::{Point, Region};
use crate::quad::{composite, GaussLegendre};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StripDirection {
    /// Outer variable `x`, sections in `y`.
    Vertical,
    /// Outer variable `y`, sections in `x`.
    Horizontal,
}

const ORDER: usize = 16;
const DYADIC_LEVELS: usize = 40;

fn intervals(lo: f64, hi: f64, mut breaks: Vec<f64>) -> Vec<(f64, f64)> {
    let tol = 1e-12 * (hi - lo);
    breaks.retain(|b| *b > lo + tol && *b < hi - tol);
    breaks.push(lo);
    breaks.push(hi);
    breaks.sort_by(|a, b| a.total_cmp(b));
    breaks.dedup_by(|a, b| (*a - *b).abs() <= tol);
    breaks.windows(2).map(|w| (w[0], w[1])).collect()
}

/// Nodes and weights for `∫_Ω g dA`. `h` is the target panel length.
pub fn strip_rule(region: &dyn Region, dir: StripDirection, h: f64) -> Vec<(Point, f64)> {
    let rule = GaussLegendre::new(ORDER);
    let bb = region.bbox();
    let (lo, hi, breaks, inner_breaks) = match dir {
        StripDirection::Vertical => (bb.min.x, bb.max.x, region.x_breaks(), region.y_breaks()),
        StripDirection::Horizontal => (bb.min.y, bb.max.y, region.y_breaks(), region.x_breaks()),
    };
    let mut spans = Vec::new();
    for (a, b) in intervals(lo, hi, breaks) {
        if dir == StripDirection::Horizontal && b == 0.0 {
            // just below the axis the bump flanks are flat to all orders and
            // the section ends move logarithmically; split dyadically
            let mut top = a;
            for _ in 0..DYADIC_LEVELS {
                spans.push((top, 0.5 * top, 1));
                top *= 0.5;
            }
            spans.push((top, 0.0, 1));
        } else {
            // narrow bump intervals still get several panels
            spans.push((a, b, ((b - a) / h).ceil() as usize + 3));
        }
    }
    let mut out = Vec::new();
    for (a, b, panels) in spans {
        for (t, wt) in composite(&rule, 0.0, 1.0, panels) {
            let u = a + (b - a) * t * t * (3.0 - 2.0 * t);
            let wu = wt * (b - a) * 6.0 * t * (1.0 - t);
            let sections = match dir {
                StripDirection::Vertical => region.vertical_sections(u),
                StripDirection::Horizontal => region.horizontal_sections(u),
            };
            for (c0, d0) in sections {
                for (c, d) in intervals(c0, d0, inner_breaks.clone()) {
                    let inner = ((d - c) / h).ceil().max(1.0) as usize;
                    for (v, wv) in composite(&rule, c, d, inner) {
                        let p = match dir {
                            StripDirection::Vertical => Point::new(u, v),
                            StripDirection::Horizontal => Point::new(v, u),
                        };
                        out.push((p, wu * wv));
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_domain, build_ellipse, BumpSpec, Disk, HalfDisk};
    use std::f64::consts::PI;

    fn area(r: &[(Point, f64)]) -> f64 {
        r.iter().map(|(_, w)| w).sum()
    }

    #[test]
    fn disk_and_half_disk_areas() {
        for dir in [StripDirection::Vertical, StripDirection::Horizontal] {
            let a = area(&strip_rule(&Disk::new(1.0), dir, 0.25));
            assert!((a - PI).abs() < 1e-9, "{a}");
            let a = area(&strip_rule(&HalfDisk::new(1.0), dir, 0.25));
            assert!((a - 0.5 * PI).abs() < 1e-9, "{a}");
        }
    }

    #[test]
    fn directions_agree_on_mushroom() {
        let d = build_domain(
            build_ellipse(2.0, 1.0).unwrap(),
            vec![
                BumpSpec::new(-1.85, 0.06, 0.05),
                BumpSpec::new(1.80, 0.05, 0.07),
            ],
            vec![BumpSpec::new(-0.8, 0.3, 0.25)],
            0.0,
        )
        .unwrap();
        let g = |p: Point| (1.0 + p.x * p.y).powi(2);
        let iv: f64 = strip_rule(&d, StripDirection::Vertical, 0.25)
            .iter()
            .map(|(p, w)| w * g(*p))
            .sum();
        let ih: f64 = strip_rule(&d, StripDirection::Horizontal, 0.25)
            .iter()
            .map(|(p, w)| w * g(*p))
            .sum();
        assert!((iv - ih).abs() < 1e-12 * iv, "{iv} {ih}");
    }
}
