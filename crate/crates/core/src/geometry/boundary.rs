//! Piecewise parametrized closed boundary curves.
//!
//! Every boundary is a counterclockwise chain of [`Curve`] pieces. Each piece
//! carries its own natural parameter `t`; the chain is addressed either by
//! arc length `s` or by the concatenated native parameter `tau` (cheap to
//! evaluate, used by the orbit search).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::bump::BumpSpec;
use super::Point;
use crate::quad::{self, GaussLegendre};

/// Panels per piece for the cumulative arc-length table.
const ARC_PANELS: usize = 64;
/// Bracketing samples per graph piece when intersecting rays.
const GRAPH_SAMPLES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PieceTag {
    /// Elliptical (or circular) cap.
    Arc,
    /// Straight part of the bottom segment.
    Flat,
    /// Bump in an outer zone (a B bump).
    OuterBump,
    /// Bump in the focal zone (an M bump).
    FocalBump,
    /// Corner rounding.
    Fillet,
    /// Any other straight side (validation shapes).
    Side,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Curve {
    /// `start + t * unit(end - start)`, `t` in `[0, |end - start|]`.
    Line { start: Point, end: Point },
    /// `(x, bump.height(x))`, `x` over the bump support, left to right.
    Graph { bump: BumpSpec },
    /// `center + (a cos t, b sin t)`, `t` in `[t0, t1]`.
    Ellipse {
        center: Point,
        a: f64,
        b: f64,
        t0: f64,
        t1: f64,
    },
    /// `center + r (cos t, sin t)`, `t` in `[t0, t1]`.
    Circle {
        center: Point,
        radius: f64,
        t0: f64,
        t1: f64,
    },
}

impl Curve {
    pub fn range(&self) -> (f64, f64) {
        match *self {
            Curve::Line { start, end } => (0.0, (end - start).norm()),
            Curve::Graph { bump } => bump.support(),
            Curve::Ellipse { t0, t1, .. } | Curve::Circle { t0, t1, .. } => (t0, t1),
        }
    }

    pub fn point(&self, t: f64) -> Point {
        match *self {
            Curve::Line { start, end } => start + (end - start).normalize() * t,
            Curve::Graph { bump } => Point::new(t, bump.height(t)),
            Curve::Ellipse { center, a, b, .. } => center + Point::new(a * t.cos(), b * t.sin()),
            Curve::Circle { center, radius, .. } => center + radius * Point::new(t.cos(), t.sin()),
        }
    }

    pub fn d1(&self, t: f64) -> Point {
        match *self {
            Curve::Line { start, end } => (end - start).normalize(),
            Curve::Graph { bump } => Point::new(1.0, bump.slope(t)),
            Curve::Ellipse { a, b, .. } => Point::new(-a * t.sin(), b * t.cos()),
            Curve::Circle { radius, .. } => radius * Point::new(-t.sin(), t.cos()),
        }
    }

    pub fn d2(&self, t: f64) -> Point {
        match *self {
            Curve::Line { .. } => Point::zeros(),
            Curve::Graph { bump } => Point::new(0.0, bump.second_derivative(t)),
            Curve::Ellipse { a, b, .. } => Point::new(-a * t.cos(), -b * t.sin()),
            Curve::Circle { radius, .. } => -radius * Point::new(t.cos(), t.sin()),
        }
    }

    pub fn speed(&self, t: f64) -> f64 {
        self.d1(t).norm()
    }

    /// Whether `t` is proportional to arc length with unit factor.
    fn unit_speed(&self) -> bool {
        matches!(self, Curve::Line { .. })
    }

    /// Mirror image under `x -> -x`, re-oriented counterclockwise.
    pub fn mirrored(&self) -> Curve {
        let m = |p: Point| Point::new(-p.x, p.y);
        match *self {
            Curve::Line { start, end } => Curve::Line {
                start: m(end),
                end: m(start),
            },
            Curve::Graph { bump } => Curve::Graph {
                bump: bump.mirrored(),
            },
            Curve::Ellipse {
                center,
                a,
                b,
                t0,
                t1,
            } => Curve::Ellipse {
                center: m(center),
                a,
                b,
                t0: PI - t1,
                t1: PI - t0,
            },
            Curve::Circle {
                center,
                radius,
                t0,
                t1,
            } => Curve::Circle {
                center: m(center),
                radius,
                t0: PI - t1,
                t1: PI - t0,
            },
        }
    }

    /// Ray intersections `(distance, t)` with `distance > min_dist`.
    fn ray_hits(&self, origin: Point, dir: Point, min_dist: f64, out: &mut Vec<(f64, f64)>) {
        let (lo, hi) = self.range();
        match *self {
            Curve::Line { start, end } => {
                let u = (end - start).normalize();
                let denom = cross(dir, u);
                if denom == 0.0 {
                    return;
                }
                let w = start - origin;
                let d = cross(w, u) / denom;
                let t = cross(w, dir) / denom;
                if d > min_dist && t >= lo && t <= hi {
                    out.push((d, t.clamp(lo, hi)));
                }
            }
            Curve::Ellipse { .. } | Curve::Circle { .. } => {
                let (center, a, b) = match *self {
                    Curve::Ellipse { center, a, b, .. } => (center, a, b),
                    Curve::Circle { center, radius, .. } => (center, radius, radius),
                    _ => unreachable!(),
                };
                let o = origin - center;
                let (ox, oy) = (o.x / a, o.y / b);
                let (dx, dy) = (dir.x / a, dir.y / b);
                let qa = dx * dx + dy * dy;
                let qb = 2.0 * (ox * dx + oy * dy);
                let qc = ox * ox + oy * oy - 1.0;
                let disc = qb * qb - 4.0 * qa * qc;
                if disc < 0.0 {
                    return;
                }
                let sq = disc.sqrt();
                // numerically stable pair of roots
                let q = -0.5 * (qb + qb.signum() * sq);
                let mut roots = [f64::NAN, f64::NAN];
                if q != 0.0 {
                    roots[0] = q / qa;
                    roots[1] = qc / q;
                } else {
                    roots[0] = 0.0;
                }
                for d in roots {
                    if !(d > min_dist) {
                        continue;
                    }
                    let p = o + dir * d;
                    let mut t = (p.y / b).atan2(p.x / a);
                    // bring into [lo, hi] modulo 2 pi
                    while t < lo - 1e-12 {
                        t += 2.0 * PI;
                    }
                    while t > hi + 1e-12 {
                        t -= 2.0 * PI;
                    }
                    if t >= lo - 1e-12 && t <= hi + 1e-12 {
                        out.push((d, t.clamp(lo, hi)));
                    }
                }
            }
            Curve::Graph { bump } => {
                let f = |t: f64| cross(dir, Point::new(t, bump.height(t)) - origin);
                let h = (hi - lo) / GRAPH_SAMPLES as f64;
                let mut t_prev = lo;
                let mut f_prev = f(lo);
                for k in 1..=GRAPH_SAMPLES {
                    let t = if k == GRAPH_SAMPLES {
                        hi
                    } else {
                        lo + k as f64 * h
                    };
                    let fv = f(t);
                    let root = if f_prev == 0.0 {
                        Some(t_prev)
                    } else if f_prev * fv < 0.0 {
                        Some(brent_root(&f, t_prev, t, f_prev, fv))
                    } else {
                        None
                    };
                    if let Some(r) = root {
                        let d = (Point::new(r, bump.height(r)) - origin).dot(&dir);
                        if d > min_dist {
                            out.push((d, r));
                        }
                    }
                    t_prev = t;
                    f_prev = fv;
                }
                if f_prev == 0.0 {
                    let d = (Point::new(hi, bump.height(hi)) - origin).dot(&dir);
                    if d > min_dist {
                        out.push((d, hi));
                    }
                }
            }
        }
    }

    /// Closest parameter to `p` (exact for lines and circles, the natural
    /// projection for graphs and ellipses, refined by Newton).
    fn locate(&self, p: Point) -> f64 {
        let (lo, hi) = self.range();
        let t0 = match *self {
            Curve::Line { start, end } => {
                let u = (end - start).normalize();
                return (p - start).dot(&u).clamp(lo, hi);
            }
            Curve::Graph { .. } => p.x,
            Curve::Ellipse { center, a, b, .. } => {
                let q = p - center;
                (q.y / b).atan2(q.x / a)
            }
            Curve::Circle { center, .. } => {
                let q = p - center;
                q.y.atan2(q.x)
            }
        };
        let mut t = wrap_into(t0, lo, hi);
        // Newton on (gamma(t) - p) . gamma'(t) = 0
        for _ in 0..30 {
            let r = self.point(t) - p;
            let d1 = self.d1(t);
            let d2 = self.d2(t);
            let g = r.dot(&d1);
            let h = d1.dot(&d1) + r.dot(&d2);
            if h <= 0.0 {
                break;
            }
            let step = g / h;
            let tn = (t - step).clamp(lo, hi);
            if (tn - t).abs() < 1e-16 * (1.0 + t.abs()) {
                t = tn;
                break;
            }
            t = tn;
        }
        t
    }
}

fn wrap_into(t: f64, lo: f64, hi: f64) -> f64 {
    let mut t = t;
    let span = 2.0 * PI;
    if hi - lo <= span + 1e-9 {
        while t < lo - 0.5 * (span - (hi - lo)) {
            t += span;
        }
        while t > hi + 0.5 * (span - (hi - lo)) {
            t -= span;
        }
    }
    t.clamp(lo, hi)
}

#[inline]
pub fn cross(u: Point, v: Point) -> f64 {
    u.x * v.y - u.y * v.x
}

/// Bracketed root by Brent's method (bisection/secant/inverse quadratic).
pub fn brent_root<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fb: f64) -> f64 {
    let (mut a, mut b, mut fa, mut fb) = (a, b, fa, fb);
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut c = a;
    let mut fc = fa;
    let mut mflag = true;
    let mut d = 0.0;
    for _ in 0..200 {
        if fb == 0.0 || (b - a).abs() <= 4.0 * f64::EPSILON * b.abs().max(1e-300) {
            return b;
        }
        let mut s = if fa != fc && fb != fc {
            a * fb * fc / ((fa - fb) * (fa - fc))
                + b * fa * fc / ((fb - fa) * (fb - fc))
                + c * fa * fb / ((fc - fa) * (fc - fb))
        } else {
            b - fb * (b - a) / (fb - fa)
        };
        let lo = (3.0 * a + b) / 4.0;
        let cond1 = !((s > lo.min(b)) && (s < lo.max(b)));
        let cond2 = mflag && (s - b).abs() >= (b - c).abs() / 2.0;
        let cond3 = !mflag && (s - b).abs() >= (c - d).abs() / 2.0;
        let cond4 = mflag && (b - c).abs() < 1e-300;
        let cond5 = !mflag && (c - d).abs() < 1e-300;
        if cond1 || cond2 || cond3 || cond4 || cond5 {
            s = 0.5 * (a + b);
            mflag = true;
        } else {
            mflag = false;
        }
        let fs = f(s);
        d = c;
        c = b;
        fc = fb;
        if fa * fs < 0.0 {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if fa.abs() < fb.abs() {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut fa, &mut fb);
        }
    }
    b
}

/// Position and derivatives of the boundary at one parameter value.
#[derive(Debug, Clone, Copy)]
pub struct Frame {
    pub point: Point,
    /// Derivative with respect to the native parameter.
    pub d1: Point,
    pub d2: Point,
}

impl Frame {
    pub fn tangent(&self) -> Point {
        self.d1.normalize()
    }

    /// Outward unit normal (domain lies to the left of the tangent).
    pub fn normal(&self) -> Point {
        let t = self.tangent();
        Point::new(t.y, -t.x)
    }

    /// Signed curvature, positive where the domain is locally convex.
    pub fn curvature(&self) -> f64 {
        cross(self.d1, self.d2) / self.d1.norm().powi(3)
    }
}

/// A sample of the boundary addressed by arc length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryPoint {
    pub s: f64,
    pub position: Point,
    pub normal: Point,
    pub tangent: Point,
    pub curvature: f64,
}

#[derive(Debug, Clone)]
pub struct Piece {
    pub curve: Curve,
    pub tag: PieceTag,
    /// Offset of this piece in the native parameter chain.
    pub tau0: f64,
    /// Arc length at the start of this piece.
    pub s0: f64,
    pub length: f64,
    /// Cumulative arc length at panel edges (`ARC_PANELS + 1` values).
    cum: Vec<f64>,
}

impl Piece {
    fn new(curve: Curve, tag: PieceTag) -> Self {
        let (lo, hi) = curve.range();
        let mut cum = Vec::new();
        let length = if curve.unit_speed() {
            hi - lo
        } else {
            let h = (hi - lo) / ARC_PANELS as f64;
            cum.push(0.0);
            let mut acc = 0.0;
            for k in 0..ARC_PANELS {
                let a = lo + k as f64 * h;
                let b = if k + 1 == ARC_PANELS { hi } else { a + h };
                acc += quad::adaptive(&|t| curve.speed(t), a, b, 1e-15 * h.max(1e-3));
                cum.push(acc);
            }
            acc
        };
        Self {
            curve,
            tag,
            tau0: 0.0,
            s0: 0.0,
            length,
            cum,
        }
    }

    pub fn tau_span(&self) -> f64 {
        let (lo, hi) = self.curve.range();
        hi - lo
    }

    /// Arc length from the piece start to parameter `t`.
    pub fn arc_to(&self, t: f64) -> f64 {
        let (lo, hi) = self.curve.range();
        if self.curve.unit_speed() {
            return t - lo;
        }
        if let Curve::Circle { radius, .. } = self.curve {
            return radius * (t - lo);
        }
        let h = (hi - lo) / ARC_PANELS as f64;
        let k = (((t - lo) / h).floor() as isize).clamp(0, ARC_PANELS as isize - 1) as usize;
        let a = lo + k as f64 * h;
        thread_local! {
            static RULE: GaussLegendre = GaussLegendre::new(20);
        }
        RULE.with(|r| self.cum[k] + r.integrate(a, t, |x| self.curve.speed(x)))
    }

    /// Inverse of [`Piece::arc_to`].
    pub fn param_at(&self, sigma: f64) -> f64 {
        let (lo, hi) = self.curve.range();
        if self.curve.unit_speed() {
            return (lo + sigma).clamp(lo, hi);
        }
        if let Curve::Circle { radius, .. } = self.curve {
            return (lo + sigma / radius).clamp(lo, hi);
        }
        let sigma = sigma.clamp(0.0, self.length);
        let k = self
            .cum
            .partition_point(|&c| c <= sigma)
            .clamp(1, ARC_PANELS)
            - 1;
        let h = (hi - lo) / ARC_PANELS as f64;
        let a = lo + k as f64 * h;
        let frac = (sigma - self.cum[k]) / (self.cum[k + 1] - self.cum[k]);
        let mut t = a + frac * h;
        for _ in 0..50 {
            let err = self.arc_to(t) - sigma;
            let step = err / self.curve.speed(t);
            t = (t - step).clamp(lo, hi);
            if step.abs() <= 1e-15 * (1.0 + t.abs()) {
                break;
            }
        }
        t
    }
}

/// Result of a ray hitting the boundary.
#[derive(Debug, Clone, Copy)]
pub struct Hit {
    pub distance: f64,
    pub piece: usize,
    pub t: f64,
    pub point: Point,
}

/// A closed counterclockwise boundary curve.
#[derive(Debug, Clone)]
pub struct Boundary {
    pieces: Vec<Piece>,
    perimeter: f64,
    tau_period: f64,
    corners: Vec<Point>,
}

impl Boundary {
    pub fn new(parts: Vec<(Curve, PieceTag)>, corners: Vec<Point>) -> Self {
        let mut pieces: Vec<Piece> = parts.into_iter().map(|(c, t)| Piece::new(c, t)).collect();
        let mut s = 0.0;
        let mut tau = 0.0;
        for p in &mut pieces {
            p.s0 = s;
            p.tau0 = tau;
            s += p.length;
            tau += p.tau_span();
        }
        Self {
            pieces,
            perimeter: s,
            tau_period: tau,
            corners,
        }
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn perimeter(&self) -> f64 {
        self.perimeter
    }

    /// Length of the native parameter chain.
    pub fn tau_period(&self) -> f64 {
        self.tau_period
    }

    /// Points where the tangent is discontinuous.
    pub fn corners(&self) -> &[Point] {
        &self.corners
    }

    pub fn wrap_tau(&self, tau: f64) -> f64 {
        tau.rem_euclid(self.tau_period)
    }

    pub fn wrap_s(&self, s: f64) -> f64 {
        s.rem_euclid(self.perimeter)
    }

    /// Piece index and local parameter for a native parameter value.
    pub fn locate_tau(&self, tau: f64) -> (usize, f64) {
        let tau = self.wrap_tau(tau);
        let k = self
            .pieces
            .partition_point(|p| p.tau0 <= tau)
            .clamp(1, self.pieces.len())
            - 1;
        let p = &self.pieces[k];
        let (lo, hi) = p.curve.range();
        (k, (lo + (tau - p.tau0)).clamp(lo, hi))
    }

    pub fn tau_of(&self, piece: usize, t: f64) -> f64 {
        let p = &self.pieces[piece];
        p.tau0 + (t - p.curve.range().0)
    }

    pub fn frame(&self, piece: usize, t: f64) -> Frame {
        let c = &self.pieces[piece].curve;
        Frame {
            point: c.point(t),
            d1: c.d1(t),
            d2: c.d2(t),
        }
    }

    pub fn frame_at_tau(&self, tau: f64) -> Frame {
        let (k, t) = self.locate_tau(tau);
        self.frame(k, t)
    }

    pub fn s_of(&self, piece: usize, t: f64) -> f64 {
        let p = &self.pieces[piece];
        p.s0 + p.arc_to(t)
    }

    pub fn s_of_tau(&self, tau: f64) -> f64 {
        let (k, t) = self.locate_tau(tau);
        self.s_of(k, t)
    }

    /// Piece index and local parameter for an arc-length value.
    pub fn locate_s(&self, s: f64) -> (usize, f64) {
        let s = self.wrap_s(s);
        let k = self
            .pieces
            .partition_point(|p| p.s0 <= s)
            .clamp(1, self.pieces.len())
            - 1;
        let p = &self.pieces[k];
        (k, p.param_at(s - p.s0))
    }

    pub fn tau_of_s(&self, s: f64) -> f64 {
        let (k, t) = self.locate_s(s);
        self.tau_of(k, t)
    }

    pub fn eval(&self, s: f64) -> BoundaryPoint {
        let (k, t) = self.locate_s(s);
        let f = self.frame(k, t);
        BoundaryPoint {
            s: self.wrap_s(s),
            position: f.point,
            normal: f.normal(),
            tangent: f.tangent(),
            curvature: f.curvature(),
        }
    }

    pub fn tag_at_tau(&self, tau: f64) -> PieceTag {
        self.pieces[self.locate_tau(tau).0].tag
    }

    /// Nearest boundary location `(piece, t, distance)` to a point.
    pub fn locate_point(&self, p: Point) -> (usize, f64, f64) {
        let mut best = (0, 0.0, f64::INFINITY);
        for (k, piece) in self.pieces.iter().enumerate() {
            let t = piece.curve.locate(p);
            let d = (piece.curve.point(t) - p).norm();
            if d < best.2 {
                best = (k, t, d);
            }
        }
        best
    }

    /// First boundary crossing strictly ahead of `origin` along `dir`.
    pub fn first_hit(&self, origin: Point, dir: Point, min_dist: f64) -> Option<Hit> {
        let mut hits = Vec::with_capacity(4);
        let mut best: Option<Hit> = None;
        for (k, piece) in self.pieces.iter().enumerate() {
            hits.clear();
            piece.curve.ray_hits(origin, dir, min_dist, &mut hits);
            for &(d, t) in &hits {
                if best.is_none_or(|b| d < b.distance) {
                    best = Some(Hit {
                        distance: d,
                        piece: k,
                        t,
                        point: piece.curve.point(t),
                    });
                }
            }
        }
        best
    }

    /// Distance to the nearest corner point.
    pub fn corner_distance(&self, p: Point) -> f64 {
        self.corners
            .iter()
            .map(|c| (c - p).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// `n` points equally spaced in arc length.
    pub fn sample_uniform(&self, n: usize) -> Vec<BoundaryPoint> {
        (0..n)
            .map(|i| self.eval(self.perimeter * i as f64 / n as f64))
            .collect()
    }

    /// Winding number of the boundary about `p` by angle summation over `n`
    /// samples.
    pub fn winding_number(&self, p: Point, n: usize) -> i64 {
        let pts = self.sample_uniform(n);
        let mut total = 0.0;
        for i in 0..n {
            let u = pts[i].position - p;
            let v = pts[(i + 1) % n].position - p;
            total += cross(u, v).atan2(u.dot(&v));
        }
        (total / (2.0 * PI)).round() as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_circle() -> Boundary {
        Boundary::new(
            vec![(
                Curve::Circle {
                    center: Point::zeros(),
                    radius: 1.0,
                    t0: 0.0,
                    t1: 2.0 * PI,
                },
                PieceTag::Arc,
            )],
            vec![],
        )
    }

    #[test]
    fn circle_perimeter_and_eval() {
        let c = unit_circle();
        assert!((c.perimeter() - 2.0 * PI).abs() < 1e-14);
        let p = c.eval(PI / 2.0);
        assert!((p.position - Point::new(0.0, 1.0)).norm() < 1e-14);
        assert!((p.normal - Point::new(0.0, 1.0)).norm() < 1e-14);
        assert!((p.curvature - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ray_hits_circle_from_inside() {
        let c = unit_circle();
        let h = c
            .first_hit(Point::new(0.2, 0.0), Point::new(1.0, 0.0), 1e-10)
            .unwrap();
        assert!((h.distance - 0.8).abs() < 1e-15);
        let h = c
            .first_hit(Point::new(1.0, 0.0), Point::new(-1.0, 0.0), 1e-10)
            .unwrap();
        assert!((h.distance - 2.0).abs() < 1e-14);
    }

    #[test]
    fn ellipse_arc_length_table_inverts() {
        let b = Boundary::new(
            vec![(
                Curve::Ellipse {
                    center: Point::zeros(),
                    a: 2.0,
                    b: 1.0,
                    t0: 0.0,
                    t1: PI,
                },
                PieceTag::Arc,
            )],
            vec![],
        );
        for &s in &[0.0, 0.3, 1.7, 2.422, 4.0] {
            let (k, t) = b.locate_s(s);
            assert!((b.s_of(k, t) - s).abs() < 1e-13);
        }
    }

    #[test]
    fn brent_finds_cubic_root() {
        let f = |x: f64| x * x * x - 2.0;
        let r = brent_root(&f, 0.0, 2.0, f(0.0), f(2.0));
        assert!((r - 2f64.cbrt()).abs() < 1e-15);
    }

    #[test]
    fn mirrored_curves_are_reflections() {
        let e = Curve::Ellipse {
            center: Point::zeros(),
            a: 2.0,
            b: 1.0,
            t0: 0.1,
            t1: 0.9,
        };
        let m = e.mirrored();
        let (lo, hi) = m.range();
        assert!((m.point(lo) - Point::new(-e.point(0.9).x, e.point(0.9).y)).norm() < 1e-15);
        assert!((m.point(hi) - Point::new(-e.point(0.1).x, e.point(0.1).y)).norm() < 1e-15);
    }
}
