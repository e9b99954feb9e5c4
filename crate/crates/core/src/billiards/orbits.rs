//! Multistart search for closed billiard trajectories as critical points of
//! the perimeter functional `L(t_1, ..., t_n) = sum |gamma(t_{i+1}) - gamma(t_i)|`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dichotomy::random_interior;
use super::dynamics::{
    caustic_parameter, classify, trace, CrossingClass, Ray, CORNER_TOL, GRAZING_TOL,
};
use crate::geometry::{Boundary, Point, Region};
use crate::rng;

/// Gradient norm (arc-length parametrization) accepted as critical.
pub const GRADIENT_TOL: f64 = 1e-12;
/// Consecutive bounce points closer than this are degenerate.
pub const MIN_CHORD: f64 = 1e-8;
/// Position tolerance when identifying two orbits.
const SAME_ORBIT_TOL: f64 = 1e-7;
const MAX_ITER: usize = 400;

#[derive(Debug, Clone, Serialize)]
pub struct PeriodicOrbit {
    pub n: usize,
    /// Arc-length parameters in canonical order.
    pub s: Vec<f64>,
    pub points: Vec<Point>,
    pub length: f64,
    /// Norm of the arc-length gradient of the perimeter functional.
    pub residual: f64,
    /// Largest deviation from the reflection law over all vertices.
    pub reflection_residual: f64,
    pub class: CrossingClass,
    /// Mean caustic parameter over chords above the major axis.
    pub mu: Option<f64>,
    /// The arc-length Hessian has a null direction: the orbit sits in a
    /// continuous family of equal-length orbits.
    pub degenerate: bool,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct OrbitSearch {
    pub orbits: Vec<PeriodicOrbit>,
    pub non_convergent: usize,
    pub rejected: usize,
    pub repetitions: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    /// Pair every random start with its mirror image under `x -> -x`.
    pub mirror_starts: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            mirror_starts: true,
        }
    }
}

struct Eval {
    points: Vec<Point>,
    d1: Vec<Point>,
    d2: Vec<Point>,
}

fn evaluate(boundary: &Boundary, tau: &[f64]) -> Eval {
    let mut points = Vec::with_capacity(tau.len());
    let mut d1 = Vec::with_capacity(tau.len());
    let mut d2 = Vec::with_capacity(tau.len());
    for &t in tau {
        let f = boundary.frame_at_tau(t);
        points.push(f.point);
        d1.push(f.d1);
        d2.push(f.d2);
    }
    Eval { points, d1, d2 }
}

fn perimeter(points: &[Point]) -> f64 {
    let n = points.len();
    (0..n)
        .map(|i| (points[(i + 1) % n] - points[i]).norm())
        .sum()
}

fn unit(p: Point, q: Point) -> Point {
    (q - p).normalize()
}

/// Gradient with respect to the native parameters.
fn gradient(ev: &Eval) -> DVector<f64> {
    let n = ev.points.len();
    DVector::from_fn(n, |i, _| {
        let prev = ev.points[(i + n - 1) % n];
        let next = ev.points[(i + 1) % n];
        let p = ev.points[i];
        ev.d1[i].dot(&(unit(prev, p) - unit(p, next)))
    })
}

/// Gradient with respect to arc length at each vertex.
fn arc_gradient(ev: &Eval) -> DVector<f64> {
    let g = gradient(ev);
    DVector::from_fn(g.len(), |i, _| g[i] / ev.d1[i].norm())
}

fn hessian(ev: &Eval) -> DMatrix<f64> {
    let n = ev.points.len();
    let mut h = DMatrix::zeros(n, n);
    for i in 0..n {
        let j = (i + 1) % n;
        let diff = ev.points[j] - ev.points[i];
        let d = diff.norm();
        let e = diff / d;
        // (I - e e^T) / d
        let proj = |u: Point, v: Point| (u.dot(&v) - u.dot(&e) * v.dot(&e)) / d;
        h[(i, i)] += proj(ev.d1[i], ev.d1[i]) - ev.d2[i].dot(&e);
        h[(j, j)] += proj(ev.d1[j], ev.d1[j]) + ev.d2[j].dot(&e);
        let off = -proj(ev.d1[i], ev.d1[j]);
        h[(i, j)] += off;
        h[(j, i)] += off;
    }
    h
}

/// Levenberg–Marquardt on `grad L = 0`. Returns the converged parameters.
fn solve_critical(boundary: &Boundary, start: &[f64]) -> Option<Vec<f64>> {
    let n = start.len();
    let period = boundary.tau_period();
    let max_step = 0.25 * period / n as f64;
    let mut tau: Vec<f64> = start.iter().map(|&t| boundary.wrap_tau(t)).collect();
    let mut ev = evaluate(boundary, &tau);
    let mut g = gradient(&ev);
    let mut gnorm = g.norm();
    let mut lambda = 1e-4;
    for _ in 0..MAX_ITER {
        if arc_gradient(&ev).norm() <= GRADIENT_TOL {
            return Some(tau);
        }
        let h = hessian(&ev);
        let hg = &h * &g;
        let h2 = &h * &h;
        let mut accepted = false;
        for _ in 0..12 {
            let mut m = h2.clone();
            let scale = h2.diagonal().max().max(1e-12);
            for k in 0..n {
                m[(k, k)] += lambda * scale;
            }
            let Some(step) = m.cholesky().map(|c| c.solve(&(-&hg))) else {
                lambda *= 10.0;
                continue;
            };
            let mut step = step;
            let big = step.amax();
            if big > max_step {
                step *= max_step / big;
            }
            let trial: Vec<f64> = tau
                .iter()
                .zip(step.iter())
                .map(|(t, d)| boundary.wrap_tau(t + d))
                .collect();
            let ev_t = evaluate(boundary, &trial);
            let g_t = gradient(&ev_t);
            let gn_t = g_t.norm();
            if gn_t.is_finite() && gn_t < gnorm {
                tau = trial;
                ev = ev_t;
                g = g_t;
                gnorm = gn_t;
                lambda = (lambda * 0.1).max(1e-15);
                accepted = true;
                break;
            }
            lambda *= 10.0;
        }
        if !accepted {
            break;
        }
    }
    (arc_gradient(&ev).norm() <= GRADIENT_TOL).then_some(tau)
}

/// Norm of the arc-length gradient of the perimeter functional at the
/// boundary points nearest to `points`.
pub fn gradient_norm_at(region: &dyn Region, points: &[Point]) -> f64 {
    let boundary = region.boundary();
    let tau: Vec<f64> = points
        .iter()
        .map(|&p| {
            let (k, t, _) = boundary.locate_point(p);
            boundary.tau_of(k, t)
        })
        .collect();
    arc_gradient(&evaluate(boundary, &tau)).norm()
}

/// Largest reflection-law defect `|R_n(u_in) - u_out|` over the vertices.
pub fn reflection_defect(region: &dyn Region, points: &[Point]) -> f64 {
    let boundary = region.boundary();
    let n = points.len();
    (0..n)
        .map(|i| {
            let p = points[i];
            let (k, t, _) = boundary.locate_point(p);
            let nrm = boundary.frame(k, t).normal();
            let u_in = unit(points[(i + n - 1) % n], p);
            let u_out = unit(p, points[(i + 1) % n]);
            let r = u_in - 2.0 * u_in.dot(&nrm) * nrm;
            (r - u_out).norm()
        })
        .fold(0.0, f64::max)
}

enum Outcome {
    Orbit(PeriodicOrbit),
    NonConvergent,
    Rejected,
}

fn admissible(region: &dyn Region, boundary: &Boundary, tau: &[f64], points: &[Point]) -> bool {
    let n = points.len();
    let scale = region
        .ellipse()
        .map_or(0.5 * (region.bbox().max.x - region.bbox().min.x), |e| e.a());
    for i in 0..n {
        let p = points[i];
        let q = points[(i + 1) % n];
        let d = (q - p).norm();
        if d < MIN_CHORD {
            return false;
        }
        if boundary.corner_distance(p) <= CORNER_TOL * scale {
            return false;
        }
        let e = (q - p) / d;
        let np = boundary.frame_at_tau(tau[i]).normal();
        let nq = boundary.frame_at_tau(tau[(i + 1) % n]).normal();
        if e.dot(&np) > -GRAZING_TOL || e.dot(&nq) < GRAZING_TOL {
            return false;
        }
        match boundary.first_hit(p, e, super::dynamics::MIN_TRAVEL) {
            Some(h) if h.distance >= d - 1e-9 => {}
            _ => return false,
        }
    }
    true
}

fn upper_mu(region: &dyn Region, points: &[Point]) -> Option<f64> {
    let e = region.ellipse()?;
    let n = points.len();
    let mus: Vec<f64> = (0..n)
        .filter(|&i| points[i].y >= 0.0 || points[(i + 1) % n].y >= 0.0)
        .map(|i| caustic_parameter(&e, points[i], points[(i + 1) % n]))
        .collect();
    (!mus.is_empty()).then(|| mus.iter().sum::<f64>() / mus.len() as f64)
}

/// Relative size of the smallest Hessian eigenvalue below which an orbit
/// counts as a member of a continuous family.
pub const DEGENERACY_TOL: f64 = 1e-7;

fn is_degenerate(ev: &Eval) -> bool {
    let mut h = hessian(ev);
    let n = h.nrows();
    for i in 0..n {
        for j in 0..n {
            h[(i, j)] /= ev.d1[i].norm() * ev.d1[j].norm();
        }
    }
    let eig = h.symmetric_eigen().eigenvalues;
    let big = eig.amax();
    let small = eig.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    small <= DEGENERACY_TOL * big
}

fn classify_orbit(region: &dyn Region, points: &[Point]) -> CrossingClass {
    let Some(e) = region.ellipse() else {
        return CrossingClass::Separatrix;
    };
    let n = points.len();
    let mut focal = false;
    let mut outer = false;
    for i in 0..n {
        let p = points[i];
        let q = points[(i + 1) % n];
        // chords running entirely below the axis stay inside a bump
        if p.y < 0.0 && q.y < 0.0 {
            continue;
        }
        match classify(&e, caustic_parameter(&e, p, q)) {
            CrossingClass::FocalCrossing => focal = true,
            CrossingClass::Outer => outer = true,
            CrossingClass::Separatrix => {}
        }
    }
    match (focal, outer) {
        (true, false) => CrossingClass::FocalCrossing,
        (false, true) => CrossingClass::Outer,
        _ => CrossingClass::Separatrix,
    }
}

/// Whether the vertex list repeats with a shorter period.
fn is_repetition(points: &[Point]) -> bool {
    let n = points.len();
    (1..n)
        .filter(|d| n.is_multiple_of(*d))
        .any(|d| (0..n).all(|i| (points[i] - points[(i + d) % n]).norm() <= SAME_ORBIT_TOL))
}

fn same_cycle(a: &[Point], b: &[Point]) -> bool {
    let n = a.len();
    if n != b.len() {
        return false;
    }
    for shift in 0..n {
        if (0..n).all(|i| (a[i] - b[(i + shift) % n]).norm() <= SAME_ORBIT_TOL) {
            return true;
        }
        if (0..n).all(|i| (a[i] - b[(shift + n - i) % n]).norm() <= SAME_ORBIT_TOL) {
            return true;
        }
    }
    false
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x != y {
            return x < y;
        }
    }
    false
}

/// Rotate so the smallest `s` comes first and pick the lexicographically
/// smaller traversal direction.
fn canonical(s: &[f64], points: &[Point]) -> (Vec<f64>, Vec<Point>) {
    let n = s.len();
    let mut best: Option<(Vec<f64>, Vec<Point>)> = None;
    for rev in [false, true] {
        for shift in 0..n {
            let idx: Vec<usize> = (0..n)
                .map(|i| {
                    if rev {
                        (shift + n - i) % n
                    } else {
                        (shift + i) % n
                    }
                })
                .collect();
            let cs: Vec<f64> = idx.iter().map(|&k| s[k]).collect();
            if best.as_ref().is_none_or(|(bs, _)| lex_less(&cs, bs)) {
                let cp = idx.iter().map(|&k| points[k]).collect();
                best = Some((cs, cp));
            }
        }
    }
    best.expect("orbit has at least one vertex")
}

fn run_start(region: &dyn Region, start: &[f64], l_max: f64) -> Outcome {
    let boundary = region.boundary();
    let Some(tau) = solve_critical(boundary, start) else {
        return Outcome::NonConvergent;
    };
    let ev = evaluate(boundary, &tau);
    if !admissible(region, boundary, &tau, &ev.points) {
        return Outcome::Rejected;
    }
    let length = perimeter(&ev.points);
    if length > l_max {
        return Outcome::Rejected;
    }
    let s: Vec<f64> = tau.iter().map(|&t| boundary.s_of_tau(t)).collect();
    let (s, points) = canonical(&s, &ev.points);
    Outcome::Orbit(PeriodicOrbit {
        n: tau.len(),
        residual: arc_gradient(&ev).norm(),
        reflection_residual: reflection_defect(region, &points),
        class: classify_orbit(region, &points),
        mu: upper_mu(region, &points),
        degenerate: is_degenerate(&ev),
        s,
        points,
        length,
    })
}

fn angle_start(region: &dyn Region, angles: &[f64]) -> Option<Vec<f64>> {
    angles.iter().map(|&a| tau_at_angle(region, a)).collect()
}

/// Bounce parameters of the `n`-step window where a random trajectory comes
/// closest to closing.
fn close_return(region: &dyn Region, origin: Point, angle: f64, n: usize) -> Option<Vec<f64>> {
    let t = trace(region, &Ray::from_angle(origin, angle), 12 * n);
    let b = &t.bounces;
    if b.len() < n + 1 {
        return None;
    }
    let i = (0..b.len() - n).min_by(|&i, &j| {
        let di = (b[i + n].position - b[i].position).norm();
        let dj = (b[j + n].position - b[j].position).norm();
        di.total_cmp(&dj)
    })?;
    let boundary = region.boundary();
    Some(b[i..i + n].iter().map(|x| boundary.tau_of_s(x.s)).collect())
}

/// Boundary parameter seen from the bounding-box center in direction `angle`.
fn tau_at_angle(region: &dyn Region, angle: f64) -> Option<f64> {
    let bb = region.bbox();
    let o = 0.5 * (bb.min + bb.max);
    let b = region.boundary();
    let hit = b.first_hit(o, Point::new(angle.cos(), angle.sin()), 0.0)?;
    Some(b.tau_of(hit.piece, hit.t))
}

/// Closed trajectories with exactly `n` bounces and length `<= l_max`.
pub fn find_orbits(
    region: &dyn Region,
    n: usize,
    l_max: f64,
    n_starts: usize,
    seed: u64,
    opts: SearchOptions,
) -> OrbitSearch {
    assert!(n >= 2, "periodic orbits need at least two bounces");
    // Starts are drawn as view angles from the box center or as close
    // returns of a random trajectory; each comes with its mirror image
    // (angle -> pi - angle) so the start set is reflection symmetric.
    let bb = region.bbox();
    let center = 0.5 * (bb.min + bb.max);
    let starts: Vec<Vec<f64>> = (0..n_starts)
        .flat_map(|k| {
            let mut r = rng::stream(seed, rng::streams::ORBITS, ((n as u64) << 32) | k as u64);
            match k % 3 {
                2 => {
                    let p = random_interior(region, &mut r) - center;
                    let theta = r.gen::<f64>() * 2.0 * PI;
                    let mut v = vec![close_return(region, center + p, theta, n)];
                    if opts.mirror_starts {
                        let q = center + Point::new(-p.x, p.y);
                        if region.contains(q) {
                            v.push(close_return(region, q, PI - theta, n));
                        }
                    }
                    v
                }
                kind => {
                    let mut angles: Vec<f64> = (0..n).map(|_| r.gen::<f64>() * 2.0 * PI).collect();
                    // convex polygons favor rotating orbits
                    if kind == 1 {
                        angles.sort_by(f64::total_cmp);
                    }
                    let mut v = vec![angle_start(region, &angles)];
                    if opts.mirror_starts {
                        let m: Vec<f64> = angles.iter().map(|a| PI - a).collect();
                        v.push(angle_start(region, &m));
                    }
                    v
                }
            }
        })
        .flatten()
        .collect();
    let outcomes: Vec<Outcome> = starts
        .par_iter()
        .map(|s| run_start(region, s, l_max))
        .collect();
    let mut out = OrbitSearch::default();
    for o in outcomes {
        match o {
            Outcome::NonConvergent => out.non_convergent += 1,
            Outcome::Rejected => out.rejected += 1,
            Outcome::Orbit(orb) => {
                if is_repetition(&orb.points) {
                    out.repetitions += 1;
                } else if !out.orbits.iter().any(|q| {
                    (q.length - orb.length).abs() <= 1e-9 && same_cycle(&q.points, &orb.points)
                }) {
                    out.orbits.push(orb);
                }
            }
        }
    }
    out.orbits.sort_by(|a, b| {
        a.length.total_cmp(&b.length).then_with(|| {
            if lex_less(&a.s, &b.s) {
                std::cmp::Ordering::Less
            } else {
                std::cmp::Ordering::Greater
            }
        })
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_domain, build_ellipse, FullEllipse};

    #[test]
    fn hessian_matches_finite_differences() {
        let fe = FullEllipse::new(build_ellipse(2.0, 1.0).unwrap());
        let b = fe.boundary();
        let tau = [0.3, 2.1, 4.0, 5.5];
        let h = hessian(&evaluate(b, &tau));
        let eps = 1e-6;
        for j in 0..4 {
            let mut tp = tau;
            let mut tm = tau;
            tp[j] += eps;
            tm[j] -= eps;
            let gp = gradient(&evaluate(b, &tp));
            let gm = gradient(&evaluate(b, &tm));
            for i in 0..4 {
                let fd = (gp[i] - gm[i]) / (2.0 * eps);
                assert!(
                    (fd - h[(i, j)]).abs() < 1e-6,
                    "({i},{j}): {fd} vs {}",
                    h[(i, j)]
                );
            }
        }
    }

    #[test]
    fn half_ellipse_two_bounce_orbit() {
        let d = build_domain(build_ellipse(2.0, 1.0).unwrap(), vec![], vec![], 0.0).unwrap();
        let r = find_orbits(&d, 2, 2.5, 40, 11, SearchOptions::default());
        assert_eq!(r.orbits.len(), 1);
        let o = &r.orbits[0];
        assert!((o.length - 2.0).abs() < 1e-12);
        assert!(o.residual <= GRADIENT_TOL);
        assert!(o.reflection_residual < 1e-9);
    }

    #[test]
    fn full_ellipse_axes() {
        let fe = FullEllipse::new(build_ellipse(2.0, 1.0).unwrap());
        let r = find_orbits(&fe, 2, 10.0, 40, 3, SearchOptions::default());
        let lengths: Vec<f64> = r.orbits.iter().map(|o| o.length).collect();
        assert_eq!(lengths.len(), 2, "{lengths:?}");
        // closed length is twice the axis
        assert!((lengths[0] - 4.0).abs() < 1e-12, "{lengths:?}");
        assert!((lengths[1] - 8.0).abs() < 1e-12);
        assert!(r.orbits.iter().all(|o| !o.degenerate));
    }

    #[test]
    fn full_ellipse_rhombus_family() {
        let fe = FullEllipse::new(build_ellipse(2.0, 1.0).unwrap());
        let r = find_orbits(&fe, 4, 9.0, 60, 5, SearchOptions::default());
        let target = 4.0 * 5f64.sqrt();
        let hits: Vec<&PeriodicOrbit> = r
            .orbits
            .iter()
            .filter(|o| (o.length - target).abs() < 1e-10)
            .collect();
        assert!(
            !hits.is_empty(),
            "{:?}",
            r.orbits.iter().map(|o| o.length).collect::<Vec<_>>()
        );
        // rotation number 1/4 orbits form a family tangent to one caustic
        for o in hits {
            assert!(o.degenerate);
            assert!((o.mu.unwrap() - 0.8).abs() < 1e-9, "{:?}", o.mu);
            assert!(o.reflection_residual < 1e-9);
        }
    }

    #[test]
    fn canonical_form_is_rotation_and_reversal_invariant() {
        let pts: Vec<Point> = (0..4).map(|i| Point::new(i as f64, 0.0)).collect();
        let s = [3.0, 1.0, 4.0, 2.0];
        let (c1, _) = canonical(&s, &pts);
        let (c2, _) = canonical(&[1.0, 4.0, 2.0, 3.0], &pts);
        let (c3, _) = canonical(&[2.0, 4.0, 1.0, 3.0], &pts);
        assert_eq!(c1, vec![1.0, 3.0, 2.0, 4.0]);
        assert_eq!(c1, c2);
        assert_eq!(c1, c3);
    }

    #[test]
    fn repetition_detected() {
        let a = Point::new(0.0, 0.0);
        let b = Point::new(0.0, 1.0);
        assert!(is_repetition(&[a, b, a, b]));
        assert!(!is_repetition(&[a, b, a, Point::new(1.0, 0.5)]));
    }
}
