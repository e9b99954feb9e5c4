//! Five-point finite differences on cell centers, the independent grid
//! oracle for the collocation solver.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::SpectralError;
use crate::geometry::{Point, Region};
use crate::rng;

pub const MIN_NODES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FdOptions {
    /// Relative change of the wanted Ritz values that ends the iteration.
    pub tol: f64,
    pub max_outer: usize,
    /// Relative residual of the inner preconditioned CG solves.
    pub cg_tol: f64,
    /// Modified incomplete Cholesky parameter.
    pub mic_tau: f64,
    /// Extra block vectors beyond the wanted eigenvalues.
    pub guard: usize,
}

impl Default for FdOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_outer: 200,
            cg_tol: 1e-10,
            mic_tau: 0.97,
            guard: 3,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FdResult {
    pub eigenvalues: Vec<f64>,
    pub h: f64,
    pub nodes: usize,
    pub outer_iterations: usize,
    /// `‖Lx - λx‖ / λ` for each returned Ritz pair.
    pub residuals: Vec<f64>,
}

const NONE: u32 = u32::MAX;

/// Cell-centered grid restricted to the region. Unknowns are numbered row
/// by row; `nbr[k] = [west, east, south, north]`.
struct Grid {
    nbr: Vec<[u32; 4]>,
}

impl Grid {
    fn new(region: &dyn Region, h: f64) -> Self {
        let bb = region.bbox();
        let nx = ((bb.max.x - bb.min.x) / h).ceil() as usize;
        let ny = ((bb.max.y - bb.min.y) / h).ceil() as usize;
        let mut id = vec![NONE; nx * ny];
        let mut n = 0u32;
        for j in 0..ny {
            for i in 0..nx {
                let p = Point::new(
                    bb.min.x + (i as f64 + 0.5) * h,
                    bb.min.y + (j as f64 + 0.5) * h,
                );
                if region.contains(p) {
                    id[j * nx + i] = n;
                    n += 1;
                }
            }
        }
        let mut nbr = Vec::with_capacity(n as usize);
        for j in 0..ny {
            for i in 0..nx {
                if id[j * nx + i] == NONE {
                    continue;
                }
                let at = |ii: isize, jj: isize| {
                    if ii < 0 || jj < 0 || ii >= nx as isize || jj >= ny as isize {
                        NONE
                    } else {
                        id[jj as usize * nx + ii as usize]
                    }
                };
                let (i, j) = (i as isize, j as isize);
                nbr.push([at(i - 1, j), at(i + 1, j), at(i, j - 1), at(i, j + 1)]);
            }
        }
        Self { nbr }
    }

    fn len(&self) -> usize {
        self.nbr.len()
    }

    /// `y = L x` with `L = 4I - (neighbors)`.
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (k, nb) in self.nbr.iter().enumerate() {
            let mut s = 4.0 * x[k];
            for &m in nb {
                if m != NONE {
                    s -= x[m as usize];
                }
            }
            y[k] = s;
        }
    }
}

/// MIC(0) factor stored as inverse square roots of the pivots.
struct Mic {
    precon: Vec<f64>,
}

impl Mic {
    fn new(g: &Grid, tau: f64) -> Self {
        let n = g.len();
        let mut precon = vec![0.0; n];
        for k in 0..n {
            let [w, _, s, _] = g.nbr[k];
            let mut e = 4.0;
            if w != NONE {
                let pw = precon[w as usize];
                e -= pw * pw;
                // fill from w's north neighbor
                if g.nbr[w as usize][3] != NONE {
                    e -= tau * pw * pw;
                }
            }
            if s != NONE {
                let ps = precon[s as usize];
                e -= ps * ps;
                if g.nbr[s as usize][1] != NONE {
                    e -= tau * ps * ps;
                }
            }
            if e < 0.25 * 4.0 {
                e = 4.0;
            }
            precon[k] = 1.0 / e.sqrt();
        }
        Self { precon }
    }

    fn apply(&self, g: &Grid, r: &[f64], z: &mut [f64]) {
        let n = g.len();
        let p = &self.precon;
        let mut q = vec![0.0; n];
        for k in 0..n {
            let [w, _, s, _] = g.nbr[k];
            let mut t = r[k];
            if w != NONE {
                t += p[w as usize] * q[w as usize];
            }
            if s != NONE {
                t += p[s as usize] * q[s as usize];
            }
            q[k] = t * p[k];
        }
        for k in (0..n).rev() {
            let [_, e, _, nn] = g.nbr[k];
            let mut t = q[k];
            if e != NONE {
                t += p[k] * z[e as usize];
            }
            if nn != NONE {
                t += p[k] * z[nn as usize];
            }
            z[k] = t * p[k];
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solve `L x = b` by preconditioned CG from the initial guess in `x`.
fn pcg(g: &Grid, m: &Mic, b: &[f64], x: &mut [f64], tol: f64) -> usize {
    let n = g.len();
    let mut r = vec![0.0; n];
    g.apply(x, &mut r);
    for k in 0..n {
        r[k] = b[k] - r[k];
    }
    let bnorm = dot(b, b).sqrt().max(f64::MIN_POSITIVE);
    let mut z = vec![0.0; n];
    m.apply(g, &r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for it in 0..10 * n {
        if dot(&r, &r).sqrt() <= tol * bnorm {
            return it;
        }
        g.apply(&p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        m.apply(g, &r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
    }
    10 * n
}

/// Orthonormalize the columns in place (two passes of modified Gram–Schmidt).
fn orthonormalize(v: &mut [Vec<f64>]) {
    for _ in 0..2 {
        for j in 0..v.len() {
            for i in 0..j {
                let (lo, hi) = v.split_at_mut(j);
                let c = dot(&lo[i], &hi[0]);
                for (x, y) in hi[0].iter_mut().zip(&lo[i]) {
                    *x -= c * y;
                }
            }
            let nrm = dot(&v[j], &v[j]).sqrt();
            v[j].iter_mut().for_each(|x| *x /= nrm);
        }
    }
}

/// Lowest `n_eigs` eigenvalues of the five-point Dirichlet Laplacian on the
/// cell centers inside `region`, by block inverse iteration with
/// Rayleigh–Ritz.
pub fn fd_oracle(
    region: &dyn Region,
    h: f64,
    n_eigs: usize,
    opts: &FdOptions,
) -> Result<FdResult, SpectralError> {
    let bb = region.bbox();
    let half_width = 0.5 * (bb.max.x - bb.min.x);
    if !(h > 0.0) || h > half_width / 50.0 {
        return Err(SpectralError::InvalidInput(format!(
            "grid spacing {h} exceeds half-width / 50 = {}",
            half_width / 50.0
        )));
    }
    if n_eigs == 0 {
        return Err(SpectralError::InvalidInput(
            "n_eigs must be positive".into(),
        ));
    }
    let g = Grid::new(region, h);
    let n = g.len();
    if n < MIN_NODES {
        return Err(SpectralError::GridTooCoarse {
            nodes: n,
            min: MIN_NODES,
        });
    }
    let mic = Mic::new(&g, opts.mic_tau);
    let p = n_eigs + opts.guard;
    let mut r = rng::stream(0, rng::streams::SAMPLING, n as u64);
    let mut x: Vec<Vec<f64>> = (0..p)
        .map(|_| (0..n).map(|_| r.gen_range(-1.0..1.0)).collect())
        .collect();
    orthonormalize(&mut x);
    let mut theta_prev = vec![f64::INFINITY; p];
    let mut lx = vec![0.0; n];
    let mut outer = 0;
    let mut theta = vec![0.0; p];
    while outer < opts.max_outer {
        outer += 1;
        let mut y: Vec<Vec<f64>> = x.clone();
        for (yj, xj) in y.iter_mut().zip(&x) {
            // warm start: x is close to an eigenvector, so L^{-1} x ≈ x / θ
            pcg(&g, &mic, xj, yj, opts.cg_tol);
        }
        orthonormalize(&mut y);
        let ly: Vec<Vec<f64>> = y
            .iter()
            .map(|v| {
                let mut o = vec![0.0; n];
                g.apply(v, &mut o);
                o
            })
            .collect();
        let k = DMatrix::from_fn(p, p, |i, j| 0.5 * (dot(&y[i], &ly[j]) + dot(&y[j], &ly[i])));
        let eig = SymmetricEigen::new(k);
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        for (jj, &j) in order.iter().enumerate() {
            theta[jj] = eig.eigenvalues[j];
            let col = eig.eigenvectors.column(j);
            let mut v = vec![0.0; n];
            for (i, yi) in y.iter().enumerate() {
                let c = col[i];
                v.iter_mut().zip(yi).for_each(|(a, b)| *a += c * b);
            }
            x[jj] = v;
        }
        let done = (0..n_eigs).all(|i| (theta[i] - theta_prev[i]).abs() <= opts.tol * theta[i]);
        theta_prev.copy_from_slice(&theta);
        if done {
            break;
        }
    }
    let residuals = (0..n_eigs)
        .map(|i| {
            g.apply(&x[i], &mut lx);
            let r2: f64 = lx
                .iter()
                .zip(&x[i])
                .map(|(a, b)| (a - theta[i] * b).powi(2))
                .sum();
            r2.sqrt() / theta[i]
        })
        .collect();
    Ok(FdResult {
        eigenvalues: theta[..n_eigs].iter().map(|t| t / (h * h)).collect(),
        h,
        nodes: n,
        outer_iterations: outer,
        residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Disk, Rectangle};
    use std::f64::consts::PI;

    #[test]
    fn square_side_pi() {
        let sq = Rectangle::new(PI, PI);
        let r = fd_oracle(&sq, PI / 200.0, 4, &FdOptions::default()).unwrap();
        for (l, want) in r.eigenvalues.iter().zip([2.0, 5.0, 5.0, 8.0]) {
            assert!((l / want - 1.0).abs() < 0.02, "{l} vs {want}");
        }
    }

    #[test]
    fn disk_ground_state_band() {
        let r = fd_oracle(&Disk::new(1.0), 1.0 / 200.0, 1, &FdOptions::default()).unwrap();
        assert!((r.eigenvalues[0] / 5.783185962946784 - 1.0).abs() < 0.02);
    }

    #[test]
    fn coarse_grids_are_rejected() {
        assert!(matches!(
            fd_oracle(&Rectangle::new(1.0, 0.05), 0.01, 1, &FdOptions::default()),
            Err(SpectralError::GridTooCoarse { .. })
        ));
        assert!(fd_oracle(&Disk::new(1.0), 0.05, 1, &FdOptions::default()).is_err());
    }
}
