use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::svd::{svd, svd_scratch, ComputeSvdVectors};
use faer::{Mat, MatRef, Par};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::basis::{BasisOptions, HelmholtzBasis};
use super::strips::{strip_rule, StripDirection};
use super::SpectralError;
use crate::export::{fmt17, Csv};
use crate::geometry::{Point, Region};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpectralOptions {
    pub basis: BasisOptions,
    /// Singular values of the stacked system below this fraction of the
    /// largest are dropped before the subspace angle is taken.
    pub svd_cutoff: f64,
    /// Scan minima above this indicator value are not refined.
    pub scan_threshold: f64,
    /// A refined minimum is an eigenvalue when the indicator is below this.
    pub accept_tol: f64,
    /// Singular values below this count toward the multiplicity.
    pub multiplicity_tol: f64,
    /// Final bracket width in `k`.
    pub k_tol: f64,
    /// Panel length of the normalization quadrature, relative to the
    /// bounding-box diameter.
    pub quad_panel: f64,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self {
            basis: BasisOptions::default(),
            svd_cutoff: 1e-14,
            scan_threshold: 0.3,
            accept_tol: 1e-4,
            multiplicity_tol: 1e-3,
            k_tol: 1e-10,
            quad_panel: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Warning {
    /// Two indicator minima closer than three scan steps: an eigenvalue
    /// may hide between them. Re-run with a finer scan.
    MissedEigenvalue { k1: f64, k2: f64 },
}

/// One indicator evaluation.
#[derive(Debug, Clone)]
pub struct IndicatorEval {
    pub k: f64,
    /// Singular values of the boundary block of the orthonormalized
    /// system, ascending.
    pub sigma: Vec<f64>,
    /// Numerical rank kept after truncation.
    pub rank: usize,
    /// Source coefficients of the minimizing combination, scaled so that
    /// its interior samples have unit Euclidean norm.
    pub coeffs: Option<Vec<f64>>,
}

impl IndicatorEval {
    pub fn value(&self) -> f64 {
        self.sigma[0]
    }
}

/// Fixed basis and interior nodes for one region.
#[derive(Clone)]
pub struct Solver {
    region: Arc<dyn Region>,
    basis: Arc<HelmholtzBasis>,
    opts: SpectralOptions,
    evaluations: Arc<AtomicUsize>,
}

impl fmt::Debug for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Solver")
            .field("n_src", &self.basis.n_src())
            .field("n_col", &self.basis.n_col())
            .field("opts", &self.opts)
            .finish()
    }
}

/// Singular values, then the optional `U` and `V`.
type Svd = (Vec<f64>, Option<Mat<f64>>, Option<Mat<f64>>);

/// Thin SVD with singular values in nonincreasing order. Runs
/// sequentially so results do not depend on the thread count.
fn thin_svd(a: MatRef<'_, f64>, want_u: bool, want_v: bool) -> Result<Svd, SpectralError> {
    let (m, n) = a.shape();
    let size = m.min(n);
    let flag = |w: bool| {
        if w {
            ComputeSvdVectors::Thin
        } else {
            ComputeSvdVectors::No
        }
    };
    let mut s = Mat::<f64>::zeros(size, 1);
    let mut u = want_u.then(|| Mat::<f64>::zeros(m, size));
    let mut v = want_v.then(|| Mat::<f64>::zeros(n, size));
    let req = svd_scratch::<f64>(
        m,
        n,
        flag(want_u),
        flag(want_v),
        Par::Seq,
        Default::default(),
    );
    let mut mem = MemBuffer::new(req);
    svd(
        a,
        s.as_mut().col_mut(0).as_diagonal_mut(),
        u.as_mut().map(|u| u.as_mut()),
        v.as_mut().map(|v| v.as_mut()),
        Par::Seq,
        MemStack::new(&mut mem),
        Default::default(),
    )
    .map_err(|e| SpectralError::IllConditioned(format!("SVD failed: {e:?}")))?;
    Ok(((0..size).map(|i| s[(i, 0)]).collect(), u, v))
}

fn check_k(k: f64) -> Result<(), SpectralError> {
    if k > 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(SpectralError::InvalidInput(format!(
            "wavenumber must be positive, got {k}"
        )))
    }
}

impl Solver {
    pub fn new(region: Arc<dyn Region>, opts: SpectralOptions) -> Result<Self, SpectralError> {
        let basis = HelmholtzBasis::build(region.as_ref(), &opts.basis)?;
        if basis.interior.is_empty() {
            return Err(SpectralError::IllConditioned("no interior nodes".into()));
        }
        Ok(Self {
            region,
            basis: Arc::new(basis),
            opts,
            evaluations: Arc::new(AtomicUsize::new(0)),
        })
    }

    pub fn basis(&self) -> &HelmholtzBasis {
        &self.basis
    }

    pub fn region(&self) -> &Arc<dyn Region> {
        &self.region
    }

    pub fn options(&self) -> &SpectralOptions {
        &self.opts
    }

    /// Indicator evaluations performed so far.
    pub fn evaluations(&self) -> usize {
        self.evaluations.load(Ordering::Relaxed)
    }

    /// Subspace-angle indicator: orthonormalize the column space of the
    /// stacked `[boundary; interior]` system by a truncated SVD, then take
    /// the singular values of its boundary rows.
    pub fn evaluate(&self, k: f64, want_vector: bool) -> Result<IndicatorEval, SpectralError> {
        check_k(k)?;
        self.evaluations.fetch_add(1, Ordering::Relaxed);
        let mut a = self.basis.system(k);
        let nb = self.basis.n_col();
        let scale: Vec<f64> = a
            .column_iter()
            .map(|c| c.norm().max(f64::MIN_POSITIVE))
            .collect();
        for (j, mut c) in a.column_iter_mut().enumerate() {
            c /= scale[j];
        }
        if a.rows(nb, a.nrows() - nb).norm() == 0.0 {
            return Err(SpectralError::IllConditioned(
                "interior block vanishes".into(),
            ));
        }
        let (m, ncols) = a.shape();
        let am = MatRef::from_column_major_slice(a.as_slice(), m, ncols);
        let (s, u, v) = thin_svd(am, true, want_vector)?;
        let u = u.expect("requested U");
        let smax = s[0];
        let rank = s
            .iter()
            .take_while(|&&x| x > self.opts.svd_cutoff * smax)
            .count();
        if rank == 0 {
            return Err(SpectralError::IllConditioned(
                "collocation matrix is zero".into(),
            ));
        }
        let qb = u.as_ref().submatrix(0, 0, nb, rank);
        let (sb, _, vb) = thin_svd(qb, false, want_vector)?;
        let mut sigma: Vec<f64> = sb.iter().rev().copied().collect();
        if sigma.is_empty() {
            sigma.push(1.0);
        }
        let coeffs = if want_vector {
            let vb = vb.expect("requested V");
            let v = v.expect("requested V");
            let last = sb.len() - 1;
            let mut c = vec![0.0; ncols];
            for j in 0..rank {
                let coef = vb[(j, last)] / s[j];
                for (i, ci) in c.iter_mut().enumerate() {
                    *ci += coef * v[(i, j)];
                }
            }
            Some(c.iter().zip(&scale).map(|(c, s)| c / s).collect())
        } else {
            None
        };
        Ok(IndicatorEval {
            k,
            sigma,
            rank,
            coeffs,
        })
    }

    pub fn indicator(&self, k: f64) -> Result<f64, SpectralError> {
        Ok(self.evaluate(k, false)?.value())
    }

    /// Indicator on `n` uniform points of `[k_min, k_max]`.
    pub fn scan(&self, k_min: f64, k_max: f64, n: usize) -> Result<Vec<(f64, f64)>, SpectralError> {
        check_range(k_min, k_max)?;
        if n < 2 {
            return Err(SpectralError::InvalidInput(
                "n_scan must be at least 2".into(),
            ));
        }
        (0..n)
            .into_par_iter()
            .map(|i| {
                let k = k_min + (k_max - k_min) * i as f64 / (n - 1) as f64;
                self.indicator(k).map(|v| (k, v))
            })
            .collect()
    }

    /// Minimize the indicator on `[lo, hi]`; golden-section steps with
    /// parabolic acceleration on the squared indicator, stopped when the
    /// bracket is narrower than `k_tol`. Returns `(k, bracket width)`.
    pub fn refine(&self, lo: f64, hi: f64) -> Result<(f64, f64), SpectralError> {
        let f = |k: f64| self.indicator(k).map(|v| v * v);
        brent_min(&f, lo, hi, self.opts.k_tol)
    }

    /// Eigenpair at a refined wavenumber.
    pub fn eigenpair(&self, k: f64, bracket: f64) -> Result<EigenPair, SpectralError> {
        let ev = self.evaluate(k, true)?;
        EigenPair::assemble(self, ev, bracket)
    }
}

fn check_range(k_min: f64, k_max: f64) -> Result<(), SpectralError> {
    if k_min > 0.0 && k_max > k_min && k_max.is_finite() {
        Ok(())
    } else {
        Err(SpectralError::InvalidInput(format!(
            "need 0 < k_min < k_max, got ({k_min}, {k_max})"
        )))
    }
}

/// Brent's minimizer. Returns the abscissa and the final bracket width.
fn brent_min<F>(f: &F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64), SpectralError>
where
    F: Fn(f64) -> Result<f64, SpectralError>,
{
    const CGOLD: f64 = 0.381_966_011_250_105_1;
    let (mut a, mut b) = (lo, hi);
    let mut x = a + CGOLD * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = f(x)?;
    let (mut fw, mut fv) = (fx, fx);
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    // tol1 is a quarter of the target so the final bracket is below `tol`
    let tol1 = 0.25 * tol;
    for _ in 0..200 {
        let xm = 0.5 * (a + b);
        if b - a <= tol {
            break;
        }
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            e = d;
            if p.abs() < (0.5 * q * etemp).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol1.copysign(xm - x);
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { a - x } else { b - x };
            d = CGOLD * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else {
            x + tol1.copysign(d)
        };
        let fu = f(u)?;
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            (v, fv) = (w, fw);
            (w, fw) = (x, fx);
            (x, fx) = (u, fu);
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                (v, fv) = (w, fw);
                (w, fw) = (u, fu);
            } else if fu <= fv || v == x || v == w {
                (v, fv) = (u, fu);
            }
        }
    }
    Ok((x, b - a))
}

/// A Dirichlet eigenpair: `ψ = Σ c_j Y0(k |x - y_j|)`, normalized so that
/// `∫ψ² dA = 1` and positive on average over the interior nodes.
#[derive(Clone, Serialize)]
pub struct EigenPair {
    pub lambda: f64,
    pub k: f64,
    pub coeffs: Vec<f64>,
    /// Factor applied to the raw singular-vector coefficients.
    pub normalization: f64,
    /// Indicator at the minimum.
    pub indicator: f64,
    /// Second-smallest indicator singular value.
    pub sigma2: f64,
    pub multiplicity: usize,
    /// Final bracket width in `k`.
    pub bracket: f64,
    /// Largest boundary value on the check grid relative to the interior
    /// RMS of `ψ`.
    pub residual: f64,
    /// `max(√2·residual·λ, 2k·bracket)`.
    pub error_bar: f64,
    pub area: f64,
    /// `∫ψ²` by horizontal strips after normalizing by vertical strips.
    pub norm_check: f64,
    #[serde(skip)]
    basis: Arc<HelmholtzBasis>,
    #[serde(skip)]
    region: Arc<dyn Region>,
}

impl fmt::Debug for EigenPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EigenPair")
            .field("lambda", &self.lambda)
            .field("indicator", &self.indicator)
            .field("sigma2", &self.sigma2)
            .field("multiplicity", &self.multiplicity)
            .field("residual", &self.residual)
            .field("error_bar", &self.error_bar)
            .field("norm_check", &self.norm_check)
            .finish()
    }
}

impl EigenPair {
    fn assemble(solver: &Solver, ev: IndicatorEval, bracket: f64) -> Result<Self, SpectralError> {
        let region = solver.region.clone();
        let basis = solver.basis.clone();
        let k = ev.k;
        let mut coeffs = ev.coeffs.expect("eigenvector requested");
        let h = solver.opts.quad_panel * region.bbox().diameter();
        let sq = |rule: &[(Point, f64)], c: &[f64]| -> f64 {
            // collected first so the summation order ignores thread count
            let terms: Vec<f64> = rule
                .par_iter()
                .map(|(p, w)| {
                    let v = basis.eval(k, c, *p).0;
                    w * v * v
                })
                .collect();
            terms.iter().sum()
        };
        let vertical = strip_rule(region.as_ref(), StripDirection::Vertical, h);
        let horizontal = strip_rule(region.as_ref(), StripDirection::Horizontal, h);
        let area: f64 = vertical.iter().map(|(_, w)| w).sum();
        let raw = sq(&vertical, &coeffs);
        if !(raw > 0.0) {
            return Err(SpectralError::IllConditioned(
                "eigenfunction has zero norm".into(),
            ));
        }
        let mut normalization = 1.0 / raw.sqrt();
        let mean: f64 = basis
            .interior
            .iter()
            .map(|p| basis.eval(k, &coeffs, *p).0)
            .sum();
        if mean < 0.0 {
            normalization = -normalization;
        }
        coeffs.iter_mut().for_each(|c| *c *= normalization);
        let norm_check = sq(&horizontal, &coeffs);
        let max_bdry = basis
            .check
            .par_iter()
            .map(|p| basis.eval(k, &coeffs, *p).0.abs())
            .reduce(|| 0.0, f64::max);
        let residual = max_bdry * area.sqrt();
        let lambda = k * k;
        let sigma2 = ev.sigma.get(1).copied().unwrap_or(f64::NAN);
        let multiplicity = ev
            .sigma
            .iter()
            .filter(|s| **s <= solver.opts.multiplicity_tol)
            .count()
            .max(1);
        Ok(Self {
            lambda,
            k,
            coeffs,
            normalization,
            indicator: ev.sigma[0],
            sigma2,
            multiplicity,
            bracket,
            residual,
            error_bar: (std::f64::consts::SQRT_2 * residual * lambda).max(2.0 * k * bracket),
            area,
            norm_check,
            basis,
            region,
        })
    }

    pub fn region(&self) -> &Arc<dyn Region> {
        &self.region
    }

    pub fn basis(&self) -> &HelmholtzBasis {
        &self.basis
    }

    /// `ψ(p)` without a domain check.
    pub fn value(&self, p: Point) -> f64 {
        self.basis.eval(self.k, &self.coeffs, p).0
    }

    /// `∇ψ(p)` without a domain check.
    pub fn grad(&self, p: Point) -> Point {
        self.basis.eval(self.k, &self.coeffs, p).1
    }

    fn check_point(&self, p: Point) -> Result<(), SpectralError> {
        if self.region.contains(p) {
            return Ok(());
        }
        let tol = 1e-9 * self.region.bbox().diameter();
        if self.region.boundary().locate_point(p).2 <= tol {
            return Ok(());
        }
        Err(SpectralError::OutsideDomain { x: p.x, y: p.y })
    }

    /// Normalized eigenfunction at a point of the closed domain.
    pub fn eval(&self, p: Point) -> Result<f64, SpectralError> {
        self.check_point(p)?;
        Ok(self.value(p))
    }

    pub fn gradient(&self, p: Point) -> Result<Point, SpectralError> {
        self.check_point(p)?;
        Ok(self.grad(p))
    }

    /// The same eigenpair carried to the mirror image `x -> -x`, which
    /// must be passed in as `region`.
    pub fn reflected(&self, region: Arc<dyn Region>) -> Self {
        Self {
            basis: Arc::new(self.basis.mirrored()),
            region,
            coeffs: self.coeffs.clone(),
            ..*self
        }
    }

    /// True when the indicator, residual and normalization checks hold at
    /// the given residual tolerance.
    pub fn is_resolved(&self, residual_tol: f64) -> bool {
        self.residual <= residual_tol && (self.norm_check - 1.0).abs() <= 1e-8
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenSearch {
    pub pairs: Vec<EigenPair>,
    pub warnings: Vec<Warning>,
    /// `(k, indicator)` scan points.
    pub scan: Vec<(f64, f64)>,
}

/// Scan, refine every promising local minimum, and build eigenpairs for
/// those whose refined indicator falls below the acceptance tolerance.
pub fn find_eigs(
    region: Arc<dyn Region>,
    k_min: f64,
    k_max: f64,
    n_scan: usize,
    opts: &SpectralOptions,
) -> Result<EigenSearch, SpectralError> {
    let solver = Solver::new(region, *opts)?;
    solver.find(k_min, k_max, n_scan)
}

impl Solver {
    pub fn find(
        &self,
        k_min: f64,
        k_max: f64,
        n_scan: usize,
    ) -> Result<EigenSearch, SpectralError> {
        let scan = self.scan(k_min, k_max, n_scan)?;
        let n = scan.len();
        let v: Vec<f64> = scan.iter().map(|p| p.1).collect();
        let mut minima = Vec::new();
        for i in 0..n {
            let left = i == 0 || v[i] <= v[i - 1];
            let right = i + 1 == n || v[i] <= v[i + 1];
            if left && right && v[i] <= self.opts.scan_threshold {
                minima.push(i);
            }
        }
        let warnings = minima
            .windows(2)
            .filter(|w| w[1] - w[0] < 3)
            .map(|w| Warning::MissedEigenvalue {
                k1: scan[w[0]].0,
                k2: scan[w[1]].0,
            })
            .collect();
        let refined: Vec<(f64, f64)> = minima
            .par_iter()
            .map(|&i| self.refine(scan[i.saturating_sub(1)].0, scan[(i + 1).min(n - 1)].0))
            .collect::<Result<_, _>>()?;
        let mut pairs: Vec<EigenPair> = Vec::new();
        for (k, bracket) in refined {
            if k < k_min || k > k_max {
                continue;
            }
            if pairs.iter().any(|p| (p.k - k).abs() <= 1e-8) {
                continue;
            }
            if self.indicator(k)? > self.opts.accept_tol {
                continue;
            }
            pairs.push(self.eigenpair(k, bracket)?);
        }
        pairs.sort_by(|a, b| a.k.total_cmp(&b.k));
        Ok(EigenSearch {
            pairs,
            warnings,
            scan,
        })
    }
}

/// Lowest eigenpair in the `k` window.
pub fn ground_state(
    region: Arc<dyn Region>,
    k_min: f64,
    k_max: f64,
    n_scan: usize,
    opts: &SpectralOptions,
) -> Result<EigenPair, SpectralError> {
    find_eigs(region, k_min, k_max, n_scan, opts)?
        .pairs
        .into_iter()
        .next()
        .ok_or(SpectralError::NotFound { k_min, k_max })
}

/// Indicator of a region at one wavenumber.
pub fn indicator(
    region: Arc<dyn Region>,
    k: f64,
    opts: &SpectralOptions,
) -> Result<f64, SpectralError> {
    check_k(k)?;
    Solver::new(region, *opts)?.indicator(k)
}

/// Columns: k, indicator.
pub fn scan_csv(scan: &[(f64, f64)]) -> String {
    crate::export::series_csv("k", "indicator", scan)
}

/// Columns: index, lambda, k, error_bar, method.
pub fn eigen_table_csv(pairs: &[EigenPair], method: &str) -> String {
    let mut c = Csv::new(&["index", "lambda", "k", "error_bar", "method"]);
    for (i, p) in pairs.iter().enumerate() {
        c.row([
            i.to_string(),
            fmt17(p.lambda),
            fmt17(p.k),
            fmt17(p.error_bar),
            method.to_string(),
        ]);
    }
    c.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Disk, HalfDisk};
    use rand::Rng;

    #[test]
    fn brent_finds_parabola_vertex() {
        let f = |x: f64| Ok((x - 0.3).powi(2) + 1e-12);
        let (x, w) = brent_min(&f, 0.0, 1.0, 1e-10).unwrap();
        assert!((x - 0.3).abs() < 1e-9);
        assert!(w <= 1e-10, "{w}");
    }

    #[test]
    fn brent_handles_kinks() {
        let f = |x: f64| Ok((x - 0.71).abs());
        let (x, w) = brent_min(&f, 0.0, 1.0, 1e-10).unwrap();
        assert!((x - 0.71).abs() < 1e-10);
        assert!(w <= 1e-10);
    }

    fn disk_solver() -> Solver {
        let opts = SpectralOptions {
            basis: BasisOptions {
                n_src: 60,
                ..Default::default()
            },
            ..Default::default()
        };
        Solver::new(Arc::new(Disk::new(1.0)), opts).unwrap()
    }

    #[test]
    fn disk_indicator_on_and_off_resonance() {
        let s = disk_solver();
        assert!(s.indicator(2.404825557695773).unwrap() < 1e-8);
        assert!(s.indicator(2.0).unwrap() > 1e-2);
        assert!(s.indicator(0.0).is_err());
    }

    #[test]
    fn disk_ground_state_normalization() {
        let s = disk_solver();
        let (k, w) = s.refine(2.3, 2.5).unwrap();
        let p = s.eigenpair(k, w).unwrap();
        assert!((p.lambda - 5.783185962946784).abs() < 1e-8, "{p:?}");
        assert!((p.norm_check - 1.0).abs() < 1e-8);
        assert!(p.residual < 1e-6);
        assert_eq!(p.multiplicity, 1);
        // normalized J0(j r) / (sqrt(pi) J1(j)) at the center
        let peak = 1.0 / (std::f64::consts::PI.sqrt() * libm::j1(2.404825557695773));
        assert!((p.eval(Point::zeros()).unwrap() - peak).abs() < 1e-7);
        assert!(matches!(
            p.eval(Point::new(1.5, 0.0)),
            Err(SpectralError::OutsideDomain { .. })
        ));
        assert!(p.eval(Point::new(1.0, 0.0)).unwrap().abs() < 1e-6);
    }

    #[test]
    fn empty_window_gives_no_pairs() {
        let s = disk_solver();
        let r = s.find(2.6, 3.6, 20).unwrap();
        assert!(r.pairs.is_empty());
    }

    #[test]
    fn half_disk_ground_state_is_j11_squared_and_positive() {
        let opts = SpectralOptions {
            basis: BasisOptions {
                n_src: 120,
                ..Default::default()
            },
            ..Default::default()
        };
        let region: Arc<dyn Region> = Arc::new(HalfDisk::new(1.0));
        let s = Solver::new(region.clone(), opts).unwrap();
        let (k, w) = s.refine(3.7, 3.9).unwrap();
        let p = s.eigenpair(k, w).unwrap();
        assert!((p.lambda - 14.681970642123893).abs() < 1e-7, "{}", p.lambda);
        let mut r = crate::rng::stream(0, crate::rng::streams::SAMPLING, 7);
        let mut n = 0;
        while n < 1000 {
            let q = Point::new(r.gen_range(-1.0..1.0), r.gen_range(0.0..1.0));
            if region.contains(q) && q.norm() < 0.99 && q.y > 0.01 {
                assert!(p.value(q) > 0.0, "{q:?}");
                n += 1;
            }
        }
    }
}
