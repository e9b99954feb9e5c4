//! C interface to `isolab`.
//!
//! Objects cross the boundary as opaque handles created by `*_new` or
//! query functions and released by the matching `*_free`. Every fallible
//! call returns an [`IsolabStatus`]; on failure the message is available
//! from [`isolab_last_error`] on the same thread until the next failing
//! call. Panics are caught and reported as `ISOLAB_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::sync::Arc;

use isolab::billiards::{compare_spectra, length_spectrum, LengthSpectrum, SearchCaps};
use isolab::cli::{self, CliError, Experiment, Format};
use isolab::geometry::{
    build_domain, build_ellipse, BumpSpec, DomainConfig, DomainSpec, MushroomPair, PairStatus,
    Point, Region,
};
use isolab::perturbation::PerturbationError;
use isolab::spectral::{ground_state, BasisOptions, EigenPair, SpectralOptions};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsolabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Geometry = 3,
    Billiard = 4,
    Spectral = 5,
    Perturbation = 6,
    Config = 7,
    Io = 8,
    Panic = 9,
}

/// One bump: `depth · φ((x - center) / half_width)` below the bottom.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct IsolabBump {
    pub center: f64,
    pub half_width: f64,
    pub depth: f64,
}

/// Search caps of the periodic-orbit search.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct IsolabCaps {
    pub l_max: f64,
    pub n_max: usize,
    pub n_starts: usize,
    pub seed: u64,
}

/// A domain and its partner with mirrored focal bumps.
pub struct IsolabPair {
    pair: MushroomPair,
}

pub struct IsolabLengthSpectrum {
    spectrum: LengthSpectrum,
}

pub struct IsolabEigenpair {
    pair: EigenPair,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

struct Failure(IsolabStatus, String);

impl Failure {
    fn invalid(msg: impl Into<String>) -> Self {
        Failure(IsolabStatus::InvalidArgument, msg.into())
    }

    fn null(what: &str) -> Self {
        Failure(IsolabStatus::NullPointer, format!("{what} is null"))
    }
}

impl From<isolab::geometry::GeometryError> for Failure {
    fn from(e: isolab::geometry::GeometryError) -> Self {
        Failure(IsolabStatus::Geometry, e.to_string())
    }
}

impl From<isolab::spectral::SpectralError> for Failure {
    fn from(e: isolab::spectral::SpectralError) -> Self {
        Failure(IsolabStatus::Spectral, e.to_string())
    }
}

impl From<isolab::billiards::BilliardError> for Failure {
    fn from(e: isolab::billiards::BilliardError) -> Self {
        Failure(IsolabStatus::Billiard, e.to_string())
    }
}

impl From<PerturbationError> for Failure {
    fn from(e: PerturbationError) -> Self {
        Failure(IsolabStatus::Perturbation, e.to_string())
    }
}

impl From<CliError> for Failure {
    fn from(e: CliError) -> Self {
        let code = match &e {
            CliError::Config(_) | CliError::Usage(_) => IsolabStatus::Config,
            CliError::Geometry(_) => IsolabStatus::Geometry,
            CliError::Spectral(_) => IsolabStatus::Spectral,
            CliError::Perturbation(_) => IsolabStatus::Perturbation,
            CliError::Billiard(_) => IsolabStatus::Billiard,
            CliError::Io { .. } => IsolabStatus::Io,
        };
        Failure(code, e.to_string())
    }
}

/// Run `f`, translating errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> IsolabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => IsolabStatus::Ok,
        Ok(Err(Failure(code, msg))) => {
            set_error(msg);
            code
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            IsolabStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure::null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| Failure::null(what))
}

unsafe fn bumps(p: *const IsolabBump, n: usize, what: &str) -> Result<Vec<BumpSpec>, Failure> {
    if n == 0 {
        return Ok(vec![]);
    }
    if p.is_null() {
        return Err(Failure::null(what));
    }
    Ok(std::slice::from_raw_parts(p, n)
        .iter()
        .map(|b| BumpSpec::new(b.center, b.half_width, b.depth))
        .collect())
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::invalid(format!("{what} is not valid UTF-8")))
}

fn member(pair: &MushroomPair, which: c_int) -> Result<DomainSpec, Failure> {
    match which {
        0 => Ok(pair.base()),
        1 => Ok(pair.omega1.clone()),
        2 => Ok(pair.omega2.clone()),
        _ => Err(Failure::invalid(format!(
            "member must be 0 (base), 1 or 2, got {which}"
        ))),
    }
}

fn into_c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Failure::invalid("output contains a NUL byte"))
}

/// Message of the last failed call on this thread; empty if none. The
/// pointer stays valid until the next failing call on the thread.
#[no_mangle]
pub extern "C" fn isolab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn isolab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Build the pair on the half-ellipse with semi-axes `a > b`: `omega1`
/// carries the given bumps, `omega2` the mirrored focal bumps.
///
/// # Safety
/// `outer` and `focal` must point to `n_outer` and `n_focal` bumps (or be
/// null when the count is 0); `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn isolab_pair_new(
    a: f64,
    b: f64,
    outer: *const IsolabBump,
    n_outer: usize,
    focal: *const IsolabBump,
    n_focal: usize,
    corner_rounding: f64,
    out_pair: *mut *mut IsolabPair,
) -> IsolabStatus {
    guard(|| {
        let slot = out(out_pair, "out_pair")?;
        let e = build_ellipse(a, b)?;
        let d = build_domain(
            e,
            bumps(outer, n_outer, "outer")?,
            bumps(focal, n_focal, "focal")?,
            corner_rounding,
        )?;
        let pair = MushroomPair::from_domain(d)?;
        *slot = Box::into_raw(Box::new(IsolabPair { pair }));
        Ok(())
    })
}

/// Build the pair from the JSON `geometry` block of a run configuration.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out_pair` must be writable.
#[no_mangle]
pub unsafe extern "C" fn isolab_pair_from_json(
    json: *const c_char,
    out_pair: *mut *mut IsolabPair,
) -> IsolabStatus {
    guard(|| {
        let slot = out(out_pair, "out_pair")?;
        let text = c_str(json, "json")?;
        let cfg: DomainConfig =
            serde_json::from_str(text).map_err(|e| Failure(IsolabStatus::Config, e.to_string()))?;
        let pair = MushroomPair::from_domain(DomainSpec::from_config(&cfg)?)?;
        *slot = Box::into_raw(Box::new(IsolabPair { pair }));
        Ok(())
    })
}

/// # Safety
/// `pair` must come from `isolab_pair_new` or `isolab_pair_from_json` and
/// not have been freed; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn isolab_pair_free(pair: *mut IsolabPair) {
    if !pair.is_null() {
        drop(Box::from_raw(pair));
    }
}

/// Writes 0 for a valid pair, 1 for mirror-image members (dual outer
/// bumps), 2 for identical members (self-dual focal bumps).
///
/// # Safety
/// `pair` must be a live handle; `out_status` must be writable.
#[no_mangle]
pub unsafe extern "C" fn isolab_pair_status(
    pair: *const IsolabPair,
    out_status: *mut c_int,
) -> IsolabStatus {
    guard(|| {
        let p = deref(pair, "pair")?;
        *out(out_status, "out_status")? = match p.pair.status() {
            PairStatus::Valid => 0,
            PairStatus::Isometric => 1,
            PairStatus::Identical => 2,
        };
        Ok(())
    })
}

/// Sample `n` boundary points of a member (0 base, 1 `omega1`, 2 `omega2`)
/// equally spaced in arc length into `xy` as `x0, y0, x1, y1, ...`.
///
/// # Safety
/// `pair` must be a live handle; `xy` must hold `2 n` doubles.
#[no_mangle]
pub unsafe extern "C" fn isolab_pair_boundary(
    pair: *const IsolabPair,
    which: c_int,
    n: usize,
    xy: *mut f64,
) -> IsolabStatus {
    guard(|| {
        let p = deref(pair, "pair")?;
        if n == 0 {
            return Ok(());
        }
        if xy.is_null() {
            return Err(Failure::null("xy"));
        }
        let d = member(&p.pair, which)?;
        let buf = std::slice::from_raw_parts_mut(xy, 2 * n);
        for (i, bp) in d.boundary().sample_uniform(n).iter().enumerate() {
            buf[2 * i] = bp.position.x;
            buf[2 * i + 1] = bp.position.y;
        }
        Ok(())
    })
}

/// Length spectrum of a member under `caps`.
///
/// # Safety
/// `pair` must be a live handle; `out_spectrum` must be writable.
#[no_mangle]
pub unsafe extern "C" fn isolab_length_spectrum(
    pair: *const IsolabPair,
    which: c_int,
    caps: IsolabCaps,
    out_spectrum: *mut *mut IsolabLengthSpectrum,
) -> IsolabStatus {
    guard(|| {
        let p = deref(pair, "pair")?;
        let slot = out(out_spectrum, "out_spectrum")?;
        if caps.l_max.is_nan() || caps.l_max <= 0.0 || caps.n_max < 2 || caps.n_starts == 0 {
            return Err(Failure::invalid(
                "caps need l_max > 0, n_max >= 2 and n_starts >= 1",
            ));
        }
        let d = member(&p.pair, which)?;
        let spectrum = length_spectrum(
            &d,
            SearchCaps {
                l_max: caps.l_max,
                n_max: caps.n_max,
                n_starts: caps.n_starts,
                seed: caps.seed,
            },
        );
        *slot = Box::into_raw(Box::new(IsolabLengthSpectrum { spectrum }));
        Ok(())
    })
}

/// Number of distinct lengths.
///
/// # Safety
/// `spectrum` must be a live handle or null (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn isolab_length_spectrum_len(
    spectrum: *const IsolabLengthSpectrum,
) -> usize {
    spectrum.as_ref().map_or(0, |s| s.spectrum.entries.len())
}

/// Entry `index` of the sorted spectrum.
///
/// # Safety
/// `spectrum` must be a live handle; the outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn isolab_length_spectrum_get(
    spectrum: *const IsolabLengthSpectrum,
    index: usize,
    out_length: *mut f64,
    out_multiplicity: *mut usize,
) -> IsolabStatus {
    guard(|| {
        let s = deref(spectrum, "spectrum")?;
        let e = s.spectrum.entries.get(index).ok_or_else(|| {
            Failure::invalid(format!(
                "index {index} out of range for {} entries",
                s.spectrum.entries.len()
            ))
        })?;
        *out(out_length, "out_length")? = e.length;
        *out(out_multiplicity, "out_multiplicity")? = e.multiplicity;
        Ok(())
    })
}

/// Match two spectra computed with identical caps; writes 1 to `out_pass`
/// when every length has a partner within `tol`.
///
/// # Safety
/// Both spectra must be live handles; the outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn isolab_length_spectra_compare(
    first: *const IsolabLengthSpectrum,
    second: *const IsolabLengthSpectrum,
    tol: f64,
    out_pass: *mut c_int,
    out_max_gap: *mut f64,
) -> IsolabStatus {
    guard(|| {
        let (a, b) = (deref(first, "first")?, deref(second, "second")?);
        let r = compare_spectra(&a.spectrum, &b.spectrum, tol)?;
        *out(out_pass, "out_pass")? = r.pass as c_int;
        *out(out_max_gap, "out_max_gap")? = r.max_gap;
        Ok(())
    })
}

/// # Safety
/// `spectrum` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn isolab_length_spectrum_free(spectrum: *mut IsolabLengthSpectrum) {
    if !spectrum.is_null() {
        drop(Box::from_raw(spectrum));
    }
}

/// Lowest Dirichlet eigenpair of a member with `k` in `[k_min, k_max]`,
/// scanned at `n_scan` points with about `n_src` sources (0 for the
/// default).
///
/// # Safety
/// `pair` must be a live handle; `out_eigen` must be writable.
#[no_mangle]
pub unsafe extern "C" fn isolab_ground_state(
    pair: *const IsolabPair,
    which: c_int,
    k_min: f64,
    k_max: f64,
    n_scan: usize,
    n_src: usize,
    out_eigen: *mut *mut IsolabEigenpair,
) -> IsolabStatus {
    guard(|| {
        let p = deref(pair, "pair")?;
        let slot = out(out_eigen, "out_eigen")?;
        let d: Arc<dyn Region> = Arc::new(member(&p.pair, which)?);
        let mut opts = SpectralOptions::default();
        if n_src > 0 {
            opts.basis = BasisOptions {
                n_src,
                ..opts.basis
            };
        }
        let pair = ground_state(d, k_min, k_max, n_scan, &opts)?;
        *slot = Box::into_raw(Box::new(IsolabEigenpair { pair }));
        Ok(())
    })
}

/// Eigenvalue and its error bar.
///
/// # Safety
/// `eigen` must be a live handle; the outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn isolab_eigenpair_lambda(
    eigen: *const IsolabEigenpair,
    out_lambda: *mut f64,
    out_error_bar: *mut f64,
) -> IsolabStatus {
    guard(|| {
        let e = deref(eigen, "eigen")?;
        *out(out_lambda, "out_lambda")? = e.pair.lambda;
        *out(out_error_bar, "out_error_bar")? = e.pair.error_bar;
        Ok(())
    })
}

/// Normalized eigenfunction at `(x, y)`, which must lie in the closed
/// domain.
///
/// # Safety
/// `eigen` must be a live handle; `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn isolab_eigenpair_value(
    eigen: *const IsolabEigenpair,
    x: f64,
    y: f64,
    out_value: *mut f64,
) -> IsolabStatus {
    guard(|| {
        let e = deref(eigen, "eigen")?;
        *out(out_value, "out_value")? = e.pair.eval(Point::new(x, y))?;
        Ok(())
    })
}

/// # Safety
/// `eigen` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn isolab_eigenpair_free(eigen: *mut IsolabEigenpair) {
    if !eigen.is_null() {
        drop(Box::from_raw(eigen));
    }
}

/// Run a command-line experiment (e.g. `"certify"`) on a JSON run
/// configuration. The report JSON is returned through `out_report` (free
/// with [`isolab_string_free`]) and the command-line exit code through
/// `out_exit_code`. Data tables are written to `out_dir` unless it is null.
///
/// # Safety
/// `experiment` and `config_json` must be NUL-terminated strings, `out_dir`
/// a NUL-terminated string or null; the outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn isolab_run(
    experiment: *const c_char,
    config_json: *const c_char,
    out_dir: *const c_char,
    out_report: *mut *mut c_char,
    out_exit_code: *mut c_int,
) -> IsolabStatus {
    guard(|| {
        let name = c_str(experiment, "experiment")?;
        let text = c_str(config_json, "config_json")?;
        let exp: Experiment = name.parse().map_err(Failure::invalid)?;
        let report_slot = out(out_report, "out_report")?;
        let code_slot = out(out_exit_code, "out_exit_code")?;
        let cfg = cli::parse_config_str(text, "<config>", None, exp.seed_needs())
            .map_err(CliError::from)?;
        let mut report = cli::run(exp, &cfg, Format::Csv)?;
        let files = if out_dir.is_null() {
            report.render()
        } else {
            let dir = c_str(out_dir, "out_dir")?;
            report.emit(Path::new(dir))?;
            report.render()
        };
        let json = files
            .into_iter()
            .find(|f| f.0 == "report.json")
            .map(|f| String::from_utf8_lossy(&f.1).into_owned())
            .unwrap_or_default();
        *report_slot = into_c_string(json)?;
        *code_slot = report.exit_code;
        Ok(())
    })
}

/// Release a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn isolab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
