use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use rand::Rng;
use serde_json::json;

use super::verify;
use super::{
    CliError, DataFile, Experiment, Format, RunConfig, RunReport, Status, Step, Timing, VERSION,
};
use crate::billiards::{
    compare_spectra, dichotomy_check, gradient_norm_at, length_spectrum, random_interior, trace,
    trajectory_csv, CrossingClass, LengthSpectrum, Ray,
};
use crate::export::{fmt17, Csv};
use crate::geometry::{mirror_point, DomainSpec, MushroomPair, Point, Region};
use crate::perturbation::{
    certify, fd_rate_check, genericity_scan, pair_rates_with_error, squared_normal_derivative,
    Certificate, EvennessEstimate, GroundState, Outcome, PerturbationSpec, SegmentPair,
};
use crate::rng;
use crate::spectral::{eigen_table_csv, fd_oracle, find_eigs, normal_trace, scan_csv, FdOptions};

/// Samples per boundary polyline.
pub const POLYLINE_SAMPLES: usize = 4096;
/// Largest gradient norm of a mirrored focal-crossing orbit on the partner
/// domain.
pub const MIRROR_GRADIENT_TOL: f64 = 1e-9;
/// Largest relative deviation between the finite-difference slope and the
/// boundary-integral rate.
pub const FD_RATE_TOL: f64 = 0.01;
/// Soft target for the fraction of random bumps with distinguishable rates.
pub const GENERICITY_TARGET: f64 = 0.9;

/// Steps, tables and wall-clock times collected while an experiment runs.
#[derive(Default)]
pub(crate) struct Log {
    pub steps: Vec<Step>,
    pub data: Vec<DataFile>,
    pub notes: Vec<String>,
    pub times: Vec<(String, f64)>,
    pub certificate: Option<Certificate>,
}

impl Log {
    pub fn step(&mut self, step: Step, started: Instant) {
        self.times
            .push((step.name.clone(), started.elapsed().as_secs_f64()));
        self.steps.push(step);
    }

    pub fn data(&mut self, stem: impl Into<String>, csv: String) {
        self.data.push(DataFile::new(stem, csv));
    }
}

/// Execute `experiment` and assemble its report; nothing is written.
pub fn run(experiment: Experiment, cfg: &RunConfig, format: Format) -> Result<RunReport, CliError> {
    let t0 = Instant::now();
    let mut log = Log::default();
    match experiment {
        Experiment::PairMake => pair_make(cfg, &mut log)?,
        Experiment::BilliardTrace => billiard_trace(cfg, &mut log)?,
        Experiment::BilliardLengths => billiard_lengths(cfg, &mut log)?,
        Experiment::BilliardDichotomy => billiard_dichotomy(cfg, &mut log)?,
        Experiment::SpectrumEigs => spectrum_eigs(cfg, &mut log)?,
        Experiment::SpectrumTrace => spectrum_trace(cfg, &mut log)?,
        Experiment::PerturbRates => perturb_rates(cfg, &mut log)?,
        Experiment::PerturbCheck => perturb_check(cfg, &mut log)?,
        Experiment::Certify => run_certify(cfg, &mut log)?,
        Experiment::Scan => scan(cfg, &mut log)?,
        Experiment::VerifyAll => verify::verify_all(cfg, &mut log)?,
    }
    let status = RunReport::aggregate(&log.steps);
    Ok(RunReport {
        tool: "isolab",
        version: VERSION,
        experiment,
        format,
        config: cfg.clone(),
        steps: log.steps,
        certificate: log.certificate,
        files: vec![],
        notes: log.notes,
        status,
        exit_code: status.exit_code(),
        timing: Some(Timing {
            total_seconds: t0.elapsed().as_secs_f64(),
            steps: log.times,
        }),
        data: log.data,
    })
}

fn region_of(d: &DomainSpec) -> Arc<dyn Region> {
    Arc::new(d.clone())
}

fn members(pair: &MushroomPair) -> [(&'static str, &DomainSpec); 2] {
    [("omega1", &pair.omega1), ("omega2", &pair.omega2)]
}

/// Columns: s, x, y.
pub fn polyline_csv(d: &DomainSpec, n: usize) -> String {
    let mut c = Csv::new(&["s", "x", "y"]);
    for p in d.boundary().sample_uniform(n) {
        c.row([fmt17(p.s), fmt17(p.position.x), fmt17(p.position.y)]);
    }
    c.finish()
}

fn pair_make(cfg: &RunConfig, log: &mut Log) -> Result<(), CliError> {
    let t = Instant::now();
    let pair = cfg.pair()?;
    let e = pair.omega1.ellipse_spec();
    for (name, d) in members(&pair) {
        log.data(
            format!("boundary_{name}"),
            polyline_csv(d, POLYLINE_SAMPLES),
        );
    }
    let result = json!({
        "pair_status": pair.status(),
        "b_dual": pair.b_dual,
        "m_self_dual": pair.m_self_dual,
        "a": e.a(),
        "b": e.b(),
        "c": e.c(),
        "clearance": pair.omega1.clearance(),
        "perimeter": pair.omega1.perimeter(),
        "omega1": pair.omega1.to_config(),
        "omega2": pair.omega2.to_config(),
    });
    log.step(Step::new("pair", Status::Complete, result), t);
    Ok(())
}

fn billiard_trace(cfg: &RunConfig, log: &mut Log) -> Result<(), CliError> {
    let pair = cfg.pair()?;
    let b = &cfg.billiards;
    let seed = b.seed.unwrap_or_default();
    for (name, d) in members(&pair) {
        let t = Instant::now();
        let mut rows = Vec::new();
        for i in 0..b.n_trace {
            let mut r = rng::stream(seed, rng::streams::TRAJECTORY, i as u64);
            let start = random_interior(d, &mut r);
            let angle = r.gen_range(0.0..2.0 * PI);
            let traj = trace(d, &Ray::from_angle(start, angle), b.n_bounces);
            log.data(format!("trajectory_{name}_{i:03}"), trajectory_csv(&traj));
            rows.push(json!({
                "index": i,
                "start": start,
                "angle": angle,
                "bounces": traj.bounces.len(),
                "abandoned": traj.abandoned,
                "mu_drift": traj.mu_drift(),
            }));
        }
        log.step(
            Step::new(format!("trace_{name}"), Status::Complete, rows),
            t,
        );
    }
    Ok(())
}

/// Mirror every focal-crossing orbit of `s1` and measure its gradient norm
/// on `omega2`.
pub(crate) fn mirror_check(s1: &LengthSpectrum, omega2: &DomainSpec) -> (usize, f64) {
    let mut count = 0;
    let mut worst: f64 = 0.0;
    for o in s1
        .orbits
        .iter()
        .filter(|o| o.class == CrossingClass::FocalCrossing)
    {
        let pts: Vec<Point> = o.points.iter().map(|p| mirror_point(*p)).collect();
        worst = worst.max(gradient_norm_at(omega2, &pts));
        count += 1;
    }
    (count, worst)
}

fn billiard_lengths(cfg: &RunConfig, log: &mut Log) -> Result<(), CliError> {
    let pair = cfg.pair()?;
    let caps = cfg.caps();
    let t = Instant::now();
    let s1 = length_spectrum(&pair.omega1, caps);
    let s2 = length_spectrum(&pair.omega2, caps);
    log.data("lengths_omega1", s1.to_csv());
    log.data("lengths_omega2", s2.to_csv());
    let report = compare_spectra(&s1, &s2, cfg.perturbation.match_tol)?;
    let result = json!({
        "caps": caps,
        "entries": [s1.entries.len(), s2.entries.len()],
        "orbits": [s1.orbits.len(), s2.orbits.len()],
        "non_convergent": [s1.non_convergent, s2.non_convergent],
        "rejected": [s1.rejected, s2.rejected],
        "match_tol": cfg.perturbation.match_tol,
        "match": report,
    });
    log.step(
        Step::new("compare", Status::from_pass(report.pass), result),
        t,
    );
    let t = Instant::now();
    let (count, worst) = mirror_check(&s1, &pair.omega2);
    let result = json!({
        "focal_crossing_orbits": count,
        "max_gradient_norm": worst,
        "tolerance": MIRROR_GRADIENT_TOL,
    });
    log.step(
        Step::new(
            "mirror_check",
            Status::from_pass(worst <= MIRROR_GRADIENT_TOL),
            result,
        ),
        t,
    );
    Ok(())
}

pub(crate) fn dichotomy_csv(r: &crate::billiards::DichotomyReport) -> String {
    let mut c = Csv::new(&[
        "domain",
        "index",
        "start_x",
        "start_y",
        "angle",
        "bounces",
        "abandoned",
        "zones",
        "violation",
        "zone_failures",
        "class_failures",
    ]);
    for v in &r.trajectories {
        let zones: Vec<&str> = v.zones.iter().map(|z| z.as_str()).collect();
        c.row([
            v.domain.to_string(),
            v.index.to_string(),
            fmt17(v.start.x),
            fmt17(v.start.y),
            fmt17(v.angle),
            v.bounces.to_string(),
            v.abandoned.to_string(),
            zones.join(";"),
            v.violation.to_string(),
            v.zone_failures.to_string(),
            v.class_failures.to_string(),
        ]);
    }
    c.finish()
}

fn billiard_dichotomy(cfg: &RunConfig, log: &mut Log) -> Result<(), CliError> {
    let pair = cfg.pair()?;
    let b = &cfg.billiards;
    let t = Instant::now();
    let r = dichotomy_check(&pair, b.n_traj, b.n_bounces, b.seed.unwrap_or_default());
    log.data("dichotomy", dichotomy_csv(&r));
    let result = json!({
        "n_traj": r.n_traj,
        "n_bounces": r.n_bounces,
        "seed": r.seed,
        "omega1": r.omega1,
        "omega2": r.omega2,
        "violations": r.violations(),
        "zone_failures": r.zone_failures(),
        "abandoned": r.abandoned(),
    });
    log.step(Step::new("dichotomy", Status::from_pass(r.pass), result), t);
    Ok(())
}

fn spectrum_eigs(cfg: &RunConfig, log: &mut Log) -> Result<(), CliError> {
    let pair = cfg.pair()?;
    let s = &cfg.spectral;
    let opts = s.options();
    for (name, d) in members(&pair) {
        let t = Instant::now();
        let found = find_eigs(region_of(d), s.k_min, s.k_max, s.n_scan, &opts)?;
        log.data(format!("scan_{name}"), scan_csv(&found.scan));
        log.data(format!("eigs_{name}"), eigen_table_csv(&found.pairs, "mfs"));
        let pairs: Vec<_> = found
            .pairs
            .iter()
            .map(|p| {
                json!({
                    "lambda": p.lambda,
                    "k": p.k,
                    "error_bar": p.error_bar,
                    "residual": p.residual,
                    "indicator": p.indicator,
                    "multiplicity": p.multiplicity,
                })
            })
            .collect();
        let mut result = json!({
            "n_src": found.pairs.first().map(|p| p.basis().n_src()),
            "eigenpairs": pairs,
            "warnings": found.warnings,
        });
        if found.pairs.is_empty() {
            log.notes.push(format!(
                "{name}: no eigenvalue with k in [{}, {}]",
                s.k_min, s.k_max
            ));
        }
        if let Some(h) = s.fd_h {
            let n = found.pairs.len().max(1);
            let fd = fd_oracle(d, h, n, &FdOptions::default())?;
            let mut c = Csv::new(&["index", "lambda", "h", "method"]);
            for (i, l) in fd.eigenvalues.iter().enumerate() {
                c.row([i.to_string(), fmt17(*l), fmt17(h), "fd".into()]);
            }
            log.data(format!("fd_{name}"), c.finish());
            let rel: Vec<f64> = found
                .pairs
                .iter()
                .zip(&fd.eigenvalues)
                .map(|(p, l)| (p.lambda - l).abs() / p.lambda)
                .collect();
            result["fd"] = json!({
                "h": h,
                "nodes": fd.nodes,
                "eigenvalues": fd.eigenvalues,
                "relative_difference": rel,
            });
        }
        log.step(
            Step::new(format!("eigs_{name}"), Status::Complete, result),
            t,
        );
    }
    Ok(())
}

fn spectrum_trace(cfg: &RunConfig, log: &mut Log) -> Result<(), CliError> {
    let pair = cfg.pair()?;
    let s = &cfg.spectral;
    for (name, d) in members(&pair) {
        let t = Instant::now();
        let g = GroundState::solve(region_of(d), s.window(), &s.options())?;
        let tr = normal_trace(&g.fine, s.trace_nodes)?;
        log.data(format!("trace_{name}"), tr.to_csv());
        let result = json!({
            "lambda": g.fine.lambda,
            "error_bar": g.fine.error_bar,
            "nodes": tr.samples.len(),
            "rellich_defect": tr.rellich_defect(),
            "sign_changes": tr.sign_changes(1e-3),
        });
        log.step(
            Step::new(format!("trace_{name}"), Status::Complete, result),
            t,
        );
    }
    Ok(())
}

/// Unit-depth profile of the configured focal bumps at amplitude `ε b`.
pub(crate) fn profile(cfg: &RunConfig, base: &DomainSpec) -> Result<PerturbationSpec, CliError> {
    let pair = cfg.pair()?;
    let eps = cfg.perturbation.epsilon * base.ellipse_spec().b();
    let f = PerturbationSpec::unit_depth(pair.omega1.focal_bumps(), eps);
    if f.bumps.is_empty() {
        return Err(CliError::Usage(
            "the configuration has no focal bumps to perturb with".into(),
        ));
    }
    f.check_support(base)?;
    Ok(f)
}

/// Columns: x, q_plus, q_minus with `q = (∂νψ)²` at `(±x, 0)`.
pub(crate) fn bottom_q_csv(g: &GroundState, seg: &SegmentPair, n: usize) -> String {
    let mut c = Csv::new(&["x", "q_plus", "q_minus"]);
    for i in 0..n {
        let x = seg.x1 + (i as f64 + 0.5) / n as f64 * (seg.x2 - seg.x1);
        c.row([
            fmt17(x),
            fmt17(squared_normal_derivative(&g.fine, x)),
            fmt17(squared_normal_derivative(&g.fine, -x)),
        ]);
    }
    c.finish()
}

fn perturb_rates(cfg: &RunConfig, log: &mut Log) -> Result<(), CliError> {
    let pair = cfg.pair()?;
    let base = pair.base();
    let s = &cfg.spectral;
    let t = Instant::now();
    let f = profile(cfg, &base)?;
    let g = GroundState::solve(region_of(&base), s.window(), &s.options())?;
    let (fine, coarse) = g.traces(s.trace_nodes)?;
    let rates = pair_rates_with_error(&fine, &coarse, &f)?;
    let seg = cfg
        .perturbation
        .segment
        .unwrap_or_else(|| SegmentPair::default_for(&base));
    seg.check(&base)?;
    let n = cfg.perturbation.evenness_samples;
    let evenness = EvennessEstimate::compute(&fine, &coarse, &seg, n)?;
    log.data("trace_base", fine.to_csv());
    log.data("bottom_q", bottom_q_csv(&g, &seg, n));
    let result = json!({
        "base_lambda": g.fine.lambda,
        "base_error_bar": g.fine.error_bar,
        "coarse_lambda": g.coarse.lambda,
        "perturbation": f,
        "rates": rates,
        "rate_gap": rates.gap(),
        "evenness": evenness,
        "rellich_defect": fine.rellich_defect(),
    });
    log.step(Step::new("rates", Status::Complete, result), t);
    Ok(())
}

fn perturb_check(cfg: &RunConfig, log: &mut Log) -> Result<(), CliError> {
    let pair = cfg.pair()?;
    let base = pair.base();
    let s = &cfg.spectral;
    let t = Instant::now();
    let f = profile(cfg, &base)?;
    let opts = s.options();
    let g = GroundState::solve(region_of(&base), s.window(), &opts)?;
    let tr = normal_trace(&g.fine, s.trace_nodes)?;
    let r = fd_rate_check(&base, &tr, &f, &cfg.perturbation.eps_list, &opts)?;
    let mut c = Csv::new(&["epsilon", "lambda", "error_bar", "slope"]);
    for i in 0..r.epsilons.len() {
        c.row([
            fmt17(r.epsilons[i]),
            fmt17(r.lambdas[i]),
            fmt17(r.error_bars[i]),
            fmt17(r.slopes[i]),
        ]);
    }
    log.data("fd_rate", c.finish());
    let pass = r.deviation <= FD_RATE_TOL;
    let result = json!({ "report": r, "tolerance": FD_RATE_TOL });
    log.step(
        Step::new("fd_rate_check", Status::from_pass(pass), result),
        t,
    );
    Ok(())
}

pub(crate) fn outcome_status(o: Outcome) -> Status {
    match o {
        Outcome::Certified | Outcome::ControlConfirmed => Status::Pass,
        Outcome::Inconclusive => Status::Inconclusive,
        Outcome::Failed => Status::Fail,
    }
}

/// Columns: domain, lambda, k, error_bar, residual.
pub(crate) fn certificate_csv(c: &Certificate) -> String {
    let mut t = Csv::new(&["domain", "lambda", "k", "error_bar", "residual"]);
    for (name, e) in [
        ("base", &c.base),
        ("omega1", &c.omega1),
        ("omega2", &c.omega2),
    ] {
        t.row([
            name.to_string(),
            fmt17(e.lambda),
            fmt17(e.k),
            fmt17(e.error_bar),
            fmt17(e.residual),
        ]);
    }
    t.finish()
}

fn run_certify(cfg: &RunConfig, log: &mut Log) -> Result<(), CliError> {
    let pair = cfg.pair()?;
    let t = Instant::now();
    let c = certify(&pair, &cfg.certify_options())?;
    log.data("certificate_eigs", certificate_csv(&c));
    let result = json!({
        "outcome": c.outcome,
        "verdicts": [c.lengths_match.value, c.spectra_differ.value, c.rates_differ.value],
    });
    log.step(Step::new("certify", outcome_status(c.outcome), result), t);
    log.certificate = Some(c);
    Ok(())
}

/// Columns: center, half_width, depth, d1, d2, gap, error, threshold, exceeds.
pub(crate) fn scan_table(s: &crate::perturbation::GenericityScan) -> String {
    let mut c = Csv::new(&[
        "center",
        "half_width",
        "depth",
        "d1",
        "d2",
        "gap",
        "error",
        "threshold",
        "exceeds",
    ]);
    for x in &s.samples {
        c.row([
            fmt17(x.bump.center),
            fmt17(x.bump.half_width),
            fmt17(x.bump.depth),
            fmt17(x.d1),
            fmt17(x.d2),
            fmt17(x.gap),
            fmt17(x.error),
            fmt17(x.threshold),
            x.exceeds.to_string(),
        ]);
    }
    c.finish()
}

fn scan(cfg: &RunConfig, log: &mut Log) -> Result<(), CliError> {
    let pair = cfg.pair()?;
    let base = pair.base();
    let s = &cfg.spectral;
    let p = &cfg.perturbation;
    let t = Instant::now();
    let g = GroundState::solve(region_of(&base), s.window(), &s.options())?;
    let (fine, coarse) = g.traces(s.trace_nodes)?;
    let r = genericity_scan(
        &base,
        &fine,
        &coarse,
        p.n_samples,
        p.seed.unwrap_or_default(),
        &p.ranges,
        p.safety_factor,
    )?;
    log.data("genericity", scan_table(&r));
    let status = match r.fraction {
        Some(f) if f >= GENERICITY_TARGET => Status::Pass,
        Some(_) => Status::Warn,
        None => Status::Complete,
    };
    let result = json!({
        "fraction": r.fraction,
        "target": GENERICITY_TARGET,
        "ratio_quantiles": r.ratio_quantiles,
        "n_samples": r.samples.len(),
        "seed": r.seed,
    });
    log.step(Step::new("scan", status, result), t);
    Ok(())
}
