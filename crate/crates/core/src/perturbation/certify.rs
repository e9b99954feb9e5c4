use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{
    eigenpair_near, pair_rates_with_error, EvennessEstimate, GroundState, PerturbationError,
    PerturbationSpec, RatePair, SearchWindow, SegmentPair, NEAR_WINDOW,
};
use crate::billiards::{compare_spectra, length_spectrum, SearchCaps};
use crate::geometry::{MushroomPair, PairStatus, Region};
use crate::spectral::{EigenPair, SpectralOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CertifyOptions {
    /// Depth of the perturbing focal bump in units of `b`.
    pub epsilon: f64,
    pub safety_factor: f64,
    /// Largest admissible gap between matched lengths.
    pub match_tol: f64,
    pub caps: SearchCaps,
    pub window: SearchWindow,
    pub spectral: SpectralOptions,
    pub trace_nodes: usize,
    pub evenness_samples: usize,
    /// `None` uses [`SegmentPair::default_for`].
    pub segment: Option<SegmentPair>,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            epsilon: 1e-3,
            safety_factor: 5.0,
            match_tol: 1e-8,
            caps: SearchCaps {
                l_max: 6.0,
                n_max: 6,
                n_starts: 200,
                seed: 0,
            },
            window: SearchWindow {
                k_min: 3.0,
                k_max: 3.8,
                n_scan: 9,
            },
            spectral: SpectralOptions::default(),
            trace_nodes: 512,
            evenness_samples: 64,
            segment: None,
        }
    }
}

/// A yes/no finding with the statistic and threshold behind it; `None`
/// when the numbers cannot decide.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Verdict {
    pub value: Option<bool>,
    pub statistic: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    /// Lengths match, spectra and rates differ.
    Certified,
    /// An isometric or identical pair behaved as such.
    ControlConfirmed,
    Inconclusive,
    /// A verdict contradicts the expectation for the pair's status.
    Failed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenSummary {
    pub lambda: f64,
    pub k: f64,
    pub error_bar: f64,
    pub residual: f64,
    pub indicator: f64,
    pub n_src: usize,
}

impl EigenSummary {
    fn of(p: &EigenPair) -> Self {
        Self {
            lambda: p.lambda,
            k: p.k,
            error_bar: p.error_bar,
            residual: p.residual,
            indicator: p.indicator,
            n_src: p.basis().n_src(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LengthSummary {
    pub entries1: usize,
    pub entries2: usize,
    pub matched: usize,
    pub unmatched: usize,
    pub max_gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub pair_status: PairStatus,
    /// Absolute depth of the perturbing bump.
    pub epsilon: f64,
    pub safety_factor: f64,
    pub caps: SearchCaps,
    /// Unit-depth profile `f`; the pair carries `ε f` and its mirror.
    pub perturbation: PerturbationSpec,
    pub base: EigenSummary,
    pub omega1: EigenSummary,
    pub omega2: EigenSummary,
    pub gap: f64,
    pub rates: RatePair,
    pub evenness: EvennessEstimate,
    pub lengths: LengthSummary,
    pub lengths_match: Verdict,
    pub spectra_differ: Verdict,
    pub rates_differ: Verdict,
    pub outcome: Outcome,
}

fn solve_perturbed(
    region: Arc<dyn Region>,
    base: &EigenPair,
    rate: f64,
    eps: f64,
    opts: &SpectralOptions,
) -> Result<EigenPair, PerturbationError> {
    let dk = rate * eps / (2.0 * base.k);
    eigenpair_near(region, base.k + dk, dk.abs().max(NEAR_WINDOW), opts)
}

/// Length spectra, ground-state eigenvalues and rates for the pair whose
/// focal bump is the pair's own bump rescaled to depth `ε b`.
pub fn certify(
    pair: &MushroomPair,
    opts: &CertifyOptions,
) -> Result<Certificate, PerturbationError> {
    let base: Arc<dyn Region> = Arc::new(pair.base());
    let ground = GroundState::solve(base, opts.window, &opts.spectral)?;
    certify_with_ground(pair, opts, &ground)
}

/// [`certify`] with the ground state of the unperturbed domain
/// `pair.base()` already computed.
pub fn certify_with_ground(
    pair: &MushroomPair,
    opts: &CertifyOptions,
    ground: &GroundState,
) -> Result<Certificate, PerturbationError> {
    if !(opts.epsilon > 0.0 && opts.safety_factor >= 1.0) {
        return Err(PerturbationError::InvalidInput(
            "need epsilon > 0 and safety_factor >= 1".into(),
        ));
    }
    let status = pair.status();
    let base = pair.base();
    let eps = opts.epsilon * base.ellipse_spec().b();
    let f = PerturbationSpec::unit_depth(pair.omega1.focal_bumps(), eps);
    f.check_support(&base)?;
    let seg = opts
        .segment
        .unwrap_or_else(|| SegmentPair::default_for(&base));
    seg.check(&base)?;
    let eps_pair = MushroomPair::from_domain(base.with_focal_bumps(f.bumps_at(eps))?)?;

    let s1 = length_spectrum(&eps_pair.omega1, opts.caps);
    let s2 = length_spectrum(&eps_pair.omega2, opts.caps);
    let report = compare_spectra(&s1, &s2, opts.match_tol)?;
    let lengths = LengthSummary {
        entries1: s1.entries.len(),
        entries2: s2.entries.len(),
        matched: report.matched,
        unmatched: report.unmatched.len(),
        max_gap: report.max_gap,
    };
    let lengths_match = Verdict {
        value: Some(report.pass),
        statistic: report.max_gap,
        threshold: opts.match_tol,
    };

    let (fine, coarse) = ground.traces(opts.trace_nodes)?;
    let rates = pair_rates_with_error(&fine, &coarse, &f)?;
    let evenness = EvennessEstimate::compute(&fine, &coarse, &seg, opts.evenness_samples)?;

    let p1 = solve_perturbed(
        Arc::new(eps_pair.omega1.clone()),
        &ground.fine,
        rates.d1,
        eps,
        &opts.spectral,
    )?;
    let p2 = if status == PairStatus::Identical {
        p1.clone()
    } else {
        solve_perturbed(
            Arc::new(eps_pair.omega2.clone()),
            &ground.fine,
            rates.d2,
            eps,
            &opts.spectral,
        )?
    };
    let gap = (p1.lambda - p2.lambda).abs();
    let bars = p1.error_bar + p2.error_bar;
    let symmetric = status != PairStatus::Valid;
    let spectra_differ = Verdict {
        value: if gap > opts.safety_factor * bars {
            Some(true)
        } else if symmetric && gap <= bars {
            Some(false)
        } else {
            None
        },
        statistic: gap,
        threshold: opts.safety_factor * bars,
    };
    let rate_gap = rates.gap();
    let rates_differ = Verdict {
        value: if rate_gap > opts.safety_factor * rates.error {
            Some(true)
        } else if symmetric && rate_gap <= rates.error {
            Some(false)
        } else {
            None
        },
        statistic: rate_gap,
        threshold: opts.safety_factor * rates.error,
    };
    let verdicts = [
        lengths_match.value,
        spectra_differ.value,
        rates_differ.value,
    ];
    let expected = if symmetric {
        [true, false, false]
    } else {
        [true, true, true]
    };
    let outcome = if verdicts
        .iter()
        .zip(&expected)
        .any(|(v, e)| v.is_some_and(|v| v != *e))
    {
        Outcome::Failed
    } else if verdicts.iter().any(Option::is_none) {
        Outcome::Inconclusive
    } else if symmetric {
        Outcome::ControlConfirmed
    } else {
        Outcome::Certified
    };
    Ok(Certificate {
        pair_status: status,
        epsilon: eps,
        safety_factor: opts.safety_factor,
        caps: opts.caps,
        perturbation: f,
        base: EigenSummary::of(&ground.fine),
        omega1: EigenSummary::of(&p1),
        omega2: EigenSummary::of(&p2),
        gap,
        rates,
        evenness,
        lengths,
        lengths_match,
        spectra_differ,
        rates_differ,
        outcome,
    })
}
