//! Run configuration: the geometry block plus one block per experiment
//! family, read from JSON.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::billiards::SearchCaps;
use crate::geometry::{DomainConfig, DomainSpec, GeometryError, MushroomPair};
use crate::perturbation::{CertifyOptions, ScanRanges, SearchWindow, SegmentPair};
use crate::spectral::{BasisOptions, SpectralOptions};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: cannot read: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}{}: {message}", line.map(|l| format!(":{l}")).unwrap_or_default())]
    Validation {
        path: String,
        line: Option<usize>,
        message: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BilliardsBlock {
    /// Longest orbit searched; `None` means `3a`.
    #[serde(rename = "L_max")]
    pub l_max: Option<f64>,
    pub n_max: usize,
    /// Multistart count per bounce number.
    pub n_starts: usize,
    pub seed: Option<u64>,
    /// Trajectories and bounces for `billiard-dichotomy`.
    pub n_traj: usize,
    pub n_bounces: usize,
    /// Trajectories written by `billiard-trace`.
    pub n_trace: usize,
}

impl Default for BilliardsBlock {
    fn default() -> Self {
        Self {
            l_max: None,
            n_max: 6,
            n_starts: 200,
            seed: None,
            n_traj: 1000,
            n_bounces: 500,
            n_trace: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectralBlock {
    pub k_min: f64,
    pub k_max: f64,
    pub n_scan: usize,
    /// Requested source count (a floor set by edge grading may exceed it).
    pub n_src: usize,
    /// Collocation points per source.
    pub n_col: usize,
    pub trace_nodes: usize,
    /// Grid spacing of the finite-difference cross-check; `None` skips it.
    pub fd_h: Option<f64>,
}

impl Default for SpectralBlock {
    fn default() -> Self {
        Self {
            k_min: 3.0,
            k_max: 3.8,
            n_scan: 9,
            n_src: BasisOptions::default().n_src,
            n_col: BasisOptions::default().col_per_src,
            trace_nodes: 512,
            fd_h: None,
        }
    }
}

impl SpectralBlock {
    pub fn options(&self) -> SpectralOptions {
        SpectralOptions {
            basis: BasisOptions {
                n_src: self.n_src,
                col_per_src: self.n_col,
                ..Default::default()
            },
            ..Default::default()
        }
    }

    pub fn window(&self) -> SearchWindow {
        SearchWindow {
            k_min: self.k_min,
            k_max: self.k_max,
            n_scan: self.n_scan,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PerturbationBlock {
    /// Depth of the perturbing bump in units of `b`.
    pub epsilon: f64,
    pub safety_factor: f64,
    pub seed: Option<u64>,
    /// Amplitudes for `perturb-check`, in units of `b`.
    pub eps_list: Vec<f64>,
    pub n_samples: usize,
    pub evenness_samples: usize,
    pub segment: Option<SegmentPair>,
    pub match_tol: f64,
    pub ranges: ScanRanges,
}

impl Default for PerturbationBlock {
    fn default() -> Self {
        Self {
            epsilon: 1e-3,
            safety_factor: 5.0,
            seed: None,
            eps_list: vec![1e-3, 5e-4, 2.5e-4],
            n_samples: 100,
            evenness_samples: 64,
            segment: None,
            match_tol: 1e-8,
            ranges: ScanRanges::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: DomainConfig,
    #[serde(default)]
    pub billiards: BilliardsBlock,
    #[serde(default)]
    pub spectral: SpectralBlock,
    #[serde(default)]
    pub perturbation: PerturbationBlock,
}

/// Which seeds a subcommand consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedNeeds {
    pub billiards: bool,
    pub perturbation: bool,
}

impl RunConfig {
    /// The running example: half-ellipse `a = 2, b = 1`, nondual outer bumps
    /// at `x = -1.85` and `x = 1.80`, one focal bump at `x = -0.8`, seeds 1.
    pub fn running_example() -> Self {
        let text = include_str!("../../configs/running.json");
        serde_json::from_str(text).expect("bundled configuration parses")
    }

    pub fn domain(&self) -> Result<DomainSpec, GeometryError> {
        DomainSpec::from_config(&self.geometry)
    }

    pub fn pair(&self) -> Result<MushroomPair, GeometryError> {
        MushroomPair::from_domain(self.domain()?)
    }

    pub fn caps(&self) -> SearchCaps {
        SearchCaps {
            l_max: self
                .billiards
                .l_max
                .unwrap_or(3.0 * self.geometry.ellipse.a()),
            n_max: self.billiards.n_max,
            n_starts: self.billiards.n_starts,
            seed: self.billiards.seed.unwrap_or(0),
        }
    }

    pub fn certify_options(&self) -> CertifyOptions {
        CertifyOptions {
            epsilon: self.perturbation.epsilon,
            safety_factor: self.perturbation.safety_factor,
            match_tol: self.perturbation.match_tol,
            caps: self.caps(),
            window: self.spectral.window(),
            spectral: self.spectral.options(),
            trace_nodes: self.spectral.trace_nodes,
            evenness_samples: self.perturbation.evenness_samples,
            segment: self.perturbation.segment,
        }
    }

    /// Replace every seed by `seed`.
    pub fn override_seed(&mut self, seed: u64) {
        self.billiards.seed = Some(seed);
        self.perturbation.seed = Some(seed);
    }
}

/// 1-based line of the `index`-th object in the array under `"key"`.
fn locate_array_item(text: &str, key: &str, index: usize) -> Option<usize> {
    let start = text.find(&format!("\"{key}\""))?;
    let open = start + text[start..].find('[')?;
    let mut depth = 0usize;
    let mut seen = 0usize;
    let mut in_str = false;
    let mut escaped = false;
    for (off, ch) in text[open..].char_indices() {
        if in_str {
            match (escaped, ch) {
                (true, _) => escaped = false,
                (false, '\\') => escaped = true,
                (false, '"') => in_str = false,
                _ => {}
            }
            continue;
        }
        match ch {
            '"' => in_str = true,
            '[' | '{' => {
                if ch == '{' && depth == 1 {
                    if seen == index {
                        return Some(text[..open + off].matches('\n').count() + 1);
                    }
                    seen += 1;
                }
                depth += 1;
            }
            ']' | '}' => {
                depth -= 1;
                if depth == 0 {
                    return None;
                }
            }
            _ => {}
        }
    }
    None
}

fn geometry_line(text: &str, e: &GeometryError) -> Option<usize> {
    match e {
        GeometryError::ZoneViolation { list, index, .. }
        | GeometryError::InvalidBump { list, index } => {
            locate_array_item(text, &format!("{list}_bumps"), *index)
        }
        GeometryError::DegenerateEllipse { .. } => text
            .find("\"ellipse\"")
            .map(|p| text[..p].matches('\n').count() + 1),
        GeometryError::InvalidRounding { .. } => text
            .find("\"corner_rounding\"")
            .map(|p| text[..p].matches('\n').count() + 1),
        GeometryError::OverlapViolation { .. } => None,
    }
}

/// Parse and validate a configuration held in memory; `path` only labels
/// messages.
pub fn parse_config_str(
    text: &str,
    path: &str,
    seed_override: Option<u64>,
    needs: SeedNeeds,
) -> Result<RunConfig, ConfigError> {
    let mut cfg: RunConfig = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
        path: path.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if let Some(s) = seed_override {
        cfg.override_seed(s);
    }
    let invalid = |line: Option<usize>, message: String| ConfigError::Validation {
        path: path.to_string(),
        line,
        message,
    };
    cfg.domain()
        .map_err(|e| invalid(geometry_line(text, &e), e.to_string()))?;
    let line_of = |key: &str| {
        text.find(&format!("\"{key}\""))
            .map(|p| text[..p].matches('\n').count() + 1)
    };
    if needs.billiards && cfg.billiards.seed.is_none() {
        return Err(invalid(
            line_of("billiards"),
            "billiards.seed is required for this experiment (or pass --seed)".into(),
        ));
    }
    if needs.perturbation && cfg.perturbation.seed.is_none() {
        return Err(invalid(
            line_of("perturbation"),
            "perturbation.seed is required for this experiment (or pass --seed)".into(),
        ));
    }
    let s = &cfg.spectral;
    if !(s.k_min > 0.0 && s.k_max > s.k_min) || s.n_scan < 2 || s.n_src == 0 || s.n_col == 0 {
        return Err(invalid(
            line_of("spectral"),
            "spectral block needs 0 < k_min < k_max, n_scan >= 2, n_src >= 1, n_col >= 1".into(),
        ));
    }
    let p = &cfg.perturbation;
    if !(p.epsilon > 0.0) || !(p.safety_factor >= 1.0) {
        return Err(invalid(
            line_of("perturbation"),
            "perturbation block needs epsilon > 0 and safety_factor >= 1".into(),
        ));
    }
    Ok(cfg)
}

pub fn parse_config(
    path: &Path,
    seed_override: Option<u64>,
    needs: SeedNeeds,
) -> Result<RunConfig, ConfigError> {
    let label = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: label.clone(),
        source,
    })?;
    parse_config_str(&text, &label, seed_override, needs)
}

/// Resolve `out` against the working directory and create it.
pub fn prepare_out_dir(out: &Path) -> Result<PathBuf, ConfigError> {
    std::fs::create_dir_all(out).map_err(|source| ConfigError::Io {
        path: out.display().to_string(),
        source,
    })?;
    out.canonicalize().map_err(|source| ConfigError::Io {
        path: out.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const NO: SeedNeeds = SeedNeeds {
        billiards: false,
        perturbation: false,
    };

    #[test]
    fn minimal_config_parses() {
        let text = r#"{"geometry": {"ellipse": {"a": 2, "b": 1},
            "focal_bumps": [{"center": -0.8, "half_width": 0.3, "depth": 0.25}]}}"#;
        let c = parse_config_str(text, "mem", None, NO).unwrap();
        assert_eq!(c.geometry.focal_bumps.len(), 1);
        assert_eq!(c.caps().l_max, 6.0);
    }

    #[test]
    fn straddling_bump_names_line_and_zone() {
        let text = "{\n\"geometry\": {\n\"ellipse\": {\"a\": 2, \"b\": 1},\n\"focal_bumps\": [\n{\"center\": -0.8, \"half_width\": 0.1, \"depth\": 0.1},\n{\"center\": 1.73, \"half_width\": 0.1, \"depth\": 0.1}\n]}}";
        let e = parse_config_str(text, "cfg.json", None, NO).unwrap_err();
        let msg = e.to_string();
        assert!(msg.starts_with("cfg.json:6:"), "{msg}");
        assert!(msg.contains("focal") && msg.contains("#1"), "{msg}");
    }

    #[test]
    fn seeds_are_mandatory_when_consumed() {
        let text = r#"{"geometry": {"ellipse": {"a": 2, "b": 1}}}"#;
        let needs = SeedNeeds {
            billiards: false,
            perturbation: true,
        };
        assert!(matches!(
            parse_config_str(text, "m", None, needs),
            Err(ConfigError::Validation { .. })
        ));
        let c = parse_config_str(text, "m", Some(9), needs).unwrap();
        assert_eq!(c.perturbation.seed, Some(9));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let e = parse_config_str("{\n\"geometry\": ,}", "x", None, NO).unwrap_err();
        assert!(matches!(e, ConfigError::Parse { line: 2, .. }), "{e}");
        let e = parse_config_str(
            r#"{"geometry": {"ellipse": {"a": 2, "b": 1}}, "bogus": 1}"#,
            "x",
            None,
            NO,
        )
        .unwrap_err();
        assert!(e.to_string().contains("bogus"));
    }
}
