use serde::{Deserialize, Serialize};

use super::dynamics::{CrossingClass, Trajectory};
use super::orbits::{find_orbits, PeriodicOrbit, SearchOptions};
use super::BilliardError;
use crate::export::{fmt17, Csv};
use crate::geometry::Region;

/// Lengths closer than this are one spectral entry.
pub const CLUSTER_TOL: f64 = 1e-9;
/// Two degenerate orbits with caustic parameters this close belong to the
/// same family.
const FAMILY_MU_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchCaps {
    pub l_max: f64,
    pub n_max: usize,
    pub n_starts: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumEntry {
    pub length: f64,
    pub multiplicity: usize,
    /// Smallest bounce count in the cluster.
    pub n: usize,
    pub class: CrossingClass,
}

#[derive(Debug, Clone, Serialize)]
pub struct LengthSpectrum {
    pub entries: Vec<SpectrumEntry>,
    pub tolerance: f64,
    pub caps: SearchCaps,
    pub orbits: Vec<PeriodicOrbit>,
    pub non_convergent: usize,
    pub rejected: usize,
}

impl LengthSpectrum {
    /// Lengths repeated by multiplicity.
    pub fn expanded(&self) -> Vec<f64> {
        self.entries
            .iter()
            .flat_map(|e| std::iter::repeat_n(e.length, e.multiplicity))
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut c = Csv::new(&["length", "multiplicity", "n", "class"]);
        for e in &self.entries {
            c.row([
                fmt17(e.length),
                e.multiplicity.to_string(),
                e.n.to_string(),
                e.class.as_str().to_string(),
            ]);
        }
        c.finish()
    }
}

/// Number of distinct orbits in a cluster: isolated orbits count one each,
/// a continuous family counts once however many members were found.
fn multiplicity(cluster: &[&PeriodicOrbit]) -> usize {
    let mut families: Vec<(usize, Option<f64>)> = Vec::new();
    let mut isolated = 0;
    for o in cluster {
        if !o.degenerate {
            isolated += 1;
            continue;
        }
        let known = families.iter().any(|(n, mu)| {
            *n == o.n
                && match (mu, o.mu) {
                    (Some(a), Some(b)) => (a - b).abs() <= FAMILY_MU_TOL,
                    (None, None) => true,
                    _ => false,
                }
        });
        if !known {
            families.push((o.n, o.mu));
        }
    }
    isolated + families.len()
}

/// Cluster a set of orbits into a spectrum.
pub fn spectrum_from_orbits(
    mut orbits: Vec<PeriodicOrbit>,
    tolerance: f64,
    caps: SearchCaps,
) -> LengthSpectrum {
    orbits.sort_by(|a, b| a.length.total_cmp(&b.length));
    let mut entries = Vec::new();
    let mut i = 0;
    while i < orbits.len() {
        let mut j = i + 1;
        while j < orbits.len() && orbits[j].length - orbits[j - 1].length <= tolerance {
            j += 1;
        }
        let cluster: Vec<&PeriodicOrbit> = orbits[i..j].iter().collect();
        let length = cluster.iter().map(|o| o.length).sum::<f64>() / cluster.len() as f64;
        let n = cluster.iter().map(|o| o.n).min().unwrap_or(0);
        let class = if cluster.iter().all(|o| o.class == cluster[0].class) {
            cluster[0].class
        } else {
            CrossingClass::Separatrix
        };
        entries.push(SpectrumEntry {
            length,
            multiplicity: multiplicity(&cluster),
            n,
            class,
        });
        i = j;
    }
    LengthSpectrum {
        entries,
        tolerance,
        caps,
        orbits,
        non_convergent: 0,
        rejected: 0,
    }
}

/// Union of orbit searches for `n = 2..=n_max`, clustered at [`CLUSTER_TOL`].
pub fn length_spectrum(region: &dyn Region, caps: SearchCaps) -> LengthSpectrum {
    let mut all = Vec::new();
    let (mut non_convergent, mut rejected) = (0, 0);
    if caps.l_max > 0.0 {
        for n in 2..=caps.n_max {
            let r = find_orbits(
                region,
                n,
                caps.l_max,
                caps.n_starts,
                caps.seed,
                SearchOptions::default(),
            );
            non_convergent += r.non_convergent;
            rejected += r.rejected;
            all.extend(r.orbits);
        }
    }
    let mut s = spectrum_from_orbits(all, CLUSTER_TOL, caps);
    s.non_convergent = non_convergent;
    s.rejected = rejected;
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Unmatched {
    /// 1 or 2: which spectrum the length came from.
    pub side: u8,
    pub length: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MatchReport {
    pub pass: bool,
    pub matched: usize,
    pub max_gap: f64,
    pub unmatched: Vec<Unmatched>,
}

/// Greedy matching of the two sorted length lists, multiplicities expanded.
pub fn compare_spectra(
    s1: &LengthSpectrum,
    s2: &LengthSpectrum,
    match_tol: f64,
) -> Result<MatchReport, BilliardError> {
    if s1.caps != s2.caps {
        return Err(BilliardError::CapMismatch {
            first: s1.caps,
            second: s2.caps,
        });
    }
    let (a, b) = (s1.expanded(), s2.expanded());
    let (mut i, mut j) = (0, 0);
    let mut max_gap: f64 = 0.0;
    let mut matched = 0;
    let mut unmatched = Vec::new();
    while i < a.len() && j < b.len() {
        let gap = (a[i] - b[j]).abs();
        if gap <= match_tol {
            max_gap = max_gap.max(gap);
            matched += 1;
            i += 1;
            j += 1;
        } else if a[i] < b[j] {
            unmatched.push(Unmatched {
                side: 1,
                length: a[i],
            });
            i += 1;
        } else {
            unmatched.push(Unmatched {
                side: 2,
                length: b[j],
            });
            j += 1;
        }
    }
    unmatched.extend(a[i..].iter().map(|&length| Unmatched { side: 1, length }));
    unmatched.extend(b[j..].iter().map(|&length| Unmatched { side: 2, length }));
    Ok(MatchReport {
        pass: unmatched.is_empty(),
        matched,
        max_gap,
        unmatched,
    })
}

/// Columns: bounce_index, s, x, y, dx, dy, mu, zone. `dx, dy` is the
/// outgoing direction; `mu` belongs to the chord ending at the bounce.
pub fn trajectory_csv(t: &Trajectory) -> String {
    let mut c = Csv::new(&["bounce_index", "s", "x", "y", "dx", "dy", "mu", "zone"]);
    for b in &t.bounces {
        c.row([
            b.index.to_string(),
            fmt17(b.s),
            fmt17(b.position.x),
            fmt17(b.position.y),
            fmt17(b.outgoing.x),
            fmt17(b.outgoing.y),
            b.mu.map_or_else(String::new, fmt17),
            b.zone.as_str().to_string(),
        ]);
    }
    c.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_domain, build_ellipse, Point};

    fn caps() -> SearchCaps {
        SearchCaps {
            l_max: 10.0,
            n_max: 3,
            n_starts: 10,
            seed: 1,
        }
    }

    fn orbit(length: f64) -> PeriodicOrbit {
        PeriodicOrbit {
            n: 2,
            s: vec![0.0, 1.0],
            points: vec![Point::zeros(), Point::new(0.0, length / 2.0)],
            length,
            residual: 0.0,
            reflection_residual: 0.0,
            class: CrossingClass::Outer,
            mu: None,
            degenerate: false,
        }
    }

    #[test]
    fn clustering_sums_multiplicities() {
        let s = spectrum_from_orbits(
            vec![orbit(2.0), orbit(2.0 + 5e-10), orbit(3.0)],
            CLUSTER_TOL,
            caps(),
        );
        assert_eq!(s.entries.len(), 2);
        assert_eq!(s.entries[0].multiplicity, 2);
        assert!(s.entries.windows(2).all(|w| w[0].length < w[1].length));
    }

    #[test]
    fn family_members_count_once() {
        let mut a = orbit(4.0);
        a.degenerate = true;
        a.mu = Some(0.5);
        let mut b = a.clone();
        b.points[0].x = 0.3;
        let s = spectrum_from_orbits(vec![a, b], CLUSTER_TOL, caps());
        assert_eq!(s.entries[0].multiplicity, 1);
    }

    #[test]
    fn identical_spectra_match_exactly() {
        let s = spectrum_from_orbits(vec![orbit(2.0), orbit(3.5)], CLUSTER_TOL, caps());
        let r = compare_spectra(&s, &s, 1e-8).unwrap();
        assert!(r.pass);
        assert_eq!(r.max_gap, 0.0);
    }

    #[test]
    fn shifted_entry_is_reported() {
        let s1 = spectrum_from_orbits(vec![orbit(2.0), orbit(3.5)], CLUSTER_TOL, caps());
        let s2 = spectrum_from_orbits(vec![orbit(2.0), orbit(3.501)], CLUSTER_TOL, caps());
        let r = compare_spectra(&s1, &s2, 1e-8).unwrap();
        assert!(!r.pass);
        assert_eq!(r.unmatched.len(), 2);
        assert!(r.unmatched.iter().any(|u| u.side == 1 && u.length == 3.5));
    }

    #[test]
    fn cap_mismatch_is_an_error() {
        let s1 = spectrum_from_orbits(vec![], CLUSTER_TOL, caps());
        let mut c = caps();
        c.seed = 2;
        let s2 = spectrum_from_orbits(vec![], CLUSTER_TOL, c);
        assert!(matches!(
            compare_spectra(&s1, &s2, 1e-8),
            Err(BilliardError::CapMismatch { .. })
        ));
    }

    #[test]
    fn half_ellipse_short_spectrum() {
        let d = build_domain(build_ellipse(2.0, 1.0).unwrap(), vec![], vec![], 0.0).unwrap();
        let caps = SearchCaps {
            l_max: 2.5,
            n_max: 2,
            n_starts: 50,
            seed: 4,
        };
        let s = length_spectrum(&d, caps);
        assert_eq!(s.entries.len(), 1);
        assert!((s.entries[0].length - 2.0).abs() < 1e-12);
        assert_eq!(s.entries[0].multiplicity, 1);
        let empty = length_spectrum(&d, SearchCaps { l_max: 0.0, ..caps });
        assert!(empty.entries.is_empty());
    }
}
