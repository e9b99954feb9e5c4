//! Billiard flow in mushroom domains: specular reflection, confocal
//! classification of chords, periodic orbits and length spectra.

mod conservation;
mod dichotomy;
mod dynamics;
mod orbits;
mod spectrum;

pub use conservation::{conservation_check, ConservationReport, DriftSample};
pub(crate) use dichotomy::random_interior;
pub use dichotomy::{dichotomy_check, DichotomyReport, DomainStats, TrajectoryVisit};
pub use dynamics::{
    caustic_parameter, classify, step, trace, zone_consistency_failures, zone_tag, Bounce,
    CrossingClass, Ray, Trajectory, ZoneTag, CORNER_TOL, GRAZING_TOL, MIN_TRAVEL, SEPARATRIX_TOL,
};
pub use orbits::{
    find_orbits, gradient_norm_at, reflection_defect, OrbitSearch, PeriodicOrbit, SearchOptions,
    DEGENERACY_TOL, GRADIENT_TOL, MIN_CHORD,
};
pub use spectrum::{
    compare_spectra, length_spectrum, spectrum_from_orbits, trajectory_csv, LengthSpectrum,
    MatchReport, SearchCaps, SpectrumEntry, Unmatched, CLUSTER_TOL,
};

use thiserror::Error;

use crate::geometry::Point;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BilliardError {
    #[error("ray left the domain without a boundary hit")]
    Escaped,
    #[error("{} hit at ({}, {})", if *corner { "corner" } else { "grazing" }, point.x, point.y)]
    GrazingOrCorner { point: Point, corner: bool },
    #[error("search caps differ: {first:?} vs {second:?}")]
    CapMismatch {
        first: SearchCaps,
        second: SearchCaps,
    },
}
