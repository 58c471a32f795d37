//! Transitivity, reach times and density of large periodic points.

mod dlp;
mod invariant;
mod reach;
mod symbolic;
mod transitivity;

pub use dlp::{
    dlp_check_direct, dlp_check_touhey, resolution_cells, verify_dlp, CellFailure, CellWitness,
    DlpVerdict, Engine, Refutation, Resolution,
};
pub use invariant::{
    classify_invariant_region, empty_interior_check, ClosedSet, InteriorVerdict, InvariantClass,
};
pub use reach::{
    ncycle_sup_reach, reach_outcome, reach_time, unbounded_reach_witness, NCycleAnalysis,
    ReachOutcome, ReachWitness,
};
pub use symbolic::shared_periodic_orbit;
pub use transitivity::{
    transitivity_certificate, verify_transitivity, TransitivityCertificate, TransitivityVerdict,
};
