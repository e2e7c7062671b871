//! Exact probability engine over explicit finite distributions.
//!
//! Distributions hold exact rationals. The exhaustive verifiers work on
//! integer weights over a common denominator and only build rationals for the
//! final reported quantities.

mod dist;
mod family;
pub mod lemmas;
mod verify;

pub use dist::{
    avg_cond_min_entropy, avg_guess_prob, condition, distance_to_min_entropy, min_entropy,
    stat_distance, Dist, JointDist,
};
pub use family::{binomial, FlatFamily, SourceSpec, WeightedSource};
pub use verify::{
    closest_source_distance, inner_error, inner_error_matrix, verify_nm_condenser, verify_nm_extractor,
    verify_strong_extractor, verify_two_source, AdversarySet, NmCondReport, NmExtReport,
    SeedPoint, TwoSourceReport, VerifyReport,
};
