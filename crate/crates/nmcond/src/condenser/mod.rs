//! Parameter profiles and the two seeded non-malleable condensers.

mod nmcond;
pub mod profile;

pub use nmcond::{analyze_nm_cond, nm_cond, nm_cond_linear, CaseMargin, CondenserOutput, NmCondAnalysis};
pub use profile::{
    desk, micro, nm_cond_layout, nm_cond_linear_layout, paper, require_valid, seed_layout,
    validate_profile, Aka2Params, AkaParams, Layout, LayoutField, Mode, NmCondLinearParams,
    NmCondParams, ParameterProfile, Violation, PROFILE_SCHEMA,
};
