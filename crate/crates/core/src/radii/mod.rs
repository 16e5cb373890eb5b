//! Subsidiary radii: Christol–Dwork, Frobenius descent, the spectral-radius oracle
//! and radius profiles.

mod engine;
mod multiset;
mod oracle;
mod profile;

pub use engine::{christol_dwork, ir_log, module_radii, module_radii_with, RadiiOptions};
pub use multiset::{forward_descendant_law, invert_descendant_multiset, Certainty, RadiiEntry, RadiiMultiset};
pub use oracle::{spectral_radius_oracle, OracleReport, OracleStep};
pub use profile::{
    radii_profile, radii_profile_with, variation_check, Context, PAFunction, Piece, ProfileOptions, PropertyCheck, RadiiProfile,
    VariationReport,
};
