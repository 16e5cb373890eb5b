//! File formats: JSON documents, CSV profiles, SVG plots, DOT graphs and job specs.

pub mod job;
pub mod json;
pub mod plot;

pub use job::{Command, JobSpec, OutputFormat};
pub use json::{emit_module, emit_profile_json, emit_radii, parse_exponents, parse_module, parse_profile, parse_radii};
pub use plot::{profile_csv, profile_svg, skeleton_dot};
