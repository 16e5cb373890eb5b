//! Exact computation of convergence radii for differential modules over
//! nonarchimedean discs and annuli.

pub mod berkdisc;
pub mod diffmod;
pub mod error;
pub mod expo;
pub mod formats;
pub mod linalg;
pub mod radii;
pub mod valcore;

pub use error::{Error, Result};
