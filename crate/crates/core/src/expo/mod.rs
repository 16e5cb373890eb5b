//! Exponent combinatorics and regular-singular solvers.

pub mod liouville;
pub mod shear;
pub mod solve;

pub use liouville::{
    frac_dist, integer_partition, liouville_partition, liouville_profile, prepared, scaled_dist, weakly_equivalent, Exponent,
    ExponentMultiset, HallWitness, LiouvilleStatus, LiouvilleVerdict, Partition, WeakVerdict,
};
pub use shear::{invert_gauge, residue_exponent, shear, ShearResult, ShearTarget};
pub use solve::{constant_basis, fuchs_basis, residue_is_prepared, ConstantBasis, FuchsBasis};
