//! The space of unbounded sets of naturals, with eventually periodic sets
//! standing in for both points and negative information.

mod open;
mod periodic;

pub use open::{
    canonical_set_point, compatible_extension_check, forces_in_generic, intersect_set, member_set,
    sequential_bound, unbounded_step, CompatibilityCheck, SetOpen,
};
pub use periodic::PeriodicSet;
