//! Points and basic opens of the space of finite-range sequences, with the
//! forcing relation for the generic sequence `G`.

mod open;
mod schedule;

pub use open::{
    canonical_point, eval_schedule, force_value_into_range, forces_G_value, intersect, member,
    restrict_by_seq, split, subset, BasicOpen, CompatSeq, Condition, Point,
};
pub use schedule::BoundSchedule;
