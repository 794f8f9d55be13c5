//! Executable counterexample machinery over the toy machine: the
//! proof-bounded convergence function `v`, and the type-2 objects used against
//! extensional realizability.

pub mod ext;
pub mod fp;

pub use ext::{
    az_witness, big_e0, e0, enumerate_az, make_f_beta, pseudobound_demo, seq_continuity_bound,
    FiniteSupportFn, PseudoboundDemo,
};
pub use fp::{certificate_u64, FpLab, VTrace, DEFAULT_STEP_CAP};
