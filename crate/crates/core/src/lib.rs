//! Executable models for the failure of boundedness principles.
//!
//! * [`seq`]: basic opens of the space of finite-range sequences.
//! * [`terms`]: decision-tree integer terms over that space.
//! * [`fusion`]: good-extension search and fusion constructions.
//! * [`sets`]: the space of unbounded sets with positive/negative opens.
//! * [`antispecker`]: bounded trees and escape schedules.
//! * [`machine`]: a step-counted toy machine with totality certificates.
//! * [`labs`]: the concrete realizability counterexamples.
//! * [`gen`]: seeded generators shared by the suites and tests.
//! * [`cli`]: the command-line surface and replayable certificates.

pub mod antispecker;
pub mod cli;
pub mod error;
pub mod fusion;
pub mod gen;
pub mod labs;
pub mod machine;
pub mod seq;
pub mod sets;
pub mod terms;

pub use error::{Error, Result};
