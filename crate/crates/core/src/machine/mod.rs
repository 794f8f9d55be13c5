//! A small indexed model of computation: unary combinators over saturating
//! 64-bit naturals, a bijective numbering, step-counted evaluation, and
//! checkable totality certificates.

mod eval;
mod pairing;
mod program;

use num_bigint::BigUint;
use num_integer::Integer;

pub use eval::{converges_below, eval_steps, Machine, Run, APPLY_DEPTH_LIMIT};
pub use pairing::{pair, pair_big, unpair, unpair_big};
pub use program::Program;

/// The certificate `2w + 1` for a program built without `mu` or `apply`.
pub fn certificate(w: &BigUint) -> BigUint {
    w * 2u32 + 1u32
}

/// Whether `j` certifies that program `w` is total.
pub fn check_proof(j: &BigUint, w: &BigUint) -> bool {
    let (half, rem) = j.div_rem(&BigUint::from(2u32));
    rem == BigUint::from(1u32) && &half == w && Program::from_index(w).is_total_fragment()
}
