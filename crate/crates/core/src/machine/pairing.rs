use num_bigint::BigUint;

/// Cantor pairing, saturating at `u64::MAX`.
pub fn pair(a: u64, b: u64) -> u64 {
    let s = a as u128 + b as u128;
    s.checked_mul(s + 1)
        .and_then(|t| u64::try_from(t / 2 + b as u128).ok())
        .unwrap_or(u64::MAX)
}

pub fn unpair(c: u64) -> (u64, u64) {
    let c = c as u128;
    let w = ((8 * c + 1).isqrt() - 1) / 2;
    let b = c - w * (w + 1) / 2;
    ((w - b) as u64, b as u64)
}

pub fn pair_big(a: &BigUint, b: &BigUint) -> BigUint {
    let s = a + b;
    (&s * (&s + 1u32)) / 2u32 + b
}

pub fn unpair_big(c: &BigUint) -> (BigUint, BigUint) {
    let w = ((c * 8u32 + 1u32).sqrt() - 1u32) / 2u32;
    let b = c - (&w * (&w + 1u32)) / 2u32;
    (w - &b, b)
}
