//! Trace of Frobenius by point counting on `y² + a1·xy + a3·y = x³ + a2·x² + a4·x + a6`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::padic::is_prime;

pub const ENUMERATION_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurveError {
    #[error("p = {0} is not prime")]
    NotPrime(u64),
    #[error("bad reduction at p = {p}: discriminant {disc} is divisible by p")]
    BadReduction { p: u64, disc: BigInt },
    #[error("p = {p} exceeds the enumeration cap {cap}")]
    TooLarge { p: u64, cap: u64 },
}

/// Weierstrass coefficients `[a1, a2, a3, a4, a6]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Weierstrass(pub [i64; 5]);

impl Weierstrass {
    pub fn discriminant(&self) -> BigInt {
        let [a1, a2, a3, a4, a6] = self.0.map(BigInt::from);
        let b2 = &a1 * &a1 + 4 * &a2;
        let b4 = 2 * &a4 + &a1 * &a3;
        let b6 = &a3 * &a3 + 4 * &a6;
        let b8 = &a1 * &a1 * &a6 + 4 * &a2 * &a6 - &a1 * &a3 * &a4 + &a2 * &a3 * &a3 - &a4 * &a4;
        -&b2 * &b2 * &b8 - 8 * &b4 * &b4 * &b4 - 27 * &b6 * &b6 + 9 * &b2 * &b4 * &b6
    }

    pub fn has_good_reduction(&self, p: u64) -> bool {
        !self.discriminant().mod_floor(&BigInt::from(p)).is_zero()
    }
}

fn pow_mod(mut b: u128, mut e: u128, m: u128) -> u128 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// Legendre symbol by Euler's criterion, `p` odd.
fn legendre(d: u128, p: u128) -> i64 {
    match pow_mod(d, (p - 1) / 2, p) {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}

/// `#E(F_p)`, enumerating `x` and solving the quadratic in `y`.
pub fn point_count(curve: &Weierstrass, p: u64) -> Result<u64, CurveError> {
    if !is_prime(p) {
        return Err(CurveError::NotPrime(p));
    }
    if p > ENUMERATION_CAP {
        return Err(CurveError::TooLarge { p, cap: ENUMERATION_CAP });
    }
    if !curve.has_good_reduction(p) {
        return Err(CurveError::BadReduction { p, disc: curve.discriminant() });
    }
    let m = p as u128;
    let [a1, a2, a3, a4, a6] = curve.0.map(|c| c.rem_euclid(p as i64) as u128);
    let mut count = 1u64;
    for x in 0..m {
        let b = (a1 * x + a3) % m;
        let c = (((x + a2) * x % m + a4) * x + a6) % m;
        count += if p == 2 {
            // y² + b·y = c: b = 0 gives y = c; b = 1 needs c = 0 since y² + y vanishes on F_2.
            match (b, c) {
                (0, _) => 1,
                (_, 0) => 2,
                _ => 0,
            }
        } else {
            (1 + legendre((b * b + 4 * c) % m, m)) as u64
        };
    }
    Ok(count)
}

/// `a_p = p + 1 − #E(F_p)`.
pub fn ap_point_count(curve: &Weierstrass, p: u64) -> Result<i64, CurveError> {
    Ok(p as i64 + 1 - point_count(curve, p)? as i64)
}
