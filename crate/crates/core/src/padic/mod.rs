//! Fixed-precision arithmetic in `Q_p` and in the quadratic algebra `Q_p(α)`,
//! `α² = a_p·α − p`, together with the roots of the Hecke polynomial.
//!
//! A nonzero [`PadicScalar`] is `p^val · unit` with the unit known modulo
//! `p^prec`; a zero is known modulo `p^abs`, or exactly.

mod hecke;
pub(crate) mod pow;
mod quad;

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::{BigRational, Rational64};
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

pub use hecke::{hecke_roots, is_allowable, HeckeRootPair, HeckeRoots, ReductionType};
pub use quad::{ExtContext, QuadExtScalar};

use pow::{pow, split_p};
pub use pow::is_prime;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PadicError {
    #[error("denominator is zero")]
    ZeroDenominator,
    #[error("precision must be at least 1, got {0}")]
    BadPrecision(i64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("operands live over different primes ({0} and {1})")]
    PrimeMismatch(u64, u64),
    #[error("extension contexts differ")]
    ContextMismatch,
    #[error("division by an element indistinguishable from zero")]
    DivisionByZero,
    #[error("a_p = {a_p} violates the Hasse bound at p = {p}")]
    HasseBound { a_p: i64, p: u64 },
    #[error("digit {digit} out of range for p = {p}")]
    BadDigit { digit: u64, p: u64 },
    #[error("malformed scalar: {0}")]
    Malformed(String),
}

/// `p`-adic valuation, possibly infinite.
///
/// `Infinite` orders above every finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(Rational64),
    Infinite,
}

impl Valuation {
    pub fn int(v: i64) -> Self {
        Valuation::Finite(Rational64::from_integer(v))
    }

    pub fn half(twice: i64) -> Self {
        Valuation::Finite(Rational64::new(twice, 2))
    }

    pub fn finite(self) -> Option<Rational64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }

    /// Adds a finite shift; infinity absorbs.
    pub fn shift(self, by: Rational64) -> Self {
        match self {
            Valuation::Finite(v) => Valuation::Finite(v + by),
            Valuation::Infinite => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) if v.is_integer() => write!(f, "{}", v.numer()),
            Valuation::Finite(v) => write!(f, "{}/{}", v.numer(), v.denom()),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

/// Anything with a `p`-adic valuation.
pub trait Valued {
    fn valuation(&self) -> Valuation;
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Repr {
    /// Zero modulo `p^abs`; `None` is an exact zero.
    Zero { abs: Option<i64> },
    /// `p^val · unit`, `unit` in `[1, p^prec)` and prime to `p`.
    Unit { val: i64, unit: BigUint, prec: i64 },
}

/// An element of `Q_p` at finite precision.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PadicScalar {
    p: u64,
    repr: Repr,
}

fn min_abs(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => Some(x.min(y)),
    }
}

impl PadicScalar {
    /// The exact zero.
    pub fn zero(p: u64) -> Self {
        PadicScalar { p, repr: Repr::Zero { abs: None } }
    }

    /// Zero known modulo `p^abs`.
    pub fn zero_to(p: u64, abs: i64) -> Self {
        PadicScalar { p, repr: Repr::Zero { abs: Some(abs) } }
    }

    pub fn one(p: u64, prec: i64) -> Self {
        Self::from_i64(1, p, prec)
    }

    /// The integer `n` with `prec` significant digits; `0` is the exact zero.
    pub fn from_bigint(n: &BigInt, p: u64, prec: i64) -> Self {
        if n.is_zero() {
            return Self::zero(p);
        }
        let (v, m) = split_p(n.magnitude().clone(), p);
        Self::from_signed_unit(p, v, m, n.sign() == Sign::Minus, prec)
    }

    pub fn from_i64(n: i64, p: u64, prec: i64) -> Self {
        Self::from_bigint(&BigInt::from(n), p, prec)
    }

    /// The integer `n` known modulo `p^abs`.
    pub fn from_bigint_abs(n: &BigInt, p: u64, abs: i64) -> Self {
        if n.is_zero() {
            return Self::zero_to(p, abs);
        }
        let (v, m) = split_p(n.magnitude().clone(), p);
        if v >= abs {
            return Self::zero_to(p, abs);
        }
        Self::from_signed_unit(p, v, m, n.sign() == Sign::Minus, abs - v)
    }

    fn from_signed_unit(p: u64, val: i64, m: BigUint, negative: bool, prec: i64) -> Self {
        let modulus = pow(p, prec);
        let mut unit = m % &modulus;
        if negative {
            unit = &modulus - unit;
        }
        PadicScalar { p, repr: Repr::Unit { val, unit, prec } }
    }

    /// Builds `p^val · unit` from raw parts, checking the invariants.
    pub fn from_parts(p: u64, val: i64, unit: BigUint, prec: i64) -> Result<Self, PadicError> {
        if prec < 1 {
            return Err(PadicError::BadPrecision(prec));
        }
        if unit >= pow(p, prec) || (&unit % p).is_zero() {
            return Err(PadicError::Malformed(format!("unit {unit} for p = {p}, prec = {prec}")));
        }
        Ok(PadicScalar { p, repr: Repr::Unit { val, unit, prec } })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero { .. })
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero { abs: None })
    }

    /// Integer valuation; `None` for zero.
    pub fn val(&self) -> Option<i64> {
        match self.repr {
            Repr::Zero { .. } => None,
            Repr::Unit { val, .. } => Some(val),
        }
    }

    pub fn unit(&self) -> Option<&BigUint> {
        match &self.repr {
            Repr::Zero { .. } => None,
            Repr::Unit { unit, .. } => Some(unit),
        }
    }

    /// Number of significant digits of the unit.
    pub fn rel_prec(&self) -> Option<i64> {
        match self.repr {
            Repr::Zero { .. } => None,
            Repr::Unit { prec, .. } => Some(prec),
        }
    }

    /// Known modulo `p^abs_prec`; `None` when exact.
    pub fn abs_prec(&self) -> Option<i64> {
        match self.repr {
            Repr::Zero { abs } => abs,
            Repr::Unit { val, prec, .. } => Some(val + prec),
        }
    }

    /// Little-endian base-`p` digits of the unit.
    pub fn digits(&self) -> Vec<u64> {
        let Some(unit) = self.unit() else {
            return Vec::new();
        };
        let prec = self.rel_prec().unwrap() as usize;
        let mut out = Vec::with_capacity(prec);
        let mut n = unit.clone();
        let pb = BigUint::from(self.p);
        for _ in 0..prec {
            let d = &n % &pb;
            out.push(d.to_u64().unwrap());
            n /= &pb;
        }
        out
    }

    pub fn from_digits(p: u64, val: i64, digits: &[u64]) -> Result<Self, PadicError> {
        let mut unit = BigUint::zero();
        for &d in digits.iter().rev() {
            if d >= p {
                return Err(PadicError::BadDigit { digit: d, p });
            }
            unit = unit * p + d;
        }
        Self::from_parts(p, val, unit, digits.len() as i64)
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.p, other.p, "p-adic operands over different primes");
    }

    pub fn neg(&self) -> Self {
        match &self.repr {
            Repr::Zero { .. } => self.clone(),
            Repr::Unit { val, unit, prec } => PadicScalar {
                p: self.p,
                repr: Repr::Unit { val: *val, unit: pow(self.p, *prec) - unit, prec: *prec },
            },
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        let p = self.p;
        match (&self.repr, &other.repr) {
            (Repr::Zero { abs: a }, Repr::Zero { abs: b }) => {
                PadicScalar { p, repr: Repr::Zero { abs: min_abs(*a, *b) } }
            }
            (Repr::Zero { abs }, _) => other.reduce_abs_opt(*abs),
            (_, Repr::Zero { abs }) => self.reduce_abs_opt(*abs),
            (
                Repr::Unit { val: vx, unit: ux, prec: rx },
                Repr::Unit { val: vy, unit: uy, prec: ry },
            ) => {
                let abs = (vx + rx).min(vy + ry);
                let m = (*vx).min(*vy);
                if abs <= m {
                    return Self::zero_to(p, abs);
                }
                let modulus = pow(p, abs - m);
                let mut s = if vx == vy {
                    ux + uy
                } else if vx < vy {
                    ux + uy * pow(p, vy - vx)
                } else {
                    ux * pow(p, vx - vy) + uy
                };
                s %= &modulus;
                if s.is_zero() {
                    return Self::zero_to(p, abs);
                }
                let (k, rest) = split_p(s, p);
                let val = m + k;
                PadicScalar { p, repr: Repr::Unit { val, unit: rest, prec: abs - val } }
            }
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        let p = self.p;
        match (&self.repr, &other.repr) {
            (Repr::Zero { abs: a }, Repr::Zero { abs: b }) => {
                let abs = match (a, b) {
                    (Some(a), Some(b)) => Some(a + b),
                    _ => None,
                };
                PadicScalar { p, repr: Repr::Zero { abs } }
            }
            (Repr::Zero { abs }, Repr::Unit { val, .. }) | (Repr::Unit { val, .. }, Repr::Zero { abs }) => {
                PadicScalar { p, repr: Repr::Zero { abs: abs.map(|a| a + val) } }
            }
            (
                Repr::Unit { val: vx, unit: ux, prec: rx },
                Repr::Unit { val: vy, unit: uy, prec: ry },
            ) => {
                let prec = (*rx).min(*ry);
                let unit = (ux * uy) % pow(p, prec);
                PadicScalar { p, repr: Repr::Unit { val: vx + vy, unit, prec } }
            }
        }
    }

    /// Multiplication by an exact integer.
    pub fn mul_int(&self, n: &BigInt) -> Self {
        if n.is_zero() {
            return Self::zero(self.p);
        }
        match &self.repr {
            Repr::Zero { abs } => {
                let (v, _) = split_p(n.magnitude().clone(), self.p);
                PadicScalar { p: self.p, repr: Repr::Zero { abs: abs.map(|a| a + v) } }
            }
            Repr::Unit { val, unit, prec } => {
                let (v, m) = split_p(n.magnitude().clone(), self.p);
                let modulus = pow(self.p, *prec);
                let mut u = (unit * m) % &modulus;
                if n.is_negative() {
                    u = &modulus - u;
                }
                PadicScalar { p: self.p, repr: Repr::Unit { val: val + v, unit: u, prec: *prec } }
            }
        }
    }

    pub fn mul_i64(&self, n: i64) -> Self {
        self.mul_int(&BigInt::from(n))
    }

    /// Multiplication by `p^k`.
    pub fn shift(&self, k: i64) -> Self {
        match &self.repr {
            Repr::Zero { abs } => PadicScalar { p: self.p, repr: Repr::Zero { abs: abs.map(|a| a + k) } },
            Repr::Unit { val, unit, prec } => PadicScalar {
                p: self.p,
                repr: Repr::Unit { val: val + k, unit: unit.clone(), prec: *prec },
            },
        }
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, PadicError> {
        if self.p != other.p {
            return Err(PadicError::PrimeMismatch(self.p, other.p));
        }
        let p = self.p;
        let Repr::Unit { val: vy, unit: uy, prec: ry } = &other.repr else {
            return Err(PadicError::DivisionByZero);
        };
        Ok(match &self.repr {
            Repr::Zero { abs } => PadicScalar { p, repr: Repr::Zero { abs: abs.map(|a| a - vy) } },
            Repr::Unit { val: vx, unit: ux, prec: rx } => {
                let prec = (*rx).min(*ry);
                let modulus = pow(p, prec);
                let inv = (uy % &modulus).modinv(&modulus).expect("unit is invertible");
                let unit = (ux * inv) % &modulus;
                PadicScalar { p, repr: Repr::Unit { val: vx - vy, unit, prec } }
            }
        })
    }

    pub fn inv(&self) -> Result<Self, PadicError> {
        let one = match &self.repr {
            Repr::Unit { prec, .. } => Self::one(self.p, *prec),
            Repr::Zero { .. } => return Err(PadicError::DivisionByZero),
        };
        one.checked_div(self)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = match &self.repr {
            Repr::Unit { prec, .. } => Self::one(self.p, *prec),
            Repr::Zero { .. } if e > 0 => return self.mul(&self.pow(e - 1)),
            Repr::Zero { .. } => return Self::one(self.p, 1),
        };
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    fn reduce_abs_opt(&self, cap: Option<i64>) -> Self {
        match cap {
            None => self.clone(),
            Some(c) => self.reduce_abs(c),
        }
    }

    /// Forgets every digit at or beyond `p^cap`.
    pub fn reduce_abs(&self, cap: i64) -> Self {
        match &self.repr {
            Repr::Zero { abs } => PadicScalar {
                p: self.p,
                repr: Repr::Zero { abs: Some(abs.map_or(cap, |a| a.min(cap))) },
            },
            Repr::Unit { val, unit, prec } => {
                if *val >= cap {
                    return Self::zero_to(self.p, cap);
                }
                let new_prec = (*prec).min(cap - val);
                PadicScalar {
                    p: self.p,
                    repr: Repr::Unit { val: *val, unit: unit % pow(self.p, new_prec), prec: new_prec },
                }
            }
        }
    }

    /// Declares the balanced representative exact up to `p^abs`; never lowers precision.
    ///
    /// Integers of absolute value below `p^prec/2` lift to themselves.
    pub fn lift_abs(&self, abs: i64) -> Self {
        match &self.repr {
            Repr::Zero { abs: None } => self.clone(),
            Repr::Zero { abs: Some(a) } => Self::zero_to(self.p, (*a).max(abs)),
            Repr::Unit { val, unit, prec } => {
                let new_prec = (*prec).max(abs - val);
                let modulus = pow(self.p, *prec);
                let unit = if new_prec > *prec && unit * 2u32 > modulus {
                    pow(self.p, new_prec) - (&modulus - unit)
                } else {
                    unit.clone()
                };
                PadicScalar { p: self.p, repr: Repr::Unit { val: *val, unit, prec: new_prec } }
            }
        }
    }

    /// Balanced rational representative: the unit is taken in `(−p^prec/2, p^prec/2]`.
    pub fn to_rational(&self) -> BigRational {
        match &self.repr {
            Repr::Zero { .. } => BigRational::zero(),
            Repr::Unit { val, unit, prec } => {
                let modulus = pow(self.p, *prec);
                let mut u = BigInt::from(unit.clone());
                if unit * 2u32 > modulus {
                    u -= BigInt::from(modulus);
                }
                let pv = BigInt::from(pow(self.p, val.abs()));
                if *val >= 0 {
                    BigRational::from_integer(u * pv)
                } else {
                    BigRational::new(u, pv)
                }
            }
        }
    }

    /// True when `self − other` is zero at the combined precision.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }
}

impl Valued for PadicScalar {
    fn valuation(&self) -> Valuation {
        match self.repr {
            Repr::Zero { .. } => Valuation::Infinite,
            Repr::Unit { val, .. } => Valuation::int(val),
        }
    }
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_rational())?;
        if f.alternate() {
            match self.abs_prec() {
                Some(a) => write!(f, " + O({}^{})", self.p, a)?,
                None => write!(f, " (exact)")?,
            }
        }
        Ok(())
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $inner:ident) => {
        impl std::ops::$tr<&PadicScalar> for &PadicScalar {
            type Output = PadicScalar;
            fn $method(self, rhs: &PadicScalar) -> PadicScalar {
                self.$inner(rhs)
            }
        }
        impl std::ops::$tr for PadicScalar {
            type Output = PadicScalar;
            fn $method(self, rhs: PadicScalar) -> PadicScalar {
                (&self).$inner(&rhs)
            }
        }
    };
}
binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);

impl std::ops::Neg for &PadicScalar {
    type Output = PadicScalar;
    fn neg(self) -> PadicScalar {
        PadicScalar::neg(self)
    }
}

/// The rational `numerator/denominator` in `Q_p`, with `prec` significant digits.
pub fn make_scalar(
    numerator: &BigInt,
    denominator: &BigInt,
    p: u64,
    prec: i64,
) -> Result<PadicScalar, PadicError> {
    if denominator.is_zero() {
        return Err(PadicError::ZeroDenominator);
    }
    if prec < 1 {
        return Err(PadicError::BadPrecision(prec));
    }
    if !pow::is_prime(p) {
        return Err(PadicError::NotPrime(p));
    }
    let num = PadicScalar::from_bigint(numerator, p, prec);
    let den = PadicScalar::from_bigint(denominator, p, prec);
    num.checked_div(&den)
}

/// [`make_scalar`] for a [`BigRational`].
pub fn rational_scalar(q: &BigRational, p: u64, prec: i64) -> Result<PadicScalar, PadicError> {
    make_scalar(q.numer(), q.denom(), p, prec)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// One arithmetic step with checked preconditions.
pub fn scalar_arith(op: ArithOp, x: &PadicScalar, y: &PadicScalar) -> Result<PadicScalar, PadicError> {
    if x.p != y.p {
        return Err(PadicError::PrimeMismatch(x.p, y.p));
    }
    Ok(match op {
        ArithOp::Add => x.add(y),
        ArithOp::Sub => x.sub(y),
        ArithOp::Mul => x.mul(y),
        ArithOp::Div => x.checked_div(y)?,
    })
}
