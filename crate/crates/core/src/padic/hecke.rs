use num_bigint::{BigInt, BigUint};
use num_rational::Rational64;
use num_traits::{Signed, Zero};

use super::pow::{is_prime, pow};
use super::{ExtContext, PadicError, PadicScalar, QuadExtScalar, Valuation, Valued};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReductionType {
    Ordinary,
    Supersingular,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HeckeRoots {
    /// `α` is the unit root, `β = p/α`.
    Ordinary { alpha: PadicScalar, beta: PadicScalar },
    /// `α` is the generator of `Q_p(α)`, `β = a_p − α`.
    Supersingular { alpha: QuadExtScalar, beta: QuadExtScalar },
}

/// The roots of `Y² − a_p·Y + p`, ordered so that `ord(α) ≤ ord(β)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeckeRootPair {
    pub a_p: i64,
    pub p: u64,
    pub prec: i64,
    pub roots: HeckeRoots,
}

impl HeckeRootPair {
    pub fn reduction_type(&self) -> ReductionType {
        match self.roots {
            HeckeRoots::Ordinary { .. } => ReductionType::Ordinary,
            HeckeRoots::Supersingular { .. } => ReductionType::Supersingular,
        }
    }

    pub fn context(&self) -> ExtContext {
        ExtContext::new(self.p, self.a_p)
    }

    pub fn alpha_valuation(&self) -> Valuation {
        match &self.roots {
            HeckeRoots::Ordinary { alpha, .. } => alpha.valuation(),
            HeckeRoots::Supersingular { alpha, .. } => alpha.valuation(),
        }
    }

    pub fn beta_valuation(&self) -> Valuation {
        match &self.roots {
            HeckeRoots::Ordinary { beta, .. } => beta.valuation(),
            HeckeRoots::Supersingular { beta, .. } => beta.valuation(),
        }
    }

    /// Both roots as elements of `Q_p(α)`; in the ordinary case they are embedded as rationals.
    pub fn ext_roots(&self) -> (QuadExtScalar, QuadExtScalar) {
        let ctx = self.context();
        match &self.roots {
            HeckeRoots::Supersingular { alpha, beta } => (alpha.clone(), beta.clone()),
            HeckeRoots::Ordinary { alpha, beta } => {
                (QuadExtScalar::from_padic(ctx, alpha.clone()), QuadExtScalar::from_padic(ctx, beta.clone()))
            }
        }
    }
}

pub(crate) fn check_hasse(a_p: i64, p: u64) -> Result<(), PadicError> {
    if !is_prime(p) {
        return Err(PadicError::NotPrime(p));
    }
    if (a_p as i128) * (a_p as i128) > 4 * p as i128 {
        return Err(PadicError::HasseBound { a_p, p });
    }
    Ok(())
}

/// Roots of the Hecke polynomial at `prec` significant digits.
pub fn hecke_roots(a_p: i64, p: u64, prec: i64) -> Result<HeckeRootPair, PadicError> {
    check_hasse(a_p, p)?;
    if prec < 1 {
        return Err(PadicError::BadPrecision(prec));
    }
    let ctx = ExtContext::new(p, a_p);
    let roots = if ctx.is_ramified() {
        let alpha = QuadExtScalar::alpha(ctx, prec);
        let beta = QuadExtScalar::from_i64(ctx, a_p, prec).sub(&alpha);
        HeckeRoots::Supersingular { alpha, beta }
    } else {
        let root = hensel_unit_root(a_p, p, prec);
        let alpha = PadicScalar::from_bigint(&BigInt::from(root), p, prec);
        let beta = PadicScalar::from_i64(p as i64, p, prec).checked_div(&alpha)?;
        HeckeRoots::Ordinary { alpha, beta }
    };
    Ok(HeckeRootPair { a_p, p, prec, roots })
}

/// Newton iteration for the root of `Y² − aY + p` congruent to `a` mod `p`, returned mod `p^prec`.
fn hensel_unit_root(a_p: i64, p: u64, prec: i64) -> BigUint {
    let a = BigInt::from(a_p);
    let pi = BigInt::from(p);
    let reduce = |n: BigInt, m: &BigInt| -> BigInt {
        let r = n % m;
        if r.is_negative() {
            r + m
        } else {
            r
        }
    };
    let mut k = 1i64;
    let mut root = reduce(a.clone(), &pi);
    while k < prec {
        k = (2 * k).min(prec);
        let m = BigInt::from(pow(p, k));
        let f = &root * &root - &a * &root + &pi;
        let df = reduce(BigInt::from(2) * &root - &a, &m);
        let inv = df.modinv(&m).expect("derivative is a unit at an ordinary prime");
        root = reduce(root - f * inv, &m);
    }
    let m = BigInt::from(pow(p, prec));
    let r = reduce(root, &m);
    debug_assert!(!r.is_zero());
    r.to_biguint().unwrap()
}

/// `ord(root) < 1`.
pub fn is_allowable<V: Valued>(root: &V) -> bool {
    root.valuation() < Valuation::Finite(Rational64::from_integer(1))
}
