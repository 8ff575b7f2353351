//! Data at `T = 0`: the matrix `Z`, the value vector of the integral pair, and the sign
//! relating them.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::poly::{a_adjugate, int_mat_mul, int_mat_pow, IntMat};
use super::{big_n, FactorConvention, LogError, Mat2};
use crate::padic::{hecke_roots, make_scalar, HeckeRootPair, PadicScalar, QuadExtScalar, ReductionType};
use crate::series::cyclotomic_coeffs;

/// Exponent `k` with `Z = A^(−k)·M`: 2 for odd `p`, 3 for `p = 2`.
pub fn z_exponent(p: u64) -> usize {
    if p == 2 {
        3
    } else {
        2
    }
}

fn rational_matrix(m: &IntMat, den: &BigInt) -> Mat2<BigRational> {
    let e = |i: usize, j: usize| BigRational::new(m[i][j].clone(), den.clone());
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

fn det_a(p: u64, conv: FactorConvention) -> BigInt {
    BigInt::from(-conv.sign() * p as i64)
}

/// `A^(−k)` in exact rational arithmetic.
pub fn a_inverse_power(a_p: i64, p: u64, k: usize, conv: FactorConvention) -> Mat2<BigRational> {
    let adj = int_mat_pow(&a_adjugate(a_p, p, conv), k);
    rational_matrix(&adj, &num_traits::pow(det_a(p, conv), k))
}

/// The rational part `∏_{i≤n} C_i(0) · A^(−(N+1))` of the `n`-th partial product at `T = 0`,
/// evaluated factor by factor from the cyclotomic constant terms.
pub fn partial_product_at_zero(a_p: i64, p: u64, n: usize, conv: FactorConvention) -> Mat2<BigRational> {
    let s = BigInt::from(conv.sign());
    let mut y: IntMat = [[BigInt::one(), BigInt::zero()], [BigInt::zero(), BigInt::one()]];
    for i in 1..=n {
        let phi0 = cyclotomic_coeffs(p, i as u32, 1).remove(0);
        let c: IntMat = [[BigInt::from(a_p), BigInt::one()], [&s * phi0, BigInt::zero()]];
        y = int_mat_mul(&y, &c);
    }
    let k = big_n(p, n) + 1;
    let x = int_mat_mul(&y, &int_mat_pow(&a_adjugate(a_p, p, conv), k));
    rational_matrix(&x, &num_traits::pow(det_a(p, conv), k))
}

/// The closed form `A^(−2)` (odd `p`) or `A^(−3)` (`p = 2`) of [`partial_product_at_zero`].
pub fn z_rational_part(a_p: i64, p: u64, conv: FactorConvention) -> Mat2<BigRational> {
    a_inverse_power(a_p, p, z_exponent(p), conv)
}

pub(crate) fn supersingular_roots(a_p: i64, p: u64, prec: i64) -> Result<HeckeRootPair, LogError> {
    let roots = hecke_roots(a_p, p, prec)?;
    if roots.reduction_type() != ReductionType::Supersingular {
        return Err(LogError::Ordinary { a_p, p });
    }
    Ok(roots)
}

/// `M = [[−1, −1], [β, α]]`.
pub fn m_matrix(roots: &HeckeRootPair) -> Mat2<QuadExtScalar> {
    let (alpha, beta) = roots.ext_roots();
    let minus_one = QuadExtScalar::from_i64(roots.context(), -1, roots.prec);
    [[minus_one.clone(), minus_one], [beta, alpha]]
}

/// `Z = A^(−k)·M` at `prec` digits.
pub fn z_at_zero(a_p: i64, p: u64, prec: i64, conv: FactorConvention) -> Result<Mat2<QuadExtScalar>, LogError> {
    let roots = supersingular_roots(a_p, p, prec)?;
    let ctx = roots.context();
    let r = z_rational_part(a_p, p, conv);
    let lift = |q: &BigRational| -> Result<QuadExtScalar, LogError> {
        Ok(QuadExtScalar::from_padic(ctx, make_scalar(q.numer(), q.denom(), p, prec)?))
    };
    let r: Mat2<QuadExtScalar> = [[lift(&r[0][0])?, lift(&r[0][1])?], [lift(&r[1][0])?, lift(&r[1][1])?]];
    Ok(mat_mul_ext(&r, &m_matrix(&roots)))
}

pub(crate) fn mat_mul_ext(x: &Mat2<QuadExtScalar>, y: &Mat2<QuadExtScalar>) -> Mat2<QuadExtScalar> {
    let e = |i: usize, j: usize| x[i][0].mul(&y[0][j]).add(&x[i][1].mul(&y[1][j]));
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

/// Integer coefficients `(u, w)` with `(L_♯(0), L_♭(0)) = (u, w)·ℓ`.
pub fn values_at_zero_coefficients(a_p: i64, p: u64) -> (BigInt, BigInt) {
    let a = BigInt::from(a_p);
    let p = BigInt::from(p);
    let two = BigInt::from(2);
    let quad = -(&a * &a) + &two * &a + &p - 1;
    if p == two {
        let cubic = -(&a * &a * &a) + &two * &a * &a + &two * &p * &a - &a - &two * &p;
        (cubic, quad)
    } else {
        (quad, two - a)
    }
}

/// `(L_♯(0), L_♭(0))` for `ℓ = L(E,1)/Ω_E`.
pub fn values_at_zero(a_p: i64, p: u64, ell: &PadicScalar) -> [PadicScalar; 2] {
    let (u, w) = values_at_zero_coefficients(a_p, p);
    [ell.mul_int(&u), ell.mul_int(&w)]
}

/// Sign relating `values_at_zero·Z` to the interpolation targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConventionSign {
    Plus,
    Minus,
    /// No single sign works across the tested pairs.
    Mixed,
}

impl ConventionSign {
    pub fn as_i64(self) -> Option<i64> {
        match self {
            ConventionSign::Plus => Some(1),
            ConventionSign::Minus => Some(-1),
            ConventionSign::Mixed => None,
        }
    }
}

/// `((1 − 1/α)², (1 − 1/β)²)`.
pub fn interpolation_targets(roots: &HeckeRootPair) -> Result<[QuadExtScalar; 2], LogError> {
    let (alpha, beta) = roots.ext_roots();
    let one = QuadExtScalar::from_i64(roots.context(), 1, roots.prec);
    let factor = |r: &QuadExtScalar| -> Result<QuadExtScalar, LogError> {
        let t = one.sub(&one.checked_div(r)?);
        Ok(t.mul(&t))
    };
    Ok([factor(&alpha)?, factor(&beta)?])
}

/// `Some(±1)` when `values_at_zero(a_p, p, 1)·Z = ±targets` at `prec`, `None` when neither holds.
pub fn interpolation_sign(a_p: i64, p: u64, prec: i64, conv: FactorConvention) -> Result<Option<i64>, LogError> {
    let roots = supersingular_roots(a_p, p, prec)?;
    let ctx = roots.context();
    let z = z_at_zero(a_p, p, prec, conv)?;
    let v = values_at_zero(a_p, p, &PadicScalar::one(p, prec));
    let v: Vec<QuadExtScalar> = v.into_iter().map(|x| QuadExtScalar::from_padic(ctx, x)).collect();
    let lhs = [v[0].mul(&z[0][0]).add(&v[1].mul(&z[1][0])), v[0].mul(&z[0][1]).add(&v[1].mul(&z[1][1]))];
    let target = interpolation_targets(&roots)?;
    let matches = |sign: i64| (0..2).all(|j| lhs[j].agrees_with(&target[j].mul_i64(sign)));
    Ok(if matches(1) {
        Some(1)
    } else if matches(-1) {
        Some(-1)
    } else {
        None
    })
}

/// One sign for all `pairs`, or `Mixed`.
pub fn convention_sign(pairs: &[(i64, u64)], prec: i64, conv: FactorConvention) -> Result<ConventionSign, LogError> {
    let mut signs = Vec::with_capacity(pairs.len());
    for &(a, p) in pairs {
        signs.push(interpolation_sign(a, p, prec, conv)?);
    }
    Ok(match signs.first().copied().flatten() {
        Some(s) if signs.iter().all(|x| *x == Some(s)) => {
            if s == 1 {
                ConventionSign::Plus
            } else {
                ConventionSign::Minus
            }
        }
        _ => ConventionSign::Mixed,
    })
}

/// The eight supersingular pairs used throughout the checks.
pub const REFERENCE_PAIRS: [(i64, u64); 8] = [(0, 3), (3, 3), (-3, 3), (0, 5), (0, 7), (0, 2), (2, 2), (-2, 2)];
