//! Integer polynomial matrices modulo `(p^W, T^D)`, used for the partial products.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::FactorConvention;
use crate::padic::pow::{pow, split_p};
use crate::padic::PadicScalar;
use crate::series::{cyclotomic_coeffs, PadicSeries, RingTag};

pub(crate) type Poly = Vec<BigInt>;
pub(crate) type PolyMat = [[Poly; 2]; 2];
pub(crate) type IntMat = [[BigInt; 2]; 2];

#[derive(Debug, Clone)]
pub(crate) struct Ring {
    pub p: u64,
    pub digits: i64,
    pub modulus: BigInt,
    pub trunc: usize,
}

impl Ring {
    pub fn new(p: u64, digits: i64, trunc: usize) -> Self {
        Ring { p, digits, modulus: BigInt::from(pow(p, digits)), trunc }
    }

    pub fn reduce(&self, x: BigInt) -> BigInt {
        let r = x % &self.modulus;
        if r.is_negative() {
            r + &self.modulus
        } else {
            r
        }
    }

    pub fn constant(&self, c: &BigInt) -> Poly {
        let mut out = vec![BigInt::zero(); self.trunc];
        if self.trunc > 0 {
            out[0] = self.reduce(c.clone());
        }
        out
    }

    pub fn add(&self, a: &Poly, b: &Poly) -> Poly {
        a.iter().zip(b).map(|(x, y)| self.reduce(x + y)).collect()
    }

    pub fn sub(&self, a: &Poly, b: &Poly) -> Poly {
        a.iter().zip(b).map(|(x, y)| self.reduce(x - y)).collect()
    }

    pub fn scale(&self, a: &Poly, c: &BigInt) -> Poly {
        if c.is_zero() {
            return vec![BigInt::zero(); a.len()];
        }
        a.iter().map(|x| self.reduce(x * c)).collect()
    }

    pub fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        let d = self.trunc;
        let mut out = vec![BigInt::zero(); d];
        for (i, x) in a.iter().enumerate().take(d) {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate().take(d - i) {
                if !y.is_zero() {
                    out[i + j] += x * y;
                }
            }
        }
        out.into_iter().map(|c| self.reduce(c)).collect()
    }

    pub fn cyclotomic(&self, n: u32) -> Poly {
        let mut c: Poly = cyclotomic_coeffs(self.p, n, self.trunc).into_iter().map(|x| self.reduce(x)).collect();
        c.resize(self.trunc, BigInt::zero());
        c
    }

    /// `Y·C` for `C = [[a, 1], [s·Φ, 0]]`, two polynomial products.
    pub fn times_factor(&self, y: &PolyMat, a_p: i64, s: i64, phi: &Poly) -> PolyMat {
        let a = BigInt::from(a_p);
        let sphi = self.scale(phi, &BigInt::from(s));
        let row = |r: &[Poly; 2]| -> [Poly; 2] { [self.add(&self.scale(&r[0], &a), &self.mul(&r[1], &sphi)), r[0].clone()] };
        [row(&y[0]), row(&y[1])]
    }

    /// `Y·K` for a constant integer matrix `K`.
    pub fn times_const(&self, y: &PolyMat, k: &IntMat) -> PolyMat {
        let entry = |r: &[Poly; 2], j: usize| self.add(&self.scale(&r[0], &k[0][j]), &self.scale(&r[1], &k[1][j]));
        [[entry(&y[0], 0), entry(&y[0], 1)], [entry(&y[1], 0), entry(&y[1], 1)]]
    }

    /// `K·Y` for a constant integer matrix `K`.
    pub fn const_times(&self, k: &IntMat, y: &PolyMat) -> PolyMat {
        let entry = |i: usize, j: usize| self.add(&self.scale(&y[0][j], &k[i][0]), &self.scale(&y[1][j], &k[i][1]));
        [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]]
    }

    pub fn identity(&self) -> PolyMat {
        let one = self.constant(&BigInt::from(1));
        let zero = vec![BigInt::zero(); self.trunc];
        [[one.clone(), zero.clone()], [zero, one]]
    }

    /// Smallest `p`-adic valuation of a coefficient, capped at `digits`.
    pub fn min_valuation(&self, polys: &[&Poly]) -> i64 {
        polys
            .iter()
            .flat_map(|q| q.iter())
            .filter(|c| !c.is_zero())
            .map(|c| split_p(c.magnitude().clone(), self.p).0)
            .min()
            .unwrap_or(self.digits)
            .min(self.digits)
    }

    /// The series `p^shift · q`, each coefficient known modulo `p^(digits + shift)`.
    pub fn to_series(&self, q: &Poly, shift: i64) -> PadicSeries {
        let coeffs = q.iter().map(|c| PadicScalar::from_bigint_abs(c, self.p, self.digits).shift(shift)).collect();
        PadicSeries::new(self.p, RingTag::Qp, coeffs, self.digits + shift).expect("coefficients share the prime")
    }
}

pub(crate) fn int_mat_mul(x: &IntMat, y: &IntMat) -> IntMat {
    let e = |i: usize, j: usize| &x[i][0] * &y[0][j] + &x[i][1] * &y[1][j];
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

pub(crate) fn int_mat_pow(x: &IntMat, e: usize) -> IntMat {
    let mut acc: IntMat = [[BigInt::from(1), BigInt::zero()], [BigInt::zero(), BigInt::from(1)]];
    for _ in 0..e {
        acc = int_mat_mul(&acc, x);
    }
    acc
}

/// `A = [[a_p, 1], [s·p, 0]]` for the convention's sign `s`.
pub(crate) fn a_matrix(a_p: i64, p: u64, conv: FactorConvention) -> IntMat {
    let s = conv.sign();
    [[BigInt::from(a_p), BigInt::from(1)], [BigInt::from(s * p as i64), BigInt::zero()]]
}

/// `adj(A) = [[0, −1], [−s·p, a_p]]`, so that `A·adj(A) = det(A)·I`.
pub(crate) fn a_adjugate(a_p: i64, p: u64, conv: FactorConvention) -> IntMat {
    let s = conv.sign();
    [[BigInt::zero(), BigInt::from(-1)], [BigInt::from(-s * p as i64), BigInt::from(a_p)]]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjugate_inverts_a() {
        for conv in [FactorConvention::Literal, FactorConvention::Negated] {
            for (a, p) in [(0i64, 5u64), (3, 3), (-2, 2), (1, 7)] {
                let prod = int_mat_mul(&a_matrix(a, p, conv), &a_adjugate(a, p, conv));
                let det = BigInt::from(-conv.sign() * p as i64);
                assert_eq!(prod, [[det.clone(), BigInt::zero()], [BigInt::zero(), det]]);
            }
        }
    }

    #[test]
    fn factor_product_matches_direct_multiplication() {
        let ring = Ring::new(3, 30, 12);
        let phi = ring.cyclotomic(2);
        let y = ring.times_factor(&ring.identity(), 3, -1, &ring.cyclotomic(1));
        let z = ring.times_factor(&y, 3, -1, &phi);
        let c: PolyMat = [
            [ring.constant(&BigInt::from(3)), ring.constant(&BigInt::from(1))],
            [ring.scale(&phi, &BigInt::from(-1)), vec![BigInt::zero(); 12]],
        ];
        let e = |i: usize, j: usize| ring.add(&ring.mul(&y[i][0], &c[0][j]), &ring.mul(&y[i][1], &c[1][j]));
        assert_eq!(z, [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]);
    }
}
