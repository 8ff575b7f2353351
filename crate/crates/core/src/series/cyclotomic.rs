use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{PadicSeries, RingTag};

/// `p^n − p^(n−1)`, the degree of `Φ_{p^n}(1+T)`.
pub fn cyclotomic_degree(p: u64, n: u32) -> usize {
    assert!(n >= 1, "cyclotomic index must be positive");
    let lower = (p as usize).pow(n - 1);
    lower * (p as usize - 1)
}

/// The first `len` coefficients of `Φ_{p^n}(1+T) = Σ_{j<p} (1+T)^(j·p^(n−1))`, stopping at the degree.
pub fn cyclotomic_coeffs(p: u64, n: u32, len: usize) -> Vec<BigInt> {
    assert!(n >= 1, "cyclotomic index must be positive");
    let len = len.min(cyclotomic_degree(p, n) + 1);
    let step = num_traits::pow(BigInt::from(p), (n - 1) as usize);
    let mut out = vec![BigInt::zero(); len];
    for j in 0..p {
        let m = &step * j;
        let mut binom = BigInt::one();
        for (k, slot) in out.iter_mut().enumerate() {
            if k > 0 {
                binom = binom * (&m - (k - 1)) / k;
            }
            if binom.is_zero() {
                break;
            }
            *slot += &binom;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct CyclotomicSeries {
    pub series: PadicSeries,
    pub degree: usize,
    /// Some coefficients of the polynomial lie at or beyond `T^trunc`.
    pub truncated: bool,
}

/// `Φ_{p^n}(1+T)` modulo `T^trunc`, with coefficients carried at `prec` digits.
pub fn cyclotomic(p: u64, n: u32, trunc: usize, prec: i64) -> CyclotomicSeries {
    let degree = cyclotomic_degree(p, n);
    let coeffs = cyclotomic_coeffs(p, n, trunc);
    CyclotomicSeries {
        series: PadicSeries::from_integers(p, RingTag::Zp, &coeffs, prec, trunc),
        degree,
        truncated: trunc < degree + 1,
    }
}

/// Quotient and remainder by the monic polynomial `div`.
pub(crate) fn divmod_monic<C: super::Coefficient>(poly: &[C], div: &[BigInt]) -> (Vec<C>, Vec<C>) {
    let d = div.len() - 1;
    debug_assert!(div[d].is_one());
    if poly.len() <= d {
        return (Vec::new(), poly.to_vec());
    }
    let mut rem = poly.to_vec();
    let mut quo = Vec::with_capacity(poly.len() - d);
    for i in (d..poly.len()).rev() {
        let c = rem[i].clone();
        if !c.exactly_zero() {
            for (j, dj) in div.iter().enumerate().take(d) {
                if !dj.is_zero() {
                    rem[i - d + j] = rem[i - d + j].minus(&c.times_int(dj));
                }
            }
        }
        quo.push(c);
    }
    quo.reverse();
    rem.truncate(d);
    (quo, rem)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::PadicScalar;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&n| BigInt::from(n)).collect()
    }

    /// Polynomial long division of `(1+T)^(p^n) − 1` by `(1+T)^(p^(n−1)) − 1`, over the integers.
    fn oracle(p: u64, n: u32) -> Vec<BigInt> {
        let binom_row = |m: usize| {
            let mut row = vec![BigInt::one()];
            for k in 1..=m {
                let next = &row[k - 1] * (m - k + 1) / k;
                row.push(next);
            }
            row[0] = BigInt::zero();
            row
        };
        let mut num = binom_row((p as usize).pow(n));
        let den = binom_row((p as usize).pow(n - 1));
        // Both vanish at T = 0; divide out T first.
        num.remove(0);
        let den: Vec<BigInt> = den[1..].to_vec();
        let dd = den.len() - 1;
        let mut quo = vec![BigInt::zero(); num.len() - dd];
        for i in (0..quo.len()).rev() {
            let c = &num[i + dd] / &den[dd];
            for (j, dj) in den.iter().enumerate() {
                num[i + j] -= &c * dj;
            }
            quo[i] = c;
        }
        assert!(num.iter().all(Zero::is_zero));
        quo
    }

    #[test]
    fn small_cases() {
        assert_eq!(cyclotomic_coeffs(2, 1, 10), big(&[2, 1]));
        assert_eq!(cyclotomic_coeffs(5, 1, 10), big(&[5, 10, 10, 5, 1]));
    }

    #[test]
    fn matches_long_division() {
        for (p, n) in [(2u64, 1u32), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (3, 3), (5, 1), (5, 2), (7, 2)] {
            assert_eq!(cyclotomic_coeffs(p, n, 1000), oracle(p, n), "p={p} n={n}");
        }
    }

    #[test]
    fn eisenstein_shape() {
        for (p, n) in [(2u64, 1u32), (2, 3), (3, 2), (5, 2), (7, 1), (11, 1)] {
            let c = cyclotomic_coeffs(p, n, 10_000);
            let d = cyclotomic_degree(p, n);
            assert_eq!(c.len(), d + 1);
            assert_eq!(c[0], BigInt::from(p));
            assert!(c[d].is_one());
            assert!(c[..d].iter().all(|x| (x % p).is_zero()), "p={p} n={n}");
        }
    }

    #[test]
    fn truncation_flag() {
        let c = cyclotomic(5, 2, 8, 20);
        assert!(c.truncated);
        assert_eq!(c.degree, 20);
        assert_eq!(c.series.trunc(), 8);
        assert_eq!(c.series.eval_at_zero(), PadicScalar::from_i64(5, 5, 20));
        assert!(!cyclotomic(5, 1, 5, 20).truncated);
    }

    #[test]
    fn large_index_leading_terms() {
        // Φ_{p^n}(1+T) = p + (p choose 2)·p^(n−1)·T + …; the linear coefficient is Σ_j j·p^(n−1).
        let c = cyclotomic_coeffs(3, 30, 3);
        let step = num_traits::pow(BigInt::from(3), 29);
        assert_eq!(c[0], BigInt::from(3));
        assert_eq!(c[1], &step * 3);
    }
}
