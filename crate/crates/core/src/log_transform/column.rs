use num_bigint::BigInt;

use super::poly::{a_adjugate, int_mat_pow, Ring};
use super::{big_n, LogError, LogParams};
use crate::padic::{hecke_roots, HeckeRoots, PadicScalar};
use crate::series::PadicSeries;

/// The first column of the partial products at an ordinary prime.
///
/// Only the value at `T = 0` is independent of the choices made in the construction.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaColumn {
    pub entries: [PadicSeries; 2],
    pub n_used: usize,
    pub stabilized: bool,
    /// `(−1, β)` is an `α`-eigenvector of `A`, so `A^(−(N+1))` acts as `α^(−(N+1))`.
    pub eigenvector: bool,
}

impl AlphaColumn {
    pub fn value_at_zero(&self) -> [PadicScalar; 2] {
        [self.entries[0].eval_at_zero(), self.entries[1].eval_at_zero()]
    }
}

fn agrees(a: &PadicSeries, b: &PadicSeries, prec: i64) -> bool {
    a.coeffs().iter().zip(b.coeffs()).all(|(x, y)| {
        let d = x.sub(y);
        if d.is_zero() {
            d.abs_prec().map_or(true, |abs| abs >= prec)
        } else {
            d.val().is_some_and(|v| v >= prec)
        }
    })
}

/// `(−f0 + β·f1)` for a row `(f0, f1)`.
fn against_column(f0: &PadicSeries, f1: &PadicSeries, beta: &PadicScalar) -> PadicSeries {
    &f1.mul_padic(beta) - f0
}

/// First column of `∏C_i·A^(−(N+1))·M` for ordinary `p`, stabilized modulo `p^prec_p`.
pub fn log_alpha_column(params: &LogParams) -> Result<AlphaColumn, LogError> {
    params.validate()?;
    let LogParams { a_p, p, prec_p, trunc, n_max, convention } = *params;
    let slack = 2 * (n_max as i64 + 2) + 16;
    let roots = hecke_roots(a_p, p, prec_p + slack)?;
    let HeckeRoots::Ordinary { alpha, beta } = &roots.roots else {
        return Err(LogError::Supersingular { a_p, p });
    };
    let s = convention.sign();
    // A·(−1, β) = (β − a_p, −s·p) against α·(−1, β) = (−α, p).
    let av = [beta.sub(&PadicScalar::from_i64(a_p, p, prec_p + slack)), PadicScalar::from_i64(-s * p as i64, p, prec_p + slack)];
    let eigenvector = av[0].agrees_with(&alpha.neg()) && av[1].agrees_with(&alpha.mul(beta));

    let digits = if eigenvector { prec_p + 8 } else { prec_p + slack };
    let ring = Ring::new(p, digits, trunc);
    let adj = a_adjugate(a_p, p, convention);
    let det_sign = -s;
    let mut y = ring.identity();
    let mut prev: Option<[PadicSeries; 2]> = None;
    let mut n = 0;
    while n < n_max {
        n += 1;
        y = ring.times_factor(&y, a_p, s, &ring.cyclotomic(n as u32));
        let e = big_n(p, n);
        let col = if eigenvector {
            let scale = alpha.pow(e as u32 + 1).inv()?;
            let rows = [0, 1].map(|i| against_column(&ring.to_series(&y[i][0], 0), &ring.to_series(&y[i][1], 0), beta));
            rows.map(|r| r.mul_padic(&scale))
        } else {
            let x = ring.times_const(&y, &int_mat_pow(&adj, e + 1));
            let sign = BigInt::from(if (e + 1) % 2 == 0 { 1 } else { det_sign });
            let q = |i: usize, j: usize| ring.to_series(&ring.scale(&x[i][j], &sign), -(e as i64 + 1));
            [against_column(&q(0, 0), &q(0, 1), beta), against_column(&q(1, 0), &q(1, 1), beta)]
        };
        if let Some(pc) = &prev {
            if agrees(&col[0], &pc[0], prec_p) && agrees(&col[1], &pc[1], prec_p) {
                let entries = col.map(|c| c.cap_precision(prec_p).with_prec_p(prec_p));
                return Ok(AlphaColumn { entries, n_used: n, stabilized: true, eigenvector });
            }
        }
        prev = Some(col);
    }
    let entries = prev.expect("n_max ≥ 2").map(|c| c.cap_precision(prec_p).with_prec_p(prec_p));
    Err(LogError::ColumnNotStabilized(Box::new(AlphaColumn { entries, n_used: n, stabilized: false, eigenvector })))
}
