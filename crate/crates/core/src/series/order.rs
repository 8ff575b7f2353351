use std::fmt;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use super::cyclotomic::{cyclotomic_coeffs, cyclotomic_degree, divmod_monic};
use super::{Coefficient, IwasawaSeries, PadicSeries, RingTag, SeriesError};
use crate::padic::Valuation;

/// Order of vanishing as far as finite precision can certify it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "order")]
pub enum OrderResult {
    /// Datum `k` certified nonzero, all lower data certified zero.
    Exact(usize),
    /// First `k` data certified zero; nothing further is known.
    AtLeast(usize),
    /// Datum `k` is indistinguishable from zero at working precision, lower data certified zero.
    Undetermined(usize),
}

impl OrderResult {
    pub fn order(self) -> usize {
        match self {
            OrderResult::Exact(k) | OrderResult::AtLeast(k) | OrderResult::Undetermined(k) => k,
        }
    }

    pub fn exact(self) -> Option<usize> {
        match self {
            OrderResult::Exact(k) => Some(k),
            _ => None,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, OrderResult::Exact(_))
    }

    /// Certified lower bound on the true order.
    pub fn lower_bound(self) -> usize {
        self.order()
    }

    /// Largest order compatible with the data; `None` when unbounded.
    pub fn upper_bound(self) -> Option<usize> {
        self.exact()
    }

    /// Order of the minimum of two quantities, with `Undetermined` kept only when it could move the minimum.
    pub fn min(self, other: OrderResult) -> OrderResult {
        use OrderResult::*;
        match (self, other) {
            (Exact(a), Exact(b)) => Exact(a.min(b)),
            (Exact(a), AtLeast(b)) | (AtLeast(b), Exact(a)) => {
                if a <= b {
                    Exact(a)
                } else {
                    AtLeast(b)
                }
            }
            (Exact(a), Undetermined(b)) | (Undetermined(b), Exact(a)) => {
                if a <= b {
                    Exact(a)
                } else {
                    Undetermined(b)
                }
            }
            (AtLeast(a), AtLeast(b)) => AtLeast(a.min(b)),
            (AtLeast(a), Undetermined(b)) | (Undetermined(b), AtLeast(a)) => {
                if a < b {
                    AtLeast(a)
                } else {
                    Undetermined(b)
                }
            }
            (Undetermined(a), Undetermined(b)) => Undetermined(a.min(b)),
        }
    }
}

impl fmt::Display for OrderResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderResult::Exact(k) => write!(f, "exactly {k}"),
            OrderResult::AtLeast(k) => write!(f, "at least {k}"),
            OrderResult::Undetermined(k) => write!(f, "undetermined at {k}"),
        }
    }
}

/// An [`OrderResult`] with the reason precision ran out, when it did.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderReport {
    pub result: OrderResult,
    pub diagnostic: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
enum Datum {
    Zero,
    Nonzero,
    Unresolved(String),
}

/// Certified zero means known to vanish at least to `p^tau`; certified nonzero means valuation below `tau`.
fn classify<C: Coefficient>(c: &C, tau: i64) -> Datum {
    if c.exactly_zero() {
        return Datum::Zero;
    }
    let t = Rational64::from_integer(tau);
    if c.zero_to_precision() {
        match c.abs_precision() {
            Some(a) if a >= t => Datum::Zero,
            Some(a) => Datum::Unresolved(format!("zero modulo p^{a} only, below the threshold p^{tau}")),
            None => Datum::Zero,
        }
    } else {
        match c.valuation() {
            Valuation::Finite(v) if v < t => Datum::Nonzero,
            v => Datum::Unresolved(format!("valuation {v} is not below the threshold p^{tau}")),
        }
    }
}

impl<C: Coefficient> IwasawaSeries<C> {
    pub fn order_at_zero(&self) -> OrderResult {
        self.order_at_zero_report().result
    }

    pub fn order_at_zero_report(&self) -> OrderReport {
        for (k, c) in self.coeffs.iter().enumerate() {
            match classify(c, self.prec_p) {
                Datum::Zero => continue,
                Datum::Nonzero => return OrderReport { result: OrderResult::Exact(k), diagnostic: None },
                Datum::Unresolved(why) => {
                    return OrderReport { result: OrderResult::Undetermined(k), diagnostic: Some(format!("coefficient {k}: {why}")) }
                }
            }
        }
        OrderReport { result: OrderResult::AtLeast(self.trunc()), diagnostic: None }
    }

    pub fn order_at_cyclotomic(&self, n: u32) -> Result<OrderResult, SeriesError> {
        Ok(self.order_at_cyclotomic_report(n)?.result)
    }

    /// Length of the chain of certified-zero remainders modulo `Φ_{p^n}(1+T)`.
    ///
    /// The unknown tail `T^D·h` contributes to the `k`-th remainder only at `p`-adic valuation
    /// at least `B + ⌊D/d⌋ − k`, where `B` bounds the valuation of `h`; the threshold at step `k`
    /// is capped accordingly.
    pub fn order_at_cyclotomic_report(&self, n: u32) -> Result<OrderReport, SeriesError> {
        let p = self.p();
        let degree = cyclotomic_degree(p, n);
        let trunc = self.trunc();
        if trunc <= degree {
            return Err(SeriesError::TruncationTooShort { degree, trunc });
        }
        let phi = cyclotomic_coeffs(p, n, degree + 1);
        let tail_bound = match self.ring {
            RingTag::Zp => 0,
            _ => self.min_valuation().unwrap_or(0).min(0) - 1,
        };
        let reach = tail_bound + (trunc / degree) as i64;
        let mut poly = self.coeffs.clone();
        let mut k = 0usize;
        loop {
            let tau = self.prec_p.min(reach - k as i64);
            if tau <= tail_bound {
                let result = if poly.iter().all(C::exactly_zero) { OrderResult::AtLeast(k) } else { OrderResult::Undetermined(k) };
                let diagnostic = format!("truncation T^{trunc} leaves no certified p-adic digits after {k} divisions");
                return Ok(OrderReport { result, diagnostic: Some(diagnostic) });
            }
            let (quo, rem) = divmod_monic(&poly, &phi);
            let mut unresolved = None;
            for (i, r) in rem.iter().enumerate() {
                // Digits from p^(reach − k) up are contaminated by the unknown tail.
                let r = r.cap_abs(reach - k as i64);
                match classify(&r, tau) {
                    Datum::Zero => {}
                    Datum::Nonzero => return Ok(OrderReport { result: OrderResult::Exact(k), diagnostic: None }),
                    Datum::Unresolved(why) => {
                        unresolved.get_or_insert(format!("remainder {k}, coefficient {i}: {why}"));
                    }
                }
            }
            if let Some(why) = unresolved {
                return Ok(OrderReport { result: OrderResult::Undetermined(k), diagnostic: Some(why) });
            }
            if quo.is_empty() {
                return Ok(OrderReport { result: OrderResult::AtLeast(k + 1), diagnostic: None });
            }
            poly = quo;
            k += 1;
        }
    }
}

/// Iwasawa `μ` and `λ` of the polynomial truncation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Invariants {
    Determined { mu: i64, lambda: usize },
    /// `mu_bound ≥ μ` attained first at `lambda_candidate` among certified data.
    Undetermined { mu_bound: i64, lambda_candidate: usize, reason: String },
}

pub fn iwasawa_invariants(f: &PadicSeries) -> Result<Invariants, SeriesError> {
    if f.ring != RingTag::Zp {
        return Err(SeriesError::RingTag(f.ring));
    }
    let vals: Vec<Option<i64>> = f.coeffs.iter().map(|c| c.val()).collect();
    let mu = vals.iter().flatten().copied().min().ok_or(SeriesError::ZeroSeries)?;
    let lambda = vals.iter().position(|v| *v == Some(mu)).expect("minimum is attained");
    let blocking = f.coeffs.iter().enumerate().find_map(|(i, c)| {
        if !c.is_zero() || c.is_exact_zero() {
            return None;
        }
        let abs = c.abs_prec().expect("inexact zero has a precision");
        let ambiguous = if i < lambda { abs <= mu } else { abs < mu };
        ambiguous.then(|| format!("coefficient {i} is zero only modulo p^{abs}"))
    });
    Ok(match blocking {
        None => Invariants::Determined { mu, lambda },
        Some(reason) => Invariants::Undetermined { mu_bound: mu, lambda_candidate: lambda, reason },
    })
}
