//! Truncated power series in `T` over `Z_p`, `Q_p` or `Q_p(α)`.
//!
//! A series with `trunc` coefficients represents the class modulo `T^trunc`.

mod cyclotomic;
mod order;

use std::fmt;

use num_bigint::BigInt;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::padic::{ExtContext, PadicError, PadicScalar, QuadExtScalar, Valuation, Valued};

pub use cyclotomic::{cyclotomic, cyclotomic_coeffs, cyclotomic_degree, CyclotomicSeries};
pub use order::{iwasawa_invariants, Invariants, OrderResult};

/// Default absolute `p`-adic working precision.
pub const DEFAULT_PREC: i64 = 20;
/// Default `T`-adic truncation.
pub const DEFAULT_TRUNC: usize = 60;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("operands are over different coefficient rings")]
    Mismatch,
    #[error("coefficient {index} has negative valuation in a Z_p series")]
    NotIntegral { index: usize },
    #[error("ring tag {0:?} does not match the coefficient type")]
    RingTag(RingTag),
    #[error("division is not exact: {0}")]
    Inexact(String),
    #[error("truncation {trunc} too short for a divisor of degree {degree}")]
    TruncationTooShort { degree: usize, trunc: usize },
    #[error("series is zero to working precision")]
    ZeroSeries,
    #[error(transparent)]
    Padic(#[from] PadicError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RingTag {
    Zp,
    Qp,
    QpAlpha,
}

impl RingTag {
    fn merge(self, other: RingTag) -> RingTag {
        if self == RingTag::Zp && other == RingTag::Zp {
            RingTag::Zp
        } else if self == RingTag::QpAlpha || other == RingTag::QpAlpha {
            RingTag::QpAlpha
        } else {
            RingTag::Qp
        }
    }
}

/// Coefficient field of an [`IwasawaSeries`].
pub trait Coefficient: Clone + fmt::Debug + fmt::Display + PartialEq + Valued {
    type Ctx: Copy + PartialEq + fmt::Debug;
    const EXTENSION: bool;

    fn ctx(&self) -> Self::Ctx;
    fn prime(ctx: Self::Ctx) -> u64;
    fn exact_zero(ctx: Self::Ctx) -> Self;
    fn from_integer(ctx: Self::Ctx, n: &BigInt, prec: i64) -> Self;
    fn from_padic(ctx: Self::Ctx, x: PadicScalar) -> Self;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn negate(&self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn times_int(&self, n: &BigInt) -> Self;
    fn times_padic(&self, s: &PadicScalar) -> Self;
    fn divided_by(&self, o: &Self) -> Result<Self, PadicError>;
    fn zero_to_precision(&self) -> bool;
    fn exactly_zero(&self) -> bool;
    /// Absolute precision as a power of `p`; `None` when exact.
    fn abs_precision(&self) -> Option<Rational64>;
    fn cap_abs(&self, cap: i64) -> Self;
    fn raise_abs(&self, abs: i64) -> Self;
}

impl Coefficient for PadicScalar {
    type Ctx = u64;
    const EXTENSION: bool = false;

    fn ctx(&self) -> u64 {
        self.p()
    }
    fn prime(ctx: u64) -> u64 {
        ctx
    }
    fn exact_zero(ctx: u64) -> Self {
        PadicScalar::zero(ctx)
    }
    fn from_integer(ctx: u64, n: &BigInt, prec: i64) -> Self {
        PadicScalar::from_bigint(n, ctx, prec)
    }
    fn from_padic(_: u64, x: PadicScalar) -> Self {
        x
    }
    fn plus(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn minus(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn negate(&self) -> Self {
        self.neg()
    }
    fn times(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn times_int(&self, n: &BigInt) -> Self {
        self.mul_int(n)
    }
    fn times_padic(&self, s: &PadicScalar) -> Self {
        self.mul(s)
    }
    fn divided_by(&self, o: &Self) -> Result<Self, PadicError> {
        self.checked_div(o)
    }
    fn zero_to_precision(&self) -> bool {
        self.is_zero()
    }
    fn exactly_zero(&self) -> bool {
        self.is_exact_zero()
    }
    fn abs_precision(&self) -> Option<Rational64> {
        self.abs_prec().map(Rational64::from_integer)
    }
    fn cap_abs(&self, cap: i64) -> Self {
        self.reduce_abs(cap)
    }
    fn raise_abs(&self, abs: i64) -> Self {
        self.lift_abs(abs)
    }
}

impl Coefficient for QuadExtScalar {
    type Ctx = ExtContext;
    const EXTENSION: bool = true;

    fn ctx(&self) -> ExtContext {
        QuadExtScalar::ctx(self)
    }
    fn prime(ctx: ExtContext) -> u64 {
        ctx.p
    }
    fn exact_zero(ctx: ExtContext) -> Self {
        QuadExtScalar::zero(ctx)
    }
    fn from_integer(ctx: ExtContext, n: &BigInt, prec: i64) -> Self {
        QuadExtScalar::from_padic(ctx, PadicScalar::from_bigint(n, ctx.p, prec))
    }
    fn from_padic(ctx: ExtContext, x: PadicScalar) -> Self {
        QuadExtScalar::from_padic(ctx, x)
    }
    fn plus(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn minus(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn negate(&self) -> Self {
        self.neg()
    }
    fn times(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn times_int(&self, n: &BigInt) -> Self {
        self.mul_int(n)
    }
    fn times_padic(&self, s: &PadicScalar) -> Self {
        self.mul_padic(s)
    }
    fn divided_by(&self, o: &Self) -> Result<Self, PadicError> {
        self.checked_div(o)
    }
    fn zero_to_precision(&self) -> bool {
        self.is_zero()
    }
    fn exactly_zero(&self) -> bool {
        self.is_exact_zero()
    }
    fn abs_precision(&self) -> Option<Rational64> {
        self.abs_prec()
    }
    fn cap_abs(&self, cap: i64) -> Self {
        self.reduce_abs(cap)
    }
    fn raise_abs(&self, abs: i64) -> Self {
        self.lift_abs(abs)
    }
}

/// A power series known modulo `T^trunc`, with nominal absolute precision `prec_p`.
///
/// `prec_p` is the threshold at which coefficients count as certified zero.
#[derive(Debug, Clone, PartialEq)]
pub struct IwasawaSeries<C: Coefficient> {
    ctx: C::Ctx,
    ring: RingTag,
    coeffs: Vec<C>,
    prec_p: i64,
}

pub type PadicSeries = IwasawaSeries<PadicScalar>;
pub type ExtSeries = IwasawaSeries<QuadExtScalar>;

fn floor_rational(r: Rational64) -> i64 {
    r.floor().to_integer()
}

impl<C: Coefficient> IwasawaSeries<C> {
    /// Validates the ring tag and, for `Zp`, integrality.
    pub fn new(ctx: C::Ctx, ring: RingTag, coeffs: Vec<C>, prec_p: i64) -> Result<Self, SeriesError> {
        if (ring == RingTag::QpAlpha) != C::EXTENSION {
            return Err(SeriesError::RingTag(ring));
        }
        if coeffs.iter().any(|c| c.ctx() != ctx) {
            return Err(SeriesError::Mismatch);
        }
        if ring == RingTag::Zp {
            let zero = Valuation::int(0);
            if let Some(index) = coeffs.iter().position(|c| c.valuation() < zero) {
                return Err(SeriesError::NotIntegral { index });
            }
        }
        Ok(IwasawaSeries { ctx, ring, coeffs, prec_p })
    }

    /// Like [`new`](Self::new), with `prec_p` set to the smallest coefficient precision.
    pub fn from_coeffs(ctx: C::Ctx, ring: RingTag, coeffs: Vec<C>) -> Result<Self, SeriesError> {
        let prec = min_precision(&coeffs).unwrap_or(DEFAULT_PREC);
        Self::new(ctx, ring, coeffs, prec)
    }

    fn build(ctx: C::Ctx, ring: RingTag, coeffs: Vec<C>, prec_p: i64) -> Self {
        IwasawaSeries { ctx, ring, coeffs, prec_p }
    }

    pub fn zero(ctx: C::Ctx, ring: RingTag, trunc: usize, prec_p: i64) -> Self {
        Self::build(ctx, ring, vec![C::exact_zero(ctx); trunc], prec_p)
    }

    /// Integer polynomial, padded with exact zeros or truncated to `trunc`.
    pub fn from_integers(ctx: C::Ctx, ring: RingTag, ints: &[BigInt], prec: i64, trunc: usize) -> Self {
        let coeffs = (0..trunc)
            .map(|k| match ints.get(k) {
                Some(n) => C::from_integer(ctx, n, prec),
                None => C::exact_zero(ctx),
            })
            .collect();
        Self::build(ctx, ring, coeffs, prec)
    }

    pub fn ctx(&self) -> C::Ctx {
        self.ctx
    }

    pub fn p(&self) -> u64 {
        C::prime(self.ctx)
    }

    pub fn ring(&self) -> RingTag {
        self.ring
    }

    pub fn trunc(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &C {
        &self.coeffs[k]
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }

    pub fn prec_p(&self) -> i64 {
        self.prec_p
    }

    pub fn with_prec_p(mut self, prec_p: i64) -> Self {
        self.prec_p = prec_p;
        self
    }

    pub fn with_ring(mut self, ring: RingTag) -> Self {
        self.ring = ring;
        self
    }

    fn compatible(&self, other: &Self) -> Result<(), SeriesError> {
        if self.ctx != other.ctx {
            Err(SeriesError::Mismatch)
        } else {
            Ok(())
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.compatible(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.plus(b)).collect();
        Ok(Self::build(self.ctx, self.ring.merge(other.ring), coeffs, self.prec_p.min(other.prec_p)))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.compatible(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.minus(b)).collect();
        Ok(Self::build(self.ctx, self.ring.merge(other.ring), coeffs, self.prec_p.min(other.prec_p)))
    }

    pub fn neg(&self) -> Self {
        Self::build(self.ctx, self.ring, self.coeffs.iter().map(C::negate).collect(), self.prec_p)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.compatible(other)?;
        let d = self.trunc().min(other.trunc());
        let coeffs = convolve(&self.coeffs[..d], &other.coeffs[..d], self.ctx, d);
        Ok(Self::build(self.ctx, self.ring.merge(other.ring), coeffs, self.prec_p.min(other.prec_p)))
    }

    pub fn scalar_mul(&self, s: &C) -> Self {
        let ring = if self.ring == RingTag::Zp && s.valuation() < Valuation::int(0) { RingTag::Qp } else { self.ring };
        Self::build(self.ctx, ring, self.coeffs.iter().map(|c| c.times(s)).collect(), self.prec_p)
    }

    pub fn mul_int(&self, n: &BigInt) -> Self {
        Self::build(self.ctx, self.ring, self.coeffs.iter().map(|c| c.times_int(n)).collect(), self.prec_p)
    }

    pub fn mul_padic(&self, s: &PadicScalar) -> Self {
        let ring = if self.ring == RingTag::Zp && s.valuation() < Valuation::int(0) { RingTag::Qp } else { self.ring };
        Self::build(self.ctx, ring, self.coeffs.iter().map(|c| c.times_padic(s)).collect(), self.prec_p)
    }

    /// Multiplication by `T^k`, keeping the truncation.
    pub fn shift_up(&self, k: usize) -> Self {
        let d = self.trunc();
        let mut coeffs = vec![C::exact_zero(self.ctx); k.min(d)];
        coeffs.extend(self.coeffs.iter().take(d.saturating_sub(k)).cloned());
        Self::build(self.ctx, self.ring, coeffs, self.prec_p)
    }

    pub fn truncate(&self, trunc: usize) -> Self {
        let mut s = self.clone();
        s.coeffs.truncate(trunc);
        s
    }

    /// Lowers every coefficient's absolute precision to at most `cap`.
    pub fn cap_precision(&self, cap: i64) -> Self {
        let coeffs = self.coeffs.iter().map(|c| c.cap_abs(cap)).collect();
        Self::build(self.ctx, self.ring, coeffs, self.prec_p.min(cap))
    }

    /// Treats the stored digits as exact up to absolute precision `abs`.
    pub fn lift_precision(&self, abs: i64) -> Self {
        let coeffs = self.coeffs.iter().map(|c| c.raise_abs(abs)).collect();
        Self::build(self.ctx, self.ring, coeffs, self.prec_p.max(abs))
    }

    pub fn eval_at_zero(&self) -> C {
        self.coeffs.first().cloned().unwrap_or_else(|| C::exact_zero(self.ctx))
    }

    /// `f / g` for `g = T^k · (unit + …)` with `T^k | f`.
    pub fn divide_exact(&self, g: &Self) -> Result<Self, SeriesError> {
        self.compatible(g)?;
        let k = g
            .coeffs
            .iter()
            .position(|c| !c.zero_to_precision())
            .ok_or_else(|| SeriesError::Inexact("divisor is zero to precision".into()))?;
        if g.coeffs[k].valuation() != Valuation::int(0) {
            return Err(SeriesError::Inexact(format!("lowest nonzero coefficient of the divisor (T^{k}) is not a unit")));
        }
        if let Some(i) = self.coeffs.iter().take(k).position(|c| !c.zero_to_precision()) {
            return Err(SeriesError::Inexact(format!("T^{k} does not divide the dividend (coefficient {i})")));
        }
        let d = self.trunc().min(g.trunc()).saturating_sub(k);
        let coeffs = power_series_quotient(&self.coeffs[k..k + d], &g.coeffs[k..k + d], self.ctx)?;
        Ok(Self::build(self.ctx, self.ring.merge(g.ring), coeffs, self.prec_p.min(g.prec_p)))
    }

    /// `f / g` for `g` with certified-nonzero constant term; the result lives over the fraction field.
    pub fn divide(&self, g: &Self) -> Result<Self, SeriesError> {
        self.compatible(g)?;
        let d = self.trunc().min(g.trunc());
        let coeffs = power_series_quotient(&self.coeffs[..d], &g.coeffs[..d], self.ctx)?;
        let ring = if C::EXTENSION { RingTag::QpAlpha } else { RingTag::Qp };
        let prec = min_precision(&coeffs).unwrap_or(self.prec_p).min(self.prec_p.min(g.prec_p));
        Ok(Self::build(self.ctx, ring, coeffs, prec))
    }

    /// Smallest absolute precision over the non-exact coefficients.
    pub fn min_coefficient_precision(&self) -> Option<i64> {
        min_precision(&self.coeffs)
    }

    /// Floor of the smallest valuation among coefficients that are not zero to precision.
    pub fn min_valuation(&self) -> Option<i64> {
        self.coeffs.iter().filter_map(|c| c.valuation().finite()).map(floor_rational).min()
    }
}

impl ExtSeries {
    pub fn conj(&self) -> Self {
        Self::build(self.ctx, self.ring, self.coeffs.iter().map(QuadExtScalar::conj).collect(), self.prec_p)
    }

    /// Every `y`-coordinate vanishes to precision.
    pub fn is_rational(&self) -> bool {
        self.coeffs.iter().all(QuadExtScalar::is_rational)
    }

    /// The `x`-coordinates, or the first index whose `y`-coordinate is certified nonzero.
    pub fn rational_part(&self) -> Result<PadicSeries, usize> {
        if let Some(i) = self.coeffs.iter().position(|c| !c.is_rational()) {
            return Err(i);
        }
        let coeffs = self.coeffs.iter().map(|c| c.x().clone()).collect();
        Ok(IwasawaSeries::build(self.ctx.p, RingTag::Qp, coeffs, self.prec_p))
    }
}

impl PadicSeries {
    /// Embeds into `Q_p(α)[[T]]`.
    pub fn to_ext(&self, ctx: ExtContext) -> ExtSeries {
        assert_eq!(ctx.p, self.ctx, "embedding into an extension over another prime");
        let coeffs = self.coeffs.iter().map(|c| QuadExtScalar::from_padic(ctx, c.clone())).collect();
        IwasawaSeries::build(ctx, RingTag::QpAlpha, coeffs, self.prec_p)
    }

    /// Re-tags as `Zp` after checking integrality.
    pub fn into_integral(self) -> Result<Self, SeriesError> {
        IwasawaSeries::new(self.ctx, RingTag::Zp, self.coeffs, self.prec_p)
    }
}

fn min_precision<C: Coefficient>(coeffs: &[C]) -> Option<i64> {
    coeffs.iter().filter_map(|c| c.abs_precision()).map(floor_rational).min()
}

/// First `d` coefficients of the product.
pub(crate) fn convolve<C: Coefficient>(a: &[C], b: &[C], ctx: C::Ctx, d: usize) -> Vec<C> {
    let mut out = vec![C::exact_zero(ctx); d];
    for (i, x) in a.iter().enumerate().take(d) {
        if x.exactly_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(d - i) {
            if y.exactly_zero() {
                continue;
            }
            out[i + j] = out[i + j].plus(&x.times(y));
        }
    }
    out
}

fn power_series_quotient<C: Coefficient>(f: &[C], g: &[C], ctx: C::Ctx) -> Result<Vec<C>, SeriesError> {
    let d = f.len().min(g.len());
    if d == 0 {
        return Ok(Vec::new());
    }
    let g0 = &g[0];
    if g0.zero_to_precision() {
        return Err(SeriesError::Inexact("divisor has no certified-nonzero constant term".into()));
    }
    let mut q: Vec<C> = Vec::with_capacity(d);
    for m in 0..d {
        let mut acc = f[m].clone();
        for j in 1..=m {
            if g[j].exactly_zero() || q[m - j].exactly_zero() {
                continue;
            }
            acc = acc.minus(&g[j].times(&q[m - j]));
        }
        q.push(if acc.exactly_zero() { C::exact_zero(ctx) } else { acc.divided_by(g0)? });
    }
    Ok(q)
}

macro_rules! series_op {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl<C: Coefficient> std::ops::$tr<&IwasawaSeries<C>> for &IwasawaSeries<C> {
            type Output = IwasawaSeries<C>;
            fn $method(self, rhs: &IwasawaSeries<C>) -> IwasawaSeries<C> {
                self.$checked(rhs).expect("series over different coefficient rings")
            }
        }
    };
}
series_op!(Add, add, checked_add);
series_op!(Sub, sub, checked_sub);
series_op!(Mul, mul, checked_mul);

impl<C: Coefficient> fmt::Display for IwasawaSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.zero_to_precision() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*T")?,
                _ => write!(f, "({c})*T^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(T^{})", self.trunc())
    }
}
