use std::fmt;

use num_bigint::BigInt;
use num_rational::Rational64;

use super::{PadicError, PadicScalar, Valuation, Valued};

/// The algebra `Q_p[α]/(α² − a_p·α + p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExtContext {
    pub p: u64,
    pub a_p: i64,
}

impl ExtContext {
    pub fn new(p: u64, a_p: i64) -> Self {
        ExtContext { p, a_p }
    }

    /// `p | a_p`: the Hecke polynomial is Eisenstein and `Q_p(α)` is a ramified field.
    pub fn is_ramified(&self) -> bool {
        self.a_p % self.p as i64 == 0
    }
}

/// `x + y·α` in the algebra of an [`ExtContext`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadExtScalar {
    ctx: ExtContext,
    x: PadicScalar,
    y: PadicScalar,
}

impl QuadExtScalar {
    pub fn new(ctx: ExtContext, x: PadicScalar, y: PadicScalar) -> Self {
        assert!(x.p() == ctx.p && y.p() == ctx.p, "coordinates over the wrong prime");
        QuadExtScalar { ctx, x, y }
    }

    pub fn zero(ctx: ExtContext) -> Self {
        Self::new(ctx, PadicScalar::zero(ctx.p), PadicScalar::zero(ctx.p))
    }

    pub fn from_padic(ctx: ExtContext, x: PadicScalar) -> Self {
        Self::new(ctx, x, PadicScalar::zero(ctx.p))
    }

    pub fn from_i64(ctx: ExtContext, n: i64, prec: i64) -> Self {
        Self::from_padic(ctx, PadicScalar::from_i64(n, ctx.p, prec))
    }

    /// The generator `α` itself.
    pub fn alpha(ctx: ExtContext, prec: i64) -> Self {
        Self::new(ctx, PadicScalar::zero(ctx.p), PadicScalar::one(ctx.p, prec))
    }

    pub fn ctx(&self) -> ExtContext {
        self.ctx
    }

    pub fn x(&self) -> &PadicScalar {
        &self.x
    }

    pub fn y(&self) -> &PadicScalar {
        &self.y
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.ctx, other.ctx, "extension elements from different contexts");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        QuadExtScalar { ctx: self.ctx, x: self.x.add(&other.x), y: self.y.add(&other.y) }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check(other);
        QuadExtScalar { ctx: self.ctx, x: self.x.sub(&other.x), y: self.y.sub(&other.y) }
    }

    pub fn neg(&self) -> Self {
        QuadExtScalar { ctx: self.ctx, x: self.x.neg(), y: self.y.neg() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        let p = BigInt::from(self.ctx.p);
        let a = BigInt::from(self.ctx.a_p);
        let yy = self.y.mul(&other.y);
        let x = self.x.mul(&other.x).sub(&yy.mul_int(&p));
        let y = self.x.mul(&other.y).add(&self.y.mul(&other.x)).add(&yy.mul_int(&a));
        QuadExtScalar { ctx: self.ctx, x, y }
    }

    pub fn mul_padic(&self, s: &PadicScalar) -> Self {
        QuadExtScalar { ctx: self.ctx, x: self.x.mul(s), y: self.y.mul(s) }
    }

    pub fn mul_int(&self, n: &BigInt) -> Self {
        QuadExtScalar { ctx: self.ctx, x: self.x.mul_int(n), y: self.y.mul_int(n) }
    }

    pub fn mul_i64(&self, n: i64) -> Self {
        self.mul_int(&BigInt::from(n))
    }

    /// The nontrivial automorphism `α ↦ a_p − α`.
    pub fn conj(&self) -> Self {
        QuadExtScalar {
            ctx: self.ctx,
            x: self.x.add(&self.y.mul_i64(self.ctx.a_p)),
            y: self.y.neg(),
        }
    }

    /// `x² + a_p·x·y + p·y²`.
    pub fn norm(&self) -> PadicScalar {
        let xy = self.x.mul(&self.y).mul_i64(self.ctx.a_p);
        let yy = self.y.mul(&self.y).mul_i64(self.ctx.p as i64);
        self.x.mul(&self.x).add(&xy).add(&yy)
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, PadicError> {
        if self.ctx != other.ctx {
            return Err(PadicError::ContextMismatch);
        }
        let n = other.norm();
        if n.is_zero() {
            return Err(PadicError::DivisionByZero);
        }
        let num = self.mul(&other.conj());
        Ok(QuadExtScalar { ctx: self.ctx, x: num.x.checked_div(&n)?, y: num.y.checked_div(&n)? })
    }

    pub fn checked_div_padic(&self, s: &PadicScalar) -> Result<Self, PadicError> {
        Ok(QuadExtScalar { ctx: self.ctx, x: self.x.checked_div(s)?, y: self.y.checked_div(s)? })
    }

    pub fn inv(&self) -> Result<Self, PadicError> {
        let prec = self.x.rel_prec().or(self.y.rel_prec()).unwrap_or(1);
        QuadExtScalar::from_i64(self.ctx, 1, prec).checked_div(self)
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.x.is_exact_zero() && self.y.is_exact_zero()
    }

    /// The `y`-coordinate vanishes to precision, i.e. the element lies in `Q_p`.
    pub fn is_rational(&self) -> bool {
        self.y.is_zero()
    }

    /// Known modulo `π^(2·abs)`, as a rational exponent of `p`; `None` when exact.
    pub fn abs_prec(&self) -> Option<Rational64> {
        let shift = if self.ctx.is_ramified() { Rational64::new(1, 2) } else { Rational64::from_integer(0) };
        let ax = self.x.abs_prec().map(Rational64::from_integer);
        let ay = self.y.abs_prec().map(|a| Rational64::from_integer(a) + shift);
        match (ax, ay) {
            (None, b) => b,
            (a, None) => a,
            (Some(a), Some(b)) => Some(a.min(b)),
        }
    }

    pub fn reduce_abs(&self, cap: i64) -> Self {
        QuadExtScalar { ctx: self.ctx, x: self.x.reduce_abs(cap), y: self.y.reduce_abs(cap) }
    }

    pub fn lift_abs(&self, abs: i64) -> Self {
        QuadExtScalar { ctx: self.ctx, x: self.x.lift_abs(abs), y: self.y.lift_abs(abs) }
    }

    pub fn agrees_with(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }
}

impl Valued for QuadExtScalar {
    /// Exact in the ramified case. In the split case `min(v(x), v(y))` is only a lower bound.
    fn valuation(&self) -> Valuation {
        let shift = if self.ctx.is_ramified() { Rational64::new(1, 2) } else { Rational64::from_integer(0) };
        self.x.valuation().min(self.y.valuation().shift(shift))
    }
}

impl fmt::Display for QuadExtScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.x.is_zero(), self.y.is_zero()) {
            (_, true) => write!(f, "{}", self.x),
            (true, false) => write!(f, "({})*a", self.y),
            (false, false) => write!(f, "{} + ({})*a", self.x, self.y),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn alpha_squared_is_minus_five() {
        let ctx = ExtContext::new(5, 0);
        let a = QuadExtScalar::alpha(ctx, 10);
        let sq = a.mul(&a);
        assert!(sq.y().is_zero());
        assert_eq!(sq.x().val(), Some(1));
        assert!(sq.x().agrees_with(&PadicScalar::from_i64(-5, 5, 10)));
    }

    #[test]
    fn alpha_has_half_valuation() {
        let ctx = ExtContext::new(5, 0);
        assert_eq!(QuadExtScalar::alpha(ctx, 10).valuation(), Valuation::half(1));
        let ctx = ExtContext::new(2, 2);
        assert_eq!(QuadExtScalar::alpha(ctx, 10).valuation(), Valuation::half(1));
    }

    #[test]
    fn conjugate_of_alpha_is_beta() {
        let ctx = ExtContext::new(3, 3);
        let a = QuadExtScalar::alpha(ctx, 10);
        let b = a.conj();
        assert!(a.add(&b).agrees_with(&QuadExtScalar::from_i64(ctx, 3, 10)));
        assert!(a.mul(&b).agrees_with(&QuadExtScalar::from_i64(ctx, 3, 10)));
    }

    #[test]
    fn division_round_trip() {
        let ctx = ExtContext::new(2, -2);
        let u = QuadExtScalar::new(ctx, PadicScalar::from_i64(3, 2, 20), PadicScalar::from_i64(5, 2, 20));
        let w = QuadExtScalar::new(ctx, PadicScalar::from_i64(4, 2, 20), PadicScalar::from_i64(1, 2, 20));
        let q = u.checked_div(&w).unwrap();
        assert!(q.mul(&w).agrees_with(&u));
    }

    fn coord(p: u64) -> impl Strategy<Value = PadicScalar> {
        (-2i64..3, 1u64..100_000, 6i64..14).prop_map(move |(v, u, prec)| {
            let u = if u % p == 0 { u + 1 } else { u };
            PadicScalar::from_i64(u as i64, p, prec).shift(v)
        })
    }

    fn supersingular() -> impl Strategy<Value = ExtContext> {
        prop::sample::select(vec![(2u64, -2i64), (2, 0), (2, 2), (3, -3), (3, 0), (3, 3), (5, 0), (7, 0)])
            .prop_map(|(p, a)| ExtContext::new(p, a))
    }

    proptest! {
        #[test]
        fn valuation_matches_half_norm(
            (ctx, x, y) in supersingular().prop_flat_map(|c| (Just(c), coord(c.p), coord(c.p)))
        ) {
            let z = QuadExtScalar::new(ctx, x, y);
            let half_norm = z.norm().valuation().finite().map(|v| v / 2);
            prop_assert_eq!(z.valuation().finite(), half_norm);
        }

        #[test]
        fn extension_ring_laws(
            (ctx, a, b, c, d) in supersingular()
                .prop_flat_map(|c| (Just(c), coord(c.p), coord(c.p), coord(c.p), coord(c.p)))
        ) {
            let u = QuadExtScalar::new(ctx, a.clone(), b.clone());
            let w = QuadExtScalar::new(ctx, c.clone(), d.clone());
            let z = QuadExtScalar::new(ctx, b, c);
            prop_assert!(u.mul(&w).mul(&z).agrees_with(&u.mul(&w.mul(&z))));
            prop_assert!(u.mul(&w.add(&z)).agrees_with(&u.mul(&w).add(&u.mul(&z))));
            prop_assert!(u.mul(&w).conj().agrees_with(&u.conj().mul(&w.conj())));
        }
    }
}
