//! Independent reference computations in exact arithmetic, used to cross-check the
//! finite-precision code paths.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// `x + y·α` in `Q[α]/(α² − a·α + p)`, exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactQuad {
    pub a: i64,
    pub p: u64,
    pub x: BigRational,
    pub y: BigRational,
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl ExactQuad {
    pub fn new(a: i64, p: u64, x: BigRational, y: BigRational) -> Self {
        ExactQuad { a, p, x, y }
    }

    pub fn rational(a: i64, p: u64, x: BigRational) -> Self {
        Self::new(a, p, x, BigRational::zero())
    }

    pub fn alpha(a: i64, p: u64) -> Self {
        Self::new(a, p, BigRational::zero(), BigRational::one())
    }

    /// `β = a − α`.
    pub fn beta(a: i64, p: u64) -> Self {
        Self::new(a, p, q(a), q(-1))
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.a, self.p, &self.x + &o.x, &self.y + &o.y)
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(self.a, self.p, &self.x - &o.x, &self.y - &o.y)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.a, self.p, &self.x * c, &self.y * c)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let yy = &self.y * &o.y;
        let x = &self.x * &o.x - &yy * q(self.p as i64);
        let y = &self.x * &o.y + &self.y * &o.x + &yy * q(self.a);
        Self::new(self.a, self.p, x, y)
    }

    pub fn inv(&self) -> Self {
        let conj = Self::new(self.a, self.p, &self.x + &self.y * q(self.a), -&self.y);
        let norm = &self.x * &self.x + &self.x * &self.y * q(self.a) + &self.y * &self.y * q(self.p as i64);
        assert!(!norm.is_zero(), "inverting zero");
        conj.scale(&norm.recip())
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    /// Sign `s` with `(u, w)·R·M = s·((1 − 1/α)², (1 − 1/β)²)`, `M = [[−1, −1], [β, α]]`.
    pub fn interpolation_sign(a: i64, p: u64, r: &[[BigRational; 2]; 2], (u, w): (BigInt, BigInt)) -> Option<i64> {
        let alpha = Self::alpha(a, p);
        let beta = Self::beta(a, p);
        let one = Self::rational(a, p, BigRational::one());
        let (u, w) = (BigRational::from_integer(u), BigRational::from_integer(w));
        // Row vector (u, w)·R, then times M.
        let r0 = &u * &r[0][0] + &w * &r[1][0];
        let r1 = &u * &r[0][1] + &w * &r[1][1];
        let lhs0 = beta.scale(&r1).sub(&one.scale(&r0));
        let lhs1 = alpha.scale(&r1).sub(&one.scale(&r0));
        let target = |root: &Self| {
            let t = one.sub(&root.inv());
            t.mul(&t)
        };
        let (t0, t1) = (target(&alpha), target(&beta));
        for s in [1i64, -1] {
            if lhs0 == t0.scale(&q(s)) && lhs1 == t1.scale(&q(s)) {
                return Some(s);
            }
        }
        None
    }
}

/// `#E(F_p)` by testing every pair `(x, y)`, for `y² + a1·xy + a3·y = x³ + a2·x² + a4·x + a6`.
pub fn brute_force_point_count(coeffs: [i64; 5], p: u64) -> u64 {
    let [a1, a2, a3, a4, a6] = coeffs.map(|c| c.rem_euclid(p as i64) as u64);
    let mut count = 1;
    for x in 0..p {
        let rhs = (x * x % p * x + a2 * x % p * x + a4 * x + a6) % p;
        for y in 0..p {
            let lhs = (y * y + a1 * x % p * y + a3 * y) % p;
            if lhs == rhs {
                count += 1;
            }
        }
    }
    count
}

/// `#E(F_p)` through the additive character sum `Σ_{x,y} Σ_t ψ(t·F(x,y))`, with `ψ(t) = e^(2πit/p)`.
///
/// The inner sum over `t` equals `p` exactly when `F(x, y) = 0` and vanishes otherwise, so the
/// count is `1 + (1/p)·Σ_t Σ_{x,y} ψ(t·F)`; evaluated in floating point and rounded.
pub fn character_sum_point_count(coeffs: [i64; 5], p: u64) -> u64 {
    let [a1, a2, a3, a4, a6] = coeffs.map(|c| c.rem_euclid(p as i64) as u64);
    let mut total = 0.0f64;
    let tau = std::f64::consts::TAU;
    for t in 0..p {
        for x in 0..p {
            for y in 0..p {
                let f = (y * y + a1 * x % p * y + a3 * y + 3 * p * p - (x * x % p * x + a2 * x % p * x + a4 * x + a6) % p) % p;
                total += (tau * ((t * f) % p) as f64 / p as f64).cos();
            }
        }
    }
    1 + (total / p as f64).round() as u64
}
