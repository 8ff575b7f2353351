//! The transfer matrix `Log_{α,β}(1+T)` between the integral pair `(L_♯, L_♭)` and the
//! classical pair `(L_α, L_β)`.
//!
//! `Log = lim ∏_{i≤n} C_i(T) · A^(−(N+1)) · M` with `C_i = [[a_p, 1], [s·Φ_{p^i}(1+T), 0]]`,
//! `A = C_i(0) = [[a_p, 1], [s·p, 0]]`, `M = [[−1, −1], [β, α]]`, `N = n+1` for odd `p` and
//! `N = n+2` for `p = 2`. The sign `s` is fixed by a [`FactorConvention`].

mod column;
pub(crate) mod poly;
mod zero;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::padic::{HeckeRootPair, PadicError, QuadExtScalar, Valuation, Valued};
use crate::series::{ExtSeries, PadicSeries, RingTag, SeriesError};
use poly::{a_adjugate, int_mat_pow, PolyMat, Ring};

pub use column::{log_alpha_column, AlphaColumn};
pub use zero::{
    a_inverse_power, convention_sign, interpolation_sign, interpolation_targets, m_matrix, partial_product_at_zero,
    values_at_zero, values_at_zero_coefficients, z_at_zero, z_exponent, z_rational_part, ConventionSign,
    REFERENCE_PAIRS,
};

pub type Mat2<T> = [[T; 2]; 2];

/// Default cap on the number of cyclotomic factors.
pub const DEFAULT_N_MAX: usize = 64;

/// Sign of the lower-left entries of `C_i` and `A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FactorConvention {
    /// `C_i = [[a_p, 1], [Φ_{p^i}(1+T), 0]]`, `det A = −p`.
    Literal,
    /// `C_i = [[a_p, 1], [−Φ_{p^i}(1+T), 0]]`, `det A = p`; `M`'s columns are eigenvectors of `A`.
    #[default]
    Negated,
}

impl FactorConvention {
    pub fn sign(self) -> i64 {
        match self {
            FactorConvention::Literal => 1,
            FactorConvention::Negated => -1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LogError {
    #[error("a_p = {a_p} is ordinary at p = {p}; the full matrix needs supersingular reduction")]
    Ordinary { a_p: i64, p: u64 },
    #[error("a_p = {a_p} is supersingular at p = {p}; the single column needs ordinary reduction")]
    Supersingular { a_p: i64, p: u64 },
    #[error("partial products did not stabilize modulo p^{prec} within {n_max} factors (last agreement p^{reached})")]
    NotStabilized { n_max: usize, prec: i64, reached: i64 },
    #[error("column did not stabilize within {} factors", .0.n_used)]
    ColumnNotStabilized(Box<AlphaColumn>),
    #[error("integrality violated: {0}")]
    IntegralityViolation(String),
    #[error("matrix value at T = 0 is singular to working precision")]
    Singular,
    #[error("operands do not match the matrix: {0}")]
    Mismatch(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Padic(#[from] PadicError),
}

/// `N` for the `n`-th partial product.
pub fn big_n(p: u64, n: usize) -> usize {
    if p == 2 {
        n + 2
    } else {
        n + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogParams {
    pub a_p: i64,
    pub p: u64,
    pub prec_p: i64,
    pub trunc: usize,
    pub n_max: usize,
    pub convention: FactorConvention,
}

impl LogParams {
    pub fn new(a_p: i64, p: u64, prec_p: i64, trunc: usize) -> Self {
        LogParams { a_p, p, prec_p, trunc, n_max: DEFAULT_N_MAX, convention: FactorConvention::default() }
    }

    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max = n_max;
        self
    }

    pub fn with_convention(mut self, convention: FactorConvention) -> Self {
        self.convention = convention;
        self
    }

    fn validate(&self) -> Result<(), LogError> {
        if self.prec_p < 1 {
            return Err(LogError::BadParameter(format!("precision {} < 1", self.prec_p)));
        }
        if self.trunc < 1 {
            return Err(LogError::BadParameter("truncation must be positive".into()));
        }
        if self.n_max < 2 {
            return Err(LogError::BadParameter("n_max must be at least 2".into()));
        }
        Ok(())
    }
}

/// `1 + ⌊(D−1)/deg Φ_{p^i}⌋` summed over the factors: a bound on `−ord` of `1/∏Φ_{p^i}(1+T)`
/// modulo `T^D`.
fn inverse_loss(p: u64, n: usize, trunc: usize) -> i64 {
    (1..=n)
        .map(|i| match (p as usize).checked_pow(i as u32 - 1) {
            Some(lower) if lower < trunc => 1 + ((trunc - 1) / (lower * (p as usize - 1))) as i64,
            _ => 1,
        })
        .sum()
}

/// `Y_n = ∏_{i≤n} C_i` modulo `(p^W, T^D)`.
fn factor_product(ring: &Ring, a_p: i64, n: usize, conv: FactorConvention) -> PolyMat {
    let mut y = ring.identity();
    for i in 1..=n {
        y = ring.times_factor(&y, a_p, conv.sign(), &ring.cyclotomic(i as u32));
    }
    y
}

/// Number of factors after which consecutive partial products agree modulo `p^prec_p`.
///
/// With `X_n = Y_n·adj(A)^(N+1)`, the difference of consecutive partial products is
/// `(X_n − det(A)·X_{n−1}) / det(A)^(N+1)`.
fn stabilize(params: &LogParams) -> Result<usize, LogError> {
    let LogParams { a_p, p, prec_p, trunc, n_max, convention } = *params;
    let ring = Ring::new(p, prec_p + n_max as i64 + 16, trunc);
    let adj = a_adjugate(a_p, p, convention);
    let det = BigInt::from(-convention.sign() * p as i64);
    let mut y = ring.identity();
    let mut prev: Option<PolyMat> = None;
    let mut reached = i64::MIN;
    for n in 1..=n_max {
        y = ring.times_factor(&y, a_p, convention.sign(), &ring.cyclotomic(n as u32));
        let e = big_n(p, n) as i64 + 1;
        let x = ring.times_const(&y, &int_mat_pow(&adj, e as usize));
        if let Some(px) = &prev {
            let diff: Vec<_> = (0..4).map(|k| ring.sub(&x[k / 2][k % 2], &ring.scale(&px[k / 2][k % 2], &det))).collect();
            let agree = ring.min_valuation(&diff.iter().collect::<Vec<_>>()) - e;
            reached = reached.max(agree);
            if agree >= prec_p {
                return Ok(n);
            }
        }
        prev = Some(x);
    }
    Err(LogError::NotStabilized { n_max, prec: prec_p, reached })
}

/// `Log_{α,β}(1+T)` at finite precision, for supersingular `p`.
///
/// Stores the `Q_p`-part `Q = ∏C_i·A^(−(N+1))` and its inverse; the full matrix is `Q·M`.
#[derive(Debug, Clone)]
pub struct LogMatrix {
    params: LogParams,
    roots: HeckeRootPair,
    n_used: usize,
    working: i64,
    q: Mat2<PadicSeries>,
    q_inv: Mat2<PadicSeries>,
}

impl LogMatrix {
    pub fn build(a_p: i64, p: u64, prec_p: i64, trunc: usize) -> Result<Self, LogError> {
        Self::build_with(LogParams::new(a_p, p, prec_p, trunc))
    }

    pub fn build_with(params: LogParams) -> Result<Self, LogError> {
        params.validate()?;
        let LogParams { a_p, p, prec_p, trunc, convention, .. } = params;
        zero::supersingular_roots(a_p, p, 1)?;
        let n_used = stabilize(&params)?;
        let e = big_n(p, n_used) as i64 + 1;
        let loss_inv = inverse_loss(p, n_used, trunc);
        let working = prec_p + e + loss_inv + 4;
        let internal = working + 4;
        let ring = Ring::new(p, internal + loss_inv + e + 4, trunc);

        let y = factor_product(&ring, a_p, n_used, convention);
        let adj_pow = int_mat_pow(&a_adjugate(a_p, p, convention), e as usize);
        // det(A)^e = (−s)^e·p^e.
        let sign = BigInt::from(if e % 2 == 0 { 1 } else { -convention.sign() });
        let x = ring.times_const(&y, &adj_pow);
        let q = x.map(|row| row.map(|c| ring.to_series(&ring.scale(&c, &sign), -e).cap_precision(internal)));

        // Q^(−1) = A^e·adj(Y)/det(Y), det(Y) = ∏(−s·Φ_{p^i}).
        let adj_y: PolyMat = [
            [y[1][1].clone(), ring.scale(&y[0][1], &BigInt::from(-1))],
            [ring.scale(&y[1][0], &BigInt::from(-1)), y[0][0].clone()],
        ];
        let a_pow = int_mat_pow(&poly::a_matrix(a_p, p, convention), e as usize);
        let numer = ring.const_times(&a_pow, &adj_y);
        let mut det_y = ring.constant(&BigInt::from(1));
        for i in 1..=n_used {
            det_y = ring.mul(&det_y, &ring.scale(&ring.cyclotomic(i as u32), &BigInt::from(-convention.sign())));
        }
        let one = PadicSeries::from_integers(p, RingTag::Qp, &[BigInt::from(1)], ring.digits, trunc);
        let inv_det = one.divide(&ring.to_series(&det_y, 0))?;
        let mut q_inv = numer.map(|row| row.map(|c| ring.to_series(&c, 0)));
        for row in q_inv.iter_mut() {
            for entry in row.iter_mut() {
                *entry = entry.checked_mul(&inv_det)?.cap_precision(internal);
            }
        }

        let roots = crate::padic::hecke_roots(a_p, p, internal)?;
        let m = LogMatrix { params, roots, n_used, working, q, q_inv };
        let v = m.value_at_zero();
        if v[0][0].mul(&v[1][1]).sub(&v[0][1].mul(&v[1][0])).is_zero() {
            return Err(LogError::Singular);
        }
        Ok(m)
    }

    pub fn params(&self) -> &LogParams {
        &self.params
    }

    pub fn roots(&self) -> &HeckeRootPair {
        &self.roots
    }

    pub fn a_p(&self) -> i64 {
        self.params.a_p
    }

    pub fn p(&self) -> u64 {
        self.params.p
    }

    pub fn prec_p(&self) -> i64 {
        self.params.prec_p
    }

    pub fn trunc(&self) -> usize {
        self.params.trunc
    }

    pub fn convention(&self) -> FactorConvention {
        self.params.convention
    }

    /// Number of cyclotomic factors in the stabilized partial product.
    pub fn n_used(&self) -> usize {
        self.n_used
    }

    /// `N` for [`n_used`](Self::n_used).
    pub fn big_n(&self) -> usize {
        big_n(self.params.p, self.n_used)
    }

    /// Input precision at which [`compose`](Self::compose) followed by
    /// [`decompose`](Self::decompose) returns integral data to `p^prec_p`.
    pub fn working_precision(&self) -> i64 {
        self.working
    }

    /// `Q = ∏C_i·A^(−(N+1))`.
    pub fn rational_part(&self) -> &Mat2<PadicSeries> {
        &self.q
    }

    pub fn rational_part_inverse(&self) -> &Mat2<PadicSeries> {
        &self.q_inv
    }

    /// The entries of `Q·M`.
    pub fn entries(&self) -> Mat2<ExtSeries> {
        let row = |i: usize| {
            let (a, b) = self.row_times_m(&self.q[i][0], &self.q[i][1]);
            [a, b]
        };
        [row(0), row(1)]
    }

    /// `(f1, f2)·M = (−f1 + β·f2, −f1 + α·f2)`.
    fn row_times_m(&self, f1: &PadicSeries, f2: &PadicSeries) -> (ExtSeries, ExtSeries) {
        let ctx = self.roots.context();
        let (alpha, beta) = self.roots.ext_roots();
        let minus_f1 = f1.neg().to_ext(ctx);
        let f2 = f2.to_ext(ctx);
        let la = &minus_f1 + &f2.scalar_mul(&beta);
        let lb = &minus_f1 + &f2.scalar_mul(&alpha);
        (la, lb)
    }

    /// `Log` at `T = 0`.
    pub fn value_at_zero(&self) -> Mat2<QuadExtScalar> {
        let ctx = self.roots.context();
        let q0 = self.q.clone().map(|row| row.map(|s| QuadExtScalar::from_padic(ctx, s.eval_at_zero())));
        zero::mat_mul_ext(&q0, &m_matrix(&self.roots))
    }

    fn check_pair<C: crate::series::Coefficient>(&self, f: &crate::series::IwasawaSeries<C>) -> Result<(), LogError> {
        if f.p() != self.params.p {
            return Err(LogError::Mismatch(format!("series over p = {}, matrix over p = {}", f.p(), self.params.p)));
        }
        Ok(())
    }

    /// `(L_α, L_β) = (L_♯, L_♭)·Log`.
    pub fn compose(&self, sharp: &PadicSeries, flat: &PadicSeries) -> Result<(ExtSeries, ExtSeries), LogError> {
        self.check_pair(sharp)?;
        self.check_pair(flat)?;
        let d = sharp.trunc().min(flat.trunc()).min(self.params.trunc);
        let (s, f) = (sharp.truncate(d), flat.truncate(d));
        let q = |i: usize, j: usize| self.q[i][j].truncate(d);
        let f1 = &(&s * &q(0, 0)) + &(&f * &q(1, 0));
        let f2 = &(&s * &q(0, 1)) + &(&f * &q(1, 1));
        let nominal = sharp.prec_p().min(flat.prec_p());
        let (la, lb) = self.row_times_m(&f1, &f2);
        Ok((la.with_prec_p(nominal), lb.with_prec_p(nominal)))
    }

    /// Inverse of [`compose`](Self::compose), with integrality of the result checked.
    pub fn decompose(&self, la: &ExtSeries, lb: &ExtSeries) -> Result<(PadicSeries, PadicSeries), LogError> {
        self.check_pair(la)?;
        self.check_pair(lb)?;
        let ctx = self.roots.context();
        if la.ctx() != ctx || lb.ctx() != ctx {
            return Err(LogError::Mismatch("extension context differs from the matrix".into()));
        }
        let d = la.trunc().min(lb.trunc()).min(self.params.trunc);
        let (la, lb) = (la.truncate(d), lb.truncate(d));
        let (alpha, beta) = self.roots.ext_roots();
        let inv_gap = beta.sub(&alpha).inv()?;
        let f2 = (&la - &lb).scalar_mul(&inv_gap);
        let f1 = (&la.scalar_mul(&alpha) - &lb.scalar_mul(&beta)).scalar_mul(&inv_gap);
        let rational = |f: &ExtSeries, which: &str| {
            f.rational_part().map_err(|i| {
                LogError::IntegralityViolation(format!(
                    "{which}: coefficient {i} of (L_α, L_β)·M^(−1) lies outside Q_p; the pair is not conjugate-symmetric"
                ))
            })
        };
        let (f1, f2) = (rational(&f1, "first component")?, rational(&f2, "second component")?);
        let qi = |i: usize, j: usize| self.q_inv[i][j].truncate(d);
        let cap = self.params.prec_p.min(la.prec_p()).min(lb.prec_p());
        let g1 = (&(&f1 * &qi(0, 0)) + &(&f2 * &qi(1, 0))).cap_precision(cap);
        let g2 = (&(&f1 * &qi(0, 1)) + &(&f2 * &qi(1, 1))).cap_precision(cap);
        check_integral(&g1, "L_♯")?;
        check_integral(&g2, "L_♭")?;
        Ok((g1.into_integral()?, g2.into_integral()?))
    }
}

fn check_integral(g: &PadicSeries, name: &str) -> Result<(), LogError> {
    for (k, c) in g.coeffs().iter().enumerate() {
        match c.valuation() {
            Valuation::Finite(v) if v < 0.into() => {
                return Err(LogError::IntegralityViolation(format!("{name}: coefficient {k} has valuation {v}")));
            }
            Valuation::Infinite if c.abs_prec().is_some_and(|a| a < 0) => {
                return Err(LogError::IntegralityViolation(format!(
                    "{name}: coefficient {k} is known only modulo p^{}",
                    c.abs_prec().unwrap()
                )));
            }
            _ => {}
        }
    }
    Ok(())
}

/// Treats the digits of `f` as exact up to the working precision of `log`; for integer inputs.
pub fn lift_to_working(f: &PadicSeries, log: &LogMatrix) -> PadicSeries {
    f.lift_precision(log.working_precision()).with_prec_p(f.prec_p())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_pair(rng: &mut ChaCha8Rng, p: u64, prec: i64, trunc: usize) -> (PadicSeries, PadicSeries) {
        let mut gen = || {
            let ints: Vec<BigInt> = (0..trunc).map(|_| BigInt::from(rng.gen_range(-1000i64..1000))).collect();
            PadicSeries::from_integers(p, RingTag::Zp, &ints, prec, trunc)
        };
        (gen(), gen())
    }

    fn agree(a: &PadicSeries, b: &PadicSeries, prec: i64) -> bool {
        a.coeffs().iter().zip(b.coeffs()).all(|(x, y)| {
            let d = x.sub(y);
            d.is_zero() && d.abs_prec().map_or(true, |abs| abs >= prec) || d.val().is_some_and(|v| v >= prec)
        })
    }

    #[test]
    fn value_at_zero_matches_closed_form() {
        for (a, p) in REFERENCE_PAIRS {
            let log = LogMatrix::build(a, p, 10, 12).unwrap();
            let z = z_at_zero(a, p, 10, FactorConvention::Negated).unwrap();
            let v = log.value_at_zero();
            for i in 0..2 {
                for j in 0..2 {
                    assert!(v[i][j].agrees_with(&z[i][j]), "({a},{p}) entry {i}{j}");
                }
            }
        }
    }

    #[test]
    fn round_trip_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (a, p) in [(0i64, 3u64), (0, 2), (2, 2), (0, 5)] {
            let log = LogMatrix::build(a, p, 10, 16).unwrap();
            for _ in 0..3 {
                let (f, g) = random_pair(&mut rng, p, 10, 16);
                let (la, lb) = log.compose(&lift_to_working(&f, &log), &lift_to_working(&g, &log)).unwrap();
                assert!(la.conj().checked_sub(&lb).unwrap().coeffs().iter().all(|c| c.is_zero()));
                let (f2, g2) = log.decompose(&la, &lb).unwrap();
                assert!(agree(&f, &f2, 10) && agree(&g, &g2, 10), "({a},{p})");
            }
        }
    }

    #[test]
    fn basis_vector_gives_first_row() {
        let log = LogMatrix::build(0, 3, 8, 10).unwrap();
        let one = PadicSeries::from_integers(3, RingTag::Zp, &[BigInt::from(1)], 8, 10);
        let zero = PadicSeries::zero(3, RingTag::Zp, 10, 8);
        let (la, lb) = log.compose(&one, &zero).unwrap();
        let row = &log.entries()[0];
        assert!(la.checked_sub(&row[0]).unwrap().coeffs().iter().all(|c| c.is_zero()));
        assert!(lb.checked_sub(&row[1]).unwrap().coeffs().iter().all(|c| c.is_zero()));
        let (z1, z2) = log.compose(&zero, &zero).unwrap();
        assert!(z1.coeffs().iter().chain(z2.coeffs()).all(|c| c.is_zero()));
        let (s, f) = log.decompose(&row[0], &row[1]).unwrap();
        assert!(agree(&s, &one, 8) && agree(&f, &zero, 8));
    }

    #[test]
    fn asymmetric_input_is_rejected() {
        let log = LogMatrix::build(0, 5, 8, 10).unwrap();
        let ctx = log.roots().context();
        let one = PadicSeries::from_integers(5, RingTag::Zp, &[BigInt::from(1), BigInt::from(2)], 8, 10).to_ext(ctx);
        let zero = PadicSeries::zero(5, RingTag::Zp, 10, 8).to_ext(ctx);
        assert!(matches!(log.decompose(&one, &zero), Err(LogError::IntegralityViolation(_))));
    }

    #[test]
    fn ordinary_matrix_rejected() {
        assert!(matches!(LogMatrix::build(1, 5, 8, 10), Err(LogError::Ordinary { .. })));
    }

    #[test]
    fn stabilization_cap_is_enforced() {
        let params = LogParams::new(0, 2, 15, 40).with_n_max(5);
        assert!(matches!(LogMatrix::build_with(params), Err(LogError::NotStabilized { n_max: 5, .. })));
    }

    #[test]
    fn inverse_loss_bound_counts_small_factors() {
        // p = 2, D = 8: degrees 1, 2, 4, 8, 16 give 1+7, 1+3, 1+1, 1+0, 1.
        assert_eq!(inverse_loss(2, 5, 8), 8 + 4 + 2 + 1 + 1);
        assert_eq!(inverse_loss(7, 64, 60), (1 + 9) + (1 + 1) + 62);
    }
}
