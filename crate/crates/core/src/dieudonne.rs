//! The Dieudonné module on the basis `{ω, φ(ω)}`: Frobenius, the alternating pairing, the
//! eigenvectors `ν_A`, `ν_B`, the `♯/♭` and `N` vectors, and the regulator constants.

use std::fmt;

use thiserror::Error;

use crate::log_transform::{values_at_zero_coefficients, z_at_zero, FactorConvention, LogError, Mat2};
use crate::padic::{hecke_roots, ExtContext, HeckeRootPair, PadicError, PadicScalar, QuadExtScalar, ReductionType};
use crate::series::ExtSeries;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DieudonneError {
    #[error("[ω, φ(ω)] must be nonzero")]
    DegeneratePairing,
    #[error("Z is singular to working precision")]
    SingularZ,
    #[error("{0} is not in Q_p to working precision")]
    NotRational(&'static str),
    #[error("vectors live over different extensions")]
    ContextMismatch,
    #[error("coefficients {0:?} of the Perrin-Riou series are not conjugation-invariant")]
    Rationality(Vec<usize>),
    #[error(transparent)]
    Log(#[from] LogError),
    #[error(transparent)]
    Padic(#[from] PadicError),
}

/// `c_ω·ω + c_φω·φ(ω)` with coordinates in `Q_p(α)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DieudonneVector {
    pub c_omega: QuadExtScalar,
    pub c_phiomega: QuadExtScalar,
}

impl DieudonneVector {
    pub fn new(c_omega: QuadExtScalar, c_phiomega: QuadExtScalar) -> Self {
        DieudonneVector { c_omega, c_phiomega }
    }

    pub fn omega(ctx: ExtContext, prec: i64) -> Self {
        Self::new(QuadExtScalar::from_i64(ctx, 1, prec), QuadExtScalar::zero(ctx))
    }

    pub fn phi_omega(ctx: ExtContext, prec: i64) -> Self {
        Self::new(QuadExtScalar::zero(ctx), QuadExtScalar::from_i64(ctx, 1, prec))
    }

    pub fn zero(ctx: ExtContext) -> Self {
        Self::new(QuadExtScalar::zero(ctx), QuadExtScalar::zero(ctx))
    }

    pub fn ctx(&self) -> ExtContext {
        self.c_omega.ctx()
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.c_omega.add(&o.c_omega), self.c_phiomega.add(&o.c_phiomega))
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(self.c_omega.sub(&o.c_omega), self.c_phiomega.sub(&o.c_phiomega))
    }

    pub fn neg(&self) -> Self {
        Self::new(self.c_omega.neg(), self.c_phiomega.neg())
    }

    pub fn scale(&self, c: &QuadExtScalar) -> Self {
        Self::new(self.c_omega.mul(c), self.c_phiomega.mul(c))
    }

    pub fn scale_padic(&self, c: &PadicScalar) -> Self {
        Self::new(self.c_omega.mul_padic(c), self.c_phiomega.mul_padic(c))
    }

    /// Both coordinates lie in `Q_p`, i.e. the vector is in `D_p(E)` and not only in `D_p(E)(α)`.
    pub fn is_rational(&self) -> bool {
        self.c_omega.is_rational() && self.c_phiomega.is_rational()
    }

    /// Not a `Q_p`-multiple of `ω`: the `φ(ω)`-coordinate is certified nonzero.
    pub fn off_omega_line(&self) -> bool {
        !self.c_phiomega.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.c_omega.is_zero() && self.c_phiomega.is_zero()
    }

    pub fn agrees_with(&self, o: &Self) -> bool {
        self.sub(o).is_zero()
    }

    /// `φ` from `φ(φω) = (a_p/p)·φω − (1/p)·ω`, the relation `φ² − (a_p/p)·φ + 1/p = 0`.
    pub fn frobenius(&self) -> Result<Self, PadicError> {
        let ctx = self.ctx();
        let p = QuadExtScalar::from_i64(ctx, ctx.p as i64, prec_of(&self.c_phiomega));
        let c_omega = self.c_phiomega.neg().checked_div(&p)?;
        let c_phiomega = self.c_omega.add(&self.c_phiomega.mul_i64(ctx.a_p).checked_div(&p)?);
        Ok(Self::new(c_omega, c_phiomega))
    }
}

fn prec_of(x: &QuadExtScalar) -> i64 {
    x.x().rel_prec().or(x.y().rel_prec()).unwrap_or(crate::series::DEFAULT_PREC)
}

impl fmt::Display for DieudonneVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})·ω + ({})·φ(ω)", self.c_omega, self.c_phiomega)
    }
}

/// `s = [ω, φ(ω)]`; the transition from the canonical `{ω, xω}` is curve data and enters only through `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairingContext {
    s: QuadExtScalar,
}

impl PairingContext {
    pub fn new(s: QuadExtScalar) -> Result<Self, DieudonneError> {
        if s.is_zero() {
            return Err(DieudonneError::DegeneratePairing);
        }
        Ok(PairingContext { s })
    }

    pub fn unit(ctx: ExtContext, prec: i64) -> Self {
        PairingContext { s: QuadExtScalar::from_i64(ctx, 1, prec) }
    }

    pub fn s(&self) -> &QuadExtScalar {
        &self.s
    }
}

/// `[v, w] = (v_ω·w_φω − v_φω·w_ω)·s`.
pub fn pairing(v: &DieudonneVector, w: &DieudonneVector, ctx: &PairingContext) -> QuadExtScalar {
    v.c_omega.mul(&w.c_phiomega).sub(&v.c_phiomega.mul(&w.c_omega)).mul(&ctx.s)
}

/// `ν_A`, `ν_B` with `φ(ν_A) = ν_A/α`, `φ(ν_B) = ν_B/β`, `ν_A + ν_B = ω`.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenvectors {
    pub nu_a: DieudonneVector,
    pub nu_b: DieudonneVector,
    /// Set for ordinary roots: `α, β ∈ Q_p` and the eigenvectors are rational, outside the supersingular setting.
    pub warning: Option<String>,
}

/// `(ν_A, ν_B)ᵗ = (1/(β − α))·[[−α, p], [β, −p]]·(ω, φω)ᵗ`.
pub fn nu_eigenvectors(roots: &HeckeRootPair) -> Result<Eigenvectors, DieudonneError> {
    let (alpha, beta) = roots.ext_roots();
    let inv_gap = beta.sub(&alpha).inv()?;
    let p = QuadExtScalar::from_i64(roots.context(), roots.p as i64, roots.prec);
    let nu_a = DieudonneVector::new(alpha.neg().mul(&inv_gap), p.mul(&inv_gap));
    let nu_b = DieudonneVector::new(beta.mul(&inv_gap), p.neg().mul(&inv_gap));
    let warning = (roots.reduction_type() == ReductionType::Ordinary)
        .then(|| format!("a_p = {} is ordinary at p = {}; eigenvectors are computed but lie in D_p(E) itself", roots.a_p, roots.p));
    Ok(Eigenvectors { nu_a, nu_b, warning })
}

fn combine(z: &Mat2<QuadExtScalar>, row: usize, a: &DieudonneVector, b: &DieudonneVector) -> DieudonneVector {
    a.scale(&z[row][0]).add(&b.scale(&z[row][1]))
}

/// `(ν_♯, ν_♭)ᵗ = Z·(ν_A, ν_B)ᵗ`.
pub fn sharp_flat_basis(z: &Mat2<QuadExtScalar>, nu_a: &DieudonneVector, nu_b: &DieudonneVector) -> (DieudonneVector, DieudonneVector) {
    (combine(z, 0, nu_a, nu_b), combine(z, 1, nu_a, nu_b))
}

fn det(z: &Mat2<QuadExtScalar>) -> QuadExtScalar {
    z[0][0].mul(&z[1][1]).sub(&z[0][1].mul(&z[1][0]))
}

/// `((1 − 1/α)², (1 − 1/β)²)`.
fn euler_factors(roots: &HeckeRootPair) -> Result<[QuadExtScalar; 2], PadicError> {
    let (alpha, beta) = roots.ext_roots();
    let one = QuadExtScalar::from_i64(roots.context(), 1, roots.prec);
    let t = |r: &QuadExtScalar| -> Result<QuadExtScalar, PadicError> {
        let u = one.sub(&r.inv()?);
        Ok(u.mul(&u))
    };
    Ok([t(&alpha)?, t(&beta)?])
}

/// `(N_♯, N_♭) = (ν_B, −ν_A)·diag((1 − 1/α)², (1 − 1/β)²)·Z^(−1)·det Z`.
pub fn n_vectors(roots: &HeckeRootPair, z: &Mat2<QuadExtScalar>) -> Result<(DieudonneVector, DieudonneVector), DieudonneError> {
    if det(z).is_zero() {
        return Err(DieudonneError::SingularZ);
    }
    let ev = nu_eigenvectors(roots)?;
    n_vectors_from(roots, z, &ev.nu_a, &ev.nu_b)
}

fn n_vectors_from(
    roots: &HeckeRootPair,
    z: &Mat2<QuadExtScalar>,
    nu_a: &DieudonneVector,
    nu_b: &DieudonneVector,
) -> Result<(DieudonneVector, DieudonneVector), DieudonneError> {
    let [ta, tb] = euler_factors(roots)?;
    let left = nu_b.scale(&ta);
    let right = nu_a.neg().scale(&tb);
    // Z^(−1)·det Z = adj Z.
    let adj = [[z[1][1].clone(), z[0][1].neg()], [z[1][0].neg(), z[0][0].clone()]];
    let col = |j: usize| left.scale(&adj[0][j]).add(&right.scale(&adj[1][j]));
    Ok((col(0), col(1)))
}

fn rational(x: &QuadExtScalar, what: &'static str) -> Result<PadicScalar, DieudonneError> {
    if !x.is_rational() {
        return Err(DieudonneError::NotRational(what));
    }
    Ok(x.x().clone())
}

/// `c_♯ = [ω, N_♯]/[ν_♯, ν_♭]` and `c_♭ = [ω, N_♭]/[ν_♯, ν_♭]`, given a choice of `ω`, `ν_A`, `ν_B` and `s`.
pub fn regulator_constants_from(
    roots: &HeckeRootPair,
    z: &Mat2<QuadExtScalar>,
    omega: &DieudonneVector,
    nu_a: &DieudonneVector,
    nu_b: &DieudonneVector,
    ctx: &PairingContext,
) -> Result<(PadicScalar, PadicScalar), DieudonneError> {
    if det(z).is_zero() {
        return Err(DieudonneError::SingularZ);
    }
    let (n_sharp, n_flat) = n_vectors_from(roots, z, nu_a, nu_b)?;
    let (nu_sharp, nu_flat) = sharp_flat_basis(z, nu_a, nu_b);
    let d = pairing(&nu_sharp, &nu_flat, ctx);
    if d.is_zero() {
        return Err(DieudonneError::DegeneratePairing);
    }
    let c_sharp = pairing(omega, &n_sharp, ctx).checked_div(&d)?;
    let c_flat = pairing(omega, &n_flat, ctx).checked_div(&d)?;
    Ok((rational(&c_sharp, "c_♯")?, rational(&c_flat, "c_♭")?))
}

/// The constants in front of `Reg_♯`, `Reg_♭` in the tandem conjecture, with `s = 1`.
pub fn regulator_constants(a_p: i64, p: u64, prec: i64) -> Result<(PadicScalar, PadicScalar), DieudonneError> {
    regulator_constants_with(a_p, p, prec, FactorConvention::default())
}

pub fn regulator_constants_with(a_p: i64, p: u64, prec: i64, conv: FactorConvention) -> Result<(PadicScalar, PadicScalar), DieudonneError> {
    let roots = hecke_roots(a_p, p, prec)?;
    let z = z_at_zero(a_p, p, prec, conv)?;
    let ev = nu_eigenvectors(&roots)?;
    let ctx = roots.context();
    regulator_constants_from(&roots, &z, &DieudonneVector::omega(ctx, prec), &ev.nu_a, &ev.nu_b, &PairingContext::unit(ctx, prec))
}

/// `Reg_p^♮ = (k_♯·Reg_♯, k_♭·Reg_♭)`; the multipliers are the coefficients of the value vector at `T = 0`.
pub fn reg_natural(a_p: i64, p: u64, reg_sharp: &PadicScalar, reg_flat: &PadicScalar) -> [PadicScalar; 2] {
    let (k_sharp, k_flat) = values_at_zero_coefficients(a_p, p);
    [reg_sharp.mul_int(&k_sharp), reg_flat.mul_int(&k_flat)]
}

/// `Reg_{1/β}·ν_A + Reg_{1/α}·ν_B`.
pub fn bpr_regulator(
    reg_inv_beta: &QuadExtScalar,
    reg_inv_alpha: &QuadExtScalar,
    roots: &HeckeRootPair,
) -> Result<DieudonneVector, DieudonneError> {
    let ev = nu_eigenvectors(roots)?;
    Ok(ev.nu_a.scale(reg_inv_beta).add(&ev.nu_b.scale(reg_inv_alpha)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrSeries {
    pub coeffs: Vec<DieudonneVector>,
    /// Indices of coefficients with a coordinate outside `Q_p`.
    pub irrational: Vec<usize>,
}

impl PrSeries {
    pub fn rational(&self) -> bool {
        self.irrational.is_empty()
    }

    pub fn into_checked(self) -> Result<Self, DieudonneError> {
        if self.rational() {
            Ok(self)
        } else {
            Err(DieudonneError::Rationality(self.irrational))
        }
    }
}

/// `L_α[k]·ν_A + L_β[k]·ν_B` coefficientwise, with the conjugation-invariance of each coefficient checked.
pub fn pr_series(l_alpha: &ExtSeries, l_beta: &ExtSeries, roots: &HeckeRootPair) -> Result<PrSeries, DieudonneError> {
    let ctx = roots.context();
    if l_alpha.ctx() != ctx || l_beta.ctx() != ctx {
        return Err(DieudonneError::ContextMismatch);
    }
    let ev = nu_eigenvectors(roots)?;
    let coeffs: Vec<DieudonneVector> = l_alpha
        .coeffs()
        .iter()
        .zip(l_beta.coeffs())
        .map(|(a, b)| ev.nu_a.scale(a).add(&ev.nu_b.scale(b)))
        .collect();
    let irrational = coeffs.iter().enumerate().filter(|(_, v)| !v.is_rational()).map(|(k, _)| k).collect();
    Ok(PrSeries { coeffs, irrational })
}
