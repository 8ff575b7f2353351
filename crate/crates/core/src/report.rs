//! Verdicts at `T = 0`: the rank criterion, the extra-zero flag and the tandem consistency report.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::log_transform::{interpolation_sign, values_at_zero_coefficients, LogError, LogMatrix};
use crate::padic::{hecke_roots, rational_scalar, PadicError, PadicScalar, ReductionType, Valuation, Valued};
use crate::series::{OrderResult, PadicSeries};
use crate::vanishing::{pair_order, Point, VanishingError};
use crate::dieudonne::reg_natural;

pub const HYPOTHESES: &str = "conditional on property (*) and finiteness of Ш(E/Q)[p^∞]";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReportError {
    #[error("a_p = {a_p} is ordinary at p = {p}; supersingular reduction is required")]
    Ordinary { a_p: i64, p: u64 },
    #[error("a_p = {a_p} is supersingular at p = {p}; ordinary reduction is required")]
    Supersingular { a_p: i64, p: u64 },
    #[error("both L_♯ and L_♭ vanish to working precision")]
    ZeroPair,
    #[error("invalid arithmetic input: {0}")]
    Input(String),
    #[error("values at T = 0 match neither sign of the interpolation targets for a_p = {a_p}, p = {p}")]
    NoConventionSign { a_p: i64, p: u64 },
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error(transparent)]
    Log(#[from] LogError),
    #[error(transparent)]
    Vanishing(#[from] VanishingError),
}

fn require_supersingular(a_p: i64, p: u64) -> Result<(), ReportError> {
    match hecke_roots(a_p, p, 4)?.reduction_type() {
        ReductionType::Supersingular => Ok(()),
        ReductionType::Ordinary => Err(ReportError::Ordinary { a_p, p }),
    }
}

/// The rank-zero value of `L_♯/L_♭` at `T = 0`: `(−a²+2a+p−1)/(2−a)` for odd `p`,
/// `(−a³+2a²+3a−4)/(−a²+2a+1)` for `p = 2`.
pub fn rank_threshold(a_p: i64, p: u64) -> Result<BigRational, ReportError> {
    require_supersingular(a_p, p)?;
    let a = BigInt::from(a_p);
    let (num, den): (BigInt, BigInt) = if p == 2 {
        (-&a * &a * &a + 2 * &a * &a + 3 * &a - 4, -&a * &a + 2 * &a + 1)
    } else {
        (-&a * &a + 2 * &a + BigInt::from(p) - 1, 2 - a)
    };
    assert!(!den.is_zero(), "threshold denominator vanishes at a_p = {a_p}, p = {p}");
    Ok(BigRational::new(num, den))
}

/// A point of `P¹(Q_p)`.
#[derive(Debug, Clone, PartialEq)]
pub enum ProjectiveValue {
    Finite(PadicScalar),
    Infinity,
}

impl fmt::Display for ProjectiveValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjectiveValue::Finite(x) => write!(f, "{x}"),
            ProjectiveValue::Infinity => write!(f, "∞"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankVerdict {
    RankZeroConsistent,
    RankPositive,
    Undetermined,
}

impl fmt::Display for RankVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RankVerdict::RankZeroConsistent => "rank_zero_consistent",
            RankVerdict::RankPositive => "rank_positive",
            RankVerdict::Undetermined => "undetermined",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankCriterion {
    pub orders: (OrderResult, OrderResult),
    /// `(L_♯/L_♭)(0)` continued through common zeros; `None` when precision blocks it.
    pub value: Option<ProjectiveValue>,
    pub threshold: BigRational,
    pub verdict: RankVerdict,
    /// Both functions vanish at `T = 0`.
    pub common_zero: bool,
    pub alarm: Option<String>,
    pub hypotheses: &'static str,
}

fn projective_value(sharp: &PadicSeries, flat: &PadicSeries, o_s: OrderResult, o_f: OrderResult) -> Result<Option<ProjectiveValue>, ReportError> {
    let zero = || ProjectiveValue::Finite(PadicScalar::zero(sharp.p()));
    Ok(match (o_s.exact(), o_f.exact()) {
        (Some(a), Some(b)) if a == b => Some(ProjectiveValue::Finite(sharp.coeff(a).checked_div(flat.coeff(a))?)),
        (Some(a), Some(b)) if a > b => Some(zero()),
        (Some(_), Some(_)) => Some(ProjectiveValue::Infinity),
        (Some(a), None) if o_f.lower_bound() > a => Some(ProjectiveValue::Infinity),
        (None, Some(b)) if o_s.lower_bound() > b => Some(zero()),
        _ => None,
    })
}

/// Compares `(L_♯/L_♭)(0)` with [`rank_threshold`].
pub fn rank_criterion(sharp: &PadicSeries, flat: &PadicSeries, a_p: i64, p: u64) -> Result<RankCriterion, ReportError> {
    let threshold = rank_threshold(a_p, p)?;
    if sharp.min_valuation().is_none() && flat.min_valuation().is_none() {
        return Err(ReportError::ZeroPair);
    }
    let (o_s, o_f) = (sharp.order_at_zero(), flat.order_at_zero());
    let value = projective_value(sharp, flat, o_s, o_f)?;
    let prec = sharp.prec_p().min(flat.prec_p()).max(1);
    let verdict = match &value {
        None => RankVerdict::Undetermined,
        Some(ProjectiveValue::Infinity) => RankVerdict::RankPositive,
        Some(ProjectiveValue::Finite(x)) => {
            let diff = x.sub(&rational_scalar(&threshold, p, prec)?);
            if !diff.is_zero() {
                RankVerdict::RankPositive
            } else if diff.abs_prec().map_or(true, |a| a >= 1) {
                RankVerdict::RankZeroConsistent
            } else {
                RankVerdict::Undetermined
            }
        }
    };
    let common_zero = o_s.lower_bound() >= 1 && o_f.lower_bound() >= 1;
    let alarm = (verdict == RankVerdict::RankZeroConsistent && common_zero).then(|| {
        "the ratio matches the rank-zero threshold although L_♯ and L_♭ both vanish at T = 0; at rank zero both must be nonzero there".to_string()
    });
    Ok(RankCriterion { orders: (o_s, o_f), value, threshold, verdict, common_zero, alarm, hypotheses: HYPOTHESES })
}

/// At ordinary `p`, whether the `♭`-coefficient of the value vector at `T = 0` vanishes:
/// `2 − a_p` for odd `p`, `−a_2² + 2a_2 + 1` (never zero over the integers) for `p = 2`.
pub fn extra_zero_flag(a_p: i64, p: u64) -> Result<bool, ReportError> {
    if hecke_roots(a_p, p, 4)?.reduction_type() == ReductionType::Supersingular {
        return Err(ReportError::Supersingular { a_p, p });
    }
    Ok(values_at_zero_coefficients(a_p, p).1.is_zero())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tri {
    True,
    False,
    Unknown,
}

impl Tri {
    fn from_bool(b: bool) -> Tri {
        if b {
            Tri::True
        } else {
            Tri::False
        }
    }
}

impl fmt::Display for Tri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tri::True => "true",
            Tri::False => "false",
            Tri::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypotheses {
    pub property_star_assumed: bool,
    pub sha_p_finite_assumed: bool,
}

impl Default for Hypotheses {
    fn default() -> Self {
        Hypotheses { property_star_assumed: true, sha_p_finite_assumed: true }
    }
}

/// Right-hand-side data of the tandem conjecture, all supplied by the caller.
#[derive(Debug, Clone, PartialEq)]
pub struct ArithmeticInputs {
    pub rank: u32,
    pub tamagawa_product: BigInt,
    pub sha_order: BigInt,
    pub torsion_order: BigInt,
    pub reg_sharp: PadicScalar,
    pub reg_flat: PadicScalar,
    pub hypotheses: Hypotheses,
}

impl ArithmeticInputs {
    pub fn validate(&self) -> Result<(), ReportError> {
        for (name, v) in [("tamagawa_product", &self.tamagawa_product), ("sha_order", &self.sha_order), ("torsion_order", &self.torsion_order)] {
            if !v.is_positive() {
                return Err(ReportError::Input(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// `∏c_v · #Ш / #E(Q)_tors²`.
    pub fn factor(&self) -> BigRational {
        BigRational::new(&self.tamagawa_product * &self.sha_order, &self.torsion_order * &self.torsion_order)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConjectureReport {
    pub r_p_natural: OrderResult,
    /// Common order of `(L_α, L_β)` at `T = 0`.
    pub r_an: OrderResult,
    pub r_an_components: (OrderResult, OrderResult),
    pub kato_ok: Tri,
    /// Part 1: `r_p^♮ = r`.
    pub rank_matches: Tri,
    pub leading_vector: Option<[PadicScalar; 2]>,
    pub rhs_vector: [PadicScalar; 2],
    pub difference_valuation: Option<[Valuation; 2]>,
    pub rank_criterion: RankCriterion,
    pub extra_zero_flag: bool,
    pub convention_sign: i64,
    pub hypotheses: Hypotheses,
    pub banner: &'static str,
    pub alarms: Vec<String>,
}

fn at_least(o: OrderResult, r: u32) -> Tri {
    let r = r as usize;
    match o {
        OrderResult::Exact(k) => Tri::from_bool(k >= r),
        other if other.lower_bound() >= r => Tri::True,
        _ => Tri::Unknown,
    }
}

/// Both sides of the tandem conjecture at `T = 0`, compared componentwise.
pub fn tandem_check(
    sharp: &PadicSeries,
    flat: &PadicSeries,
    inputs: &ArithmeticInputs,
    a_p: i64,
    p: u64,
    log: &LogMatrix,
) -> Result<ConjectureReport, ReportError> {
    require_supersingular(a_p, p)?;
    inputs.validate()?;
    if log.a_p() != a_p || log.p() != p {
        return Err(LogError::Mismatch(format!("matrix built for a_p = {}, p = {}", log.a_p(), log.p())).into());
    }
    if sharp.min_valuation().is_none() && flat.min_valuation().is_none() {
        return Err(ReportError::ZeroPair);
    }
    let mut alarms = Vec::new();
    let prec = sharp.prec_p().min(flat.prec_p()).max(1);
    let r_p_natural = pair_order(sharp, flat, Point::Zero)?;
    let (la, lb) = log.compose(sharp, flat)?;
    let r_an_components = (la.order_at_zero(), lb.order_at_zero());
    let r_an = r_an_components.0.min(r_an_components.1);
    if r_an_components.0.is_exact() && r_an_components.1.is_exact() && r_an_components.0 != r_an_components.1 {
        alarms.push(format!("L_α and L_β have different orders at T = 0 ({} and {})", r_an_components.0, r_an_components.1));
    }
    let kato_ok = at_least(r_an, inputs.rank);
    if kato_ok == Tri::False {
        alarms.push(format!("r_an = {r_an} is below the rank {}; Kato's bound is violated, so the inputs are inconsistent", inputs.rank));
    }
    let rank_matches = match r_p_natural.exact() {
        Some(k) => Tri::from_bool(k == inputs.rank as usize),
        None if r_p_natural.lower_bound() > inputs.rank as usize => Tri::False,
        None => Tri::Unknown,
    };
    let leading_vector = r_p_natural.exact().map(|k| [sharp.coeff(k).clone(), flat.coeff(k).clone()]);
    let convention_sign = interpolation_sign(a_p, p, prec, log.convention())?.ok_or(ReportError::NoConventionSign { a_p, p })?;
    let factor = rational_scalar(&(inputs.factor() * BigInt::from(convention_sign)), p, prec)?;
    let natural = reg_natural(a_p, p, &inputs.reg_sharp, &inputs.reg_flat);
    let rhs_vector = [natural[0].mul(&factor), natural[1].mul(&factor)];
    let difference_valuation = leading_vector.as_ref().map(|l| [0, 1].map(|i| l[i].sub(&rhs_vector[i]).valuation()));
    let rank_criterion = rank_criterion(sharp, flat, a_p, p)?;
    if let Some(a) = &rank_criterion.alarm {
        alarms.push(a.clone());
    }
    Ok(ConjectureReport {
        r_p_natural,
        r_an,
        r_an_components,
        kato_ok,
        rank_matches,
        leading_vector,
        rhs_vector,
        difference_valuation,
        rank_criterion,
        extra_zero_flag: values_at_zero_coefficients(a_p, p).1.is_zero(),
        convention_sign,
        hypotheses: inputs.hypotheses,
        banner: HYPOTHESES,
        alarms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::log_transform::{lift_to_working, values_at_zero};
    use crate::series::RingTag;
    use proptest::prelude::*;
    use std::sync::OnceLock;

    const PREC: i64 = 20;

    const SUPERSINGULAR: [(i64, u64); 10] = [(-2, 2), (0, 2), (2, 2), (-3, 3), (0, 3), (3, 3), (0, 5), (0, 7), (0, 11), (0, 13)];

    fn zp(p: u64, v: &[i64], trunc: usize) -> PadicSeries {
        let ints: Vec<BigInt> = v.iter().map(|&n| BigInt::from(n)).collect();
        PadicSeries::from_integers(p, RingTag::Zp, &ints, PREC, trunc)
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    /// Every `a_p` within the Hasse bound `a² ≤ 4p`.
    fn hasse_range(p: u64) -> impl Iterator<Item = i64> {
        let b = ((4 * p) as f64).sqrt() as i64 + 1;
        (-b..=b).filter(move |a| a * a <= 4 * p as i64)
    }

    fn primes() -> [u64; 6] {
        [2, 3, 5, 7, 11, 13]
    }

    #[test]
    fn supersingular_enumeration() {
        let found: Vec<(i64, u64)> = primes().into_iter().flat_map(|p| hasse_range(p).filter(move |a| a % p as i64 == 0).map(move |a| (a, p))).collect();
        let mut expected = SUPERSINGULAR.to_vec();
        expected.sort_by_key(|&(a, p)| (p, a));
        assert_eq!(found, expected);
    }

    #[test]
    fn threshold_is_ratio_of_values_at_zero() {
        for (a, p) in SUPERSINGULAR {
            let (u, w) = values_at_zero_coefficients(a, p);
            assert!(!w.is_zero(), "({a},{p})");
            assert_eq!(rank_threshold(a, p).unwrap(), BigRational::new(u, w), "({a},{p})");
        }
        assert_eq!(rank_threshold(0, 5).unwrap(), q(2, 1));
        assert_eq!(rank_threshold(0, 2).unwrap(), q(-4, 1));
        assert_eq!(rank_threshold(1, 5), Err(ReportError::Ordinary { a_p: 1, p: 5 }));
    }

    #[test]
    fn rank_criterion_examples() {
        let c = 7;
        let r = rank_criterion(&zp(5, &[4 * c, 1], 10), &zp(5, &[2 * c, 3], 10), 0, 5).unwrap();
        assert_eq!(r.verdict, RankVerdict::RankZeroConsistent);
        assert!(r.alarm.is_none() && r.hypotheses == HYPOTHESES);
        let r = rank_criterion(&zp(2, &[-4, 1], 10), &zp(2, &[1], 10), 0, 2).unwrap();
        assert_eq!(r.verdict, RankVerdict::RankZeroConsistent);
        let r = rank_criterion(&zp(5, &[3, 1], 10), &zp(5, &[0, 1], 10), 0, 5).unwrap();
        assert_eq!((r.verdict, r.value), (RankVerdict::RankPositive, Some(ProjectiveValue::Infinity)));
        let r = rank_criterion(&zp(5, &[3], 10), &zp(5, &[1], 10), 0, 5).unwrap();
        assert_eq!(r.verdict, RankVerdict::RankPositive);
        assert_eq!(rank_criterion(&zp(5, &[], 10), &zp(5, &[], 10), 0, 5).unwrap_err(), ReportError::ZeroPair);
    }

    #[test]
    fn rank_criterion_precision_blocked() {
        let tiny = PadicScalar::from_i64(1, 5, 30).shift(25);
        let flat = PadicSeries::new(5, RingTag::Zp, vec![tiny, PadicScalar::from_i64(1, 5, PREC)], PREC).unwrap();
        let r = rank_criterion(&zp(5, &[1], 2), &flat, 0, 5).unwrap();
        assert_eq!((r.verdict, r.value), (RankVerdict::Undetermined, None));
    }

    #[test]
    fn rank_criterion_alarm_on_common_zero() {
        let r = rank_criterion(&zp2(5, &[0, 4]), &zp2(5, &[0, 2]), 0, 5).unwrap();
        assert_eq!(r.verdict, RankVerdict::RankZeroConsistent);
        assert!(r.common_zero && r.alarm.is_some());
    }

    fn zp2(p: u64, v: &[i64]) -> PadicSeries {
        zp(p, v, 10)
    }

    #[test]
    fn extra_zero_flag_examples() {
        assert_eq!(extra_zero_flag(2, 5), Ok(true));
        assert_eq!(extra_zero_flag(1, 5), Ok(false));
        assert_eq!(extra_zero_flag(1, 2), Ok(false));
        assert_eq!(extra_zero_flag(0, 5), Err(ReportError::Supersingular { a_p: 0, p: 5 }));
        for p in primes() {
            for a in hasse_range(p).filter(|a| a % p as i64 != 0) {
                assert_eq!(extra_zero_flag(a, p).unwrap(), a == 2 && p != 2, "({a},{p})");
            }
        }
    }

    fn shared_log(a: i64, p: u64) -> &'static LogMatrix {
        static LOGS: OnceLock<Vec<((i64, u64), LogMatrix)>> = OnceLock::new();
        let logs = LOGS.get_or_init(|| [(0, 5), (0, 3), (2, 2)].into_iter().map(|(a, p)| ((a, p), LogMatrix::build(a, p, 15, 40).unwrap())).collect());
        &logs.iter().find(|(k, _)| *k == (a, p)).expect("prebuilt").1
    }

    fn inputs(p: u64, rank: u32, tam: i64, sha: i64, tors: i64) -> ArithmeticInputs {
        ArithmeticInputs {
            rank,
            tamagawa_product: BigInt::from(tam),
            sha_order: BigInt::from(sha),
            torsion_order: BigInt::from(tors),
            reg_sharp: PadicScalar::one(p, PREC),
            reg_flat: PadicScalar::one(p, PREC),
            hypotheses: Hypotheses::default(),
        }
    }

    #[test]
    fn tandem_rank_zero_by_construction() {
        for (a, p) in [(0i64, 5u64), (0, 3), (2, 2)] {
            let log = shared_log(a, p);
            let inp = inputs(p, 0, 2, 1, 2);
            let ell = rational_scalar(&inp.factor(), p, PREC).unwrap();
            let v = values_at_zero(a, p, &ell);
            let series = |c: &PadicScalar, tail: i64| {
                let mut coeffs = vec![c.clone(), PadicScalar::from_i64(tail, p, PREC)];
                coeffs.resize(40, PadicScalar::zero(p));
                lift_to_working(&PadicSeries::new(p, RingTag::Qp, coeffs, PREC).unwrap(), log)
            };
            let (s, f) = (series(&v[0], 3), series(&v[1], 1));
            let rep = tandem_check(&s, &f, &inp, a, p, log).unwrap();
            assert_eq!(rep.r_p_natural, OrderResult::Exact(0));
            assert_eq!(rep.r_an, OrderResult::Exact(0));
            let lead = rep.leading_vector.clone().unwrap();
            assert!(lead[0].agrees_with(&rep.rhs_vector[0]) && lead[1].agrees_with(&rep.rhs_vector[1]), "({a},{p})");
            assert!(rep.difference_valuation.unwrap().iter().all(|v| v.is_infinite()));
            assert_eq!(rep.rank_criterion.verdict, RankVerdict::RankZeroConsistent);
            assert_eq!((rep.kato_ok, rep.rank_matches, rep.convention_sign), (Tri::True, Tri::True, 1));
            assert!(rep.alarms.is_empty() && !rep.extra_zero_flag);
        }
    }

    #[test]
    fn tandem_planted_rank_one_and_kato_alarm() {
        let log = shared_log(0, 5);
        let lift = |v: &[i64]| lift_to_working(&zp(5, v, 40), log);
        let rep = tandem_check(&lift(&[0, 3, 1]), &lift(&[0, 1, 2]), &inputs(5, 1, 1, 1, 1), 0, 5, log).unwrap();
        assert_eq!((rep.rank_matches, rep.kato_ok), (Tri::True, Tri::True));
        assert_eq!(rep.r_an, OrderResult::Exact(1));
        let rep = tandem_check(&lift(&[3, 1]), &lift(&[1, 2]), &inputs(5, 2, 1, 1, 1), 0, 5, log).unwrap();
        assert_eq!((rep.r_p_natural, rep.kato_ok, rep.rank_matches), (OrderResult::Exact(0), Tri::False, Tri::False));
        assert!(rep.alarms.iter().any(|a| a.contains("Kato")));
    }

    #[test]
    fn tandem_rejects_bad_inputs() {
        let log = shared_log(0, 5);
        let s = zp(5, &[1], 40);
        let bad = inputs(5, 0, 0, 1, 1);
        assert!(matches!(tandem_check(&s, &s, &bad, 0, 5, log), Err(ReportError::Input(_))));
        let zero = zp(5, &[], 40);
        assert_eq!(tandem_check(&zero, &zero, &inputs(5, 0, 1, 1, 1), 0, 5, log).unwrap_err(), ReportError::ZeroPair);
        assert!(matches!(tandem_check(&s, &s, &inputs(3, 0, 1, 1, 1), 0, 3, log), Err(ReportError::Log(_))));
    }

    proptest! {
        /// At a rank-zero verdict without alarm, both functions are certified nonzero at `T = 0`.
        #[test]
        fn rank_zero_verdict_means_both_nonzero(
            idx in 0usize..SUPERSINGULAR.len(),
            (k1, k2) in (0usize..3, 0usize..3),
            c in -30i64..30,
            tail in prop::collection::vec(-30i64..30, 2),
            matched in any::<bool>(),
        ) {
            let (a, p) = SUPERSINGULAR[idx];
            let (u, w) = values_at_zero_coefficients(a, p);
            let (u, w) = if matched { (u, w) } else { (u + 1, w) };
            let lead = |x: &BigInt, k: usize, t: i64| {
                let mut v = vec![BigInt::zero(); k];
                v.push(x * c);
                v.push(BigInt::from(t));
                PadicSeries::from_integers(p, RingTag::Zp, &v, PREC, 12)
            };
            let (s, f) = (lead(&u, k1, tail[0]), lead(&w, k2, tail[1]));
            prop_assume!(s.min_valuation().is_some() || f.min_valuation().is_some());
            let r = rank_criterion(&s, &f, a, p).unwrap();
            if r.verdict == RankVerdict::RankZeroConsistent && r.alarm.is_none() {
                prop_assert_eq!(s.order_at_zero(), OrderResult::Exact(0));
                prop_assert_eq!(f.order_at_zero(), OrderResult::Exact(0));
            }
            if c != 0 && k1 == 0 && k2 == 0 && matched {
                prop_assert_eq!(r.verdict, RankVerdict::RankZeroConsistent);
            }
        }
    }
}
