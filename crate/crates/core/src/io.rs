//! JSON interchange for series and curve data.
//!
//! A scalar is `{"val", "unit", "prec"}`: `unit` holds the little-endian base-`p` digits of the
//! unit part and `prec` counts them. Zero has `"val": "inf"` and empty digits, with `prec` its
//! absolute precision, or `"inf"` for the exact zero. An extension scalar `x + y·α` is `{"x", "y"}`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::curve::Weierstrass;
use crate::padic::{ExtContext, PadicError, PadicScalar, QuadExtScalar};
use crate::series::{ExtSeries, PadicSeries, RingTag, SeriesError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("ring tag {ring:?} does not match the scalar shape at coefficient {index}")]
    Shape { ring: RingTag, index: usize },
    #[error("coefficient {index}: {msg}")]
    Scalar { index: usize, msg: String },
    #[error("trunc_T = {declared} but {found} coefficients are present")]
    Trunc { declared: usize, found: usize },
    #[error("expected a {expected}")]
    Kind { expected: &'static str },
    #[error("bad rational {0:?}")]
    Rational(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// An integer or `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    Finite(i64),
    Inf,
}

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Bound::Finite(n) => s.serialize_i64(*n),
            Bound::Inf => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Bound {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Bound;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or \"inf\"")
            }
            fn visit_i64<E: de::Error>(self, n: i64) -> Result<Bound, E> {
                Ok(Bound::Finite(n))
            }
            fn visit_u64<E: de::Error>(self, n: u64) -> Result<Bound, E> {
                i64::try_from(n).map(Bound::Finite).map_err(E::custom)
            }
            fn visit_str<E: de::Error>(self, s: &str) -> Result<Bound, E> {
                if s == "inf" {
                    Ok(Bound::Inf)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(s), &self))
                }
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalarJson {
    pub val: Bound,
    pub unit: Vec<u64>,
    pub prec: Bound,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffJson {
    Ext { x: ScalarJson, y: ScalarJson },
    Plain(ScalarJson),
}

impl ScalarJson {
    pub fn from_scalar(x: &PadicScalar) -> Self {
        match x.val() {
            None => ScalarJson { val: Bound::Inf, unit: Vec::new(), prec: x.abs_prec().map_or(Bound::Inf, Bound::Finite) },
            Some(v) => ScalarJson { val: Bound::Finite(v), unit: x.digits(), prec: Bound::Finite(x.rel_prec().unwrap()) },
        }
    }

    pub fn to_scalar(&self, p: u64) -> Result<PadicScalar, String> {
        match (self.val, self.prec) {
            (Bound::Inf, prec) => {
                if !self.unit.is_empty() {
                    return Err("zero with nonempty digits".into());
                }
                Ok(match prec {
                    Bound::Inf => PadicScalar::zero(p),
                    Bound::Finite(abs) => PadicScalar::zero_to(p, abs),
                })
            }
            (Bound::Finite(_), Bound::Inf) => Err("a nonzero scalar needs finite precision".into()),
            (Bound::Finite(v), Bound::Finite(prec)) => {
                if prec != self.unit.len() as i64 {
                    return Err(format!("prec {prec} but {} digits", self.unit.len()));
                }
                PadicScalar::from_digits(p, v, &self.unit).map_err(|e: PadicError| e.to_string())
            }
        }
    }
}

/// Either coefficient ring, as read from a file.
#[derive(Debug, Clone, PartialEq)]
pub enum AnySeries {
    Padic(PadicSeries),
    Ext(ExtSeries),
}

impl AnySeries {
    pub fn p(&self) -> u64 {
        match self {
            AnySeries::Padic(s) => s.p(),
            AnySeries::Ext(s) => s.p(),
        }
    }

    pub fn ring(&self) -> RingTag {
        match self {
            AnySeries::Padic(s) => s.ring(),
            AnySeries::Ext(s) => s.ring(),
        }
    }

    pub fn into_padic(self) -> Result<PadicSeries, IoError> {
        match self {
            AnySeries::Padic(s) => Ok(s),
            AnySeries::Ext(_) => Err(IoError::Kind { expected: "series over Z_p or Q_p" }),
        }
    }

    pub fn into_ext(self) -> Result<ExtSeries, IoError> {
        match self {
            AnySeries::Ext(s) => Ok(s),
            AnySeries::Padic(_) => Err(IoError::Kind { expected: "series over Q_p(α)" }),
        }
    }
}

/// The on-disk series document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesJson {
    pub p: u64,
    pub ring: RingTag,
    pub a_p: i64,
    pub prec_p: i64,
    #[serde(rename = "trunc_T")]
    pub trunc_t: usize,
    pub coeffs: Vec<CoeffJson>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesFile {
    pub a_p: i64,
    pub series: AnySeries,
}

impl SeriesFile {
    pub fn padic(a_p: i64, series: PadicSeries) -> Self {
        SeriesFile { a_p, series: AnySeries::Padic(series) }
    }

    pub fn ext(series: ExtSeries) -> Self {
        SeriesFile { a_p: series.ctx().a_p, series: AnySeries::Ext(series) }
    }

    pub fn to_json(&self) -> SeriesJson {
        let (p, ring, prec_p, coeffs) = match &self.series {
            AnySeries::Padic(s) => (s.p(), s.ring(), s.prec_p(), s.coeffs().iter().map(|c| CoeffJson::Plain(ScalarJson::from_scalar(c))).collect::<Vec<_>>()),
            AnySeries::Ext(s) => (
                s.p(),
                s.ring(),
                s.prec_p(),
                s.coeffs().iter().map(|c| CoeffJson::Ext { x: ScalarJson::from_scalar(c.x()), y: ScalarJson::from_scalar(c.y()) }).collect(),
            ),
        };
        SeriesJson { p, ring, a_p: self.a_p, prec_p, trunc_t: coeffs.len(), coeffs }
    }

    pub fn from_json(j: &SeriesJson) -> Result<Self, IoError> {
        if j.trunc_t != j.coeffs.len() {
            return Err(IoError::Trunc { declared: j.trunc_t, found: j.coeffs.len() });
        }
        let p = j.p;
        let scalar = |s: &ScalarJson, index: usize| s.to_scalar(p).map_err(|msg| IoError::Scalar { index, msg });
        let series = if j.ring == RingTag::QpAlpha {
            let ctx = ExtContext::new(p, j.a_p);
            let coeffs = j
                .coeffs
                .iter()
                .enumerate()
                .map(|(index, c)| match c {
                    CoeffJson::Ext { x, y } => Ok(QuadExtScalar::new(ctx, scalar(x, index)?, scalar(y, index)?)),
                    CoeffJson::Plain(_) => Err(IoError::Shape { ring: j.ring, index }),
                })
                .collect::<Result<Vec<_>, _>>()?;
            AnySeries::Ext(ExtSeries::new(ctx, j.ring, coeffs, j.prec_p)?)
        } else {
            let coeffs = j
                .coeffs
                .iter()
                .enumerate()
                .map(|(index, c)| match c {
                    CoeffJson::Plain(s) => scalar(s, index),
                    CoeffJson::Ext { .. } => Err(IoError::Shape { ring: j.ring, index }),
                })
                .collect::<Result<Vec<_>, _>>()?;
            AnySeries::Padic(PadicSeries::new(p, j.ring, coeffs, j.prec_p)?)
        };
        Ok(SeriesFile { a_p: j.a_p, series })
    }

    pub fn to_string_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("series JSON serializes")
    }

    pub fn parse(text: &str) -> Result<Self, IoError> {
        Self::from_json(&serde_json::from_str(text)?)
    }
}

/// A pair file is a JSON array of two series documents.
pub fn pair_to_string(a: &SeriesFile, b: &SeriesFile) -> String {
    serde_json::to_string_pretty(&[a.to_json(), b.to_json()]).expect("series JSON serializes")
}

pub fn parse_pair(text: &str) -> Result<(SeriesFile, SeriesFile), IoError> {
    let docs: Vec<SeriesJson> = serde_json::from_str(text)?;
    match docs.as_slice() {
        [a, b] => Ok((SeriesFile::from_json(a)?, SeriesFile::from_json(b)?)),
        _ => Err(IoError::Kind { expected: "JSON array of exactly two series" }),
    }
}

/// `"n"` or `"n/d"`.
pub fn parse_rational(s: &str) -> Result<BigRational, IoError> {
    let bad = || IoError::Rational(s.to_string());
    let (n, d) = match s.trim().split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d == BigInt::from(0) {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

/// Curve metadata for the command line; `a_p` is counted when absent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveData {
    pub label: String,
    #[serde(default)]
    pub a1: i64,
    #[serde(default)]
    pub a2: i64,
    #[serde(default)]
    pub a3: i64,
    #[serde(default)]
    pub a4: i64,
    #[serde(default)]
    pub a6: i64,
    pub p: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_p: Option<i64>,
    /// `L(E,1)/Ω_E` as `"n/d"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ell: Option<String>,
    /// Path of a pair file holding `(L_♯, L_♭)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signed_pair: Option<String>,
    /// Path of a pair file holding `(L_α, L_β)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root_pair: Option<String>,
}

impl CurveData {
    pub fn weierstrass(&self) -> Weierstrass {
        Weierstrass([self.a1, self.a2, self.a3, self.a4, self.a6])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::Valued;
    use proptest::prelude::*;

    fn scalar_strategy(p: u64) -> impl Strategy<Value = PadicScalar> {
        prop_oneof![
            Just(PadicScalar::zero(p)),
            (-5i64..30).prop_map(move |a| PadicScalar::zero_to(p, a)),
            (-6i64..6, prop::collection::vec(0..p, 1..25)).prop_map(move |(v, mut d)| {
                if d[0] == 0 {
                    d[0] = 1;
                }
                PadicScalar::from_digits(p, v, &d).unwrap()
            }),
        ]
    }

    fn series_strategy() -> impl Strategy<Value = SeriesFile> {
        (prop::sample::select(vec![(0i64, 2u64), (2, 2), (0, 3), (3, 3), (0, 5), (1, 5), (0, 7)]), 0usize..3, 1i64..25, 0usize..12).prop_flat_map(|((a, p), ring, prec, n)| {
            let plain = prop::collection::vec(scalar_strategy(p), n);
            let ext = prop::collection::vec((scalar_strategy(p), scalar_strategy(p)), n);
            (plain, ext).prop_map(move |(plain, ext)| match ring {
                2 => {
                    let ctx = ExtContext::new(p, a);
                    let coeffs = ext.into_iter().map(|(x, y)| QuadExtScalar::new(ctx, x, y)).collect();
                    SeriesFile::ext(ExtSeries::new(ctx, RingTag::QpAlpha, coeffs, prec).unwrap())
                }
                1 => SeriesFile::padic(a, PadicSeries::new(p, RingTag::Qp, plain, prec).unwrap()),
                _ => {
                    let coeffs = plain.into_iter().map(|c| if c.valuation() < crate::padic::Valuation::int(0) { PadicScalar::zero(p) } else { c }).collect();
                    SeriesFile::padic(a, PadicSeries::new(p, RingTag::Zp, coeffs, prec).unwrap())
                }
            })
        })
    }

    proptest! {
        #[test]
        fn series_round_trip(f in series_strategy()) {
            let text = f.to_string_pretty();
            prop_assert_eq!(SeriesFile::parse(&text).unwrap(), f.clone());
            prop_assert_eq!(SeriesFile::parse(&text).unwrap().to_string_pretty(), text);
        }

        #[test]
        fn pair_round_trip(a in series_strategy(), b in series_strategy()) {
            let (x, y) = parse_pair(&pair_to_string(&a, &b)).unwrap();
            prop_assert_eq!((x, y), (a, b));
        }

        #[test]
        fn scalar_round_trip(x in scalar_strategy(7)) {
            let j = serde_json::to_string(&ScalarJson::from_scalar(&x)).unwrap();
            let back: ScalarJson = serde_json::from_str(&j).unwrap();
            prop_assert_eq!(back.to_scalar(7).unwrap(), x);
        }
    }

    #[test]
    fn literal_format() {
        let s = PadicSeries::from_integers(5, RingTag::Zp, &[BigInt::from(7), BigInt::from(0), BigInt::from(-1)], 3, 3);
        let j = serde_json::to_value(SeriesFile::padic(0, s).to_json()).unwrap();
        let expected = serde_json::json!({
            "p": 5, "ring": "Zp", "a_p": 0, "prec_p": 3, "trunc_T": 3,
            "coeffs": [
                {"val": 0, "unit": [2, 1, 0], "prec": 3},
                {"val": "inf", "unit": [], "prec": "inf"},
                {"val": 0, "unit": [4, 4, 4], "prec": 3}
            ]
        });
        assert_eq!(j, expected);
    }

    #[test]
    fn rejects_malformed() {
        let base = |coeffs: &str, ring: &str, trunc: usize| format!(r#"{{"p":5,"ring":"{ring}","a_p":0,"prec_p":3,"trunc_T":{trunc},"coeffs":[{coeffs}]}}"#);
        let digit = base(r#"{"val":0,"unit":[5],"prec":1}"#, "Zp", 1);
        assert!(matches!(SeriesFile::parse(&digit), Err(IoError::Scalar { index: 0, .. })));
        let shape = base(r#"{"val":0,"unit":[1],"prec":1}"#, "QpAlpha", 1);
        assert!(matches!(SeriesFile::parse(&shape), Err(IoError::Shape { index: 0, .. })));
        let shape = base(r#"{"x":{"val":0,"unit":[1],"prec":1},"y":{"val":"inf","unit":[],"prec":"inf"}}"#, "Qp", 1);
        assert!(matches!(SeriesFile::parse(&shape), Err(IoError::Shape { index: 0, .. })));
        let neg = base(r#"{"val":-1,"unit":[1],"prec":1}"#, "Zp", 1);
        assert!(matches!(SeriesFile::parse(&neg), Err(IoError::Series(SeriesError::NotIntegral { index: 0 }))));
        let count = base(r#"{"val":0,"unit":[1,2],"prec":1}"#, "Zp", 1);
        assert!(matches!(SeriesFile::parse(&count), Err(IoError::Scalar { .. })));
        assert!(matches!(SeriesFile::parse(&base("", "Zp", 2)), Err(IoError::Trunc { declared: 2, found: 0 })));
        assert!(matches!(SeriesFile::parse(r#"{"p":5}"#), Err(IoError::Json(_))));
        assert!(matches!(parse_pair("[]"), Err(IoError::Kind { .. })));
    }

    #[test]
    fn rationals_and_curves() {
        assert_eq!(parse_rational("-3/6").unwrap(), BigRational::new(BigInt::from(-1), BigInt::from(2)));
        assert_eq!(parse_rational("4").unwrap(), BigRational::from_integer(BigInt::from(4)));
        assert!(parse_rational("1/0").is_err() && parse_rational("x").is_err());
        let c: CurveData = serde_json::from_str(r#"{"label":"32a","a4":1,"p":3}"#).unwrap();
        assert_eq!(c.weierstrass(), Weierstrass([0, 0, 0, 1, 0]));
        assert_eq!(crate::curve::ap_point_count(&c.weierstrass(), c.p), Ok(0));
    }
}
