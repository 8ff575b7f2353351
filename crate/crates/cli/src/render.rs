use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use sharpflat_core::io::ScalarJson;
use sharpflat_core::padic::{PadicScalar, QuadExtScalar};
use sharpflat_core::series::OrderResult;

/// The fraction `n/d` with `|n|, |d| ≤ √(m/2)` congruent to `x` modulo its precision, when one exists;
/// otherwise the balanced representative.
pub fn rational(x: &PadicScalar) -> BigRational {
    let (Some(val), Some(unit), Some(prec)) = (x.val(), x.unit(), x.rel_prec()) else {
        return BigRational::zero();
    };
    let m = BigInt::from(x.p()).pow(prec as u32);
    let (mut r0, mut r1) = (m.clone(), BigInt::from(unit.clone()));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while &r1 * &r1 * 2 > m {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        (r0, r1, t0, t1) = (r1, r2, t1, t2);
    }
    if t1.is_zero() || &t1 * &t1 * 2 > m {
        return x.to_rational();
    }
    let scale = BigRational::from_integer(BigInt::from(x.p())).pow(val as i32);
    let (n, d) = if t1.is_negative() { (-r1, -t1) } else { (r1, t1) };
    BigRational::new(n, d) * scale
}

pub fn scalar(x: &PadicScalar) -> Value {
    json!({ "value": rational(x).to_string(), "padic": ScalarJson::from_scalar(x) })
}

/// `x + y·α` with both parts reconstructed.
pub fn ext_text(x: &QuadExtScalar) -> String {
    format!("{} + ({})·α", rational(x.x()), rational(x.y()))
}

pub fn ext(x: &QuadExtScalar) -> Value {
    json!({ "x": scalar(x.x()), "y": scalar(x.y()) })
}

pub fn order(o: OrderResult) -> Value {
    serde_json::to_value(o).expect("order serializes")
}

pub fn matrix<T>(m: &[[T; 2]; 2], f: impl Fn(&T) -> Value) -> Value {
    json!([[f(&m[0][0]), f(&m[0][1])], [f(&m[1][0]), f(&m[1][1])]])
}

pub fn matrix_text<T: std::fmt::Display>(m: &[[T; 2]; 2]) -> String {
    format!("  [{}, {}]\n  [{}, {}]", m[0][0], m[0][1], m[1][0], m[1][1])
}
