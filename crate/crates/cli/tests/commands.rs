use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use num_bigint::BigInt;
use serde_json::Value;

use sharpflat_core::io::{pair_to_string, SeriesFile};
use sharpflat_core::padic::{ExtContext, PadicScalar, QuadExtScalar};
use sharpflat_core::series::{ExtSeries, PadicSeries, RingTag};

fn sharpflat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sharpflat")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).unwrap_or_else(|e| panic!("not JSON ({e}): {}", stdout(o)))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sharpflat-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("scratch directory");
    dir
}

fn zp(p: u64, ints: &[i64], prec: i64, trunc: usize) -> PadicSeries {
    let ints: Vec<BigInt> = ints.iter().map(|&n| BigInt::from(n)).collect();
    PadicSeries::from_integers(p, RingTag::Zp, &ints, prec, trunc)
}

fn write_pair(path: &Path, a_p: i64, s: PadicSeries, f: PadicSeries) {
    std::fs::write(path, pair_to_string(&SeriesFile::padic(a_p, s), &SeriesFile::padic(a_p, f))).expect("write pair");
}

fn p(path: &Path) -> &str {
    path.to_str().expect("utf-8 path")
}

#[test]
fn values_at_zero_example() {
    let o = sharpflat(&["values-at-zero", "--p", "5", "--ap", "0", "--ell", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "[4, 2]");
}

#[test]
fn roots_report_supersingular_half_valuations() {
    let o = sharpflat(&["--json", "roots", "--p", "5", "--ap", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["reduction_type"], "supersingular");
    assert_eq!(v["alpha_valuation"], "1/2");
    assert_eq!(v["beta_valuation"], "1/2");
}

#[test]
fn negative_ap_is_accepted() {
    let o = sharpflat(&["--json", "roots", "--p", "3", "--ap", "-3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["reduction_type"], "supersingular");
}

/// Equality of series documents up to precision fields: units are compared on their common digits.
fn assert_same_up_to_precision(a: &Value, b: &Value) {
    match (a, b) {
        (Value::Object(x), Value::Object(y)) if x.contains_key("unit") => {
            assert_eq!(x["val"], y["val"]);
            let (u, v) = (x["unit"].as_array().unwrap(), y["unit"].as_array().unwrap());
            let n = u.len().min(v.len());
            assert_eq!(u[..n], v[..n]);
        }
        (Value::Object(x), Value::Object(y)) => {
            let keys = |m: &serde_json::Map<String, Value>| m.keys().filter(|k| !k.starts_with("prec")).cloned().collect::<Vec<_>>();
            assert_eq!(keys(x), keys(y));
            for k in keys(x) {
                assert_same_up_to_precision(&x[&k], &y[&k]);
            }
        }
        (Value::Array(x), Value::Array(y)) => {
            assert_eq!(x.len(), y.len());
            x.iter().zip(y).for_each(|(u, v)| assert_same_up_to_precision(u, v));
        }
        _ => assert_eq!(a, b),
    }
}

#[test]
fn decompose_inverts_compose_on_disk() {
    let dir = scratch("roundtrip");
    let (input, lab, back) = (dir.join("pair.json"), dir.join("lab.json"), dir.join("back.json"));
    let s: Vec<i64> = (0..40).map(|k| (k * k * 7919 + 13) % 30_517_578_125).collect();
    let f: Vec<i64> = (0..40).map(|k| (k * 104_729 + 5 * k + 2) % 30_517_578_125).collect();
    write_pair(&input, 0, zp(5, &s, 15, 40), zp(5, &f, 15, 40));
    let o = sharpflat(&["compose", "--in", p(&input), "--log-prec", "15", "--tdeg", "40", "--out", p(&lab)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = sharpflat(&["decompose", "--in", p(&lab), "--log-prec", "15", "--tdeg", "40", "--out", p(&back)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let read = |path: &Path| -> Value { serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap() };
    assert_same_up_to_precision(&read(&input), &read(&back));
}

#[test]
fn compose_round_trip_at_two() {
    let dir = scratch("roundtrip2");
    let (input, lab) = (dir.join("pair.json"), dir.join("lab.json"));
    write_pair(&input, -2, zp(2, &[1, -3, 5, 0, 7], 15, 5), zp(2, &[2, 0, -1, 9, 4], 15, 5));
    assert_eq!(sharpflat(&["compose", "--in", p(&input), "--out", p(&lab)]).status.code(), Some(0));
    let o = sharpflat(&["--json", "decompose", "--in", p(&lab)]);
    assert_eq!(o.status.code(), Some(0));
    let want: Value = serde_json::from_str(&std::fs::read_to_string(&input).unwrap()).unwrap();
    assert_same_up_to_precision(&json(&o), &want);
}

#[test]
fn decompose_flags_asymmetric_pair_as_inconsistent() {
    let dir = scratch("asym");
    let path = dir.join("lab.json");
    let ctx = ExtContext::new(5, 0);
    let one = |n: i64| ExtSeries::new(ctx, RingTag::QpAlpha, vec![QuadExtScalar::from_i64(ctx, n, 15)], 15).unwrap();
    std::fs::write(&path, pair_to_string(&SeriesFile::ext(one(1)), &SeriesFile::ext(one(0)))).unwrap();
    let o = sharpflat(&["decompose", "--in", p(&path)]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn ap_by_point_counting() {
    for (coeffs, prime, expected) in [("0,0,0,1,0", "3", 0), ("0,0,1,-1,0", "2", -2), ("0,0,0,1,0", "5", 2)] {
        let o = sharpflat(&["--json", "ap", "--coeffs", coeffs, "--p", prime]);
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(json(&o)["a_p"], expected, "{coeffs} at {prime}");
    }
}

#[test]
fn ap_batch_is_sorted_by_label() {
    let dir = scratch("batch");
    let path = dir.join("curves.json");
    std::fs::write(
        &path,
        r#"[{"label": "b", "a4": 1, "p": 5}, {"label": "a", "a3": 1, "a4": -1, "p": 2, "a_p": -2}]"#,
    )
    .unwrap();
    let o = sharpflat(&["--json", "ap", "--curve", p(&path)]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v[0]["label"], "a");
    assert_eq!(v[1]["a_p"], 2);
}

#[test]
fn ap_rejects_bad_reduction() {
    let o = sharpflat(&["ap", "--coeffs", "0,0,0,1,0", "--p", "2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(sharpflat(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(sharpflat(&["roots", "--p", "4", "--ap", "0"]).status.code(), Some(1));
    assert_eq!(sharpflat(&["rank-test", "--in", "/nonexistent/pair.json"]).status.code(), Some(1));
    assert_eq!(sharpflat(&["--help"]).status.code(), Some(0));
}

#[test]
fn errors_are_reported_as_json_when_asked() {
    let o = sharpflat(&["--json", "roots", "--p", "4", "--ap", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["exit_code"], 1);
}

#[test]
fn rank_test_verdicts_and_exit_codes() {
    let dir = scratch("rank");
    let consistent = dir.join("zero.json");
    write_pair(&consistent, 0, zp(5, &[4, 1, 0], 15, 3), zp(5, &[2, 3, 1], 15, 3));
    let o = sharpflat(&["--json", "rank-test", "--in", p(&consistent)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["verdict"], "rank_zero_consistent");

    let positive = dir.join("positive.json");
    write_pair(&positive, 0, zp(5, &[0, 1, 0], 15, 3), zp(5, &[0, 3, 1], 15, 3));
    let o = sharpflat(&["--json", "rank-test", "--in", p(&positive)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["verdict"], "rank_positive");
    assert_eq!(json(&o)["value"], "1/3");

    // Both vanish at T = 0 yet the ratio sits on the rank-zero threshold.
    let alarm = dir.join("alarm.json");
    write_pair(&alarm, 0, zp(5, &[0, 2, 0], 15, 3), zp(5, &[0, 1, 0], 15, 3));
    assert_eq!(sharpflat(&["rank-test", "--in", p(&alarm)]).status.code(), Some(3));

    let blurred = dir.join("blurred.json");
    let coeffs = |t: i64| vec![PadicScalar::zero_to(5, 2), PadicScalar::from_i64(t, 5, 15)];
    let s = PadicSeries::new(5, RingTag::Zp, coeffs(1), 15).unwrap();
    let f = PadicSeries::new(5, RingTag::Zp, coeffs(2), 15).unwrap();
    write_pair(&blurred, 0, s, f);
    let o = sharpflat(&["--json", "rank-test", "--in", p(&blurred)]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json(&o)["verdict"], "undetermined");
}

#[test]
fn report_checks_kato_bound() {
    let dir = scratch("report");
    let path = dir.join("zero.json");
    write_pair(&path, 0, zp(5, &[4, 1, 0], 15, 3), zp(5, &[2, 3, 1], 15, 3));
    let o = sharpflat(&["--json", "report", "--in", p(&path), "--rank", "0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v = json(&o);
    assert_eq!(v["kato_ok"], "true");
    assert_eq!(v["convention_sign"], 1);
    assert!(v["banner"].as_str().unwrap().starts_with("conditional"));

    let o = sharpflat(&["--json", "report", "--in", p(&path), "--rank", "1"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(json(&o)["kato_ok"], "false");
}

#[test]
fn report_rejects_nonpositive_orders() {
    let dir = scratch("report-bad");
    let path = dir.join("zero.json");
    write_pair(&path, 0, zp(5, &[4, 1], 15, 2), zp(5, &[2, 3], 15, 2));
    assert_eq!(sharpflat(&["report", "--in", p(&path), "--rank", "0", "--sha", "0"]).status.code(), Some(1));
}

#[test]
fn divisors_and_invariants() {
    let dir = scratch("divisors");
    let path = dir.join("pair.json");
    write_pair(&path, 0, zp(3, &[0, 3, 1, 0, 2], 15, 20), zp(3, &[0, 1, 1, 0, 0], 15, 20));
    let o = sharpflat(&["--json", "divisors", "--in", p(&path), "--log-prec", "15", "--tdeg", "20", "--n-max", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(json(&o)["e0"], serde_json::json!({ "kind": "Exact", "order": 1 }));

    let o = sharpflat(&["--json", "invariants", "--in", p(&path)]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v[0], serde_json::json!({ "status": "determined", "mu": 0, "lambda": 2 }));
    assert_eq!(v[1], serde_json::json!({ "status": "determined", "mu": 0, "lambda": 1 }));
}

#[test]
fn z_matrix_exact_form() {
    let o = sharpflat(&["z-matrix", "--p", "5", "--ap", "0", "--exact"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("[1/5 + (0)·α, 1/5 + (0)·α]"), "{}", stdout(&o));
}

#[test]
fn logmatrix_writes_four_entries() {
    let dir = scratch("logmatrix");
    let path = dir.join("log.json");
    let o = sharpflat(&["--json", "logmatrix", "--p", "3", "--ap", "0", "--log-prec", "10", "--tdeg", "12", "--out", p(&path)]);
    assert_eq!(o.status.code(), Some(0));
    let docs: Vec<Value> = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(docs.len(), 4);
    assert!(docs.iter().all(|d| d["ring"] == "QpAlpha" && d["trunc_T"] == 12));
}

#[test]
fn dieudonne_constants_are_rational() {
    let o = sharpflat(&["--json", "dieudonne-constants", "--p", "3", "--ap", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["c_sharp"]["value"], "2");
    assert_eq!(v["vectors"].as_array().unwrap().len(), 6);
    assert_eq!(sharpflat(&["dieudonne-constants", "--p", "5", "--ap", "1"]).status.code(), Some(1));
}

#[test]
fn selftest_single_criterion() {
    let o = sharpflat(&["--json", "selftest", "--criterion", "13"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)[0]["passed"], true);
    assert_eq!(sharpflat(&["selftest", "--criterion", "99"]).status.code(), Some(1));
}
