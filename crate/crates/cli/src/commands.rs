use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use sharpflat_core::acceptance;
use sharpflat_core::curve::{ap_point_count, Weierstrass};
use sharpflat_core::dieudonne::{n_vectors, nu_eigenvectors, regulator_constants, sharp_flat_basis};
use sharpflat_core::io::{pair_to_string, parse_pair, parse_rational, CurveData, SeriesFile};
use sharpflat_core::log_transform::{lift_to_working, values_at_zero_coefficients, z_at_zero, FactorConvention, LogMatrix};
use sharpflat_core::padic::{hecke_roots, rational_scalar, PadicScalar, ReductionType};
use sharpflat_core::report::{rank_criterion, tandem_check, ArithmeticInputs, Hypotheses, ProjectiveValue, RankVerdict, Tri};
use sharpflat_core::series::{iwasawa_invariants, Invariants, PadicSeries};
use sharpflat_core::vanishing::{gcd_profile, Branch};

use crate::error::CliError;
use crate::{render, Cli, Command, Curve, Precision, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Undetermined,
    Inconsistent,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Undetermined => 2,
            Status::Inconsistent => 3,
        }
    }

    fn worst(self, other: Status) -> Status {
        if other.code() > self.code() {
            other
        } else {
            self
        }
    }
}

pub struct Output {
    pub text: String,
    pub json: Value,
    pub status: Status,
}

impl Output {
    fn ok(text: String, json: Value) -> Self {
        Output { text, json, status: Status::Ok }
    }

    pub fn render(&self, as_json: bool) -> String {
        if as_json {
            format!("{}\n", serde_json::to_string_pretty(&self.json).expect("output serializes"))
        } else if self.text.ends_with('\n') {
            self.text.clone()
        } else {
            format!("{}\n", self.text)
        }
    }
}

pub fn run(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Roots { curve, prec } => roots(*curve, *prec),
        Command::Logmatrix { curve, precision, out } => logmatrix(*curve, *precision, out.as_deref()),
        Command::ZMatrix { curve, prec, exact } => z_matrix(*curve, *prec, *exact),
        Command::Compose { input, precision, out } => compose(input, *precision, out.as_deref()),
        Command::Decompose { input, precision, out } => decompose(input, *precision, out.as_deref()),
        Command::ValuesAtZero { curve, ell } => values(*curve, ell),
        Command::RankTest { input } => rank_test(input),
        Command::Divisors { input, precision, n_max } => divisors(input, *precision, *n_max),
        Command::Invariants { input } => invariants(input),
        Command::DieudonneConstants { curve, prec } => dieudonne(*curve, *prec),
        Command::Ap { curve, coeffs, p } => ap(curve.as_deref(), coeffs.as_deref(), *p),
        Command::Report { input, precision, rank, tamagawa, sha, torsion, reg_sharp, reg_flat } => {
            let p_of = read_signed_pair(input)?.0.p();
            let int = |name: &str, s: &str| -> Result<BigInt> { s.trim().parse().map_err(|_| CliError::Usage(format!("--{name}: expected an integer, got {s:?}"))) };
            let reg = |s: &str| -> Result<_> { Ok(rational_scalar(&parse_rational(s)?, p_of, precision.log_prec)?) };
            let inputs = ArithmeticInputs {
                rank: *rank,
                tamagawa_product: int("tamagawa", tamagawa)?,
                sha_order: int("sha", sha)?,
                torsion_order: int("torsion", torsion)?,
                reg_sharp: reg(reg_sharp)?,
                reg_flat: reg(reg_flat)?,
                hypotheses: Hypotheses::default(),
            };
            report(input, *precision, &inputs)
        }
        Command::Selftest { criterion } => selftest(*criterion),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn write_out(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// `(L_♯, L_♭)` with the `a_p` both documents agree on.
fn read_signed_pair(path: &Path) -> Result<(PadicSeries, PadicSeries, i64)> {
    let (a, b) = parse_pair(&read(path)?)?;
    if a.a_p != b.a_p {
        return Err(CliError::Usage(format!("pair documents disagree on a_p: {} and {}", a.a_p, b.a_p)));
    }
    let a_p = a.a_p;
    let (s, f) = (a.series.into_padic()?, b.series.into_padic()?);
    if s.p() != f.p() {
        return Err(CliError::Usage(format!("pair documents disagree on p: {} and {}", s.p(), f.p())));
    }
    Ok((s, f, a_p))
}

fn build_log(a_p: i64, p: u64, precision: Precision) -> Result<LogMatrix> {
    Ok(LogMatrix::build(a_p, p, precision.log_prec, precision.tdeg)?)
}

fn roots(c: Curve, prec: i64) -> Result<Output> {
    let r = hecke_roots(c.a_p, c.p, prec)?;
    let (alpha, beta) = r.ext_roots();
    let kind = r.reduction_type();
    let json = json!({
        "a_p": c.a_p,
        "p": c.p,
        "prec": prec,
        "reduction_type": kind,
        "alpha_valuation": r.alpha_valuation().to_string(),
        "beta_valuation": r.beta_valuation().to_string(),
        "alpha": render::ext(&alpha),
        "beta": render::ext(&beta),
    });
    let text = format!(
        "Y² − ({})·Y + {} at p = {}: {}\n  α = {}  (valuation {})\n  β = {}  (valuation {})",
        c.a_p,
        c.p,
        c.p,
        serde_json::to_value(kind).expect("tag serializes").as_str().unwrap_or_default(),
        render::ext_text(&alpha),
        r.alpha_valuation(),
        render::ext_text(&beta),
        r.beta_valuation()
    );
    Ok(Output::ok(text, json))
}

fn logmatrix(c: Curve, precision: Precision, out: Option<&Path>) -> Result<Output> {
    let log = build_log(c.a_p, c.p, precision)?;
    let z = log.value_at_zero();
    if let Some(path) = out {
        let e = log.entries();
        let docs: Vec<_> = e.iter().flatten().map(|s| SeriesFile::ext(s.clone()).to_json()).collect();
        write_out(path, &serde_json::to_string_pretty(&docs).expect("series JSON serializes"))?;
    }
    let json = json!({
        "a_p": c.a_p,
        "p": c.p,
        "prec_p": precision.log_prec,
        "trunc_T": precision.tdeg,
        "n_used": log.n_used(),
        "working_precision": log.working_precision(),
        "value_at_zero": render::matrix(&z, render::ext),
    });
    let text = format!(
        "Log matrix for a_p = {}, p = {} modulo (p^{}, T^{})\n  factors used: {}\n  working precision: p^{}\nLog(0):\n{}",
        c.a_p,
        c.p,
        precision.log_prec,
        precision.tdeg,
        log.n_used(),
        log.working_precision(),
        render::matrix_text(&z)
    );
    Ok(Output::ok(text, json))
}

fn z_matrix(c: Curve, prec: i64, exact: bool) -> Result<Output> {
    let z = z_at_zero(c.a_p, c.p, prec, FactorConvention::default())?;
    let json = json!({ "a_p": c.a_p, "p": c.p, "prec": prec, "z": render::matrix(&z, render::ext) });
    let text = if exact {
        let m = z.clone().map(|row| row.map(|x| render::ext_text(&x)));
        format!("Z = Log(0), a_p = {}, p = {}:\n{}", c.a_p, c.p, render::matrix_text(&m))
    } else {
        format!("Z = Log(0), a_p = {}, p = {}, modulo p^{prec}:\n{}", c.a_p, c.p, render::matrix_text(&z))
    };
    Ok(Output::ok(text, json))
}

fn compose(input: &Path, precision: Precision, out: Option<&Path>) -> Result<Output> {
    let (s, f, a_p) = read_signed_pair(input)?;
    let log = build_log(a_p, s.p(), precision)?;
    let (la, lb) = log.compose(&lift_to_working(&s, &log), &lift_to_working(&f, &log))?;
    let doc = pair_to_string(&SeriesFile::ext(la.clone()), &SeriesFile::ext(lb.clone()));
    emit_pair(doc, out, || format!("L_α = {la}\nL_β = {lb}"))
}

fn decompose(input: &Path, precision: Precision, out: Option<&Path>) -> Result<Output> {
    let (a, b) = parse_pair(&read(input)?)?;
    let (la, lb) = (a.series.into_ext()?, b.series.into_ext()?);
    let a_p = la.ctx().a_p;
    let log = build_log(a_p, la.p(), precision)?;
    let (s, f) = log.decompose(&la, &lb)?;
    let doc = pair_to_string(&SeriesFile::padic(a_p, s.clone()), &SeriesFile::padic(a_p, f.clone()));
    emit_pair(doc, out, || format!("L_♯ = {s}\nL_♭ = {f}"))
}

fn emit_pair(doc: String, out: Option<&Path>, text: impl FnOnce() -> String) -> Result<Output> {
    let json: Value = serde_json::from_str(&doc).expect("pair JSON parses");
    match out {
        Some(path) => {
            write_out(path, &doc)?;
            Ok(Output::ok(format!("written to {}", path.display()), json!({ "written": path.display().to_string() })))
        }
        None => Ok(Output::ok(text(), json)),
    }
}

fn values(c: Curve, ell: &str) -> Result<Output> {
    hecke_roots(c.a_p, c.p, 4)?;
    let ell = parse_rational(ell)?;
    let (u, w) = values_at_zero_coefficients(c.a_p, c.p);
    let v = [&ell * BigRational::from_integer(u), &ell * BigRational::from_integer(w)];
    let json = json!({ "a_p": c.a_p, "p": c.p, "ell": ell.to_string(), "values": [v[0].to_string(), v[1].to_string()] });
    Ok(Output::ok(format!("[{}, {}]", v[0], v[1]), json))
}

fn projective(v: &ProjectiveValue) -> String {
    match v {
        ProjectiveValue::Finite(x) => render::rational(x).to_string(),
        ProjectiveValue::Infinity => v.to_string(),
    }
}

fn verdict_status(v: RankVerdict, alarm: bool) -> Status {
    match (v, alarm) {
        (_, true) => Status::Inconsistent,
        (RankVerdict::Undetermined, _) => Status::Undetermined,
        _ => Status::Ok,
    }
}

fn rank_test(input: &Path) -> Result<Output> {
    let (s, f, a_p) = read_signed_pair(input)?;
    let rc = rank_criterion(&s, &f, a_p, s.p())?;
    let value = rc.value.as_ref().map(projective);
    let json = json!({
        "a_p": a_p,
        "p": s.p(),
        "orders": [render::order(rc.orders.0), render::order(rc.orders.1)],
        "value": value,
        "threshold": rc.threshold.to_string(),
        "verdict": rc.verdict,
        "common_zero": rc.common_zero,
        "alarm": rc.alarm,
        "hypotheses": rc.hypotheses,
    });
    let mut text = format!(
        "ord_0 L_♯ = {}, ord_0 L_♭ = {}\n(L_♯/L_♭)(0) = {}\nthreshold = {}\nverdict: {}\n({})",
        rc.orders.0,
        rc.orders.1,
        value.as_deref().unwrap_or("undetermined"),
        rc.threshold,
        rc.verdict,
        rc.hypotheses
    );
    if let Some(a) = &rc.alarm {
        write!(text, "\nALARM: {a}").expect("string write");
    }
    Ok(Output { text, json, status: verdict_status(rc.verdict, rc.alarm.is_some()) })
}

fn divisors(input: &Path, precision: Precision, n_max: Option<u32>) -> Result<Output> {
    let (s, f, a_p) = read_signed_pair(input)?;
    let log = build_log(a_p, s.p(), precision)?;
    let prof = gcd_profile(&lift_to_working(&s, &log), &lift_to_working(&f, &log), &log, n_max)?;
    let determined = prof.e0.is_exact() && prof.mu_certified && prof.cyclotomic.iter().all(|c| c.branch != Branch::Unresolved);
    let mut text = format!("gcd(L_♯, L_♭) for a_p = {a_p}, p = {}\n  T-exponent e0 = {}\n  r_an = {}\n", s.p(), prof.e0, prof.r_analytic);
    for c in &prof.cyclotomic {
        writeln!(text, "  Φ_{{p^{}}}: en = {}, dn = {}, branch {:?}", c.n, c.en, c.dn_analytic, c.branch).expect("string write");
    }
    let mu_note = if prof.mu_certified { "" } else { " (upper bound)" };
    write!(text, "  μ = {}{mu_note}\n  {}", prof.mu_common, prof.residual_note).expect("string write");
    let json = serde_json::to_value(&prof).expect("profile serializes");
    Ok(Output { text, json, status: if determined { Status::Ok } else { Status::Undetermined } })
}

fn invariants(input: &Path) -> Result<Output> {
    let text_in = read(input)?;
    let files = match parse_pair(&text_in) {
        Ok((a, b)) => vec![a, b],
        Err(_) => vec![SeriesFile::parse(&text_in)?],
    };
    let mut status = Status::Ok;
    let mut text = String::new();
    let mut out = Vec::new();
    for (i, file) in files.into_iter().enumerate() {
        let inv = iwasawa_invariants(&file.series.into_padic()?)?;
        match &inv {
            Invariants::Determined { mu, lambda } => writeln!(text, "series {i}: μ = {mu}, λ = {lambda}"),
            Invariants::Undetermined { mu_bound, lambda_candidate, reason } => {
                status = status.worst(Status::Undetermined);
                writeln!(text, "series {i}: undetermined, μ ≤ {mu_bound}, λ candidate {lambda_candidate} ({reason})")
            }
        }
        .expect("string write");
        out.push(serde_json::to_value(&inv).expect("invariants serialize"));
    }
    Ok(Output { text, json: Value::Array(out), status })
}

fn dieudonne(c: Curve, prec: i64) -> Result<Output> {
    let roots = hecke_roots(c.a_p, c.p, prec)?;
    if roots.reduction_type() == ReductionType::Ordinary {
        return Err(CliError::Usage(format!("a_p = {} is ordinary at p = {}; supersingular reduction is required", c.a_p, c.p)));
    }
    let z = z_at_zero(c.a_p, c.p, prec, FactorConvention::default())?;
    let ev = nu_eigenvectors(&roots)?;
    let (nu_sharp, nu_flat) = sharp_flat_basis(&z, &ev.nu_a, &ev.nu_b);
    let (n_sharp, n_flat) = n_vectors(&roots, &z)?;
    let (c_sharp, c_flat) = regulator_constants(c.a_p, c.p, prec)?;
    let vectors = [("ν_A", &ev.nu_a), ("ν_B", &ev.nu_b), ("ν_♯", &nu_sharp), ("ν_♭", &nu_flat), ("N_♯", &n_sharp), ("N_♭", &n_flat)];
    let json = json!({
        "a_p": c.a_p,
        "p": c.p,
        "prec": prec,
        "c_sharp": render::scalar(&c_sharp),
        "c_flat": render::scalar(&c_flat),
        "vectors": vectors.iter().map(|(k, v)| json!({ "name": k, "omega": render::ext(&v.c_omega), "phi_omega": render::ext(&v.c_phiomega), "off_omega_line": v.off_omega_line() })).collect::<Vec<_>>(),
    });
    let mut text = format!("a_p = {}, p = {}, modulo p^{prec}\n  c_♯ = {}\n  c_♭ = {}\n", c.a_p, c.p, render::rational(&c_sharp), render::rational(&c_flat));
    for (k, v) in vectors {
        writeln!(text, "  {k} = [{}]·ω + [{}]·φ(ω)", render::ext_text(&v.c_omega), render::ext_text(&v.c_phiomega)).expect("string write");
    }
    Ok(Output::ok(text, json))
}

fn parse_coeffs(s: &str) -> Result<Weierstrass> {
    let parts: Vec<i64> = s
        .split(',')
        .map(|t| t.trim().parse::<i64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("--coeffs: expected five integers a1,a2,a3,a4,a6, got {s:?}")))?;
    let arr: [i64; 5] = parts.try_into().map_err(|_| CliError::Usage(format!("--coeffs: expected five integers, got {s:?}")))?;
    Ok(Weierstrass(arr))
}

fn ap_row(label: &str, w: &Weierstrass, p: u64, supplied: Option<i64>) -> Result<(Value, String, Status)> {
    let counted = ap_point_count(w, p)?;
    let kind = if counted.rem_euclid(p as i64) == 0 { "supersingular" } else { "ordinary" };
    let mut status = Status::Ok;
    let mut line = format!("{label}: p = {p}, #E(F_p) = {}, a_p = {counted} ({kind})", p as i64 + 1 - counted);
    if let Some(a) = supplied.filter(|&a| a != counted) {
        status = Status::Inconsistent;
        write!(line, "; supplied a_p = {a} disagrees").expect("string write");
    }
    let json = json!({ "label": label, "p": p, "points": p as i64 + 1 - counted, "a_p": counted, "reduction_type": kind, "supplied_a_p": supplied });
    Ok((json, line, status))
}

fn ap(curve: Option<&Path>, coeffs: Option<&str>, p: Option<u64>) -> Result<Output> {
    let rows = match (curve, coeffs, p) {
        (Some(path), _, _) => {
            let text = read(path)?;
            let value: Value = serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            let mut data: Vec<CurveData> = match value {
                Value::Array(_) => serde_json::from_value(value),
                other => serde_json::from_value(other).map(|c| vec![c]),
            }
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            data.sort_by(|a, b| a.label.cmp(&b.label));
            data.iter().map(|d| ap_row(&d.label, &d.weierstrass(), d.p, d.a_p)).collect::<Result<Vec<_>>>()?
        }
        (None, Some(c), Some(p)) => vec![ap_row(c, &parse_coeffs(c)?, p, None)?],
        _ => return Err(CliError::Usage("ap needs --curve FILE or --coeffs a1,a2,a3,a4,a6 with --p".into())),
    };
    let status = rows.iter().fold(Status::Ok, |s, r| s.worst(r.2));
    let text = rows.iter().map(|r| r.1.as_str()).collect::<Vec<_>>().join("\n");
    let json = if rows.len() == 1 { rows[0].0.clone() } else { Value::Array(rows.into_iter().map(|r| r.0).collect()) };
    Ok(Output { text, json, status })
}

fn tri_status(t: Tri) -> Status {
    match t {
        Tri::True => Status::Ok,
        Tri::False => Status::Inconsistent,
        Tri::Unknown => Status::Undetermined,
    }
}

fn report(input: &Path, precision: Precision, inputs: &ArithmeticInputs) -> Result<Output> {
    let (s, f, a_p) = read_signed_pair(input)?;
    let p = s.p();
    let log = build_log(a_p, p, precision)?;
    let r = tandem_check(&lift_to_working(&s, &log), &lift_to_working(&f, &log), inputs, a_p, p, &log)?;
    let rc = &r.rank_criterion;
    let status = [
        tri_status(r.kato_ok),
        tri_status(r.rank_matches),
        verdict_status(rc.verdict, rc.alarm.is_some()),
        if r.alarms.is_empty() { Status::Ok } else { Status::Inconsistent },
    ]
    .into_iter()
    .fold(Status::Ok, Status::worst);
    let pair = |v: &[PadicScalar; 2]| json!([render::scalar(&v[0]), render::scalar(&v[1])]);
    let json = json!({
        "a_p": a_p,
        "p": p,
        "banner": r.banner,
        "hypotheses": r.hypotheses,
        "r_p_natural": render::order(r.r_p_natural),
        "r_an": render::order(r.r_an),
        "r_an_components": [render::order(r.r_an_components.0), render::order(r.r_an_components.1)],
        "kato_ok": r.kato_ok,
        "rank_matches": r.rank_matches,
        "leading_vector": r.leading_vector.as_ref().map(pair),
        "rhs_vector": pair(&r.rhs_vector),
        "difference_valuation": r.difference_valuation.map(|d| [d[0].to_string(), d[1].to_string()]),
        "rank_criterion": {
            "value": rc.value.as_ref().map(projective),
            "threshold": rc.threshold.to_string(),
            "verdict": rc.verdict,
            "common_zero": rc.common_zero,
        },
        "extra_zero_flag": r.extra_zero_flag,
        "convention_sign": r.convention_sign,
        "alarms": r.alarms,
    });
    let mut text = format!("{}\n", r.banner);
    let show = |v: &[PadicScalar; 2]| format!("({}, {})", render::rational(&v[0]), render::rational(&v[1]));
    writeln!(text, "a_p = {a_p}, p = {p}, rank r = {}", inputs.rank).expect("string write");
    writeln!(text, "  r_p^♮ = {}   r_an = {} (L_α: {}, L_β: {})", r.r_p_natural, r.r_an, r.r_an_components.0, r.r_an_components.1).expect("string write");
    writeln!(text, "  Kato bound r_an ≥ r: {}   r_p^♮ = r: {}", r.kato_ok, r.rank_matches).expect("string write");
    writeln!(text, "  leading vector: {}", r.leading_vector.as_ref().map_or("undetermined".into(), show)).expect("string write");
    writeln!(text, "  predicted:      {}", show(&r.rhs_vector)).expect("string write");
    if let Some(d) = r.difference_valuation {
        writeln!(text, "  difference valuations: ({}, {})", d[0], d[1]).expect("string write");
    }
    writeln!(text, "  rank criterion: {} (threshold {})", rc.verdict, rc.threshold).expect("string write");
    write!(text, "  convention sign: {:+}", r.convention_sign).expect("string write");
    for a in &r.alarms {
        write!(text, "\nALARM: {a}").expect("string write");
    }
    Ok(Output { text, json, status })
}

fn selftest(criterion: Option<u8>) -> Result<Output> {
    let outcomes = match criterion {
        Some(id) => vec![acceptance::run(id).ok_or_else(|| CliError::Usage(format!("no criterion {id}; valid ids are 1..={}", acceptance::CRITERIA.len())))?],
        None => acceptance::run_all(),
    };
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    let text = outcomes.iter().map(|o| o.to_string()).chain([format!("{} passed, {failed} failed", outcomes.len() - failed)]).collect::<Vec<_>>().join("\n");
    let json = Value::Array(
        outcomes
            .iter()
            .map(|o| json!({ "id": o.id, "name": o.name, "passed": o.passed, "detail": o.detail, "seconds": o.elapsed.as_secs_f64() }))
            .collect(),
    );
    Ok(Output { text, json, status: if failed == 0 { Status::Ok } else { Status::Inconsistent } })
}
