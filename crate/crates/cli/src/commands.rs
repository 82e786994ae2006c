//! The three batch commands: expansion, synthesis, verification.
//!
//! Commands return the rendered output plus an exit code: 0 when every
//! checked law holds, 1 on a mathematical failure, 2 on usage or guard
//! errors (the latter travel as `CliFailure`). Output is deterministic
//! for a given input and option set.

use crate::input::{build_prefix, build_series, parse_input, RawInput};
use clap::ValueEnum;
use mcf_core::approx::{measure, reduce_to_s, verify_best, Precision};
use mcf_core::cf::MPreCf;
use mcf_core::synthesis::{complexity_profile, minimal_poly_bruteforce};
use mcf_core::transform::{expand, expand_fraction, EpsilonStrategy};
use mcf_core::{Error, IndexedVal, Poly, PrimeField, SeriesVec};
use serde::Serialize;
use std::fmt;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Strategy {
    Zero,
    Strict,
}

impl Strategy {
    fn core(self) -> EpsilonStrategy {
        match self {
            Strategy::Zero => EpsilonStrategy::Zero,
            Strategy::Strict => EpsilonStrategy::Strict,
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Zero => "zero",
            Strategy::Strict => "strict",
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Text => "text",
            Format::Json => "json",
        })
    }
}

/// A failed run: exit code plus the message for stderr.
pub struct CliFailure {
    pub code: i32,
    pub message: String,
}

fn usage(msg: impl Into<String>) -> CliFailure {
    CliFailure {
        code: 2,
        message: msg.into(),
    }
}

impl From<Error> for CliFailure {
    fn from(e: Error) -> CliFailure {
        let code = match &e {
            Error::Parse(_)
            | Error::Domain(_)
            | Error::NotPrime(_)
            | Error::InsufficientPrecision(_)
            | Error::DimensionMismatch { .. }
            | Error::FieldMismatch => 2,
            Error::InvalidCf { .. }
            | Error::InvalidEpsilon { .. }
            | Error::Internal(_)
            | Error::DivisionByZero => 1,
        };
        CliFailure {
            code,
            message: e.to_string(),
        }
    }
}

type CmdResult = Result<(String, i32), CliFailure>;

fn field_of(flag_p: Option<u64>, raw: &RawInput) -> Result<PrimeField, CliFailure> {
    let p = flag_p
        .or(raw.p)
        .ok_or_else(|| usage("field characteristic required: pass --p or a p= header"))?;
    Ok(PrimeField::new(p)?)
}

fn check_m(flag_m: Option<usize>, raw: &RawInput) -> Result<(), CliFailure> {
    let rows = raw.rows();
    if rows == 0 {
        return Err(usage("no component rows in the input"));
    }
    for (given, src) in [(flag_m, "--m"), (raw.m, "the m= header")] {
        if let Some(v) = given {
            if v != rows {
                return Err(usage(format!(
                    "{src} says {v} components but the input has {rows} rows"
                )));
            }
        }
    }
    Ok(())
}

fn polys_to_strings(polys: &[Poly]) -> Vec<String> {
    polys.iter().map(Poly::to_string).collect()
}

#[derive(Serialize)]
struct StepOut {
    h: usize,
    a: Vec<String>,
}

#[derive(Serialize)]
struct QuantOut {
    t: Vec<i64>,
    d: Vec<i64>,
    v: Vec<i64>,
    n: Vec<i64>,
}

#[derive(Serialize)]
struct CondOut {
    cond1: bool,
    cond2: bool,
    cond3: bool,
    cond4: bool,
    strict: bool,
}

#[derive(Serialize)]
struct ExpandOut {
    p: u64,
    m: usize,
    cf: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    integer_part: Option<Vec<String>>,
    steps: Vec<StepOut>,
    quantities: QuantOut,
    terminated: bool,
    /// None means the structure is complete: nothing was cut off.
    certified_n: Option<i64>,
    conditions: CondOut,
}

pub struct ExpandOpts {
    pub p: Option<u64>,
    pub m: Option<usize>,
    pub precision: Option<i64>,
    pub strategy: Strategy,
    pub format: Format,
}

pub fn cmd_expand(text: &str, opts: &ExpandOpts) -> CmdResult {
    let raw = parse_input(text)?;
    if raw.cf_text.is_some() {
        return Err(usage(
            "expand reads series input; a cf payload has nothing to expand",
        ));
    }
    let field = field_of(opts.p, &raw)?;
    check_m(opts.m, &raw)?;
    let r = build_series(&raw, field)?;
    let m = r.m();
    let budget = opts.precision.or(raw.n).unwrap_or(1 << 30);
    if budget < 1 {
        return Err(usage("precision must be at least 1"));
    }
    let (ints, rs) = reduce_to_s(&r);
    let integer_part = ints
        .iter()
        .any(|p| !p.is_zero())
        .then(|| polys_to_strings(&ints));

    let (cf, terminated, certified_n) = if rs.is_zero_exact() {
        (MPreCf::empty(field, m), true, None)
    } else if rs.monomials().is_empty() {
        // Nothing visible in the window: nothing can be emitted.
        let window = rs.precision().expect("inexact since not zero-exact");
        (MPreCf::empty(field, m), false, Some(window.min(budget)))
    } else {
        let exp = expand(&rs, opts.strategy.core(), budget)?;
        let certified = (!exp.terminated).then_some(exp.certified_n);
        (exp.cf, exp.terminated, certified)
    };

    let quants = cf.quantities()?;
    let rep = cf.check_conditions();
    let out = ExpandOut {
        p: field.p(),
        m,
        cf: cf.to_string(),
        integer_part,
        steps: cf
            .steps()
            .iter()
            .map(|s| StepOut {
                h: s.h,
                a: polys_to_strings(&s.a),
            })
            .collect(),
        quantities: QuantOut {
            t: quants.t[1..].to_vec(),
            d: quants.d[1..].to_vec(),
            v: quants.v[1..].to_vec(),
            n: quants.n[1..].to_vec(),
        },
        terminated,
        certified_n,
        conditions: CondOut {
            cond1: rep.cond1,
            cond2: rep.cond2,
            cond3: rep.cond3,
            cond4: rep.cond4,
            strict: rep.is_strict(),
        },
    };
    let rendered = match opts.format {
        Format::Json => to_json(&out)?,
        Format::Text => {
            let mut s = String::new();
            s.push_str(&format!("cf: {}\n", out.cf));
            if let Some(ints) = &out.integer_part {
                s.push_str(&format!("integer_part: [{}]\n", ints.join(", ")));
            }
            s.push_str(&format!(
                "terminated: {}\n",
                if out.terminated { "yes" } else { "no" }
            ));
            match out.certified_n {
                None => s.push_str("certified_n: unbounded\n"),
                Some(n) => s.push_str(&format!("certified_n: {n}\n")),
            }
            s.push_str("table: k h t d v n\n");
            for (i, step) in out.steps.iter().enumerate() {
                s.push_str(&format!(
                    "row: {} {} {} {} {} {}\n",
                    i + 1,
                    step.h,
                    out.quantities.t[i],
                    out.quantities.d[i],
                    out.quantities.v[i],
                    out.quantities.n[i],
                ));
            }
            let c = &out.conditions;
            s.push_str(&format!(
                "conditions: cond1={} cond2={} cond3={} cond4={} strict={}\n",
                pf(c.cond1),
                pf(c.cond2),
                pf(c.cond3),
                pf(c.cond4),
                if c.strict { "yes" } else { "no" }
            ));
            s
        }
    };
    Ok((rendered, 0))
}

fn pf(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "fail"
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliFailure> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliFailure {
        code: 1,
        message: format!("serialization failed: {e}"),
    })?;
    s.push('\n');
    Ok(s)
}

#[derive(Serialize)]
struct ProfileRowOut {
    n: usize,
    #[serde(rename = "L")]
    l: i64,
    q: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_l: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    agree: Option<bool>,
}

#[derive(Serialize)]
struct SynthOut {
    p: u64,
    m: usize,
    profile: Vec<ProfileRowOut>,
}

pub struct SynthOpts {
    pub p: Option<u64>,
    pub m: Option<usize>,
    pub precision: Option<i64>,
    pub oracle: bool,
    pub format: Format,
}

pub fn cmd_synth(text: &str, opts: &SynthOpts) -> CmdResult {
    let raw = parse_input(text)?;
    if raw.cf_text.is_some() {
        return Err(usage("synth reads seq rows, not a cf payload"));
    }
    let field = field_of(opts.p, &raw)?;
    check_m(opts.m, &raw)?;
    let mut seqs = build_prefix(&raw, field)?;
    if let Some(limit) = opts.precision.or(raw.n) {
        if limit < 1 {
            return Err(usage("precision must be at least 1"));
        }
        if (limit as usize) < seqs.n() {
            seqs = seqs.truncated(limit as usize);
        }
    }
    let profile = complexity_profile(&seqs)?;
    let mut rows = Vec::with_capacity(seqs.n());
    let mut all_agree = true;
    for n in 1..=seqs.n() {
        let entry = profile.entry(n);
        let (oracle_l, agree) = if opts.oracle {
            let brute = minimal_poly_bruteforce(&seqs, n)?;
            let same = brute.complexity == entry.complexity;
            all_agree &= same;
            (Some(brute.complexity), Some(same))
        } else {
            (None, None)
        };
        rows.push(ProfileRowOut {
            n,
            l: entry.complexity,
            q: entry.witness.to_string(),
            oracle_l,
            agree,
        });
    }
    let code = if all_agree { 0 } else { 1 };
    let out = SynthOut {
        p: field.p(),
        m: seqs.m(),
        profile: rows,
    };
    let rendered = match opts.format {
        Format::Json => to_json(&out)?,
        Format::Text => {
            let mut s = String::new();
            for row in &out.profile {
                match (row.oracle_l, row.agree) {
                    (Some(ol), Some(a)) => s.push_str(&format!(
                        "{} {} {} {} {}\n",
                        row.n,
                        row.l,
                        row.q,
                        ol,
                        if a { "agree" } else { "DISAGREE" }
                    )),
                    _ => s.push_str(&format!("{} {} {}\n", row.n, row.l, row.q)),
                }
            }
            s
        }
    };
    Ok((rendered, code))
}

enum Status {
    Pass(String),
    Fail(String),
    Skip(String),
}

impl Status {
    fn word(&self) -> &'static str {
        match self {
            Status::Pass(_) => "pass",
            Status::Fail(_) => "fail",
            Status::Skip(_) => "skip",
        }
    }

    fn detail(&self) -> &str {
        match self {
            Status::Pass(d) | Status::Fail(d) | Status::Skip(d) => d,
        }
    }
}

#[derive(Serialize)]
struct CheckOut {
    check: String,
    status: String,
    detail: String,
}

#[derive(Serialize)]
struct VerifyOut {
    p: u64,
    m: usize,
    checks: Vec<CheckOut>,
    verdict: String,
}

pub struct VerifyOpts {
    pub p: Option<u64>,
    pub m: Option<usize>,
    pub precision: Option<i64>,
    pub strategy: Strategy,
    pub oracle_degree: i64,
    pub jobs: usize,
    pub format: Format,
}

pub fn cmd_verify(
    input_text: Option<&str>,
    cf_override: Option<&str>,
    opts: &VerifyOpts,
) -> CmdResult {
    let raw = match input_text {
        Some(t) => parse_input(t)?,
        None => RawInput::default(),
    };
    let cf_text = match (cf_override, &raw.cf_text) {
        (Some(_), Some(_)) => {
            return Err(usage("two cf payloads given (--cf and a cf: line)"));
        }
        (Some(t), None) => Some(t.trim().strip_prefix("cf:").unwrap_or(t.trim()).trim().to_string()),
        (None, t) => t.clone(),
    };
    if cf_text.is_none() && raw.rows() == 0 {
        return Err(usage("verify needs series rows, a cf payload, or both"));
    }

    // The structure under test: parsed, or expanded from the rows.
    let given_cf = match &cf_text {
        Some(t) => {
            let cf = MPreCf::parse(t)?;
            if let Some(p) = opts.p.or(raw.p) {
                if p != cf.field().p() {
                    return Err(usage(format!(
                        "characteristic {p} conflicts with the cf payload (p={})",
                        cf.field().p()
                    )));
                }
            }
            if let Some(m) = opts.m.or(raw.m) {
                if m != cf.m() {
                    return Err(usage(format!(
                        "dimension {m} conflicts with the cf payload (m={})",
                        cf.m()
                    )));
                }
            }
            Some(cf)
        }
        None => None,
    };
    let field = match &given_cf {
        Some(cf) => cf.field(),
        None => field_of(opts.p, &raw)?,
    };

    // The series under test, reduced to positive valuation.
    let rows_r = if raw.rows() > 0 {
        if given_cf.is_none() {
            check_m(opts.m, &raw)?;
        }
        let r = build_series(&raw, field)?;
        if let Some(cf) = &given_cf {
            if r.m() != cf.m() {
                return Err(usage(format!(
                    "input has {} rows but the cf payload has m={}",
                    r.m(),
                    cf.m()
                )));
            }
        }
        Some(reduce_to_s(&r).1)
    } else {
        None
    };

    let budget = opts.precision.or(raw.n).unwrap_or(1 << 30);
    if budget < 1 {
        return Err(usage("precision must be at least 1"));
    }

    // Expand the rows when no structure was supplied.
    let expansion = match (&given_cf, &rows_r) {
        (None, Some(rs)) => {
            if rs.monomials().is_empty() {
                None
            } else {
                Some(expand(rs, opts.strategy.core(), budget)?)
            }
        }
        _ => None,
    };
    let cf = match (&given_cf, &expansion) {
        (Some(cf), _) => cf.clone(),
        (None, Some(exp)) => exp.cf.clone(),
        (None, None) => MPreCf::empty(field, rows_r.as_ref().map(SeriesVec::m).unwrap_or(1)),
    };
    let m = cf.m();
    let last = cf.omega() - 1;

    let mut checks: Vec<(&'static str, Status)> = Vec::new();

    // Conditions.
    let rep = cf.check_conditions();
    checks.push((
        "conditions",
        if rep.is_cf() {
            Status::Pass(if rep.cond4 { "strict".into() } else { "not strict".into() })
        } else {
            let bad: Vec<String> = [(1u8, rep.cond1), (2, rep.cond2), (3, rep.cond3)]
                .iter()
                .filter(|(_, ok)| !ok)
                .map(|(c, _)| c.to_string())
                .collect();
            let at = rep
                .first_violation
                .map(|k| format!(" (first violation at step {k})"))
                .unwrap_or_default();
            Status::Fail(format!("condition {} fails{at}", bad.join(",")))
        },
    ));

    // Quantities and convergents exist only past condition 1.
    let base = if rep.cond1 {
        let quants = cf.quantities()?;
        let conv = cf.convergents(last, true)?;
        Some((quants, conv))
    } else {
        None
    };

    // Denominator degrees.
    checks.push((
        "degrees",
        match &base {
            None => Status::Skip("needs condition 1".into()),
            Some((quants, conv)) => {
                let mismatch = (0..=last).find(|&k| {
                    conv.q(k).degree() != mcf_core::Degree::Finite(quants.d[k])
                });
                match mismatch {
                    Some(k) => Status::Fail(format!(
                        "denominator {k} has degree {} but the degree sum is {}",
                        conv.q(k).degree(),
                        quants.d[k]
                    )),
                    None => Status::Pass(format!("{} denominators match", last + 1)),
                }
            }
        },
    ));

    // The value the laws are checked against.
    let value = match (&rows_r, &base) {
        (Some(rs), _) => Some(rs.clone()),
        (None, Some((quants, _))) if rep.is_cf() => {
            let window = (quants.n[last] + 2).max(budget.min(256)).max(8) as usize;
            Some(cf.evaluate_phi(window)?.value)
        }
        _ => None,
    };

    // Approximation precision of each convergent.
    checks.push((
        "precision",
        match (&base, &value) {
            (None, _) => Status::Skip("needs condition 1".into()),
            (_, None) => Status::Skip("no value available".into()),
            (Some((quants, conv)), Some(value)) => {
                let mut confirmed = 0usize;
                let mut unconfirmed = 0usize;
                let mut failure = None;
                for k in 1..=last {
                    let got = match measure(value, conv.p(k - 1), conv.q(k - 1)) {
                        Ok(prec) => prec,
                        Err(Error::InsufficientPrecision(_)) => {
                            unconfirmed += 1;
                            continue;
                        }
                        Err(e) => return Err(e.into()),
                    };
                    let want = IndexedVal::new(cf.step(k).h, quants.n[k]);
                    match got {
                        Precision::Known(iv) if iv == want => confirmed += 1,
                        Precision::Known(iv) => {
                            failure = Some(format!(
                                "convergent {} reaches {iv}, predicted {want}",
                                k - 1
                            ));
                            break;
                        }
                        Precision::AtLeast(b) if b > want => {
                            failure = Some(format!(
                                "convergent {} reaches at least {b}, predicted exactly {want}",
                                k - 1
                            ));
                            break;
                        }
                        Precision::AtLeast(_) => unconfirmed += 1,
                    }
                }
                match failure {
                    Some(f) => Status::Fail(f),
                    None if unconfirmed == 0 => {
                        Status::Pass(format!("{confirmed} of {last} confirmed"))
                    }
                    None => Status::Pass(format!(
                        "{confirmed} of {last} confirmed, {unconfirmed} beyond the window"
                    )),
                }
            }
        },
    ));

    // Best approximation ladder, guarded.
    let degree_cap = opts.oracle_degree;
    let mut guard_count: u64 = 1;
    for _ in 0..degree_cap.max(0) {
        guard_count = guard_count.saturating_mul(field.p());
    }
    if guard_count > 1 << 24 {
        return Err(usage(format!(
            "refusing to enumerate {}^{degree_cap} denominators (guard 2^24); lower --oracle-degree",
            field.p()
        )));
    }
    checks.push((
        "best_approximation",
        match (&base, &value) {
            (None, _) => Status::Skip("needs condition 1".into()),
            (_, None) => Status::Skip("no value available".into()),
            (Some((quants, conv)), Some(value)) => {
                let claimed: Vec<(i64, Poly)> = (0..=last)
                    .filter(|&k| quants.d[k] <= degree_cap)
                    .map(|k| (quants.d[k], conv.q(k).clone()))
                    .collect();
                match verify_best(value, &claimed, degree_cap, opts.jobs) {
                    Ok(report) if report.pass => {
                        Status::Pass(format!("ladder confirmed to degree {degree_cap}"))
                    }
                    Ok(report) => Status::Fail(report.failures.join("; ")),
                    Err(Error::InsufficientPrecision(msg)) => Status::Skip(msg),
                    Err(e) => return Err(e.into()),
                }
            }
        },
    ));

    // Round trips between structures and values.
    checks.push((
        "round_trip",
        round_trip_status(&cf, &rep, &base, &rows_r, &expansion, given_cf.is_some())?,
    ));

    let verdict_fail = checks.iter().any(|(_, s)| matches!(s, Status::Fail(_)));
    let out = VerifyOut {
        p: field.p(),
        m,
        checks: checks
            .iter()
            .map(|(name, s)| CheckOut {
                check: (*name).into(),
                status: s.word().into(),
                detail: s.detail().into(),
            })
            .collect(),
        verdict: if verdict_fail { "fail".into() } else { "pass".into() },
    };
    let rendered = match opts.format {
        Format::Json => to_json(&out)?,
        Format::Text => {
            let mut s = String::new();
            for check in &out.checks {
                s.push_str(&format!(
                    "check {}: {} - {}\n",
                    check.check, check.status, check.detail
                ));
            }
            s.push_str(&format!("verdict: {}\n", out.verdict));
            s
        }
    };
    Ok((rendered, if verdict_fail { 1 } else { 0 }))
}

fn round_trip_status(
    cf: &MPreCf,
    rep: &mcf_core::cf::ConditionReport,
    base: &Option<(mcf_core::cf::CfQuantities, mcf_core::cf::ConvergentTable)>,
    rows_r: &Option<SeriesVec>,
    expansion: &Option<mcf_core::transform::Expansion>,
    given: bool,
) -> Result<Status, CliFailure> {
    let Some((quants, conv)) = base else {
        return Ok(Status::Skip("needs condition 1".into()));
    };
    let last = cf.omega() - 1;
    let mut parts: Vec<String> = Vec::new();

    // Value agreement when a series was supplied.
    if let Some(rs) = rows_r {
        match expansion {
            Some(exp) if exp.terminated => {
                // A completed expansion must reproduce the series over
                // its whole visible window.
                let (pp, qq) = conv.pair(last);
                match measure(rs, pp, qq)? {
                    Precision::Known(iv) if iv.is_infinity() => {
                        parts.push("value reproduced exactly".into())
                    }
                    Precision::AtLeast(_) => {
                        parts.push("value reproduced over the window".into())
                    }
                    Precision::Known(iv) => {
                        return Ok(Status::Fail(format!(
                            "value differs from the structure at {iv}"
                        )));
                    }
                }
            }
            Some(exp) => {
                // A capped expansion is certified up to its cap.
                let depth = exp
                    .certified_n
                    .min(rs.precision().unwrap_or(exp.certified_n))
                    .max(0);
                let phi = cf.evaluate_phi(depth as usize)?;
                if rs.eq_to_depth(&phi.value, depth)? {
                    parts.push(format!("value agrees to position {depth}"));
                } else {
                    return Ok(Status::Fail(format!(
                        "value disagrees with the structure within position {depth}"
                    )));
                }
            }
            None => {
                // Structure supplied separately: the series must not
                // contradict it anywhere up to its last step position;
                // the series may well continue past the structure.
                let (pp, qq) = conv.pair(last);
                let compatible = match measure(rs, pp, qq)? {
                    Precision::Known(iv) => {
                        iv.is_infinity()
                            || last == 0
                            || iv > IndexedVal::new(cf.step(last).h, quants.n[last])
                    }
                    Precision::AtLeast(_) => true,
                };
                if compatible {
                    parts.push("series is compatible with the structure".into());
                } else {
                    return Ok(Status::Fail(
                        "series contradicts the structure before its last step".into(),
                    ));
                }
            }
        }
    }

    // A complete strict structure must survive re-expansion step for step.
    let complete = given || expansion.as_ref().is_some_and(|e| e.terminated);
    if rep.is_strict() && complete && last > 0 {
        let (pp, qq) = conv.pair(last);
        let again = expand_fraction(pp, qq, EpsilonStrategy::Strict, 1 << 30)?;
        if again.cf.steps() == cf.steps() {
            parts.push("re-expansion reproduces the steps".into());
        } else {
            return Ok(Status::Fail(
                "re-expanding the value gives a different structure".into(),
            ));
        }
    } else if rows_r.is_none() {
        if !rep.is_strict() {
            return Ok(Status::Skip("needs all four conditions".into()));
        }
        if last == 0 {
            parts.push("empty structure".into());
        }
    }

    if parts.is_empty() {
        parts.push("nothing to compare".into());
    }
    Ok(Status::Pass(parts.join("; ")))
}
