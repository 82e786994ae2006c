//! Rational approximation of series vectors.
//!
//! For a target r and a nonzero denominator q the canonical numerator is
//! p = floor(r q), and the quality of the pair is measured by
//! Iv(r - p/q) = Iv({r q}) + deg q, larger meaning better. When r is known
//! only through a finite window the measurement may be a lower bound
//! rather than an exact value; [`Precision`] keeps the two cases apart and
//! only ever compares them when the window genuinely decides the order.
//!
//! [`best_profile_bruteforce`] enumerates every monic denominator degree by
//! degree and records, per degree, the best achievable precision together
//! with all witnesses. It is deliberately independent of the
//! continued-fraction machinery so it can serve as an oracle against it:
//! [`verify_best`] checks that the profile's strict-improvement degrees are
//! exactly a claimed ladder and that the claimed denominators achieve the
//! per-degree maxima.

use crate::iv::IndexedVal;
use crate::poly::Poly;
use crate::series::{SeriesVec, TruncSeries, ValClass};
use crate::{Error, Result};
use std::cmp::Ordering;
use std::fmt;

/// A measured approximation quality: either an exact indexed valuation or
/// a lower bound forced by a finite window (the true value is >= it).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Precision {
    Known(IndexedVal),
    AtLeast(IndexedVal),
}

impl Precision {
    /// Exact equality of target and approximant (rational targets only).
    pub fn is_exact_match(&self) -> bool {
        matches!(self, Precision::Known(iv) if iv.is_infinity())
    }

    pub fn shift(&self, dv: i64) -> Precision {
        match self {
            Precision::Known(iv) => Precision::Known(iv.shift(dv)),
            Precision::AtLeast(iv) => Precision::AtLeast(iv.shift(dv)),
        }
    }

    /// Compares two measurements where the data decides the order:
    /// two lower bounds with the same cutoff are indistinguishable and
    /// compare as equal; everything else undecided returns None.
    pub fn try_cmp(&self, other: &Precision) -> Option<Ordering> {
        use Precision::*;
        match (self, other) {
            (Known(a), Known(b)) => Some(a.cmp(b)),
            (AtLeast(a), AtLeast(b)) => (a == b).then_some(Ordering::Equal),
            (Known(a), AtLeast(b)) => (a < b).then_some(Ordering::Less),
            (AtLeast(a), Known(b)) => (b < a).then_some(Ordering::Greater),
        }
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Precision::Known(iv) => write!(f, "{iv}"),
            Precision::AtLeast(iv) => write!(f, ">={iv}"),
        }
    }
}

/// Iv of a window, or a lower bound when the window only shows zeros.
/// Errors when a component that vanishes through its window could still
/// change the visible minimum.
fn iv_or_bound(v: &SeriesVec) -> Result<Precision> {
    let mut best = IndexedVal::INFINITY;
    let mut bound = IndexedVal::INFINITY;
    let mut any_window = false;
    for (idx, e) in v.entries().iter().enumerate() {
        let j = idx + 1;
        match e.val_class() {
            ValClass::Val(val) => {
                let cand = IndexedVal::new(j, val);
                if cand < best {
                    best = cand;
                }
            }
            ValClass::ZeroExact => {}
            ValClass::ZeroWindow(n) => {
                any_window = true;
                let cand = IndexedVal::new(j, n + 1);
                if cand < bound {
                    bound = cand;
                }
            }
        }
    }
    if !any_window {
        Ok(Precision::Known(best))
    } else if best.is_infinity() {
        Ok(Precision::AtLeast(bound))
    } else if bound < best {
        Err(Error::InsufficientPrecision(format!(
            "a component vanishing through its window (bound {bound}) could precede {best}"
        )))
    } else {
        Ok(Precision::Known(best))
    }
}

/// An approximant with its canonical numerator and measured quality.
#[derive(Clone, Debug)]
pub struct RationalApprox {
    pub p: Vec<Poly>,
    pub q: Poly,
    pub precision: Precision,
}

/// Measures Iv(r - p/q) for an arbitrary numerator vector.
pub fn measure(r: &SeriesVec, p: &[Poly], q: &Poly) -> Result<Precision> {
    if q.is_zero() {
        return Err(Error::DivisionByZero);
    }
    if q.field() != r.field() || p.iter().any(|pj| pj.field() != r.field()) {
        return Err(Error::FieldMismatch);
    }
    if p.len() != r.m() {
        return Err(Error::DimensionMismatch { expected: r.m(), got: p.len() });
    }
    let dq = q.degree().finite().expect("nonzero");
    let diff = r
        .entries()
        .iter()
        .zip(p)
        .map(|(e, pj)| Ok(e.mul_poly(q)?.sub(&TruncSeries::from_poly(pj.clone()))))
        .collect::<Result<Vec<_>>>()?;
    Ok(iv_or_bound(&SeriesVec::new(diff)?)?.shift(dq))
}

/// The approximant of r with denominator q: numerator floor(r q) and its
/// precision. Needs the window of every inexact component to reach at
/// least deg q.
pub fn approximant(r: &SeriesVec, q: &Poly) -> Result<RationalApprox> {
    if q.is_zero() {
        return Err(Error::DivisionByZero);
    }
    if q.field() != r.field() {
        return Err(Error::FieldMismatch);
    }
    let dq = q.degree().finite().expect("nonzero");
    let rq = SeriesVec::new(
        r.entries()
            .iter()
            .map(|e| e.mul_poly(q))
            .collect::<Result<Vec<_>>>()?,
    )?;
    let (p, fract) = rq.floor_fract();
    let precision = iv_or_bound(&fract)?.shift(dq);
    Ok(RationalApprox { p, q: q.clone(), precision })
}

/// Splits off the polynomial part: r = floor(r) + {r}, with {r} in the
/// open unit ball. Denominator quality is invariant under this shift, so
/// approximation questions can always be reduced to the fractional part.
pub fn reduce_to_s(r: &SeriesVec) -> (Vec<Poly>, SeriesVec) {
    r.floor_fract()
}

/// Best precision at one denominator degree, with every monic witness.
#[derive(Clone, Debug)]
pub struct ProfileRow {
    pub degree: i64,
    pub best: Precision,
    pub witnesses: Vec<Poly>,
}

/// Per-degree best approximation data for degrees 0..=max.
#[derive(Clone, Debug)]
pub struct BestProfile {
    pub rows: Vec<ProfileRow>,
}

impl BestProfile {
    pub fn row(&self, degree: i64) -> &ProfileRow {
        &self.rows[degree as usize]
    }

    /// Degrees where the best precision strictly exceeds every lower
    /// degree's (degree 0 vacuously). The profile is monotone, so only the
    /// previous row needs consulting.
    pub fn jump_degrees(&self) -> Result<Vec<i64>> {
        let mut out = vec![0i64];
        for d in 1..self.rows.len() {
            match self.rows[d].best.try_cmp(&self.rows[d - 1].best) {
                Some(Ordering::Greater) => out.push(d as i64),
                Some(_) => {}
                None => {
                    return Err(Error::InsufficientPrecision(format!(
                        "window cannot order degrees {} and {}",
                        d - 1,
                        d
                    )));
                }
            }
        }
        Ok(out)
    }
}

fn monic_from_index(f: crate::field::PrimeField, degree: usize, index: u64) -> Poly {
    let p = f.p();
    let mut coeffs = vec![0u64; degree + 1];
    let mut idx = index;
    for c in coeffs.iter_mut().take(degree) {
        *c = idx % p;
        idx /= p;
    }
    coeffs[degree] = 1;
    Poly::from_coeffs(f, coeffs)
}

fn scan_degree(
    r: &SeriesVec,
    degree: usize,
    range: std::ops::Range<u64>,
) -> Result<(Precision, Vec<(u64, Poly)>)> {
    let f = r.field();
    let mut best: Option<Precision> = None;
    let mut witnesses: Vec<(u64, Poly)> = Vec::new();
    for index in range {
        let q = monic_from_index(f, degree, index);
        let prec = approximant(r, &q)?.precision;
        match &best {
            None => {
                best = Some(prec);
                witnesses.push((index, q));
            }
            Some(b) => match prec.try_cmp(b) {
                Some(Ordering::Greater) => {
                    best = Some(prec);
                    witnesses.clear();
                    witnesses.push((index, q));
                }
                Some(Ordering::Equal) => witnesses.push((index, q)),
                Some(Ordering::Less) => {}
                None => {
                    return Err(Error::InsufficientPrecision(format!(
                        "window cannot rank denominators of degree {degree}"
                    )));
                }
            },
        }
    }
    Ok((best.expect("nonempty range"), witnesses))
}

/// Exhaustive best-approximation profile over all monic denominators of
/// degree 0..=max_deg. `jobs` > 1 splits each degree's enumeration across
/// that many threads; the result is identical either way. Guarded against
/// enumerations beyond 2^24 candidates per degree.
pub fn best_profile_bruteforce(
    r: &SeriesVec,
    max_deg: i64,
    jobs: usize,
) -> Result<BestProfile> {
    if max_deg < 0 {
        return Err(Error::Domain("profile needs max_deg >= 0".into()));
    }
    let p = r.field().p();
    let mut count: u64 = 1;
    for _ in 0..max_deg {
        count = count.saturating_mul(p);
        if count > 1 << 24 {
            return Err(Error::Domain(format!(
                "{p}^{max_deg} monic denominators is beyond the enumeration guard"
            )));
        }
    }
    let mut rows = Vec::with_capacity(max_deg as usize + 1);
    for degree in 0..=max_deg as usize {
        let total = p.pow(degree as u32);
        let jobs = jobs.max(1).min(total as usize);
        let (best, mut indexed) = if jobs == 1 {
            scan_degree(r, degree, 0..total)?
        } else {
            let chunk = total.div_ceil(jobs as u64);
            let results: Vec<Result<(Precision, Vec<(u64, Poly)>)>> =
                std::thread::scope(|scope| {
                    let handles: Vec<_> = (0..jobs)
                        .filter_map(|i| {
                            let lo = i as u64 * chunk;
                            let hi = total.min(lo + chunk);
                            (lo < hi)
                                .then(|| scope.spawn(move || scan_degree(r, degree, lo..hi)))
                        })
                        .collect();
                    handles.into_iter().map(|h| h.join().expect("no panic")).collect()
                });
            let mut best: Option<Precision> = None;
            let mut merged: Vec<(u64, Poly)> = Vec::new();
            for res in results {
                let (local_best, local_wit) = res?;
                match &best {
                    None => {
                        best = Some(local_best);
                        merged = local_wit;
                    }
                    Some(b) => match local_best.try_cmp(b) {
                        Some(Ordering::Greater) => {
                            best = Some(local_best);
                            merged = local_wit;
                        }
                        Some(Ordering::Equal) => merged.extend(local_wit),
                        Some(Ordering::Less) => {}
                        None => {
                            return Err(Error::InsufficientPrecision(format!(
                                "window cannot rank denominators of degree {degree}"
                            )));
                        }
                    },
                }
            }
            (best.expect("nonempty"), merged)
        };
        indexed.sort_by_key(|(i, _)| *i);
        let row = ProfileRow {
            degree: degree as i64,
            best,
            witnesses: indexed.into_iter().map(|(_, q)| q).collect(),
        };
        if let Some(prev) = rows.last() {
            let prev: &ProfileRow = prev;
            if row.best.try_cmp(&prev.best) == Some(Ordering::Less) {
                return Err(Error::Internal(format!(
                    "profile is not monotone between degrees {} and {}",
                    prev.degree, row.degree
                )));
            }
        }
        rows.push(row);
    }
    Ok(BestProfile { rows })
}

/// Outcome of checking a claimed best-denominator ladder.
#[derive(Clone, Debug)]
pub struct BestReport {
    pub pass: bool,
    pub failures: Vec<String>,
    pub profile: BestProfile,
}

/// Verifies a claimed ladder of (degree, denominator) pairs against the
/// brute-force profile: the profile's strict-improvement degrees must be
/// exactly the claimed degrees within range, and each claimed denominator
/// must achieve its degree's maximum.
pub fn verify_best(
    r: &SeriesVec,
    claimed: &[(i64, Poly)],
    max_deg: i64,
    jobs: usize,
) -> Result<BestReport> {
    let profile = best_profile_bruteforce(r, max_deg, jobs)?;
    let mut failures = Vec::new();
    let jumps = profile.jump_degrees()?;
    let claimed_degrees: Vec<i64> = claimed
        .iter()
        .map(|(d, _)| *d)
        .filter(|&d| d <= max_deg)
        .collect();
    if jumps != claimed_degrees {
        failures.push(format!(
            "improvement degrees {jumps:?} differ from claimed {claimed_degrees:?}"
        ));
    }
    for (d, q) in claimed.iter().filter(|(d, _)| *d <= max_deg) {
        let prec = approximant(r, q)?.precision;
        if prec.try_cmp(&profile.row(*d).best) != Some(Ordering::Equal) {
            failures.push(format!(
                "claimed denominator {q} at degree {d} reaches {prec}, profile best is {}",
                profile.row(*d).best
            ));
        }
    }
    Ok(BestReport { pass: failures.is_empty(), failures, profile })
}
