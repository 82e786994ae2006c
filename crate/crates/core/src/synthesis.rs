//! Linear synthesis of multisequence prefixes.
//!
//! An m-row prefix of length n lists, for each component j, the first n
//! coefficients s_{j,1}, ..., s_{j,n} of a series Sum_t s_{j,t} z^-t. A
//! monic q is characteristic for the prefix when every windowed recurrence
//! sum vanishes:
//!   sum_i q_i s_{j,t+i} = 0  for all j and all 1 <= t <= n - deg q,
//! equivalently Iv({r q}) > (m, n - deg q) for the prefix series r. A q
//! with deg q >= n is characteristic vacuously.
//!
//! The minimal characteristic degree for each prefix length is the joint
//! linear complexity; [`complexity_profile`] reads the whole ladder off a
//! single capped expansion of the prefix series (the minimal degree jumps
//! to d_k exactly when the prefix length passes n_k), while
//! [`minimal_poly_bruteforce`] recomputes it by plain enumeration and is
//! kept independent so the two can be played against each other.

use crate::cf::MPreCf;
use crate::field::{FieldElem, PrimeField};
use crate::poly::Poly;
use crate::series::{SeriesVec, TruncSeries};
use crate::transform::{expand, EpsilonStrategy};
use crate::{Error, Result};

/// m coefficient rows of equal length n.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MultiSeqPrefix {
    field: PrimeField,
    rows: Vec<Vec<FieldElem>>,
}

impl MultiSeqPrefix {
    pub fn new(field: PrimeField, rows: Vec<Vec<FieldElem>>) -> Result<MultiSeqPrefix> {
        if rows.is_empty() {
            return Err(Error::Domain("need at least one sequence".into()));
        }
        let n = rows[0].len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Domain("sequence rows must have equal length".into()));
        }
        let rows = rows
            .into_iter()
            .map(|r| r.into_iter().map(|c| field.elem(c)).collect())
            .collect();
        Ok(MultiSeqPrefix { field, rows })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn m(&self) -> usize {
        self.rows.len()
    }

    /// Prefix length.
    pub fn n(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Vec<FieldElem>] {
        &self.rows
    }

    /// s_{j,t} with 1-based j and t.
    pub fn coeff(&self, j: usize, t: usize) -> FieldElem {
        self.rows[j - 1][t - 1]
    }

    /// The prefix as a series vector window of depth n.
    pub fn to_series(&self) -> SeriesVec {
        SeriesVec::new(
            self.rows
                .iter()
                .map(|r| TruncSeries::from_prefix(self.field, r))
                .collect(),
        )
        .expect("rows validated at construction")
    }

    /// Restriction to the first `n` coefficients.
    pub fn truncated(&self, n: usize) -> MultiSeqPrefix {
        MultiSeqPrefix {
            field: self.field,
            rows: self.rows.iter().map(|r| r[..n.min(r.len())].to_vec()).collect(),
        }
    }
}

/// Whether q satisfies every recurrence window of the first `n` columns.
/// Vacuously true once deg q >= n. Checked by direct convolution, so any
/// denominator degree is acceptable.
pub fn is_characteristic(seqs: &MultiSeqPrefix, q: &Poly, n: usize) -> Result<bool> {
    if q.is_zero() {
        return Err(Error::Domain("characteristic polynomials are nonzero".into()));
    }
    if q.field() != seqs.field {
        return Err(Error::FieldMismatch);
    }
    if n > seqs.n() {
        return Err(Error::InsufficientPrecision(format!(
            "prefix holds {} columns, {} requested",
            seqs.n(),
            n
        )));
    }
    let f = seqs.field;
    let dq = q.degree().finite().expect("nonzero") as usize;
    for j in 1..=seqs.m() {
        for t in 1..=n.saturating_sub(dq) {
            let mut acc = 0u64;
            for (i, qi) in q.coeffs().iter().enumerate() {
                acc = f.add(acc, f.mul(*qi, seqs.coeff(j, t + i)));
            }
            if acc != 0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Joint linear complexity at one prefix length, with a witness.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ProfileEntry {
    pub n: usize,
    pub complexity: i64,
    pub witness: Poly,
}

/// The complexity ladder for prefix lengths 1..=n.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ComplexityProfile {
    pub entries: Vec<ProfileEntry>,
}

impl ComplexityProfile {
    pub fn entry(&self, n: usize) -> &ProfileEntry {
        &self.entries[n - 1]
    }
}

/// Computes the whole complexity ladder from one expansion of the prefix
/// series: for each length n' the minimal characteristic degree is d_k for
/// the last emitted step with n_k <= n' (and 0 before the first step),
/// witnessed by that step's convergent denominator.
pub fn complexity_profile(seqs: &MultiSeqPrefix) -> Result<ComplexityProfile> {
    let n = seqs.n();
    if n == 0 {
        return Err(Error::Domain("empty prefix has no profile".into()));
    }
    let exp = expand(&seqs.to_series(), EpsilonStrategy::Zero, n as i64)?;
    let steps = exp.cf.omega() - 1;
    let table = exp.cf.convergents(steps, false)?;
    let quant = exp.cf.quantities()?;
    let mut entries = Vec::with_capacity(n);
    let mut k = 0usize;
    for len in 1..=n {
        while k < steps && exp.n_values[k] <= len as i64 {
            k += 1;
        }
        entries.push(ProfileEntry {
            n: len,
            complexity: quant.d[k],
            witness: table.q(k).clone(),
        });
    }
    Ok(ComplexityProfile { entries })
}

/// Minimal characteristic degree by enumeration, with every monic witness
/// at that degree. Independent of the expansion machinery.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BruteMinimal {
    pub complexity: i64,
    pub witnesses: Vec<Poly>,
}

pub fn minimal_poly_bruteforce(seqs: &MultiSeqPrefix, n: usize) -> Result<BruteMinimal> {
    let f = seqs.field;
    let p = f.p();
    for degree in 0..=n {
        let count = p
            .checked_pow(degree as u32)
            .filter(|&c| c <= 1 << 24)
            .ok_or_else(|| {
                Error::Domain(format!(
                    "{p}^{degree} candidate denominators is beyond the enumeration guard"
                ))
            })?;
        let mut witnesses = Vec::new();
        for index in 0..count {
            let mut coeffs = vec![0u64; degree + 1];
            let mut idx = index;
            for c in coeffs.iter_mut().take(degree) {
                *c = idx % p;
                idx /= p;
            }
            coeffs[degree] = 1;
            let q = Poly::from_coeffs(f, coeffs);
            if is_characteristic(seqs, &q, n)? {
                witnesses.push(q);
            }
        }
        if !witnesses.is_empty() {
            return Ok(BruteMinimal { complexity: degree as i64, witnesses });
        }
    }
    // deg q = n is always characteristic, so this point is unreachable.
    Err(Error::Internal("no characteristic polynomial found".into()))
}

/// Reconstructs the capped expansion structure behind a profile run;
/// exposed so callers can inspect the steps that produced the ladder.
pub fn synthesis_expansion(seqs: &MultiSeqPrefix) -> Result<MPreCf> {
    Ok(expand(&seqs.to_series(), EpsilonStrategy::Zero, seqs.n() as i64)?.cf)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn p2(s: &str) -> Poly {
        Poly::parse(gf(2), s).unwrap()
    }

    fn worked_prefix() -> MultiSeqPrefix {
        // The coefficient rows of (z^-1, z^-2) to depth 3.
        MultiSeqPrefix::new(gf(2), vec![vec![1, 0, 0], vec![0, 1, 0]]).unwrap()
    }

    #[test]
    fn characteristic_checks_by_hand() {
        let s = worked_prefix();
        assert!(is_characteristic(&s, &p2("z^2"), 2).unwrap());
        // q = z fails: the window demands s_{2,2} = 0.
        assert!(!is_characteristic(&s, &p2("z"), 2).unwrap());
        // Degree >= n is vacuous.
        assert!(is_characteristic(&s, &p2("z^3+z+1"), 3).unwrap());
        assert!(is_characteristic(&s, &p2("z^2"), 3).unwrap());
        assert!(!is_characteristic(&s, &p2("1"), 1).unwrap());
        assert!(is_characteristic(&s, &p2("0"), 1).is_err());
        assert!(is_characteristic(&s, &p2("z"), 9).is_err());
    }

    #[test]
    fn characteristic_agrees_with_series_window() {
        // Direct convolution against the series formulation: {r q} must
        // vanish through depth n - deg q.
        let s = worked_prefix();
        let r = s.to_series();
        for q in [p2("z"), p2("z+1"), p2("z^2"), p2("z^2+z")] {
            let n = 3usize;
            let dq = q.degree().finite().unwrap();
            let rq = SeriesVec::new(
                r.entries().iter().map(|e| e.mul_poly(&q)).collect::<Result<Vec<_>>>().unwrap(),
            )
            .unwrap();
            let (_, fract) = rq.floor_fract();
            let zeros = SeriesVec::zeros(gf(2), 2);
            let vanish = fract.eq_to_depth(&zeros, n as i64 - dq).unwrap();
            assert_eq!(vanish, is_characteristic(&s, &q, n).unwrap(), "q = {q}");
        }
    }

    #[test]
    fn ladder_of_worked_example() {
        let profile = complexity_profile(&worked_prefix()).unwrap();
        let want = [(1, 1, "z"), (2, 2, "z^2"), (3, 2, "z^2")];
        for (n, complexity, witness) in want {
            let e = profile.entry(n);
            assert_eq!(e.complexity, complexity, "length {n}");
            assert_eq!(e.witness, p2(witness), "length {n}");
        }
        // Each witness is characteristic at its length, and matches the
        // enumeration oracle's minimal degree.
        for e in &profile.entries {
            assert!(is_characteristic(&worked_prefix(), &e.witness, e.n).unwrap());
            let brute = minimal_poly_bruteforce(&worked_prefix(), e.n).unwrap();
            assert_eq!(brute.complexity, e.complexity);
            assert!(brute.witnesses.contains(&e.witness));
        }
    }

    #[test]
    fn brute_minimal_witnesses_are_exhaustive() {
        let brute = minimal_poly_bruteforce(&worked_prefix(), 3).unwrap();
        assert_eq!(brute.complexity, 2);
        assert_eq!(brute.witnesses, vec![p2("z^2")]);
    }

    #[test]
    fn zero_prefix_has_complexity_zero() {
        let s = MultiSeqPrefix::new(gf(3), vec![vec![0, 0], vec![0, 0]]).unwrap();
        let profile = complexity_profile(&s).unwrap();
        for e in &profile.entries {
            assert_eq!(e.complexity, 0);
            assert_eq!(e.witness, Poly::one(gf(3)));
        }
        let brute = minimal_poly_bruteforce(&s, 2).unwrap();
        assert_eq!(brute.complexity, 0);
        assert_eq!(brute.witnesses, vec![Poly::one(gf(3))]);
    }

    #[test]
    fn single_sequence_matches_classical_complexity() {
        // 1, 1, 0, 1 over GF(2): complexities 1, 1, 2, 2.
        let s = MultiSeqPrefix::new(gf(2), vec![vec![1, 1, 0, 1]]).unwrap();
        let profile = complexity_profile(&s).unwrap();
        let got: Vec<i64> = profile.entries.iter().map(|e| e.complexity).collect();
        let brute: Vec<i64> = (1..=4)
            .map(|n| minimal_poly_bruteforce(&s, n).unwrap().complexity)
            .collect();
        assert_eq!(got, brute);
        assert_eq!(got, vec![1, 1, 2, 2]);
    }

    #[test]
    fn construction_guards() {
        assert!(MultiSeqPrefix::new(gf(2), vec![]).is_err());
        assert!(MultiSeqPrefix::new(gf(2), vec![vec![1], vec![1, 0]]).is_err());
        let empty = MultiSeqPrefix::new(gf(2), vec![vec![], vec![]]).unwrap();
        assert!(complexity_profile(&empty).is_err());
    }
}
