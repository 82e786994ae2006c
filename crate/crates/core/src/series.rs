//! Truncated formal Laurent series over GF(p).
//!
//! A series sum_{t >= v} a_t z^-t is stored as an exact polynomial part
//! (exponents >= 0) plus a window of fractional coefficients a_1 ... a_N.
//! Invariants:
//! - `precision` = N means every coefficient at positions t <= N is known
//!   (positions count downward: position t holds the coefficient of z^-t,
//!   so the polynomial part lives at positions <= 0 and is always exact).
//! - `exact` means the series terminates inside the window: all
//!   coefficients beyond position N are zero. Exact series are normalized
//!   by trimming trailing zero window entries.
//! - Operations compute the provable result window from the operands'
//!   windows and valuations and never fabricate coefficients beyond it;
//!   a result whose provable window would not even cover the polynomial
//!   part is refused with [`Error::InsufficientPrecision`].
//! - The valuation of zero is plus infinity; an all-zero inexact window
//!   has an *undecidable* valuation, which is an error, not a value.
//!
//! Recomputing any derived quantity at higher precision never changes
//! coefficients reported at lower precision.

use crate::field::{FieldElem, PrimeField};
use crate::iv::{DiagExp, IndexedVal, Monomial, SupportSet};
use crate::poly::Poly;
use crate::{Error, Result};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TruncSeries {
    field: PrimeField,
    poly: Poly,
    /// frac[t-1] is the coefficient of z^-t, for t = 1..=precision.
    frac: Vec<FieldElem>,
    precision: usize,
    exact: bool,
}

/// Classification of a single series' valuation.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(crate) enum ValClass {
    /// Smallest position with a nonzero coefficient.
    Val(i64),
    /// Exactly the zero series; valuation plus infinity.
    ZeroExact,
    /// All stored coefficients are zero but deeper ones are unknown;
    /// the payload is the window depth N (true valuation is > N).
    ZeroWindow(i64),
}

impl TruncSeries {
    pub fn zero(field: PrimeField) -> TruncSeries {
        TruncSeries { field, poly: Poly::zero(field), frac: Vec::new(), precision: 0, exact: true }
    }

    /// An inexact all-zero window of the given depth.
    pub fn zero_window(field: PrimeField, precision: usize) -> TruncSeries {
        TruncSeries {
            field,
            poly: Poly::zero(field),
            frac: vec![0; precision],
            precision,
            exact: false,
        }
    }

    pub fn from_poly(poly: Poly) -> TruncSeries {
        TruncSeries { field: poly.field(), poly, frac: Vec::new(), precision: 0, exact: true }
    }

    /// Builds from an exact polynomial part and a fractional window.
    /// `frac[t-1]` is the coefficient of z^-t; precision = frac.len().
    pub fn from_parts(poly: Poly, frac: Vec<u64>, exact: bool) -> TruncSeries {
        let field = poly.field();
        let mut frac: Vec<FieldElem> = frac.into_iter().map(|c| field.elem(c)).collect();
        if exact {
            while frac.last() == Some(&0) {
                frac.pop();
            }
        }
        let precision = frac.len();
        TruncSeries { field, poly, frac, precision, exact }
    }

    /// A prefix window: coeffs[t-1] at position t, zero polynomial part,
    /// not exact (the sequence may continue).
    pub fn from_prefix(field: PrimeField, coeffs: &[u64]) -> TruncSeries {
        TruncSeries::from_parts(Poly::zero(field), coeffs.to_vec(), false)
    }

    /// Sparse construction from (exponent, coefficient) monomials.
    pub fn from_monomials(
        field: PrimeField,
        monomials: &[(i64, u64)],
        precision: usize,
        exact: bool,
    ) -> Result<TruncSeries> {
        let mut poly_coeffs: Vec<u64> = Vec::new();
        let mut frac = vec![0u64; precision];
        for &(e, c) in monomials {
            if e >= 0 {
                let e = e as usize;
                if poly_coeffs.len() <= e {
                    poly_coeffs.resize(e + 1, 0);
                }
                poly_coeffs[e] = field.add(field.elem(poly_coeffs[e]), field.elem(c));
            } else {
                let t = (-e) as usize;
                if t > precision {
                    return Err(Error::Domain(format!(
                        "monomial at exponent {e} is below the window (precision {precision})"
                    )));
                }
                frac[t - 1] = field.add(frac[t - 1], field.elem(c));
            }
        }
        Ok(TruncSeries::from_parts(Poly::from_coeffs(field, poly_coeffs), frac, exact))
    }

    /// Expands num/den to the given window depth by long division.
    /// The exact flag is set when the remainder vanishes, i.e. the
    /// series terminates provably.
    pub fn from_fraction(num: &Poly, den: &Poly, depth: usize) -> Result<TruncSeries> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (quot, mut rem) = num.divmod(den)?;
        let mut frac = vec![0u64; depth];
        for slot in frac.iter_mut() {
            if rem.is_zero() {
                break;
            }
            let (c, r) = rem.shift_up(1).divmod(den)?;
            debug_assert!(c.degree() <= crate::poly::Degree::Finite(0));
            *slot = c.coeff(0);
            rem = r;
        }
        Ok(TruncSeries::from_parts(quot, frac, rem.is_zero()))
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn poly_part(&self) -> &Poly {
        &self.poly
    }

    pub fn frac_coeffs(&self) -> &[FieldElem] {
        &self.frac
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// Depth to which coefficients are decidable: None means unbounded (exact).
    pub fn known_depth(&self) -> Option<i64> {
        if self.exact {
            None
        } else {
            Some(self.precision as i64)
        }
    }

    /// Coefficient at position t (of z^-t); None if beyond the window.
    pub fn coeff(&self, t: i64) -> Option<FieldElem> {
        if t <= 0 {
            Some(self.poly.coeff((-t) as usize))
        } else if t as usize <= self.precision {
            Some(self.frac[t as usize - 1])
        } else if self.exact {
            Some(0)
        } else {
            None
        }
    }

    /// True when provably the zero series.
    pub fn is_zero_exact(&self) -> bool {
        self.exact && self.poly.is_zero() && self.frac.iter().all(|c| *c == 0)
    }

    /// Nonzero stored monomials as (position, coefficient), ascending position.
    fn stored_terms(&self) -> Vec<(i64, FieldElem)> {
        let mut out: Vec<(i64, FieldElem)> = self
            .poly
            .terms()
            .map(|(e, c)| (-(e as i64), c))
            .collect();
        out.sort_by_key(|(t, _)| *t);
        for (i, c) in self.frac.iter().enumerate() {
            if *c != 0 {
                out.push((i as i64 + 1, *c));
            }
        }
        out
    }

    pub(crate) fn val_class(&self) -> ValClass {
        match self.stored_terms().first() {
            Some(&(t, _)) => ValClass::Val(t),
            None if self.exact => ValClass::ZeroExact,
            None => ValClass::ZeroWindow(self.precision as i64),
        }
    }

    /// Valuation: Ok(None) is plus infinity (zero series); an all-zero
    /// inexact window cannot decide and errors.
    pub fn valuation(&self) -> Result<Option<i64>> {
        match self.val_class() {
            ValClass::Val(v) => Ok(Some(v)),
            ValClass::ZeroExact => Ok(None),
            ValClass::ZeroWindow(n) => Err(Error::InsufficientPrecision(format!(
                "all coefficients to depth {n} vanish; valuation undecidable"
            ))),
        }
    }

    /// Sound lower bound for the valuation: the true valuation is >= this.
    fn val_lower_bound(&self) -> Option<i64> {
        match self.val_class() {
            ValClass::Val(v) => Some(v),
            ValClass::ZeroExact => None, // plus infinity
            ValClass::ZeroWindow(n) => Some(n + 1),
        }
    }

    pub fn floor(&self) -> Poly {
        self.poly.clone()
    }

    pub fn fract(&self) -> TruncSeries {
        TruncSeries {
            field: self.field,
            poly: Poly::zero(self.field),
            frac: self.frac.clone(),
            precision: self.precision,
            exact: self.exact,
        }
    }

    pub fn floor_fract(&self) -> (Poly, TruncSeries) {
        (self.floor(), self.fract())
    }

    fn check_field(&self, other: &TruncSeries) {
        assert_eq!(self.field, other.field, "series from different fields");
    }

    pub fn add(&self, other: &TruncSeries) -> TruncSeries {
        self.check_field(other);
        let poly = self.poly.add(&other.poly);
        let exact = self.exact && other.exact;
        let depth = match (self.known_depth(), other.known_depth()) {
            (None, None) => self.precision.max(other.precision) as i64,
            (a, b) => a.unwrap_or(i64::MAX).min(b.unwrap_or(i64::MAX)),
        };
        let mut frac = vec![0u64; depth.max(0) as usize];
        for (i, slot) in frac.iter_mut().enumerate() {
            let t = i as i64 + 1;
            *slot = self
                .field
                .add(self.coeff(t).unwrap(), other.coeff(t).unwrap());
        }
        TruncSeries::from_parts(poly, frac, exact)
    }

    pub fn neg(&self) -> TruncSeries {
        TruncSeries {
            field: self.field,
            poly: self.poly.neg(),
            frac: self.frac.iter().map(|c| self.field.neg(*c)).collect(),
            precision: self.precision,
            exact: self.exact,
        }
    }

    pub fn sub(&self, other: &TruncSeries) -> TruncSeries {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: FieldElem) -> TruncSeries {
        let c = self.field.elem(c);
        TruncSeries {
            field: self.field,
            poly: self.poly.scale(c),
            frac: self.frac.iter().map(|a| self.field.mul(*a, c)).collect(),
            precision: self.precision,
            exact: self.exact,
        }
        .renormalized()
    }

    fn renormalized(self) -> TruncSeries {
        TruncSeries::from_parts(self.poly, self.frac, self.exact)
    }

    /// Provable window of a product, as a depth bound (None = unbounded).
    fn mul_window(&self, other: &TruncSeries) -> Option<i64> {
        // Unknown coefficients of self live at positions > Ka; multiplied by
        // other they influence positions > Ka + v(other), and symmetrically.
        let part = |ka: Option<i64>, vb: Option<i64>| -> Option<i64> {
            match (ka, vb) {
                (None, _) => None,           // exact operand: no unknowns
                (Some(_), None) => None,     // other side is exactly zero
                (Some(ka), Some(vb)) => Some(ka + vb),
            }
        };
        let w1 = part(self.known_depth(), other.val_lower_bound());
        let w2 = part(other.known_depth(), self.val_lower_bound());
        match (w1, w2) {
            (None, None) => None,
            (a, b) => Some(a.unwrap_or(i64::MAX).min(b.unwrap_or(i64::MAX))),
        }
    }

    pub fn mul(&self, other: &TruncSeries) -> Result<TruncSeries> {
        self.check_field(other);
        if self.is_zero_exact() || other.is_zero_exact() {
            return Ok(TruncSeries::zero(self.field));
        }
        let window = self.mul_window(other);
        if let Some(w) = window {
            if w < 0 {
                return Err(Error::InsufficientPrecision(format!(
                    "product window {w} does not cover the polynomial part"
                )));
            }
        }
        let mut acc: BTreeMap<i64, FieldElem> = BTreeMap::new();
        for (t1, c1) in self.stored_terms() {
            for (t2, c2) in other.stored_terms() {
                let t = t1 + t2;
                if let Some(w) = window {
                    if t > w {
                        continue;
                    }
                }
                let e = acc.entry(t).or_insert(0);
                *e = self.field.add(*e, self.field.mul(c1, c2));
            }
        }
        let depth = window.unwrap_or_else(|| acc.keys().next_back().copied().unwrap_or(0).max(0));
        self.collect_positions(&acc, depth, window.is_none())
    }

    fn collect_positions(
        &self,
        acc: &BTreeMap<i64, FieldElem>,
        depth: i64,
        exact: bool,
    ) -> Result<TruncSeries> {
        let mut poly_coeffs: Vec<u64> = Vec::new();
        let mut frac = vec![0u64; depth.max(0) as usize];
        for (&t, &c) in acc {
            if c == 0 {
                continue;
            }
            if t <= 0 {
                let e = (-t) as usize;
                if poly_coeffs.len() <= e {
                    poly_coeffs.resize(e + 1, 0);
                }
                poly_coeffs[e] = c;
            } else if t <= depth {
                frac[t as usize - 1] = c;
            }
        }
        Ok(TruncSeries::from_parts(
            Poly::from_coeffs(self.field, poly_coeffs),
            frac,
            exact,
        ))
    }

    pub fn mul_poly(&self, q: &Poly) -> Result<TruncSeries> {
        self.mul(&TruncSeries::from_poly(q.clone()))
    }

    /// Reciprocal computed to window depth `depth`. Coefficient j of the
    /// inverse depends on the operand's coefficients up to j + 2 v(a), so
    /// the request is refused when that exceeds the operand's window.
    pub fn inv_to(&self, depth: i64) -> Result<TruncSeries> {
        let va = match self.valuation()? {
            Some(v) => v,
            None => return Err(Error::DivisionByZero),
        };
        let top = depth.max(0); // the polynomial part must always be covered
        if let Some(ka) = self.known_depth() {
            if top + 2 * va > ka {
                return Err(Error::InsufficientPrecision(format!(
                    "inverse to depth {depth} needs operand depth {}, have {ka}",
                    top + 2 * va
                )));
            }
        }
        let c = self.coeff(va).unwrap();
        let cinv = self.field.inv(c)?;
        // b[j] for j = -va ..= top, solved from (a*b)(j+va) = [j+va == 0].
        let mut b: BTreeMap<i64, FieldElem> = BTreeMap::new();
        for j in -va..=top {
            let rhs = if j + va == 0 { self.field.one() } else { 0 };
            let mut s = 0;
            for (&jp, &bc) in b.range(..j) {
                let i = j + va - jp;
                let ac = self.coeff(i).unwrap_or(0);
                s = self.field.add(s, self.field.mul(ac, bc));
            }
            b.insert(j, self.field.mul(cinv, self.field.sub(rhs, s)));
        }
        // A single exact monomial inverts exactly; otherwise only the window is known.
        let exact = self.exact && self.stored_terms().len() == 1;
        self.collect_positions(&b, top, false).map(|mut s| {
            if exact {
                s.exact = true;
                s = s.renormalized();
            }
            s
        })
    }

    /// Reciprocal to the deepest provable window (for exact operands, to
    /// the stored precision).
    pub fn inv(&self) -> Result<TruncSeries> {
        let va = match self.valuation()? {
            Some(v) => v,
            None => return Err(Error::DivisionByZero),
        };
        let depth = match self.known_depth() {
            Some(ka) => ka - 2 * va,
            None => self.precision as i64,
        };
        self.inv_to(depth)
    }

    /// self / other to the jointly provable window.
    pub fn div(&self, other: &TruncSeries) -> Result<TruncSeries> {
        if self.is_zero_exact() {
            // Still require a usable divisor.
            match other.valuation()? {
                Some(_) => return Ok(TruncSeries::zero(self.field)),
                None => return Err(Error::DivisionByZero),
            }
        }
        let vb = match other.valuation()? {
            Some(v) => v,
            None => return Err(Error::DivisionByZero),
        };
        let va = self.val_lower_bound().unwrap_or(0);
        let w1 = self.known_depth().map(|ka| ka - vb);
        let w2 = other.known_depth().map(|kb| kb + va - 2 * vb);
        let depth = match (w1, w2) {
            (None, None) => self.precision.max(other.precision) as i64,
            (a, b) => a.unwrap_or(i64::MAX).min(b.unwrap_or(i64::MAX)),
        };
        self.div_to(other, depth)
    }

    /// self / other to an explicit window depth.
    pub fn div_to(&self, other: &TruncSeries, depth: i64) -> Result<TruncSeries> {
        let va = self.val_lower_bound().unwrap_or(0);
        let inv = other.inv_to(depth - va)?;
        let prod = self.mul(&inv)?;
        Ok(prod.truncated(depth))
    }

    /// Restricts the window to `depth` (never extends knowledge; an exact
    /// series stays exact only if nothing nonzero is dropped).
    pub fn truncated(&self, depth: i64) -> TruncSeries {
        let depth = depth.max(0) as usize;
        if depth >= self.precision {
            return self.clone();
        }
        let kept: Vec<u64> = self.frac[..depth].to_vec();
        let dropped_nonzero = self.frac[depth..].iter().any(|c| *c != 0);
        TruncSeries::from_parts(self.poly.clone(), kept, self.exact && !dropped_nonzero)
    }

    /// Reinterprets the stored window as a terminating series (tail zeros).
    pub fn to_exact_prefix(&self) -> TruncSeries {
        TruncSeries::from_parts(self.poly.clone(), self.frac.clone(), true)
    }

    /// Structural agreement on all positions down to `depth`; errors if
    /// either side cannot decide some compared position.
    pub fn eq_to_depth(&self, other: &TruncSeries, depth: i64) -> Result<bool> {
        if self.poly != other.poly {
            return Ok(false);
        }
        for t in 1..=depth {
            let a = self.coeff(t).ok_or_else(|| {
                Error::InsufficientPrecision(format!("left side unknown at depth {t}"))
            })?;
            let b = other.coeff(t).ok_or_else(|| {
                Error::InsufficientPrecision(format!("right side unknown at depth {t}"))
            })?;
            if a != b {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Display for TruncSeries {
    /// Sparse `coeff@exponent` monomial list, descending exponent.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = self.stored_terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        terms.sort_by_key(|(t, _)| *t);
        let mut first = true;
        for (t, c) in terms {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            write!(f, "{c}@{}", -t)?;
        }
        Ok(())
    }
}

/// A vector of truncated series sharing one field.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SeriesVec {
    entries: Vec<TruncSeries>,
}

impl SeriesVec {
    pub fn new(entries: Vec<TruncSeries>) -> Result<SeriesVec> {
        if entries.is_empty() {
            return Err(Error::Domain("series vector needs at least one component".into()));
        }
        let field = entries[0].field();
        if entries.iter().any(|e| e.field() != field) {
            return Err(Error::FieldMismatch);
        }
        Ok(SeriesVec { entries })
    }

    pub fn zeros(field: PrimeField, m: usize) -> SeriesVec {
        SeriesVec { entries: vec![TruncSeries::zero(field); m] }
    }

    pub fn m(&self) -> usize {
        self.entries.len()
    }

    pub fn field(&self) -> PrimeField {
        self.entries[0].field()
    }

    pub fn entries(&self) -> &[TruncSeries] {
        &self.entries
    }

    /// 1-based component access.
    pub fn comp(&self, j: usize) -> &TruncSeries {
        &self.entries[j - 1]
    }

    /// Depth decidable for every component; None when all components are exact.
    pub fn precision(&self) -> Option<i64> {
        self.entries.iter().filter_map(|e| e.known_depth()).min()
    }

    pub fn is_exact(&self) -> bool {
        self.entries.iter().all(|e| e.is_exact())
    }

    pub fn is_zero_exact(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero_exact())
    }

    pub fn to_exact_prefix(&self) -> SeriesVec {
        SeriesVec { entries: self.entries.iter().map(|e| e.to_exact_prefix()).collect() }
    }

    pub fn add(&self, other: &SeriesVec) -> Result<SeriesVec> {
        self.zip(other, |a, b| Ok(a.add(b)))
    }

    pub fn sub(&self, other: &SeriesVec) -> Result<SeriesVec> {
        self.zip(other, |a, b| Ok(a.sub(b)))
    }

    fn zip(
        &self,
        other: &SeriesVec,
        f: impl Fn(&TruncSeries, &TruncSeries) -> Result<TruncSeries>,
    ) -> Result<SeriesVec> {
        if self.m() != other.m() {
            return Err(Error::DimensionMismatch { expected: self.m(), got: other.m() });
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| f(a, b))
            .collect::<Result<Vec<_>>>()?;
        SeriesVec::new(entries)
    }

    /// Componentwise product with a scalar series.
    pub fn mul_series(&self, u: &TruncSeries) -> Result<SeriesVec> {
        let entries = self
            .entries
            .iter()
            .map(|e| e.mul(u))
            .collect::<Result<Vec<_>>>()?;
        SeriesVec::new(entries)
    }

    pub fn floor_fract(&self) -> (Vec<Poly>, SeriesVec) {
        let floors = self.entries.iter().map(|e| e.floor()).collect();
        let fracts = SeriesVec { entries: self.entries.iter().map(|e| e.fract()).collect() };
        (floors, fracts)
    }

    /// Indexed valuation: min over components of (j, v_j). The zero vector
    /// gives the canonical top element (1, infinity). Errors when an
    /// undecidable component could still change the minimum.
    pub fn indexed_valuation(&self) -> Result<IndexedVal> {
        self.indexed_valuation_under(&DiagExp::identity(self.m()))
    }

    /// Indexed valuation after applying a diagonal weight diag(z^-c_j):
    /// component j's valuation shifts by +c_j.
    pub fn indexed_valuation_under(&self, d: &DiagExp) -> Result<IndexedVal> {
        if d.m() != self.m() {
            return Err(Error::DimensionMismatch { expected: self.m(), got: d.m() });
        }
        let mut best = IndexedVal::Infinity;
        let mut threats: Vec<IndexedVal> = Vec::new();
        for (idx, e) in self.entries.iter().enumerate() {
            let j = idx + 1;
            match e.val_class() {
                ValClass::Val(v) => {
                    let cand = IndexedVal::new(j, v + d.exp(j));
                    if cand < best {
                        best = cand;
                    }
                }
                ValClass::ZeroExact => {}
                ValClass::ZeroWindow(n) => {
                    // True component valuation is at least n+1.
                    threats.push(IndexedVal::new(j, n + 1 + d.exp(j)));
                }
            }
        }
        for threat in threats {
            if threat < best || best.is_infinity() {
                return Err(Error::InsufficientPrecision(format!(
                    "component {} vanishes through its window and could precede {}",
                    threat.h().unwrap(),
                    best
                )));
            }
        }
        Ok(best)
    }

    /// Indexed valuations of every stored monomial. The weight (monomial
    /// count) is only known when every component is exact.
    pub fn support(&self) -> SupportSet {
        let mut elements = std::collections::BTreeSet::new();
        let mut count = 0usize;
        for (idx, e) in self.entries.iter().enumerate() {
            for (t, _) in e.stored_terms() {
                elements.insert(IndexedVal::new(idx + 1, t));
                count += 1;
            }
        }
        let weight = if self.is_exact() { Some(count) } else { None };
        SupportSet { elements, weight }
    }

    pub fn supp_plus(&self) -> Result<IndexedVal> {
        self.support().supp_plus()
    }

    /// Stored monomials with 1-based component indices.
    pub fn monomials(&self) -> Vec<Monomial> {
        let mut out = Vec::new();
        for (idx, e) in self.entries.iter().enumerate() {
            for (t, c) in e.stored_terms() {
                out.push(Monomial { h: idx + 1, exp: -t, coeff: c });
            }
        }
        out
    }

    pub fn eq_to_depth(&self, other: &SeriesVec, depth: i64) -> Result<bool> {
        if self.m() != other.m() {
            return Err(Error::DimensionMismatch { expected: self.m(), got: other.m() });
        }
        for (a, b) in self.entries.iter().zip(&other.entries) {
            if !a.eq_to_depth(b, depth)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Both sides of the scaling law: Iv(r u) computed directly and via
/// shifting Iv(r) by v(u). They must agree whenever both are decidable.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ScaleIvCheck {
    pub direct: IndexedVal,
    pub via_lemma: IndexedVal,
}

impl ScaleIvCheck {
    pub fn agree(&self) -> bool {
        self.direct == self.via_lemma
    }
}

pub fn scale_iv_check(r: &SeriesVec, u: &TruncSeries) -> Result<ScaleIvCheck> {
    let vu = match u.valuation()? {
        Some(v) => v,
        None => return Err(Error::Domain("scaling law requires a nonzero scalar".into())),
    };
    let direct = r.mul_series(u)?.indexed_valuation()?;
    let via_lemma = r.indexed_valuation()?.shift(vu);
    Ok(ScaleIvCheck { direct, via_lemma })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Degree;

    fn gf(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn mono(field: PrimeField, e: i64, prec: usize) -> TruncSeries {
        TruncSeries::from_monomials(field, &[(e, 1)], prec, true).unwrap()
    }

    #[test]
    fn floor_fract_split() {
        let f = gf(2);
        // z^2 + 1 + z^-1, exact
        let s = TruncSeries::from_monomials(f, &[(2, 1), (0, 1), (-1, 1)], 4, true).unwrap();
        let (fl, fr) = s.floor_fract();
        assert_eq!(fl, Poly::from_coeffs(f, vec![1, 0, 1]));
        assert_eq!(fr, mono(f, -1, 4));
        // A pure fraction floors to zero.
        let s2 = mono(f, -1, 2);
        assert_eq!(s2.floor(), Poly::zero(f));
        assert_eq!(s2.fract(), s2);
    }

    #[test]
    fn valuation_rules() {
        let f = gf(2);
        assert_eq!(mono(f, 2, 0).valuation().unwrap(), Some(-2)); // v(z^2) = -2
        assert_eq!(mono(f, -3, 3).valuation().unwrap(), Some(3));
        assert_eq!(TruncSeries::zero(f).valuation().unwrap(), None);
        assert!(matches!(
            TruncSeries::zero_window(f, 4).valuation(),
            Err(Error::InsufficientPrecision(_))
        ));
    }

    #[test]
    fn addition_cancels_exactly() {
        let f = gf(2);
        let a = mono(f, -1, 4);
        let sum = a.add(&a);
        assert!(sum.is_zero_exact());
        // Window arithmetic: min of the two depths.
        let b = TruncSeries::from_parts(Poly::zero(f), vec![1, 0, 1, 0, 0, 1], false);
        let c = TruncSeries::from_parts(Poly::zero(f), vec![0, 1, 1, 1], false);
        let s = b.add(&c);
        assert_eq!(s.precision(), 4);
        assert!(!s.is_exact());
        assert_eq!(s.frac_coeffs(), &[1, 1, 0, 1]);
    }

    #[test]
    fn product_window_rule() {
        let f = gf(2);
        // a known to depth 4 with v=1; b known to depth 6 with v=2.
        let a = TruncSeries::from_parts(Poly::zero(f), vec![1, 1, 0, 1], false);
        let b = TruncSeries::from_parts(Poly::zero(f), vec![0, 1, 0, 0, 1, 1], false);
        let prod = a.mul(&b).unwrap();
        // min(4 + 2, 6 + 1) = 6
        assert_eq!(prod.precision(), 6);
        assert!(!prod.is_exact());
        // Exact times exact keeps everything.
        let e1 = TruncSeries::from_monomials(f, &[(1, 1), (-1, 1)], 1, true).unwrap();
        let e2 = mono(f, -2, 2);
        let p2 = e1.mul(&e2).unwrap();
        assert!(p2.is_exact());
        assert_eq!(p2.coeff(1).unwrap(), 1); // z * z^-2 = z^-1
        assert_eq!(p2.coeff(3).unwrap(), 1); // z^-1 * z^-2 = z^-3
    }

    #[test]
    fn product_outside_poly_window_is_refused() {
        let f = gf(2);
        // deg-3 polynomial times a depth-1 window: position -2 (z^2) would
        // depend on unknown coefficients.
        let big = TruncSeries::from_poly(Poly::monomial(f, 1, 3));
        let shallow = TruncSeries::from_parts(Poly::zero(f), vec![1], false);
        assert!(matches!(big.mul(&shallow), Err(Error::InsufficientPrecision(_))));
    }

    #[test]
    fn zero_times_anything_is_zero() {
        let f = gf(3);
        let z = TruncSeries::zero(f);
        let shallow = TruncSeries::from_parts(Poly::zero(f), vec![2], false);
        assert!(z.mul(&shallow).unwrap().is_zero_exact());
    }

    #[test]
    fn inverse_of_simple_pole() {
        let f = gf(2);
        // 1/(z^-1 + z^-2) = z + 1 + z^-1 + z^-2 + ...
        let a = TruncSeries::from_monomials(f, &[(-1, 1), (-2, 1)], 2, true).unwrap();
        let inv = a.inv_to(6).unwrap();
        assert_eq!(inv.poly_part(), &Poly::from_coeffs(f, vec![1, 1]));
        assert_eq!(inv.frac_coeffs(), &[1, 1, 1, 1, 1, 1]);
        assert!(!inv.is_exact());
        // Oracle: the product must be 1 on every jointly decidable position.
        let prod = a.mul(&inv).unwrap();
        assert_eq!(prod.poly_part(), &Poly::one(f));
        assert!(prod.frac_coeffs().iter().all(|c| *c == 0));
        assert!(prod.precision() >= 6);
    }

    #[test]
    fn inverse_of_z_plus_inv_z() {
        let f = gf(2);
        // 1/(z + z^-1) = z^-1 + z^-3 + z^-5 + ...
        let a = TruncSeries::from_monomials(f, &[(1, 1), (-1, 1)], 1, true).unwrap();
        let inv = a.inv_to(6).unwrap();
        assert!(inv.poly_part().is_zero());
        assert_eq!(inv.frac_coeffs(), &[1, 0, 1, 0, 1, 0]);
        let prod = a.mul(&inv).unwrap();
        assert_eq!(prod.poly_part(), &Poly::one(f));
        assert!(prod.frac_coeffs().iter().all(|c| *c == 0));
    }

    #[test]
    fn inverse_of_monomial_is_exact() {
        let f = gf(5);
        let a = TruncSeries::from_monomials(f, &[(-2, 3)], 2, true).unwrap();
        let inv = a.inv().unwrap();
        assert!(inv.is_exact());
        // 1/(3 z^-2) = 2 z^2 over GF(5)
        assert_eq!(inv.poly_part(), &Poly::monomial(f, 2, 2));
    }

    #[test]
    fn inverse_window_guard() {
        let f = gf(2);
        // v = 1 with window 1: the inverse's constant coefficient needs depth 2.
        let a = TruncSeries::from_parts(Poly::zero(f), vec![1], false);
        assert!(matches!(a.inv(), Err(Error::InsufficientPrecision(_))));
        assert!(matches!(
            TruncSeries::zero(f).inv(),
            Err(Error::DivisionByZero)
        ));
        // With window 2 the inverse is decidable exactly to depth 0.
        let b = TruncSeries::from_parts(Poly::zero(f), vec![1, 0], false);
        let inv = b.inv().unwrap();
        assert_eq!(inv.poly_part(), &Poly::monomial(f, 1, 1));
        assert_eq!(inv.precision(), 0);
    }

    #[test]
    fn division_and_fraction_expansion() {
        let f = gf(2);
        let z = Poly::monomial(f, 1, 1);
        let num = Poly::one(f);
        let den = z.add(&Poly::one(f)); // z + 1
        // 1/(z+1) = z^-1 + z^-2 + ... over GF(2)
        let s = TruncSeries::from_fraction(&num, &den, 5).unwrap();
        assert!(s.poly_part().is_zero());
        assert_eq!(s.frac_coeffs(), &[1, 1, 1, 1, 1]);
        assert!(!s.is_exact());
        // Terminating division is detected: z / z^2 = z^-1 exactly.
        let t = TruncSeries::from_fraction(&z, &z.mul(&z), 4).unwrap();
        assert!(t.is_exact());
        assert_eq!(t, mono(f, -1, 1));
        // div agrees with from_fraction on the common window.
        let a = TruncSeries::from_poly(num);
        let b = TruncSeries::from_poly(den);
        let q = a.div_to(&b, 5).unwrap();
        assert!(q.eq_to_depth(&s, 5).unwrap());
    }

    #[test]
    fn series_vec_indexed_valuation() {
        let f = gf(2);
        let r = SeriesVec::new(vec![mono(f, -2, 2), mono(f, -2, 2)]).unwrap();
        assert_eq!(r.indexed_valuation().unwrap(), IndexedVal::new(1, 2));
        let r2 = SeriesVec::new(vec![TruncSeries::zero(f), mono(f, -3, 3)]).unwrap();
        assert_eq!(r2.indexed_valuation().unwrap(), IndexedVal::new(2, 3));
        // Zero vector: the canonical top element.
        assert_eq!(
            SeriesVec::zeros(f, 3).indexed_valuation().unwrap(),
            IndexedVal::INFINITY
        );
        // A shallow all-zero window that could precede the known minimum.
        let r3 = SeriesVec::new(vec![TruncSeries::zero_window(f, 2), mono(f, -3, 3)]).unwrap();
        assert!(matches!(r3.indexed_valuation(), Err(Error::InsufficientPrecision(_))));
        // Deep enough to be harmless.
        let r4 = SeriesVec::new(vec![TruncSeries::zero_window(f, 3), mono(f, -3, 3)]).unwrap();
        assert_eq!(r4.indexed_valuation().unwrap(), IndexedVal::new(2, 3));
    }

    #[test]
    fn support_and_largest_element() {
        let f = gf(2);
        // (z^-1, z^2): monomial valuations (1,1) and (2,-2); largest is (1,1).
        let r = SeriesVec::new(vec![mono(f, -1, 1), mono(f, 2, 0)]).unwrap();
        let s = r.support();
        assert_eq!(s.weight, Some(2));
        assert_eq!(r.supp_plus().unwrap(), IndexedVal::new(1, 1));
        // Inexact components make the weight unknown and supp_plus an error.
        let r2 = SeriesVec::new(vec![
            TruncSeries::from_prefix(f, &[1, 0, 1]),
            mono(f, 2, 0),
        ])
        .unwrap();
        assert_eq!(r2.support().weight, None);
        assert!(r2.supp_plus().is_err());
        assert!(SeriesVec::zeros(f, 2).supp_plus().is_err());
    }

    #[test]
    fn scaling_law_examples() {
        let f = gf(2);
        let r = SeriesVec::new(vec![mono(f, -1, 1), mono(f, -2, 2)]).unwrap();
        let u = mono(f, -1, 1);
        let chk = scale_iv_check(&r, &u).unwrap();
        assert_eq!(chk.direct, IndexedVal::new(1, 2));
        assert!(chk.agree());
        // Scaling by z^2 shifts the other way.
        let u2 = mono(f, 2, 0);
        let chk2 = scale_iv_check(&r, &u2).unwrap();
        assert_eq!(chk2.direct, IndexedVal::new(1, -1));
        assert!(chk2.agree());
        assert!(scale_iv_check(&r, &TruncSeries::zero(f)).is_err());
    }

    #[test]
    fn truncation_soundness() {
        let f = gf(3);
        let s = TruncSeries::from_monomials(f, &[(0, 2), (-1, 1), (-4, 2)], 4, true).unwrap();
        let t = s.truncated(2);
        assert!(!t.is_exact(), "dropping a nonzero coefficient forfeits exactness");
        assert_eq!(t.precision(), 2);
        let t2 = s.truncated(4);
        assert!(t2.is_exact());
        // Truncating below the deepest nonzero keeps decided coefficients identical.
        for depth in 0..=2i64 {
            for pos in 1..=depth {
                assert_eq!(s.coeff(pos), t.coeff(pos));
            }
        }
    }

    #[test]
    fn display_monomial_list() {
        let f = gf(2);
        let s = TruncSeries::from_monomials(f, &[(1, 1), (-2, 1)], 2, true).unwrap();
        assert_eq!(s.to_string(), "1@1 1@-2");
        assert_eq!(TruncSeries::zero(f).to_string(), "0");
    }

    #[test]
    fn degree_of_zero_poly_part() {
        let f = gf(2);
        let s = TruncSeries::from_prefix(f, &[1]);
        assert_eq!(s.poly_part().degree(), Degree::NegInf);
    }
}
