//! Indexed valuations: the linear order on (component, valuation) pairs.
//!
//! A monomial z^x in component j has indexed valuation (j, -x). The order
//! puts valuation first, component index second:
//!   (h, v) < (h', v')  iff  v < v', or v = v' and h < h'.
//! The zero vector gets the canonical top element (1, infinity), strictly
//! greater than every finite pair. The equivalent indicator forms
//!   (i, x) < (j, y)  iff  x + L(i,j) <= y  iff  x - l(j,i) < y
//! with l(i,j) = [i > j], L(i,j) = [i >= j], are exposed and checked
//! against the definitional order in debug builds.
//!
//! [`DiagExp`] is a diagonal weight diag(z^-c_1, ..., z^-c_m): applying it
//! adds c_j to the valuation of everything in component j.

use crate::field::FieldElem;
use crate::poly::Poly;
use crate::{Error, Result};
use std::collections::BTreeSet;
use std::fmt;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum IndexedVal {
    Finite { h: usize, v: i64 },
    Infinity,
}

impl IndexedVal {
    pub fn new(h: usize, v: i64) -> IndexedVal {
        assert!(h >= 1, "components are 1-based");
        IndexedVal::Finite { h, v }
    }

    pub const INFINITY: IndexedVal = IndexedVal::Infinity;

    pub fn is_infinity(&self) -> bool {
        matches!(self, IndexedVal::Infinity)
    }

    pub fn h(&self) -> Option<usize> {
        match self {
            IndexedVal::Finite { h, .. } => Some(*h),
            IndexedVal::Infinity => None,
        }
    }

    pub fn v(&self) -> Option<i64> {
        match self {
            IndexedVal::Finite { v, .. } => Some(*v),
            IndexedVal::Infinity => None,
        }
    }

    /// Adds dv to the valuation; infinity absorbs (infinity + k = infinity).
    pub fn shift(self, dv: i64) -> IndexedVal {
        match self {
            IndexedVal::Finite { h, v } => IndexedVal::Finite { h, v: v + dv },
            IndexedVal::Infinity => IndexedVal::Infinity,
        }
    }
}

impl Ord for IndexedVal {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (self, other) {
            (IndexedVal::Infinity, IndexedVal::Infinity) => std::cmp::Ordering::Equal,
            (IndexedVal::Infinity, _) => std::cmp::Ordering::Greater,
            (_, IndexedVal::Infinity) => std::cmp::Ordering::Less,
            (IndexedVal::Finite { h, v }, IndexedVal::Finite { h: h2, v: v2 }) => {
                v.cmp(v2).then(h.cmp(h2))
            }
        }
    }
}

impl PartialOrd for IndexedVal {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for IndexedVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexedVal::Finite { h, v } => write!(f, "({h},{v})"),
            IndexedVal::Infinity => write!(f, "(1,inf)"),
        }
    }
}

/// l(i,j) = 1 iff i > j.
pub fn l_ind(i: usize, j: usize) -> i64 {
    (i > j) as i64
}

/// L(i,j) = 1 iff i >= j.
pub fn big_l_ind(i: usize, j: usize) -> i64 {
    (i >= j) as i64
}

/// Strict comparison. Equivalent indicator forms are asserted in debug builds.
pub fn iv_less(a: IndexedVal, b: IndexedVal) -> bool {
    let by_def = a < b;
    if let (IndexedVal::Finite { h: i, v: x }, IndexedVal::Finite { h: j, v: y }) = (a, b) {
        debug_assert_eq!(by_def, x + big_l_ind(i, j) <= y, "L-indicator form disagrees");
        debug_assert_eq!(by_def, x - l_ind(j, i) < y, "l-indicator form disagrees");
    }
    by_def
}

/// Diagonal weight diag(z^-c_1, ..., z^-c_m).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DiagExp {
    exps: Vec<i64>,
}

impl DiagExp {
    pub fn identity(m: usize) -> DiagExp {
        DiagExp { exps: vec![0; m] }
    }

    pub fn from_exps(exps: Vec<i64>) -> DiagExp {
        assert!(!exps.is_empty(), "dimension must be at least 1");
        DiagExp { exps }
    }

    pub fn m(&self) -> usize {
        self.exps.len()
    }

    /// c_j, 1-based.
    pub fn exp(&self, j: usize) -> i64 {
        self.exps[j - 1]
    }

    pub fn exps(&self) -> &[i64] {
        &self.exps
    }

    pub fn set_exp(&mut self, j: usize, c: i64) {
        self.exps[j - 1] = c;
    }
}

/// A single monomial coeff * z^exp in component h of a vector.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Monomial {
    pub h: usize,
    pub exp: i64,
    pub coeff: FieldElem,
}

impl Monomial {
    pub fn iv(&self) -> IndexedVal {
        IndexedVal::new(self.h, -self.exp)
    }

    /// Indexed valuation after applying a diagonal weight.
    pub fn iv_under(&self, d: &DiagExp) -> IndexedVal {
        IndexedVal::new(self.h, -self.exp + d.exp(self.h))
    }
}

/// The set of indexed valuations of a vector's monomials.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SupportSet {
    pub elements: BTreeSet<IndexedVal>,
    /// Number of nonzero monomials when that count is provable (exact data),
    /// None when the window may hide more.
    pub weight: Option<usize>,
}

impl SupportSet {
    /// Largest element; requires a provably complete, nonempty support.
    pub fn supp_plus(&self) -> Result<IndexedVal> {
        if self.weight.is_none() {
            return Err(Error::InsufficientPrecision(
                "support beyond the stored window is unknown".into(),
            ));
        }
        self.elements
            .iter()
            .next_back()
            .copied()
            .ok_or_else(|| Error::Domain("empty support has no largest element".into()))
    }
}

/// Indexed valuation of a polynomial vector under a diagonal weight:
/// min over monomials of (j, -exp + c_j); the zero vector gives infinity.
pub fn poly_vec_iv(a: &[Poly], d: &DiagExp) -> IndexedVal {
    assert_eq!(a.len(), d.m(), "vector and weight dimensions differ");
    let mut best = IndexedVal::Infinity;
    for (idx, p) in a.iter().enumerate() {
        let j = idx + 1;
        if let Some(deg) = p.degree().finite() {
            // The largest exponent gives the smallest valuation in component j.
            let cand = IndexedVal::new(j, -deg + d.exp(j));
            if cand < best {
                best = cand;
            }
        }
    }
    best
}

/// All monomials of a polynomial vector, with 1-based component indices.
pub fn poly_vec_monomials(a: &[Poly]) -> Vec<Monomial> {
    let mut out = Vec::new();
    for (idx, p) in a.iter().enumerate() {
        for (e, c) in p.terms() {
            out.push(Monomial { h: idx + 1, exp: e as i64, coeff: c });
        }
    }
    out
}

/// Support of a polynomial vector under a diagonal weight. Polynomials are
/// finite, so the weight is always known.
pub fn poly_vec_support(a: &[Poly], d: &DiagExp) -> SupportSet {
    assert_eq!(a.len(), d.m(), "vector and weight dimensions differ");
    let monomials = poly_vec_monomials(a);
    let elements = monomials.iter().map(|m| m.iv_under(d)).collect();
    SupportSet { elements, weight: Some(monomials.len()) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;

    #[test]
    fn order_examples() {
        let a = IndexedVal::new(2, 3);
        let b = IndexedVal::new(1, 4);
        assert!(iv_less(a, b), "valuation dominates index");
        assert!(iv_less(IndexedVal::new(1, 3), IndexedVal::new(2, 3)));
        assert!(iv_less(IndexedVal::new(1, 5), IndexedVal::INFINITY));
        assert!(!iv_less(IndexedVal::INFINITY, IndexedVal::INFINITY));
        assert!(IndexedVal::INFINITY > IndexedVal::new(9, i64::MAX - 1));
    }

    #[test]
    fn indicator_forms_agree_exhaustively() {
        // All component pairs up to m = 4, all valuations in -8..=8.
        for i in 1..=4usize {
            for j in 1..=4usize {
                for x in -8..=8i64 {
                    for y in -8..=8i64 {
                        let def = IndexedVal::new(i, x) < IndexedVal::new(j, y);
                        assert_eq!(def, x + big_l_ind(i, j) <= y, "L form at ({i},{x}),({j},{y})");
                        assert_eq!(def, x - l_ind(j, i) < y, "l form at ({i},{x}),({j},{y})");
                    }
                }
            }
        }
    }

    #[test]
    fn order_is_total_and_transitive() {
        let mut vals = vec![IndexedVal::INFINITY];
        for h in 1..=3 {
            for v in -2..=2 {
                vals.push(IndexedVal::new(h, v));
            }
        }
        for &a in &vals {
            for &b in &vals {
                let lt = a < b;
                let gt = b < a;
                let eq = a == b;
                assert_eq!(lt as u8 + gt as u8 + eq as u8, 1, "exactly one of <,>,= holds");
                for &c in &vals {
                    if a < b && b < c {
                        assert!(a < c);
                    }
                }
            }
        }
    }

    #[test]
    fn shift_behaves() {
        assert_eq!(IndexedVal::new(2, 3).shift(4), IndexedVal::new(2, 7));
        assert_eq!(IndexedVal::INFINITY.shift(-10), IndexedVal::INFINITY);
    }

    #[test]
    fn poly_vec_iv_and_support() {
        let f = PrimeField::new(2).unwrap();
        let m = 2;
        // a = (z, z^3): monomials (1,-1) and (2,-3); min is (2,-3).
        let a = vec![Poly::monomial(f, 1, 1), Poly::monomial(f, 1, 3)];
        let id = DiagExp::identity(m);
        assert_eq!(poly_vec_iv(&a, &id), IndexedVal::new(2, -3));
        // Under diag(z^-1, 1): component 1 shifts to (1, 0); min still (2,-3).
        let d = DiagExp::from_exps(vec![1, 0]);
        assert_eq!(poly_vec_iv(&a, &d), IndexedVal::new(2, -3));
        let s = poly_vec_support(&a, &d);
        assert_eq!(s.weight, Some(2));
        assert_eq!(s.supp_plus().unwrap(), IndexedVal::new(1, 0));
        // Zero vector: infinity valuation, empty support.
        let zero = vec![Poly::zero(f), Poly::zero(f)];
        assert_eq!(poly_vec_iv(&zero, &id), IndexedVal::INFINITY);
        assert!(poly_vec_support(&zero, &id).supp_plus().is_err());
    }

    #[test]
    fn tie_breaks_on_lowest_index() {
        let f = PrimeField::new(3).unwrap();
        // (z^2, z^2): both give valuation -2; index 1 wins.
        let a = vec![Poly::monomial(f, 1, 2), Poly::monomial(f, 2, 2)];
        assert_eq!(poly_vec_iv(&a, &DiagExp::identity(2)), IndexedVal::new(1, -2));
    }
}
