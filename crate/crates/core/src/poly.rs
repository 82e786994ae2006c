//! Dense polynomials over GF(p).
//!
//! Invariants:
//! - Coefficients are stored ascending by exponent and kept normalized:
//!   no trailing zero, so the zero polynomial is the empty vector.
//! - Every polynomial carries its field; binary operations panic on a
//!   field mismatch (mixing moduli is a programming error, not data).
//! - The degree of the zero polynomial is [`Degree::NegInf`], a value
//!   strictly below every finite degree, so degree comparisons in the
//!   validity conditions are total.
//!
//! The textual form is sparse, descending by exponent, `+`-separated:
//! `z^2+1`, `2*z^3+z+2`, `0`. Coefficient 1 and exponent 1 are suppressed
//! (`z`, not `1*z^1`).

use crate::field::{FieldElem, PrimeField};
use crate::{Error, Result};
use std::fmt;

/// Total degree order with a dedicated bottom element for the zero polynomial.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum Degree {
    NegInf,
    Finite(i64),
}

impl Degree {
    pub fn finite(self) -> Option<i64> {
        match self {
            Degree::NegInf => None,
            Degree::Finite(d) => Some(d),
        }
    }

    /// Adds a constant; NegInf absorbs.
    pub fn plus(self, k: i64) -> Degree {
        match self {
            Degree::NegInf => Degree::NegInf,
            Degree::Finite(d) => Degree::Finite(d + k),
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInf => write!(f, "-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    field: PrimeField,
    /// coeffs[e] is the coefficient of z^e; empty means zero; last entry nonzero.
    coeffs: Vec<FieldElem>,
}

impl Poly {
    pub fn zero(field: PrimeField) -> Poly {
        Poly { field, coeffs: Vec::new() }
    }

    pub fn one(field: PrimeField) -> Poly {
        Poly::constant(field, 1)
    }

    pub fn constant(field: PrimeField, c: u64) -> Poly {
        Poly::from_coeffs(field, vec![field.elem(c)])
    }

    /// c * z^e with c reduced into the field.
    pub fn monomial(field: PrimeField, c: u64, e: usize) -> Poly {
        let mut coeffs = vec![0; e + 1];
        coeffs[e] = field.elem(c);
        Poly::from_coeffs(field, coeffs)
    }

    /// Ascending coefficients; normalizes trailing zeros. Values are reduced.
    pub fn from_coeffs(field: PrimeField, coeffs: Vec<u64>) -> Poly {
        let mut coeffs: Vec<u64> = coeffs.into_iter().map(|c| field.elem(c)).collect();
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly { field, coeffs }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Degree {
        if self.coeffs.is_empty() {
            Degree::NegInf
        } else {
            Degree::Finite(self.coeffs.len() as i64 - 1)
        }
    }

    pub fn coeff(&self, e: usize) -> FieldElem {
        self.coeffs.get(e).copied().unwrap_or(0)
    }

    pub fn leading(&self) -> FieldElem {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1
    }

    /// Nonzero terms as (exponent, coefficient), ascending.
    pub fn terms(&self) -> impl Iterator<Item = (usize, FieldElem)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(|(e, c)| (e, *c))
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    fn check_field(&self, other: &Poly) {
        assert_eq!(
            self.field, other.field,
            "polynomials from different fields"
        );
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.check_field(other);
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![0; n];
        for (e, slot) in out.iter_mut().enumerate() {
            *slot = self.field.add(self.coeff(e), other.coeff(e));
        }
        Poly::from_coeffs(self.field, out)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.check_field(other);
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![0; n];
        for (e, slot) in out.iter_mut().enumerate() {
            *slot = self.field.sub(self.coeff(e), other.coeff(e));
        }
        Poly::from_coeffs(self.field, out)
    }

    pub fn neg(&self) -> Poly {
        let out = self.coeffs.iter().map(|c| self.field.neg(*c)).collect();
        Poly::from_coeffs(self.field, out)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        self.check_field(other);
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.field);
        }
        let mut out = vec![0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = self.field.add(out[i + j], self.field.mul(*a, *b));
            }
        }
        Poly::from_coeffs(self.field, out)
    }

    pub fn scale(&self, c: FieldElem) -> Poly {
        let c = self.field.elem(c);
        let out = self.coeffs.iter().map(|a| self.field.mul(*a, c)).collect();
        Poly::from_coeffs(self.field, out)
    }

    /// Multiplication by z^k.
    pub fn shift_up(&self, k: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut out = vec![0; k];
        out.extend_from_slice(&self.coeffs);
        Poly { field: self.field, coeffs: out }
    }

    /// Euclidean division: self = q * div + r with deg r < deg div.
    pub fn divmod(&self, div: &Poly) -> Result<(Poly, Poly)> {
        self.check_field(div);
        if div.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let f = self.field;
        let dd = div.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return Ok((Poly::zero(f), self.clone()));
        }
        let lead_inv = f.inv(div.leading())?;
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = rem[i];
            if c == 0 {
                continue;
            }
            let q = f.mul(c, lead_inv);
            quot[i - dd] = q;
            for (j, b) in div.coeffs.iter().enumerate() {
                rem[i - dd + j] = f.sub(rem[i - dd + j], f.mul(q, *b));
            }
        }
        Ok((
            Poly::from_coeffs(f, quot),
            Poly::from_coeffs(f, rem),
        ))
    }

    /// Monic gcd; gcd(0,0) = 0.
    pub fn gcd(&self, other: &Poly) -> Poly {
        self.check_field(other);
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divmod(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            let inv = self.field.inv(a.leading()).expect("nonzero leading");
            a.scale(inv)
        }
    }

    /// Monic gcd of a whole slice; empty or all-zero slices give 0.
    pub fn gcd_all<'a>(polys: impl IntoIterator<Item = &'a Poly>) -> Option<Poly> {
        let mut acc: Option<Poly> = None;
        for p in polys {
            acc = Some(match acc {
                None => p.clone(),
                Some(g) => g.gcd(p),
            });
        }
        acc
    }

    /// Parses the sparse textual form; inverse of Display.
    pub fn parse(field: PrimeField, s: &str) -> Result<Poly> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut coeffs: Vec<(usize, u64)> = Vec::new();
        for term in s.split('+') {
            let term = term.trim();
            if term.is_empty() {
                return Err(Error::Parse(format!("empty term in {s:?}")));
            }
            let (c_str, z_str) = match term.split_once('*') {
                Some((c, z)) => (Some(c.trim()), z.trim()),
                None => (None, term),
            };
            let (coeff, exp) = if let Some(rest) = z_str.strip_prefix('z') {
                let exp: usize = if rest.is_empty() {
                    1
                } else if let Some(e) = rest.strip_prefix('^') {
                    e.trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad exponent in {term:?}")))?
                } else {
                    return Err(Error::Parse(format!("bad term {term:?}")));
                };
                let c: u64 = match c_str {
                    None => 1,
                    Some(c) => c
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad coefficient in {term:?}")))?,
                };
                (c, exp)
            } else if c_str.is_none() {
                let c: u64 = z_str
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad term {term:?}")))?;
                (c, 0)
            } else {
                return Err(Error::Parse(format!("bad term {term:?}")));
            };
            coeffs.push((exp, coeff));
        }
        let n = coeffs.iter().map(|(e, _)| e + 1).max().unwrap_or(0);
        let mut out = vec![0u64; n];
        for (e, c) in coeffs {
            out[e] = field.add(out[e], field.elem(c));
        }
        Ok(Poly::from_coeffs(field, out))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for e in (0..self.coeffs.len()).rev() {
            let c = self.coeffs[e];
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match (c, e) {
                (_, 0) => write!(f, "{c}")?,
                (1, 1) => write!(f, "z")?,
                (1, _) => write!(f, "z^{e}")?,
                (_, 1) => write!(f, "{c}*z")?,
                (_, _) => write!(f, "{c}*z^{e}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[p={}]({})", self.field.p(), self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn zero_degree_is_bottom() {
        let f = gf(2);
        assert_eq!(Poly::zero(f).degree(), Degree::NegInf);
        assert!(Degree::NegInf < Degree::Finite(-5));
        assert!(Degree::Finite(-1) < Degree::Finite(0));
        assert_eq!(Degree::NegInf.plus(7), Degree::NegInf);
        assert_eq!(Degree::Finite(2).plus(-3), Degree::Finite(-1));
    }

    #[test]
    fn normalization_drops_leading_zeros() {
        let f = gf(3);
        let p = Poly::from_coeffs(f, vec![1, 2, 0, 0]);
        assert_eq!(p.degree(), Degree::Finite(1));
        let q = Poly::from_coeffs(f, vec![0, 0, 3]); // 3 = 0 mod 3
        assert!(q.is_zero());
    }

    #[test]
    fn arithmetic_gf2() {
        let f = gf(2);
        let z = Poly::monomial(f, 1, 1);
        let one = Poly::one(f);
        let zp1 = z.add(&one);
        // (z+1)^2 = z^2 + 1 over GF(2)
        let sq = zp1.mul(&zp1);
        assert_eq!(sq, Poly::from_coeffs(f, vec![1, 0, 1]));
        assert_eq!(zp1.sub(&zp1), Poly::zero(f));
    }

    #[test]
    fn divmod_property() {
        let f = gf(5);
        let a = Poly::from_coeffs(f, vec![3, 1, 4, 1, 2]);
        let b = Poly::from_coeffs(f, vec![2, 0, 3]);
        let (q, r) = a.divmod(&b).unwrap();
        assert!(r.degree() < b.degree());
        assert_eq!(q.mul(&b).add(&r), a);
        assert_eq!(a.divmod(&Poly::zero(f)), Err(Error::DivisionByZero));
    }

    #[test]
    fn gcd_is_monic_common_divisor() {
        let f = gf(2);
        let z = Poly::monomial(f, 1, 1);
        let zp1 = z.add(&Poly::one(f));
        let a = z.mul(&zp1); // z^2+z
        let b = z.mul(&z); // z^2
        let g = a.gcd(&b);
        assert_eq!(g, z);
        assert_eq!(Poly::zero(f).gcd(&Poly::zero(f)), Poly::zero(f));
        // gcd over a slice
        let g2 = Poly::gcd_all([&a, &b, &z]).unwrap();
        assert_eq!(g2, z);
    }

    #[test]
    fn display_canonical_forms() {
        let f2 = gf(2);
        let f3 = gf(3);
        assert_eq!(Poly::zero(f2).to_string(), "0");
        assert_eq!(Poly::one(f2).to_string(), "1");
        assert_eq!(Poly::monomial(f2, 1, 1).to_string(), "z");
        assert_eq!(Poly::from_coeffs(f2, vec![1, 0, 1]).to_string(), "z^2+1");
        assert_eq!(
            Poly::from_coeffs(f3, vec![2, 1, 0, 2]).to_string(),
            "2*z^3+z+2"
        );
    }

    #[test]
    fn parse_round_trip() {
        let f3 = gf(3);
        for s in ["0", "1", "z", "z^2+1", "2*z^3+z+2", "z^5+2*z^2+2"] {
            let p = Poly::parse(f3, s).unwrap();
            assert_eq!(p.to_string(), s, "round trip of {s:?}");
        }
        // Spaces and unreduced coefficients are accepted on input.
        let p = Poly::parse(f3, " 4*z + 1 ").unwrap();
        assert_eq!(p.to_string(), "z+1");
        assert!(Poly::parse(f3, "").is_err());
        assert!(Poly::parse(f3, "z^").is_err());
        assert!(Poly::parse(f3, "q+1").is_err());
    }

    #[test]
    fn shift_and_scale() {
        let f = gf(5);
        let p = Poly::from_coeffs(f, vec![1, 2]);
        assert_eq!(p.shift_up(2), Poly::from_coeffs(f, vec![0, 0, 1, 2]));
        assert_eq!(p.scale(3), Poly::from_coeffs(f, vec![3, 6]));
        assert_eq!(p.neg().add(&p), Poly::zero(f));
    }
}
