//! The prime field GF(p) with the modulus chosen at runtime.
//!
//! Elements are plain `u64` residues kept reduced, 0 <= value < p; all
//! arithmetic goes through a [`PrimeField`] context. Moduli are validated
//! prime at construction. Multiplication widens to u128, so any prime
//! below 2^63 is safe; the enumeration guards elsewhere keep practical
//! moduli far smaller.

use crate::{Error, Result};

/// A residue mod p. Always reduced; produced by [`PrimeField`] methods.
pub type FieldElem = u64;

/// Context for arithmetic mod a fixed prime p.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct PrimeField {
    p: u64,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.checked_mul(d).map_or(false, |sq| sq <= n) {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Reduce an unsigned integer into the field.
    pub fn elem(&self, x: u64) -> FieldElem {
        x % self.p
    }

    /// Reduce a signed integer into the field.
    pub fn elem_i64(&self, x: i64) -> FieldElem {
        let p = self.p as i64;
        (((x % p) + p) % p) as u64
    }

    pub fn zero(&self) -> FieldElem {
        0
    }

    pub fn one(&self) -> FieldElem {
        1 % self.p
    }

    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    pub fn neg(&self, a: FieldElem) -> FieldElem {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    /// Multiplicative inverse via extended Euclid.
    pub fn inv(&self, a: FieldElem) -> Result<FieldElem> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        // Invariant: r0 = t0*a (mod p), r1 = t1*a (mod p).
        let (mut r0, mut r1) = (self.p as i128, a as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1, "modulus is prime, gcd must be 1");
        let p = self.p as i128;
        Ok((((t0 % p) + p) % p) as u64)
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, mut a: FieldElem, mut e: u64) -> FieldElem {
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_primes() {
        for n in [0u64, 1, 4, 6, 9, 15, 21, 25, 91] {
            assert_eq!(PrimeField::new(n), Err(Error::NotPrime(n)));
        }
        for n in [2u64, 3, 5, 7, 11, 13, 101, 65537] {
            assert!(PrimeField::new(n).is_ok());
        }
    }

    #[test]
    fn gf2_arithmetic() {
        let f = PrimeField::new(2).unwrap();
        assert_eq!(f.add(1, 1), 0);
        assert_eq!(f.sub(0, 1), 1);
        assert_eq!(f.neg(1), 1);
        assert_eq!(f.mul(1, 1), 1);
        assert_eq!(f.inv(1).unwrap(), 1);
    }

    #[test]
    fn gf7_inverses() {
        let f = PrimeField::new(7).unwrap();
        for a in 1..7 {
            let b = f.inv(a).unwrap();
            assert_eq!(f.mul(a, b), 1, "inv({a}) = {b} must satisfy a*b = 1");
        }
        assert_eq!(f.inv(0), Err(Error::DivisionByZero));
    }

    #[test]
    fn signed_reduction() {
        let f = PrimeField::new(5).unwrap();
        assert_eq!(f.elem_i64(-1), 4);
        assert_eq!(f.elem_i64(-5), 0);
        assert_eq!(f.elem_i64(13), 3);
    }

    #[test]
    fn field_axioms_small_primes() {
        // Exhaustive associativity/distributivity for tiny p.
        for p in [2u64, 3, 5] {
            let f = PrimeField::new(p).unwrap();
            for a in 0..p {
                for b in 0..p {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    assert_eq!(f.sub(f.add(a, b), b), a);
                    for c in 0..p {
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                        assert_eq!(f.add(a, f.add(b, c)), f.add(f.add(a, b), c));
                        assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
                    }
                }
            }
        }
    }

    #[test]
    fn pow_matches_repeated_mul() {
        let f = PrimeField::new(13).unwrap();
        for a in 0..13 {
            let mut acc = 1;
            for e in 0..20u64 {
                assert_eq!(f.pow(a, e), acc);
                acc = f.mul(acc, a);
            }
        }
    }
}
