//! Arithmetic in the prime field F_p for odd primes below 2^31.
//!
//! Residues are stored canonically in `[0, p)` as `u32`; every product of two
//! residues fits in a `u64`, so no wide arithmetic is ever needed.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest supported modulus (exclusive).
pub const MODULUS_LIMIT: u64 = 1 << 31;

/// The characteristic of the ambient field. Always an odd prime `3 <= p < 2^31`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeModulus(u32);

/// Deterministic primality test by trial division; `n < 2^31` keeps this under
/// ~23k divisions.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Smallest prime `>= n`.
pub fn next_prime(n: u64) -> u64 {
    let mut k = n.max(2);
    while !is_prime(k) {
        k += 1;
    }
    k
}

/// Largest prime `<= n`, if any.
pub fn prev_prime(n: u64) -> Option<u64> {
    (2..=n).rev().find(|&k| is_prime(k))
}

impl PrimeModulus {
    pub fn new(n: u64) -> Result<Self> {
        if !(3..MODULUS_LIMIT).contains(&n) {
            return Err(Error::OutOfRange(n));
        }
        if !is_prime(n) {
            return Err(Error::CompositeModulus(n));
        }
        Ok(PrimeModulus(n as u32))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn p64(self) -> u64 {
        self.0 as u64
    }

    /// Reduce an arbitrary signed integer into `[0, p)`.
    pub fn reduce_i64(self, v: i64) -> u32 {
        v.rem_euclid(self.0 as i64) as u32
    }

    pub fn reduce_u64(self, v: u64) -> u32 {
        (v % self.p64()) as u32
    }

    pub fn scalar(self, v: u64) -> Scalar {
        Scalar {
            value: self.reduce_u64(v),
            modulus: self,
        }
    }

    pub fn scalar_i64(self, v: i64) -> Scalar {
        Scalar {
            value: self.reduce_i64(v),
            modulus: self,
        }
    }

    pub fn zero(self) -> Scalar {
        self.scalar(0)
    }

    pub fn one(self) -> Scalar {
        self.scalar(1)
    }

    /// All residues `0..p` in increasing order.
    pub fn elements(self) -> impl Iterator<Item = Scalar> {
        (0..self.0).map(move |v| Scalar { value: v, modulus: self })
    }

    // Raw residue arithmetic. Inputs must already be reduced.

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        let p = self.p64();
        (if s >= p { s - p } else { s }) as u32
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            (a as u64 + self.p64() - b as u64) as u32
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p64()) as u32
    }

    pub fn pow(self, base: u32, mut exp: u64) -> u32 {
        let mut result = 1u32;
        let mut b = base;
        while exp > 0 {
            if exp & 1 == 1 {
                result = self.mul(result, b);
            }
            b = self.mul(b, b);
            exp >>= 1;
        }
        result
    }

    pub fn inv(self, a: u32) -> Result<u32> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        // Extended Euclid on (a, p).
        let (mut r0, mut r1) = (self.0 as i64, a as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(self.reduce_i64(t0))
    }

    /// Euler's criterion; zero counts as a square.
    pub fn is_square(self, a: u32) -> bool {
        a == 0 || self.pow(a, (self.p64() - 1) / 2) == 1
    }

    /// Canonical square root: the smaller of the two roots.
    pub fn sqrt(self, a: u32) -> Option<u32> {
        if a == 0 {
            return Some(0);
        }
        if !self.is_square(a) {
            return None;
        }
        let p = self.p64();
        let root = if p % 4 == 3 {
            self.pow(a, (p + 1) / 4)
        } else {
            self.tonelli_shanks(a)
        };
        let other = self.neg(root);
        Some(root.min(other))
    }

    fn tonelli_shanks(self, a: u32) -> u32 {
        let p = self.p64();
        let mut q = p - 1;
        let mut s = 0u32;
        while q % 2 == 0 {
            q /= 2;
            s += 1;
        }
        // Smallest quadratic non-residue; deterministic.
        let z = (2..self.0).find(|&z| !self.is_square(z)).expect("odd prime has a non-residue");
        let mut m = s;
        let mut c = self.pow(z, q);
        let mut t = self.pow(a, q);
        let mut r = self.pow(a, (q + 1) / 2);
        while t != 1 {
            let mut i = 0u32;
            let mut t2 = t;
            while t2 != 1 {
                t2 = self.mul(t2, t2);
                i += 1;
            }
            let b = self.pow(c, 1u64 << (m - i - 1));
            m = i;
            c = self.mul(b, b);
            t = self.mul(t, c);
            r = self.mul(r, b);
        }
        r
    }

    /// `-1` is a square exactly when `p = 1 mod 4`.
    pub fn minus_one_is_square(self) -> bool {
        self.is_square(self.0 - 1)
    }
}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for PrimeModulus {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_u32(self.0)
    }
}

/// Convenience wrapper for [`PrimeModulus::new`].
pub fn make_modulus(n: u64) -> Result<PrimeModulus> {
    PrimeModulus::new(n)
}

/// A residue of F_p tagged with its modulus.
///
/// Ordering compares the residue first, which is the lexicographic order used
/// for all tie-breaking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scalar {
    value: u32,
    modulus: PrimeModulus,
}

impl Scalar {
    pub fn new(value: u64, modulus: PrimeModulus) -> Self {
        modulus.scalar(value)
    }

    #[inline]
    pub fn value(self) -> u32 {
        self.value
    }

    #[inline]
    pub fn modulus(self) -> PrimeModulus {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    fn same_field(self, other: Scalar) -> Result<PrimeModulus> {
        if self.modulus == other.modulus {
            Ok(self.modulus)
        } else {
            Err(Error::ModulusMismatch)
        }
    }

    fn with(self, value: u32) -> Scalar {
        Scalar {
            value,
            modulus: self.modulus,
        }
    }

    pub fn try_add(self, rhs: Scalar) -> Result<Scalar> {
        let f = self.same_field(rhs)?;
        Ok(self.with(f.add(self.value, rhs.value)))
    }

    pub fn try_sub(self, rhs: Scalar) -> Result<Scalar> {
        let f = self.same_field(rhs)?;
        Ok(self.with(f.sub(self.value, rhs.value)))
    }

    pub fn try_mul(self, rhs: Scalar) -> Result<Scalar> {
        let f = self.same_field(rhs)?;
        Ok(self.with(f.mul(self.value, rhs.value)))
    }

    pub fn try_div(self, rhs: Scalar) -> Result<Scalar> {
        self.try_mul(rhs.inv()?)
    }

    pub fn inv(self) -> Result<Scalar> {
        Ok(self.with(self.modulus.inv(self.value)?))
    }

    pub fn pow(self, exp: u64) -> Scalar {
        self.with(self.modulus.pow(self.value, exp))
    }

    pub fn square(self) -> Scalar {
        self * self
    }

    pub fn is_square(self) -> bool {
        self.modulus.is_square(self.value)
    }

    /// The smaller square root, or `None` for non-residues.
    pub fn sqrt(self) -> Option<Scalar> {
        self.modulus.sqrt(self.value).map(|r| self.with(r))
    }
}

pub fn sqrt_mod(a: Scalar) -> Option<Scalar> {
    a.sqrt()
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_u32(self.value)
    }
}

// Operator forms panic on mixed moduli; use the `try_*` methods when the
// operands come from untrusted input.

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        self.try_add(rhs).expect("scalar modulus mismatch")
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        self.try_sub(rhs).expect("scalar modulus mismatch")
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        self.try_mul(rhs).expect("scalar modulus mismatch")
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.with(self.modulus.neg(self.value))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    #[test]
    fn modulus_construction() {
        assert_eq!(make_modulus(7).unwrap().get(), 7);
        assert_eq!(make_modulus(9), Err(Error::CompositeModulus(9)));
        assert_eq!(make_modulus(1 << 31), Err(Error::OutOfRange(1 << 31)));
        assert_eq!(make_modulus(2), Err(Error::OutOfRange(2)));
        assert_eq!(make_modulus(2147483647).unwrap().get(), 2147483647);
    }

    #[test]
    fn basic_ops() {
        let p = f(7);
        assert_eq!((p.scalar(3) * p.scalar(5)).value(), 1);
        assert_eq!(p.scalar(2).inv().unwrap().value(), 4);
        assert_eq!(p.scalar(0).inv(), Err(Error::DivisionByZero));
        assert_eq!(p.scalar(3).try_add(f(5).scalar(1)), Err(Error::ModulusMismatch));
        assert_eq!((-p.scalar(3)).value(), 4);
        assert_eq!(p.scalar_i64(-1).value(), 6);
    }

    #[test]
    fn square_roots() {
        assert_eq!(f(7).scalar(4).sqrt().unwrap().value(), 2);
        assert_eq!(f(5).scalar_i64(-1).sqrt().unwrap().value(), 2);
        assert_eq!(f(7).scalar_i64(-1).sqrt(), None);
        assert_eq!(f(13).scalar_i64(-1).sqrt().unwrap().value(), 5);
        assert_eq!(f(11).zero().sqrt().unwrap().value(), 0);
    }

    #[test]
    fn minus_one_square_iff_one_mod_four() {
        for p in (3..400u64).filter(|&p| is_prime(p)) {
            assert_eq!(f(p).minus_one_is_square(), p % 4 == 1, "p = {p}");
        }
    }

    #[test]
    fn sqrt_exhaustive_small_primes() {
        for p in [3u64, 5, 7, 13, 17, 41, 97, 257] {
            let m = f(p);
            let squares: std::collections::HashSet<u32> = (0..m.get()).map(|v| m.mul(v, v)).collect();
            for a in 0..m.get() {
                match m.sqrt(a) {
                    Some(r) => {
                        assert_eq!(m.mul(r, r), a);
                        assert!(r <= m.neg(r) || r == 0);
                    }
                    None => assert!(!squares.contains(&a)),
                }
            }
        }
    }

    #[test]
    fn prime_helpers() {
        assert_eq!(next_prime(65536), 65537);
        assert_eq!(prev_prime(100), Some(97));
        assert!(!is_prime(1));
        assert!(is_prime(2));
    }

    proptest! {
        #[test]
        fn field_axioms(a in 0u64..1_000_003, b in 0u64..1_000_003, c in 0u64..1_000_003) {
            let m = f(1_000_003);
            let (a, b, c) = (m.scalar(a), m.scalar(b), m.scalar(c));
            prop_assert_eq!((a + b) - b, a);
            prop_assert_eq!(a * (b + c), a * b + a * c);
            if !a.is_zero() {
                prop_assert_eq!(a.inv().unwrap() * a, m.one());
            }
            if let Some(r) = (a * a).sqrt() {
                prop_assert_eq!(r * r, a * a);
                prop_assert!(r.value() <= (-r).value());
            }
        }
    }
}
