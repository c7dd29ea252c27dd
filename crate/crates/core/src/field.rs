//! Prime-field arithmetic on word-sized canonical residues.
//!
//! A [`FieldContext`] fixes the modulus once (checked for primality at
//! construction) and every operation goes through it, so elements stay plain
//! `u64` residues in `[0, p)`. The default modulus is the Mersenne prime
//! `2^61 - 1`, which admits a shift-and-add reduction; any other word-sized
//! prime works through the generic `u128` path.

use rand::Rng;
use thiserror::Error;

/// Default modulus: the Mersenne prime `2^61 - 1`.
pub const DEFAULT_PRIME: u64 = (1 << 61) - 1;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} does not fit in 63 bits")]
    TooLarge(u64),
    #[error("division by zero")]
    DivisionByZero,
}

/// A canonical residue in `[0, p)` under the context that produced it.
///
/// Elements are only meaningful under their creating context; arithmetic on
/// residues from different contexts is a programming error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct FieldElement(pub u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldContext {
    p: u64,
}

impl Default for FieldContext {
    fn default() -> Self {
        FieldContext { p: DEFAULT_PRIME }
    }
}

impl FieldContext {
    /// Builds a context for the prime modulus `p`.
    ///
    /// The modulus must fit in 63 bits so that sums of two residues never
    /// overflow a `u64`.
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p >= 1 << 63 {
            return Err(FieldError::TooLarge(p));
        }
        if p < 2 || !is_prime_u64(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(FieldContext { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Canonicalizes an arbitrary integer into the field.
    pub fn element(&self, v: u64) -> FieldElement {
        FieldElement(v % self.p)
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement(0)
    }

    pub fn one(&self) -> FieldElement {
        // p >= 2, so 1 is canonical.
        FieldElement(1)
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        debug_assert!(a.0 < self.p && b.0 < self.p);
        let s = a.0 + b.0; // both < 2^63, no overflow
        FieldElement(if s >= self.p { s - self.p } else { s })
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        debug_assert!(a.0 < self.p && b.0 < self.p);
        FieldElement(if a.0 >= b.0 { a.0 - b.0 } else { a.0 + self.p - b.0 })
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        debug_assert!(a.0 < self.p);
        FieldElement(if a.0 == 0 { 0 } else { self.p - a.0 })
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        debug_assert!(a.0 < self.p && b.0 < self.p);
        let wide = a.0 as u128 * b.0 as u128;
        if self.p == DEFAULT_PRIME {
            FieldElement(reduce_mersenne61(wide))
        } else {
            FieldElement((wide % self.p as u128) as u64)
        }
    }

    pub fn pow(&self, base: FieldElement, mut exp: u64) -> FieldElement {
        debug_assert!(base.0 < self.p);
        let mut acc = self.one();
        let mut b = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via Fermat's little theorem.
    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        debug_assert!(a.0 < self.p);
        if a.0 == 0 {
            return Err(FieldError::DivisionByZero);
        }
        Ok(self.pow(a, self.p - 2))
    }

    /// Uniform draw from `[0, p)`.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        FieldElement(rng.gen_range(0..self.p))
    }
}

/// Reduces a product of two residues below `2^61 - 1` by folding 61-bit limbs.
#[inline]
fn reduce_mersenne61(x: u128) -> u64 {
    const P: u64 = DEFAULT_PRIME;
    // x < 2^122: split into low 61 bits and the (at most 61-bit) remainder.
    let lo = (x as u64) & P;
    let hi = (x >> 61) as u64;
    let mut s = lo + hi; // < 2^62
    s = (s & P) + (s >> 61);
    if s >= P {
        s -= P;
    }
    s
}

fn mulmod_u64(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

fn powmod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod_u64(acc, base, m);
        }
        base = mulmod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit integers.
fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &q in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n.is_multiple_of(q) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    // This witness set decides primality for every n < 2^64.
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..r - 1 {
            x = mulmod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
