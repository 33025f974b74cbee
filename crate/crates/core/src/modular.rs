//! Exact arithmetic modulo word-sized primes and square-free composites.
//!
//! Every modulus is capped at 2^62, so products of two reduced values are
//! always evaluated exactly in a 128-bit intermediate.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// Exclusive upper bound on every modulus handled by this crate.
pub const MODULUS_LIMIT: u64 = 1 << 62;

/// Miller-Rabin bases that are a complete witness set for all n < 2^64.
const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    if (a | b) >> 32 == 0 {
        return a * b % m;
    }
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    // a, b < m < 2^62 so the sum cannot overflow
    let s = a + b;
    if s >= m {
        s - m
    } else {
        s
    }
}

#[inline]
pub fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        m - (b - a)
    }
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo any `m >= 2` by the extended Euclidean algorithm.
pub fn inverse_mod(a: u64, m: u64) -> Result<u64> {
    let a = a % m;
    if a == 0 {
        return Err(Error::ZeroInverse { modulus: m });
    }
    let (mut r0, mut r1) = (m as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return Err(Error::NotInvertible {
            value: a,
            modulus: m,
        });
    }
    Ok(t0.rem_euclid(m as i128) as u64)
}

/// Smallest number of bits that can encode every value in `[0, n)`.
///
/// `ceil_log2(1) == 0`: a single-valued message carries no information.
pub fn ceil_log2(n: u64) -> u32 {
    assert!(n >= 1, "ceil_log2 of zero");
    64 - (n - 1).leading_zeros()
}

/// An odd prime below [`MODULUS_LIMIT`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct PrimeModulus(u64);

impl PrimeModulus {
    pub fn new(p: u64) -> Result<Self> {
        if !(3..MODULUS_LIMIT).contains(&p) {
            return Err(Error::OutOfRange(format!("modulus {p} not in [3, 2^62)")));
        }
        if p % 2 == 0 || !is_prime(p)? {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeModulus(p))
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    /// (p - 1) / 2, the largest possible distance between two residues.
    #[inline]
    pub fn half(self) -> u64 {
        (self.0 - 1) / 2
    }

    /// Bits needed to send a raw residue.
    pub fn residue_bits(self) -> u32 {
        ceil_log2(self.0)
    }

    pub fn residue(self, value: u64) -> Residue {
        Residue {
            value: value % self.0,
            modulus: self.0,
        }
    }
}

impl TryFrom<u64> for PrimeModulus {
    type Error = Error;

    fn try_from(p: u64) -> Result<Self> {
        PrimeModulus::new(p)
    }
}

impl From<PrimeModulus> for u64 {
    fn from(p: PrimeModulus) -> u64 {
        p.0
    }
}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// An element of Z_m, always stored reduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Residue {
    value: u64,
    modulus: u64,
}

impl Residue {
    pub fn new(value: u64, modulus: u64) -> Result<Self> {
        if !(2..MODULUS_LIMIT).contains(&modulus) {
            return Err(Error::OutOfRange(format!(
                "modulus {modulus} not in [2, 2^62)"
            )));
        }
        if value >= modulus {
            return Err(Error::OutOfRange(format!(
                "{value} not reduced modulo {modulus}"
            )));
        }
        Ok(Residue { value, modulus })
    }

    #[inline]
    pub fn value(self) -> u64 {
        self.value
    }

    #[inline]
    pub fn modulus(self) -> u64 {
        self.modulus
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

pub fn mod_inverse(a: Residue, p: PrimeModulus) -> Result<Residue> {
    if a.modulus != p.get() {
        return Err(Error::MixedParameters);
    }
    if a.value == 0 {
        return Err(Error::ZeroInverse { modulus: p.get() });
    }
    Ok(p.residue(inverse_mod(a.value, p.get())?))
}

/// Deterministic primality test for `2 <= n < 2^62`.
pub fn is_prime(n: u64) -> Result<bool> {
    if !(2..MODULUS_LIMIT).contains(&n) {
        return Err(Error::OutOfRange(format!("{n} not in [2, 2^62)")));
    }
    for &w in &MR_WITNESSES {
        if n == w {
            return Ok(true);
        }
        if n % w == 0 {
            return Ok(false);
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MR_WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return Ok(false);
    }
    Ok(true)
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime_above(n: u64) -> Result<PrimeModulus> {
    if n < 2 {
        return Err(Error::OutOfRange(format!(
            "next_prime_above needs n >= 2, got {n}"
        )));
    }
    let mut candidate = n + 1;
    while candidate < MODULUS_LIMIT {
        if candidate % 2 == 1 && is_prime(candidate)? {
            return PrimeModulus::new(candidate);
        }
        candidate += 1;
    }
    Err(Error::OutOfRange(format!("no prime above {n} below 2^62")))
}

/// A set of distinct primes together with their product.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrtSystem {
    moduli: Vec<u64>,
    product: u64,
    /// `(N / p_i) * ((N / p_i)^-1 mod p_i)` for each factor.
    #[serde(skip)]
    basis: Vec<u64>,
}

impl CrtSystem {
    pub fn new(moduli: Vec<u64>) -> Result<Self> {
        if moduli.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut product: u64 = 1;
        for (i, &p) in moduli.iter().enumerate() {
            if p < 2 || !is_prime(p)? {
                return Err(Error::NotPrime(p));
            }
            if moduli[..i].contains(&p) {
                return Err(Error::NotSquareFree(p));
            }
            product = product
                .checked_mul(p)
                .filter(|&n| n < MODULUS_LIMIT)
                .ok_or_else(|| Error::OutOfRange("modulus product exceeds 2^62".into()))?;
        }
        let basis = moduli
            .iter()
            .map(|&p| {
                let cofactor = product / p;
                inverse_mod(cofactor % p, p).map(|inv| mul_mod(cofactor, inv, product))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CrtSystem {
            moduli,
            product,
            basis,
        })
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn product(&self) -> u64 {
        self.product
    }

    /// Componentwise reduction of `x` modulo every factor.
    pub fn split(&self, x: u64) -> Vec<Residue> {
        self.moduli
            .iter()
            .map(|&p| Residue {
                value: x % p,
                modulus: p,
            })
            .collect()
    }
}

/// The unique `x` in `[0, N)` congruent to `residues[i]` modulo each factor.
pub fn crt_combine(residues: &[Residue], system: &CrtSystem) -> Result<Residue> {
    if residues.len() != system.moduli.len() {
        return Err(Error::LengthMismatch {
            expected: system.moduli.len(),
            got: residues.len(),
        });
    }
    let n = system.product;
    let mut x = 0;
    for ((r, &p), &e) in residues.iter().zip(&system.moduli).zip(&system.basis) {
        if r.modulus != p {
            return Err(Error::MixedParameters);
        }
        x = add_mod(x, mul_mod(r.value, e, n), n);
    }
    Residue::new(x, n)
}
