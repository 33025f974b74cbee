//! Maximal no-wrap arithmetic progressions in Z_p, their sumsets, and the
//! brute-force set machinery used to check them.
//!
//! A sumset of progressions sharing a difference `D` is itself a run of
//! consecutive `+D` steps, so it is stored as a start residue and a length
//! rather than as a set.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::modular::{add_mod, inverse_mod, mul_mod, sub_mod, PrimeModulus, Residue};

/// Largest modulus a [`DenseSet`] will represent.
pub const DENSE_LIMIT: u64 = 1 << 16;

/// A prime modulus paired with a difference `D` in `[1, p)` and its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DapFamily {
    p: PrimeModulus,
    diff: u64,
    #[serde(skip)]
    diff_inv: u64,
}

impl DapFamily {
    pub fn new(p: PrimeModulus, diff: u64) -> Result<Self> {
        if diff == 0 || diff >= p.get() {
            return Err(Error::BadDifference {
                diff,
                modulus: p.get(),
            });
        }
        Ok(DapFamily {
            p,
            diff,
            diff_inv: inverse_mod(diff, p.get())?,
        })
    }

    #[inline]
    pub fn modulus(&self) -> PrimeModulus {
        self.p
    }

    #[inline]
    pub fn diff(&self) -> u64 {
        self.diff
    }

    /// `|A_(b)| = floor((p - 1 - b) / D) + 1`.
    #[inline]
    pub fn dap_len(&self, base: u64) -> u64 {
        debug_assert!(base < self.diff);
        (self.p.get() - 1 - base) / self.diff + 1
    }

    /// Index of `x` along `+D` steps measured from `start`.
    #[inline]
    pub fn offset(&self, start: u64, x: u64) -> u64 {
        let p = self.p.get();
        mul_mod(sub_mod(x % p, start, p), self.diff_inv, p)
    }

    pub fn dap(&self, base: u64) -> Result<Dap> {
        if base >= self.diff {
            return Err(Error::OutOfRange(format!(
                "base {base} not below difference {}",
                self.diff
            )));
        }
        Ok(Dap {
            family: *self,
            base,
        })
    }

    /// The sumset `A_(b_1) + ... + A_(b_k)` for the given bases.
    ///
    /// Callers are trusted to pass bases below `D`; the coordinator hot path
    /// goes through here.
    pub fn sumset_of_bases(&self, bases: impl IntoIterator<Item = u64>) -> SumsetInterval {
        let p = self.p.get();
        let mut start = 0;
        let mut len: u64 = 1;
        for b in bases {
            start = add_mod(start, b % p, p);
            len = len.saturating_add(self.dap_len(b) - 1).min(p);
        }
        SumsetInterval {
            family: *self,
            start,
            len,
        }
    }
}

/// The maximal progression `{b, b + D, ...}` that stays below `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Dap {
    family: DapFamily,
    base: u64,
}

impl Dap {
    pub fn family(&self) -> &DapFamily {
        &self.family
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn len(&self) -> u64 {
        self.family.dap_len(self.base)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, x: u64) -> bool {
        x < self.family.p.get() && x % self.family.diff == self.base
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.len()).map(move |i| self.base + i * self.family.diff)
    }

    pub fn to_dense(&self) -> Result<DenseSet> {
        DenseSet::from_elements(self.family.p.get(), self.iter())
    }
}

/// The progression with difference `diff` that contains `x`.
pub fn dap_of(x: Residue, diff: u64) -> Result<Dap> {
    let p = PrimeModulus::new(x.modulus())?;
    let family = DapFamily::new(p, diff)?;
    family.dap(x.value() % diff)
}

/// `{start + i*D mod p : 0 <= i < len}` with `1 <= len <= p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SumsetInterval {
    family: DapFamily,
    start: u64,
    len: u64,
}

impl SumsetInterval {
    pub fn family(&self) -> &DapFamily {
        &self.family
    }

    pub fn start(&self) -> u64 {
        self.start
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_full(&self) -> bool {
        self.len >= self.family.p.get()
    }

    #[inline]
    pub fn contains(&self, g: u64) -> bool {
        self.is_full() || self.family.offset(self.start, g) < self.len
    }

    /// Members in walk order from `start`.
    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        let p = self.family.p.get();
        let step = self.family.diff;
        (0..self.len).scan(self.start, move |cur, _| {
            let x = *cur;
            *cur = add_mod(*cur, step, p);
            Some(x)
        })
    }

    pub fn to_dense(&self) -> Result<DenseSet> {
        DenseSet::from_elements(self.family.p.get(), self.iter())
    }
}

/// Closed form of the sumset of `daps`, which must share `p` and `D`.
pub fn sumset_interval(daps: &[Dap]) -> Result<SumsetInterval> {
    let first = daps.first().ok_or(Error::EmptySet)?;
    let family = first.family;
    if daps.iter().any(|d| d.family != family) {
        return Err(Error::MixedParameters);
    }
    Ok(family.sumset_of_bases(daps.iter().map(|d| d.base)))
}

/// Fewest `+-D` steps taking `g0` to `g1`; always at most `(p - 1) / 2`.
pub fn dist(g0: Residue, g1: Residue, diff: u64, p: PrimeModulus) -> Result<u64> {
    if g0.modulus() != p.get() || g1.modulus() != p.get() {
        return Err(Error::MixedParameters);
    }
    let family = DapFamily::new(p, diff)?;
    Ok(family_dist(&family, g0.value(), g1.value()))
}

#[inline]
pub(crate) fn family_dist(family: &DapFamily, g0: u64, g1: u64) -> u64 {
    let forward = family.offset(g0, g1);
    let backward = family.offset(g1, g0);
    forward.min(backward)
}

pub fn interval_contains(s: &SumsetInterval, g: Residue) -> bool {
    s.contains(g.value())
}

/// A subset of Z_m held as a bitmap, for `m <= 2^16`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DenseSet {
    modulus: u64,
    words: Vec<u64>,
}

impl DenseSet {
    pub fn empty(modulus: u64) -> Result<Self> {
        if !(2..=DENSE_LIMIT).contains(&modulus) {
            return Err(Error::OutOfRange(format!(
                "dense sets need a modulus in [2, {DENSE_LIMIT}], got {modulus}"
            )));
        }
        Ok(DenseSet {
            modulus,
            words: vec![0; modulus.div_ceil(64) as usize],
        })
    }

    /// Builds a set from elements, reducing each modulo `modulus`.
    pub fn from_elements(modulus: u64, elems: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut set = DenseSet::empty(modulus)?;
        for x in elems {
            set.insert(x % modulus);
        }
        Ok(set)
    }

    pub fn full(modulus: u64) -> Result<Self> {
        DenseSet::from_elements(modulus, 0..modulus)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    #[inline]
    pub fn insert(&mut self, x: u64) {
        debug_assert!(x < self.modulus);
        self.words[(x / 64) as usize] |= 1 << (x % 64);
    }

    #[inline]
    pub fn contains(&self, x: u64) -> bool {
        x < self.modulus && self.words[(x / 64) as usize] & (1 << (x % 64)) != 0
    }

    pub fn len(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.modulus
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as u64;
                rest &= rest - 1;
                Some(i as u64 * 64 + bit)
            })
        })
    }
}

/// `A_1 + ... + A_k` by direct enumeration.
pub fn brute_sumset(sets: &[DenseSet]) -> Result<DenseSet> {
    let (first, rest) = sets.split_first().ok_or(Error::EmptySet)?;
    let m = first.modulus;
    if sets.iter().any(|s| s.modulus != m) {
        return Err(Error::MixedParameters);
    }
    if sets.iter().any(DenseSet::is_empty) {
        return Err(Error::EmptySet);
    }
    let mut acc = first.clone();
    for next in rest {
        if acc.is_full() {
            break;
        }
        let addends: Vec<u64> = next.iter().collect();
        let mut out = DenseSet::empty(m)?;
        for s in acc.iter() {
            for &a in &addends {
                out.insert(add_mod(s, a, m));
            }
        }
        acc = out;
    }
    Ok(acc)
}

/// `min{p, sum |A_i| - k + 1}` for the given set sizes.
pub fn cauchy_davenport_bound(modulus: u64, sizes: impl IntoIterator<Item = u64>) -> u64 {
    let mut bound: u64 = 1;
    for s in sizes {
        bound = bound.saturating_add(s.saturating_sub(1)).min(modulus);
    }
    bound
}

/// Whether the enumerated sumset meets the Cauchy-Davenport lower bound.
pub fn check_cauchy_davenport(sets: &[DenseSet]) -> Result<bool> {
    let sum = brute_sumset(sets)?;
    let bound = cauchy_davenport_bound(sum.modulus, sets.iter().map(DenseSet::len));
    Ok(sum.len() >= bound)
}
