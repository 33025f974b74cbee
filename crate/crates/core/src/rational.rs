//! Exact error budgets. Parsed from `a/b` strings, never from decimals.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// An error budget strictly between 0 and 1, kept in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Epsilon(Ratio<u64>);

impl Epsilon {
    pub fn new(numer: u64, denom: u64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::InvalidRational(format!("{numer}/0")));
        }
        let r = Ratio::new(numer, denom);
        if *r.numer() == 0 || r.numer() >= r.denom() {
            return Err(Error::InvalidRational(format!(
                "{numer}/{denom} is not in (0, 1)"
            )));
        }
        Ok(Epsilon(r))
    }

    pub fn numer(self) -> u64 {
        *self.0.numer()
    }

    pub fn denom(self) -> u64 {
        *self.0.denom()
    }

    pub fn ratio(self) -> Ratio<u64> {
        self.0
    }

    /// The budget split evenly over `parts` independent sub-runs.
    pub fn split(self, parts: u64) -> Result<Self> {
        let denom = self
            .denom()
            .checked_mul(parts)
            .ok_or_else(|| Error::InvalidRational(format!("{self} split {parts} ways")))?;
        Epsilon::new(self.numer(), denom)
    }

    /// Whether `count / total <= self`, compared exactly.
    pub fn admits(self, count: u64, total: u64) -> bool {
        count as u128 * self.denom() as u128 <= self.numer() as u128 * total as u128
    }

    pub fn to_f64(self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }
}

impl FromStr for Epsilon {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidRational(format!("expected \"a/b\", got {s:?}"));
        let (a, b) = s.trim().split_once('/').ok_or_else(bad)?;
        let parse = |t: &str| {
            if t.is_empty() || !t.bytes().all(|c| c.is_ascii_digit()) {
                return Err(bad());
            }
            t.parse::<u64>().map_err(|_| bad())
        };
        Epsilon::new(parse(a)?, parse(b)?)
    }
}

impl TryFrom<String> for Epsilon {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Epsilon> for String {
    fn from(e: Epsilon) -> String {
        e.to_string()
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

/// An exact fraction `count / total` as reported by the error harness.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fraction {
    pub count: u64,
    pub total: u64,
}

impl Fraction {
    pub fn reduced(self) -> Ratio<u64> {
        Ratio::new(self.count, self.total)
    }
}

impl PartialOrd for Fraction {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Fraction {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.count as u128 * other.total as u128).cmp(&(other.count as u128 * self.total as u128))
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.reduced();
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

impl Serialize for Fraction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
