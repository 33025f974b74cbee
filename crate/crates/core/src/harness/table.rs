use serde::Serialize;
use std::collections::BTreeMap;

use super::report::Report;
use crate::error::{Error, Result};
use crate::modular::PrimeModulus;
use crate::rational::Epsilon;
use crate::sumdist::{SumDistInstance, SumDistProtocol};
use crate::sumequal::{SumEqualInstance, SumEqualProtocol};
use crate::transcript::Mode;

/// Any valid row satisfies `total < k log2(k/eps) + CONSTANT_BOUND * k`
/// (`eps = 1` for SUM-DIST).
pub const CONSTANT_BOUND: f64 = 3.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CommRow {
    pub p: u64,
    pub k: usize,
    pub mode: Mode,
    pub diff: Option<u64>,
    pub bits_per_party: u32,
    pub total_bits: u64,
    pub trivial_bits: u64,
    /// `(total - k log2(k/eps)) / k` for this row.
    pub constant: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CommTable {
    pub epsilon: Option<Epsilon>,
    pub rows: Vec<CommRow>,
    /// Smallest `C` with `total <= k log2(k/eps) + C k` on every row.
    pub fitted_constant: f64,
    pub within_bound: bool,
    /// Whether, at each `k`, every progression-mode row sends the same bits.
    pub independent_of_p: bool,
}

impl Report for CommTable {
    fn kind(&self) -> &'static str {
        "comm-table"
    }

    fn passed(&self) -> bool {
        self.within_bound && (self.epsilon.is_some() || self.independent_of_p)
    }

    fn table_lines(&self) -> Vec<String> {
        let mut lines = vec!["p\tk\tmode\tD\tbits/party\ttotal\ttrivial\tconstant".to_string()];
        for r in &self.rows {
            lines.push(format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.3}",
                r.p,
                r.k,
                r.mode,
                r.diff.map_or("-".into(), |d| d.to_string()),
                r.bits_per_party,
                r.total_bits,
                r.trivial_bits,
                r.constant,
            ));
        }
        lines.push(format!(
            "fitted C = {:.3} (bound {CONSTANT_BOUND}), p-independent: {}",
            self.fitted_constant,
            if self.independent_of_p { "yes" } else { "no" },
        ));
        lines
    }
}

/// Communication cost of the protocols over a grid of `(p, k)`.
///
/// Without `epsilon` the rows are for SUM-DIST, otherwise for SUM-EQUAL.
pub fn comm_table(primes: &[u64], ks: &[usize], epsilon: Option<Epsilon>) -> Result<CommTable> {
    if let Some(&k) = ks.iter().find(|&&k| k < 2) {
        return Err(Error::OutOfRange(format!(
            "need at least 2 parties, got {k}"
        )));
    }
    let mut rows = Vec::with_capacity(primes.len() * ks.len());
    for &p in primes {
        let prime = PrimeModulus::new(p)?;
        for &k in ks {
            let (mode, diff, width) = match epsilon {
                None => {
                    let proto = SumDistProtocol::new(SumDistInstance::new(prime, k, 0, 1)?)?;
                    (
                        proto.instance().mode(),
                        proto.params().map(|pr| pr.diff()),
                        proto.width(),
                    )
                }
                Some(eps) => {
                    let proto = SumEqualProtocol::new(SumEqualInstance::new(prime, k, 0, eps)?)?;
                    (proto.instance().mode(), proto.diff(), proto.width())
                }
            };
            let total = k as u64 * width as u64;
            let leading = (k as f64 / epsilon.map_or(1.0, Epsilon::to_f64)).log2();
            rows.push(CommRow {
                p,
                k,
                mode,
                diff,
                bits_per_party: width,
                total_bits: total,
                trivial_bits: k as u64 * prime.residue_bits() as u64,
                constant: (total as f64 - k as f64 * leading) / k as f64,
            });
        }
    }
    let fitted_constant = rows
        .iter()
        .map(|r| r.constant)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut widths: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.mode == Mode::DapProtocol) {
        widths.entry(r.k).or_default().push(r.bits_per_party);
    }
    let independent_of_p = widths
        .values()
        .all(|w| w.windows(2).all(|pair| pair[0] == pair[1]));
    Ok(CommTable {
        epsilon,
        within_bound: rows.iter().all(|r| r.constant < CONSTANT_BOUND),
        fitted_constant,
        rows,
        independent_of_p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p19_k2_row() {
        let t = comm_table(&[19], &[2], None).unwrap();
        let r = &t.rows[0];
        assert_eq!(
            (r.diff, r.bits_per_party, r.total_bits, r.trivial_bits),
            (Some(5), 3, 6, 10)
        );
        assert!(t.passed());
    }

    #[test]
    fn huge_prime_row() {
        let t = comm_table(&[(1 << 61) - 1], &[16], None).unwrap();
        let r = &t.rows[0];
        assert!(r.diff.unwrap() <= 64);
        assert_eq!(r.diff, Some(33));
        assert!(r.bits_per_party <= 6);
    }

    #[test]
    fn k1_rejected() {
        assert!(comm_table(&[19], &[1], None).is_err());
    }

    #[test]
    fn sumequal_rows_use_epsilon() {
        let t = comm_table(&[101], &[3], Some("1/10".parse().unwrap())).unwrap();
        assert_eq!(t.rows[0].diff, Some(62));
        assert_eq!(t.rows[0].bits_per_party, 6);
        assert!(t.passed());
    }
}
