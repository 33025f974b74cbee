use rand::Rng;
use serde::Serialize;

use super::cell_rng;
use super::report::Report;
use crate::error::Result;
use crate::modular::{add_mod, ceil_log2, sub_mod, PrimeModulus};
use crate::sumdist::{Bit, SumDistInstance, SumDistProtocol};
use crate::transcript::Mode;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyConfig {
    /// Enumerate every on-promise tuple when `p^k` is at most this.
    pub enumeration_limit: u64,
    /// Tuples drawn per target pair above the enumeration limit.
    pub samples_per_pair: u64,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            enumeration_limit: 10_000_000,
            samples_per_pair: 100_000,
            seed: 0,
        }
    }
}

impl VerifyConfig {
    /// Always sample, even where enumeration would be cheap.
    pub fn sampled(samples_per_pair: u64, seed: u64) -> Self {
        VerifyConfig {
            enumeration_limit: 0,
            samples_per_pair,
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub g0: u64,
    pub g1: u64,
    pub inputs: Vec<u64>,
    pub output: Bit,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SumDistReport {
    pub p: u64,
    pub k: usize,
    pub mode: Mode,
    pub diff: Option<u64>,
    pub bits_per_party: u32,
    pub total_bits: u64,
    pub exhaustive: bool,
    pub target_pairs: u64,
    pub runs: u64,
    pub errors: u64,
    /// Runs whose transcript bit count differed from `k * width`.
    pub accounting_errors: u64,
    pub first_failure: Option<Failure>,
}

impl Report for SumDistReport {
    fn kind(&self) -> &'static str {
        "sumdist-verify"
    }

    fn passed(&self) -> bool {
        self.errors == 0 && self.accounting_errors == 0
    }

    fn table_lines(&self) -> Vec<String> {
        vec![
            "p\tk\tmode\tD\tbits/party\ttotal\tcoverage\tpairs\truns\terrors\tstatus".into(),
            format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                self.p,
                self.k,
                self.mode,
                self.diff.map_or("-".into(), |d| d.to_string()),
                self.bits_per_party,
                self.total_bits,
                if self.exhaustive {
                    "exhaustive"
                } else {
                    "sampled"
                },
                self.target_pairs,
                self.runs,
                self.errors,
                if self.passed() { "ok" } else { "FAIL" },
            ),
        ]
    }
}

/// Checks the SUM-DIST protocol on every ordered pair of distinct targets.
///
/// With `p^k` at most the enumeration limit every on-promise tuple is run;
/// otherwise a seeded sample of tuples is drawn per pair. The expected
/// output is read off the tuple's actual sum.
pub fn exhaustive_verify_sumdist(
    p: PrimeModulus,
    k: usize,
    config: &VerifyConfig,
) -> Result<SumDistReport> {
    let m = p.get();
    let exhaustive = (m as f64).powi(k as i32) <= config.enumeration_limit as f64;
    // template instance for the report header; D does not depend on targets
    let template = SumDistProtocol::new(SumDistInstance::new(p, k, 0, 1)?)?;
    let width = template.width();
    let expected_width = match template.params() {
        Some(params) => ceil_log2(params.diff()),
        None => ceil_log2(m),
    };
    let mut report = SumDistReport {
        p: m,
        k,
        mode: template.instance().mode(),
        diff: template.params().map(|pr| pr.diff()),
        bits_per_party: width,
        total_bits: k as u64 * width as u64,
        exhaustive,
        target_pairs: 0,
        runs: 0,
        errors: 0,
        accounting_errors: u64::from(width != expected_width),
        first_failure: None,
    };

    let mut inputs = vec![0u64; k];
    let mut messages = vec![0u64; k];
    for g0 in 0..m {
        for g1 in (0..m).filter(|&g| g != g0) {
            let proto = SumDistProtocol::new(SumDistInstance::new(p, k, g0, g1)?)?;
            report.target_pairs += 1;

            let (_, t) = proto.run(&tuple_summing_to(g0, k, m))?;
            if t.total_bits() != report.total_bits {
                report.accounting_errors += 1;
            }

            let mut check = |inputs: &[u64], report: &mut SumDistReport| -> Result<()> {
                for (msg, &x) in messages.iter_mut().zip(inputs) {
                    *msg = proto.encode(x);
                }
                if messages.iter().any(|&b| b >> width != 0) {
                    report.accounting_errors += 1;
                }
                let out = proto.decide(&messages)?;
                let sum = inputs.iter().fold(0, |acc, &x| add_mod(acc, x, m));
                let expected = Bit::from(sum == g1);
                report.runs += 1;
                if out != expected {
                    report.errors += 1;
                    report.first_failure.get_or_insert_with(|| Failure {
                        g0,
                        g1,
                        inputs: inputs.to_vec(),
                        output: out,
                    });
                }
                Ok(())
            };

            if exhaustive {
                for target in [g0, g1] {
                    inputs.iter_mut().for_each(|x| *x = 0);
                    loop {
                        complete_tuple(&mut inputs, target, m);
                        check(&inputs, &mut report)?;
                        if !advance(&mut inputs[..k - 1], m) {
                            break;
                        }
                    }
                }
            } else {
                let mut rng = cell_rng(config.seed, &[m, k as u64, g0, g1]);
                for _ in 0..config.samples_per_pair {
                    for x in &mut inputs[..k - 1] {
                        *x = rng.gen_range(0..m);
                    }
                    let target = if rng.gen::<bool>() { g1 } else { g0 };
                    complete_tuple(&mut inputs, target, m);
                    check(&inputs, &mut report)?;
                }
            }
        }
    }
    Ok(report)
}

fn tuple_summing_to(target: u64, k: usize, m: u64) -> Vec<u64> {
    let mut v = vec![0; k];
    complete_tuple(&mut v, target, m);
    v
}

/// Sets the last input so the tuple sums to `target`.
#[inline]
fn complete_tuple(inputs: &mut [u64], target: u64, m: u64) {
    let (last, rest) = inputs.split_last_mut().expect("k >= 2");
    let partial = rest.iter().fold(0, |acc, &x| add_mod(acc, x, m));
    *last = sub_mod(target, partial, m);
}

/// Odometer step over `Z_m^len`; false once it wraps to all zeros.
#[inline]
fn advance(digits: &mut [u64], m: u64) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < m {
            return true;
        }
        *d = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p7_k2_is_fallback_and_clean() {
        let r =
            exhaustive_verify_sumdist(PrimeModulus::new(7).unwrap(), 2, &VerifyConfig::default())
                .unwrap();
        assert_eq!(r.mode, Mode::TrivialFallback);
        assert_eq!(r.target_pairs, 42);
        assert_eq!(r.runs, 42 * 2 * 7);
        assert!(r.exhaustive && r.passed());
    }

    #[test]
    fn p5_fallback_clean() {
        let r =
            exhaustive_verify_sumdist(PrimeModulus::new(5).unwrap(), 2, &VerifyConfig::default())
                .unwrap();
        assert_eq!(
            (r.mode, r.errors, r.total_bits),
            (Mode::TrivialFallback, 0, 6)
        );
    }

    #[test]
    fn sampled_mode_runs_requested_count() {
        let cfg = VerifyConfig::sampled(50, 3);
        let r = exhaustive_verify_sumdist(PrimeModulus::new(13).unwrap(), 2, &cfg).unwrap();
        assert!(!r.exhaustive);
        assert_eq!(r.runs, 13 * 12 * 50);
        assert!(r.passed());
        assert_eq!(
            r,
            exhaustive_verify_sumdist(PrimeModulus::new(13).unwrap(), 2, &cfg).unwrap()
        );
    }

    #[test]
    fn odometer_covers_every_tuple() {
        let mut d = vec![0u64; 3];
        let mut n = 1;
        while advance(&mut d, 4) {
            n += 1;
        }
        assert_eq!(n, 64);
        assert_eq!(d, vec![0, 0, 0]);
    }
}
