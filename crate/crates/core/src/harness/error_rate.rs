use rand::Rng;
use serde::Serialize;

use super::cell_rng;
use super::report::Report;
use crate::error::Result;
use crate::modular::{add_mod, sub_mod, PrimeModulus};
use crate::rational::{Epsilon, Fraction};
use crate::sumequal::{PublicRandomness, SumEqualInstance, SumEqualProtocol};
use crate::transcript::Mode;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ErrorReport {
    pub p: u64,
    pub k: usize,
    pub epsilon: Epsilon,
    pub mode: Mode,
    pub diff: Option<u64>,
    pub bits_per_party: u32,
    /// Off-target tuples whose error was enumerated over every `c`.
    pub trials: u64,
    /// Off-target tuples whose exact error exceeded `epsilon`.
    pub over_budget: u64,
    pub max_error: Fraction,
    pub worst_inputs: Vec<u64>,
    /// On-target (tuple, seed) runs; each must output 1.
    pub on_target_runs: u64,
    pub on_target_failures: u64,
}

impl Report for ErrorReport {
    fn kind(&self) -> &'static str {
        "sumequal-error"
    }

    fn passed(&self) -> bool {
        self.over_budget == 0 && self.on_target_failures == 0
    }

    fn table_lines(&self) -> Vec<String> {
        vec![
            "p\tk\teps\tmode\tD\tbits/party\ttrials\tmax-error\tover-budget\ton-target-fail\tstatus"
                .into(),
            format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                self.p,
                self.k,
                self.epsilon,
                self.mode,
                self.diff.map_or("-".into(), |d| d.to_string()),
                self.bits_per_party,
                self.trials,
                self.max_error,
                self.over_budget,
                self.on_target_failures,
                if self.passed() { "ok" } else { "FAIL" },
            ),
        ]
    }
}

/// Exact error of SUM-EQUAL on `trials` random off-target tuples, each
/// enumerated over every `c`, plus `trials` on-target runs under random seeds.
pub fn measure_error_sumequal(
    p: PrimeModulus,
    k: usize,
    epsilon: Epsilon,
    trials: u64,
    seed: u64,
) -> Result<ErrorReport> {
    let m = p.get();
    let mut rng = cell_rng(seed, &[m, k as u64, epsilon.numer(), epsilon.denom()]);
    let g = rng.gen_range(0..m);
    let proto = SumEqualProtocol::new(SumEqualInstance::new(p, k, g, epsilon)?)?;
    let mut report = ErrorReport {
        p: m,
        k,
        epsilon,
        mode: proto.instance().mode(),
        diff: proto.diff(),
        bits_per_party: proto.width(),
        trials: 0,
        over_budget: 0,
        max_error: Fraction {
            count: 0,
            total: m - 1,
        },
        worst_inputs: Vec::new(),
        on_target_runs: 0,
        on_target_failures: 0,
    };
    let mut inputs = vec![0u64; k];
    for _ in 0..trials {
        // off target: the last input avoids the one value that would hit g
        for x in &mut inputs[..k - 1] {
            *x = rng.gen_range(0..m);
        }
        let partial = inputs[..k - 1].iter().fold(0, |acc, &x| add_mod(acc, x, m));
        let forbidden = sub_mod(g, partial, m);
        let last = rng.gen_range(0..m - 1);
        inputs[k - 1] = if last >= forbidden { last + 1 } else { last };

        let profile = proto.exact_error(&inputs)?;
        report.trials += 1;
        if !profile.within_budget() {
            report.over_budget += 1;
        }
        if profile.error() > report.max_error || report.worst_inputs.is_empty() {
            report.max_error = profile.error();
            report.worst_inputs = inputs.clone();
        }

        inputs[k - 1] = forbidden;
        let (bit, _) = proto.run(&inputs, PublicRandomness::new(rng.gen()))?;
        report.on_target_runs += 1;
        if bit != 1 {
            report.on_target_failures += 1;
        }
    }
    Ok(report)
}
