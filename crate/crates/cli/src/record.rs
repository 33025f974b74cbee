use coordsum_core::harness::Report;
use coordsum_core::{Bit, Epsilon, Fraction};
use serde::Serialize;

/// One protocol run, with the answer read directly off the inputs.
#[derive(Serialize)]
pub struct RunRecord {
    pub problem: &'static str,
    /// `Z_p`, `Z_N`, or `Z` for integer inputs.
    pub ring: String,
    /// Modulus the messages were computed in; the product for `Z_N`.
    pub modulus: u64,
    pub k: usize,
    pub mode: String,
    pub targets: Vec<u64>,
    pub epsilon: Option<Epsilon>,
    pub seed: Option<u64>,
    pub inputs: Vec<u64>,
    pub messages: Vec<u64>,
    pub decision: Bit,
    /// `None` for SUM-DIST inputs off the promise.
    pub expected: Option<Bit>,
    pub total_bits: u64,
    /// Exact error over every multiplier, for off-target SUM-EQUAL inputs.
    pub exact_error: Option<Fraction>,
    pub within_budget: Option<bool>,
    pub transcript: String,
}

impl RunRecord {
    pub fn off_promise(&self) -> bool {
        self.expected.is_none()
    }
}

impl Report for RunRecord {
    fn kind(&self) -> &'static str {
        "run"
    }

    /// Fails on a SUM-DIST mistake under the promise, a rejected true sum,
    /// or an exact error above budget.
    fn passed(&self) -> bool {
        let decision_ok = match (self.problem, self.expected) {
            ("sumdist", Some(e)) => self.decision == e,
            (_, Some(1)) => self.decision == 1,
            _ => true,
        };
        decision_ok && self.within_budget != Some(false)
    }

    fn table_lines(&self) -> Vec<String> {
        let list = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
        vec![
            "problem\tring\tk\tmode\ttargets\tinputs\tmessages\tdecision\texpected\tbits\terror"
                .into(),
            format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                self.problem,
                self.ring,
                self.k,
                self.mode,
                list(&self.targets),
                list(&self.inputs),
                list(&self.messages),
                self.decision,
                self.expected
                    .map_or("off-promise".into(), |e| e.to_string()),
                self.total_bits,
                self.exact_error.map_or("-".into(), |e| e.to_string()),
            ),
        ]
    }
}

/// Counterexample search against the SUM-DIST protocol itself.
#[derive(Serialize)]
pub struct AttackRecord {
    pub p: u64,
    pub k: usize,
    pub t: u32,
    pub g0: u64,
    pub g1: u64,
    pub found: bool,
}

impl Report for AttackRecord {
    fn kind(&self) -> &'static str {
        "lowerbound-sumdist"
    }

    fn passed(&self) -> bool {
        !self.found
    }

    fn table_lines(&self) -> Vec<String> {
        vec![
            "p\tk\tt\tg0\tg1\tcounterexample\tstatus".into(),
            format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                self.p,
                self.k,
                self.t,
                self.g0,
                self.g1,
                if self.found { "found" } else { "none" },
                if self.passed() { "ok" } else { "FAIL" },
            ),
        ]
    }
}
