//! Constructive side of the deterministic lower bound.
//!
//! Any fixed-width one-round protocol is a labeling of Z_p per party. If the
//! parties send too few bits, the heaviest message classes of the first
//! `k - 1` parties have a sumset covering all of Z_p, so two input tuples
//! with the same messages reach both targets. The coordinator cannot tell
//! them apart and must be wrong on one.

use rand::Rng;
use serde::Serialize;

use super::cell_rng;
use super::report::Report;
use crate::error::{Error, Result};
use crate::modular::{add_mod, sub_mod, PrimeModulus};
use crate::sumdist::SumDistProtocol;

/// A deterministic one-round protocol given by per-party input labelings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartitionProtocol {
    p: u64,
    k: usize,
    t: u32,
    /// `labels[i][x]`: the message party `i` sends on input `x`.
    labels: Vec<Vec<u32>>,
}

impl PartitionProtocol {
    pub fn new(p: PrimeModulus, t: u32, labels: Vec<Vec<u32>>) -> Result<Self> {
        let k = labels.len();
        if k < 2 {
            return Err(Error::OutOfRange(format!(
                "need at least 2 parties, got {k}"
            )));
        }
        if t > 31 {
            return Err(Error::OutOfRange(format!("{t} bits per party is too many")));
        }
        for party in &labels {
            if party.len() as u64 != p.get() {
                return Err(Error::LengthMismatch {
                    expected: p.get() as usize,
                    got: party.len(),
                });
            }
            if let Some(&l) = party.iter().find(|&&l| (l as u64) >> t != 0) {
                return Err(Error::OutOfRange(format!(
                    "label {l} does not fit in {t} bits"
                )));
            }
        }
        Ok(PartitionProtocol {
            p: p.get(),
            k,
            t,
            labels,
        })
    }

    /// Every party labels each input uniformly at random.
    pub fn random<R: Rng>(p: PrimeModulus, k: usize, t: u32, rng: &mut R) -> Result<Self> {
        let labels = (0..k)
            .map(|_| (0..p.get()).map(|_| rng.gen_range(0..1u32 << t)).collect())
            .collect();
        PartitionProtocol::new(p, t, labels)
    }

    /// The SUM-DIST protocol viewed as a labeling: every party sends `encode(x)`.
    pub fn from_sumdist(proto: &SumDistProtocol) -> Result<Self> {
        let inst = proto.instance();
        let party: Vec<u32> = (0..inst.p().get())
            .map(|x| proto.encode(x) as u32)
            .collect();
        PartitionProtocol::new(inst.p(), proto.width(), vec![party; inst.k()])
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn message(&self, party: usize, x: u64) -> u32 {
        self.labels[party][x as usize]
    }

    pub fn messages(&self, inputs: &[u64]) -> Vec<u32> {
        inputs
            .iter()
            .enumerate()
            .map(|(i, &x)| self.message(i, x))
            .collect()
    }

    /// The largest message class of a party; ties go to the lowest label.
    pub fn heaviest_class(&self, party: usize) -> (u32, Vec<u64>) {
        let mut counts = vec![0u64; 1 << self.t];
        for &l in &self.labels[party] {
            counts[l as usize] += 1;
        }
        let best = counts
            .iter()
            .enumerate()
            .max_by(|(i, a), (j, b)| a.cmp(b).then(j.cmp(i)))
            .map(|(i, _)| i as u32)
            .expect("at least one label");
        let members = (0..self.p)
            .filter(|&x| self.message(party, x) == best)
            .collect();
        (best, members)
    }
}

/// Two tuples that send identical messages yet sum to different targets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CounterExample {
    /// Messages of parties `1..k-1`.
    pub messages: Vec<u32>,
    /// Input of the last party, shared by both tuples.
    pub shared_last: u64,
    /// Full tuple summing to `g0`.
    pub x: Vec<u64>,
    /// Full tuple summing to `g1`.
    pub x_prime: Vec<u64>,
    pub g0: u64,
    pub g1: u64,
}

impl CounterExample {
    /// Replays both tuples through the protocol.
    pub fn verify(&self, proto: &PartitionProtocol) -> bool {
        let p = proto.p;
        let sum = |v: &[u64]| v.iter().fold(0, |acc, &x| add_mod(acc, x % p, p));
        let k = proto.k;
        self.x.len() == k
            && self.x_prime.len() == k
            && self.x[k - 1] == self.shared_last
            && self.x_prime[k - 1] == self.shared_last
            && proto.messages(&self.x) == proto.messages(&self.x_prime)
            && proto.messages(&self.x)[..k - 1] == self.messages[..]
            && sum(&self.x) == self.g0
            && sum(&self.x_prime) == self.g1
    }
}

/// Largest `t` with `t <= log2((k-1)/2)` and `t <= log2(p/2)`, if any.
pub fn lower_bound_threshold(p: u64, k: usize) -> Option<u32> {
    let cap = (k as u64).saturating_sub(1).min(p);
    // 2^(t+1) <= cap
    (cap >= 2).then(|| cap.ilog2() - 1)
}

/// Sumset of `classes` with one preimage tuple stored per reachable sum.
struct WitnessSumset {
    p: u64,
    /// `layers[i][s]`: element of class `i` used to first reach `s`.
    layers: Vec<Vec<Option<u64>>>,
}

impl WitnessSumset {
    fn build(p: u64, classes: &[Vec<u64>]) -> Self {
        let mut layers: Vec<Vec<Option<u64>>> = Vec::with_capacity(classes.len());
        let mut reach: Vec<u64> = vec![0];
        for class in classes {
            let mut layer = vec![None; p as usize];
            let mut next = Vec::new();
            for &s in &reach {
                for &a in class {
                    let t = add_mod(s, a, p);
                    if layer[t as usize].is_none() {
                        layer[t as usize] = Some(a);
                        next.push(t);
                    }
                }
            }
            layers.push(layer);
            reach = next;
        }
        WitnessSumset { p, layers }
    }

    fn contains(&self, s: u64) -> bool {
        self.layers.last().is_some_and(|l| l[s as usize].is_some())
    }

    fn is_full(&self) -> bool {
        self.layers
            .last()
            .is_some_and(|l| l.iter().all(Option::is_some))
    }

    fn preimage(&self, s: u64) -> Option<Vec<u64>> {
        let mut out = vec![0; self.layers.len()];
        let mut cur = s;
        for (i, layer) in self.layers.iter().enumerate().rev() {
            let a = layer[cur as usize]?;
            out[i] = a;
            cur = sub_mod(cur, a, self.p);
        }
        debug_assert_eq!(cur, 0);
        Some(out)
    }
}

/// Searches for two indistinguishable tuples hitting `g0` and `g1`.
///
/// Parties `1..k-1` are pinned to their heaviest message classes. When the
/// sumset of those classes is all of Z_p, any shared last input works;
/// otherwise the last input is scanned for one that puts both
/// `g0 - x_k` and `g1 - x_k` in the sumset.
pub fn find_counterexample(
    proto: &PartitionProtocol,
    g0: u64,
    g1: u64,
) -> Result<Option<CounterExample>> {
    let p = proto.p;
    if g0 == g1 {
        return Err(Error::DegenerateTargets);
    }
    if g0 >= p || g1 >= p {
        return Err(Error::OutOfRange(format!("targets must be below {p}")));
    }
    let k = proto.k;
    let (messages, classes): (Vec<u32>, Vec<Vec<u64>>) =
        (0..k - 1).map(|i| proto.heaviest_class(i)).unzip();
    let sumset = WitnessSumset::build(p, &classes);
    let shared_last = if sumset.is_full() {
        Some(0)
    } else {
        (0..p)
            .find(|&xk| sumset.contains(sub_mod(g0, xk, p)) && sumset.contains(sub_mod(g1, xk, p)))
    };
    let Some(xk) = shared_last else {
        return Ok(None);
    };
    let tuple = |g: u64| {
        let mut v = sumset
            .preimage(sub_mod(g, xk, p))
            .expect("target reachable");
        v.push(xk);
        v
    };
    Ok(Some(CounterExample {
        messages,
        shared_last: xk,
        x: tuple(g0),
        x_prime: tuple(g1),
        g0,
        g1,
    }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LowerBoundReport {
    pub p: u64,
    pub k: usize,
    pub t: u32,
    /// Largest `t` covered by the impossibility bound for this `(p, k)`.
    pub threshold: Option<u32>,
    pub g0: u64,
    pub g1: u64,
    pub protocols: u64,
    pub found: u64,
    pub verified: u64,
}

impl LowerBoundReport {
    pub fn in_regime(&self) -> bool {
        self.threshold.is_some_and(|th| self.t <= th)
    }
}

impl Report for LowerBoundReport {
    fn kind(&self) -> &'static str {
        "lowerbound"
    }

    /// Inside the regime every protocol must fall; outside it, misses are expected.
    fn passed(&self) -> bool {
        self.verified == self.found && (!self.in_regime() || self.found == self.protocols)
    }

    fn table_lines(&self) -> Vec<String> {
        vec![
            "p\tk\tt\tthreshold\tregime\tprotocols\tfound\tverified\tstatus".into(),
            format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                self.p,
                self.k,
                self.t,
                self.threshold.map_or("-".into(), |t| t.to_string()),
                if self.in_regime() { "yes" } else { "no" },
                self.protocols,
                self.found,
                self.verified,
                if self.passed() { "ok" } else { "FAIL" },
            ),
        ]
    }
}

/// Runs the counterexample search on `count` random `t`-bit protocols.
pub fn survey_random_protocols(
    p: PrimeModulus,
    k: usize,
    t: u32,
    g0: u64,
    g1: u64,
    count: u64,
    seed: u64,
) -> Result<LowerBoundReport> {
    let mut rng = cell_rng(seed, &[p.get(), k as u64, t as u64]);
    let mut report = LowerBoundReport {
        p: p.get(),
        k,
        t,
        threshold: lower_bound_threshold(p.get(), k),
        g0,
        g1,
        protocols: 0,
        found: 0,
        verified: 0,
    };
    for _ in 0..count {
        let proto = PartitionProtocol::random(p, k, t, &mut rng)?;
        report.protocols += 1;
        if let Some(ce) = find_counterexample(&proto, g0, g1)? {
            report.found += 1;
            report.verified += u64::from(ce.verify(&proto));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sumdist::SumDistInstance;

    fn p(n: u64) -> PrimeModulus {
        PrimeModulus::new(n).unwrap()
    }

    #[test]
    fn thresholds() {
        assert_eq!(lower_bound_threshold(11, 2), None);
        assert_eq!(lower_bound_threshold(11, 3), Some(0));
        assert_eq!(lower_bound_threshold(11, 5), Some(1));
        assert_eq!(lower_bound_threshold(11, 9), Some(2));
        assert_eq!(lower_bound_threshold(7, 9), Some(1));
        assert_eq!(lower_bound_threshold(3, 9), Some(0));
    }

    #[test]
    fn p11_k5_t1_always_falls() {
        let r = survey_random_protocols(p(11), 5, 1, 0, 1, 100, 1).unwrap();
        assert!(r.in_regime());
        assert_eq!((r.found, r.verified), (100, 100));
    }

    #[test]
    fn sumdist_protocol_resists_search() {
        for (q, k) in [(19, 2), (31, 3), (37, 4), (11, 2)] {
            let inst = SumDistInstance::new(p(q), k, 3, 10).unwrap();
            let proto = SumDistProtocol::new(inst).unwrap();
            let partition = PartitionProtocol::from_sumdist(&proto).unwrap();
            assert_eq!(find_counterexample(&partition, 3, 10).unwrap(), None);
        }
    }

    #[test]
    fn degenerate_targets_rejected() {
        let proto = PartitionProtocol::new(p(3), 0, vec![vec![0; 3]; 3]).unwrap();
        assert_eq!(
            find_counterexample(&proto, 1, 1),
            Err(Error::DegenerateTargets)
        );
    }

    #[test]
    fn zero_bit_protocol_counterexample_verifies() {
        let proto = PartitionProtocol::new(p(7), 0, vec![vec![0; 7]; 3]).unwrap();
        let ce = find_counterexample(&proto, 2, 5).unwrap().unwrap();
        assert!(ce.verify(&proto));
        let mut bad = ce.clone();
        bad.x[0] = (bad.x[0] + 1) % 7;
        assert!(!bad.verify(&proto));
    }

    #[test]
    fn heaviest_class_ties_go_low() {
        let proto = PartitionProtocol::new(p(3), 2, vec![vec![3, 1, 0], vec![0, 0, 1]]).unwrap();
        assert_eq!(proto.heaviest_class(0), (0, vec![2]));
        assert_eq!(proto.heaviest_class(1), (0, vec![0, 1]));
    }

    #[test]
    fn rejects_oversized_labels() {
        assert!(PartitionProtocol::new(p(3), 1, vec![vec![0, 2, 0]; 2]).is_err());
    }
}
