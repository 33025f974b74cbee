//! Randomized one-round protocol for testing whether the inputs sum to `g`.
//!
//! Same encoding as the distinguishing protocol, except the scaling
//! constant `c` is drawn from public randomness. A true sum always lands in
//! the announced sumset, so the protocol never rejects a correct sum; a
//! wrong sum is accepted only for the few `c` that leave it close to `c*g`.

use serde::Serialize;

use crate::additive::DapFamily;
use crate::error::{Error, Result};
use crate::modular::{add_mod, mul_mod, PrimeModulus, Residue};
use crate::rational::{Epsilon, Fraction};
use crate::sumdist::{is_trivial_regime, validate_inputs, Bit, MessageBase};
use crate::transcript::{Header, Mode, ProtocolId, Transcript};

/// SplitMix64, the public-randomness generator.
///
/// `state += 0x9E3779B97F4A7C15`, then the output is the state passed through
/// two xor-shift-multiply rounds. Chosen for being trivially reproducible in
/// any language.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform value in `[0, bound)` by rejection.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        // largest multiple of `bound` that fits in 2^64
        let zone = u64::MAX - (u64::MAX - bound + 1) % bound;
        loop {
            let r = self.next_u64();
            if r <= zone {
                return r % bound;
            }
        }
    }
}

/// The shared random string, realized as a 64-bit seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PublicRandomness {
    pub seed: u64,
}

impl PublicRandomness {
    pub fn new(seed: u64) -> Self {
        PublicRandomness { seed }
    }
}

/// Uniform `c` in `[1, p - 1]`: the first accepted draw of SplitMix64(seed).
pub fn sample_c(public: PublicRandomness, p: PrimeModulus) -> Residue {
    let mut rng = SplitMix64::new(public.seed);
    p.residue(1 + rng.below(p.get() - 1))
}

/// `D = ceil(2kp / (eps (p - 3)))` for `p > 5`, `k < p/4`, `eps > 2k/(p - 3)`.
pub fn derive_d_eq(p: PrimeModulus, k: usize, epsilon: Epsilon) -> Result<u64> {
    if is_trivial_regime(p, k) {
        return Err(Error::TrivialRegime(format!(
            "p = {p}, k = {k} needs p > 5 and k < p/4"
        )));
    }
    let (a, b) = (epsilon.numer() as u128, epsilon.denom() as u128);
    let (pp, kk) = (p.get() as u128, k as u128);
    // eps > 2k/(p-3)  <=>  a(p-3) > 2kb
    if a * (pp - 3) <= 2 * kk * b {
        return Err(Error::TrivialRegime(format!(
            "epsilon {epsilon} <= 2k/(p-3) = {}/{}",
            2 * k,
            p.get() - 3
        )));
    }
    let d = (2 * kk * pp * b).div_ceil(a * (pp - 3));
    if d >= pp {
        return Err(Error::TrivialRegime(format!(
            "D = {d} is not below p = {p}"
        )));
    }
    Ok(d as u64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SumEqualInstance {
    p: PrimeModulus,
    k: usize,
    g: u64,
    epsilon: Epsilon,
    mode: Mode,
}

impl SumEqualInstance {
    pub fn new(p: PrimeModulus, k: usize, g: u64, epsilon: Epsilon) -> Result<Self> {
        if k < 2 {
            return Err(Error::OutOfRange(format!(
                "need at least 2 parties, got {k}"
            )));
        }
        if g >= p.get() {
            return Err(Error::OutOfRange(format!(
                "target {g} not reduced modulo {p}"
            )));
        }
        let mode = match derive_d_eq(p, k, epsilon) {
            Ok(_) => Mode::DapProtocol,
            Err(Error::TrivialRegime(_)) => Mode::TrivialFallback,
            Err(e) => return Err(e),
        };
        Ok(SumEqualInstance {
            p,
            k,
            g,
            epsilon,
            mode,
        })
    }

    pub fn p(&self) -> PrimeModulus {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn target(&self) -> u64 {
        self.g
    }

    pub fn epsilon(&self) -> Epsilon {
        self.epsilon
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn sums_to_target(&self, inputs: &[u64]) -> bool {
        let p = self.p.get();
        inputs.iter().fold(0, |acc, &x| add_mod(acc, x % p, p)) == self.g
    }
}

/// A SUM-EQUAL instance with its progression family, if any.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SumEqualProtocol {
    instance: SumEqualInstance,
    family: Option<DapFamily>,
}

impl SumEqualProtocol {
    pub fn new(instance: SumEqualInstance) -> Result<Self> {
        let family = match instance.mode {
            Mode::DapProtocol => Some(DapFamily::new(
                instance.p,
                derive_d_eq(instance.p, instance.k, instance.epsilon)?,
            )?),
            Mode::TrivialFallback => None,
        };
        Ok(SumEqualProtocol { instance, family })
    }

    pub fn instance(&self) -> &SumEqualInstance {
        &self.instance
    }

    pub fn diff(&self) -> Option<u64> {
        self.family.map(|f| f.diff())
    }

    pub fn width(&self) -> u32 {
        self.header(None, None).width()
    }

    #[inline]
    pub fn encode(&self, c: u64, x: u64) -> MessageBase {
        let p = self.instance.p.get();
        match &self.family {
            Some(f) => mul_mod(c, x % p, p) % f.diff(),
            None => x % p,
        }
    }

    #[inline]
    fn decide_iter(&self, c: u64, messages: impl IntoIterator<Item = u64>) -> Bit {
        let p = self.instance.p.get();
        let hit = match &self.family {
            Some(f) => f
                .sumset_of_bases(messages)
                .contains(mul_mod(c, self.instance.g, p)),
            None => messages.into_iter().fold(0, |acc, x| add_mod(acc, x, p)) == self.instance.g,
        };
        hit as Bit
    }

    /// Coordinator: 1 iff `c * g` lies in the sumset of the announced bases.
    pub fn decide(&self, c: u64, messages: &[MessageBase]) -> Result<Bit> {
        if messages.len() != self.instance.k {
            return Err(Error::ArityMismatch {
                expected: self.instance.k,
                got: messages.len(),
            });
        }
        let bound = self.family.map_or(self.instance.p.get(), |f| f.diff());
        if let Some(&m) = messages.iter().find(|&&m| m >= bound) {
            return Err(Error::OutOfRange(format!("message {m} not below {bound}")));
        }
        Ok(self.decide_iter(c, messages.iter().copied()))
    }

    /// Output for a fixed `c`, without building a transcript. Inputs must be valid.
    #[inline]
    pub fn evaluate_with_c(&self, c: u64, inputs: &[u64]) -> Bit {
        debug_assert_eq!(inputs.len(), self.instance.k);
        self.decide_iter(c, inputs.iter().map(|&x| self.encode(c, x)))
    }

    fn header(&self, c: Option<u64>, seed: Option<u64>) -> Header {
        Header {
            protocol: ProtocolId::SumEqual,
            mode: self.instance.mode,
            p: self.instance.p.get(),
            k: self.instance.k,
            diff: self.diff(),
            c: self.family.and(c),
            seed,
            targets: vec![self.instance.g],
            epsilon: Some(self.instance.epsilon),
        }
    }

    pub fn run(&self, inputs: &[u64], public: PublicRandomness) -> Result<(Bit, Transcript)> {
        validate_inputs(self.instance.p, self.instance.k, inputs)?;
        let c = sample_c(public, self.instance.p).value();
        let messages: Vec<MessageBase> = inputs.iter().map(|&x| self.encode(c, x)).collect();
        let bit = self.decide(c, &messages)?;
        Ok((
            bit,
            Transcript::new(self.header(Some(c), Some(public.seed)), &messages),
        ))
    }

    /// Runs the coordinator for every `c` in `[1, p - 1]` and counts wrong outputs.
    pub fn exact_error(&self, inputs: &[u64]) -> Result<ErrorProfile> {
        validate_inputs(self.instance.p, self.instance.k, inputs)?;
        if self.instance.sums_to_target(inputs) {
            return Err(Error::OnPromise);
        }
        let p = self.instance.p.get();
        let failing = (1..p)
            .filter(|&c| self.evaluate_with_c(c, inputs) == 1)
            .count() as u64;
        Ok(ErrorProfile {
            p,
            k: self.instance.k,
            g: self.instance.g,
            epsilon: self.instance.epsilon,
            mode: self.instance.mode,
            inputs: inputs.to_vec(),
            failing,
            total: p - 1,
        })
    }
}

/// Exact error of one off-target input tuple over all choices of `c`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ErrorProfile {
    pub p: u64,
    pub k: usize,
    pub g: u64,
    pub epsilon: Epsilon,
    pub mode: Mode,
    pub inputs: Vec<u64>,
    /// Number of `c` for which the coordinator wrongly outputs 1.
    pub failing: u64,
    pub total: u64,
}

impl ErrorProfile {
    pub fn error(&self) -> Fraction {
        Fraction {
            count: self.failing,
            total: self.total,
        }
    }

    pub fn within_budget(&self) -> bool {
        self.epsilon.admits(self.failing, self.total)
    }
}

pub fn run_sumequal(
    instance: &SumEqualInstance,
    inputs: &[u64],
    public: PublicRandomness,
) -> Result<(Bit, Transcript)> {
    SumEqualProtocol::new(*instance)?.run(inputs, public)
}

pub fn exact_error(instance: &SumEqualInstance, inputs: &[u64]) -> Result<ErrorProfile> {
    SumEqualProtocol::new(*instance)?.exact_error(inputs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u64) -> PrimeModulus {
        PrimeModulus::new(n).unwrap()
    }

    fn eps(s: &str) -> Epsilon {
        s.parse().unwrap()
    }

    #[test]
    fn splitmix_reference_stream() {
        // published SplitMix64 outputs for seed 1234567
        let mut r = SplitMix64::new(1234567);
        assert_eq!(r.next_u64(), 6457827717110365317);
        assert_eq!(r.next_u64(), 3203168211198807973);
        assert_eq!(r.next_u64(), 9817491932198370423);
    }

    #[test]
    fn derive_d_eq_examples() {
        assert_eq!(derive_d_eq(p(19), 2, eps("1/2")).unwrap(), 10);
        assert!(matches!(
            derive_d_eq(p(19), 2, eps("1/4")),
            Err(Error::TrivialRegime(_))
        ));
        assert_eq!(derive_d_eq(p(101), 3, eps("1/10")).unwrap(), 62);
        // eps just above 2k/(p-3) rounds D up to p itself
        assert!(matches!(
            derive_d_eq(p(19), 2, eps("13/50")),
            Err(Error::TrivialRegime(_))
        ));
    }

    #[test]
    fn sample_c_is_deterministic_and_nonzero() {
        let q = p(19);
        for seed in 0..2000 {
            let a = sample_c(PublicRandomness::new(seed), q);
            assert_eq!(a, sample_c(PublicRandomness::new(seed), q));
            assert!((1..19).contains(&a.value()));
        }
        let q = p(3);
        assert!((0..100).all(|s| sample_c(PublicRandomness::new(s), q).value() != 0));
    }

    #[test]
    fn on_target_always_accepts() {
        let inst = SumEqualInstance::new(p(19), 2, 3, eps("1/2")).unwrap();
        assert_eq!(inst.mode(), Mode::DapProtocol);
        for seed in 0..500 {
            let (bit, t) = run_sumequal(&inst, &[1, 2], PublicRandomness::new(seed)).unwrap();
            assert_eq!(bit, 1);
            assert_eq!(t.total_bits(), 2 * 4);
        }
    }

    #[test]
    fn off_target_error_within_budget() {
        let inst = SumEqualInstance::new(p(19), 2, 3, eps("1/2")).unwrap();
        let proto = SumEqualProtocol::new(inst).unwrap();
        let accepted = (1..19)
            .filter(|&c| proto.evaluate_with_c(c, &[4, 6]) == 1)
            .count();
        assert!(accepted * 2 <= 18);
        let profile = exact_error(&inst, &[4, 6]).unwrap();
        assert_eq!(profile.failing, accepted as u64);
        assert!(profile.within_budget());
        assert_eq!(exact_error(&inst, &[1, 2]), Err(Error::OnPromise));
    }

    #[test]
    fn fallback_is_exact() {
        let inst = SumEqualInstance::new(p(19), 2, 3, eps("1/4")).unwrap();
        assert_eq!(inst.mode(), Mode::TrivialFallback);
        let (bit, t) = run_sumequal(&inst, &[1, 2], PublicRandomness::new(9)).unwrap();
        assert_eq!((bit, t.total_bits()), (1, 10));
        let (bit, _) = run_sumequal(&inst, &[4, 6], PublicRandomness::new(9)).unwrap();
        assert_eq!(bit, 0);
        assert_eq!(exact_error(&inst, &[4, 6]).unwrap().failing, 0);
    }

    #[test]
    fn arity_is_checked() {
        let inst = SumEqualInstance::new(p(19), 2, 3, eps("1/2")).unwrap();
        assert!(matches!(
            run_sumequal(&inst, &[1, 2, 3], PublicRandomness::new(0)),
            Err(Error::ArityMismatch { .. })
        ));
    }
}
