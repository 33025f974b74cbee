//! Deterministic one-round protocol for distinguishing two candidate sums.
//!
//! Each party scales its input by a public constant `c`, then sends the
//! base of the `D`-progression holding the scaled value. The coordinator
//! knows the scaled sum lies in the sumset of the announced progressions,
//! a run of at most `(p - 1) / 2` consecutive `+D` steps, while `c` puts
//! the two scaled targets exactly `(p - 1) / 2` steps apart. At most one of
//! them can be in the run.

use serde::Serialize;

use crate::additive::{DapFamily, SumsetInterval};
use crate::error::{Error, Result};
use crate::modular::{add_mod, inverse_mod, mul_mod, sub_mod, PrimeModulus, Residue};
use crate::transcript::{Header, Mode, ProtocolId, Transcript};

/// Value a party sends: a progression base, or a raw residue in fallback mode.
pub type MessageBase = u64;

/// Protocol output: 0 for `g0`, 1 for `g1`.
pub type Bit = u8;

/// Whether `(p, k)` is outside the regime where the progression protocol applies.
pub(crate) fn is_trivial_regime(p: PrimeModulus, k: usize) -> bool {
    p.get() <= 5 || 4 * k as u128 >= p.get() as u128
}

pub(crate) fn validate_inputs(p: PrimeModulus, k: usize, inputs: &[u64]) -> Result<()> {
    if inputs.len() != k {
        return Err(Error::ArityMismatch {
            expected: k,
            got: inputs.len(),
        });
    }
    if let Some(&x) = inputs.iter().find(|&&x| x >= p.get()) {
        return Err(Error::OutOfRange(format!(
            "input {x} not reduced modulo {p}"
        )));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SumDistInstance {
    p: PrimeModulus,
    k: usize,
    g0: u64,
    g1: u64,
    mode: Mode,
}

impl SumDistInstance {
    pub fn new(p: PrimeModulus, k: usize, g0: u64, g1: u64) -> Result<Self> {
        if k < 2 {
            return Err(Error::OutOfRange(format!(
                "need at least 2 parties, got {k}"
            )));
        }
        if g0 >= p.get() || g1 >= p.get() {
            return Err(Error::OutOfRange(format!(
                "targets must be reduced modulo {p}"
            )));
        }
        if g0 == g1 {
            return Err(Error::EqualTargets);
        }
        let mode = if is_trivial_regime(p, k) {
            Mode::TrivialFallback
        } else {
            Mode::DapProtocol
        };
        Ok(SumDistInstance { p, k, g0, g1, mode })
    }

    pub fn p(&self) -> PrimeModulus {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn targets(&self) -> (u64, u64) {
        (self.g0, self.g1)
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Whether the inputs satisfy the promise `sum in {g0, g1}`.
    pub fn on_promise(&self, inputs: &[u64]) -> bool {
        let p = self.p.get();
        let s = inputs.iter().fold(0, |acc, &x| add_mod(acc, x % p, p));
        s == self.g0 || s == self.g1
    }
}

/// `D = ceil(2kp / (p - 3))`, defined for `p > 5` and `k < p / 4`.
pub fn derive_d(p: PrimeModulus, k: usize) -> Result<u64> {
    if is_trivial_regime(p, k) {
        return Err(Error::TrivialRegime(format!(
            "p = {p}, k = {k} needs p > 5 and k < p/4"
        )));
    }
    let p = p.get() as u128;
    let d = (2 * k as u128 * p).div_ceil(p - 3);
    if d >= p {
        return Err(Error::TrivialRegime(format!(
            "D = {d} is not below p = {p}"
        )));
    }
    Ok(d as u64)
}

/// `c = (p - 1)/2 * D * (g1 - g0)^-1 mod p`, which puts `c*g0` and `c*g1`
/// at distance exactly `(p - 1) / 2`.
pub fn derive_c(p: PrimeModulus, diff: u64, g0: Residue, g1: Residue) -> Result<Residue> {
    let m = p.get();
    if g0.modulus() != m || g1.modulus() != m {
        return Err(Error::MixedParameters);
    }
    if diff == 0 || diff >= m {
        return Err(Error::BadDifference { diff, modulus: m });
    }
    if g0 == g1 {
        return Err(Error::EqualTargets);
    }
    let gap_inv = inverse_mod(sub_mod(g1.value(), g0.value(), m), m)?;
    Ok(p.residue(mul_mod(mul_mod(p.half(), diff, m), gap_inv, m)))
}

/// Public parameters shared by the parties and the coordinator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SumDistParams {
    family: DapFamily,
    c: u64,
    #[serde(skip)]
    scaled_g0: u64,
}

impl SumDistParams {
    pub fn derive(instance: &SumDistInstance) -> Result<Self> {
        let p = instance.p;
        let diff = derive_d(p, instance.k)?;
        let c = derive_c(p, diff, p.residue(instance.g0), p.residue(instance.g1))?.value();
        Ok(SumDistParams {
            family: DapFamily::new(p, diff)?,
            c,
            scaled_g0: mul_mod(c, instance.g0, p.get()),
        })
    }

    pub fn c(&self) -> u64 {
        self.c
    }

    pub fn diff(&self) -> u64 {
        self.family.diff()
    }

    pub fn family(&self) -> &DapFamily {
        &self.family
    }
}

/// `b = ((c * x) mod p) mod D`.
#[inline]
pub fn party_message(x: u64, params: &SumDistParams) -> MessageBase {
    let p = params.family.modulus().get();
    mul_mod(params.c, x % p, p) % params.family.diff()
}

/// Outputs 0 iff `c * g0` lies in the sumset of the announced progressions.
pub fn coordinator_decide(
    bases: &[MessageBase],
    instance: &SumDistInstance,
    params: &SumDistParams,
) -> Result<Bit> {
    if bases.len() != instance.k {
        return Err(Error::ArityMismatch {
            expected: instance.k,
            got: bases.len(),
        });
    }
    if let Some(&b) = bases.iter().find(|&&b| b >= params.diff()) {
        return Err(Error::OutOfRange(format!(
            "base {b} not below D = {}",
            params.diff()
        )));
    }
    Ok(decide_bases(params, bases.iter().copied()))
}

#[inline]
fn decide_bases(params: &SumDistParams, bases: impl IntoIterator<Item = u64>) -> Bit {
    let sumset: SumsetInterval = params.family.sumset_of_bases(bases);
    if sumset.contains(params.scaled_g0) {
        0
    } else {
        1
    }
}

/// A SUM-DIST instance with its derived public parameters.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SumDistProtocol {
    instance: SumDistInstance,
    params: Option<SumDistParams>,
}

impl SumDistProtocol {
    pub fn new(instance: SumDistInstance) -> Result<Self> {
        let params = match instance.mode {
            Mode::DapProtocol => Some(SumDistParams::derive(&instance)?),
            Mode::TrivialFallback => None,
        };
        Ok(SumDistProtocol { instance, params })
    }

    pub fn instance(&self) -> &SumDistInstance {
        &self.instance
    }

    pub fn params(&self) -> Option<&SumDistParams> {
        self.params.as_ref()
    }

    /// Bits each party sends.
    pub fn width(&self) -> u32 {
        self.header().width()
    }

    /// Number of distinct messages a party can send.
    pub fn alphabet(&self) -> u64 {
        match &self.params {
            Some(params) => params.diff(),
            None => self.instance.p.get(),
        }
    }

    #[inline]
    pub fn encode(&self, x: u64) -> MessageBase {
        match &self.params {
            Some(params) => party_message(x, params),
            None => x % self.instance.p.get(),
        }
    }

    pub fn decide(&self, messages: &[MessageBase]) -> Result<Bit> {
        match &self.params {
            Some(params) => coordinator_decide(messages, &self.instance, params),
            None => {
                validate_inputs(self.instance.p, self.instance.k, messages)?;
                Ok(self.fallback_decide(messages.iter().copied()))
            }
        }
    }

    fn fallback_decide(&self, residues: impl IntoIterator<Item = u64>) -> Bit {
        let p = self.instance.p.get();
        let sum = residues.into_iter().fold(0, |acc, x| add_mod(acc, x, p));
        if sum == self.instance.g0 {
            0
        } else {
            1
        }
    }

    /// Encodes and decides in one pass without building a transcript.
    ///
    /// Inputs must already be validated: `k` residues below `p`.
    #[inline]
    pub fn evaluate(&self, inputs: &[u64]) -> Bit {
        debug_assert_eq!(inputs.len(), self.instance.k);
        match &self.params {
            Some(params) => decide_bases(params, inputs.iter().map(|&x| party_message(x, params))),
            None => self.fallback_decide(inputs.iter().copied()),
        }
    }

    pub fn header(&self) -> Header {
        Header {
            protocol: ProtocolId::SumDist,
            mode: self.instance.mode,
            p: self.instance.p.get(),
            k: self.instance.k,
            diff: self.params.map(|pr| pr.diff()),
            c: self.params.map(|pr| pr.c),
            seed: None,
            targets: vec![self.instance.g0, self.instance.g1],
            epsilon: None,
        }
    }

    pub fn run(&self, inputs: &[u64]) -> Result<(Bit, Transcript)> {
        validate_inputs(self.instance.p, self.instance.k, inputs)?;
        let messages: Vec<MessageBase> = inputs.iter().map(|&x| self.encode(x)).collect();
        let bit = self.decide(&messages)?;
        Ok((bit, Transcript::new(self.header(), &messages)))
    }
}

/// Derives parameters, encodes every input, and runs the coordinator.
///
/// The output is only meaningful when the inputs satisfy the promise.
pub fn run_sumdist(instance: &SumDistInstance, inputs: &[u64]) -> Result<(Bit, Transcript)> {
    SumDistProtocol::new(*instance)?.run(inputs)
}
