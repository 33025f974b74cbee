//! Running the prime-field protocols over the integers and over Z_N for
//! square-free N.
//!
//! Over Z, n-bit inputs are embedded in the smallest prime field larger than
//! any possible sum, so sums agree with their residues. Over Z_N, one
//! sub-protocol runs per prime factor and the answers combine by CRT.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::modular::{next_prime_above, CrtSystem, PrimeModulus, MODULUS_LIMIT};
use crate::rational::Epsilon;
use crate::sumdist::{Bit, SumDistInstance, SumDistProtocol};
use crate::sumequal::{PublicRandomness, SplitMix64, SumEqualInstance, SumEqualProtocol};
use crate::transcript::{CompositeTranscript, Transcript};

/// Which question the parties are answering, with its targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "problem", rename_all = "kebab-case")]
pub enum Problem {
    SumDist { g0: u64, g1: u64 },
    SumEqual { g: u64, epsilon: Epsilon },
}

/// Parties hold integers in `[0, 2^n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct IntegerInstance {
    pub n: u32,
    pub k: usize,
    pub problem: Problem,
}

/// The prime-field instance an integer instance runs as.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LiftedInstance {
    SumDist(SumDistInstance),
    SumEqual(SumEqualInstance),
}

impl LiftedInstance {
    pub fn p(&self) -> PrimeModulus {
        match self {
            LiftedInstance::SumDist(i) => i.p(),
            LiftedInstance::SumEqual(i) => i.p(),
        }
    }
}

/// Picks the smallest prime above `k * 2^n` and restates the instance there.
pub fn lift_to_prime(instance: &IntegerInstance) -> Result<LiftedInstance> {
    let k = instance.k as u128;
    if k < 2 {
        return Err(Error::OutOfRange(format!(
            "need at least 2 parties, got {k}"
        )));
    }
    let bound = 1u128
        .checked_shl(instance.n)
        .filter(|_| instance.n < 64)
        .map(|b| b * k)
        .filter(|&b| b < MODULUS_LIMIT as u128)
        .ok_or_else(|| {
            Error::OutOfRange(format!(
                "k * 2^n = {} * 2^{} is not below 2^62",
                k, instance.n
            ))
        })?;
    let max_sum = k * ((1u128 << instance.n) - 1);
    let check = |g: u64| {
        if g as u128 > max_sum {
            Err(Error::OutOfRange(format!(
                "target {g} exceeds the largest sum {max_sum}"
            )))
        } else {
            Ok(g)
        }
    };
    let p = next_prime_above(bound as u64)?;
    Ok(match instance.problem {
        Problem::SumDist { g0, g1 } => {
            LiftedInstance::SumDist(SumDistInstance::new(p, instance.k, check(g0)?, check(g1)?)?)
        }
        Problem::SumEqual { g, epsilon } => {
            LiftedInstance::SumEqual(SumEqualInstance::new(p, instance.k, check(g)?, epsilon)?)
        }
    })
}

/// Runs the lifted protocol on n-bit integer inputs. `seed` is only read by
/// the randomized problem.
pub fn run_over_z(
    instance: &IntegerInstance,
    inputs: &[u64],
    seed: u64,
) -> Result<(Bit, Transcript)> {
    if let Some(&x) = inputs
        .iter()
        .find(|&&x| instance.n < 64 && x >> instance.n != 0)
    {
        return Err(Error::OutOfRange(format!(
            "input {x} does not fit in {} bits",
            instance.n
        )));
    }
    match lift_to_prime(instance)? {
        LiftedInstance::SumDist(i) => SumDistProtocol::new(i)?.run(inputs),
        LiftedInstance::SumEqual(i) => {
            SumEqualProtocol::new(i)?.run(inputs, PublicRandomness::new(seed))
        }
    }
}

/// Seed for the factor at `index`: the `index`-th SplitMix64 output of the master seed.
pub fn factor_seed(master: u64, index: usize) -> u64 {
    let mut rng = SplitMix64::new(master);
    let mut out = rng.next_u64();
    for _ in 0..index {
        out = rng.next_u64();
    }
    out
}

/// One prime factor's share of a Z_N instance.
#[derive(Clone, Copy, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FactorProtocol {
    SumDist(SumDistProtocol),
    SumEqual(SumEqualProtocol),
    /// `g0 = g1` modulo this factor, so it carries no information.
    Skipped {
        p: u64,
    },
}

/// Inputs and targets live in Z_N with `N` a product of distinct odd primes.
#[derive(Clone, Debug, Serialize)]
pub struct SquareFreeInstance {
    system: CrtSystem,
    k: usize,
    problem: Problem,
    factors: Vec<FactorProtocol>,
}

impl SquareFreeInstance {
    /// For the randomized problem the overall budget is split evenly over
    /// the factors.
    pub fn new(factors: Vec<u64>, k: usize, problem: Problem) -> Result<Self> {
        let system = CrtSystem::new(factors)?;
        let n = system.product();
        let m = system.moduli().len() as u64;
        let mut subs = Vec::with_capacity(system.moduli().len());
        match problem {
            Problem::SumDist { g0, g1 } => {
                if g0 >= n || g1 >= n {
                    return Err(Error::OutOfRange(format!("targets must be below N = {n}")));
                }
                if g0 == g1 {
                    return Err(Error::EqualTargets);
                }
            }
            Problem::SumEqual { g, .. } if g >= n => {
                return Err(Error::OutOfRange(format!(
                    "target {g} must be below N = {n}"
                )));
            }
            Problem::SumEqual { .. } => {}
        }
        for &p in system.moduli() {
            let prime = PrimeModulus::new(p)?;
            subs.push(match problem {
                Problem::SumDist { g0, g1 } if g0 % p == g1 % p => FactorProtocol::Skipped { p },
                Problem::SumDist { g0, g1 } => FactorProtocol::SumDist(SumDistProtocol::new(
                    SumDistInstance::new(prime, k, g0 % p, g1 % p)?,
                )?),
                Problem::SumEqual { g, epsilon } => {
                    FactorProtocol::SumEqual(SumEqualProtocol::new(SumEqualInstance::new(
                        prime,
                        k,
                        g % p,
                        epsilon.split(m)?,
                    )?)?)
                }
            });
        }
        Ok(SquareFreeInstance {
            system,
            k,
            problem,
            factors: subs,
        })
    }

    pub fn system(&self) -> &CrtSystem {
        &self.system
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn problem(&self) -> Problem {
        self.problem
    }

    pub fn factors(&self) -> &[FactorProtocol] {
        &self.factors
    }
}

/// Outcome of a Z_N run, with each factor's own answer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZnOutcome {
    pub decision: Bit,
    /// `None` for skipped factors.
    pub factor_decisions: Vec<Option<Bit>>,
    pub transcript: CompositeTranscript,
}

/// Runs every informative factor. SUM-EQUAL accepts iff every factor
/// accepts; SUM-DIST reports the first informative factor, which under the
/// promise agrees with all others.
pub fn run_over_zn(instance: &SquareFreeInstance, inputs: &[u64], seed: u64) -> Result<ZnOutcome> {
    let n = instance.system.product();
    if inputs.len() != instance.k {
        return Err(Error::ArityMismatch {
            expected: instance.k,
            got: inputs.len(),
        });
    }
    if let Some(&x) = inputs.iter().find(|&&x| x >= n) {
        return Err(Error::OutOfRange(format!(
            "input {x} must be below N = {n}"
        )));
    }
    let mut decisions = Vec::with_capacity(instance.factors.len());
    let mut transcripts = Vec::new();
    let mut reduced = vec![0; inputs.len()];
    for (i, factor) in instance.factors.iter().enumerate() {
        let p = instance.system.moduli()[i];
        for (r, &x) in reduced.iter_mut().zip(inputs) {
            *r = x % p;
        }
        let (bit, t) = match factor {
            FactorProtocol::Skipped { .. } => {
                decisions.push(None);
                continue;
            }
            FactorProtocol::SumDist(proto) => proto.run(&reduced)?,
            FactorProtocol::SumEqual(proto) => {
                proto.run(&reduced, PublicRandomness::new(factor_seed(seed, i)))?
            }
        };
        decisions.push(Some(bit));
        transcripts.push(t);
    }
    let decision = match instance.problem {
        Problem::SumEqual { .. } => decisions.iter().all(|d| *d == Some(1)) as Bit,
        Problem::SumDist { .. } => decisions
            .iter()
            .flatten()
            .copied()
            .next()
            .expect("distinct targets differ modulo some factor"),
    };
    Ok(ZnOutcome {
        decision,
        factor_decisions: decisions,
        transcript: CompositeTranscript {
            modulus: n,
            factors: transcripts,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eps(s: &str) -> Epsilon {
        s.parse().unwrap()
    }

    fn dist_problem(g0: u64, g1: u64) -> Problem {
        Problem::SumDist { g0, g1 }
    }

    #[test]
    fn lift_examples() {
        let inst = |n, k| IntegerInstance {
            n,
            k,
            problem: dist_problem(0, 1),
        };
        assert_eq!(lift_to_prime(&inst(4, 2)).unwrap().p().get(), 37);
        let lifted = lift_to_prime(&inst(1, 2)).unwrap();
        assert_eq!(lifted.p().get(), 5);
        match lifted {
            LiftedInstance::SumDist(i) => {
                assert_eq!(i.mode(), crate::transcript::Mode::TrivialFallback)
            }
            _ => unreachable!(),
        }
        assert!(matches!(
            lift_to_prime(&inst(60, 16)),
            Err(Error::OutOfRange(_))
        ));
        assert!(matches!(
            lift_to_prime(&inst(64, 2)),
            Err(Error::OutOfRange(_))
        ));
    }

    #[test]
    fn lift_rejects_unreachable_targets() {
        let inst = IntegerInstance {
            n: 4,
            k: 2,
            problem: dist_problem(0, 31),
        };
        assert!(lift_to_prime(&inst).is_err());
    }

    #[test]
    fn over_z_examples() {
        let d = IntegerInstance {
            n: 4,
            k: 2,
            problem: dist_problem(10, 20),
        };
        assert_eq!(run_over_z(&d, &[4, 6], 0).unwrap().0, 0);
        assert_eq!(run_over_z(&d, &[15, 5], 0).unwrap().0, 1);
        assert!(matches!(
            run_over_z(&d, &[16, 0], 0),
            Err(Error::OutOfRange(_))
        ));

        let e = IntegerInstance {
            n: 4,
            k: 2,
            problem: Problem::SumEqual {
                g: 3,
                epsilon: eps("1/2"),
            },
        };
        assert_eq!(run_over_z(&e, &[1, 2], 77).unwrap().0, 1);
    }

    #[test]
    fn over_zn_examples() {
        let problem = Problem::SumEqual {
            g: 3,
            epsilon: eps("1/2"),
        };
        let inst = SquareFreeInstance::new(vec![3, 5], 2, problem).unwrap();
        let out = run_over_zn(&inst, &[7, 11], 1).unwrap();
        assert_eq!(out.decision, 1);
        assert_eq!(out.transcript.factors.len(), 2);
        assert_eq!(out.transcript.total_bits(), 2 * 2 + 2 * 3);
        let out = run_over_zn(&inst, &[1, 1], 1).unwrap();
        assert_eq!(out.decision, 0);
        assert_eq!(out.factor_decisions[0], Some(0));
        assert!(matches!(
            SquareFreeInstance::new(vec![3, 3], 2, problem),
            Err(Error::NotSquareFree(3))
        ));
    }

    #[test]
    fn over_zn_sumdist_skips_coinciding_factors() {
        // 1 and 4 agree mod 3 but differ mod 5
        let inst = SquareFreeInstance::new(vec![3, 5], 2, dist_problem(1, 4)).unwrap();
        assert!(matches!(
            inst.factors()[0],
            FactorProtocol::Skipped { p: 3 }
        ));
        let out = run_over_zn(&inst, &[2, 2], 0).unwrap();
        assert_eq!(out.decision, 1);
        assert_eq!(out.factor_decisions, vec![None, Some(1)]);
        assert_eq!(out.transcript.factors.len(), 1);
        let out = run_over_zn(&inst, &[10, 6], 0).unwrap();
        assert_eq!(out.decision, 0);
    }

    #[test]
    fn factor_seeds_differ() {
        let seeds: Vec<u64> = (0..4).map(|i| factor_seed(42, i)).collect();
        for i in 0..4 {
            for j in 0..i {
                assert_ne!(seeds[i], seeds[j]);
            }
        }
        assert_eq!(factor_seed(42, 2), factor_seed(42, 2));
    }
}
