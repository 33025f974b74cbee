//! One-round coordinator-model protocols for sums over Z_p.
//!
//! `k` parties each hold a residue and send a single message to a
//! coordinator, who never talks back. This crate implements
//!
//! * a deterministic protocol deciding whether the inputs sum to `g0` or to
//!   `g1`, using `k * ceil(log2 D)` bits with `D` about `2k` regardless of
//!   `p` ([`sumdist`]);
//! * a public-randomness protocol testing whether the inputs sum to `g`,
//!   with one-sided error at most `eps` ([`sumequal`]);
//! * their lifts to n-bit integers and to square-free moduli ([`ring`]);
//! * the arithmetic progression and sumset machinery both rest on
//!   ([`additive`]), and the modular arithmetic under that ([`modular`]);
//! * verification and measurement tools, including a counterexample finder
//!   for protocols whose messages are too short ([`harness`]).

pub mod additive;
pub mod error;
pub mod harness;
pub mod modular;
pub mod rational;
pub mod ring;
pub mod sumdist;
pub mod sumequal;
pub mod transcript;

pub use additive::{
    brute_sumset, check_cauchy_davenport, dap_of, dist, interval_contains, sumset_interval, Dap,
    DapFamily, DenseSet, SumsetInterval,
};
pub use error::{Error, Result};
pub use modular::{
    crt_combine, is_prime, mod_inverse, next_prime_above, CrtSystem, PrimeModulus, Residue,
};
pub use rational::{Epsilon, Fraction};
pub use ring::{
    factor_seed, lift_to_prime, run_over_z, run_over_zn, FactorProtocol, IntegerInstance,
    LiftedInstance, Problem, SquareFreeInstance, ZnOutcome,
};
pub use sumdist::{
    coordinator_decide, derive_c, derive_d, party_message, run_sumdist, Bit, MessageBase,
    SumDistInstance, SumDistParams, SumDistProtocol,
};
pub use sumequal::{
    derive_d_eq, exact_error, run_sumequal, sample_c, ErrorProfile, PublicRandomness,
    SumEqualInstance, SumEqualProtocol,
};
pub use transcript::{CompositeTranscript, Header, Message, Mode, ProtocolId, Transcript};
