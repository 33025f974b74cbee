//! Verification and adversarial equipment: exhaustive correctness checks,
//! exact error measurement, communication tables, and the lower-bound
//! counterexample finder.

pub mod error_rate;
pub mod lowerbound;
pub mod report;
pub mod table;
pub mod verify;

pub use error_rate::{measure_error_sumequal, ErrorReport};
pub use lowerbound::{
    find_counterexample, lower_bound_threshold, survey_random_protocols, CounterExample,
    LowerBoundReport, PartitionProtocol,
};
pub use report::{render_table, Document, Report, SCHEMA_VERSION};
pub use table::{comm_table, CommRow, CommTable, CONSTANT_BOUND};
pub use verify::{exhaustive_verify_sumdist, SumDistReport, VerifyConfig};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::sumequal::SplitMix64;

/// Deterministic generator for one report cell, keyed by its coordinates.
pub(crate) fn cell_rng(seed: u64, coords: &[u64]) -> ChaCha8Rng {
    let mut mix = SplitMix64::new(seed);
    let mut key = mix.next_u64();
    for &c in coords {
        key = SplitMix64::new(key ^ c).next_u64();
    }
    ChaCha8Rng::seed_from_u64(key)
}
