//! `coordsum`: run, verify and tabulate one-round coordinator protocols.
//!
//! Exit status is 0 on success, 1 when a checked property fails, and 2 on
//! a usage or configuration error.

mod input;
mod record;

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use coordsum_core::additive::DENSE_LIMIT;
use coordsum_core::harness::{
    comm_table, exhaustive_verify_sumdist, find_counterexample, lower_bound_threshold,
    measure_error_sumequal, render_table, survey_random_protocols, Document, PartitionProtocol,
    Report, VerifyConfig,
};
use coordsum_core::{
    is_prime, run_over_z, run_over_zn, run_sumdist, Epsilon, FactorProtocol, Fraction,
    IntegerInstance, Mode, PrimeModulus, Problem, PublicRandomness, SquareFreeInstance,
    SumDistInstance, SumDistProtocol, SumEqualInstance, SumEqualProtocol,
};

use record::{AttackRecord, RunRecord};

#[derive(Parser)]
#[command(
    name = "coordsum",
    version,
    about = "One-round coordinator protocols for distinguishing sums"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, env = "COORDSUM_FORMAT", default_value_t = Format::Table)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Args)]
struct Inputs {
    /// Party inputs, comma separated.
    #[arg(
        long,
        value_delimiter = ',',
        num_args = 1..,
        allow_negative_numbers = true,
        conflicts_with = "inputs_file",
        required_unless_present = "inputs_file"
    )]
    inputs: Option<Vec<u64>>,

    /// File holding the party inputs, separated by commas or whitespace.
    #[arg(long)]
    inputs_file: Option<PathBuf>,

    /// Number of parties; defaults to the number of inputs.
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Args)]
struct Targets {
    /// SUM-DIST target for output 0.
    #[arg(long, requires = "g1", conflicts_with = "g")]
    g0: Option<u64>,

    /// SUM-DIST target for output 1.
    #[arg(long, requires = "g0", conflicts_with = "g")]
    g1: Option<u64>,

    /// SUM-EQUAL target.
    #[arg(long, requires = "eps")]
    g: Option<u64>,

    /// SUM-EQUAL error budget as a fraction `a/b`.
    #[arg(long, requires = "g")]
    eps: Option<Epsilon>,

    /// Public-randomness seed for SUM-EQUAL.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Run SUM-DIST over Z_p.
    Sumdist {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        g0: u64,
        #[arg(long)]
        g1: u64,
        #[command(flatten)]
        inputs: Inputs,
    },
    /// Run SUM-EQUAL over Z_p.
    Sumequal {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        g: u64,
        /// Error budget as a fraction `a/b`.
        #[arg(long)]
        eps: Epsilon,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also enumerate every multiplier and report the exact error.
        #[arg(long)]
        exact_error: bool,
        #[command(flatten)]
        inputs: Inputs,
    },
    /// Run either problem on n-bit integer inputs.
    OverZ {
        /// Input width in bits.
        #[arg(long)]
        n: u32,
        #[command(flatten)]
        targets: Targets,
        #[command(flatten)]
        inputs: Inputs,
    },
    /// Run either problem over Z_N for N a product of distinct odd primes.
    OverZn {
        /// Prime factors of N, comma separated.
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        factors: Vec<u64>,
        #[command(flatten)]
        targets: Targets,
        #[command(flatten)]
        inputs: Inputs,
    },
    /// Check SUM-DIST on every target pair for a range of primes and party counts.
    Verify {
        #[arg(long, default_value_t = 3)]
        p_min: u64,
        #[arg(long)]
        p_max: u64,
        #[arg(long, default_value_t = 2)]
        k_min: usize,
        #[arg(long)]
        k_max: usize,
        /// Enumerate every on-promise tuple when p^k is at most this.
        #[arg(long, default_value_t = 10_000_000)]
        limit: u64,
        /// Tuples sampled per target pair above the limit.
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Measure the exact SUM-EQUAL error on random off-target inputs.
    Error {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        eps: Epsilon,
        #[arg(long, default_value_t = 1_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Search for indistinguishable input pairs against t-bit protocols.
    Lowerbound {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        k: usize,
        /// Bits per party; defaults to the largest covered by the bound.
        #[arg(long)]
        t: Option<u32>,
        #[arg(long, default_value_t = 100)]
        random_protocols: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        g0: u64,
        #[arg(long, default_value_t = 1)]
        g1: u64,
        /// Attack the SUM-DIST protocol itself instead of random protocols.
        #[arg(long, conflicts_with = "t")]
        against_sumdist: bool,
    },
    /// Tabulate communication cost over primes and party counts.
    Table {
        /// Party counts: `a..b` or a comma-separated list.
        #[arg(long, default_value = "2..16")]
        k: String,
        /// Primes: a list, or `a..b` for every odd prime in the range.
        #[arg(long)]
        p: String,
        /// Tabulate SUM-EQUAL with this budget instead of SUM-DIST.
        #[arg(long)]
        eps: Option<Epsilon>,
    },
}

/// A configuration problem, reported with exit status 2.
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

type Outcome = Result<ExitCode, Usage>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command, cli.format) {
        Ok(code) => code,
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command, format: Format) -> Outcome {
    match command {
        Command::Sumdist { p, g0, g1, inputs } => cmd_sumdist(p, g0, g1, &inputs, format),
        Command::Sumequal {
            p,
            g,
            eps,
            seed,
            exact_error,
            inputs,
        } => cmd_sumequal(p, g, eps, seed, exact_error, &inputs, format),
        Command::OverZ { n, targets, inputs } => cmd_over_z(n, &targets, &inputs, format),
        Command::OverZn {
            factors,
            targets,
            inputs,
        } => cmd_over_zn(factors, &targets, &inputs, format),
        Command::Verify {
            p_min,
            p_max,
            k_min,
            k_max,
            limit,
            samples,
            seed,
        } => {
            let config = VerifyConfig {
                enumeration_limit: limit,
                samples_per_pair: samples,
                seed,
            };
            let mut reports = Vec::new();
            for p in (p_min.max(3)..=p_max).filter(|&n| is_prime(n).unwrap_or(false)) {
                for k in k_min..=k_max {
                    reports.push(exhaustive_verify_sumdist(
                        PrimeModulus::new(p)?,
                        k,
                        &config,
                    )?);
                }
            }
            if reports.is_empty() {
                return Err(Usage(format!(
                    "no odd primes in [{p_min}, {p_max}] or no k in [{k_min}, {k_max}]"
                )));
            }
            Ok(emit("sumdist-verify", &reports, format))
        }
        Command::Error {
            p,
            k,
            eps,
            trials,
            seed,
        } => {
            let report = measure_error_sumequal(PrimeModulus::new(p)?, k, eps, trials, seed)?;
            if report.mode == Mode::TrivialFallback {
                fallback_note(p, k, eps);
            }
            Ok(emit("sumequal-error", &[report], format))
        }
        Command::Lowerbound {
            p,
            k,
            t,
            random_protocols,
            seed,
            g0,
            g1,
            against_sumdist,
        } => {
            if p > DENSE_LIMIT {
                return Err(Usage(format!(
                    "p must be at most {DENSE_LIMIT} to tabulate protocols"
                )));
            }
            let prime = PrimeModulus::new(p)?;
            if against_sumdist {
                let proto = SumDistProtocol::new(SumDistInstance::new(prime, k, g0, g1)?)?;
                let labels = PartitionProtocol::from_sumdist(&proto)?;
                let found = find_counterexample(&labels, g0, g1)?.is_some();
                let record = AttackRecord {
                    p,
                    k,
                    t: labels.t(),
                    g0,
                    g1,
                    found,
                };
                return Ok(emit("lowerbound-sumdist", &[record], format));
            }
            let t = match t.or_else(|| lower_bound_threshold(p, k)) {
                Some(t) => t,
                None => {
                    return Err(Usage(format!(
                        "no t is covered for p = {p}, k = {k}; pass --t"
                    )))
                }
            };
            let report = survey_random_protocols(prime, k, t, g0, g1, random_protocols, seed)?;
            Ok(emit("lowerbound", &[report], format))
        }
        Command::Table { k, p, eps } => {
            let ks = input::parse_span(&k)?
                .into_iter()
                .map(|k| k as usize)
                .collect::<Vec<_>>();
            let primes = input::parse_primes(&p)?;
            let table = comm_table(&primes, &ks, eps)?;
            Ok(emit("comm-table", &[table], format))
        }
    }
}

fn emit<R: Report>(kind: &'static str, records: &[R], format: Format) -> ExitCode {
    match format {
        Format::Table => out(&render_table(records)),
        Format::Json => out(&(Document::new(kind, records).to_json() + "\n")),
    }
    status(records.iter().all(Report::passed))
}

fn emit_run(record: RunRecord, format: Format) -> ExitCode {
    if record.off_promise() {
        eprintln!(
            "warning: off-promise: inputs sum to neither target; the decision carries no guarantee"
        );
    }
    match format {
        Format::Table => {
            out(&render_table(std::slice::from_ref(&record)));
            out(&format!("\n{}", record.transcript));
        }
        Format::Json => {
            out(&(Document::new("run", std::slice::from_ref(&record)).to_json() + "\n"))
        }
    }
    status(record.passed())
}

/// Writes to stdout; a closed pipe is not an error worth reporting.
fn out(text: &str) {
    let _ = io::stdout().lock().write_all(text.as_bytes());
}

fn status(passed: bool) -> ExitCode {
    if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn fallback_note(p: u64, k: usize, eps: Epsilon) {
    eprintln!(
        "note: eps = {eps} is outside the progression regime for p = {p}, k = {k}; \
         parties send full residues"
    );
}

fn party_inputs(inputs: &Inputs) -> Result<(Vec<u64>, usize), Usage> {
    let values = input::read_inputs(inputs.inputs.as_deref(), inputs.inputs_file.as_deref())?;
    let k = inputs.k.unwrap_or(values.len());
    if k != values.len() {
        return Err(Usage(format!(
            "--k is {k} but {} inputs were given",
            values.len()
        )));
    }
    Ok((values, k))
}

fn sum_mod(xs: &[u64], m: u64) -> u64 {
    xs.iter()
        .fold(0, |acc, &x| ((acc as u128 + x as u128) % m as u128) as u64)
}

fn sumdist_expected(sum: u64, g0: u64, g1: u64) -> Option<u8> {
    if sum == g0 {
        Some(0)
    } else if sum == g1 {
        Some(1)
    } else {
        None
    }
}

fn problem_of(targets: &Targets) -> Result<Problem, Usage> {
    match (targets.g0, targets.g1, targets.g, targets.eps) {
        (Some(g0), Some(g1), None, _) => Ok(Problem::SumDist { g0, g1 }),
        (None, None, Some(g), Some(epsilon)) => Ok(Problem::SumEqual { g, epsilon }),
        _ => Err(Usage("give either --g0 and --g1, or --g and --eps".into())),
    }
}

fn cmd_sumdist(p: u64, g0: u64, g1: u64, inputs: &Inputs, format: Format) -> Outcome {
    let (xs, k) = party_inputs(inputs)?;
    let inst = SumDistInstance::new(PrimeModulus::new(p)?, k, g0, g1)?;
    let (decision, t) = run_sumdist(&inst, &xs)?;
    let record = RunRecord {
        problem: "sumdist",
        ring: format!("Z_{p}"),
        modulus: p,
        k,
        mode: t.header.mode.to_string(),
        targets: vec![g0, g1],
        epsilon: None,
        seed: None,
        messages: t.values().collect(),
        decision,
        expected: sumdist_expected(sum_mod(&xs, p), g0, g1),
        total_bits: t.total_bits(),
        exact_error: None,
        within_budget: None,
        transcript: t.encode(),
        inputs: xs,
    };
    Ok(emit_run(record, format))
}

fn cmd_sumequal(
    p: u64,
    g: u64,
    eps: Epsilon,
    seed: u64,
    exact: bool,
    inputs: &Inputs,
    format: Format,
) -> Outcome {
    let (xs, k) = party_inputs(inputs)?;
    let proto = SumEqualProtocol::new(SumEqualInstance::new(PrimeModulus::new(p)?, k, g, eps)?)?;
    if proto.instance().mode() == Mode::TrivialFallback {
        fallback_note(p, k, eps);
    }
    let (decision, t) = proto.run(&xs, PublicRandomness::new(seed))?;
    let on_target = proto.instance().sums_to_target(&xs);
    let (exact_error, within_budget) = match (exact, on_target) {
        (false, _) => (None, None),
        (true, true) => (
            Some(Fraction {
                count: 0,
                total: p - 1,
            }),
            Some(true),
        ),
        (true, false) => {
            let profile = proto.exact_error(&xs)?;
            (Some(profile.error()), Some(profile.within_budget()))
        }
    };
    let record = RunRecord {
        problem: "sumequal",
        ring: format!("Z_{p}"),
        modulus: p,
        k,
        mode: t.header.mode.to_string(),
        targets: vec![g],
        epsilon: Some(eps),
        seed: Some(seed),
        messages: t.values().collect(),
        decision,
        expected: Some(u8::from(on_target)),
        total_bits: t.total_bits(),
        exact_error,
        within_budget,
        transcript: t.encode(),
        inputs: xs,
    };
    Ok(emit_run(record, format))
}

fn cmd_over_z(n: u32, targets: &Targets, inputs: &Inputs, format: Format) -> Outcome {
    let (xs, k) = party_inputs(inputs)?;
    let problem = problem_of(targets)?;
    let inst = IntegerInstance { n, k, problem };
    let (decision, t) = run_over_z(&inst, &xs, targets.seed)?;
    let sum: u128 = xs.iter().map(|&x| x as u128).sum();
    let (target_list, epsilon, seed, expected) = match problem {
        Problem::SumDist { g0, g1 } => {
            (vec![g0, g1], None, None, sumdist_expected_wide(sum, g0, g1))
        }
        Problem::SumEqual { g, epsilon } => (
            vec![g],
            Some(epsilon),
            Some(targets.seed),
            Some(u8::from(sum == g as u128)),
        ),
    };
    let record = RunRecord {
        problem: t.header.protocol.as_str(),
        ring: "Z".into(),
        modulus: t.header.p,
        k,
        mode: t.header.mode.to_string(),
        targets: target_list,
        epsilon,
        seed,
        messages: t.values().collect(),
        decision,
        expected,
        total_bits: t.total_bits(),
        exact_error: None,
        within_budget: None,
        transcript: t.encode(),
        inputs: xs,
    };
    Ok(emit_run(record, format))
}

fn sumdist_expected_wide(sum: u128, g0: u64, g1: u64) -> Option<u8> {
    match u64::try_from(sum) {
        Ok(s) => sumdist_expected(s, g0, g1),
        Err(_) => None,
    }
}

fn cmd_over_zn(factors: Vec<u64>, targets: &Targets, inputs: &Inputs, format: Format) -> Outcome {
    let (xs, k) = party_inputs(inputs)?;
    let problem = problem_of(targets)?;
    let inst = SquareFreeInstance::new(factors, k, problem)?;
    let out = run_over_zn(&inst, &xs, targets.seed)?;
    let n = inst.system().product();
    let sum = sum_mod(&xs, n);
    let modes: Vec<String> = inst
        .factors()
        .iter()
        .zip(inst.system().moduli())
        .map(|(f, p)| {
            let mode = match f {
                FactorProtocol::SumDist(proto) => proto.instance().mode().as_str(),
                FactorProtocol::SumEqual(proto) => proto.instance().mode().as_str(),
                FactorProtocol::Skipped { .. } => "skipped",
            };
            format!("{p}:{mode}")
        })
        .collect();
    let (problem_name, target_list, epsilon, seed, expected) = match problem {
        Problem::SumDist { g0, g1 } => (
            "sumdist",
            vec![g0, g1],
            None,
            None,
            sumdist_expected(sum, g0, g1),
        ),
        Problem::SumEqual { g, epsilon } => (
            "sumequal",
            vec![g],
            Some(epsilon),
            Some(targets.seed),
            Some(u8::from(sum == g)),
        ),
    };
    let record = RunRecord {
        problem: problem_name,
        ring: format!("Z_{n}"),
        modulus: n,
        k,
        mode: modes.join(","),
        targets: target_list,
        epsilon,
        seed,
        messages: out
            .transcript
            .factors
            .iter()
            .flat_map(|t| t.values())
            .collect(),
        decision: out.decision,
        expected,
        total_bits: out.transcript.total_bits(),
        exact_error: None,
        within_budget: None,
        transcript: out.transcript.encode(),
        inputs: xs,
    };
    Ok(emit_run(record, format))
}
