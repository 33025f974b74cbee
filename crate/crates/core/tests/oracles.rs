//! Frozen example values, each recomputed here by an independent brute-force
//! route before being compared with the library.

use coordsum_core::harness::exhaustive_verify_sumdist;
use coordsum_core::harness::VerifyConfig;
use coordsum_core::*;

fn p(n: u64) -> PrimeModulus {
    PrimeModulus::new(n).unwrap()
}

fn is_prime_slow(n: u64) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// Smallest integer `d` with `d * den >= num`, by scanning.
fn ceil_by_scan(num: u128, den: u128) -> u128 {
    (0..).find(|d| d * den >= num).unwrap()
}

fn brute_sum(sets: &[Vec<u64>], m: u64) -> Vec<u64> {
    let mut acc = vec![0u64];
    for s in sets {
        let mut next: Vec<u64> = acc
            .iter()
            .flat_map(|a| s.iter().map(move |b| (a + b) % m))
            .collect();
        next.sort_unstable();
        next.dedup();
        acc = next;
    }
    acc
}

#[test]
fn next_prime_above_32() {
    let oracle = (33..).find(|&n| is_prime_slow(n)).unwrap();
    assert_eq!(oracle, 37);
    assert_eq!(next_prime_above(32).unwrap().get(), 37);
}

#[test]
fn crt_three_factors() {
    let oracle = (0..105)
        .find(|x| x % 3 == 1 && x % 5 == 4 && x % 7 == 2)
        .unwrap();
    assert_eq!(oracle, 79);
    let system = CrtSystem::new(vec![3, 5, 7]).unwrap();
    let rs = [
        Residue::new(1, 3).unwrap(),
        Residue::new(4, 5).unwrap(),
        Residue::new(2, 7).unwrap(),
    ];
    assert_eq!(crt_combine(&rs, &system).unwrap().value(), 79);
}

#[test]
fn sumset_of_a4_and_a1_mod_19_diff_5() {
    let sum = brute_sum(&[vec![4, 9, 14], vec![1, 6, 11, 16]], 19);
    assert_eq!(sum, vec![1, 5, 6, 10, 11, 15]);
    let walk: Vec<u64> = (0..6).map(|i| (5 + 5 * i) % 19).collect();
    let mut sorted = walk.clone();
    sorted.sort_unstable();
    assert_eq!(sorted, sum);

    let f = DapFamily::new(p(19), 5).unwrap();
    let s = sumset_interval(&[f.dap(4).unwrap(), f.dap(1).unwrap()]).unwrap();
    assert_eq!((s.start(), s.len()), (5, 6));
    assert!(s.contains(10) && !s.contains(3));
}

#[test]
fn dist_3_10_mod_19_diff_5() {
    // count +5 steps each way
    let steps = |from: u64, to: u64| (0..19).find(|i| (from + 5 * i) % 19 == to).unwrap();
    let oracle = steps(3, 10).min(steps(10, 3));
    assert_eq!(oracle, 9);
    let q = p(19);
    assert_eq!(dist(q.residue(3), q.residue(10), 5, q).unwrap(), 9);
}

#[test]
fn three_fold_sumset_in_z7() {
    let sum = brute_sum(&[vec![1, 2], vec![1, 2], vec![1, 2]], 7);
    assert_eq!(sum, vec![3, 4, 5, 6]);
    let s = |xs: &[u64]| DenseSet::from_elements(7, xs.iter().copied()).unwrap();
    let lib = brute_sumset(&[s(&[1, 2]), s(&[1, 2]), s(&[1, 2])]).unwrap();
    assert_eq!(lib.iter().collect::<Vec<_>>(), sum);
}

#[test]
fn derive_d_values() {
    assert_eq!(ceil_by_scan(2 * 2 * 19, 16), 5);
    assert_eq!(ceil_by_scan(2 * 4 * 19, 16), 10);
    assert_eq!(derive_d(p(19), 2).unwrap(), 5);
    assert_eq!(derive_d(p(19), 4).unwrap(), 10);
    // eps = 1/2: 2kp / (eps (p - 3)) = 2*2*19*2 / 16
    assert_eq!(ceil_by_scan(2 * 2 * 19 * 2, 16), 10);
    // eps = 1/10: 2*3*101*10 / 98
    assert_eq!(ceil_by_scan(2 * 3 * 101 * 10, 98), 62);
    assert_eq!(derive_d_eq(p(19), 2, "1/2".parse().unwrap()).unwrap(), 10);
    assert_eq!(derive_d_eq(p(101), 3, "1/10".parse().unwrap()).unwrap(), 62);
}

#[test]
fn derive_c_values() {
    // the c that puts c*g0 and c*g1 at distance 9 = (19-1)/2, found by scanning
    let find = |d: u64, g0: u64, g1: u64| {
        let q = p(19);
        (1..19)
            .find(|&c| {
                let a = q.residue(c * g0 % 19);
                let b = q.residue(c * g1 % 19);
                // forward steps from a to b must be exactly 9
                (a.value() + 9 * d) % 19 == b.value()
            })
            .unwrap()
    };
    assert_eq!(find(7, 2, 5), 2);
    assert_eq!(find(5, 3, 10), 1);
    let q = p(19);
    assert_eq!(
        derive_c(q, 7, q.residue(2), q.residue(5)).unwrap().value(),
        2
    );
    assert_eq!(
        derive_c(q, 5, q.residue(3), q.residue(10)).unwrap().value(),
        1
    );
}

#[test]
fn coordinator_worked_instance() {
    // p = 19, k = 2, g0 = 3, g1 = 10, inputs (4, 6): sum 10
    let sum = brute_sum(&[vec![4, 9, 14], vec![1, 6, 11, 16]], 19);
    assert!(sum.contains(&10) && !sum.contains(&3));
    let inst = SumDistInstance::new(p(19), 2, 3, 10).unwrap();
    let (bit, t) = run_sumdist(&inst, &[4, 6]).unwrap();
    assert_eq!(bit, 1);
    assert_eq!(t.total_bits(), 2 * 3);
    assert_eq!(run_sumdist(&inst, &[1, 2]).unwrap().0, 0);
}

#[test]
fn sumequal_p19_error_by_enumeration() {
    let inst = SumEqualInstance::new(p(19), 2, 3, "1/2".parse().unwrap()).unwrap();
    // enumerate c directly: bases, sumset by brute force, membership of c*g
    let d = 10;
    let accepted = (1..19u64)
        .filter(|&c| {
            let sets: Vec<Vec<u64>> = [4u64, 6]
                .iter()
                .map(|&x| {
                    let b = c * x % 19 % d;
                    (0..).map(|i| b + i * d).take_while(|&v| v < 19).collect()
                })
                .collect();
            brute_sum(&sets, 19).contains(&(c * 3 % 19))
        })
        .count() as u64;
    assert!(accepted * 2 <= 18);
    assert_eq!(exact_error(&inst, &[4, 6]).unwrap().failing, accepted);
}

#[test]
fn sumequal_p31_error_by_enumeration() {
    let eps: Epsilon = "1/3".parse().unwrap();
    let inst = SumEqualInstance::new(p(31), 2, 0, eps).unwrap();
    assert_eq!(inst.mode(), Mode::DapProtocol);
    for inputs in [[1u64, 2], [7, 9], [30, 30], [15, 0]] {
        let profile = exact_error(&inst, &inputs).unwrap();
        assert!(profile.within_budget(), "{inputs:?}: {}", profile.error());
    }
}

#[test]
fn exhaustive_small_verifies() {
    let r = exhaustive_verify_sumdist(p(7), 2, &VerifyConfig::default()).unwrap();
    assert_eq!(r.target_pairs, 42);
    assert_eq!(r.errors, 0);
}

#[test]
fn integer_lift_primes() {
    assert_eq!((2 * 16 + 1..).find(|&n| is_prime_slow(n)).unwrap(), 37);
    assert_eq!((2 * 2 + 1..).find(|&n| is_prime_slow(n)).unwrap(), 5);
    let inst = IntegerInstance {
        n: 4,
        k: 2,
        problem: Problem::SumDist { g0: 10, g1: 20 },
    };
    assert_eq!(lift_to_prime(&inst).unwrap().p().get(), 37);
    assert_eq!(run_over_z(&inst, &[4, 6], 0).unwrap().0, 0);
}

#[test]
fn zn_residue_checks() {
    // 7 + 11 = 18 agrees with 3 modulo both 3 and 5
    let residues = |x: u64| (x % 3, x % 5);
    assert_eq!(residues(7 + 11), residues(3));
    let inst = SquareFreeInstance::new(
        vec![3, 5],
        2,
        Problem::SumEqual {
            g: 3,
            epsilon: "1/2".parse().unwrap(),
        },
    )
    .unwrap();
    assert_eq!(run_over_zn(&inst, &[7, 11], 4).unwrap().decision, 1);
    assert_eq!(run_over_zn(&inst, &[1, 1], 4).unwrap().decision, 0);
}
