use std::fs;
use std::path::Path;

use coordsum_core::is_prime;

/// Parses `a..b` (inclusive), `a..=b`, or a comma-separated list.
pub fn parse_span(s: &str) -> Result<Vec<u64>, String> {
    let s = s.trim();
    if let Some((lo, hi)) = s.split_once("..") {
        let hi = hi.strip_prefix('=').unwrap_or(hi);
        let lo: u64 = lo
            .trim()
            .parse()
            .map_err(|_| format!("bad range start in {s:?}"))?;
        let hi: u64 = hi
            .trim()
            .parse()
            .map_err(|_| format!("bad range end in {s:?}"))?;
        if lo > hi {
            return Err(format!("empty range {s:?}"));
        }
        return Ok((lo..=hi).collect());
    }
    parse_list(s)
}

pub fn parse_list(s: &str) -> Result<Vec<u64>, String> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse()
                .map_err(|_| format!("not a non-negative integer: {t:?}"))
        })
        .collect()
}

/// Primes to tabulate: a range keeps its odd primes, a list is taken as given.
pub fn parse_primes(s: &str) -> Result<Vec<u64>, String> {
    let values = parse_span(s)?;
    if !s.contains("..") {
        return Ok(values);
    }
    let primes: Vec<u64> = values
        .into_iter()
        .filter(|&n| n >= 3 && is_prime(n).unwrap_or(false))
        .collect();
    if primes.is_empty() {
        return Err(format!("no odd primes in {s:?}"));
    }
    Ok(primes)
}

pub fn read_inputs(inline: Option<&[u64]>, file: Option<&Path>) -> Result<Vec<u64>, String> {
    match (inline, file) {
        (Some(v), _) => Ok(v.to_vec()),
        (None, Some(path)) => {
            let text = fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            parse_list(&text)
        }
        (None, None) => Err("no inputs given".into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spans() {
        assert_eq!(parse_span("2..5").unwrap(), vec![2, 3, 4, 5]);
        assert_eq!(parse_span("2..=3").unwrap(), vec![2, 3]);
        assert_eq!(parse_span("4, 6").unwrap(), vec![4, 6]);
        assert!(parse_span("5..2").is_err());
        assert!(parse_span("1.5").is_err());
    }

    #[test]
    fn prime_ranges_drop_composites_and_two() {
        assert_eq!(
            parse_primes("1..20").unwrap(),
            vec![3, 5, 7, 11, 13, 17, 19]
        );
        assert_eq!(parse_primes("1000003").unwrap(), vec![1_000_003]);
        assert!(parse_primes("24..28").is_err());
    }
}
