//! Candidate generators from a prime seed followed by a doubling chain.
//!
//! Each candidate's modulus is the gcd of its circular lag sums (or that
//! gcd's largest prime factor in prime-only mode). Evaluation is pure, so
//! seeds fan out over rayon and are collected back in ascending order.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::BTreeSet;

use crate::arith::{self, big_mod, Modulus};
use crate::error::{NhtError, Result};
use crate::nht::{self, GeneratorSequence, ResidueSequence};

pub use crate::arith::factorize as factorize_small;

/// `[seed, 2, 4, …, 2^(n-1)]`.
pub fn doubling_chain(seed: u64, n: usize) -> Result<GeneratorSequence> {
    doubling_chain_from(seed, 2, n)
}

/// `[seed, start, 2·start, 4·start, …]`, `n` values in all.
pub fn doubling_chain_from(seed: u64, start: u64, n: usize) -> Result<GeneratorSequence> {
    if n < 2 {
        return Err(NhtError::InvalidGenerator(format!("length {n} is below 2")));
    }
    let start = BigUint::from(start);
    let values = std::iter::once(BigUint::from(seed))
        .chain((0..n - 1).map(|i| &start << i))
        .collect();
    GeneratorSequence::new(values)
}

/// One evaluated generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchCandidate {
    /// First value of the raw generator.
    pub seed: BigUint,
    pub n: usize,
    pub raw: GeneratorSequence,
    pub gcd: BigUint,
    /// Factorization of `gcd`, when it is nonzero and fits in 64 bits.
    pub gcd_factors: Option<Vec<(u64, u32)>>,
    pub modulus: Option<Modulus>,
    pub modulus_is_prime: bool,
    pub diagonal_residue: Option<u64>,
    pub normalizer: Option<u64>,
    pub reduced: Option<ResidueSequence>,
    pub valid: bool,
    pub diagnostics: Vec<String>,
}

pub fn evaluate_candidate(raw: &GeneratorSequence, prime_only: bool) -> SearchCandidate {
    let gram = nht::gram_lag_sums(raw);
    let gcd = nht::discover_modulus(&gram);
    let mut diagnostics = Vec::new();

    let gcd_factors = if gcd.is_zero() {
        diagnostics.push("all lag sums vanish; generator is orthogonal over the integers".into());
        None
    } else {
        match gcd.to_u64() {
            Some(g) => arith::factorize(g).ok(),
            None => {
                diagnostics.push(format!("gcd {gcd} exceeds the 64-bit modulus range"));
                None
            }
        }
    };

    let modulus = if gcd.is_zero() || gcd == BigUint::from(1u8) {
        if gcd == BigUint::from(1u8) {
            diagnostics.push("gcd of lag sums is 1; no modulus annihilates them".into());
        }
        None
    } else if prime_only {
        gcd_factors
            .as_ref()
            .and_then(|f| f.last())
            .and_then(|&(p, _)| Modulus::new(p).ok())
    } else {
        Modulus::from_big(&gcd).ok()
    };

    let mut candidate = SearchCandidate {
        seed: raw.values()[0].clone(),
        n: raw.len(),
        raw: raw.clone(),
        gcd_factors,
        modulus,
        modulus_is_prime: modulus.is_some_and(|q| arith::is_prime(q.get())),
        diagonal_residue: None,
        normalizer: None,
        reduced: None,
        valid: false,
        diagnostics,
        gcd,
    };
    let Some(q) = modulus else {
        return candidate;
    };

    let r = nht::diagonal_residue(raw, q);
    candidate.diagonal_residue = Some(r);
    candidate.reduced = Some(nht::reduce_mod(raw, q));
    candidate.normalizer = match nht::normalizer(r, q) {
        Ok(w) => {
            if w.is_none() {
                candidate
                    .diagnostics
                    .push(format!("diagonal residue {r} has no normalizer mod {q}"));
            }
            w
        }
        Err(e) => {
            candidate.diagnostics.push(format!("no normalizer: {e}"));
            None
        }
    };

    // Checked again from the lag sums rather than trusting the gcd.
    let offending: Vec<usize> = gram
        .lag_sums
        .iter()
        .enumerate()
        .filter(|(_, s)| big_mod(s, q) != 0)
        .map(|(i, _)| i + 1)
        .collect();
    if offending.is_empty() {
        candidate.valid = true;
    } else {
        candidate
            .diagnostics
            .push(format!("lag sums nonzero mod {q} at lags {offending:?}"));
    }
    candidate
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SearchOutcome {
    pub candidates: Vec<SearchCandidate>,
    /// Seeds that were rejected before evaluation.
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    pub n: usize,
    pub prime_only: bool,
    /// First chain value after the seed.
    pub chain_start: u64,
    pub valid_only: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            n: 16,
            prime_only: false,
            chain_start: 2,
            valid_only: false,
        }
    }
}

/// Evaluates the doubling chain of every prime seed, in ascending seed order.
pub fn search_seeds(seeds: &[u64], opts: SearchOptions) -> SearchOutcome {
    let mut outcome = SearchOutcome::default();
    if opts.n < 2 {
        outcome
            .diagnostics
            .push(format!("length {} is below 2", opts.n));
        return outcome;
    }
    let ordered: BTreeSet<u64> = seeds.iter().copied().collect();
    let mut primes = Vec::with_capacity(ordered.len());
    for seed in ordered {
        if arith::is_prime(seed) {
            primes.push(seed);
        } else {
            outcome
                .diagnostics
                .push(format!("seed {seed} is not prime"));
        }
    }
    outcome.candidates = primes
        .par_iter()
        .map(|&seed| {
            let raw = doubling_chain_from(seed, opts.chain_start, opts.n)
                .expect("a prime seed makes the chain nonzero");
            evaluate_candidate(&raw, opts.prime_only)
        })
        .filter(|c| c.valid || !opts.valid_only)
        .collect();
    outcome
}

/// `count` distinct primes drawn uniformly from `[lo, hi]`, sorted ascending.
///
/// Reproducible for a given `rng_seed`.
pub fn sample_prime_seeds(rng_seed: u64, count: usize, lo: u64, hi: u64) -> Vec<u64> {
    let pool: Vec<u64> = (lo..=hi).filter(|&p| arith::is_prime(p)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut picked = BTreeSet::new();
    while picked.len() < count.min(pool.len()) {
        picked.insert(pool[rng.random_range(0..pool.len())]);
    }
    picked.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn chains() {
        assert_eq!(
            doubling_chain(7, 6).unwrap(),
            GeneratorSequence::from_u64s(&[7, 2, 4, 8, 16, 32]).unwrap()
        );
        let c = doubling_chain(3, 16).unwrap();
        assert_eq!(c.values()[0], big(3));
        assert_eq!(c.values()[15], big(32768));
        assert_eq!(
            doubling_chain(5, 2).unwrap(),
            GeneratorSequence::from_u64s(&[5, 2]).unwrap()
        );
        assert!(doubling_chain(5, 1).is_err());
        assert_eq!(
            doubling_chain_from(11, 3, 4).unwrap(),
            GeneratorSequence::from_u64s(&[11, 3, 6, 12]).unwrap()
        );
    }

    #[test]
    fn twelve_point_candidate() {
        let c = evaluate_candidate(&doubling_chain(7, 6).unwrap(), false);
        assert_eq!(c.gcd, big(54));
        assert_eq!(c.gcd_factors, Some(vec![(2, 1), (3, 3)]));
        assert_eq!(c.modulus, Some(Modulus::new(54).unwrap()));
        assert!(!c.modulus_is_prime);
        assert_eq!(c.diagonal_residue, Some(1413 % 54));
        assert!(c.valid);

        let p = evaluate_candidate(&doubling_chain(7, 6).unwrap(), true);
        assert_eq!(p.modulus, Some(Modulus::new(3).unwrap()));
        assert!(p.modulus_is_prime);
        assert!(p.valid);
    }

    #[test]
    fn seed3_candidate() {
        let c = evaluate_candidate(&doubling_chain(3, 16).unwrap(), true);
        assert_eq!(c.modulus.unwrap().get(), 3121);
        assert_eq!(c.diagonal_residue, Some(16));
        // 16⁻¹ = 4⁻¹² and 4⁻¹ = 780 mod 3121; 780 < 3121 - 780
        assert_eq!(c.normalizer, Some(780));
        assert!(c.valid && c.modulus_is_prime);
    }

    #[test]
    fn gcd_one_and_zero_are_invalid() {
        // S(1) = S(3) = 1, S(2) = 0
        let c = evaluate_candidate(&GeneratorSequence::from_u64s(&[1, 1, 0, 0]).unwrap(), false);
        assert_eq!(c.gcd, big(1));
        assert!(!c.valid);
        assert!(c.modulus.is_none());
        assert!(!c.diagnostics.is_empty());

        let z = evaluate_candidate(&GeneratorSequence::from_u64s(&[1, 0, 0, 0]).unwrap(), true);
        assert_eq!(z.gcd, big(0));
        assert!(!z.valid);
    }

    #[test]
    fn seed_handling() {
        let out = search_seeds(&[], SearchOptions::default());
        assert!(out.candidates.is_empty() && out.diagnostics.is_empty());

        let out = search_seeds(&[4], SearchOptions::default());
        assert!(out.candidates.is_empty());
        assert_eq!(out.diagnostics, vec!["seed 4 is not prime".to_string()]);

        let out = search_seeds(
            &[13, 4, 2, 11, 3],
            SearchOptions {
                prime_only: true,
                ..Default::default()
            },
        );
        let seeds: Vec<BigUint> = out.candidates.iter().map(|c| c.seed.clone()).collect();
        assert_eq!(seeds, [2, 3, 11, 13].map(big).to_vec());
    }

    #[test]
    fn sampling_is_reproducible() {
        let a = sample_prime_seeds(42, 5, 2, 200);
        assert_eq!(a, sample_prime_seeds(42, 5, 2, 200));
        assert_eq!(a.len(), 5);
        assert!(a.windows(2).all(|w| w[0] < w[1]));
        assert!(a.iter().all(|&p| arith::is_prime(p) && p <= 200));
        assert_eq!(sample_prime_seeds(1, 10, 8, 10), Vec::<u64>::new());
    }
}
