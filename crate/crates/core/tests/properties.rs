use num_bigint::BigUint;
use num_traits::Zero;
use proptest::prelude::*;

use nht::arith::{self, Modulus};
use nht::correlation::{self, Convention};
use nht::io::fixtures::TABLE1;
use nht::io::SequenceFile;
use nht::nht::{self as core, GeneratorSequence, ResidueSequence};
use nht::search::{self, SearchOptions};

fn generator() -> impl Strategy<Value = GeneratorSequence> {
    prop::collection::vec(0u64..1 << 16, 2..=16)
        .prop_filter("nonzero", |v| v.iter().any(|&x| x != 0))
        .prop_map(|v| GeneratorSequence::from_u64s(&v).unwrap())
}

fn primes() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5, 7, 47, 331, 1987, 3121, 7283, 21851, 65521])
}

proptest! {
    #[test]
    fn lag_sums_are_symmetric(g in generator()) {
        let gram = core::gram_lag_sums(&g);
        let n = g.len();
        for k in 1..n {
            prop_assert_eq!(gram.lag_sum(k), gram.lag_sum(n - k));
        }
    }

    #[test]
    fn gram_matrix_is_lag_sums(g in generator()) {
        let full = core::matrix_gram(&g);
        let gram = core::gram_lag_sums(&g);
        let dim = 2 * g.len();
        for (i, row) in full.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                let shift = (j + dim - i) % dim;
                if shift % 2 == 1 {
                    prop_assert!(x.is_zero());
                } else {
                    prop_assert_eq!(x, gram.lag_sum(shift / 2));
                }
            }
        }
    }

    #[test]
    fn discovered_modulus_divides_every_lag_sum(g in generator()) {
        let gram = core::gram_lag_sums(&g);
        let d = core::discover_modulus(&gram);
        if d.is_zero() {
            prop_assert!(gram.lag_sums.iter().all(Zero::is_zero));
        } else {
            for s in &gram.lag_sums {
                prop_assert!((s % &d).is_zero());
            }
        }
    }

    #[test]
    fn scaling_is_quadratic(g in generator(), c in 1u64..1000) {
        let c = BigUint::from(c);
        let base = core::gram_lag_sums(&g);
        let scaled = core::gram_lag_sums(&g.scaled(&c).unwrap());
        let c2 = &c * &c;
        prop_assert_eq!(scaled.diagonal, &base.diagonal * &c2);
        for (s, b) in scaled.lag_sums.iter().zip(&base.lag_sums) {
            prop_assert_eq!(s, &(b * &c2));
        }
    }

    #[test]
    fn sqrt_roots_square_back(a in 0u64..1 << 20, p in primes()) {
        let q = Modulus::new(p).unwrap();
        if let Some((lo, hi)) = arith::sqrt_mod_prime(a, q).unwrap() {
            prop_assert!(lo <= hi);
            prop_assert_eq!(q.mul(lo, lo), a % p);
            prop_assert_eq!(q.mul(hi, hi), a % p);
        } else {
            prop_assert_eq!(q.pow(a % p, (p - 1) / 2), p - 1);
        }
    }

    #[test]
    fn inverse_round_trips(a in 1u64..u64::MAX, p in primes()) {
        let q = Modulus::new(p).unwrap();
        match arith::mod_inverse(a, q) {
            Ok(x) => prop_assert_eq!(q.mul(a % p, x), 1),
            Err(_) => prop_assert_eq!(a % p, 0),
        }
    }

    #[test]
    fn factorization_multiplies_back(x in 1u64..) {
        let f = arith::factorize(x).unwrap();
        let mut product = 1u128;
        for &(p, e) in &f {
            prop_assert!(arith::is_prime(p));
            product *= (p as u128).pow(e);
        }
        prop_assert_eq!(product, x as u128);
    }

    #[test]
    fn round_trip_on_fixtures(row in 0usize..6, seed in any::<u64>()) {
        let s = TABLE1[row].residues();
        let q = s.modulus().get();
        let block: Vec<u64> = (0..32u64)
            .map(|i| seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i * 7919) % q)
            .collect();
        let r = core::diagonal_residue(&s.to_generator().unwrap(), s.modulus());
        let g = core::forward_transform(&s, &block).unwrap();
        prop_assert_eq!(core::inverse_transform(&s, &g, r).unwrap(), block);
    }

    #[test]
    fn expectation_stays_in_unit_interval(
        a in prop::collection::vec(any::<u64>(), 8),
        b in prop::collection::vec(any::<u64>(), 8),
        p in primes(),
        scaled in any::<bool>(),
    ) {
        let q = Modulus::new(p).unwrap();
        let conv = if scaled && p != 2 { Convention::Scaled } else { Convention::Raw };
        let series = correlation::circular_crosscorr(&a, &b, q, conv).unwrap();
        let e = correlation::expectation_measure(&series);
        prop_assert!(*e.numer() < *e.denom());
        for k in 0..series.len() {
            let n = series.normalized(k);
            prop_assert!((0.0..1.0).contains(&n));
        }
        if conv == Convention::Raw {
            for (s, r) in series.raw_sums.iter().zip(&series.residues) {
                prop_assert_eq!(arith::big_mod(s, q), *r);
            }
        }
    }

    #[test]
    fn swapping_operands_keeps_expectation(
        a in prop::collection::vec(0u64..1 << 20, 2..12),
        p in primes(),
        shift in 0usize..12,
    ) {
        let mut b = a.clone();
        b.reverse();
        let len = b.len();
        b.rotate_left(shift % len);
        let q = Modulus::new(p).unwrap();
        let ab = correlation::circular_crosscorr(&a, &b, q, Convention::Raw).unwrap();
        let ba = correlation::circular_crosscorr(&b, &a, q, Convention::Raw).unwrap();
        prop_assert_eq!(correlation::expectation_measure(&ab), correlation::expectation_measure(&ba));
    }

    #[test]
    fn sequence_file_round_trip(
        name in "[a-zA-Z0-9 _\"\\\\-]{0,20}",
        values in prop::collection::vec(0u64..1 << 40, 2..20),
        modulus in prop::option::of(1u64 << 40..1 << 50),
    ) {
        let f = SequenceFile { name, n: values.len(), values, modulus };
        let text = f.emit();
        let back = SequenceFile::parse(&text).unwrap();
        prop_assert_eq!(&back, &f);
        prop_assert_eq!(back.emit(), text);
    }
}

#[test]
fn normalizer_restores_unit_diagonal() {
    // Every fixture row has zero lag sums mod q; scaling by w must keep
    // them zero and bring the diagonal to 1.
    for f in &TABLE1 {
        let s = f.residues();
        let q = s.modulus();
        let r = core::diagonal_residue(&s.to_generator().unwrap(), q);
        let w = core::normalizer(r, q)
            .unwrap()
            .expect("every fixture has a normalizer");
        let scaled = s.scaled(w);
        let report = core::orthogonality_report(&scaled.to_generator().unwrap(), q);
        assert_eq!(report.diagonal_residue, 1, "{}", f.name);
        assert!(report.is_orthogonal(), "{}", f.name);
        assert!(report.is_exact_identity);
    }
}

#[test]
fn search_is_deterministic_and_valid() {
    let seeds: Vec<u64> = (2..400).collect();
    for prime_only in [false, true] {
        let opts = SearchOptions {
            n: 12,
            prime_only,
            ..Default::default()
        };
        let a = search::search_seeds(&seeds, opts);
        let mut shuffled = seeds.clone();
        shuffled.reverse();
        let b = search::search_seeds(&shuffled, opts);
        assert_eq!(a, b);
        for c in &a.candidates {
            let q = c.modulus.unwrap();
            assert!(c.valid);
            for s in &core::gram_lag_sums(&c.raw).lag_sums {
                assert_eq!(arith::big_mod(s, q), 0);
            }
            assert!((&c.gcd % q.get()).is_zero());
            assert!(c
                .reduced
                .as_ref()
                .unwrap()
                .values()
                .iter()
                .all(|&v| v < q.get()));
            if prime_only {
                assert!(c.modulus_is_prime && arith::is_prime(q.get()));
            }
        }
    }
}

#[test]
fn large_chains_stay_exact() {
    // 2^199 overflows every fixed-width integer type; the gcd still divides exactly.
    let c = search::evaluate_candidate(&search::doubling_chain(3, 200).unwrap(), false);
    let gram = core::gram_lag_sums(&c.raw);
    for s in &gram.lag_sums {
        assert!((s % &c.gcd).is_zero());
    }
    assert!(c.modulus.is_none());
    assert!(c.diagnostics.iter().any(|d| d.contains("64-bit")));
}

#[test]
fn residue_sequence_rejects_out_of_range() {
    let q = Modulus::new(47).unwrap();
    assert!(ResidueSequence::new(vec![46, 47], q).is_err());
}
