use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use proptest::prelude::*;
use rand::SeedableRng;

use freeaut::arith::is_prime;
use freeaut::classify::PrimeSetDescriptor;
use freeaut::filters::{graded_construct, omega_member};
use freeaut::gen;
use freeaut::io::{parse_aut, serialize_aut};
use freeaut::linalg::{snf, IntMatrix};

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec(-20i64..=20, rows * cols).prop_map(move |v| {
        IntMatrix::new(rows, cols, v.into_iter().map(BigInt::from).collect()).unwrap()
    })
}

fn prime_set(max: usize) -> impl Strategy<Value = BTreeSet<u64>> {
    prop::collection::btree_set(
        prop::sample::select(freeaut::arith::primes_up_to(40)),
        0..=max,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn smith_form_is_a_divisor_chain(m in (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| matrix(r, c))) {
        let s = snf(&m);
        prop_assert_eq!(&(&s.u * &m) * &s.v, s.d.clone());
        prop_assert!((&s.u * &s.u_inv).is_identity());
        prop_assert!((&s.v * &s.v_inv).is_identity());
        let k = m.rows().min(m.cols());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                if i != j {
                    prop_assert!(s.d.get(i, j).is_zero());
                }
            }
        }
        for i in 1..k {
            let (a, b) = (s.d.get(i - 1, i - 1), s.d.get(i, i));
            prop_assert!(a >= &BigInt::zero());
            let divides = if a.is_zero() { b.is_zero() } else { b.is_multiple_of(a) };
            prop_assert!(divides);
        }
    }

    #[test]
    fn unimodular_inverse(seed in any::<u64>(), d in 1usize..=5, steps in 0usize..=12) {
        let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let u = gen::random_unimodular(&mut r, d, steps);
        let inv = u.inverse_unimodular().unwrap();
        prop_assert!((&u * &inv).is_identity());
        prop_assert!((&inv * &u).is_identity());
    }

    #[test]
    fn omega_membership_splits_over_unions(seed in any::<u64>(), a in prime_set(3), b in prime_set(3)) {
        let phi = gen::corpus(seed, 1).pop().unwrap();
        let union: BTreeSet<u64> = a.union(&b).copied().collect();
        let whole = omega_member(&phi, &union).unwrap();
        prop_assert_eq!(whole, omega_member(&phi, &a).unwrap() && omega_member(&phi, &b).unwrap());
    }

    #[test]
    fn descriptor_normalization_keeps_membership(finite in prime_set(4), excluded in prime_set(4)) {
        let d = PrimeSetDescriptor::UnionWithPrefix { finite, excluded };
        let n = d.normalized();
        for p in 2..=60u64 {
            prop_assert_eq!(d.contains(p), n.contains(p));
            if !is_prime(p) {
                prop_assert!(!d.contains(p));
            }
        }
    }

    #[test]
    fn graded_round_trip(prefix in prime_set(3), excluded in prime_set(3)) {
        let excluded: BTreeSet<u64> = excluded.difference(&prefix).copied().collect();
        let prefix: Vec<u64> = prefix.into_iter().collect();
        let phi = graded_construct(&prefix, &excluded).unwrap();
        let text = serialize_aut(&phi);
        let back = parse_aut(&text).unwrap();
        prop_assert_eq!(&back, &phi);
        prop_assert_eq!(serialize_aut(&back), text);
        prop_assert_eq!(back.window_matrix(12).unwrap(), phi.window_matrix(12).unwrap());
    }
}
