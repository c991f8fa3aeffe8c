use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use ttdf_core::arith::{
    factorial, lagrange_at, lagrange_cleared, next_prime, poly_eval, random_below, Modulus,
};
use ttdf_core::bits::BitString;
use ttdf_core::codec::{Decode, Encode, Reader, Writer};
use ttdf_core::group::{group_gen, Level};
use ttdf_core::hardcore::HashDesc;
use ttdf_core::shamir::{combine, subsets, SharingState};

fn random_prime(rng: &mut ChaCha20Rng) -> Arc<Modulus> {
    let bits = rng.random_range(8..=64u32);
    let lo = BigUint::one() << (bits - 1);
    let start = lo.clone() + random_below(rng, &lo);
    let p = next_prime(&start);
    Modulus::new(p).unwrap()
}

fn distinct_ids(rng: &mut ChaCha20Rng, count: usize, max: u64) -> Vec<u64> {
    let mut ids = Vec::with_capacity(count);
    while ids.len() < count {
        let v = rng.random_range(0..max);
        if !ids.contains(&v) {
            ids.push(v);
        }
    }
    ids
}

#[test]
fn interpolation_reproduces_random_polynomials() {
    let mut rng = ChaCha20Rng::seed_from_u64(100);
    for _ in 0..1000 {
        let q = random_prime(&mut rng);
        let deg = rng.random_range(0..6usize);
        let coeffs: Vec<_> = (0..=deg).map(|_| q.random(&mut rng)).collect();
        let mut ids = distinct_ids(&mut rng, deg + 2, 200);
        let target = ids.pop().unwrap();
        let nodes = ids;
        let l = lagrange_at(&nodes, target, &q).unwrap();
        let mut acc = q.zero();
        for (c, &x) in l.iter().zip(&nodes) {
            acc = &acc + &(c * &poly_eval(&coeffs, &q.elem(x)).unwrap());
        }
        assert_eq!(acc, poly_eval(&coeffs, &q.elem(target)).unwrap());
    }
}

#[test]
fn cleared_coefficients_agree_with_field_coefficients() {
    let mut rng = ChaCha20Rng::seed_from_u64(101);
    for _ in 0..500 {
        let n = rng.random_range(2..=10u64);
        let t = rng.random_range(1..=n as usize);
        let mut pool: Vec<u64> = (0..=n).collect();
        let mut nodes = Vec::new();
        for _ in 0..t {
            nodes.push(pool.remove(rng.random_range(0..pool.len())));
        }
        let target = pool[rng.random_range(0..pool.len())];
        let sl = lagrange_cleared(&nodes, target, n).unwrap();
        let total: BigInt = sl.coeffs.iter().sum();
        assert_eq!(total, BigInt::from(sl.scale.clone()));

        let q = random_prime(&mut rng);
        if (&sl.scale % q.value()) == BigUint::ZERO || BigUint::from(n) >= *q.value() {
            continue;
        }
        assert_eq!(sl.reduce(&q).unwrap(), lagrange_at(&nodes, target, &q).unwrap());
    }
}

#[test]
fn cleared_bound_for_every_subset_up_to_eight() {
    for n in 1..=8u64 {
        let nf = factorial(n);
        let sq = BigInt::from(&nf * &nf);
        let cube = BigInt::from(nf.pow(3));
        for t in 1..=n as usize {
            for s in subsets(n, t) {
                let sl = lagrange_cleared(&s, 0, n).unwrap();
                for v in 0..s.len() {
                    let scaled = sl.rational(v) * &sq;
                    assert!(scaled.is_integer(), "n={n} {s:?}");
                    assert!(scaled.to_integer().abs() <= cube);
                }
            }
        }
    }
}

#[test]
fn every_subset_reconstructs_the_secret() {
    let mut rng = ChaCha20Rng::seed_from_u64(102);
    let q = Modulus::new(next_prime(&(BigUint::one() << 61))).unwrap();
    for n in 2..=6u64 {
        for t in 2..=n as usize {
            let secret = q.random(&mut rng);
            let st = SharingState::new(secret.clone(), n, t, &mut rng).unwrap();
            let shares: Vec<_> = (1..=n).map(|id| st.share(id).unwrap()).collect();
            for s in subsets(n, t) {
                let pts: Vec<_> = s.iter().map(|&id| shares[id as usize - 1].clone()).collect();
                assert_eq!(combine(&pts, t).unwrap(), secret);
            }
        }
    }
}

#[test]
fn extractor_is_exactly_pairwise_independent() {
    // l = 3, l' = 2: 2^6 matrices times 2^2 offsets.
    let mut counts = std::collections::HashMap::new();
    for code in 0u32..1 << 8 {
        let rows: Vec<BitString> = (0..2)
            .map(|i| BitString::from_u64(u64::from((code >> (3 * i)) & 7), 3))
            .collect();
        let offset = BitString::from_u64(u64::from(code >> 6), 2);
        let h = HashDesc::from_parts(3, &rows, offset).unwrap();
        let outs: Vec<u64> = (0..8)
            .map(|x| h.eval(&BitString::from_u64(x, 3)).unwrap().to_u64())
            .collect();
        for x in 0..8 {
            for y in 0..8 {
                if x != y {
                    *counts.entry((x, y, outs[x], outs[y])).or_insert(0u32) += 1;
                }
            }
        }
    }
    assert_eq!(counts.len(), 8 * 7 * 16);
    // 2^8 functions, probability 2^-4 each.
    assert!(counts.values().all(|&c| c == 16));
}

#[test]
fn decoded_elements_are_subgroup_members() {
    let grp = group_gen(Level::Toy);
    for v in 0u64..23 {
        let mut w = Writer::default();
        w.uint(&BigUint::from(v));
        let bytes = w.into_bytes();
        let got = grp.read_elem(&mut Reader::new(&bytes));
        let member = grp.contains(&BigUint::from(v));
        assert_eq!(got.is_ok(), member, "{v}");
        if let Ok(e) = got {
            assert!(grp.exp(&e, &grp.order().elem(11u8)).unwrap() == grp.identity());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hash_matrix_is_linear(seed in any::<u64>(), in_bits in 1usize..200, out_bits in 1usize..64) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        prop_assume!(out_bits <= in_bits);
        let h = HashDesc::sample(in_bits, out_bits, &mut rng).unwrap();
        let x = BitString::random(in_bits, &mut rng);
        let y = BitString::random(in_bits, &mut rng);
        prop_assert_eq!(h.linear(&(&x ^ &y)).unwrap(), &h.linear(&x).unwrap() ^ &h.linear(&y).unwrap());
        let d = HashDesc::from_bytes(&h.to_bytes()).unwrap();
        prop_assert_eq!(d, h);
    }

    #[test]
    fn shares_round_trip_through_combine(seed in any::<u64>(), n in 2u64..12, t_frac in 0.0f64..1.0) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let t = 2 + ((n - 2) as f64 * t_frac) as usize;
        let q = Modulus::from_u64(1_000_003).unwrap();
        let secret = q.random(&mut rng);
        let st = SharingState::new(secret.clone(), n, t, &mut rng).unwrap();
        let ids = {
            let mut all: Vec<u64> = (1..=n).collect();
            rand::seq::SliceRandom::shuffle(all.as_mut_slice(), &mut rng);
            all.truncate(t);
            all
        };
        let pts: Vec<_> = ids.iter().map(|&i| st.share(i).unwrap()).collect();
        prop_assert_eq!(combine(&pts, t).unwrap(), secret);
    }

    #[test]
    fn toy_group_laws(a in 0u64..11, b in 0u64..11, c in 0u64..11) {
        let grp = group_gen(Level::Toy);
        let e = |v: u64| grp.exp_g(&grp.order().elem(v)).unwrap();
        let (x, y, z) = (e(a), e(b), e(c));
        prop_assert_eq!(grp.mul(&grp.mul(&x, &y), &z), grp.mul(&x, &grp.mul(&y, &z)));
        prop_assert_eq!(grp.mul(&x, &grp.identity()), x.clone());
        prop_assert_eq!(grp.mul(&x, &grp.inv(&x)), grp.identity());
        prop_assert_eq!(grp.mul(&x, &y), e((a + b) % 11));
    }
}
