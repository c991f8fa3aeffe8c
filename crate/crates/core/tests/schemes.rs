use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use ttdf_core::bits::BitString;
use ttdf_core::ddh::{self, DdhContext, DdhTtdf};
use ttdf_core::group::{group_gen, Level};
use ttdf_core::lwe::{self, LweParams, LweTtdf};
use ttdf_core::scheme;
use ttdf_core::shamir::subsets;
use ttdf_core::ttdf::{Mode, Ttdf};
use ttdf_core::ttdr::{self, DdhTtdr};
use ttdf_core::{rpke, tpke, Error};

fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Every `t`-subset of `1..=n` inverts every sample through the trait.
fn trait_round_trip<T: Ttdf>(scheme: &T, n: u64, t: usize, trials: usize, seed: u64) -> usize {
    let mut r = rng(seed);
    let (ek, mtd) = scheme.gen(&mut r).unwrap();
    let tds: Vec<_> = (1..=n).map(|id| T::share(&mtd, id).unwrap()).collect();
    let mut ok = 0;
    for _ in 0..trials {
        let (x, y) = T::sample(&ek, &mut r).unwrap();
        let shares: Vec<_> = tds
            .iter()
            .map(|td| T::invert_share(td, &y, &mut r).unwrap())
            .collect();
        for s in subsets(n, t) {
            let subset: Vec<_> = s.iter().map(|&id| shares[id as usize - 1].clone()).collect();
            if T::combine(&subset, &y).unwrap() == x {
                ok += 1;
            }
        }
    }
    ok
}

#[test]
fn ddh_adapter_matches_direct_pipeline() {
    let ctx = DdhContext::new(group_gen(Level::Toy), 12, 4, 3).unwrap();
    let adapter = DdhTtdf::new(ctx.clone()).unwrap();
    let mut r = rng(1);
    let (ek, mtd) = adapter.gen(&mut r).unwrap();
    for _ in 0..100 {
        let x = BitString::random(12, &mut r);
        let y = ek.eval(&x).unwrap();
        let direct: Vec<_> = [1, 2, 4]
            .iter()
            .map(|&i| mtd.share(i).unwrap().invert_share(&y).unwrap())
            .collect();
        let via: Vec<_> = [1, 2, 4]
            .iter()
            .map(|&i| DdhTtdf::invert_share(&DdhTtdf::share(&mtd, i).unwrap(), &y, &mut r).unwrap())
            .collect();
        assert_eq!(direct, via);
        assert_eq!(DdhTtdf::combine(&via, &y).unwrap(), ddh::combine(&direct, &y).unwrap());
        assert_eq!(ddh::combine(&direct, &y).unwrap(), x);
    }
}

#[test]
fn lwe_adapter_matches_direct_pipeline() {
    let params = LweParams::from_shape(64, 40, 17, 4, 3).unwrap();
    let adapter = LweTtdf::new(params.clone());
    // Same seed for both pipelines: identical keys, inputs and noise.
    let (mut r1, mut r2) = (rng(2), rng(2));
    let (ek, mtd) = adapter.gen(&mut r1).unwrap();
    let (ek2, mtd2) = lwe::samp(&params, Mode::Injective, &mut r2).unwrap();
    assert_eq!(ek, ek2);
    assert_eq!(mtd, mtd2);
    for _ in 0..100 {
        let (x, y) = LweTtdf::sample(&ek, &mut r1).unwrap();
        let x2 = BitString::random(params.h(), &mut r2);
        let y2 = ek2.eval(&x2).unwrap();
        assert_eq!((&x, &y), (&x2, &y2));
        let via: Vec<_> = [2, 3, 4]
            .iter()
            .map(|&i| LweTtdf::invert_share(&LweTtdf::share(&mtd, i).unwrap(), &y, &mut r1).unwrap())
            .collect();
        let direct: Vec<_> = [2, 3, 4]
            .iter()
            .map(|&i| mtd2.share(i).unwrap().invert_share(&y2, &mut r2).unwrap())
            .collect();
        assert_eq!(via, direct);
        assert_eq!(LweTtdf::combine(&via, &y).unwrap(), lwe::combine(&direct, &y2).unwrap());
        assert_eq!(LweTtdf::combine(&via, &y).unwrap(), x);
    }
}

#[test]
fn ddh_exhaustive_up_to_six_bits_and_five_servers() {
    let grp = group_gen(Level::Toy);
    for (l, n, t) in [(6, 5, 3), (5, 5, 5), (6, 4, 2)] {
        let ctx = DdhContext::new(grp.clone(), l, n, t).unwrap();
        let (ek, mtd) = ddh::samp(&ctx, Mode::Injective, &mut rng(3)).unwrap();
        let tds: Vec<_> = (1..=n).map(|id| mtd.share(id).unwrap()).collect();
        for v in 0..1u64 << l {
            let x = BitString::from_u64(v, l);
            let y = ek.eval(&x).unwrap();
            let shares: Vec<_> = tds.iter().map(|td| td.invert_share(&y).unwrap()).collect();
            for s in subsets(n, t) {
                let sub: Vec<_> = s.iter().map(|&i| shares[i as usize - 1].clone()).collect();
                assert_eq!(ddh::combine(&sub, &y).unwrap(), x);
            }
        }
    }
}

#[test]
fn ddh_lossy_images_depend_on_inner_product_only() {
    let grp = group_gen(Level::Toy);
    let ctx = DdhContext::new(grp.clone(), 6, 4, 3).unwrap();
    let mut r = rng(4);
    for _ in 0..50 {
        let (ek, _) = ddh::samp(&ctx, Mode::Lossy, &mut r).unwrap();
        let mut images = std::collections::HashMap::new();
        for v in 0..64u64 {
            let y = ek.eval(&BitString::from_u64(v, 6)).unwrap();
            images.entry(y.values()[0].clone()).or_insert_with(Vec::new).push(y);
        }
        // At most p = 11 distinct images, keyed by g^<x, r>.
        assert!(images.len() <= 11);
        for group in images.values() {
            assert!(group.windows(2).all(|w| w[0] == w[1]));
        }
    }
}

#[test]
fn relation_round_trip_and_metadata() {
    let scheme = DdhTtdr::new(group_gen(Level::Toy), 5, 3).unwrap();
    assert_eq!(trait_round_trip(&scheme, 5, 3, 30, 5), 30 * 10);
    let (ek, _) = scheme.gen(&mut rng(5)).unwrap();
    let meta = DdhTtdr::metadata(&ek);
    assert_eq!((meta.input_bits, meta.lossiness), (8, 3));
}

#[test]
fn relation_lossy_collisions() {
    let grp = group_gen(Level::Toy);
    let ctx = ttdr::context(grp.clone(), 4, 3).unwrap();
    let mut r = rng(6);
    let (ek, _) = ttdr::gen(&ctx, Mode::Lossy, &mut r).unwrap();
    let mut seen = std::collections::HashMap::new();
    for a in 0u64..11 {
        for b in 0u64..11 {
            let (_, y) = ttdr::relation(&ek, &grp.order().elem(a), &grp.order().elem(b)).unwrap();
            seen.entry(y.values().to_vec()).or_insert(0u32);
            *seen.get_mut(y.values()).unwrap() += 1;
        }
    }
    // 121 preimages collapse onto 11 images, 11 each.
    assert_eq!(seen.len(), 11);
    assert!(seen.values().all(|&c| c == 11));
}

#[test]
fn lwe_every_subset_recovers() {
    let scheme = LweTtdf::new(LweParams::from_shape(64, 40, 17, 4, 3).unwrap());
    assert_eq!(trait_round_trip(&scheme, 4, 3, 50, 7), 200);
}

#[test]
fn lwe_combined_error_stays_in_budget() {
    let params = LweParams::from_shape(64, 40, 17, 4, 3).unwrap();
    let mut r = rng(8);
    let (ek, mtd) = lwe::samp(&params, Mode::Injective, &mut r).unwrap();
    let tds: Vec<_> = [1, 2, 3].iter().map(|&i| mtd.share(i).unwrap()).collect();
    let budget = BigInt::from(params.q().value().clone()) / (4 * params.p());
    let mut within = 0;
    let trials = 300;
    for _ in 0..trials {
        let x = BitString::random(params.h(), &mut r);
        let y = ek.eval(&x).unwrap();
        let shares: Vec<_> = tds.iter().map(|td| td.invert_share(&y, &mut r).unwrap()).collect();
        let res = lwe::combine_residues(&shares, &y).unwrap();
        let worst = res
            .iter()
            .zip(lwe::block_values(&params, &x))
            .map(|(v, m)| lwe::symbol_distance(&params, v, m))
            .max()
            .unwrap();
        if worst < budget {
            within += 1;
        }
    }
    assert_eq!(within, trials);
}

#[test]
fn tpke_round_trip_every_backend() {
    let mut r = rng(9);
    let ddh = scheme::ddh(Level::Toy, 16, 4, 3).unwrap();
    assert_eq!(tpke_trials(&ddh, 10, &mut r), 40);
    let lwe = scheme::lwe(Level::Toy, 4, 3).unwrap();
    assert_eq!(tpke_trials(&lwe, 10, &mut r), 40);
    let rel = scheme::ttdr(Level::L128, 4, 3).unwrap();
    assert_eq!(tpke_trials(&rel, 3, &mut r), 12);
}

fn tpke_trials<T: Ttdf>(scheme: &T, trials: usize, r: &mut ChaCha20Rng) -> usize {
    let (pk, msk) = tpke::gen(scheme, r).unwrap();
    let sks: Vec<_> = (1..=4).map(|i| tpke::share::<T>(&msk, i).unwrap()).collect();
    let mut ok = 0;
    for _ in 0..trials {
        let m = BitString::random(pk.message_bits(), r);
        let c = tpke::enc(&pk, &m, r).unwrap();
        let shares: Vec<_> = sks.iter().map(|sk| tpke::dec(sk, &c, r).unwrap()).collect();
        for s in subsets(4, 3) {
            let sub: Vec<_> = s.iter().map(|&i| shares[i as usize - 1].clone()).collect();
            if tpke::combine::<T>(&sub, &c).unwrap() == m {
                ok += 1;
            }
        }
        assert!(matches!(
            tpke::combine::<T>(&shares[..2], &c),
            Err(Error::WrongCount { expected: 3, got: 2 })
        ));
    }
    ok
}

fn rpke_exhaustive<T: Ttdf>(scheme: &T, users: u64, seed: u64) {
    let mut r = rng(seed);
    let (pk, msk) = rpke::gen(scheme, &mut r).unwrap();
    assert!(rpke::user_ids(&pk).end() >= &users);
    let sks: Vec<_> = (1..=users).map(|i| rpke::reg(&pk, &msk, i).unwrap()).collect();
    for revoked_ids in subsets(users, 2) {
        let revoked: Vec<_> = revoked_ids.iter().map(|&i| sks[i as usize - 1].clone()).collect();
        let s = BitString::random(pk.message_bits(), &mut r);
        let c = rpke::enc(&pk, &revoked, &s, &mut r).unwrap();
        for sk in &sks {
            let id = T::trapdoor_id(sk);
            if revoked_ids.contains(&id) {
                assert_eq!(rpke::dec(sk, &c, &mut r).unwrap_err(), Error::RevokedKey(id));
                let forced = c.completed_shares(sk, &mut r).unwrap();
                assert_eq!(tpke::combine::<T>(&forced, &c.inner).unwrap_err(), Error::DuplicateNode(id));
            } else {
                assert_eq!(rpke::dec(sk, &c, &mut r).unwrap(), s);
            }
        }
    }
}

#[test]
fn rpke_exhaustive_ddh() {
    rpke_exhaustive(&scheme::ddh(Level::Toy, 16, 10, 3).unwrap(), 4, 10);
}

#[test]
fn rpke_exhaustive_lwe() {
    // Four users plus the two reserved identities.
    rpke_exhaustive(&scheme::lwe(Level::Toy, 6, 3).unwrap(), 4, 11);
}

/// Decryption oracle of the threshold security game: the share of an
/// honest server on a fresh encryption of a known message, simulated from
/// the corrupted servers' shares and the sampled preimage alone.
fn simulated_dec_oracle<T: Ttdf>(scheme: &T, trials: usize, seed: u64) {
    let mut r = rng(seed);
    let (pk, msk) = tpke::gen(scheme, &mut r).unwrap();
    let sks: Vec<_> = (1..=4).map(|i| tpke::share::<T>(&msk, i).unwrap()).collect();
    let corrupted = &sks[..2];
    for k in 0..trials {
        let m = BitString::random(pk.message_bits(), &mut r);
        let (x, c1) = T::sample(&pk.ek, &mut r).unwrap();
        let c = tpke::enc_with(&pk, &x, c1, &m).unwrap();
        let known: Vec<_> = corrupted.iter().map(|sk| tpke::dec(sk, &c, &mut r).unwrap()).collect();
        let target = 3 + (k % 2) as u64;
        let simulated = T::combine_inv(&pk.ek, &x, &c.c1, &known, target).unwrap();
        let real = tpke::dec(&sks[target as usize - 1], &c, &mut r).unwrap();
        assert_eq!(simulated, real);
        let mut all = known;
        all.push(simulated);
        assert_eq!(tpke::combine::<T>(&all, &c).unwrap(), m);
    }
}

#[test]
fn dec_oracle_is_simulatable_without_honest_keys() {
    simulated_dec_oracle(&scheme::ddh(Level::Toy, 16, 4, 3).unwrap(), 50, 12);
    simulated_dec_oracle(&scheme::ttdr(Level::L128, 4, 3).unwrap(), 4, 13);
}
