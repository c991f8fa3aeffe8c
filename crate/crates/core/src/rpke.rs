//! Revocation encryption over any [`Ttdf`]. The group controller publishes
//! the `t - 1` revoked users' decryption shares inside the ciphertext, so
//! every other user completes a threshold set with their own share while
//! a revoked user only duplicates a published node.
//!
//! The top `t - 1` identities are reserved as dummies and never issued;
//! they pad the revoked set when fewer than `t - 1` users are revoked.

use std::fmt;
use std::ops::RangeInclusive;

use rand::{CryptoRng, RngCore};

use crate::bits::BitString;
use crate::codec::{Decode, Encode, Reader, Writer};
use crate::error::{Error, Result};
use crate::tpke::{self, DecryptionShare, TpkeCiphertext, TpkePublicKey};
use crate::ttdf::Ttdf;

pub struct RpkeCiphertext<T: Ttdf> {
    pub inner: TpkeCiphertext<T>,
    pub published: Vec<DecryptionShare<T>>,
}

/// Identities held back as revocation padding.
pub fn reserved_ids<T: Ttdf>(pk: &TpkePublicKey<T>) -> RangeInclusive<u64> {
    let meta = pk.metadata();
    let r = (meta.t - 1) as u64;
    meta.id_max - r + 1..=meta.id_max
}

/// Identities that may be registered.
pub fn user_ids<T: Ttdf>(pk: &TpkePublicKey<T>) -> RangeInclusive<u64> {
    1..=*reserved_ids(pk).start() - 1
}

pub fn gen<T: Ttdf, R: RngCore + CryptoRng + ?Sized>(
    scheme: &T,
    rng: &mut R,
) -> Result<(TpkePublicKey<T>, T::MasterTrapdoor)> {
    let (pk, msk) = tpke::gen(scheme, rng)?;
    if user_ids(&pk).is_empty() {
        return Err(Error::InconsistentParams(
            "identity space holds only reserved ids".into(),
        ));
    }
    Ok((pk, msk))
}

/// Issues the secret key of a user.
pub fn reg<T: Ttdf>(pk: &TpkePublicKey<T>, msk: &T::MasterTrapdoor, id: u64) -> Result<T::SharedTrapdoor> {
    if reserved_ids(pk).contains(&id) {
        return Err(Error::ReservedIdentity(id));
    }
    tpke::share::<T>(msk, id)
}

/// Extends a revoked set to exactly `t - 1` keys with dummy identities.
pub fn pad_revoked<T: Ttdf>(
    pk: &TpkePublicKey<T>,
    msk: &T::MasterTrapdoor,
    revoked: &[T::SharedTrapdoor],
) -> Result<Vec<T::SharedTrapdoor>> {
    let need = pk.metadata().t - 1;
    if revoked.len() > need {
        return Err(Error::WrongCount {
            expected: need,
            got: revoked.len(),
        });
    }
    let mut out = revoked.to_vec();
    for id in reserved_ids(pk).take(need - revoked.len()) {
        out.push(T::share(msk, id)?);
    }
    Ok(out)
}

/// Encrypts `s` and publishes the shares of exactly `t - 1` revoked keys.
pub fn enc<T: Ttdf, R: RngCore + CryptoRng + ?Sized>(
    pk: &TpkePublicKey<T>,
    revoked: &[T::SharedTrapdoor],
    s: &BitString,
    rng: &mut R,
) -> Result<RpkeCiphertext<T>> {
    let need = pk.metadata().t - 1;
    if revoked.len() != need {
        return Err(Error::WrongCount {
            expected: need,
            got: revoked.len(),
        });
    }
    let mut seen = Vec::with_capacity(need);
    for sk in revoked {
        let id = T::trapdoor_id(sk);
        if seen.contains(&id) {
            return Err(Error::DuplicateNode(id));
        }
        seen.push(id);
    }
    let inner = tpke::enc(pk, s, rng)?;
    let published = revoked
        .iter()
        .map(|sk| tpke::dec(sk, &inner, rng))
        .collect::<Result<_>>()?;
    Ok(RpkeCiphertext { inner, published })
}

impl<T: Ttdf> RpkeCiphertext<T> {
    pub fn published_ids(&self) -> impl Iterator<Item = u64> + '_ {
        self.published.iter().map(T::share_id)
    }

    /// Own share appended to the published ones, without the revocation
    /// check.
    pub fn completed_shares<R: RngCore + CryptoRng + ?Sized>(
        &self,
        sk: &T::SharedTrapdoor,
        rng: &mut R,
    ) -> Result<Vec<DecryptionShare<T>>> {
        let mut shares = self.published.clone();
        shares.push(tpke::dec(sk, &self.inner, rng)?);
        Ok(shares)
    }
}

pub fn dec<T: Ttdf, R: RngCore + CryptoRng + ?Sized>(
    sk: &T::SharedTrapdoor,
    c: &RpkeCiphertext<T>,
    rng: &mut R,
) -> Result<BitString> {
    let id = T::trapdoor_id(sk);
    if c.published_ids().any(|p| p == id) {
        return Err(Error::RevokedKey(id));
    }
    tpke::combine(&c.completed_shares(sk, rng)?, &c.inner)
}

impl<T: Ttdf> Clone for RpkeCiphertext<T> {
    fn clone(&self) -> Self {
        Self {
            inner: self.inner.clone(),
            published: self.published.clone(),
        }
    }
}

impl<T: Ttdf> PartialEq for RpkeCiphertext<T> {
    fn eq(&self, other: &Self) -> bool {
        self.inner == other.inner && self.published == other.published
    }
}

impl<T: Ttdf> fmt::Debug for RpkeCiphertext<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RpkeCiphertext")
            .field("inner", &self.inner)
            .field("published", &self.published)
            .finish()
    }
}

impl<T: Ttdf> Encode for RpkeCiphertext<T> {
    fn encode(&self, w: &mut Writer) {
        self.inner.encode(w);
        w.len(self.published.len());
        for s in &self.published {
            w.u64(T::share_id(s));
            s.encode(w);
        }
    }
}

impl<T: Ttdf> Decode for RpkeCiphertext<T> {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        let inner = TpkeCiphertext::decode(r)?;
        let n = r.count(9)?;
        let mut published = Vec::with_capacity(n);
        for _ in 0..n {
            let id = r.u64()?;
            let s = T::Share::decode(r)?;
            if T::share_id(&s) != id {
                return Err(Error::Decode(format!("record id {id} disagrees with share")));
            }
            published.push(s);
        }
        Ok(Self { inner, published })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ddh::DdhTtdf;
    use crate::group::{group_gen, Level};
    use crate::hardcore::DEFAULT_EPSILON_LOG2;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn setup() -> (TpkePublicKey<DdhTtdf>, <DdhTtdf as Ttdf>::MasterTrapdoor, ChaCha20Rng) {
        let scheme =
            DdhTtdf::for_message(group_gen(Level::Toy), 8, DEFAULT_EPSILON_LOG2, 10, 3).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let (pk, msk) = gen(&scheme, &mut rng).unwrap();
        (pk, msk, rng)
    }

    #[test]
    fn reserved_ids_sit_at_the_top() {
        let (pk, msk, _) = setup();
        // Toy group order 11: ids 1..=10, the top two reserved.
        assert_eq!(reserved_ids(&pk), 9..=10);
        assert_eq!(user_ids(&pk), 1..=8);
        assert_eq!(reg(&pk, &msk, 9).unwrap_err(), Error::ReservedIdentity(9));
        for id in [1, 5, 8] {
            assert_eq!(reg(&pk, &msk, id).unwrap().values(), msk.share(id).unwrap().values());
        }
    }

    #[test]
    fn enc_publishes_direct_partial_inversions() {
        let (pk, msk, mut rng) = setup();
        let revoked: Vec<_> = [2, 5].iter().map(|&i| reg(&pk, &msk, i).unwrap()).collect();
        let s = BitString::zeros(8);
        let c = enc(&pk, &revoked, &s, &mut rng).unwrap();
        for (sk, sh) in revoked.iter().zip(&c.published) {
            assert_eq!(*sh, sk.invert_share(&c.inner.c1).unwrap());
        }
        assert_eq!(c.published_ids().collect::<Vec<_>>(), [2, 5]);
        assert_eq!(RpkeCiphertext::<DdhTtdf>::from_bytes(&c.to_bytes()).unwrap(), c);
        // s = 0: c2 is the bare pad hc(x).
        let shares: Vec<_> = [1, 3, 4]
            .iter()
            .map(|&i| msk.share(i).unwrap().invert_share(&c.inner.c1).unwrap())
            .collect();
        let x = crate::ddh::combine(&shares, &c.inner.c1).unwrap();
        assert_eq!(c.inner.c2, c.inner.hc.eval(&x).unwrap());
    }

    #[test]
    fn count_and_duplicate_rejections() {
        let (pk, msk, mut rng) = setup();
        let s = BitString::random(8, &mut rng);
        let three: Vec<_> = [1, 2, 3].iter().map(|&i| reg(&pk, &msk, i).unwrap()).collect();
        assert_eq!(
            enc(&pk, &three, &s, &mut rng).unwrap_err(),
            Error::WrongCount { expected: 2, got: 3 }
        );
        let dup = vec![three[0].clone(), three[0].clone()];
        assert_eq!(enc(&pk, &dup, &s, &mut rng).unwrap_err(), Error::DuplicateNode(1));
        assert!(pad_revoked(&pk, &msk, &three).is_err());
    }

    #[test]
    fn padding_and_revocation() {
        let (pk, msk, mut rng) = setup();
        let s = BitString::random(8, &mut rng);
        let one = vec![reg(&pk, &msk, 4).unwrap()];
        let padded = pad_revoked(&pk, &msk, &one).unwrap();
        assert_eq!(padded.iter().map(|k| k.id()).collect::<Vec<_>>(), [4, 9]);
        let c = enc(&pk, &padded, &s, &mut rng).unwrap();
        for id in user_ids(&pk) {
            let sk = reg(&pk, &msk, id).unwrap();
            if id == 4 {
                assert_eq!(dec(&sk, &c, &mut rng).unwrap_err(), Error::RevokedKey(4));
                let shares = c.completed_shares(&sk, &mut rng).unwrap();
                assert_eq!(
                    tpke::combine(&shares, &c.inner).unwrap_err(),
                    Error::DuplicateNode(4)
                );
            } else {
                assert_eq!(dec(&sk, &c, &mut rng).unwrap(), s);
            }
        }
        let none = pad_revoked(&pk, &msk, &[]).unwrap();
        let c = enc(&pk, &none, &s, &mut rng).unwrap();
        assert_eq!(dec(&reg(&pk, &msk, 4).unwrap(), &c, &mut rng).unwrap(), s);
    }
}
