//! Threshold public-key encryption over any [`Ttdf`]: encrypt by sampling
//! a preimage `x`, send its image and `hc(x) ⊕ m`; any `t` servers invert
//! jointly.

use std::fmt;

use rand::{CryptoRng, RngCore};

use crate::bits::BitString;
use crate::codec::{Decode, Encode, Reader, Writer};
use crate::error::{Error, Result};
use crate::hardcore::{extractor_width, HashDesc, DEFAULT_EPSILON_LOG2};
use crate::ttdf::{Metadata, Ttdf};

/// Function index plus the extractor fixed at key generation.
pub struct TpkePublicKey<T: Ttdf> {
    pub ek: T::Index,
    pub hc: HashDesc,
}

/// `(c1, c2)`; the extractor travels with the ciphertext so combiners do
/// not need the public key.
pub struct TpkeCiphertext<T: Ttdf> {
    pub c1: T::Image,
    pub hc: HashDesc,
    pub c2: BitString,
}

pub type DecryptionShare<T> = <T as Ttdf>::Share;

impl<T: Ttdf> TpkePublicKey<T> {
    pub fn metadata(&self) -> Metadata {
        T::metadata(&self.ek)
    }

    pub fn message_bits(&self) -> usize {
        self.hc.out_bits()
    }
}

/// Samples `(pk, msk)`. Fails unless the function's lossiness leaves at
/// least one extractable bit at distance `2^-80`.
pub fn gen<T: Ttdf, R: RngCore + CryptoRng + ?Sized>(
    scheme: &T,
    rng: &mut R,
) -> Result<(TpkePublicKey<T>, T::MasterTrapdoor)> {
    let (ek, msk) = scheme.gen(rng)?;
    let meta = T::metadata(&ek);
    let width = extractor_width(meta.lossiness, DEFAULT_EPSILON_LOG2)?;
    if width == 0 {
        return Err(Error::InsufficientEntropy {
            k: meta.lossiness,
            epsilon_log2: DEFAULT_EPSILON_LOG2,
        });
    }
    let hc = HashDesc::sample(meta.encoded_bits, width, rng)?;
    Ok((TpkePublicKey { ek, hc }, msk))
}

pub fn share<T: Ttdf>(msk: &T::MasterTrapdoor, id: u64) -> Result<T::SharedTrapdoor> {
    T::share(msk, id)
}

pub fn enc<T: Ttdf, R: RngCore + CryptoRng + ?Sized>(
    pk: &TpkePublicKey<T>,
    m: &BitString,
    rng: &mut R,
) -> Result<TpkeCiphertext<T>> {
    m.check_len(pk.message_bits())?;
    let (x, c1) = T::sample(&pk.ek, rng)?;
    enc_with(pk, &x, c1, m)
}

/// Encryption with an explicit preimage and its image.
pub fn enc_with<T: Ttdf>(
    pk: &TpkePublicKey<T>,
    x: &T::Preimage,
    c1: T::Image,
    m: &BitString,
) -> Result<TpkeCiphertext<T>> {
    m.check_len(pk.message_bits())?;
    let pad = pk.hc.eval(&T::preimage_bits(&c1, x))?;
    Ok(TpkeCiphertext {
        c1,
        hc: pk.hc.clone(),
        c2: pad.try_xor(m)?,
    })
}

pub fn dec<T: Ttdf, R: RngCore + CryptoRng + ?Sized>(
    sk: &T::SharedTrapdoor,
    c: &TpkeCiphertext<T>,
    rng: &mut R,
) -> Result<DecryptionShare<T>> {
    T::invert_share(sk, &c.c1, rng)
}

pub fn combine<T: Ttdf>(shares: &[DecryptionShare<T>], c: &TpkeCiphertext<T>) -> Result<BitString> {
    let x = T::combine(shares, &c.c1)?;
    c.hc.eval(&T::preimage_bits(&c.c1, &x))?.try_xor(&c.c2)
}

impl<T: Ttdf> Clone for TpkePublicKey<T> {
    fn clone(&self) -> Self {
        Self {
            ek: self.ek.clone(),
            hc: self.hc.clone(),
        }
    }
}

impl<T: Ttdf> fmt::Debug for TpkePublicKey<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TpkePublicKey")
            .field("scheme", &T::NAME)
            .field("message_bits", &self.message_bits())
            .finish_non_exhaustive()
    }
}

impl<T: Ttdf> Clone for TpkeCiphertext<T> {
    fn clone(&self) -> Self {
        Self {
            c1: self.c1.clone(),
            hc: self.hc.clone(),
            c2: self.c2.clone(),
        }
    }
}

impl<T: Ttdf> PartialEq for TpkeCiphertext<T> {
    fn eq(&self, other: &Self) -> bool {
        self.c1 == other.c1 && self.hc == other.hc && self.c2 == other.c2
    }
}

impl<T: Ttdf> fmt::Debug for TpkeCiphertext<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TpkeCiphertext")
            .field("c1", &self.c1)
            .field("c2", &self.c2)
            .finish_non_exhaustive()
    }
}

impl<T: Ttdf> Encode for TpkePublicKey<T> {
    fn encode(&self, w: &mut Writer) {
        w.u8(T::TAG);
        self.ek.encode(w);
        self.hc.encode(w);
    }
}

impl<T: Ttdf> Decode for TpkePublicKey<T> {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        r.tag(T::TAG)?;
        let ek = T::Index::decode(r)?;
        let hc = HashDesc::decode(r)?;
        if hc.in_bits() != T::metadata(&ek).encoded_bits {
            return Err(Error::Decode("extractor width does not match index".into()));
        }
        Ok(Self { ek, hc })
    }
}

impl<T: Ttdf> Encode for TpkeCiphertext<T> {
    fn encode(&self, w: &mut Writer) {
        w.u8(T::TAG);
        self.c1.encode(w);
        self.hc.encode(w);
        self.c2.encode(w);
    }
}

impl<T: Ttdf> Decode for TpkeCiphertext<T> {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        r.tag(T::TAG)?;
        let c1 = T::Image::decode(r)?;
        let hc = HashDesc::decode(r)?;
        let c2 = BitString::decode(r)?;
        c2.check_len(hc.out_bits())
            .map_err(|e| Error::Decode(e.to_string()))?;
        Ok(Self { c1, hc, c2 })
    }
}
