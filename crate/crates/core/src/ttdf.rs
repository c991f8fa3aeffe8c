//! The scheme-agnostic threshold trapdoor interface consumed by the
//! encryption schemes.

use std::fmt::Debug;

use rand::{CryptoRng, RngCore};

use crate::bits::BitString;
use crate::codec::{Decode, Encode};
use crate::error::Result;

/// Sampling mode of a lossy function index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Injective,
    Lossy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Metadata {
    /// Preimage length in bits as the function sees it.
    pub input_bits: usize,
    /// Width of the bit encoding fed to the extractor.
    pub encoded_bits: usize,
    /// Bits of preimage entropy destroyed in lossy mode.
    pub lossiness: usize,
    /// Valid identities are `1..=id_max`.
    pub id_max: u64,
    pub n: u64,
    pub t: usize,
}

/// A threshold trapdoor function (or relation). Implementors are small
/// configuration values; keys and images are associated types.
pub trait Ttdf {
    const TAG: u8;
    const NAME: &'static str;

    type Index: Clone + Debug + Encode + Decode;
    type MasterTrapdoor: Clone + Debug + Encode + Decode;
    type SharedTrapdoor: Clone + Debug + Encode + Decode;
    type Image: Clone + Debug + PartialEq + Encode + Decode;
    type Share: Clone + Debug + PartialEq + Encode + Decode;
    type Preimage: Clone + Debug + PartialEq;

    fn metadata(ek: &Self::Index) -> Metadata;

    /// Samples an injective index with its master trapdoor.
    fn gen<R: RngCore + CryptoRng + ?Sized>(
        &self,
        rng: &mut R,
    ) -> Result<(Self::Index, Self::MasterTrapdoor)>;

    fn share(mtd: &Self::MasterTrapdoor, id: u64) -> Result<Self::SharedTrapdoor>;

    /// A fresh random preimage and its image.
    fn sample<R: RngCore + CryptoRng + ?Sized>(
        ek: &Self::Index,
        rng: &mut R,
    ) -> Result<(Self::Preimage, Self::Image)>;

    fn invert_share<R: RngCore + CryptoRng + ?Sized>(
        td: &Self::SharedTrapdoor,
        image: &Self::Image,
        rng: &mut R,
    ) -> Result<Self::Share>;

    /// Derives the share of `target` from `t - 1` shares and the known
    /// preimage of `image`.
    fn combine_inv(
        ek: &Self::Index,
        x: &Self::Preimage,
        image: &Self::Image,
        shares: &[Self::Share],
        target: u64,
    ) -> Result<Self::Share>;

    fn combine(shares: &[Self::Share], image: &Self::Image) -> Result<Self::Preimage>;

    /// The extractor input for `x`, [`Metadata::encoded_bits`] long.
    fn preimage_bits(image: &Self::Image, x: &Self::Preimage) -> BitString;

    fn share_id(share: &Self::Share) -> u64;

    fn trapdoor_id(td: &Self::SharedTrapdoor) -> u64;
}
