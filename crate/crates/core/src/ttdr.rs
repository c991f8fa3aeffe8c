//! The 2x3 DDH matrix as a threshold trapdoor relation: preimages are
//! pairs of group elements `(g^{x_1}, g^{x_2})`, produced together with
//! their image by a relation sampler.

use std::sync::Arc;

use rand::{CryptoRng, RngCore};

use crate::arith::ModInt;
use crate::bits::BitString;
use crate::ddh::{
    self, combine_elems, combine_inv_elems, DdhContext, DdhImage, DdhIndex, DdhMasterTrapdoor,
    DdhShare, DdhSharedTrapdoor, Kind,
};
use crate::error::{Error, Result};
use crate::group::{GroupElem, GroupParams};
use crate::ttdf::{Metadata, Mode, Ttdf};

pub use crate::ddh::RELATION_TAG as TAG;

pub type TtdrIndex = DdhIndex;
pub type TtdrMasterTrapdoor = DdhMasterTrapdoor;
pub type TtdrSharedTrapdoor = DdhSharedTrapdoor;
pub type TtdrImage = DdhImage;
pub type TtdrShare = DdhShare;
pub type TtdrPreimage = [GroupElem; 2];

/// Relation context: `l = 2` over the given group.
pub fn context(group: Arc<GroupParams>, n: u64, t: usize) -> Result<Arc<DdhContext>> {
    DdhContext::with_kind(group, 2, n, t, Kind::Relation)
}

pub fn gen<R: RngCore + ?Sized>(
    ctx: &Arc<DdhContext>,
    mode: Mode,
    rng: &mut R,
) -> Result<(TtdrIndex, TtdrMasterTrapdoor)> {
    ddh::samp(ctx, mode, rng)
}

/// The relation for explicit exponents: `x = (g^{x_1}, g^{x_2})` and
/// `y_k = c_{1k}^{x_1} c_{2k}^{x_2}`.
pub fn relation(ek: &TtdrIndex, x1: &ModInt, x2: &ModInt) -> Result<(TtdrPreimage, TtdrImage)> {
    let ctx = ek.context();
    let grp = ctx.group();
    let c = ek.matrix();
    let y = (0..3)
        .map(|k| Ok(grp.mul(&grp.exp(&c[0][k], x1)?, &grp.exp(&c[1][k], x2)?)))
        .collect::<Result<_>>()?;
    let x = [grp.exp_g(x1)?, grp.exp_g(x2)?];
    Ok((x, DdhImage::from_values(ctx, y)))
}

pub fn sample<R: RngCore + ?Sized>(ek: &TtdrIndex, rng: &mut R) -> Result<(TtdrPreimage, TtdrImage)> {
    let grp = ek.context().group();
    let x1 = grp.random_exponent(rng);
    let x2 = grp.random_exponent(rng);
    relation(ek, &x1, &x2)
}

/// Recovers `(g^{x_1}, g^{x_2})` from `t` shares.
pub fn combine(shares: &[TtdrShare], image: &TtdrImage) -> Result<TtdrPreimage> {
    let q = combine_elems(shares, image)?;
    let [a, b]: [GroupElem; 2] = q.try_into().expect("two quotients");
    Ok([a, b])
}

pub fn combine_inv(image: &TtdrImage, x: &TtdrPreimage, shares: &[TtdrShare], target: u64) -> Result<TtdrShare> {
    combine_inv_elems(image, x, shares, target)
}

/// Fixed-width big-endian encoding of both elements.
pub fn encode_preimage(grp: &GroupParams, x: &TtdrPreimage) -> BitString {
    let mut bytes = grp.fixed_bytes(&x[0]);
    bytes.extend(grp.fixed_bytes(&x[1]));
    BitString::from_packed(&bytes, bytes.len() * 8)
}

#[derive(Debug, Clone)]
pub struct DdhTtdr {
    ctx: Arc<DdhContext>,
}

impl DdhTtdr {
    pub fn new(group: Arc<GroupParams>, n: u64, t: usize) -> Result<Self> {
        Ok(Self {
            ctx: context(group, n, t)?,
        })
    }

    pub fn context(&self) -> &Arc<DdhContext> {
        &self.ctx
    }
}

fn expect_relation(ctx: &DdhContext) -> Result<()> {
    if ctx.kind() != Kind::Relation {
        return Err(Error::SchemeMismatch {
            expected: TAG,
            got: ctx.kind().tag(),
        });
    }
    Ok(())
}

impl Ttdf for DdhTtdr {
    const TAG: u8 = TAG;
    const NAME: &'static str = "ttdr";

    type Index = TtdrIndex;
    type MasterTrapdoor = TtdrMasterTrapdoor;
    type SharedTrapdoor = TtdrSharedTrapdoor;
    type Image = TtdrImage;
    type Share = TtdrShare;
    type Preimage = TtdrPreimage;

    fn metadata(ek: &TtdrIndex) -> Metadata {
        let ctx = ek.context();
        let p_bits = ctx.group().order().bits() as usize;
        Metadata {
            input_bits: 2 * p_bits,
            encoded_bits: 16 * ctx.group().elem_bytes(),
            lossiness: p_bits - 1,
            id_max: ctx.id_max(),
            n: ctx.n(),
            t: ctx.t(),
        }
    }

    fn gen<R: RngCore + CryptoRng + ?Sized>(&self, rng: &mut R) -> Result<(TtdrIndex, TtdrMasterTrapdoor)> {
        gen(&self.ctx, Mode::Injective, rng)
    }

    fn share(mtd: &TtdrMasterTrapdoor, id: u64) -> Result<TtdrSharedTrapdoor> {
        expect_relation(mtd.context())?;
        mtd.share(id)
    }

    fn sample<R: RngCore + CryptoRng + ?Sized>(ek: &TtdrIndex, rng: &mut R) -> Result<(TtdrPreimage, TtdrImage)> {
        expect_relation(ek.context())?;
        sample(ek, rng)
    }

    fn invert_share<R: RngCore + CryptoRng + ?Sized>(
        td: &TtdrSharedTrapdoor,
        image: &TtdrImage,
        _rng: &mut R,
    ) -> Result<TtdrShare> {
        td.invert_share(image)
    }

    fn combine_inv(
        _ek: &TtdrIndex,
        x: &TtdrPreimage,
        image: &TtdrImage,
        shares: &[TtdrShare],
        target: u64,
    ) -> Result<TtdrShare> {
        combine_inv(image, x, shares, target)
    }

    fn combine(shares: &[TtdrShare], image: &TtdrImage) -> Result<TtdrPreimage> {
        combine(shares, image)
    }

    fn preimage_bits(image: &TtdrImage, x: &TtdrPreimage) -> BitString {
        encode_preimage(image.context().group(), x)
    }

    fn share_id(share: &TtdrShare) -> u64 {
        share.id
    }

    fn trapdoor_id(td: &TtdrSharedTrapdoor) -> u64 {
        td.id()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{Decode, Encode};
    use crate::ddh::exponents;
    use crate::group::{group_gen, Level};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn fixture(mode: Mode) -> TtdrIndex {
        let ctx = context(group_gen(Level::Toy), 4, 3).unwrap();
        let grp = ctx.group().clone();
        let mtd = DdhMasterTrapdoor::from_parts(
            &ctx,
            exponents(&grp, &[3, 4]),
            vec![exponents(&grp, &[1, 2]), exponents(&grp, &[5, 7])],
        )
        .unwrap();
        DdhIndex::from_exponents(mode, &exponents(&grp, &[1, 2]), &mtd).unwrap()
    }

    fn values(row: &[GroupElem]) -> Vec<u64> {
        row.iter()
            .map(|g| g.value().iter_u64_digits().next().unwrap_or(0))
            .collect()
    }

    #[test]
    fn pinned_lossy_matrix() {
        let c0 = fixture(Mode::Lossy);
        assert_eq!(values(&c0.matrix()[0]), [2, 8, 16]);
        assert_eq!(values(&c0.matrix()[1]), [4, 64 % 23, 256 % 23]);
        let c1 = fixture(Mode::Injective);
        assert_eq!(values(&c1.matrix()[0]), [2, 16, 16]);
        assert_eq!(values(&c1.matrix()[1]), [4, 64 % 23, 512 % 23]);
    }

    #[test]
    fn relation_examples() {
        let ek = fixture(Mode::Injective);
        let grp = ek.context().group().clone();
        let zero = grp.order().zero();
        let (x, y) = relation(&ek, &zero, &zero).unwrap();
        assert_eq!(x, [grp.identity(), grp.identity()]);
        assert!(y.values().iter().all(|v| *v == grp.identity()));

        let x1 = grp.order().elem(6u8);
        let (_, y) = relation(&ek, &x1, &zero).unwrap();
        let expect: Vec<_> = ek.matrix()[0].iter().map(|c| grp.exp(c, &x1).unwrap()).collect();
        assert_eq!(y.values(), expect.as_slice());
    }

    #[test]
    fn threshold_validation() {
        assert_eq!(
            context(group_gen(Level::Toy), 3, 4).unwrap_err(),
            Error::BadThreshold { n: 3, t: 4 }
        );
    }

    #[test]
    fn round_trip_every_subset() {
        let ctx = context(group_gen(Level::Toy), 4, 3).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let (ek, mtd) = gen(&ctx, Mode::Injective, &mut rng).unwrap();
        for _ in 0..20 {
            let (x, y) = sample(&ek, &mut rng).unwrap();
            for skip in 1..=4u64 {
                let shares: Vec<_> = (1..=4)
                    .filter(|&id| id != skip)
                    .map(|id| mtd.share(id).unwrap().invert_share(&y).unwrap())
                    .collect();
                assert_eq!(combine(&shares, &y).unwrap(), x);
                let derived = combine_inv(&y, &x, &shares[..2], skip).unwrap();
                assert_eq!(derived, mtd.share(skip).unwrap().invert_share(&y).unwrap());
            }
        }
    }

    #[test]
    fn constant_sharing_gives_equal_shares() {
        let ctx = context(group_gen(Level::Toy), 4, 3).unwrap();
        let grp = ctx.group().clone();
        let mtd = DdhMasterTrapdoor::from_parts(
            &ctx,
            exponents(&grp, &[3, 4]),
            vec![exponents(&grp, &[0, 0]), exponents(&grp, &[0, 0])],
        )
        .unwrap();
        let ek = DdhIndex::from_exponents(Mode::Injective, &exponents(&grp, &[1, 2]), &mtd).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(12);
        let (_, y) = sample(&ek, &mut rng).unwrap();
        let a = mtd.share(1).unwrap().invert_share(&y).unwrap();
        let b = mtd.share(3).unwrap().invert_share(&y).unwrap();
        assert_eq!(a.delta, b.delta);
    }

    #[test]
    fn lossy_collisions() {
        // r = (1, 2): (x1, x2) and (x1 + 2k, x2 - k) collide.
        let ek = fixture(Mode::Lossy);
        let grp = ek.context().group().clone();
        let p = grp.order().clone();
        for k in 1u8..11 {
            let (x, y) = relation(&ek, &p.elem(3u8), &p.elem(5u8)).unwrap();
            let (x2, y2) =
                relation(&ek, &p.elem(3 + 2 * u32::from(k)), &(&p.elem(5u8) - &p.elem(k))).unwrap();
            assert_ne!(x, x2);
            assert_eq!(y, y2);
        }
    }

    #[test]
    fn preimage_encoding_is_fixed_width() {
        let grp = group_gen(Level::L128);
        let x = [grp.identity(), grp.generator()];
        let bits = encode_preimage(&grp, &x);
        assert_eq!(bits.len(), 2 * 3072);
        assert_eq!(bits.to_packed()[383], 1);
    }

    #[test]
    fn metadata_and_tags() {
        let ek = fixture(Mode::Injective);
        let m = DdhTtdr::metadata(&ek);
        assert_eq!((m.input_bits, m.lossiness, m.encoded_bits), (8, 3, 16));
        let bytes = ek.to_bytes();
        assert_eq!(bytes[0], TAG);
        assert_eq!(TtdrIndex::from_bytes(&bytes).unwrap(), ek);
    }
}
