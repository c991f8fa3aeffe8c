//! ElGamal matrix encryption as a threshold lossy trapdoor function.
//!
//! The index is an `l x (l+1)` matrix with rows
//! `(g^{r_i}, g^{r_i s_1}, ..., g^{r_i s_l})`; the injective mode multiplies
//! the diagonal entry `(i, i+1)` by `g`. Each `s_j` is Shamir-shared, so
//! inversion happens in the exponent from `t` shares of `y_1^{s_j}`.

use std::sync::Arc;

use num_bigint::BigUint;
use rand::{CryptoRng, RngCore};

use crate::arith::{lagrange_at, ModInt};
use crate::bits::BitString;
use crate::codec::{Decode, Encode, Reader, Writer};
use crate::error::{Error, Result};
use crate::group::{GroupElem, GroupParams};
use crate::shamir::SharingState;
use crate::ttdf::{Metadata, Mode, Ttdf};

pub const TAG: u8 = 0x01;
pub const RELATION_TAG: u8 = 0x03;

/// Whether the matrix backs the bit-input function or the 2x3 relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Function,
    Relation,
}

impl Kind {
    pub fn tag(self) -> u8 {
        match self {
            Kind::Function => TAG,
            Kind::Relation => RELATION_TAG,
        }
    }

    fn read(r: &mut Reader<'_>) -> Result<Self> {
        match r.u8()? {
            TAG => Ok(Kind::Function),
            RELATION_TAG => Ok(Kind::Relation),
            got => Err(Error::SchemeMismatch { expected: TAG, got }),
        }
    }
}

/// Dimensions and threshold shared by every object of one instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DdhContext {
    group: Arc<GroupParams>,
    l: usize,
    n: u64,
    t: usize,
    kind: Kind,
}

impl DdhContext {
    pub fn new(group: Arc<GroupParams>, l: usize, n: u64, t: usize) -> Result<Arc<Self>> {
        Self::with_kind(group, l, n, t, Kind::Function)
    }

    pub(crate) fn with_kind(
        group: Arc<GroupParams>,
        l: usize,
        n: u64,
        t: usize,
        kind: Kind,
    ) -> Result<Arc<Self>> {
        if l == 0 {
            return Err(Error::InconsistentParams("input length must be positive".into()));
        }
        let ctx = Self {
            group,
            l,
            n,
            t,
            kind,
        };
        if t < 2 || t as u64 > n || n > ctx.id_max() {
            return Err(Error::BadThreshold { n, t });
        }
        Ok(Arc::new(ctx))
    }

    pub fn group(&self) -> &Arc<GroupParams> {
        &self.group
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    /// Identities are the nonzero residues mod `p`, capped to `u64`.
    pub fn id_max(&self) -> u64 {
        let p = self.group.order().value();
        u64::try_from(p - 1u8).unwrap_or(u64::MAX)
    }

    /// `l - bits(p)`: the lossy image is determined by one exponent.
    pub fn lossiness(&self) -> usize {
        self.l.saturating_sub(self.group.order().bits() as usize)
    }

    fn check_id(&self, id: u64) -> Result<()> {
        if id == 0 {
            return Err(Error::ZeroIdentity);
        }
        if id > self.id_max() {
            return Err(Error::IdentityOutOfRange {
                id,
                max: self.id_max(),
            });
        }
        Ok(())
    }

    fn same(self: &Arc<Self>, other: &Arc<Self>) -> Result<()> {
        if Arc::ptr_eq(self, other) || self == other {
            Ok(())
        } else {
            Err(Error::ParamsMismatch)
        }
    }

    fn write(&self, w: &mut Writer) {
        self.group.encode(w);
        w.len(self.l);
        w.u64(self.n);
        w.len(self.t);
    }

    fn read(r: &mut Reader<'_>, kind: Kind) -> Result<Arc<Self>> {
        let group = Arc::<GroupParams>::decode(r)?;
        let l = r.len()?;
        let n = r.u64()?;
        let t = r.len()?;
        Self::with_kind(group, l, n, t, kind).map_err(|e| Error::Decode(e.to_string()))
    }
}

/// The public function index `C`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DdhIndex {
    ctx: Arc<DdhContext>,
    c: Vec<Vec<GroupElem>>,
}

/// Per-row sharings of the secret exponents `s_j`, with coefficient rows
/// `b_{j1}..b_{j(t-1)}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DdhMasterTrapdoor {
    ctx: Arc<DdhContext>,
    rows: Vec<SharingState>,
}

/// `(f_1(id), ..., f_l(id))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DdhSharedTrapdoor {
    ctx: Arc<DdhContext>,
    id: u64,
    values: Vec<ModInt>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DdhImage {
    ctx: Arc<DdhContext>,
    y: Vec<GroupElem>,
}

/// `(y_1^{f_1(id)}, ..., y_1^{f_l(id)})` for one identity. Decoded shares
/// are checked for subgroup membership when combined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DdhShare {
    kind: Kind,
    pub id: u64,
    pub delta: Vec<GroupElem>,
}

impl DdhMasterTrapdoor {
    /// Fresh uniform sharings.
    pub fn random<R: RngCore + ?Sized>(ctx: &Arc<DdhContext>, rng: &mut R) -> Result<Self> {
        let p = ctx.group.order();
        let rows = (0..ctx.l)
            .map(|_| {
                let s = p.random(rng);
                SharingState::new(s, ctx.id_max(), ctx.t, rng)
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            ctx: Arc::clone(ctx),
            rows,
        })
    }

    /// Explicit secrets `s` and coefficient matrix `d` (`l x (t-1)`).
    pub fn from_parts(ctx: &Arc<DdhContext>, s: Vec<ModInt>, d: Vec<Vec<ModInt>>) -> Result<Self> {
        if s.len() != ctx.l || d.len() != ctx.l {
            return Err(Error::LengthMismatch {
                expected: ctx.l,
                got: s.len().min(d.len()),
            });
        }
        let rows = s
            .into_iter()
            .zip(d)
            .map(|(s, coeffs)| {
                if s.modulus() != ctx.group.order() {
                    return Err(Error::ParamsMismatch);
                }
                if coeffs.len() + 1 != ctx.t {
                    return Err(Error::LengthMismatch {
                        expected: ctx.t - 1,
                        got: coeffs.len(),
                    });
                }
                SharingState::from_coefficients(s, coeffs, ctx.id_max())
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            ctx: Arc::clone(ctx),
            rows,
        })
    }

    pub fn context(&self) -> &Arc<DdhContext> {
        &self.ctx
    }

    pub fn secrets(&self) -> impl Iterator<Item = &ModInt> {
        self.rows.iter().map(|r| r.secret())
    }

    pub fn share(&self, id: u64) -> Result<DdhSharedTrapdoor> {
        self.ctx.check_id(id)?;
        let values = self
            .rows
            .iter()
            .map(|row| row.share(id).map(|pt| pt.value))
            .collect::<Result<_>>()?;
        Ok(DdhSharedTrapdoor {
            ctx: Arc::clone(&self.ctx),
            id,
            values,
        })
    }
}

impl DdhIndex {
    /// Builds the matrix from explicit row exponents `r` and the secrets of
    /// `mtd`.
    pub fn from_exponents(mode: Mode, r: &[ModInt], mtd: &DdhMasterTrapdoor) -> Result<Self> {
        let ctx = &mtd.ctx;
        let grp = &ctx.group;
        if r.len() != ctx.l {
            return Err(Error::LengthMismatch {
                expected: ctx.l,
                got: r.len(),
            });
        }
        let g = grp.generator();
        let mut c = Vec::with_capacity(ctx.l);
        for (i, ri) in r.iter().enumerate() {
            let mut row = Vec::with_capacity(ctx.l + 1);
            row.push(grp.exp(&g, ri)?);
            for (j, sj) in mtd.secrets().enumerate() {
                let mut e = grp.exp(&g, &ri.try_mul(sj)?)?;
                if mode == Mode::Injective && i == j {
                    e = grp.mul(&e, &g);
                }
                row.push(e);
            }
            c.push(row);
        }
        Ok(Self {
            ctx: Arc::clone(ctx),
            c,
        })
    }

    pub fn context(&self) -> &Arc<DdhContext> {
        &self.ctx
    }

    pub fn matrix(&self) -> &[Vec<GroupElem>] {
        &self.c
    }

    /// Column-wise product of the rows selected by `x`.
    pub fn eval(&self, x: &BitString) -> Result<DdhImage> {
        x.check_len(self.ctx.l)?;
        let grp = &self.ctx.group;
        let mut y = vec![grp.identity(); self.ctx.l + 1];
        for (row, bit) in self.c.iter().zip(x.iter()) {
            if bit {
                for (acc, c) in y.iter_mut().zip(row) {
                    *acc = grp.mul(acc, c);
                }
            }
        }
        Ok(DdhImage {
            ctx: Arc::clone(&self.ctx),
            y,
        })
    }
}

impl DdhImage {
    pub fn context(&self) -> &Arc<DdhContext> {
        &self.ctx
    }

    pub fn values(&self) -> &[GroupElem] {
        &self.y
    }

    pub(crate) fn from_values(ctx: &Arc<DdhContext>, y: Vec<GroupElem>) -> Self {
        Self {
            ctx: Arc::clone(ctx),
            y,
        }
    }
}

/// Samples an index and master trapdoor in the given mode.
pub fn samp<R: RngCore + ?Sized>(
    ctx: &Arc<DdhContext>,
    mode: Mode,
    rng: &mut R,
) -> Result<(DdhIndex, DdhMasterTrapdoor)> {
    let mtd = DdhMasterTrapdoor::random(ctx, rng)?;
    let p = ctx.group.order();
    let r: Vec<ModInt> = (0..ctx.l).map(|_| p.random(rng)).collect();
    let ek = DdhIndex::from_exponents(mode, &r, &mtd)?;
    Ok((ek, mtd))
}

impl DdhSharedTrapdoor {
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn values(&self) -> &[ModInt] {
        &self.values
    }

    pub fn context(&self) -> &Arc<DdhContext> {
        &self.ctx
    }

    /// Raises `y_1` to each trapdoor value.
    pub fn invert_share(&self, image: &DdhImage) -> Result<DdhShare> {
        self.ctx.same(&image.ctx)?;
        let grp = &self.ctx.group;
        let y1 = &image.y[0];
        if !grp.contains(y1.value()) {
            return Err(Error::NotInGroup);
        }
        let delta = self
            .values
            .iter()
            .map(|v| grp.exp(y1, v))
            .collect::<Result<_>>()?;
        Ok(DdhShare {
            kind: self.ctx.kind,
            id: self.id,
            delta,
        })
    }
}

fn check_shares(ctx: &DdhContext, shares: &[DdhShare], expected: usize) -> Result<()> {
    if shares.len() != expected {
        return Err(Error::WrongCount {
            expected,
            got: shares.len(),
        });
    }
    for s in shares {
        if s.kind != ctx.kind {
            return Err(Error::SchemeMismatch {
                expected: ctx.kind.tag(),
                got: s.kind.tag(),
            });
        }
        ctx.check_id(s.id)?;
        if s.delta.len() != ctx.l {
            return Err(Error::LengthMismatch {
                expected: ctx.l,
                got: s.delta.len(),
            });
        }
        if !s.delta.iter().all(|d| ctx.group.contains(d.value())) {
            return Err(Error::NotInGroup);
        }
    }
    Ok(())
}

/// `prod_v base_v^{L_v}` per coordinate.
fn interpolate(grp: &GroupParams, columns: &[&[GroupElem]], coeffs: &[ModInt], l: usize) -> Vec<GroupElem> {
    (0..l)
        .map(|j| {
            columns
                .iter()
                .zip(coeffs)
                .fold(grp.identity(), |acc, (col, c)| {
                    grp.mul(&acc, &grp.exp_raw(&col[j], c.value()))
                })
        })
        .collect()
}

/// Interpolates the target share through node 0, whose share
/// `y_1^{s_j} = y_{j+1} / x_j` is derived from the known preimage group
/// elements `x_j`.
pub(crate) fn combine_inv_elems(
    image: &DdhImage,
    x: &[GroupElem],
    shares: &[DdhShare],
    target: u64,
) -> Result<DdhShare> {
    let ctx = &image.ctx;
    let grp = &ctx.group;
    check_shares(ctx, shares, ctx.t - 1)?;
    ctx.check_id(target)?;
    if shares.iter().any(|s| s.id == target) {
        return Err(Error::TargetCollision(target));
    }
    let node0: Vec<GroupElem> = x
        .iter()
        .zip(&image.y[1..])
        .map(|(xj, yj)| grp.div(yj, xj))
        .collect();
    let mut nodes = vec![0u64];
    nodes.extend(shares.iter().map(|s| s.id));
    let coeffs = lagrange_at(&nodes, target, grp.order())?;
    let mut columns: Vec<&[GroupElem]> = vec![&node0];
    columns.extend(shares.iter().map(|s| s.delta.as_slice()));
    Ok(DdhShare {
        kind: ctx.kind,
        id: target,
        delta: interpolate(grp, &columns, &coeffs, ctx.l),
    })
}

/// Recovers the quotients `y_{j+1} / y_1^{s_j}` from `t` shares.
pub(crate) fn combine_elems(shares: &[DdhShare], image: &DdhImage) -> Result<Vec<GroupElem>> {
    let ctx = &image.ctx;
    let grp = &ctx.group;
    check_shares(ctx, shares, ctx.t)?;
    let ids: Vec<u64> = shares.iter().map(|s| s.id).collect();
    let coeffs = lagrange_at(&ids, 0, grp.order())?;
    let columns: Vec<&[GroupElem]> = shares.iter().map(|s| s.delta.as_slice()).collect();
    let y1s = interpolate(grp, &columns, &coeffs, ctx.l);
    Ok(image.y[1..]
        .iter()
        .zip(&y1s)
        .map(|(y, d)| grp.div(y, d))
        .collect())
}

/// Derives the share of `target` from `t - 1` shares and the preimage `x`
/// of `ddh_eval(ek, x)`.
pub fn combine_inv(ek: &DdhIndex, x: &BitString, shares: &[DdhShare], target: u64) -> Result<DdhShare> {
    let image = ek.eval(x)?;
    let grp = &ek.ctx.group;
    let gx: Vec<GroupElem> = x
        .iter()
        .map(|b| if b { grp.generator() } else { grp.identity() })
        .collect();
    combine_inv_elems(&image, &gx, shares, target)
}

/// Recovers the preimage bits from `t` shares.
pub fn combine(shares: &[DdhShare], image: &DdhImage) -> Result<BitString> {
    let grp = &image.ctx.group;
    let (one, g) = (grp.identity(), grp.generator());
    combine_elems(shares, image)?
        .into_iter()
        .map(|q| match q {
            q if q == one => Ok(false),
            q if q == g => Ok(true),
            _ => Err(Error::NotInImage),
        })
        .collect()
}

fn read_exponent(r: &mut Reader<'_>, grp: &GroupParams) -> Result<ModInt> {
    let v = r.uint()?;
    if &v >= grp.order().value() {
        return Err(Error::Decode("exponent not reduced mod p".into()));
    }
    Ok(grp.order().elem(v))
}

fn write_elems(w: &mut Writer, elems: &[GroupElem]) {
    for e in elems {
        w.uint(e.value());
    }
}

fn read_elems(r: &mut Reader<'_>, grp: &GroupParams, count: usize) -> Result<Vec<GroupElem>> {
    (0..count).map(|_| grp.read_elem(r)).collect()
}

impl Encode for DdhIndex {
    fn encode(&self, w: &mut Writer) {
        w.u8(self.ctx.kind.tag());
        self.ctx.write(w);
        for row in &self.c {
            write_elems(w, row);
        }
    }
}

impl Decode for DdhIndex {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        let kind = Kind::read(r)?;
        let ctx = DdhContext::read(r, kind)?;
        let c = (0..ctx.l)
            .map(|_| read_elems(r, &ctx.group, ctx.l + 1))
            .collect::<Result<_>>()?;
        Ok(Self { ctx, c })
    }
}

impl Encode for DdhMasterTrapdoor {
    fn encode(&self, w: &mut Writer) {
        w.u8(self.ctx.kind.tag());
        self.ctx.write(w);
        for row in &self.rows {
            w.uint(row.secret().value());
            for c in row.coefficients() {
                w.uint(c.value());
            }
        }
    }
}

impl Decode for DdhMasterTrapdoor {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        let kind = Kind::read(r)?;
        let ctx = DdhContext::read(r, kind)?;
        let mut s = Vec::with_capacity(ctx.l);
        let mut d = Vec::with_capacity(ctx.l);
        for _ in 0..ctx.l {
            s.push(read_exponent(r, &ctx.group)?);
            d.push(
                (1..ctx.t)
                    .map(|_| read_exponent(r, &ctx.group))
                    .collect::<Result<_>>()?,
            );
        }
        Self::from_parts(&ctx, s, d)
    }
}

impl Encode for DdhSharedTrapdoor {
    fn encode(&self, w: &mut Writer) {
        w.u8(self.ctx.kind.tag());
        self.ctx.write(w);
        w.u64(self.id);
        for v in &self.values {
            w.uint(v.value());
        }
    }
}

impl Decode for DdhSharedTrapdoor {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        let kind = Kind::read(r)?;
        let ctx = DdhContext::read(r, kind)?;
        let id = r.u64()?;
        ctx.check_id(id).map_err(|e| Error::Decode(e.to_string()))?;
        let values = (0..ctx.l)
            .map(|_| read_exponent(r, &ctx.group))
            .collect::<Result<_>>()?;
        Ok(Self { ctx, id, values })
    }
}

impl Encode for DdhImage {
    fn encode(&self, w: &mut Writer) {
        w.u8(self.ctx.kind.tag());
        self.ctx.write(w);
        write_elems(w, &self.y);
    }
}

impl Decode for DdhImage {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        let kind = Kind::read(r)?;
        let ctx = DdhContext::read(r, kind)?;
        let y = read_elems(r, &ctx.group, ctx.l + 1)?;
        Ok(Self { ctx, y })
    }
}

impl Encode for DdhShare {
    fn encode(&self, w: &mut Writer) {
        w.u8(self.kind.tag());
        w.u64(self.id);
        w.len(self.delta.len());
        write_elems(w, &self.delta);
    }
}

impl Decode for DdhShare {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        let kind = Kind::read(r)?;
        let id = r.u64()?;
        let count = r.count(4)?;
        let delta = (0..count)
            .map(|_| Ok(GroupElem::unchecked(r.uint()?)))
            .collect::<Result<_>>()?;
        Ok(Self { kind, id, delta })
    }
}

/// The DDH function as a threshold trapdoor function (injective mode).
#[derive(Debug, Clone)]
pub struct DdhTtdf {
    ctx: Arc<DdhContext>,
}

impl DdhTtdf {
    pub fn new(ctx: Arc<DdhContext>) -> Result<Self> {
        if ctx.kind != Kind::Function {
            return Err(Error::InconsistentParams("relation context given".into()));
        }
        Ok(Self { ctx })
    }

    /// Input length `message_bits + bits(p) + 2 * epsilon_log2`, so the
    /// lossiness supports extracting `message_bits`.
    pub fn for_message(
        group: Arc<GroupParams>,
        message_bits: usize,
        epsilon_log2: usize,
        n: u64,
        t: usize,
    ) -> Result<Self> {
        let l = message_bits + group.order().bits() as usize + 2 * epsilon_log2;
        Self::new(DdhContext::new(group, l, n, t)?)
    }

    pub fn context(&self) -> &Arc<DdhContext> {
        &self.ctx
    }
}

impl Ttdf for DdhTtdf {
    const TAG: u8 = TAG;
    const NAME: &'static str = "ddh";

    type Index = DdhIndex;
    type MasterTrapdoor = DdhMasterTrapdoor;
    type SharedTrapdoor = DdhSharedTrapdoor;
    type Image = DdhImage;
    type Share = DdhShare;
    type Preimage = BitString;

    fn metadata(ek: &DdhIndex) -> Metadata {
        let ctx = &ek.ctx;
        Metadata {
            input_bits: ctx.l,
            encoded_bits: ctx.l,
            lossiness: ctx.lossiness(),
            id_max: ctx.id_max(),
            n: ctx.n,
            t: ctx.t,
        }
    }

    fn gen<R: RngCore + CryptoRng + ?Sized>(&self, rng: &mut R) -> Result<(DdhIndex, DdhMasterTrapdoor)> {
        samp(&self.ctx, Mode::Injective, rng)
    }

    fn share(mtd: &DdhMasterTrapdoor, id: u64) -> Result<DdhSharedTrapdoor> {
        mtd.share(id)
    }

    fn sample<R: RngCore + CryptoRng + ?Sized>(ek: &DdhIndex, rng: &mut R) -> Result<(BitString, DdhImage)> {
        let x = BitString::random(ek.ctx.l, rng);
        let y = ek.eval(&x)?;
        Ok((x, y))
    }

    fn invert_share<R: RngCore + CryptoRng + ?Sized>(
        td: &DdhSharedTrapdoor,
        image: &DdhImage,
        _rng: &mut R,
    ) -> Result<DdhShare> {
        td.invert_share(image)
    }

    fn combine_inv(
        ek: &DdhIndex,
        x: &BitString,
        _image: &DdhImage,
        shares: &[DdhShare],
        target: u64,
    ) -> Result<DdhShare> {
        combine_inv(ek, x, shares, target)
    }

    fn combine(shares: &[DdhShare], image: &DdhImage) -> Result<BitString> {
        combine(shares, image)
    }

    fn preimage_bits(_image: &DdhImage, x: &BitString) -> BitString {
        x.clone()
    }

    fn share_id(share: &DdhShare) -> u64 {
        share.id
    }

    fn trapdoor_id(td: &DdhSharedTrapdoor) -> u64 {
        td.id
    }
}

/// Exponent helper for fixtures.
pub fn exponents(grp: &GroupParams, values: &[u64]) -> Vec<ModInt> {
    values
        .iter()
        .map(|&v| grp.order().elem(BigUint::from(v)))
        .collect()
}
