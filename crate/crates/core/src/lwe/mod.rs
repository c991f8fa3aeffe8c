//! Lattice threshold lossy trapdoor function.
//!
//! The index hides `M = I ⊗ (1, 2, .., 2^{l-1})` (injective) or `M = 0`
//! (lossy) as `C = A Z + round(q M / p) + E`. Input `x ∈ {0,1}^h` maps to
//! `(xA, xC)`; the columns of `Z` are Shamir-shared, and `t` noisy inner
//! products `<xA, T_v>` are combined with integer Lagrange coefficients
//! scaled by `eta = (n!)^3` so the noise stays small.

mod gauss;
mod matrix;
mod params;

use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{CryptoRng, RngCore};

use crate::arith::{factorial, lagrange_cleared, round_half_up, Modulus};
use crate::bits::BitString;
use crate::codec::{Decode, Encode, Reader, Writer};
use crate::error::{Error, Result};
use crate::ttdf::{Metadata, Mode, Ttdf};

pub use gauss::{gauss_sample, Noise};
pub use matrix::ZqMatrix;
pub use params::{lwe_params, worst_case_gamma, LweParams};

use matrix::read_residue;

pub const TAG: u8 = 0x02;

/// The public index `(A, C)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LweIndex {
    params: Arc<LweParams>,
    a: ZqMatrix,
    c: ZqMatrix,
}

/// `Z` and the coefficient matrices `D_1..D_{t-1}`; the share of `id` is
/// `Z + sum_k D_k id^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LweMasterTrapdoor {
    params: Arc<LweParams>,
    z: ZqMatrix,
    coeffs: Vec<ZqMatrix>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LweSharedTrapdoor {
    params: Arc<LweParams>,
    id: u64,
    t: ZqMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LweImage {
    params: Arc<LweParams>,
    a: Vec<BigUint>,
    y: Vec<BigUint>,
}

/// Noisy inner products `<a, T[., i]> + e_i`. `scale` is 1 for fresh
/// shares and the cleared denominator for shares derived by
/// [`combine_inv`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LweShare {
    pub id: u64,
    pub delta: Vec<BigUint>,
    pub scale: BigUint,
}

fn same(a: &Arc<LweParams>, b: &Arc<LweParams>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::ParamsMismatch)
    }
}

fn check_id(params: &LweParams, id: u64) -> Result<()> {
    if id == 0 {
        return Err(Error::ZeroIdentity);
    }
    if id > params.n {
        return Err(Error::IdentityOutOfRange { id, max: params.n });
    }
    Ok(())
}

/// `round(q * 2^k / p)` for `k < l`: the scaled entries of the message
/// matrix.
fn scaled_powers(params: &LweParams) -> Vec<BigUint> {
    let q = BigInt::from(params.q.value().clone());
    let p = BigInt::from(params.p);
    (0..params.l)
        .map(|k| {
            round_half_up(&(&q << k), &p)
                .to_biguint()
                .expect("non-negative")
        })
        .collect()
}

/// The message matrix `round(q M / p)`, `h x w`.
pub fn message_matrix(params: &LweParams, mode: Mode) -> ZqMatrix {
    let pw = scaled_powers(params);
    ZqMatrix::from_fn(params.h, params.w, |i, j| match mode {
        Mode::Injective if i / params.l == j => pw[i % params.l].clone() % params.q.value(),
        _ => BigUint::zero(),
    })
}

/// Block `j` of `x` read least-significant bit first.
pub fn block_values(params: &LweParams, x: &BitString) -> Vec<u64> {
    (0..params.w)
        .map(|j| {
            (0..params.l).fold(0u64, |acc, k| acc | (u64::from(x[j * params.l + k]) << k))
        })
        .collect()
}

/// `sum_k m_k * round(q 2^k / p)` for the bits `m_k` of `m`: column `j` of
/// `x round(qM/p)` when block `j` of `x` encodes `m`.
fn rowsum(pw: &[BigUint], m: u64, q: &Modulus) -> BigUint {
    let mut acc = BigUint::zero();
    for (k, v) in pw.iter().enumerate() {
        if (m >> k) & 1 == 1 {
            acc += v;
        }
    }
    acc % q.value()
}

impl LweMasterTrapdoor {
    pub fn random<R: RngCore + ?Sized>(params: &Arc<LweParams>, rng: &mut R) -> Self {
        let q = &params.q;
        Self {
            params: Arc::clone(params),
            z: ZqMatrix::random(params.d, params.w, q, rng),
            coeffs: (1..params.t)
                .map(|_| ZqMatrix::random(params.d, params.w, q, rng))
                .collect(),
        }
    }

    pub fn from_parts(params: &Arc<LweParams>, z: ZqMatrix, coeffs: Vec<ZqMatrix>) -> Result<Self> {
        let dims = (params.d, params.w);
        if coeffs.len() + 1 != params.t {
            return Err(Error::LengthMismatch {
                expected: params.t - 1,
                got: coeffs.len(),
            });
        }
        for m in std::iter::once(&z).chain(&coeffs) {
            if (m.rows(), m.cols()) != dims {
                return Err(Error::InconsistentParams(format!(
                    "trapdoor matrix is {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    dims.0,
                    dims.1
                )));
            }
        }
        Ok(Self {
            params: Arc::clone(params),
            z,
            coeffs,
        })
    }

    pub fn params(&self) -> &Arc<LweParams> {
        &self.params
    }

    pub fn z(&self) -> &ZqMatrix {
        &self.z
    }

    pub fn share(&self, id: u64) -> Result<LweSharedTrapdoor> {
        check_id(&self.params, id)?;
        let q = &self.params.q;
        // Horner over the coefficient matrices.
        let x = BigUint::from(id);
        let mut acc = match self.coeffs.last() {
            Some(top) => top.clone(),
            None => return Err(Error::InconsistentParams("no coefficients".into())),
        };
        for m in self.coeffs.iter().rev().skip(1).chain(std::iter::once(&self.z)) {
            acc = m.add_scaled(&acc, &x, q);
        }
        Ok(LweSharedTrapdoor {
            params: Arc::clone(&self.params),
            id,
            t: acc,
        })
    }
}

impl LweIndex {
    /// `C = A Z + round(qM/p) + E` with explicit randomness.
    pub fn encrypt_matrix(
        mode: Mode,
        a: ZqMatrix,
        mtd: &LweMasterTrapdoor,
        e: &ZqMatrix,
    ) -> Result<Self> {
        let params = &mtd.params;
        let q = &params.q;
        if (a.rows(), a.cols()) != (params.h, params.d) || (e.rows(), e.cols()) != (params.h, params.w)
        {
            return Err(Error::InconsistentParams("index matrix dimensions".into()));
        }
        let c = a
            .mul(&mtd.z, q)
            .add(&message_matrix(params, mode), q)
            .add(e, q);
        Ok(Self {
            params: Arc::clone(params),
            a,
            c,
        })
    }

    pub fn params(&self) -> &Arc<LweParams> {
        &self.params
    }

    pub fn a(&self) -> &ZqMatrix {
        &self.a
    }

    pub fn c(&self) -> &ZqMatrix {
        &self.c
    }

    pub fn eval(&self, x: &BitString) -> Result<LweImage> {
        x.check_len(self.params.h)?;
        let q = &self.params.q;
        Ok(LweImage {
            params: Arc::clone(&self.params),
            a: self.a.select_rows(x.iter(), q),
            y: self.c.select_rows(x.iter(), q),
        })
    }
}

/// Samples an index and trapdoor in the given mode.
pub fn samp<R: RngCore + ?Sized>(
    params: &Arc<LweParams>,
    mode: Mode,
    rng: &mut R,
) -> Result<(LweIndex, LweMasterTrapdoor)> {
    let q = &params.q;
    let a = ZqMatrix::random(params.h, params.d, q, rng);
    let mtd = LweMasterTrapdoor::random(params, rng);
    let noise = params.noise;
    let e = ZqMatrix::from_fn(params.h, params.w, |_, _| noise.sample(q, rng).into_value());
    let ek = LweIndex::encrypt_matrix(mode, a, &mtd, &e)?;
    Ok((ek, mtd))
}

impl LweImage {
    pub fn params(&self) -> &Arc<LweParams> {
        &self.params
    }

    pub fn a(&self) -> &[BigUint] {
        &self.a
    }

    pub fn y(&self) -> &[BigUint] {
        &self.y
    }
}

impl LweSharedTrapdoor {
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn matrix(&self) -> &ZqMatrix {
        &self.t
    }

    /// Exact inner products `<a, T[., i]>`.
    pub fn inner_products(&self, a: &[BigUint]) -> Result<Vec<BigUint>> {
        if a.len() != self.params.d {
            return Err(Error::LengthMismatch {
                expected: self.params.d,
                got: a.len(),
            });
        }
        let q = &self.params.q;
        Ok((0..self.params.w).map(|i| self.t.dot_column(a, i, q)).collect())
    }

    /// `<a, T[., i]> + e_i` with fresh errors.
    pub fn invert_share<R: RngCore + ?Sized>(&self, image: &LweImage, rng: &mut R) -> Result<LweShare> {
        same(&self.params, &image.params)?;
        let q = &self.params.q;
        let noise = self.params.noise;
        let delta = self
            .inner_products(&image.a)?
            .into_iter()
            .map(|v| q.add_raw(&v, noise.sample(q, rng).value()))
            .collect();
        Ok(LweShare {
            id: self.id,
            delta,
            scale: BigUint::one(),
        })
    }
}

fn check_shares(params: &LweParams, shares: &[LweShare], expected: usize) -> Result<()> {
    if shares.len() != expected {
        return Err(Error::WrongCount {
            expected,
            got: shares.len(),
        });
    }
    for s in shares {
        check_id(params, s.id)?;
        if !s.scale.is_one() {
            return Err(Error::ScaleMismatch(s.scale.to_string()));
        }
        if s.delta.len() != params.w {
            return Err(Error::LengthMismatch {
                expected: params.w,
                got: s.delta.len(),
            });
        }
        if s.delta.iter().any(|v| v >= params.q.value()) {
            return Err(Error::InconsistentParams("share entry not reduced".into()));
        }
    }
    Ok(())
}

/// `sum_v c_v * delta_v[i] mod q` for signed integer coefficients.
fn weighted_sum(q: &Modulus, coeffs: &[BigInt], columns: &[&[BigUint]], i: usize) -> BigUint {
    let mut acc = BigInt::zero();
    for (c, col) in coeffs.iter().zip(columns) {
        acc += c * BigInt::from(col[i].clone());
    }
    q.reduce_signed(&acc)
}

/// The eta-scaled residues `R_i = eta y_i - sum_v (eta L_v) delta_v[i]`,
/// which equal `eta * (x round(qM/p))_i` plus small noise.
pub fn combine_residues(shares: &[LweShare], image: &LweImage) -> Result<Vec<BigUint>> {
    let params = &image.params;
    let q = &params.q;
    check_shares(params, shares, params.t)?;
    let ids: Vec<u64> = shares.iter().map(|s| s.id).collect();
    let coeffs = lagrange_cleared(&ids, 0, params.n)?
        .rescaled(&params.eta)
        .ok_or_else(|| Error::BoundViolation("scale does not divide eta".into()))?;
    let columns: Vec<&[BigUint]> = shares.iter().map(|s| s.delta.as_slice()).collect();
    Ok((0..params.w)
        .map(|i| {
            let base = q.mul_raw(&image.y[i], &(&params.eta % q.value()));
            q.sub_raw(&base, &weighted_sum(q, &coeffs, &columns, i))
        })
        .collect())
}

/// Closed-form symbol decoder: `m = eta^-1 * round(p * lift(R) / q) mod p`.
pub fn decode_closed_form(params: &LweParams, r: &BigUint) -> u64 {
    let q = BigInt::from(params.q.value().clone());
    let p = BigInt::from(params.p);
    let mu = round_half_up(&(params.q.lift_raw(r) * &p), &q).mod_floor(&p);
    let eta_inv = BigInt::from(&params.eta % params.p)
        .modpow(&BigInt::from(params.p - 2), &p);
    (mu * eta_inv).mod_floor(&p).to_u64().expect("below p")
}

/// Distance `|lift(R - eta * rowsum(m))|` of a residue from symbol `m`.
pub fn symbol_distance(params: &LweParams, r: &BigUint, m: u64) -> BigInt {
    let q = &params.q;
    let pw = scaled_powers(params);
    let target = q.mul_raw(&rowsum(&pw, m, q), &(&params.eta % q.value()));
    q.lift_raw(&q.sub_raw(r, &target)).abs()
}

/// Reference decoder: the symbol in `[0, 2^l)` nearest to `R`.
pub fn decode_argmin(params: &LweParams, r: &BigUint) -> (u64, BigInt) {
    (0..1u64 << params.l)
        .map(|m| (m, symbol_distance(params, r, m)))
        .min_by(|a, b| a.1.cmp(&b.1))
        .expect("nonempty symbol range")
}

/// Recovers `x` from `t` unit-scale shares.
pub fn combine(shares: &[LweShare], image: &LweImage) -> Result<BitString> {
    let params = &image.params;
    let residues = combine_residues(shares, image)?;
    let q2p = BigInt::from(params.q.value().clone());
    let mut bits = Vec::with_capacity(params.h);
    for r in &residues {
        let m = decode_closed_form(params, r);
        if m >= 1 << params.l {
            return Err(Error::NotInImage);
        }
        // Residual must sit within q/(2p) of the decoded symbol.
        if symbol_distance(params, r, m) * (2 * params.p) >= q2p {
            return Err(Error::NotInImage);
        }
        bits.extend((0..params.l).map(|k| (m >> k) & 1 == 1));
    }
    Ok(bits.into())
}

/// Derives the scaled share of `target` from `t - 1` shares and `x`: the
/// node-0 share `y_i - (x round(qM/p))_i` is synthesized and the shares are
/// interpolated with integer coefficients over the cleared denominator,
/// which becomes the output's `scale`.
pub fn combine_inv(ek: &LweIndex, x: &BitString, shares: &[LweShare], target: u64) -> Result<LweShare> {
    let params = &ek.params;
    let q = &params.q;
    check_shares(params, shares, params.t - 1)?;
    check_id(params, target)?;
    if shares.iter().any(|s| s.id == target) {
        return Err(Error::TargetCollision(target));
    }
    let image = ek.eval(x)?;
    let pw = scaled_powers(params);
    let node0: Vec<BigUint> = block_values(params, x)
        .into_iter()
        .zip(&image.y)
        .map(|(m, y)| q.sub_raw(y, &rowsum(&pw, m, q)))
        .collect();
    let mut nodes = vec![0u64];
    nodes.extend(shares.iter().map(|s| s.id));
    let sl = lagrange_cleared(&nodes, target, params.n)?;
    let nf = factorial(params.n);
    if sl.scale > &nf * &nf {
        return Err(Error::BoundViolation(format!(
            "scale {} exceeds (n!)^2",
            sl.scale
        )));
    }
    let mut columns: Vec<&[BigUint]> = vec![&node0];
    columns.extend(shares.iter().map(|s| s.delta.as_slice()));
    let delta = (0..params.w)
        .map(|i| weighted_sum(q, &sl.coeffs, &columns, i))
        .collect();
    Ok(LweShare {
        id: target,
        delta,
        scale: sl.scale,
    })
}

impl LweShare {
    /// `delta * scale^-1 mod q`.
    pub fn unscaled(&self, q: &Arc<Modulus>) -> Result<Vec<BigUint>> {
        let inv = q.inv_raw(&(&self.scale % q.value()))?;
        Ok(self.delta.iter().map(|v| q.mul_raw(v, &inv)).collect())
    }
}

fn write_vec(w: &mut Writer, v: &[BigUint]) {
    w.len(v.len());
    for x in v {
        w.uint(x);
    }
}

fn read_vec(r: &mut Reader<'_>, len: usize, q: &Modulus) -> Result<Vec<BigUint>> {
    let n = r.len()?;
    if n != len {
        return Err(Error::Decode(format!("vector of {n}, expected {len}")));
    }
    (0..len).map(|_| read_residue(r, q)).collect()
}

impl Encode for LweIndex {
    fn encode(&self, w: &mut Writer) {
        w.u8(TAG);
        self.params.write(w);
        self.a.write(w);
        self.c.write(w);
    }
}

impl Decode for LweIndex {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        r.tag(TAG)?;
        let params = LweParams::read(r)?;
        let a = ZqMatrix::read(r, params.h, params.d, &params.q)?;
        let c = ZqMatrix::read(r, params.h, params.w, &params.q)?;
        Ok(Self { params, a, c })
    }
}

impl Encode for LweMasterTrapdoor {
    fn encode(&self, w: &mut Writer) {
        w.u8(TAG);
        self.params.write(w);
        self.z.write(w);
        for m in &self.coeffs {
            m.write(w);
        }
    }
}

impl Decode for LweMasterTrapdoor {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        r.tag(TAG)?;
        let params = LweParams::read(r)?;
        let z = ZqMatrix::read(r, params.d, params.w, &params.q)?;
        let coeffs = (1..params.t)
            .map(|_| ZqMatrix::read(r, params.d, params.w, &params.q))
            .collect::<Result<_>>()?;
        Ok(Self { params, z, coeffs })
    }
}

impl Encode for LweSharedTrapdoor {
    fn encode(&self, w: &mut Writer) {
        w.u8(TAG);
        self.params.write(w);
        w.u64(self.id);
        self.t.write(w);
    }
}

impl Decode for LweSharedTrapdoor {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        r.tag(TAG)?;
        let params = LweParams::read(r)?;
        let id = r.u64()?;
        check_id(&params, id).map_err(|e| Error::Decode(e.to_string()))?;
        let t = ZqMatrix::read(r, params.d, params.w, &params.q)?;
        Ok(Self { params, id, t })
    }
}

impl Encode for LweImage {
    fn encode(&self, w: &mut Writer) {
        w.u8(TAG);
        self.params.write(w);
        write_vec(w, &self.a);
        write_vec(w, &self.y);
    }
}

impl Decode for LweImage {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        r.tag(TAG)?;
        let params = LweParams::read(r)?;
        let a = read_vec(r, params.d, &params.q)?;
        let y = read_vec(r, params.w, &params.q)?;
        Ok(Self { params, a, y })
    }
}

impl Encode for LweShare {
    fn encode(&self, w: &mut Writer) {
        w.u8(TAG);
        w.u64(self.id);
        w.uint(&self.scale);
        write_vec(w, &self.delta);
    }
}

impl Decode for LweShare {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        r.tag(TAG)?;
        let id = r.u64()?;
        let scale = r.uint()?;
        let n = r.count(4)?;
        let delta = (0..n).map(|_| r.uint()).collect::<Result<_>>()?;
        Ok(Self { id, delta, scale })
    }
}

/// The lattice function as a threshold trapdoor function.
#[derive(Debug, Clone)]
pub struct LweTtdf {
    params: Arc<LweParams>,
}

impl LweTtdf {
    pub fn new(params: Arc<LweParams>) -> Self {
        Self { params }
    }

    pub fn params(&self) -> &Arc<LweParams> {
        &self.params
    }
}

impl Ttdf for LweTtdf {
    const TAG: u8 = TAG;
    const NAME: &'static str = "lwe";

    type Index = LweIndex;
    type MasterTrapdoor = LweMasterTrapdoor;
    type SharedTrapdoor = LweSharedTrapdoor;
    type Image = LweImage;
    type Share = LweShare;
    type Preimage = BitString;

    fn metadata(ek: &LweIndex) -> Metadata {
        let p = &ek.params;
        Metadata {
            input_bits: p.h,
            encoded_bits: p.h,
            lossiness: p.lossiness,
            id_max: p.n,
            n: p.n,
            t: p.t,
        }
    }

    fn gen<R: RngCore + CryptoRng + ?Sized>(&self, rng: &mut R) -> Result<(LweIndex, LweMasterTrapdoor)> {
        samp(&self.params, Mode::Injective, rng)
    }

    fn share(mtd: &LweMasterTrapdoor, id: u64) -> Result<LweSharedTrapdoor> {
        mtd.share(id)
    }

    fn sample<R: RngCore + CryptoRng + ?Sized>(ek: &LweIndex, rng: &mut R) -> Result<(BitString, LweImage)> {
        let x = BitString::random(ek.params.h, rng);
        let y = ek.eval(&x)?;
        Ok((x, y))
    }

    fn invert_share<R: RngCore + CryptoRng + ?Sized>(
        td: &LweSharedTrapdoor,
        image: &LweImage,
        rng: &mut R,
    ) -> Result<LweShare> {
        td.invert_share(image, rng)
    }

    fn combine_inv(
        ek: &LweIndex,
        x: &BitString,
        _image: &LweImage,
        shares: &[LweShare],
        target: u64,
    ) -> Result<LweShare> {
        combine_inv(ek, x, shares, target)
    }

    fn combine(shares: &[LweShare], image: &LweImage) -> Result<BitString> {
        combine(shares, image)
    }

    fn preimage_bits(_image: &LweImage, x: &BitString) -> BitString {
        x.clone()
    }

    fn share_id(share: &LweShare) -> u64 {
        share.id
    }

    fn trapdoor_id(td: &LweSharedTrapdoor) -> u64 {
        td.id
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::centered_lift;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn toy() -> Arc<LweParams> {
        LweParams::from_shape(64, 40, 17, 4, 3).unwrap()
    }

    fn rng(seed: u64) -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(seed)
    }

    #[test]
    fn message_matrix_structure() {
        let p = toy();
        let m = message_matrix(&p, Mode::Injective);
        let pw = scaled_powers(&p);
        for i in 0..p.h() {
            for j in 0..p.w() {
                let expect = if i / p.l() == j { pw[i % p.l()].clone() } else { BigUint::zero() };
                assert_eq!(m.get(i, j), &expect);
            }
        }
        assert!(message_matrix(&p, Mode::Lossy).is_zero());
    }

    #[test]
    fn modes_differ_by_the_message_matrix() {
        let p = toy();
        let q = p.q().clone();
        let mut r = rng(1);
        let a = ZqMatrix::random(p.h(), p.d(), &q, &mut r);
        let mtd = LweMasterTrapdoor::random(&p, &mut r);
        let e = ZqMatrix::random(p.h(), p.w(), &q, &mut r);
        let inj = LweIndex::encrypt_matrix(Mode::Injective, a.clone(), &mtd, &e).unwrap();
        let lossy = LweIndex::encrypt_matrix(Mode::Lossy, a, &mtd, &e).unwrap();
        let m = message_matrix(&p, Mode::Injective);
        assert_eq!(lossy.c().add(&m, &q), *inj.c());

        // Z = 0, E = 0: C is exactly the message matrix.
        let zero = LweMasterTrapdoor::from_parts(
            &p,
            ZqMatrix::zeros(p.d(), p.w()),
            vec![ZqMatrix::zeros(p.d(), p.w()); 2],
        )
        .unwrap();
        let a = ZqMatrix::random(p.h(), p.d(), &q, &mut r);
        let ek = LweIndex::encrypt_matrix(Mode::Injective, a, &zero, &ZqMatrix::zeros(p.h(), p.w()))
            .unwrap();
        assert_eq!(*ek.c(), m);
    }

    #[test]
    fn shares_interpolate_to_z() {
        let p = toy();
        let q = p.q().clone();
        let mut r = rng(2);
        let mtd = LweMasterTrapdoor::random(&p, &mut r);
        let ids = [1u64, 3, 4];
        let ts: Vec<_> = ids.iter().map(|&id| mtd.share(id).unwrap()).collect();
        let l = crate::arith::lagrange_at(&ids, 0, &q).unwrap();
        for i in 0..p.d() {
            for j in 0..p.w() {
                let v = ts.iter().zip(&l).fold(q.zero(), |acc, (t, c)| {
                    &acc + &(c * &q.elem(t.matrix().get(i, j).clone()))
                });
                assert_eq!(v.value(), mtd.z().get(i, j));
            }
        }
        assert!(matches!(mtd.share(5), Err(Error::IdentityOutOfRange { id: 5, max: 4 })));
        assert_eq!(mtd.share(0).unwrap_err(), Error::ZeroIdentity);

        let constant = LweMasterTrapdoor::from_parts(
            &p,
            mtd.z().clone(),
            vec![ZqMatrix::zeros(p.d(), p.w()); 2],
        )
        .unwrap();
        assert_eq!(constant.share(2).unwrap().matrix(), mtd.z());
    }

    #[test]
    fn eval_examples() {
        let p = toy();
        let mut r = rng(3);
        let (ek, _) = samp(&p, Mode::Injective, &mut r).unwrap();
        let zero = ek.eval(&BitString::zeros(p.h())).unwrap();
        assert!(zero.a().iter().chain(zero.y()).all(Zero::is_zero));
        let mut e3 = vec![false; p.h()];
        e3[3] = true;
        let img = ek.eval(&e3.into()).unwrap();
        assert_eq!(img.a(), ek.a().row(3));
        assert_eq!(img.y(), ek.c().row(3));
        assert!(matches!(
            ek.eval(&BitString::zeros(3)),
            Err(Error::LengthMismatch { expected: 40, got: 3 })
        ));

        // Disjoint supports add.
        let x = BitString::from_u64(0b1010, 40);
        let x2 = BitString::from_u64(0b0101 << 8, 40);
        let q = p.q().clone();
        let sum = ek.eval(&(&x ^ &x2)).unwrap();
        let (a, b) = (ek.eval(&x).unwrap(), ek.eval(&x2).unwrap());
        for i in 0..p.d() {
            assert_eq!(sum.a()[i], q.add_raw(&a.a()[i], &b.a()[i]));
        }
    }

    #[test]
    fn noiseless_shares_are_exact_inner_products() {
        let p = toy().with_noise(Noise::Zero);
        let mut r = rng(4);
        let (ek, mtd) = samp(&p, Mode::Injective, &mut r).unwrap();
        let td = mtd.share(2).unwrap();
        let x = BitString::random(p.h(), &mut r);
        let img = ek.eval(&x).unwrap();
        let sh = td.invert_share(&img, &mut r).unwrap();
        assert_eq!(sh.delta, td.inner_products(img.a()).unwrap());
        for i in 0..p.w() {
            let col = td.matrix().column(i);
            let direct = img
                .a()
                .iter()
                .zip(&col)
                .fold(BigUint::zero(), |acc, (a, b)| acc + a * b)
                % p.q().value();
            assert_eq!(sh.delta[i], direct);
        }
    }

    #[test]
    fn zero_image_shares_are_small_noise() {
        let p = toy();
        let mut r = rng(5);
        let (ek, mtd) = samp(&p, Mode::Injective, &mut r).unwrap();
        let td = mtd.share(1).unwrap();
        let img = ek.eval(&BitString::zeros(p.h())).unwrap();
        let a = td.invert_share(&img, &mut r).unwrap();
        let b = td.invert_share(&img, &mut r).unwrap();
        let bound = BigInt::from(1000);
        for (x, y) in a.delta.iter().zip(&b.delta) {
            assert!(p.q().lift_raw(x).abs() < bound);
            assert!(p.q().lift_raw(y).abs() < bound);
        }
        assert_ne!(a, b);
    }

    #[test]
    fn round_trip_and_decoder_agreement() {
        let p = toy();
        let mut r = rng(6);
        let (ek, mtd) = samp(&p, Mode::Injective, &mut r).unwrap();
        let tds: Vec<_> = (1..=4).map(|id| mtd.share(id).unwrap()).collect();
        for trial in 0..20 {
            let x = if trial == 0 {
                BitString::zeros(p.h())
            } else {
                BitString::random(p.h(), &mut r)
            };
            let img = ek.eval(&x).unwrap();
            let shares: Vec<_> = tds[1..]
                .iter()
                .map(|td| td.invert_share(&img, &mut r).unwrap())
                .collect();
            assert_eq!(combine(&shares, &img).unwrap(), x);
            let blocks = block_values(&p, &x);
            for (res, m) in combine_residues(&shares, &img).unwrap().iter().zip(blocks) {
                assert_eq!(decode_closed_form(&p, res), m);
                assert_eq!(decode_argmin(&p, res).0, m);
            }
        }
    }

    #[test]
    fn combine_rejections() {
        let p = toy();
        let mut r = rng(7);
        let (ek, mtd) = samp(&p, Mode::Injective, &mut r).unwrap();
        let x = BitString::random(p.h(), &mut r);
        let img = ek.eval(&x).unwrap();
        let mut shares: Vec<_> = (1..=3)
            .map(|id| mtd.share(id).unwrap().invert_share(&img, &mut r).unwrap())
            .collect();
        assert!(matches!(
            combine(&shares[..2], &img),
            Err(Error::WrongCount { expected: 3, got: 2 })
        ));
        let mut dup = shares.clone();
        dup[2] = dup[0].clone();
        assert_eq!(combine(&dup, &img), Err(Error::DuplicateNode(1)));

        // Block 0 of the zero image pushed onto the symbol 2^l, which has
        // no l-bit encoding.
        let zero = ek.eval(&BitString::zeros(p.h())).unwrap();
        let zshares: Vec<_> = (1..=3)
            .map(|id| mtd.share(id).unwrap().invert_share(&zero, &mut r).unwrap())
            .collect();
        let mut junk = zero.clone();
        let (qi, pi) = (BigInt::from(p.q().value().clone()), BigInt::from(p.p()));
        junk.y[0] = round_half_up(&(&qi << p.l()), &pi).to_biguint().unwrap();
        assert_eq!(combine(&zshares, &junk), Err(Error::NotInImage));
        assert_eq!(combine(&zshares, &zero).unwrap(), BitString::zeros(p.h()));

        shares[0].scale = BigUint::from(2u8);
        assert!(matches!(combine(&shares, &img), Err(Error::ScaleMismatch(_))));
    }

    #[test]
    fn combine_inv_noiseless_matches_direct_share() {
        let p = toy().with_noise(Noise::Zero);
        let q = p.q().clone();
        let mut r = rng(8);
        let (ek, mtd) = samp(&p, Mode::Injective, &mut r).unwrap();
        let x = BitString::random(p.h(), &mut r);
        let img = ek.eval(&x).unwrap();
        let given: Vec<_> = [1u64, 4]
            .iter()
            .map(|&id| mtd.share(id).unwrap().invert_share(&img, &mut r).unwrap())
            .collect();
        let out = combine_inv(&ek, &x, &given, 2).unwrap();
        assert_eq!(out.scale, BigUint::from(6u8));
        let direct = mtd.share(2).unwrap().inner_products(img.a()).unwrap();
        assert_eq!(out.unscaled(&q).unwrap(), direct);
        assert_eq!(
            combine_inv(&ek, &x, &given, 4),
            Err(Error::TargetCollision(4))
        );
        assert!(matches!(combine(&[given[0].clone(), given[1].clone(), out], &img), Err(Error::ScaleMismatch(_))));
    }

    #[test]
    fn combine_inv_with_two_nodes() {
        // t = 2: nodes {0, id} only.
        let p = LweParams::from_shape(32, 12, 17, 3, 2).unwrap().with_noise(Noise::Zero);
        let q = p.q().clone();
        let mut r = rng(9);
        let (ek, mtd) = samp(&p, Mode::Injective, &mut r).unwrap();
        let x = BitString::random(p.h(), &mut r);
        let img = ek.eval(&x).unwrap();
        let given = mtd.share(1).unwrap().invert_share(&img, &mut r).unwrap();
        let out = combine_inv(&ek, &x, &[given], 3).unwrap();
        assert_eq!(
            out.unscaled(&q).unwrap(),
            mtd.share(3).unwrap().inner_products(img.a()).unwrap()
        );
    }

    #[test]
    fn lossy_noiseless_image_depends_only_on_xa() {
        let p = toy().with_noise(Noise::Zero);
        let q = p.q().clone();
        let mut r = rng(10);
        // Rows 0 and 1 of A equal, so x = e_0 and x' = e_1 share xA.
        let mut rows: Vec<Vec<BigUint>> =
            (0..p.h()).map(|_| ZqMatrix::random(1, p.d(), &q, &mut r).row(0).to_vec()).collect();
        rows[1] = rows[0].clone();
        let rows_a = ZqMatrix::from_rows(rows, &q).unwrap();
        let mtd = LweMasterTrapdoor::random(&p, &mut r);
        let ek = LweIndex::encrypt_matrix(Mode::Lossy, rows_a, &mtd, &ZqMatrix::zeros(p.h(), p.w()))
            .unwrap();
        let x = BitString::from_u64(1 << 39, 40);
        let x2 = BitString::from_u64(1 << 38, 40);
        assert_ne!(x, x2);
        assert_eq!(ek.eval(&x).unwrap(), ek.eval(&x2).unwrap());
    }

    #[test]
    fn noise_differs_only_slightly_between_calls() {
        let p = toy();
        let mut r = rng(11);
        let (ek, mtd) = samp(&p, Mode::Injective, &mut r).unwrap();
        let td = mtd.share(2).unwrap();
        let img = ek.eval(&BitString::random(p.h(), &mut r)).unwrap();
        let a = td.invert_share(&img, &mut r).unwrap();
        let b = td.invert_share(&img, &mut r).unwrap();
        let q = p.q().clone();
        let qa = num_traits::ToPrimitive::to_f64(q.value()).unwrap() * p.alpha();
        for (x, y) in a.delta.iter().zip(&b.delta) {
            let diff = centered_lift(&q.elem(q.sub_raw(x, y)));
            assert!(diff.abs().to_f64().unwrap() <= 8.0 * qa);
        }
    }

    #[test]
    fn derived_scale_bounded_over_random_node_sets() {
        let mut r = rng(12);
        use rand::Rng;
        for _ in 0..200 {
            let n: u64 = r.random_range(2..=8);
            let t: usize = r.random_range(2..=n as usize);
            let mut ids: Vec<u64> = (1..=n).collect();
            rand::seq::SliceRandom::shuffle(ids.as_mut_slice(), &mut r);
            let target = ids.pop().unwrap();
            let mut nodes = vec![0u64];
            nodes.extend(&ids[..t - 1]);
            let sl = lagrange_cleared(&nodes, target, n).unwrap();
            let nf = factorial(n);
            assert!(sl.scale <= &nf * &nf, "{nodes:?} -> {target}");
        }
    }

    #[test]
    fn objects_round_trip() {
        let p = toy();
        let mut r = rng(13);
        let (ek, mtd) = samp(&p, Mode::Injective, &mut r).unwrap();
        let td = mtd.share(3).unwrap();
        let img = ek.eval(&BitString::random(p.h(), &mut r)).unwrap();
        let sh = td.invert_share(&img, &mut r).unwrap();
        assert_eq!(LweIndex::from_bytes(&ek.to_bytes()).unwrap(), ek);
        assert_eq!(LweMasterTrapdoor::from_bytes(&mtd.to_bytes()).unwrap(), mtd);
        assert_eq!(LweSharedTrapdoor::from_bytes(&td.to_bytes()).unwrap(), td);
        assert_eq!(LweImage::from_bytes(&img.to_bytes()).unwrap(), img);
        assert_eq!(LweShare::from_bytes(&sh.to_bytes()).unwrap(), sh);
        assert_eq!(ek.to_bytes()[0], TAG);
    }
}
