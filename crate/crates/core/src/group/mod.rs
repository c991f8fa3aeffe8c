//! Prime-order subgroups of `Z_M^*`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{Num, One, Zero};
use rand::RngCore;

use crate::arith::{is_probable_prime, random_below, ModInt, Modulus};
use crate::codec::{Decode, Encode, Reader, Writer};
use crate::error::{Error, Result};

const LAMBDA_128: &str = include_str!("lambda128.hex");
const LAMBDA_256: &str = include_str!("lambda256.hex");
const LAMBDA_512: &str = include_str!("lambda512.hex");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    Toy,
    L128,
    L256,
    L512,
}

impl Level {
    pub const ALL: [Level; 4] = [Level::Toy, Level::L128, Level::L256, Level::L512];

    /// Bit length of the group order.
    pub fn order_bits(self) -> u64 {
        match self {
            Level::Toy => 4,
            Level::L128 => 256,
            Level::L256 => 512,
            Level::L512 => 1024,
        }
    }

    /// Bit length of the ambient modulus.
    pub fn modulus_bits(self) -> u64 {
        match self {
            Level::Toy => 5,
            Level::L128 => 3072,
            Level::L256 => 7680,
            Level::L512 => 15360,
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Toy => "toy",
            Level::L128 => "128",
            Level::L256 => "256",
            Level::L512 => "512",
        })
    }
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "toy" => Ok(Level::Toy),
            "128" => Ok(Level::L128),
            "256" => Ok(Level::L256),
            "512" => Ok(Level::L512),
            other => Err(Error::InconsistentParams(format!(
                "unknown security level {other:?}"
            ))),
        }
    }
}

/// A cyclic group of prime order `p` generated by `g` inside `Z_M^*`.
#[derive(Clone, PartialEq, Eq)]
pub struct GroupParams {
    order: Arc<Modulus>,
    modulus: BigUint,
    generator: BigUint,
}

impl fmt::Debug for GroupParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "GroupParams(|p| = {}, |M| = {})",
            self.order.bits(),
            self.modulus.bits()
        )
    }
}

/// An element of the order-`p` subgroup, stored as its residue mod `M`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupElem(BigUint);

impl GroupElem {
    /// Wraps a residue without the membership check.
    pub(crate) fn unchecked(v: BigUint) -> Self {
        Self(v)
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }
}

fn parse_builtin(text: &str) -> GroupParams {
    let mut lines = text.lines().map(|l| BigUint::from_str_radix(l.trim(), 16).expect("hex"));
    let mut next = || lines.next().expect("three lines");
    let (p, m, g) = (next(), next(), next());
    GroupParams {
        order: Modulus::trusted(p),
        modulus: m,
        generator: g,
    }
}

fn builtin(level: Level) -> GroupParams {
    match level {
        Level::Toy => GroupParams {
            order: Modulus::trusted(BigUint::from(11u8)),
            modulus: BigUint::from(23u8),
            generator: BigUint::from(2u8),
        },
        Level::L128 => parse_builtin(LAMBDA_128),
        Level::L256 => parse_builtin(LAMBDA_256),
        Level::L512 => parse_builtin(LAMBDA_512),
    }
}

/// The fixed group for a security level.
pub fn group_gen(level: Level) -> Arc<GroupParams> {
    Arc::new(builtin(level))
}

impl GroupParams {
    /// Validates explicit parameters: `p` prime, `p | M - 1`, `g != 1`,
    /// `g^p = 1`.
    pub fn new(order: BigUint, modulus: BigUint, generator: BigUint) -> Result<Arc<Self>> {
        if let Some(level) = Level::ALL.into_iter().find(|&l| {
            let b = builtin(l);
            b.order.value() == &order && b.modulus == modulus && b.generator == generator
        }) {
            return Ok(group_gen(level));
        }
        let order = Modulus::new(order)?;
        if modulus <= BigUint::from(2u8) {
            return Err(Error::InconsistentParams("modulus too small".into()));
        }
        if !((&modulus - 1u8) % order.value()).is_zero() {
            return Err(Error::InconsistentParams("p does not divide M - 1".into()));
        }
        if generator.is_zero()
            || generator >= modulus
            || generator.is_one()
            || !generator.modpow(order.value(), &modulus).is_one()
        {
            return Err(Error::InconsistentParams(
                "g does not generate the order-p subgroup".into(),
            ));
        }
        Ok(Arc::new(Self {
            order,
            modulus,
            generator,
        }))
    }

    /// Samples fresh parameters: a prime `p` of `order_bits` bits and a
    /// prime `M = kp + 1` of `modulus_bits` bits.
    pub fn generate<R: RngCore + ?Sized>(
        order_bits: u64,
        modulus_bits: u64,
        rng: &mut R,
    ) -> Result<Arc<Self>> {
        if order_bits < 3 || modulus_bits <= order_bits {
            return Err(Error::InconsistentParams(
                "need 3 <= order bits < modulus bits".into(),
            ));
        }
        let p = random_prime(order_bits, rng);
        let lo = BigUint::one() << (modulus_bits - 1);
        let span = BigUint::one() << (modulus_bits - 1);
        loop {
            let base = &lo + random_below(rng, &span);
            let k = base / &p;
            let k = if k.is_odd() { k + 1u8 } else { k };
            let m = &k * &p + 1u8;
            if m.bits() != modulus_bits || !is_probable_prime(&m) {
                continue;
            }
            let exp = (&m - 1u8) / &p;
            let mut h = BigUint::from(2u8);
            loop {
                let g = h.modpow(&exp, &m);
                if !g.is_one() {
                    return Self::new(p, m, g);
                }
                h += 1u8;
            }
        }
    }

    pub fn order(&self) -> &Arc<Modulus> {
        &self.order
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    /// Width in bytes of a fixed-width element encoding.
    pub fn elem_bytes(&self) -> usize {
        self.modulus.bits().div_ceil(8) as usize
    }

    pub fn identity(&self) -> GroupElem {
        GroupElem(BigUint::one())
    }

    pub fn generator(&self) -> GroupElem {
        GroupElem(self.generator.clone())
    }

    pub fn random_exponent<R: RngCore + ?Sized>(&self, rng: &mut R) -> ModInt {
        self.order.random(rng)
    }

    pub fn exp(&self, a: &GroupElem, e: &ModInt) -> Result<GroupElem> {
        if e.modulus().as_ref() != self.order.as_ref() {
            return Err(Error::ParamsMismatch);
        }
        Ok(self.exp_raw(a, e.value()))
    }

    pub(crate) fn exp_raw(&self, a: &GroupElem, e: &BigUint) -> GroupElem {
        GroupElem(a.0.modpow(e, &self.modulus))
    }

    pub fn exp_g(&self, e: &ModInt) -> Result<GroupElem> {
        self.exp(&self.generator(), e)
    }

    pub fn mul(&self, a: &GroupElem, b: &GroupElem) -> GroupElem {
        GroupElem((&a.0 * &b.0) % &self.modulus)
    }

    pub fn inv(&self, a: &GroupElem) -> GroupElem {
        // a^(p-1) = a^-1 inside the order-p subgroup.
        self.exp_raw(a, &(self.order.value() - 1u8))
    }

    pub fn div(&self, a: &GroupElem, b: &GroupElem) -> GroupElem {
        self.mul(a, &self.inv(b))
    }

    pub fn contains(&self, v: &BigUint) -> bool {
        !v.is_zero() && v < &self.modulus && v.modpow(self.order.value(), &self.modulus).is_one()
    }

    /// Wraps a residue after the subgroup membership check.
    pub fn check(&self, v: BigUint) -> Result<GroupElem> {
        if self.contains(&v) {
            Ok(GroupElem(v))
        } else {
            Err(Error::NotInGroup)
        }
    }

    /// Big-endian residue left-padded to [`Self::elem_bytes`].
    pub fn fixed_bytes(&self, a: &GroupElem) -> Vec<u8> {
        let raw = a.0.to_bytes_be();
        let mut out = vec![0u8; self.elem_bytes() - raw.len()];
        out.extend_from_slice(&raw);
        out
    }

    pub fn write_elem(&self, w: &mut Writer, a: &GroupElem) {
        w.uint(&a.0);
    }

    pub fn read_elem(&self, r: &mut Reader<'_>) -> Result<GroupElem> {
        self.check(r.uint()?)
    }
}

fn random_prime<R: RngCore + ?Sized>(bits: u64, rng: &mut R) -> BigUint {
    let top = BigUint::one() << (bits - 1);
    loop {
        let c = (&top | random_below(rng, &top)) | BigUint::one();
        if is_probable_prime(&c) {
            return c;
        }
    }
}

impl Encode for GroupParams {
    fn encode(&self, w: &mut Writer) {
        w.uint(self.order.value());
        w.uint(&self.modulus);
        w.uint(&self.generator);
    }
}

impl Decode for Arc<GroupParams> {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        let (p, m, g) = (r.uint()?, r.uint()?, r.uint()?);
        GroupParams::new(p, m, g).map_err(|e| Error::Decode(format!("group parameters: {e}")))
    }
}
