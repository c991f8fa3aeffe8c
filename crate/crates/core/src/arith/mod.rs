//! Prime-field arithmetic over arbitrary-precision integers.
//!
//! A [`Modulus`] is verified prime once at construction and shared by
//! reference; [`ModInt`] values carry an `Arc` to their modulus so mixing
//! fields is detected.

mod lagrange;
mod prime;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::RngCore;

use crate::error::{Error, Result};

pub use lagrange::{lagrange_at, lagrange_cleared, RationalCoeff, ScaledLagrange};
pub use prime::{is_probable_prime, next_prime, MILLER_RABIN_ROUNDS};

/// An odd prime modulus.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Modulus {
    value: BigUint,
}

impl fmt::Debug for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Modulus({})", self.value)
    }
}

impl Modulus {
    /// Builds a modulus after a Miller-Rabin check.
    pub fn new(value: BigUint) -> Result<Arc<Self>> {
        if value <= BigUint::from(2u8) || !is_probable_prime(&value) {
            return Err(Error::NotPrime);
        }
        Ok(Arc::new(Self { value }))
    }

    pub fn from_u64(value: u64) -> Result<Arc<Self>> {
        Self::new(BigUint::from(value))
    }

    /// Skips the primality test. Only for values already proven prime.
    pub(crate) fn trusted(value: BigUint) -> Arc<Self> {
        Arc::new(Self { value })
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn bits(&self) -> u64 {
        self.value.bits()
    }

    pub fn elem(self: &Arc<Self>, v: impl Into<BigUint>) -> ModInt {
        ModInt {
            value: v.into() % &self.value,
            modulus: Arc::clone(self),
        }
    }

    pub fn from_signed(self: &Arc<Self>, v: &BigInt) -> ModInt {
        ModInt {
            value: self.reduce_signed(v),
            modulus: Arc::clone(self),
        }
    }

    pub fn zero(self: &Arc<Self>) -> ModInt {
        self.elem(0u8)
    }

    pub fn one(self: &Arc<Self>) -> ModInt {
        self.elem(1u8)
    }

    pub fn random<R: RngCore + ?Sized>(self: &Arc<Self>, rng: &mut R) -> ModInt {
        ModInt {
            value: random_below(rng, &self.value),
            modulus: Arc::clone(self),
        }
    }

    pub(crate) fn reduce_signed(&self, v: &BigInt) -> BigUint {
        let m = BigInt::from_biguint(Sign::Plus, self.value.clone());
        v.mod_floor(&m)
            .to_biguint()
            .expect("mod_floor by a positive modulus is non-negative")
    }

    /// `a + b mod q` on already-reduced representatives.
    pub(crate) fn add_raw(&self, a: &BigUint, b: &BigUint) -> BigUint {
        let s = a + b;
        if s >= self.value {
            s - &self.value
        } else {
            s
        }
    }

    pub(crate) fn sub_raw(&self, a: &BigUint, b: &BigUint) -> BigUint {
        if a >= b {
            a - b
        } else {
            &self.value - (b - a)
        }
    }

    pub(crate) fn mul_raw(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a * b) % &self.value
    }

    pub(crate) fn inv_raw(&self, a: &BigUint) -> Result<BigUint> {
        if a.is_zero() {
            return Err(Error::NotInvertible);
        }
        // Fermat: the modulus is prime.
        Ok(a.modpow(&(&self.value - 2u8), &self.value))
    }

    /// Representative in (-q/2, q/2].
    pub(crate) fn lift_raw(&self, a: &BigUint) -> BigInt {
        let half = &self.value >> 1u32;
        if a <= &half {
            BigInt::from(a.clone())
        } else {
            BigInt::from(a.clone()) - BigInt::from(self.value.clone())
        }
    }
}

/// A residue modulo a prime.
#[derive(Clone, PartialEq, Eq)]
pub struct ModInt {
    value: BigUint,
    modulus: Arc<Modulus>,
}

impl fmt::Debug for ModInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus.value)
    }
}

impl fmt::Display for ModInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl ModInt {
    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn into_value(self) -> BigUint {
        self.value
    }

    pub fn modulus(&self) -> &Arc<Modulus> {
        &self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    fn check(&self, other: &ModInt) -> Result<()> {
        if Arc::ptr_eq(&self.modulus, &other.modulus) || self.modulus == other.modulus {
            Ok(())
        } else {
            Err(Error::ModulusMismatch)
        }
    }

    pub fn try_add(&self, other: &ModInt) -> Result<ModInt> {
        self.check(other)?;
        Ok(self.with(self.modulus.add_raw(&self.value, &other.value)))
    }

    pub fn try_sub(&self, other: &ModInt) -> Result<ModInt> {
        self.check(other)?;
        Ok(self.with(self.modulus.sub_raw(&self.value, &other.value)))
    }

    pub fn try_mul(&self, other: &ModInt) -> Result<ModInt> {
        self.check(other)?;
        Ok(self.with(self.modulus.mul_raw(&self.value, &other.value)))
    }

    pub fn inv(&self) -> Result<ModInt> {
        Ok(self.with(self.modulus.inv_raw(&self.value)?))
    }

    pub fn pow(&self, e: &BigUint) -> ModInt {
        self.with(self.value.modpow(e, &self.modulus.value))
    }

    fn with(&self, value: BigUint) -> ModInt {
        ModInt {
            value,
            modulus: Arc::clone(&self.modulus),
        }
    }
}

impl Add for &ModInt {
    type Output = ModInt;

    /// Panics if the moduli differ; use [`ModInt::try_add`] otherwise.
    fn add(self, rhs: &ModInt) -> ModInt {
        self.try_add(rhs).expect("modulus mismatch")
    }
}

impl Sub for &ModInt {
    type Output = ModInt;

    fn sub(self, rhs: &ModInt) -> ModInt {
        self.try_sub(rhs).expect("modulus mismatch")
    }
}

impl Mul for &ModInt {
    type Output = ModInt;

    fn mul(self, rhs: &ModInt) -> ModInt {
        self.try_mul(rhs).expect("modulus mismatch")
    }
}

impl Neg for &ModInt {
    type Output = ModInt;

    fn neg(self) -> ModInt {
        self.with(self.modulus.sub_raw(&BigUint::zero(), &self.value))
    }
}

/// Horner evaluation of `coeffs[0] + coeffs[1] x + ...`.
pub fn poly_eval(coeffs: &[ModInt], x: &ModInt) -> Result<ModInt> {
    let (last, rest) = coeffs
        .split_last()
        .ok_or_else(|| Error::InconsistentParams("empty polynomial".into()))?;
    let mut acc = last.clone();
    for c in rest.iter().rev() {
        acc = acc.try_mul(x)?.try_add(c)?;
    }
    Ok(acc)
}

/// The representative `r` of `v` with `-q/2 < r <= q/2`.
pub fn centered_lift(v: &ModInt) -> BigInt {
    v.modulus.lift_raw(&v.value)
}

/// Uniform integer in `[0, bound)` by rejection sampling.
pub fn random_below<R: RngCore + ?Sized>(rng: &mut R, bound: &BigUint) -> BigUint {
    assert!(!bound.is_zero(), "empty range");
    if bound.is_one() {
        return BigUint::zero();
    }
    let bits = (bound - 1u8).bits();
    let nbytes = bits.div_ceil(8) as usize;
    let excess = (nbytes as u64) * 8 - bits;
    let mut buf = vec![0u8; nbytes];
    loop {
        rng.fill_bytes(&mut buf);
        buf[0] &= 0xffu8 >> excess;
        let v = BigUint::from_bytes_be(&buf);
        if &v < bound {
            return v;
        }
    }
}

/// `n!` as a big integer.
pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// `floor(num / den + 1/2)` for a positive denominator.
pub fn round_half_up(num: &BigInt, den: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    (num * &two + den).div_floor(&(den * &two))
}
