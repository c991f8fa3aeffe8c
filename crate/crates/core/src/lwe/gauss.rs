//! The rounded Gaussian error distribution `round(q * X) mod q` with `X`
//! normal of mean 0 and standard deviation `alpha / sqrt(2 pi)`.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_traits::FromPrimitive;
use rand::RngCore;
use rand_distr::{Distribution, Normal};

use crate::arith::{ModInt, Modulus};

use std::sync::Arc;

/// Error source for index sampling and partial inversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Noise {
    Gaussian { alpha: f64 },
    /// Every error term is zero; for noiseless fixtures.
    Zero,
}

impl Noise {
    pub fn sample<R: RngCore + ?Sized>(&self, q: &Arc<Modulus>, rng: &mut R) -> ModInt {
        match *self {
            Noise::Gaussian { alpha } => gauss_sample(alpha, q, rng),
            Noise::Zero => q.zero(),
        }
    }
}

/// One draw from the error distribution. `alpha` must lie in `(0, 1)`.
pub fn gauss_sample<R: RngCore + ?Sized>(alpha: f64, q: &Arc<Modulus>, rng: &mut R) -> ModInt {
    assert!(alpha > 0.0 && alpha < 1.0, "alpha outside (0, 1)");
    let normal = Normal::new(0.0, alpha / (2.0 * PI).sqrt()).expect("finite deviation");
    let x: f64 = normal.sample(rng);
    let qf = num_traits::ToPrimitive::to_f64(q.value()).expect("modulus fits f64 range");
    let v = BigInt::from_f64((qf * x + 0.5).floor()).expect("finite sample");
    q.from_signed(&v)
}
