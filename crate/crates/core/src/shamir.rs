//! (n, t) threshold secret sharing over a prime field.

use std::sync::Arc;

use rand::RngCore;

use crate::arith::{lagrange_at, poly_eval, ModInt, Modulus};
use crate::error::{Error, Result};

/// A secret together with the random coefficients of its sharing
/// polynomial `p(x) = secret + a_1 x + ... + a_{t-1} x^{t-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SharingState {
    secret: ModInt,
    coeffs: Vec<ModInt>,
    n: u64,
    t: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SharePoint {
    pub id: u64,
    pub value: ModInt,
}

/// Checks `2 <= t <= n < modulus`.
pub fn check_threshold(n: u64, t: usize, modulus: &Modulus) -> Result<()> {
    if t < 2 || t as u64 > n || &num_bigint::BigUint::from(n) >= modulus.value() {
        return Err(Error::BadThreshold { n, t });
    }
    Ok(())
}

impl SharingState {
    pub fn new<R: RngCore + ?Sized>(secret: ModInt, n: u64, t: usize, rng: &mut R) -> Result<Self> {
        check_threshold(n, t, secret.modulus())?;
        let q = Arc::clone(secret.modulus());
        let coeffs = (1..t).map(|_| q.random(rng)).collect();
        Ok(Self {
            secret,
            coeffs,
            n,
            t,
        })
    }

    /// A sharing with explicit coefficients `a_1..a_{t-1}`.
    pub fn from_coefficients(secret: ModInt, coeffs: Vec<ModInt>, n: u64) -> Result<Self> {
        let t = coeffs.len() + 1;
        check_threshold(n, t, secret.modulus())?;
        if coeffs.iter().any(|c| c.modulus() != secret.modulus()) {
            return Err(Error::ModulusMismatch);
        }
        Ok(Self {
            secret,
            coeffs,
            n,
            t,
        })
    }

    pub fn secret(&self) -> &ModInt {
        &self.secret
    }

    pub fn coefficients(&self) -> &[ModInt] {
        &self.coeffs
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn modulus(&self) -> &Arc<Modulus> {
        self.secret.modulus()
    }

    /// `p(id)` without the identity-space check.
    pub(crate) fn eval_at(&self, id: u64) -> ModInt {
        let mut poly = Vec::with_capacity(self.t);
        poly.push(self.secret.clone());
        poly.extend(self.coeffs.iter().cloned());
        poly_eval(&poly, &self.modulus().elem(id)).expect("coefficients share one modulus")
    }

    /// The share of `id`, `p(id)`.
    pub fn share(&self, id: u64) -> Result<SharePoint> {
        if id == 0 {
            return Err(Error::ZeroIdentity);
        }
        if id > self.n {
            return Err(Error::IdentityOutOfRange { id, max: self.n });
        }
        Ok(SharePoint {
            id,
            value: self.eval_at(id),
        })
    }
}

/// Recovers `p(0)` from exactly `t` shares.
pub fn combine(points: &[SharePoint], t: usize) -> Result<ModInt> {
    if points.len() != t {
        return Err(Error::WrongCount {
            expected: t,
            got: points.len(),
        });
    }
    let first = points.first().ok_or(Error::WrongCount { expected: t, got: 0 })?;
    let q = Arc::clone(first.value.modulus());
    let ids: Vec<u64> = points.iter().map(|p| p.id).collect();
    let coeffs = lagrange_at(&ids, 0, &q)?;
    let mut acc = q.zero();
    for (l, p) in coeffs.iter().zip(points) {
        acc = acc.try_add(&l.try_mul(&p.value)?)?;
    }
    Ok(acc)
}

/// All `t`-subsets of `1..=n` in lexicographic order.
pub fn subsets(n: u64, t: usize) -> Vec<Vec<u64>> {
    fn go(start: u64, n: u64, t: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() == t {
            out.push(cur.clone());
            return;
        }
        for v in start..=n {
            cur.push(v);
            go(v + 1, n, t, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(1, n, t, &mut Vec::with_capacity(t), &mut out);
    out
}
