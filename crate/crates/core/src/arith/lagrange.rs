use std::collections::HashSet;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{factorial, ModInt, Modulus};
use crate::error::{Error, Result};

/// Exact rational Lagrange coefficient, always in lowest terms with a
/// positive denominator.
pub type RationalCoeff = BigRational;

/// Lagrange coefficients with their denominators cleared into one scale:
/// `coeffs[v] / scale` is the exact coefficient of `nodes[v]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaledLagrange {
    pub coeffs: Vec<BigInt>,
    pub scale: BigUint,
    pub nodes: Vec<u64>,
    pub target: u64,
}

impl ScaledLagrange {
    pub fn rational(&self, v: usize) -> RationalCoeff {
        BigRational::new(self.coeffs[v].clone(), BigInt::from(self.scale.clone()))
    }

    /// `coeffs[v] * (multiple / scale)`, the coefficients rescaled to a
    /// common multiple of `scale`. `None` if `scale` does not divide it.
    pub fn rescaled(&self, multiple: &BigUint) -> Option<Vec<BigInt>> {
        let (factor, rem) = multiple.div_rem(&self.scale);
        if !rem.is_zero() {
            return None;
        }
        let factor = BigInt::from(factor);
        Some(self.coeffs.iter().map(|c| c * &factor).collect())
    }

    /// Coefficients reduced into a prime field, `coeffs[v] * scale^-1`.
    pub fn reduce(&self, modulus: &Arc<Modulus>) -> Result<Vec<ModInt>> {
        let inv = modulus.elem(self.scale.clone()).inv()?;
        Ok(self
            .coeffs
            .iter()
            .map(|c| &modulus.from_signed(c) * &inv)
            .collect())
    }
}

/// Field Lagrange coefficients `L_v` for interpolating at `target` from
/// values at `nodes`, reduced mod a prime.
pub fn lagrange_at(nodes: &[u64], target: u64, modulus: &Arc<Modulus>) -> Result<Vec<ModInt>> {
    let xs: Vec<ModInt> = nodes.iter().map(|&x| modulus.elem(x)).collect();
    let mut seen = HashSet::new();
    for (&node, x) in nodes.iter().zip(&xs) {
        if !seen.insert(x.value()) {
            return Err(Error::DuplicateNode(node));
        }
    }
    let target = modulus.elem(target);
    xs.iter()
        .enumerate()
        .map(|(v, xv)| {
            let mut num = modulus.one();
            let mut den = modulus.one();
            for (u, xu) in xs.iter().enumerate() {
                if u != v {
                    num = &num * &(&target - xu);
                    den = &den * &(xv - xu);
                }
            }
            Ok(&num * &den.inv()?)
        })
        .collect()
}

/// Exact Lagrange coefficients over the rationals with denominators
/// cleared into a single integer scale (the lcm of the denominators).
///
/// When every node lies in `[1, n]` and the target is 0, the bound
/// `(n!)^2 L_v ∈ Z` with `|(n!)^2 L_v| <= (n!)^3` is checked and a
/// violation reported as [`Error::BoundViolation`].
pub fn lagrange_cleared(nodes: &[u64], target: u64, n: u64) -> Result<ScaledLagrange> {
    let mut seen = HashSet::new();
    if let Some(&dup) = nodes.iter().find(|&&x| !seen.insert(x)) {
        return Err(Error::DuplicateNode(dup));
    }
    if let Some(&bad) = nodes.iter().chain([&target]).find(|&&x| x > n) {
        return Err(Error::IdentityOutOfRange { id: bad, max: n });
    }

    let t = BigInt::from(target);
    let rationals: Vec<BigRational> = nodes
        .iter()
        .enumerate()
        .map(|(v, &xv)| {
            let xv = BigInt::from(xv);
            let mut num = BigInt::one();
            let mut den = BigInt::one();
            for (u, &xu) in nodes.iter().enumerate() {
                if u != v {
                    let xu = BigInt::from(xu);
                    num *= &t - &xu;
                    den *= &xv - &xu;
                }
            }
            BigRational::new(num, den)
        })
        .collect();

    let scale = rationals
        .iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let coeffs: Vec<BigInt> = rationals
        .iter()
        .map(|r| r.numer() * (&scale / r.denom()))
        .collect();
    let scale = scale.to_biguint().expect("lcm of positive denominators");

    if !nodes.is_empty() && coeffs.iter().sum::<BigInt>() != BigInt::from(scale.clone()) {
        return Err(Error::BoundViolation(
            "coefficients do not interpolate the constant polynomial".into(),
        ));
    }

    if target == 0 && nodes.iter().all(|&x| (1..=n).contains(&x)) {
        let nf = factorial(n);
        let nf2 = &nf * &nf;
        let nf3 = &nf2 * &nf;
        let (factor, rem) = nf2.div_rem(&scale);
        if !rem.is_zero() {
            return Err(Error::BoundViolation(format!(
                "scale {scale} does not divide (n!)^2 = {nf2}"
            )));
        }
        let factor = BigInt::from_biguint(Sign::Plus, factor);
        let limit = BigInt::from(nf3);
        for c in &coeffs {
            if (c * &factor).abs() > limit {
                return Err(Error::BoundViolation(format!(
                    "|(n!)^2 L| exceeds (n!)^3 for coefficient {c}/{scale}"
                )));
            }
        }
    }

    Ok(ScaledLagrange {
        coeffs,
        scale,
        nodes: nodes.to_vec(),
        target,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn vals(v: &[ModInt]) -> Vec<u64> {
        v.iter()
            .map(|x| x.value().iter_u64_digits().next().unwrap_or(0))
            .collect()
    }

    #[test]
    fn field_coefficients_mod_17() {
        let q = Modulus::from_u64(17).unwrap();
        assert_eq!(vals(&lagrange_at(&[1, 2, 3], 0, &q).unwrap()), [3, 14, 1]);
        assert_eq!(vals(&lagrange_at(&[1, 3], 0, &q).unwrap()), [10, 8]);
        assert_eq!(vals(&lagrange_at(&[5], 5, &q).unwrap()), [1]);
    }

    #[test]
    fn hand_check_two_node_interpolation() {
        // p(x) = 5 + 3x: p(1) = 8, p(3) = 14, and 10*8 + 8*14 = 192 = 5 mod 17.
        let q = Modulus::from_u64(17).unwrap();
        let l = lagrange_at(&[1, 3], 0, &q).unwrap();
        let s = &(&l[0] * &q.elem(8u8)) + &(&l[1] * &q.elem(14u8));
        assert_eq!(s, q.elem(5u8));
    }

    #[test]
    fn duplicates_detected_mod_q() {
        let q = Modulus::from_u64(17).unwrap();
        assert_eq!(lagrange_at(&[1, 2, 1], 0, &q), Err(Error::DuplicateNode(1)));
        assert_eq!(lagrange_at(&[1, 18], 0, &q), Err(Error::DuplicateNode(18)));
        assert_eq!(lagrange_cleared(&[2, 2], 0, 4), Err(Error::DuplicateNode(2)));
    }

    #[test]
    fn cleared_examples() {
        let s = lagrange_cleared(&[1, 2, 3], 0, 4).unwrap();
        assert_eq!((s.coeffs, s.scale), (ints(&[3, -3, 1]), BigUint::from(1u8)));

        let s = lagrange_cleared(&[1, 2, 4], 0, 4).unwrap();
        assert_eq!(s.coeffs, ints(&[8, -6, 1]));
        assert_eq!(s.scale, BigUint::from(3u8));
        assert_eq!(
            s.rational(0),
            BigRational::new(BigInt::from(8), BigInt::from(3))
        );
        // (4!)^2 * 8/3 = 1536 <= (4!)^3 = 13824
        let r = s.rescaled(&BigUint::from(576u32)).unwrap();
        assert_eq!(r[0], BigInt::from(1536));

        let s = lagrange_cleared(&[2], 2, 4).unwrap();
        assert_eq!((s.coeffs, s.scale), (ints(&[1]), BigUint::from(1u8)));
    }

    #[test]
    fn cleared_rejects_out_of_range() {
        assert!(matches!(
            lagrange_cleared(&[1, 5], 0, 4),
            Err(Error::IdentityOutOfRange { id: 5, max: 4 })
        ));
    }

    #[test]
    fn cleared_with_zero_node_and_nonzero_target() {
        // Nodes {0, 1}, target 2: p(2) = 2 p(1) - p(0).
        let s = lagrange_cleared(&[0, 1], 2, 4).unwrap();
        assert_eq!(s.coeffs, ints(&[-1, 2]));
        assert_eq!(s.scale, BigUint::one());
    }
}
