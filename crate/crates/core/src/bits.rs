use std::fmt;
use std::ops::{BitXor, Index};

use rand::RngCore;

use crate::codec::{Decode, Encode, Reader, Writer};
use crate::error::{Error, Result};

/// A fixed-length string of bits.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString(Vec<bool>);

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.0.iter().map(|&b| if b { '1' } else { '0' }).collect();
        write!(f, "BitString({s})")
    }
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        Self(vec![false; len])
    }

    pub fn random<R: RngCore + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut bytes = vec![0u8; len.div_ceil(8)];
        rng.fill_bytes(&mut bytes);
        Self::from_packed(&bytes, len)
    }

    /// Parses a string of `0`/`1` characters.
    pub fn parse(s: &str) -> Option<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(Self)
    }

    /// The low `len` bits of `v`, most significant first.
    pub fn from_u64(v: u64, len: usize) -> Self {
        Self((0..len).rev().map(|i| i < 64 && (v >> i) & 1 == 1).collect())
    }

    /// Interprets the bits as a big-endian unsigned integer.
    pub fn to_u64(&self) -> u64 {
        self.0.iter().fold(0u64, |acc, &b| (acc << 1) | u64::from(b))
    }

    /// The first `len` bits of `bytes`, MSB-first.
    pub fn from_packed(bytes: &[u8], len: usize) -> Self {
        Self(
            (0..len)
                .map(|i| bytes[i / 8] >> (7 - i % 8) & 1 == 1)
                .collect(),
        )
    }

    /// Packs MSB-first, zero-padding the final byte.
    pub fn to_packed(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.0.len().div_ceil(8)];
        for (i, &b) in self.0.iter().enumerate() {
            if b {
                out[i / 8] |= 0x80 >> (i % 8);
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().copied()
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Self(v)
    }

    pub fn try_xor(&self, other: &BitString) -> Result<BitString> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        Ok(Self(self.0.iter().zip(&other.0).map(|(a, b)| a ^ b).collect()))
    }

    pub fn check_len(&self, expected: usize) -> Result<()> {
        if self.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                got: self.len(),
            });
        }
        Ok(())
    }
}

impl From<Vec<bool>> for BitString {
    fn from(v: Vec<bool>) -> Self {
        Self(v)
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl Index<usize> for BitString {
    type Output = bool;

    fn index(&self, i: usize) -> &bool {
        &self.0[i]
    }
}

impl BitXor for &BitString {
    type Output = BitString;

    /// Panics on a length mismatch.
    fn bitxor(self, rhs: &BitString) -> BitString {
        self.try_xor(rhs).expect("length mismatch")
    }
}

impl Encode for BitString {
    fn encode(&self, w: &mut Writer) {
        w.len(self.len());
        w.raw(&self.to_packed());
    }
}

impl Decode for BitString {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        let len = r.len()?;
        let bytes = r.take(len.div_ceil(8))?;
        let bits = Self::from_packed(bytes, len);
        if bits.to_packed() != bytes {
            return Err(Error::Decode("nonzero padding bits".into()));
        }
        Ok(bits)
    }
}
