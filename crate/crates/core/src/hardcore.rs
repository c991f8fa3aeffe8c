//! Pairwise-independent hashing `h(x) = Mx ⊕ b` over GF(2), used as the
//! randomness extractor on trapdoor preimages.

use rand::{Rng, RngCore};

use crate::bits::BitString;
use crate::codec::{Decode, Encode, Reader, Writer};
use crate::error::{Error, Result};

/// Default statistical distance exponent: extraction is `2^-80` close to
/// uniform.
pub const DEFAULT_EPSILON_LOG2: usize = 80;

/// An affine GF(2) map from `in_bits` to `out_bits`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HashDesc {
    in_bits: usize,
    out_bits: usize,
    words_per_row: usize,
    /// Row-major, each row packed into `words_per_row` words, bit `j` of
    /// the row at `rows[j / 64] >> (j % 64)`.
    rows: Vec<u64>,
    offset: BitString,
}

impl HashDesc {
    /// A uniformly random matrix and offset.
    pub fn sample<R: RngCore + ?Sized>(in_bits: usize, out_bits: usize, rng: &mut R) -> Result<Self> {
        check_width(in_bits, out_bits)?;
        let matrix: Vec<BitString> = (0..out_bits)
            .map(|_| BitString::random(in_bits, rng))
            .collect();
        Self::from_parts(in_bits, &matrix, BitString::random(out_bits, rng))
    }

    /// A random Toeplitz matrix (constant along diagonals), described by
    /// `in_bits + out_bits - 1` random bits, plus a random offset.
    pub fn sample_toeplitz<R: RngCore + ?Sized>(
        in_bits: usize,
        out_bits: usize,
        rng: &mut R,
    ) -> Result<Self> {
        check_width(in_bits, out_bits)?;
        let diag: Vec<bool> = (0..(in_bits + out_bits).saturating_sub(1))
            .map(|_| rng.random())
            .collect();
        // Entry (i, j) depends only on i - j.
        let matrix: Vec<BitString> = (0..out_bits)
            .map(|i| (0..in_bits).map(|j| diag[i + in_bits - 1 - j]).collect())
            .collect();
        Self::from_parts(in_bits, &matrix, BitString::random(out_bits, rng))
    }

    /// Builds a hash from explicit matrix rows and offset.
    pub fn from_parts(in_bits: usize, matrix: &[BitString], offset: BitString) -> Result<Self> {
        let out_bits = matrix.len();
        check_width(in_bits, out_bits)?;
        offset.check_len(out_bits)?;
        let words_per_row = in_bits.div_ceil(64);
        let mut rows = vec![0u64; words_per_row * out_bits];
        for (i, row) in matrix.iter().enumerate() {
            row.check_len(in_bits)?;
            for (j, b) in row.iter().enumerate() {
                if b {
                    rows[i * words_per_row + j / 64] |= 1 << (j % 64);
                }
            }
        }
        Ok(Self {
            in_bits,
            out_bits,
            words_per_row,
            rows,
            offset,
        })
    }

    pub fn in_bits(&self) -> usize {
        self.in_bits
    }

    pub fn out_bits(&self) -> usize {
        self.out_bits
    }

    pub fn offset(&self) -> &BitString {
        &self.offset
    }

    pub fn entry(&self, i: usize, j: usize) -> bool {
        self.rows[i * self.words_per_row + j / 64] >> (j % 64) & 1 == 1
    }

    fn pack(&self, x: &BitString) -> Vec<u64> {
        let mut words = vec![0u64; self.words_per_row];
        for (j, b) in x.iter().enumerate() {
            if b {
                words[j / 64] |= 1 << (j % 64);
            }
        }
        words
    }

    /// `Mx` without the offset.
    pub fn linear(&self, x: &BitString) -> Result<BitString> {
        x.check_len(self.in_bits)?;
        let xw = self.pack(x);
        Ok((0..self.out_bits)
            .map(|i| {
                let row = &self.rows[i * self.words_per_row..(i + 1) * self.words_per_row];
                row.iter()
                    .zip(&xw)
                    .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
                    & 1
                    == 1
            })
            .collect())
    }

    pub fn eval(&self, x: &BitString) -> Result<BitString> {
        Ok(&self.linear(x)? ^ &self.offset)
    }
}

fn check_width(in_bits: usize, out_bits: usize) -> Result<()> {
    if out_bits > in_bits {
        return Err(Error::OutTooWide { in_bits, out_bits });
    }
    Ok(())
}

/// Largest output width `k - 2 * epsilon_log2` extractable from `k` bits of
/// min-entropy. Zero is returned at the boundary; callers needing output
/// must reject it.
pub fn extractor_width(k: usize, epsilon_log2: usize) -> Result<usize> {
    k.checked_sub(2 * epsilon_log2)
        .ok_or(Error::InsufficientEntropy { k, epsilon_log2 })
}

impl Encode for HashDesc {
    fn encode(&self, w: &mut Writer) {
        w.len(self.in_bits);
        w.len(self.out_bits);
        let matrix: BitString = (0..self.out_bits)
            .flat_map(|i| (0..self.in_bits).map(move |j| (i, j)))
            .map(|(i, j)| self.entry(i, j))
            .collect();
        w.raw(&matrix.to_packed());
        w.raw(&self.offset.to_packed());
    }
}

impl Decode for HashDesc {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        let in_bits = r.len()?;
        let out_bits = r.len()?;
        check_width(in_bits, out_bits).map_err(|e| Error::Decode(e.to_string()))?;
        let total = in_bits
            .checked_mul(out_bits)
            .filter(|&t| t / 8 <= r.remaining())
            .ok_or_else(|| Error::Decode("hash matrix exceeds input".into()))?;
        let packed = r.take(total.div_ceil(8))?;
        let matrix = BitString::from_packed(packed, total);
        if matrix.to_packed() != packed {
            return Err(Error::Decode("nonzero padding bits".into()));
        }
        let packed = r.take(out_bits.div_ceil(8))?;
        let offset = BitString::from_packed(packed, out_bits);
        if offset.to_packed() != packed {
            return Err(Error::Decode("nonzero padding bits".into()));
        }
        let rows: Vec<BitString> = (0..out_bits)
            .map(|i| matrix.bits()[i * in_bits..(i + 1) * in_bits].to_vec().into())
            .collect();
        Self::from_parts(in_bits, &rows, offset)
    }
}
