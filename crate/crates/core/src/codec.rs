//! Canonical binary encoding shared by every artifact.
//!
//! Unsigned integers are a 4-byte big-endian length followed by the
//! big-endian magnitude. Signed integers prepend a sign byte (0x00 for
//! non-negative, 0x01 for negative). Counts and dimensions are 4-byte
//! big-endian.

use num_bigint::{BigInt, BigUint, Sign};

use crate::error::{Error, Result};

pub trait Encode {
    fn encode(&self, w: &mut Writer);

    fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::default();
        self.encode(&mut w);
        w.into_bytes()
    }
}

pub trait Decode: Sized {
    fn decode(r: &mut Reader<'_>) -> Result<Self>;

    /// Decodes and rejects trailing bytes.
    fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let v = Self::decode(&mut r)?;
        r.finish()?;
        Ok(v)
    }
}

#[derive(Debug, Default)]
pub struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    pub fn into_bytes(self) -> Vec<u8> {
        self.buf
    }

    pub fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    pub fn u16(&mut self, v: u16) {
        self.buf.extend_from_slice(&v.to_be_bytes());
    }

    pub fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_be_bytes());
    }

    /// Dimensions and counts.
    pub fn len(&mut self, v: usize) {
        self.u32(u32::try_from(v).expect("length exceeds 32 bits"));
    }

    pub fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_be_bytes());
    }

    pub fn f64(&mut self, v: f64) {
        self.buf.extend_from_slice(&v.to_bits().to_be_bytes());
    }

    pub fn raw(&mut self, bytes: &[u8]) {
        self.buf.extend_from_slice(bytes);
    }

    pub fn bytes(&mut self, bytes: &[u8]) {
        self.len(bytes.len());
        self.raw(bytes);
    }

    pub fn uint(&mut self, v: &BigUint) {
        let mag = if v.bits() == 0 {
            Vec::new()
        } else {
            v.to_bytes_be()
        };
        self.bytes(&mag);
    }

    pub fn int(&mut self, v: &BigInt) {
        self.u8(u8::from(v.sign() == Sign::Minus));
        self.uint(v.magnitude());
    }
}

#[derive(Debug)]
pub struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Self { buf, pos: 0 }
    }

    pub fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    pub fn finish(&self) -> Result<()> {
        match self.remaining() {
            0 => Ok(()),
            n => Err(Error::Decode(format!("{n} trailing bytes"))),
        }
    }

    pub fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.remaining() < n {
            return Err(Error::Decode(format!(
                "needed {n} bytes at offset {}, {} left",
                self.pos,
                self.remaining()
            )));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        Ok(self.take(N)?.try_into().expect("length checked"))
    }

    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.array::<1>()?[0])
    }

    pub fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_be_bytes(self.array()?))
    }

    pub fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_be_bytes(self.array()?))
    }

    /// A 4-byte dimension or length field.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&mut self) -> Result<usize> {
        Ok(self.u32()? as usize)
    }

    /// A count of items that each occupy at least `min_item` bytes; rejects
    /// counts that cannot fit in the remaining input.
    pub fn count(&mut self, min_item: usize) -> Result<usize> {
        let n = self.len()?;
        if n.saturating_mul(min_item.max(1)) > self.remaining() {
            return Err(Error::Decode(format!("count {n} exceeds input")));
        }
        Ok(n)
    }

    pub fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_be_bytes(self.array()?))
    }

    pub fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_bits(self.u64()?))
    }

    pub fn bytes(&mut self) -> Result<&'a [u8]> {
        let n = self.len()?;
        self.take(n)
    }

    pub fn uint(&mut self) -> Result<BigUint> {
        Ok(BigUint::from_bytes_be(self.bytes()?))
    }

    pub fn int(&mut self) -> Result<BigInt> {
        let sign = match self.u8()? {
            0 => Sign::Plus,
            1 => Sign::Minus,
            b => return Err(Error::Decode(format!("bad sign byte {b:#04x}"))),
        };
        Ok(BigInt::from_biguint(sign, self.uint()?))
    }

    pub fn tag(&mut self, expected: u8) -> Result<()> {
        let got = self.u8()?;
        if got != expected {
            return Err(Error::SchemeMismatch { expected, got });
        }
        Ok(())
    }
}
