use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::RngCore;

use crate::arith::{random_below, Modulus};
use crate::codec::{Reader, Writer};
use crate::error::{Error, Result};

/// A dense row-major matrix of residues mod `q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZqMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigUint>,
}

impl ZqMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BigUint::zero(); rows * cols],
        }
    }

    pub fn random<R: RngCore + ?Sized>(rows: usize, cols: usize, q: &Modulus, rng: &mut R) -> Self {
        Self {
            rows,
            cols,
            data: (0..rows * cols).map(|_| random_below(rng, q.value())).collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> BigUint) -> Self {
        let mut f = f;
        let data = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        Self { rows, cols, data }
    }

    /// Entries must already be reduced.
    pub fn from_rows(rows: Vec<Vec<BigUint>>, q: &Modulus) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::LengthMismatch {
                    expected: cols,
                    got: row.len(),
                });
            }
            if row.iter().any(|v| v >= q.value()) {
                return Err(Error::InconsistentParams("matrix entry not reduced".into()));
            }
            data.extend(row);
        }
        Ok(Self { rows: r, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigUint {
        &self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[BigUint] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigUint> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// `self * other mod q`.
    pub fn mul(&self, other: &ZqMatrix, q: &Modulus) -> ZqMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        match q.bits() {
            0..=62 => self.mul_small(other, q),
            63..=124 => self.mul_double(other, q),
            _ => self.mul_big(other, q),
        }
    }

    fn mul_big(&self, other: &ZqMatrix, q: &Modulus) -> ZqMatrix {
        let mut out = ZqMatrix::zeros(self.rows, other.cols);
        let mut acc = vec![BigUint::zero(); other.cols];
        for i in 0..self.rows {
            acc.iter_mut().for_each(|a| a.set_zero());
            for (k, a) in self.row(i).iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (acc, b) in acc.iter_mut().zip(other.row(k)) {
                    *acc += a * b;
                }
            }
            for (j, a) in acc.iter().enumerate() {
                out.data[i * other.cols + j] = a % q.value();
            }
        }
        out
    }

    /// Word-sized product for `q < 2^62`: eight products below `2^124`
    /// fit a `u128` accumulator between reductions.
    fn mul_small(&self, other: &ZqMatrix, q: &Modulus) -> ZqMatrix {
        const CHUNK: usize = 8;
        let qv = q.value().to_u64().expect("small modulus");
        let words = |m: &ZqMatrix| -> Vec<u64> {
            m.data.iter().map(|v| v.to_u64().expect("reduced entry")).collect()
        };
        let (a, b) = (words(self), words(other));
        let cols = other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        let mut acc = vec![0u128; cols];
        for i in 0..self.rows {
            acc.iter_mut().for_each(|v| *v = 0);
            let row = &a[i * self.cols..(i + 1) * self.cols];
            for (k, &x) in row.iter().enumerate() {
                if x != 0 {
                    let brow = &b[k * cols..(k + 1) * cols];
                    for (s, &y) in acc.iter_mut().zip(brow) {
                        *s += u128::from(x) * u128::from(y);
                    }
                }
                if k % CHUNK == CHUNK - 1 {
                    acc.iter_mut().for_each(|v| *v %= u128::from(qv));
                }
            }
            data.extend(acc.iter().map(|v| BigUint::from((*v % u128::from(qv)) as u64)));
        }
        ZqMatrix {
            rows: self.rows,
            cols,
            data,
        }
    }

    /// Two-limb product for `q < 2^124`. Entries split into `b`-bit halves;
    /// the three partial sums stay in `u128` for `2^(127 - 2b)` terms and
    /// spill into a big accumulator after that.
    fn mul_double(&self, other: &ZqMatrix, q: &Modulus) -> ZqMatrix {
        let b = (q.bits() as u32).div_ceil(2);
        let mask = (1u128 << b) - 1;
        let chunk = 1usize << (127 - 2 * b).min(40);
        let split = |m: &ZqMatrix| -> Vec<(u64, u64)> {
            m.data
                .iter()
                .map(|v| {
                    let x = v.to_u128().expect("reduced entry");
                    ((x & mask) as u64, (x >> b) as u64)
                })
                .collect()
        };
        let (a, bm) = (split(self), split(other));
        let join = |s: &[u128; 3]| {
            (BigUint::from(s[2]) << (2 * b)) + (BigUint::from(s[1]) << b) + BigUint::from(s[0])
        };
        let cols = other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        let mut acc = vec![[0u128; 3]; cols];
        let mut spill = vec![BigUint::zero(); cols];
        for i in 0..self.rows {
            acc.iter_mut().for_each(|s| *s = [0; 3]);
            spill.iter_mut().for_each(Zero::set_zero);
            let row = &a[i * self.cols..(i + 1) * self.cols];
            for (k, &(xl, xh)) in row.iter().enumerate() {
                let brow = &bm[k * cols..(k + 1) * cols];
                for (s, &(yl, yh)) in acc.iter_mut().zip(brow) {
                    let (xl, xh, yl, yh) = (u128::from(xl), u128::from(xh), u128::from(yl), u128::from(yh));
                    s[0] += xl * yl;
                    s[1] += xl * yh + xh * yl;
                    s[2] += xh * yh;
                }
                if k % chunk == chunk - 1 {
                    for (big, s) in spill.iter_mut().zip(acc.iter_mut()) {
                        *big += join(s);
                        *s = [0; 3];
                    }
                }
            }
            data.extend(
                spill
                    .iter()
                    .zip(&acc)
                    .map(|(big, s)| (big + join(s)) % q.value()),
            );
        }
        ZqMatrix {
            rows: self.rows,
            cols,
            data,
        }
    }

    /// Entrywise `self + other mod q`.
    pub fn add(&self, other: &ZqMatrix, q: &Modulus) -> ZqMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        ZqMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| q.add_raw(a, b))
                .collect(),
        }
    }

    /// Entrywise `self + c * other mod q`.
    pub fn add_scaled(&self, other: &ZqMatrix, c: &BigUint, q: &Modulus) -> ZqMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        ZqMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| (a + c * b) % q.value())
                .collect(),
        }
    }

    /// `x * self` for a 0/1 row vector: the sum of the selected rows.
    pub fn select_rows(&self, x: impl Iterator<Item = bool>, q: &Modulus) -> Vec<BigUint> {
        let mut acc = vec![BigUint::zero(); self.cols];
        for (i, bit) in x.enumerate() {
            if bit {
                for (a, b) in acc.iter_mut().zip(self.row(i)) {
                    *a += b;
                }
            }
        }
        acc.into_iter().map(|a| a % q.value()).collect()
    }

    /// `<v, column j> mod q`.
    pub fn dot_column(&self, v: &[BigUint], j: usize, q: &Modulus) -> BigUint {
        let mut acc = BigUint::zero();
        for (i, a) in v.iter().enumerate() {
            acc += a * self.get(i, j);
        }
        acc % q.value()
    }

    pub(crate) fn write(&self, w: &mut Writer) {
        w.len(self.rows);
        w.len(self.cols);
        for v in &self.data {
            w.uint(v);
        }
    }

    pub(crate) fn read(r: &mut Reader<'_>, rows: usize, cols: usize, q: &Modulus) -> Result<Self> {
        let (rr, cc) = (r.len()?, r.len()?);
        if (rr, cc) != (rows, cols) {
            return Err(Error::Decode(format!(
                "matrix is {rr}x{cc}, expected {rows}x{cols}"
            )));
        }
        let data = (0..rows * cols)
            .map(|_| read_residue(r, q))
            .collect::<Result<_>>()?;
        Ok(Self { rows, cols, data })
    }
}

pub(crate) fn read_residue(r: &mut Reader<'_>, q: &Modulus) -> Result<BigUint> {
    let v = r.uint()?;
    if &v >= q.value() {
        return Err(Error::Decode("residue not reduced".into()));
    }
    Ok(v)
}
