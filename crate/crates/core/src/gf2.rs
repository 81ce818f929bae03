//! Dense matrices over GF(2) with bit-packed rows.

use std::fmt;

use rand::Rng;

use crate::bits::{words_for, BitString};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self { rows, cols, stride, data: vec![0; rows * stride] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Entries i.i.d. uniform. Draws `rows * ceil(cols / 64)` words, row by row.
    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        let mut m = Self::zeros(rows, cols);
        for w in m.data.iter_mut() {
            *w = rng.gen();
        }
        m.clear_tails();
        m
    }

    pub fn from_rows(rows: &[BitString]) -> Result<Self> {
        let cols = rows.first().map_or(0, BitString::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::LengthMismatch { expected: cols, actual: r.len() });
            }
            m.row_mut(i).copy_from_slice(r.words());
        }
        Ok(m)
    }

    fn clear_tails(&mut self) {
        let rem = self.cols % 64;
        if rem != 0 && self.stride > 0 {
            let mask = (1u64 << rem) - 1;
            for r in 0..self.rows {
                self.data[r * self.stride + self.stride - 1] &= mask;
            }
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        (self.data[r * self.stride + c / 64] >> (c % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, bit: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        let w = &mut self.data[r * self.stride + c / 64];
        let mask = 1u64 << (c % 64);
        if bit {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    #[inline]
    fn row_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn row_bits(&self, r: usize) -> BitString {
        BitString::from_words(self.row(r).to_vec(), self.cols)
    }

    /// Row vector times matrix: `v · M`.
    pub fn left_mul(&self, v: &BitString) -> Result<BitString> {
        if v.len() != self.rows {
            return Err(Error::LengthMismatch { expected: self.rows, actual: v.len() });
        }
        let mut acc = vec![0u64; self.stride];
        for r in 0..self.rows {
            if v.get(r) {
                for (a, w) in acc.iter_mut().zip(self.row(r)) {
                    *a ^= w;
                }
            }
        }
        Ok(BitString::from_words(acc, self.cols))
    }

    /// Matrix times column vector: `M · x`.
    pub fn mul_vec(&self, x: &BitString) -> Result<BitString> {
        if x.len() != self.cols {
            return Err(Error::LengthMismatch { expected: self.cols, actual: x.len() });
        }
        let mut out = BitString::zeros(self.rows);
        for r in 0..self.rows {
            let parity = self
                .row(r)
                .iter()
                .zip(x.words())
                .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
                & 1;
            if parity == 1 {
                out.set(r, true);
            }
        }
        Ok(out)
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    let (dst, src) = (r * out.stride, c * other.stride);
                    for w in 0..out.stride {
                        out.data[dst + w] ^= other.data[src + w];
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    t.set(c, r, true);
                }
            }
        }
        t
    }

    /// The submatrix on the given rows and columns, in the order given.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> BitMatrix {
        let mut out = BitMatrix::zeros(rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                if self.get(r, c) {
                    out.set(i, j, true);
                }
            }
        }
        out
    }

    /// Rank over GF(2) by Gaussian elimination on a copy.
    pub fn rank(&self) -> usize {
        rank_of_rows(self.data.clone(), self.rows, self.cols, self.stride)
    }

    pub fn is_full_row_rank(&self) -> bool {
        self.rank() == self.rows
    }

    /// Row-major bit-packed export: each row padded to whole bytes, first
    /// column in the most significant bit.
    pub fn to_packed_bytes(&self) -> Vec<u8> {
        (0..self.rows).flat_map(|r| self.row_bits(r).to_bytes()).collect()
    }

    pub fn from_packed_bytes(bytes: &[u8], rows: usize, cols: usize) -> Result<Self> {
        let per_row = cols.div_ceil(8);
        if bytes.len() != rows * per_row {
            return Err(Error::LengthMismatch { expected: rows * per_row, actual: bytes.len() });
        }
        let row_bits = bytes
            .chunks(per_row.max(1))
            .take(rows)
            .map(|chunk| BitString::from_bytes(chunk, cols))
            .collect::<Result<Vec<_>>>()?;
        if rows == 0 {
            return Ok(Self::zeros(0, cols));
        }
        Self::from_rows(&row_bits)
    }
}

pub(crate) fn rank_of_rows(mut data: Vec<u64>, rows: usize, cols: usize, stride: usize) -> usize {
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let (w, mask) = (c / 64, 1u64 << (c % 64));
        let Some(pivot) = (rank..rows).find(|&r| data[r * stride + w] & mask != 0) else {
            continue;
        };
        if pivot != rank {
            for k in 0..stride {
                data.swap(pivot * stride + k, rank * stride + k);
            }
        }
        for r in 0..rows {
            if r != rank && data[r * stride + w] & mask != 0 {
                for k in w..stride {
                    let v = data[rank * stride + k];
                    data[r * stride + k] ^= v;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Rank of a small matrix whose rows fit in one word each.
pub fn rank_u64(rows: &[u64]) -> usize {
    let mut basis = [0u64; 64];
    let mut rank = 0;
    for &r in rows {
        let mut v = r;
        while v != 0 {
            let top = 63 - v.leading_zeros() as usize;
            if basis[top] == 0 {
                basis[top] = v;
                rank += 1;
                break;
            }
            v ^= basis[top];
        }
    }
    rank
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {}", self.row_bits(r))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_rank_and_products() {
        let id = BitMatrix::identity(70);
        assert_eq!(id.rank(), 70);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v = BitString::random(70, &mut rng);
        assert_eq!(id.left_mul(&v).unwrap(), v);
        assert_eq!(id.mul_vec(&v).unwrap(), v);
    }

    #[test]
    fn rank_of_dependent_rows() {
        let a: BitString = "1100".parse().unwrap();
        let b: BitString = "0110".parse().unwrap();
        let c = a.xor(&b).unwrap();
        let m = BitMatrix::from_rows(&[a, b, c]).unwrap();
        assert_eq!(m.rank(), 2);
        assert_eq!(rank_u64(&[0b1100, 0b0110, 0b1010]), 2);
    }

    #[test]
    fn transpose_agrees_with_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = BitMatrix::random(13, 77, &mut rng);
        let x = BitString::random(77, &mut rng);
        assert_eq!(m.mul_vec(&x).unwrap(), m.transpose().left_mul(&x).unwrap());
        assert_eq!(m.rank(), m.transpose().rank());
    }

    #[test]
    fn matrix_product_is_associative_with_vectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = BitMatrix::random(5, 9, &mut rng);
        let b = BitMatrix::random(9, 66, &mut rng);
        let v = BitString::random(5, &mut rng);
        let ab = a.mul(&b).unwrap();
        assert_eq!(ab.left_mul(&v).unwrap(), b.left_mul(&a.left_mul(&v).unwrap()).unwrap());
    }

    #[test]
    fn packed_export_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = BitMatrix::random(4, 11, &mut rng);
        let bytes = m.to_packed_bytes();
        assert_eq!(bytes.len(), 8);
        assert_eq!(BitMatrix::from_packed_bytes(&bytes, 4, 11).unwrap(), m);
    }
}
