//! Packed bit strings and erasure-channel output strings.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WORD: usize = 64;

#[inline]
pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

/// A fixed-length string over {0, 1}, packed little-endian into `u64` words.
///
/// Bits past `len` in the last word are always zero, so equality and hashing
/// can compare words directly.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString {
    words: Vec<u64>,
    len: usize,
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        Self { words: vec![0; words_for(len)], len }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut out = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            out.set(i, b);
        }
        out
    }

    /// Builds a string from the low `len` bits of `value` (bit 0 first).
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= WORD);
        let mut out = Self::zeros(len);
        if len > 0 {
            out.words[0] = if len == WORD { value } else { value & ((1u64 << len) - 1) };
        }
        out
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut out = Self { words: (0..words_for(len)).map(|_| rng.gen()).collect(), len };
        out.clear_tail();
        out
    }

    pub(crate) fn from_words(words: Vec<u64>, len: usize) -> Self {
        debug_assert_eq!(words.len(), words_for(len));
        let mut out = Self { words, len };
        out.clear_tail();
        out
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD);
        if bit {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Bitwise XOR of two equal-length strings.
    pub fn xor(&self, other: &Self) -> Result<Self> {
        if self.len != other.len {
            return Err(Error::LengthMismatch { expected: self.len, actual: other.len });
        }
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a ^ b).collect();
        Ok(Self { words, len: self.len })
    }

    pub fn xor_assign(&mut self, other: &Self) -> Result<()> {
        if self.len != other.len {
            return Err(Error::LengthMismatch { expected: self.len, actual: other.len });
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        Ok(())
    }

    /// The substring at `indices`, in the order given.
    pub fn restrict(&self, indices: &[usize]) -> Self {
        let mut out = Self::zeros(indices.len());
        for (j, &i) in indices.iter().enumerate() {
            if self.get(i) {
                out.set(j, true);
            }
        }
        out
    }

    /// Packs the string into bytes, first bit in the most significant position
    /// of the first byte.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.len.div_ceil(8)];
        for i in 0..self.len {
            if self.get(i) {
                out[i / 8] |= 0x80 >> (i % 8);
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8], len: usize) -> Result<Self> {
        if bytes.len() != len.div_ceil(8) {
            return Err(Error::LengthMismatch { expected: len.div_ceil(8), actual: bytes.len() });
        }
        let mut out = Self::zeros(len);
        for i in 0..len {
            if bytes[i / 8] & (0x80 >> (i % 8)) != 0 {
                out.set(i, true);
            }
        }
        Ok(out)
    }

    /// The low 64 bits as an integer (bit 0 is the least significant).
    pub fn low_u64(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidParameter(format!("not a bit: {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_bools(&bits))
    }
}

impl Serialize for BitString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One received channel symbol. Erasure is its own value, never a bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Symbol {
    Zero,
    One,
    Erased,
}

impl Symbol {
    pub fn bit(self) -> Option<bool> {
        match self {
            Symbol::Zero => Some(false),
            Symbol::One => Some(true),
            Symbol::Erased => None,
        }
    }

    pub fn from_bit(b: bool) -> Self {
        if b {
            Symbol::One
        } else {
            Symbol::Zero
        }
    }

    pub fn is_erased(self) -> bool {
        self == Symbol::Erased
    }
}

/// A received sequence over {0, 1, erased}.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ErasureString {
    symbols: Vec<Symbol>,
}

impl ErasureString {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        Self { symbols }
    }

    /// `x` seen through the erasure pattern `erased` (true = erased).
    pub fn mask(x: &BitString, erased: &[bool]) -> Self {
        assert_eq!(x.len(), erased.len());
        let symbols = erased
            .iter()
            .enumerate()
            .map(|(i, &e)| if e { Symbol::Erased } else { Symbol::from_bit(x.get(i)) })
            .collect();
        Self { symbols }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn get(&self, i: usize) -> Symbol {
        self.symbols[i]
    }

    pub fn is_erased(&self, i: usize) -> bool {
        self.symbols[i].is_erased()
    }

    pub fn erased_count(&self) -> usize {
        self.symbols.iter().filter(|s| s.is_erased()).count()
    }

    /// Packs the erasure indicator into bits (1 = erased).
    pub fn erasure_mask(&self) -> BitString {
        let bools: Vec<bool> = self.symbols.iter().map(|s| s.is_erased()).collect();
        BitString::from_bools(&bools)
    }
}

impl fmt::Display for ErasureString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.symbols {
            f.write_str(match s {
                Symbol::Zero => "0",
                Symbol::One => "1",
                Symbol::Erased => "?",
            })?;
        }
        Ok(())
    }
}

impl FromStr for ErasureString {
    type Err = Error;

    /// Parses `0`, `1` and `?` (erased).
    fn from_str(s: &str) -> Result<Self> {
        let symbols = s
            .chars()
            .map(|c| match c {
                '0' => Ok(Symbol::Zero),
                '1' => Ok(Symbol::One),
                '?' => Ok(Symbol::Erased),
                other => Err(Error::InvalidParameter(format!("not a channel symbol: {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { symbols })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_and_display() {
        let b: BitString = "0110".parse().unwrap();
        assert_eq!(b.len(), 4);
        assert!(!b.get(0) && b.get(1) && b.get(2) && !b.get(3));
        assert_eq!(b.to_string(), "0110");
        assert!("01x".parse::<BitString>().is_err());
    }

    #[test]
    fn restrict_in_given_order() {
        let b: BitString = "0110".parse().unwrap();
        assert_eq!(b.restrict(&[0, 2]).to_string(), "01");
        assert_eq!(b.restrict(&[2, 0]).to_string(), "10");
    }

    #[test]
    fn xor_rejects_length_mismatch() {
        let a = BitString::zeros(3);
        let b = BitString::zeros(4);
        assert_eq!(a.xor(&b), Err(Error::LengthMismatch { expected: 3, actual: 4 }));
    }

    #[test]
    fn erasure_string_roundtrip() {
        let e: ErasureString = "0?1?".parse().unwrap();
        assert_eq!(e.erased_count(), 2);
        assert_eq!(e.to_string(), "0?1?");
        assert_eq!(e.get(2), Symbol::One);
    }

    proptest! {
        #[test]
        fn bytes_roundtrip(bits in proptest::collection::vec(any::<bool>(), 0..200)) {
            let b = BitString::from_bools(&bits);
            let back = BitString::from_bytes(&b.to_bytes(), bits.len()).unwrap();
            prop_assert_eq!(back, b);
        }

        #[test]
        fn xor_is_involutive(a in proptest::collection::vec(any::<bool>(), 1..130),
                             seed in any::<u64>()) {
            use rand::SeedableRng;
            let a = BitString::from_bools(&a);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let k = BitString::random(a.len(), &mut rng);
            prop_assert_eq!(a.xor(&k).unwrap().xor(&k).unwrap(), a);
        }
    }
}
