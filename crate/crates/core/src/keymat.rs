//! Key material: the public expansion code, Toeplitz privacy amplification,
//! and the one-time-pad layer that hides Alice's strings.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::gf2::{rank_u64, BitMatrix};
use crate::rng;

/// Full-rank resampling cap. The chance of hitting it for any `k <= n_out`
/// is below 2^-1000.
const MAX_CODE_ATTEMPTS: u32 = 4096;

/// A binary linear code used to stretch secret keys, `k` bits to `n_out` bits.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearCode {
    pub k: usize,
    pub n_out: usize,
    pub generator: BitMatrix,
    pub seed: u64,
    /// How many generator draws it took to reach full rank.
    pub attempts: u32,
}

/// A `k x n_out` generator with i.i.d. uniform entries, redrawn until it has
/// full row rank. Deterministic in `seed`.
pub fn sample_code(k: usize, n_out: usize, seed: u64) -> Result<LinearCode> {
    if k > n_out {
        return Err(Error::Dimension { k, n_out });
    }
    let mut r = rng::seeded(seed);
    for attempts in 1..=MAX_CODE_ATTEMPTS {
        let generator = BitMatrix::random(k, n_out, &mut r);
        if generator.is_full_row_rank() {
            return Ok(LinearCode { k, n_out, generator, seed, attempts });
        }
    }
    unreachable!("no full-rank {k}x{n_out} generator in {MAX_CODE_ATTEMPTS} draws")
}

/// The first generator draw for `seed`, without the rank check. This is the
/// i.i.d. Bernoulli(1/2) ensemble itself.
pub fn sample_code_raw(k: usize, n_out: usize, seed: u64) -> Result<BitMatrix> {
    if k > n_out {
        return Err(Error::Dimension { k, n_out });
    }
    Ok(BitMatrix::random(k, n_out, &mut rng::seeded(seed)))
}

impl LinearCode {
    pub fn from_generator(generator: BitMatrix, seed: u64) -> Result<Self> {
        let (k, n_out) = (generator.rows(), generator.cols());
        if k > n_out {
            return Err(Error::Dimension { k, n_out });
        }
        if !generator.is_full_row_rank() {
            return Err(Error::InvalidParameter("generator is not full rank".into()));
        }
        Ok(Self { k, n_out, generator, seed, attempts: 1 })
    }
}

/// Encodes `s` as `s · G`.
pub fn expand(code: &LinearCode, s: &BitString) -> Result<BitString> {
    if s.len() != code.k {
        return Err(Error::LengthMismatch { expected: code.k, actual: s.len() });
    }
    code.generator.left_mul(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HashFamily {
    Toeplitz,
}

/// A public Toeplitz hash, `rows` output bits from `cols` input bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HashSpec {
    pub family: HashFamily,
    pub rows: usize,
    pub cols: usize,
    pub seed: u64,
}

impl HashSpec {
    pub fn toeplitz(rows: usize, cols: usize, seed: u64) -> Result<Self> {
        if rows > cols {
            return Err(Error::InvalidParameter(format!(
                "hash output length {rows} exceeds input length {cols}"
            )));
        }
        Ok(Self { family: HashFamily::Toeplitz, rows, cols, seed })
    }

    /// The `rows + cols - 1` diagonal bits drawn from the seed.
    pub fn diagonal(&self) -> BitString {
        let len = (self.rows + self.cols).saturating_sub(1);
        BitString::random(len, &mut rng::seeded(self.seed))
    }

    pub fn matrix(&self) -> BitMatrix {
        toeplitz_matrix(self.rows, self.cols, &self.diagonal())
    }
}

/// `T[i][j] = diagonal[i - j + cols - 1]`; constant along each diagonal.
pub fn toeplitz_matrix(rows: usize, cols: usize, diagonal: &BitString) -> BitMatrix {
    assert_eq!(diagonal.len(), (rows + cols).saturating_sub(1));
    let mut m = BitMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            if diagonal.get(i + cols - 1 - j) {
                m.set(i, j, true);
            }
        }
    }
    m
}

/// Hashes Alice's bits on a secret-key set down to `out_len` key bits.
pub fn derive_secret_key(x_restricted: &BitString, out_len: usize, hash: &HashSpec) -> Result<BitString> {
    if out_len != hash.rows {
        return Err(Error::LengthMismatch { expected: hash.rows, actual: out_len });
    }
    if x_restricted.len() != hash.cols {
        return Err(Error::LengthMismatch { expected: hash.cols, actual: x_restricted.len() });
    }
    hash.matrix().mul_vec(x_restricted)
}

/// Everything Alice computes from X^n and the ordered sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyMaterial {
    pub t0: BitString,
    pub t1: BitString,
    pub s0: BitString,
    pub s1: BitString,
    pub s0_expanded: BitString,
    pub s1_expanded: BitString,
    pub ktilde0: BitString,
    pub ktilde1: BitString,
}

/// `K_i ⊕ T_i ⊕ S̃_i` for both strings.
pub fn encrypt_strings(
    k0: &BitString,
    k1: &BitString,
    t0: &BitString,
    t1: &BitString,
    s0_expanded: &BitString,
    s1_expanded: &BitString,
) -> Result<(BitString, BitString)> {
    let c0 = k0.xor(t0)?.xor(s0_expanded)?;
    let c1 = k1.xor(t1)?.xor(s1_expanded)?;
    Ok((c0, c1))
}

pub fn decrypt_string(ktilde: &BitString, t: &BitString, s_expanded: &BitString) -> Result<BitString> {
    ktilde.xor(t)?.xor(s_expanded)
}

/// Upper bound `2^{-(cols·eps2 - rows)/2}` on the distance of a Toeplitz-hashed
/// key from uniform when Eve misses each input bit with probability `eps2`.
pub fn leftover_hash_bound(cols: usize, rows: usize, eps2: f64) -> f64 {
    2f64.powf(-(cols as f64 * eps2 - rows as f64) / 2.0)
}

/// Exact statistical distance of the key `T·x` from uniform, given the hash and
/// Eve's view of `x` through a BEC(`eps2`), averaged over every Toeplitz
/// diagonal and every erasure pattern.
///
/// Given Eve's unerased bits the key is uniform on a coset of the column span
/// of `T` restricted to her erased positions, so its distance from uniform is
/// `1 - 2^{rank - rows}` regardless of the observed values.
pub fn toeplitz_extraction_distance(cols: usize, rows: usize, eps2: f64) -> Result<f64> {
    let diag_bits = (rows + cols).saturating_sub(1);
    if cols > 20 || rows > 20 || diag_bits > 26 || rows == 0 {
        return Err(Error::TooLarge { atoms: 2f64.powi((diag_bits + cols) as i32), budget: 2f64.powi(46) });
    }
    let pattern_weight: Vec<f64> = (0..1u32 << cols)
        .map(|mask| {
            let erased = mask.count_ones() as i32;
            eps2.powi(erased) * (1.0 - eps2).powi(cols as i32 - erased)
        })
        .collect();
    let mut total = 0.0;
    let mut columns = vec![0u64; cols];
    for d in 0..1u64 << diag_bits {
        // column j holds bits T[i][j] = d[i - j + cols - 1] for i in 0..rows
        for (j, col) in columns.iter_mut().enumerate() {
            *col = (d >> (cols - 1 - j)) & ((1u64 << rows) - 1);
        }
        let mut sum = 0.0;
        let mut picked = Vec::with_capacity(cols);
        for (mask, w) in pattern_weight.iter().enumerate() {
            picked.clear();
            picked.extend((0..cols).filter(|j| mask >> j & 1 == 1).map(|j| columns[j]));
            let rank = rank_u64(&picked);
            sum += w * (1.0 - 2f64.powi(rank as i32 - rows as i32));
        }
        total += sum;
    }
    Ok(total / (1u64 << diag_bits) as f64)
}

/// The largest probability, over nonzero input differences, that a uniformly
/// chosen Toeplitz hash maps the difference to zero.
pub fn toeplitz_max_collision_probability(cols: usize, rows: usize) -> Result<f64> {
    let diag_bits = (rows + cols).saturating_sub(1);
    if cols > 16 || diag_bits > 24 {
        return Err(Error::TooLarge { atoms: 2f64.powi((diag_bits + cols) as i32), budget: 2f64.powi(40) });
    }
    let mut collisions = vec![0u64; 1 << cols];
    for d in 0..1u64 << diag_bits {
        let diag = BitString::from_u64(d, diag_bits);
        let t = toeplitz_matrix(rows, cols, &diag);
        let row_words: Vec<u64> = (0..rows).map(|i| t.row(i)[0]).collect();
        for (delta, count) in collisions.iter_mut().enumerate().skip(1) {
            if row_words.iter().all(|w| (w & delta as u64).count_ones() % 2 == 0) {
                *count += 1;
            }
        }
    }
    let max = collisions.iter().skip(1).copied().max().unwrap_or(0);
    Ok(max as f64 / (1u64 << diag_bits) as f64)
}

/// Draws a fresh public hash seed.
pub fn draw_seed<R: Rng + ?Sized>(rng: &mut R) -> u64 {
    rng.gen()
}
