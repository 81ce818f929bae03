//! Entropy of random codes restricted to coordinate subsets.
//!
//! For a random code of `2^{n r'}` codewords of length `n`, the restriction
//! to any `J` with `|J| >= n r` should be close to uniform: the empirical
//! entropy `H(p̂_J)` of the restricted codewords should be at least
//! `n r - 2^{-n β}` for `0 < β < r' - r`.

use rand::seq::index::sample;
use rand::{Rng, RngCore};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::entropy::entropy_of_counts;
use crate::error::{Error, Result};
use crate::keymat::sample_code_raw;
use crate::protocol::ceil_count;
use crate::rng::{self, Stream};

/// Largest codebook dimension, `log2` of the number of codewords.
pub const MAX_CODEBOOK_BITS: usize = 24;

/// How codes are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CodeModel {
    /// `2^{n r'}` codewords drawn i.i.d. uniform from `{0,1}^n`.
    RandomCodebook,
    /// The row space of a `n r' x n` generator with i.i.d. Bernoulli(1/2)
    /// entries, no rank check.
    RandomLinear,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeEntropyConfig {
    pub n: usize,
    pub r: f64,
    pub r_prime: f64,
    pub beta: f64,
    pub codes: usize,
    pub subsets: usize,
    pub seed: u64,
    pub model: CodeModel,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeEntropyReport {
    pub n: usize,
    pub r: f64,
    pub r_prime: f64,
    pub beta: f64,
    pub model: CodeModel,
    pub codebook_bits: usize,
    pub subset_size: usize,
    /// `n r - 2^{-n β}`.
    pub threshold: f64,
    pub codes_tested: usize,
    pub subsets_per_code: usize,
    /// Fraction of (code, subset) pairs meeting the threshold; 1 when none were tested.
    pub pass_fraction: f64,
    /// `None` when nothing was tested.
    pub min_entropy_seen: Option<f64>,
}

impl CodeEntropyConfig {
    pub fn validate(&self) -> Result<()> {
        let (r, rp, beta) = (self.r, self.r_prime, self.beta);
        if !(0.0 < r && r < rp && rp < 1.0) {
            return Err(Error::InvalidParameter(format!("need 0 < r < r' < 1, got r = {r}, r' = {rp}")));
        }
        if !(beta > 0.0 && beta < rp - r) {
            return Err(Error::InvalidParameter(format!("need 0 < beta < r' - r = {}, got {beta}", rp - r)));
        }
        if self.n == 0 || self.n > 64 {
            return Err(Error::InvalidParameter(format!("code length {} must be in 1..=64", self.n)));
        }
        let bits = ceil_count(self.n as f64 * rp);
        if bits > MAX_CODEBOOK_BITS {
            return Err(Error::BudgetExceeded(format!(
                "2^{bits} codewords exceed the 2^{MAX_CODEBOOK_BITS} enumeration limit"
            )));
        }
        Ok(())
    }
}

/// Entropy of the restrictions of `codebook` to the coordinates `subset`.
pub fn restriction_entropy(codebook: &[u64], subset: &[usize]) -> f64 {
    let mut counts = vec![0u64; 1 << subset.len()];
    for &w in codebook {
        counts[gather(w, subset)] += 1;
    }
    entropy_of_counts(&counts)
}

fn gather(word: u64, subset: &[usize]) -> usize {
    subset.iter().enumerate().fold(0, |acc, (i, &p)| acc | ((word >> p & 1) as usize) << i)
}

fn draw_codebook(cfg: &CodeEntropyConfig, bits: usize, index: u64) -> Result<Vec<u64>> {
    let mut r = rng::stream(cfg.seed, index, Stream::Public);
    let mask = if cfg.n == 64 { u64::MAX } else { (1u64 << cfg.n) - 1 };
    match cfg.model {
        CodeModel::RandomCodebook => Ok((0..1u64 << bits).map(|_| r.gen::<u64>() & mask).collect()),
        CodeModel::RandomLinear => {
            let g = sample_code_raw(bits, cfg.n, r.next_u64())?;
            let rows: Vec<u64> = (0..bits).map(|i| g.row_bits(i).low_u64()).collect();
            // Gray-code walk through all messages.
            let mut words = Vec::with_capacity(1 << bits);
            let mut w = 0u64;
            words.push(w);
            for step in 1..1u64 << bits {
                w ^= rows[step.trailing_zeros() as usize];
                words.push(w);
            }
            Ok(words)
        }
    }
}

pub fn code_entropy_experiment(cfg: &CodeEntropyConfig) -> Result<CodeEntropyReport> {
    cfg.validate()?;
    let bits = ceil_count(cfg.n as f64 * cfg.r_prime);
    let subset_size = ceil_count(cfg.n as f64 * cfg.r);
    let threshold = cfg.n as f64 * cfg.r - (-(cfg.n as f64) * cfg.beta).exp2();
    let per_code = (0..cfg.codes as u64)
        .into_par_iter()
        .map(|index| {
            let codebook = draw_codebook(cfg, bits, index)?;
            let mut r = rng::stream(cfg.seed, index, Stream::Inputs);
            let entropies: Vec<f64> = (0..cfg.subsets)
                .map(|_| {
                    let mut subset = sample(&mut r, cfg.n, subset_size).into_vec();
                    subset.sort_unstable();
                    restriction_entropy(&codebook, &subset)
                })
                .collect();
            Ok(entropies)
        })
        .collect::<Result<Vec<_>>>()?;
    let all: Vec<f64> = per_code.into_iter().flatten().collect();
    let passed = all.iter().filter(|&&h| h >= threshold).count();
    Ok(CodeEntropyReport {
        n: cfg.n,
        r: cfg.r,
        r_prime: cfg.r_prime,
        beta: cfg.beta,
        model: cfg.model,
        codebook_bits: bits,
        subset_size,
        threshold,
        codes_tested: cfg.codes,
        subsets_per_code: cfg.subsets,
        pass_fraction: if all.is_empty() { 1.0 } else { passed as f64 / all.len() as f64 },
        min_entropy_seen: all.iter().copied().reduce(f64::min),
    })
}
