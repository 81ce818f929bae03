//! Entropy bookkeeping over finite joint distributions, in bits.

use std::collections::HashMap;
use std::hash::{BuildHasherDefault, DefaultHasher, Hash};

/// Fixed-key hasher, so iteration order and hence float summation order are
/// reproducible across processes.
type StableMap<K, V> = HashMap<K, V, BuildHasherDefault<DefaultHasher>>;


/// Shannon entropy of a (possibly unnormalized) weight vector, normalized.
pub fn entropy(weights: &[f64]) -> f64 {
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    weights.iter().filter(|&&w| w > 0.0).map(|&w| -(w / total) * (w / total).log2()).sum()
}

/// Entropy of the empirical distribution of `counts`.
pub fn entropy_of_counts(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let t = total as f64;
    counts.iter().filter(|&&c| c > 0).map(|&c| -(c as f64 / t) * (c as f64 / t).log2()).sum()
}

/// Accumulates unnormalized weights `w(a, b)` for a secret `a` with a small
/// alphabet and an observation `b`, and yields `I(A; B)`.
#[derive(Clone, Debug)]
pub(crate) struct SecretTable<K> {
    arity: usize,
    cells: StableMap<K, Vec<f64>>,
}

impl<K: Hash + Eq> SecretTable<K> {
    pub fn new(arity: usize) -> Self {
        Self { arity, cells: StableMap::default() }
    }

    pub fn add(&mut self, key: K, secret: usize, w: f64) {
        let arity = self.arity;
        self.cells.entry(key).or_insert_with(|| vec![0.0; arity])[secret] += w;
    }

    /// `Σ_b Σ_a w(a,b) log(w(b) / w(a,b))`: the unnormalized conditional
    /// entropy `H(A | B)` times the total weight.
    pub fn weighted_conditional_entropy(&self) -> f64 {
        self.cells
            .values()
            .map(|row| {
                let total: f64 = row.iter().sum();
                row.iter().filter(|&&w| w > 0.0).map(|&w| w * (total / w).log2()).sum::<f64>()
            })
            .sum()
    }
}

/// Plug-in mutual information of a contingency table.
pub fn plug_in_mutual_information(table: &[Vec<u64>]) -> f64 {
    let total: u64 = table.iter().flatten().sum();
    if total == 0 {
        return 0.0;
    }
    let t = total as f64;
    let rows: Vec<f64> = table.iter().map(|r| r.iter().sum::<u64>() as f64).collect();
    let cols = table.first().map_or(0, Vec::len);
    let colsum: Vec<f64> = (0..cols).map(|j| table.iter().map(|r| r[j]).sum::<u64>() as f64).collect();
    let mut mi = 0.0;
    for (i, row) in table.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if c > 0 {
                let c = c as f64;
                mi += c / t * (c * t / (rows[i] * colsum[j])).log2();
            }
        }
    }
    mi.max(0.0)
}

/// Standard error of the plug-in estimate: the delta-method variance plus
/// the spread of the estimator under independence, where
/// `2·T·ln2·Î` is approximately chi-square with `(r-1)(c-1)` degrees of freedom.
pub fn plug_in_standard_error(table: &[Vec<u64>]) -> f64 {
    let total: u64 = table.iter().flatten().sum();
    if total == 0 {
        return 0.0;
    }
    let t = total as f64;
    let mi = plug_in_mutual_information(table);
    let rows: Vec<f64> = table.iter().map(|r| r.iter().sum::<u64>() as f64).collect();
    let cols = table.first().map_or(0, Vec::len);
    let colsum: Vec<f64> = (0..cols).map(|j| table.iter().map(|r| r[j]).sum::<u64>() as f64).collect();
    let mut second = 0.0;
    for (i, row) in table.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if c > 0 {
                let c = c as f64;
                let l = (c * t / (rows[i] * colsum[j])).log2();
                second += c / t * l * l;
            }
        }
    }
    let delta_var = ((second - mi * mi) / t).max(0.0);
    let dof = (rows.iter().filter(|&&r| r > 0.0).count().saturating_sub(1)
        * colsum.iter().filter(|&&c| c > 0.0).count().saturating_sub(1)) as f64;
    let null_sd = (2.0 * dof).sqrt() / (2.0 * t * std::f64::consts::LN_2);
    (delta_var + null_sd * null_sd).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropies() {
        assert!((entropy(&[1.0, 1.0, 1.0, 1.0]) - 2.0).abs() < 1e-15);
        assert_eq!(entropy(&[0.0, 3.0]), 0.0);
        assert!((entropy_of_counts(&[5, 5]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn secret_table_extremes() {
        let mut hidden = SecretTable::new(2);
        let mut revealed = SecretTable::new(2);
        for b in 0..4u32 {
            for a in 0..2 {
                hidden.add(b, a, 0.125);
                revealed.add(b * 2 + a as u32, a, 0.125);
            }
        }
        assert!((hidden.weighted_conditional_entropy() - 1.0).abs() < 1e-15);
        assert_eq!(revealed.weighted_conditional_entropy(), 0.0);
    }

    #[test]
    fn plug_in_on_tables() {
        assert_eq!(plug_in_mutual_information(&[vec![10, 10], vec![10, 10]]), 0.0);
        assert!((plug_in_mutual_information(&[vec![7, 0], vec![0, 7]]) - 1.0).abs() < 1e-15);
        let se = plug_in_standard_error(&[vec![250, 250], vec![250, 250]]);
        assert!((se - 2f64.sqrt() / (2000.0 * std::f64::consts::LN_2)).abs() < 1e-15);
    }
}
