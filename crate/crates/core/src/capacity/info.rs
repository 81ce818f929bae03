//! Information functionals of a broadcast channel under an input law, in bits.

use serde::{Deserialize, Serialize};

use crate::channel::DiscreteBroadcastChannel;
use crate::error::{Error, Result};

const SUM_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputDistribution {
    pub probs: Vec<f64>,
}

impl InputDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() || probs.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidParameter(format!("not a probability vector: {probs:?}")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidParameter(format!("probabilities sum to {sum}")));
        }
        Ok(Self { probs })
    }

    pub fn uniform(size: usize) -> Self {
        Self { probs: vec![1.0 / size as f64; size] }
    }

    pub fn binary(p0: f64) -> Self {
        Self { probs: vec![p0, 1.0 - p0] }
    }
}

/// The three quantities the outer bounds maximize.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Functional {
    /// `I(X; Y | Z)`.
    MutualInfoYGivenZ,
    /// `H(X | Y, Z)`.
    EntropyGivenYZ,
    /// `H(X | Y)`.
    EntropyGivenY,
}

impl Functional {
    pub fn evaluate(self, px: &InputDistribution, ch: &DiscreteBroadcastChannel) -> Result<f64> {
        match self {
            Self::MutualInfoYGivenZ => conditional_mutual_information(px, ch),
            Self::EntropyGivenYZ => conditional_entropy_given_pair(px, ch),
            Self::EntropyGivenY => conditional_entropy_given_y(px, ch),
        }
    }
}

fn xlog2x(p: f64) -> f64 {
    if p > 0.0 {
        p * p.log2()
    } else {
        0.0
    }
}

/// `H(X | g(Y, Z))` where `group` maps each output column to a label.
fn conditional_entropy(
    px: &InputDistribution,
    ch: &DiscreteBroadcastChannel,
    groups: usize,
    group: impl Fn(usize, usize) -> usize,
) -> Result<f64> {
    if px.probs.len() != ch.input_size {
        return Err(Error::DimensionMismatch(format!(
            "input law has {} entries, channel has {} inputs",
            px.probs.len(),
            ch.input_size
        )));
    }
    // joint[g][x] = P(X = x, g(Y, Z) = g)
    let mut joint = vec![vec![0.0; ch.input_size]; groups];
    for (j, &(y, z)) in ch.outputs.iter().enumerate() {
        let g = group(y, z);
        for (x, &p) in px.probs.iter().enumerate() {
            joint[g][x] += p * ch.pmf[x][j];
        }
    }
    let mut h = 0.0;
    for row in &joint {
        let total: f64 = row.iter().sum();
        h += xlog2x(total) - row.iter().map(|&p| xlog2x(p)).sum::<f64>();
    }
    Ok(h.max(0.0))
}

/// `H(X | Y, Z)`.
pub fn conditional_entropy_given_pair(px: &InputDistribution, ch: &DiscreteBroadcastChannel) -> Result<f64> {
    conditional_entropy(px, ch, ch.y_size * ch.z_size, |y, z| y * ch.z_size + z)
}

/// `H(X | Y)`.
pub fn conditional_entropy_given_y(px: &InputDistribution, ch: &DiscreteBroadcastChannel) -> Result<f64> {
    conditional_entropy(px, ch, ch.y_size, |y, _| y)
}

/// `H(X | Z)`.
pub fn conditional_entropy_given_z(px: &InputDistribution, ch: &DiscreteBroadcastChannel) -> Result<f64> {
    conditional_entropy(px, ch, ch.z_size, |_, z| z)
}

/// `I(X; Y | Z) = H(X | Z) - H(X | Y, Z)`.
pub fn conditional_mutual_information(px: &InputDistribution, ch: &DiscreteBroadcastChannel) -> Result<f64> {
    let h_z = conditional_entropy_given_z(px, ch)?;
    let h_yz = conditional_entropy_given_pair(px, ch)?;
    Ok((h_z - h_yz).max(0.0))
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    -xlog2x(p) - xlog2x(1.0 - p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{bec_pair_as_broadcast, ChannelParams};

    fn bec(e1: f64, e2: f64) -> DiscreteBroadcastChannel {
        bec_pair_as_broadcast(ChannelParams::new(e1, e2).unwrap())
    }

    #[test]
    fn uniform_input_on_bec_pair() {
        for (e1, e2) in [(0.5, 0.5), (0.3, 0.8), (0.9, 0.1), (0.0, 1.0)] {
            let ch = bec(e1, e2);
            let u = InputDistribution::uniform(2);
            let i = conditional_mutual_information(&u, &ch).unwrap();
            let hyz = conditional_entropy_given_pair(&u, &ch).unwrap();
            let hy = conditional_entropy_given_y(&u, &ch).unwrap();
            assert!((i - e2 * (1.0 - e1)).abs() < 1e-14, "{i}");
            assert!((hyz - e1 * e2).abs() < 1e-14, "{hyz}");
            assert!((hy - e1).abs() < 1e-14, "{hy}");
        }
    }

    #[test]
    fn bec_pair_functionals_scale_binary_entropy() {
        let ch = bec(0.3, 0.6);
        for p in [0.05, 0.2, 0.7] {
            let px = InputDistribution::binary(p);
            let h = binary_entropy(p);
            let i = conditional_mutual_information(&px, &ch).unwrap();
            assert!((i - 0.6 * 0.7 * h).abs() < 1e-14);
        }
    }

    #[test]
    fn deterministic_input_has_no_entropy() {
        let ch = bec(0.4, 0.7);
        for f in [Functional::MutualInfoYGivenZ, Functional::EntropyGivenYZ, Functional::EntropyGivenY] {
            assert_eq!(f.evaluate(&InputDistribution::binary(1.0), &ch).unwrap(), 0.0);
        }
    }

    #[test]
    fn dimension_mismatch() {
        let ch = bec(0.4, 0.7);
        let px = InputDistribution::uniform(3);
        assert!(matches!(conditional_mutual_information(&px, &ch), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn input_law_validation() {
        assert!(InputDistribution::new(vec![0.5, 0.6]).is_err());
        assert!(InputDistribution::new(vec![-0.1, 1.1]).is_err());
        assert!(InputDistribution::new(vec![0.25; 4]).is_ok());
    }
}
