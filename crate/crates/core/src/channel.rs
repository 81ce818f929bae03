//! The broadcast channel from Alice to Bob and Eve.
//!
//! The erasure setting is a pair of independent binary erasure channels fed by
//! the same input. [`DiscreteBroadcastChannel`] is the general finite
//! `p(y, z | x)` used when evaluating outer bounds.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::{BitString, ErasureString, Symbol};
use crate::error::{check_probability, Error, Result};

/// Erasure probabilities of Bob's and Eve's channels.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub eps1: f64,
    pub eps2: f64,
}

impl ChannelParams {
    pub fn new(eps1: f64, eps2: f64) -> Result<Self> {
        let p = Self { eps1, eps2 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_probability("eps1", self.eps1)?;
        check_probability("eps2", self.eps2)
    }
}

/// Sends `x` through both erasure channels.
///
/// Each channel use consumes exactly two `f64` draws from `rng`: the first
/// decides Bob's erasure, the second Eve's. A symbol is erased when its draw
/// falls below the erasure probability.
pub fn transmit_broadcast<R: Rng + ?Sized>(
    x: &BitString,
    params: ChannelParams,
    rng: &mut R,
) -> (ErasureString, ErasureString) {
    let mut y = Vec::with_capacity(x.len());
    let mut z = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let sym = Symbol::from_bit(x.get(i));
        let bob_erased = rng.gen::<f64>() < params.eps1;
        let eve_erased = rng.gen::<f64>() < params.eps2;
        y.push(if bob_erased { Symbol::Erased } else { sym });
        z.push(if eve_erased { Symbol::Erased } else { sym });
    }
    (ErasureString::new(y), ErasureString::new(z))
}

/// Splits positions into erased and unerased, both ascending.
pub fn erasure_partition(recv: &ErasureString) -> (Vec<usize>, Vec<usize>) {
    (0..recv.len()).partition(|&i| recv.is_erased(i))
}

/// A finite broadcast channel `p(y, z | x)`.
///
/// `outputs[j]` is the `(y, z)` symbol pair of column `j`; `pmf[x][j]` is its
/// probability given input `x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteBroadcastChannel {
    pub input_size: usize,
    pub y_size: usize,
    pub z_size: usize,
    pub outputs: Vec<(usize, usize)>,
    pub pmf: Vec<Vec<f64>>,
}

const ROW_SUM_TOL: f64 = 1e-12;

impl DiscreteBroadcastChannel {
    pub fn new(
        input_size: usize,
        y_size: usize,
        z_size: usize,
        outputs: Vec<(usize, usize)>,
        pmf: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let ch = Self { input_size, y_size, z_size, outputs, pmf };
        ch.validate()?;
        Ok(ch)
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_size == 0 || self.pmf.len() != self.input_size {
            return Err(Error::DimensionMismatch(format!(
                "{} pmf rows for input alphabet of size {}",
                self.pmf.len(),
                self.input_size
            )));
        }
        for &(y, z) in &self.outputs {
            if y >= self.y_size || z >= self.z_size {
                return Err(Error::DimensionMismatch(format!("output pair ({y}, {z}) out of range")));
            }
        }
        let mut seen = std::collections::HashSet::new();
        if !self.outputs.iter().all(|p| seen.insert(*p)) {
            return Err(Error::DimensionMismatch("repeated output pair".into()));
        }
        for (x, row) in self.pmf.iter().enumerate() {
            if row.len() != self.outputs.len() {
                return Err(Error::DimensionMismatch(format!(
                    "row {x} has {} entries for {} outputs",
                    row.len(),
                    self.outputs.len()
                )));
            }
            if row.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
                return Err(Error::InvalidParameter(format!("row {x} has a negative entry")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::InvalidParameter(format!("row {x} sums to {sum}")));
            }
        }
        Ok(())
    }
}

/// Symbol indices used by [`bec_pair_as_broadcast`] for each output.
pub const BEC_ZERO: usize = 0;
pub const BEC_ONE: usize = 1;
pub const BEC_ERASED: usize = 2;

/// The two-BEC channel written as a general broadcast channel.
///
/// Outputs are the seven `(y, z)` pairs that can occur; `y` and `z` each take
/// values in {0, 1, erased} and never disagree on an unerased bit.
pub fn bec_pair_as_broadcast(params: ChannelParams) -> DiscreteBroadcastChannel {
    let (e1, e2) = (params.eps1, params.eps2);
    let outputs = vec![
        (BEC_ZERO, BEC_ZERO),
        (BEC_ONE, BEC_ONE),
        (BEC_ZERO, BEC_ERASED),
        (BEC_ONE, BEC_ERASED),
        (BEC_ERASED, BEC_ZERO),
        (BEC_ERASED, BEC_ONE),
        (BEC_ERASED, BEC_ERASED),
    ];
    let row = |x: usize| -> Vec<f64> {
        outputs
            .iter()
            .map(|&(y, z)| {
                let py = if y == BEC_ERASED { e1 } else if y == x { 1.0 - e1 } else { 0.0 };
                let pz = if z == BEC_ERASED { e2 } else if z == x { 1.0 - e2 } else { 0.0 };
                py * pz
            })
            .collect()
    };
    DiscreteBroadcastChannel {
        input_size: 2,
        y_size: 3,
        z_size: 3,
        pmf: vec![row(0), row(1)],
        outputs,
    }
}
