use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::{BitString, ErasureString};
use crate::channel::erasure_partition;
use crate::error::{Error, Result};

use super::params::{OnePrivacyRegime, Sizes};

/// Bob's four private index sets, each sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndexSets {
    pub good: Vec<usize>,
    pub bad: Vec<usize>,
    pub good_secret: Vec<usize>,
    pub bad_secret: Vec<usize>,
}

/// The sets as Bob publishes them, permuted by his choice bit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrderedSets {
    pub l00: Vec<usize>,
    pub l01: Vec<usize>,
    pub l10: Vec<usize>,
    pub l11: Vec<usize>,
}

impl OrderedSets {
    pub fn as_array(&self) -> [&[usize]; 4] {
        [&self.l00, &self.l01, &self.l10, &self.l11]
    }

    /// OT-key set and secret-key set for string `i`.
    pub fn for_string(&self, i: usize) -> (&[usize], &[usize]) {
        match i {
            0 => (&self.l00, &self.l01),
            1 => (&self.l10, &self.l11),
            _ => panic!("string index {i} is not 0 or 1"),
        }
    }

    /// Reads the ordered tuple back as `(G, G_S, B, B_S)`.
    pub fn as_index_sets(&self) -> IndexSets {
        IndexSets {
            good: self.l00.clone(),
            good_secret: self.l01.clone(),
            bad: self.l10.clone(),
            bad_secret: self.l11.clone(),
        }
    }
}

impl IndexSets {
    pub fn validate(&self, n: usize, sizes: &Sizes) -> Result<()> {
        let mut seen = vec![false; n];
        for (name, set, len) in [
            ("G", &self.good, sizes.m),
            ("B", &self.bad, sizes.m),
            ("G_S", &self.good_secret, sizes.s),
            ("B_S", &self.bad_secret, sizes.s),
        ] {
            if set.len() != len {
                return Err(Error::InvalidParameter(format!("{name} has {} elements, want {len}", set.len())));
            }
            for &i in set {
                if i >= n || std::mem::replace(&mut seen[i], true) {
                    return Err(Error::InvalidParameter(format!("{name} index {i} repeated or out of range")));
                }
            }
        }
        Ok(())
    }
}

fn draw<R: Rng + ?Sized>(pool: &mut Vec<usize>, amount: usize, rng: &mut R) -> Vec<usize> {
    let mut picked: Vec<usize> = index::sample(rng, pool.len(), amount).into_iter().collect();
    picked.sort_unstable_by(|a, b| b.cmp(a));
    let mut out: Vec<usize> = picked.iter().map(|&j| pool.swap_remove(j)).collect();
    // restore ascending order of the pool for the next draw
    pool.sort_unstable();
    out.sort_unstable();
    out
}

/// Bob's set selection from his received sequence.
///
/// Draws, in order and each uniformly without replacement: `G` from the
/// unerased positions, `G_S` from the remaining unerased ones, `B` from the
/// erased positions, then `B_S` from the pool the regime prescribes (`None`
/// means 2-privacy, which uses leftover erased positions). Fails when a pool is
/// too small; that failure is the `J = 0` event.
pub fn bob_select_sets<R: Rng + ?Sized>(
    y: &ErasureString,
    sizes: &Sizes,
    regime: Option<OnePrivacyRegime>,
    rng: &mut R,
) -> Result<IndexSets> {
    let (mut erased, mut unerased) = erasure_partition(y);
    let sizes = Sizes { regime, ..*sizes };
    let req = sizes.requirement();
    if erased.len() < req.erased {
        return Err(Error::InsufficientErasures { needed: req.erased, available: erased.len() });
    }
    if unerased.len() < req.unerased {
        return Err(Error::InsufficientUnerasures { needed: req.unerased, available: unerased.len() });
    }
    if erased.len() + unerased.len() < req.total {
        return Err(Error::InsufficientErasures {
            needed: req.total - unerased.len(),
            available: erased.len(),
        });
    }
    let (m, s) = (sizes.m, sizes.s);
    let good = draw(&mut unerased, m, rng);
    let good_secret = draw(&mut unerased, s, rng);
    let bad = draw(&mut erased, m, rng);
    let bad_secret = match regime {
        None | Some(OnePrivacyRegime::Erased) => draw(&mut erased, s, rng),
        Some(OnePrivacyRegime::Unerased) => draw(&mut unerased, s, rng),
        Some(OnePrivacyRegime::Mixed) => {
            let mut leftover: Vec<usize> = erased.iter().chain(&unerased).copied().collect();
            leftover.sort_unstable();
            draw(&mut leftover, s, rng)
        }
    };
    Ok(IndexSets { good, bad, good_secret, bad_secret })
}

/// `c = 0` publishes `(G, G_S, B, B_S)`; `c = 1` publishes `(B, B_S, G, G_S)`.
pub fn bob_order_sets(sets: &IndexSets, c: bool) -> OrderedSets {
    let IndexSets { good, bad, good_secret, bad_secret } = sets.clone();
    if c {
        OrderedSets { l00: bad, l01: bad_secret, l10: good, l11: good_secret }
    } else {
        OrderedSets { l00: good, l01: good_secret, l10: bad, l11: bad_secret }
    }
}

/// Alice's OT keys: `x` restricted to `L00` and to `L10`.
pub fn alice_compute_ot_keys(x: &BitString, sets: &OrderedSets) -> (BitString, BitString) {
    (x.restrict(&sets.l00), x.restrict(&sets.l10))
}
