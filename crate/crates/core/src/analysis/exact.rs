//! Exact leakage of small instances by enumerating the whole joint law.
//!
//! The enumerated variables are `X^n`, Bob's and Eve's erasure patterns, the
//! choice bit, both strings, and every set selection Bob can make. Public
//! parameters (code and hash seeds) are fixed. Atoms are grouped by the
//! published ordered sets, which every view contains, so each group's
//! conditional-entropy tables stay small and groups run in parallel.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::entropy::{entropy, SecretTable};
use super::{clip_information, LeakageMethod, LeakageReport};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::protocol::{OnePrivacyRegime, OrderedSets, Protocol, ProtocolParams};

pub const DEFAULT_N_MAX_EXACT: usize = 8;
pub const DEFAULT_ATOM_BUDGET: f64 = 1e9;
/// Longest string the enumerator accepts.
pub const MAX_EXACT_STRING_BITS: usize = 2;
/// Keys are packed into a `u64`; this is the longest blocklength that fits.
const KEY_N_LIMIT: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactConfig {
    pub n_max: usize,
    /// Ceiling on weighted atoms visited.
    pub atom_budget: f64,
    /// Whose public header (hash seeds) to fix.
    pub trial: u64,
}

impl Default for ExactConfig {
    fn default() -> Self {
        Self { n_max: DEFAULT_N_MAX_EXACT, atom_budget: DEFAULT_ATOM_BUDGET, trial: 0 }
    }
}

pub fn exact_leakage(params: &ProtocolParams) -> Result<LeakageReport> {
    exact_leakage_with(params, &ExactConfig::default())
}

/// One Bob outcome that publishes a given ordered-set tuple.
#[derive(Clone, Copy, Debug)]
struct Entry {
    bob_erased: u32,
    c: usize,
    weight: f64,
}

#[derive(Clone, Copy, Debug, Default)]
struct GroupSums {
    alice: f64,
    eve: f64,
    bob_eve: f64,
    bob: f64,
}

pub fn exact_leakage_with(params: &ProtocolParams, cfg: &ExactConfig) -> Result<LeakageReport> {
    let sizes = params.sizes()?;
    let (n, m) = (params.n, sizes.m);
    let crude = 8f64.powi(n as i32) * 2f64.powi(2 * m as i32 + 1);
    if n > cfg.n_max.min(KEY_N_LIMIT) {
        return Err(Error::TooLarge { atoms: crude, budget: cfg.atom_budget });
    }
    if m > MAX_EXACT_STRING_BITS {
        return Err(Error::InvalidParameter(format!(
            "exact enumeration supports strings of at most {MAX_EXACT_STRING_BITS} bits, got {m}"
        )));
    }
    let protocol = Protocol::new(*params)?;
    let hashes = protocol.hashes(&protocol.header(cfg.trial))?;
    let (eps1, eps2) = (params.eps.eps1, params.eps.eps2);
    let full = (1u32 << n) - 1;

    let mut groups: BTreeMap<[u32; 4], Vec<Entry>> = BTreeMap::new();
    let mut p_j = 0.0;
    for bob_erased in 0..=full {
        let e = bob_erased.count_ones() as usize;
        let pb = pattern_probability(eps1, e, n);
        if pb == 0.0 || !sizes.provisioned(e, n - e) {
            continue;
        }
        p_j += pb;
        let selections = selections(bob_erased, full & !bob_erased, sizes.m, sizes.s, sizes.regime);
        let w = pb / selections.len() as f64 / 2.0;
        for [good, good_secret, bad, bad_secret] in selections {
            groups.entry([good, good_secret, bad, bad_secret]).or_default().push(Entry { bob_erased, c: 0, weight: w });
            groups.entry([bad, bad_secret, good, good_secret]).or_default().push(Entry { bob_erased, c: 1, weight: w });
        }
    }
    if p_j == 0.0 {
        return Err(Error::InvalidParameter("J = 1 has probability zero".into()));
    }
    let entries: usize = groups.values().map(Vec::len).sum();
    let atoms = entries as f64 * 4f64.powi(n as i32) * 4f64.powi(m as i32);
    if atoms > cfg.atom_budget {
        return Err(Error::TooLarge { atoms, budget: cfg.atom_budget });
    }

    let eve_probs: Vec<f64> = (0..=full).map(|z| pattern_probability(eps2, z.count_ones() as usize, n)).collect();
    let groups: Vec<([u32; 4], Vec<Entry>)> = groups.into_iter().collect();
    let sums = groups
        .par_iter()
        .map(|(masks, entries)| {
            let sets = OrderedSets {
                l00: positions(masks[0]),
                l01: positions(masks[1]),
                l10: positions(masks[2]),
                l11: positions(masks[3]),
            };
            let zero = BitString::zeros(m);
            let pads = (0..=full)
                .map(|x| {
                    let km = protocol.alice_key_material(
                        &BitString::from_u64(x as u64, n),
                        &sets,
                        &hashes,
                        &zero,
                        &zero,
                    )?;
                    Ok((km.ktilde0.low_u64() | km.ktilde1.low_u64() << m) as u32)
                })
                .collect::<Result<Vec<u32>>>()?;
            Ok(group_sums(n, m, entries, &pads, &eve_probs))
        })
        .collect::<Result<Vec<GroupSums>>>()?;

    let mut total = GroupSums::default();
    for s in &sums {
        total.alice += s.alice;
        total.eve += s.eve;
        total.bob_eve += s.bob_eve;
        total.bob += s.bob;
    }
    // C, K0 and K1 are uniform and independent of J.
    let h_c = entropy(&[1.0, 1.0]);
    let h_string = entropy(&vec![1.0; 1 << m]);
    let h_all = entropy(&vec![1.0; 1 << (2 * m + 1)]);
    Ok(LeakageReport {
        method: LeakageMethod::ExactEnumeration,
        n,
        m,
        s: sizes.s,
        k: sizes.k,
        trials: 0,
        j_probability: p_j,
        atoms: Some(atoms),
        i_c_given_aliceview: clip_information(h_c - total.alice / p_j)?,
        i_kcbar_given_bob_eve: clip_information(h_string - total.bob_eve / p_j)?,
        i_keys_choice_given_eve: clip_information(h_all - total.eve / p_j)?,
        i_kcbar_given_bob: clip_information(h_string - total.bob / p_j)?,
        std_errors: None,
    })
}

fn group_sums(n: usize, m: usize, entries: &[Entry], pads: &[u32], eve_probs: &[f64]) -> GroupSums {
    let full = (1u32 << n) - 1;
    let strings = 1u32 << (2 * m);
    let string_mask = (1u32 << m) - 1;
    let base = 1.0 / (1u64 << n) as f64 / strings as f64;
    let mut alice = SecretTable::new(2);
    let mut eve = SecretTable::new(1 << (2 * m + 1));
    let mut bob_eve = SecretTable::new(1 << m);
    let mut bob = SecretTable::new(1 << m);
    for entry in entries {
        let w_entry = entry.weight * base;
        let y_code = erasure_code(n, entry.bob_erased);
        for x in 0..=full {
            let y = y_code(x) as u64;
            for k in 0..strings {
                let kt = (k ^ pads[x as usize]) as u64;
                let k_cbar = (if entry.c == 1 { k & string_mask } else { k >> m }) as usize;
                alice.add((x as u64) << (2 * m) | k as u64, entry.c, w_entry);
                let bob_key = entry.c as u64 | y << 1 | kt << (1 + 2 * n);
                bob.add(bob_key, k_cbar, w_entry);
                for (ez, &pz) in eve_probs.iter().enumerate() {
                    if pz == 0.0 {
                        continue;
                    }
                    let z = erasure_code(n, ez as u32)(x) as u64;
                    let w = w_entry * pz;
                    eve.add(z | kt << (2 * n), k as usize | entry.c << (2 * m), w);
                    bob_eve.add(bob_key | z << (1 + 2 * n + 2 * m), k_cbar, w);
                }
            }
        }
    }
    GroupSums {
        alice: alice.weighted_conditional_entropy(),
        eve: eve.weighted_conditional_entropy(),
        bob_eve: bob_eve.weighted_conditional_entropy(),
        bob: bob.weighted_conditional_entropy(),
    }
}

/// Packs a received word as `erasure mask << n | surviving bits`.
fn erasure_code(n: usize, erased: u32) -> impl Fn(u32) -> u32 {
    move |x| erased << n | (x & !erased & ((1u32 << n) - 1))
}

fn pattern_probability(eps: f64, erased: usize, n: usize) -> f64 {
    eps.powi(erased as i32) * (1.0 - eps).powi((n - erased) as i32)
}

fn positions(mask: u32) -> Vec<usize> {
    (0..32).filter(|&i| mask >> i & 1 == 1).collect()
}

/// All submasks of `pool` with exactly `size` bits.
fn subsets(pool: u32, size: usize) -> Vec<u32> {
    let mut out = Vec::new();
    let mut sub = pool;
    loop {
        if sub.count_ones() as usize == size {
            out.push(sub);
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & pool;
    }
    out.reverse();
    out
}

/// Every `(G, G_S, B, B_S)` Bob may draw, each equally likely.
fn selections(erased: u32, unerased: u32, m: usize, s: usize, regime: Option<OnePrivacyRegime>) -> Vec<[u32; 4]> {
    let mut out = Vec::new();
    for good in subsets(unerased, m) {
        for good_secret in subsets(unerased & !good, s) {
            for bad in subsets(erased, m) {
                let leftover_unerased = unerased & !good & !good_secret;
                let pool = match regime {
                    None | Some(OnePrivacyRegime::Erased) => erased & !bad,
                    Some(OnePrivacyRegime::Unerased) => leftover_unerased,
                    Some(OnePrivacyRegime::Mixed) => (erased & !bad) | leftover_unerased,
                };
                for bad_secret in subsets(pool, s) {
                    out.push([good, good_secret, bad, bad_secret]);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ChannelParams;
    use crate::protocol::PrivacyMode;

    fn params(n: usize, eps1: f64, eps2: f64, mode: PrivacyMode) -> ProtocolParams {
        ProtocolParams::new(n, 1.0 / n as f64, 0.1, mode, ChannelParams::new(eps1, eps2).unwrap(), 3)
    }

    #[test]
    fn subset_enumeration() {
        assert_eq!(subsets(0b1011, 2), vec![0b0011, 0b1001, 0b1010]);
        assert_eq!(subsets(0b1011, 0), vec![0]);
        assert!(subsets(0b1, 2).is_empty());
    }

    #[test]
    fn selection_counts() {
        // 3 erased, 3 unerased, m = 1, s = 2: 3 · 1 · 3 · 1 ways.
        assert_eq!(selections(0b000111, 0b111000, 1, 2, None).len(), 9);
        // m = 1, s = 1 with 2 erased, 4 unerased.
        assert_eq!(selections(0b11, 0b111100, 1, 1, Some(OnePrivacyRegime::Unerased)).len(), 4 * 3 * 2 * 2);
        assert_eq!(selections(0b11, 0b111100, 1, 1, Some(OnePrivacyRegime::Mixed)).len(), 4 * 3 * 2 * 3);
    }

    #[test]
    fn alice_learns_nothing_small() {
        let r = exact_leakage(&params(5, 0.5, 0.75, PrivacyMode::TwoPrivacy)).unwrap();
        assert!(r.i_c_given_aliceview <= 1e-12);
        assert!(r.j_probability > 0.0 && r.j_probability <= 1.0);
    }

    #[test]
    fn blind_eve_sees_nothing() {
        let r = exact_leakage(&params(5, 0.5, 1.0, PrivacyMode::TwoPrivacy)).unwrap();
        assert!(r.i_keys_choice_given_eve <= 1e-12, "{}", r.i_keys_choice_given_eve);
    }

    #[test]
    fn oversized_instances_are_refused() {
        let p = ProtocolParams::new(30, 0.05, 0.1, PrivacyMode::TwoPrivacy, ChannelParams::new(0.5, 0.5).unwrap(), 1);
        assert!(matches!(exact_leakage(&p), Err(Error::TooLarge { .. })));
        let tight = ExactConfig { atom_budget: 10.0, ..ExactConfig::default() };
        let small = params(5, 0.5, 0.75, PrivacyMode::TwoPrivacy);
        assert!(matches!(exact_leakage_with(&small, &tight), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn deterministic() {
        let p = params(5, 0.6, 0.75, PrivacyMode::OnePrivacy);
        assert_eq!(exact_leakage(&p).unwrap(), exact_leakage(&p).unwrap());
    }
}
