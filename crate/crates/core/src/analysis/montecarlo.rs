//! Monte Carlo leakage estimates for blocklengths beyond enumeration.
//!
//! Every pad is affine in `X^n`: `pad_i = X|L_i0 ⊕ M_i · X|L_i1` with
//! `M_i = Gᵀ H_i`. Given everything an observer holds, the bits of `X` they
//! have not seen are uniform and appear nowhere else in their view, so the
//! information a pad leaks about its string is `m - rank` of the pad map
//! restricted to those unseen bits. Each trial therefore contributes the exact
//! conditional leakage given its own public sets and erasure patterns, and the
//! estimate is the mean over provisioned trials.
//!
//! Alice's functional has no such structure; it is estimated by plug-in mutual
//! information between `C` and a coarsening of her view: whether the first
//! published OT-key set starts before the second. A coarsening can only
//! lower the estimate.

use rayon::prelude::*;

use super::entropy::{plug_in_mutual_information, plug_in_standard_error};
use super::{clip_information, LeakageErrors, LeakageMethod, LeakageReport};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::gf2::BitMatrix;
use crate::protocol::{bob_order_sets, OrderedSets, Protocol, ProtocolParams};

pub const MIN_MONTE_CARLO_TRIALS: u64 = 1000;

/// Per-trial quantities of one provisioned run.
#[derive(Clone, Copy, Debug, PartialEq)]
struct TrialLeakage {
    c: bool,
    alice_feature: bool,
    eve: f64,
    bob_eve: f64,
    bob: f64,
}

pub fn monte_carlo_leakage(params: &ProtocolParams, trials: u64) -> Result<LeakageReport> {
    if trials < MIN_MONTE_CARLO_TRIALS {
        return Err(Error::InvalidParameter(format!(
            "Monte Carlo leakage needs at least {MIN_MONTE_CARLO_TRIALS} trials, got {trials}"
        )));
    }
    let protocol = Protocol::new(*params)?;
    let sizes = *protocol.sizes();
    let per_trial = (0..trials)
        .into_par_iter()
        .map(|trial| trial_leakage(&protocol, trial))
        .collect::<Result<Vec<Option<TrialLeakage>>>>()?;
    let provisioned: Vec<TrialLeakage> = per_trial.into_iter().flatten().collect();
    if provisioned.is_empty() {
        return Err(Error::InvalidParameter("no trial reached J = 1".into()));
    }

    let mut table = vec![vec![0u64; 2]; 2];
    for t in &provisioned {
        table[t.c as usize][t.alice_feature as usize] += 1;
    }
    let (eve, eve_se) = mean_and_se(provisioned.iter().map(|t| t.eve));
    let (bob_eve, bob_eve_se) = mean_and_se(provisioned.iter().map(|t| t.bob_eve));
    let (bob, bob_se) = mean_and_se(provisioned.iter().map(|t| t.bob));
    Ok(LeakageReport {
        method: LeakageMethod::MonteCarlo,
        n: params.n,
        m: sizes.m,
        s: sizes.s,
        k: sizes.k,
        trials,
        j_probability: provisioned.len() as f64 / trials as f64,
        atoms: None,
        i_c_given_aliceview: clip_information(plug_in_mutual_information(&table))?,
        i_kcbar_given_bob_eve: clip_information(bob_eve)?,
        i_keys_choice_given_eve: clip_information(eve)?,
        i_kcbar_given_bob: clip_information(bob)?,
        std_errors: Some(LeakageErrors {
            i_c_given_aliceview: plug_in_standard_error(&table),
            i_kcbar_given_bob_eve: bob_eve_se,
            i_keys_choice_given_eve: eve_se,
            i_kcbar_given_bob: bob_se,
        }),
    })
}

fn mean_and_se(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let count = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / count;
    if count < 2.0 {
        return (mean, 0.0);
    }
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (count - 1.0);
    (mean, (var / count).sqrt())
}

fn trial_leakage(protocol: &Protocol, trial: u64) -> Result<Option<TrialLeakage>> {
    let (c, k0, k1) = protocol.trial_inputs(trial);
    let out = protocol.run(trial, c, &k0, &k1)?;
    let Some(sets) = &out.views.bob.sets else { return Ok(None) };
    let ordered = bob_order_sets(sets, c);
    let hashes = protocol.hashes(&out.transcript().header)?;
    let generator = &protocol.code().generator;
    // Row p of M_iᵀ is the pad contribution of the p-th secret-set bit.
    let maps = [
        hashes[0].matrix().transpose().mul(generator)?,
        hashes[1].matrix().transpose().mul(generator)?,
    ];
    let (y, z) = (&out.views.bob.y, &out.views.eve.z);
    let m = protocol.sizes().m as f64;
    let leak = |i: usize, unseen: &dyn Fn(usize) -> bool| m - pad_rank(&ordered, i, &maps[i], unseen) as f64;
    let cbar = !c as usize;
    let eve_unseen = |p: usize| z.is_erased(p);
    let both_unseen = |p: usize| z.is_erased(p) && y.is_erased(p);
    let bob_unseen = |p: usize| y.is_erased(p);
    Ok(Some(TrialLeakage {
        c,
        alice_feature: ordered.l00.first() < ordered.l10.first(),
        eve: leak(0, &eve_unseen) + leak(1, &eve_unseen),
        bob_eve: leak(cbar, &both_unseen),
        bob: leak(cbar, &bob_unseen),
    }))
}

/// Rank of pad `i` as a linear map of the unseen bits of `X`.
fn pad_rank(sets: &OrderedSets, i: usize, map_t: &BitMatrix, unseen: &dyn Fn(usize) -> bool) -> usize {
    let (ot_set, secret_set) = sets.for_string(i);
    let m = map_t.cols();
    let mut rows = Vec::new();
    for (j, &p) in ot_set.iter().enumerate() {
        if unseen(p) {
            let mut e = BitString::zeros(m);
            e.set(j, true);
            rows.push(e);
        }
    }
    for (q, &p) in secret_set.iter().enumerate() {
        if unseen(p) {
            rows.push(map_t.row_bits(q));
        }
    }
    if rows.is_empty() {
        return 0;
    }
    BitMatrix::from_rows(&rows).map(|mat| mat.rank()).unwrap_or(0)
}
