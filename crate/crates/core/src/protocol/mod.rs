//! One-out-of-two string OT over the wiretapped erasure channel.
//!
//! A run proceeds in a fixed pattern: Alice sends uniform bits `X^n` through
//! both erasure channels; Bob partitions his output into good and bad OT-key
//! and secret-key sets and publishes them in an order set by his choice bit;
//! Alice hashes the secret-key sets into short keys, stretches them with the
//! public code, and publishes both strings padded by `T_i ⊕ S̃_i`; Bob strips
//! the pad he knows.
//!
//! In 1-privacy mode the only change is where the bad secret-key set is drawn
//! from (see [`OnePrivacyRegime`]).

mod params;
mod sets;
mod transcript;

pub(crate) use params::ceil_count;
pub use params::{OnePrivacyRegime, PrivacyMode, ProtocolParams, Requirement, Sizes};
pub use sets::{alice_compute_ot_keys, bob_order_sets, bob_select_sets, IndexSets, OrderedSets};
pub use transcript::{
    decode_payload, encode_abort, encode_sets, encode_string, Message, Payload, Sender, Transcript,
    TranscriptHeader, TRANSCRIPT_VERSION,
};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::{BitString, ErasureString};
use crate::channel::transmit_broadcast;
use crate::error::{Error, Result};
use crate::keymat::{self, derive_secret_key, expand, HashSpec, KeyMaterial, LinearCode};
use crate::rng::{self, Stream};

/// Alice's view `U_k`. Her private randomness is exactly `X^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AliceView {
    pub k0: BitString,
    pub k1: BitString,
    pub x: BitString,
    pub transcript: Transcript,
}

/// Bob's view `V_k`. His private randomness is his set selection, `None`
/// when provisioning failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BobView {
    pub c: bool,
    pub sets: Option<IndexSets>,
    pub transcript: Transcript,
    pub y: ErasureString,
}

/// Eve's view `W_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EveView {
    pub transcript: Transcript,
    pub z: ErasureString,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Views {
    pub alice: AliceView,
    pub bob: BobView,
    pub eve: EveView,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProtocolOutcome {
    /// Provisioning indicator `J`.
    pub provisioned: bool,
    /// Bob's decoded string, `None` on abort.
    pub khat: Option<BitString>,
    pub views: Views,
    /// Alice's keys and ciphertexts, `None` on abort.
    pub keymat: Option<KeyMaterial>,
}

impl ProtocolOutcome {
    pub fn transcript(&self) -> &Transcript {
        &self.views.eve.transcript
    }
}

/// A configured protocol instance: validated parameters plus the public code.
#[derive(Clone, Debug)]
pub struct Protocol {
    params: ProtocolParams,
    sizes: Sizes,
    code: LinearCode,
}

impl Protocol {
    pub fn new(params: ProtocolParams) -> Result<Self> {
        let sizes = params.sizes()?;
        let code = keymat::sample_code(sizes.k, sizes.m, params.code_seed)?;
        Ok(Self { params, sizes, code })
    }

    pub fn params(&self) -> &ProtocolParams {
        &self.params
    }

    pub fn sizes(&self) -> &Sizes {
        &self.sizes
    }

    pub fn code(&self) -> &LinearCode {
        &self.code
    }

    /// Public header of trial `trial`: sizes plus code and hash seeds.
    pub fn header(&self, trial: u64) -> TranscriptHeader {
        let mut public = rng::stream(self.params.seed, trial, Stream::Public);
        TranscriptHeader {
            version: TRANSCRIPT_VERSION,
            n: self.params.n,
            m: self.sizes.m,
            s: self.sizes.s,
            k: self.sizes.k,
            code_seed: self.code.seed,
            hash0_seed: keymat::draw_seed(&mut public),
            hash1_seed: keymat::draw_seed(&mut public),
        }
    }

    pub fn hashes(&self, header: &TranscriptHeader) -> Result<[HashSpec; 2]> {
        Ok([
            HashSpec::toeplitz(self.sizes.k, self.sizes.s, header.hash0_seed)?,
            HashSpec::toeplitz(self.sizes.k, self.sizes.s, header.hash1_seed)?,
        ])
    }

    /// Alice's side after Bob's sets arrive.
    pub fn alice_key_material(
        &self,
        x: &BitString,
        sets: &OrderedSets,
        hashes: &[HashSpec; 2],
        k0: &BitString,
        k1: &BitString,
    ) -> Result<KeyMaterial> {
        let (t0, t1) = alice_compute_ot_keys(x, sets);
        let s0 = derive_secret_key(&x.restrict(&sets.l01), self.sizes.k, &hashes[0])?;
        let s1 = derive_secret_key(&x.restrict(&sets.l11), self.sizes.k, &hashes[1])?;
        let s0_expanded = expand(&self.code, &s0)?;
        let s1_expanded = expand(&self.code, &s1)?;
        let (ktilde0, ktilde1) = keymat::encrypt_strings(k0, k1, &t0, &t1, &s0_expanded, &s1_expanded)?;
        Ok(KeyMaterial { t0, t1, s0, s1, s0_expanded, s1_expanded, ktilde0, ktilde1 })
    }

    /// Bob recovers `K_C` from his own view only.
    pub fn bob_decode(&self, view: &BobView) -> Result<Option<BitString>> {
        let Some(sets) = &view.sets else { return Ok(None) };
        let Some((c0, c1)) = view.transcript.encrypted_strings()? else { return Ok(None) };
        let known = |idx: &[usize]| -> Result<BitString> {
            let bits = idx
                .iter()
                .map(|&i| view.y.get(i).bit().ok_or_else(|| Error::Transcript(format!("Bob's position {i} is erased"))))
                .collect::<Result<Vec<_>>>()?;
            Ok(BitString::from_bools(&bits))
        };
        let t = known(&sets.good)?;
        let hashes = self.hashes(&view.transcript.header)?;
        let secret = derive_secret_key(&known(&sets.good_secret)?, self.sizes.k, &hashes[view.c as usize])?;
        let pad = expand(&self.code, &secret)?;
        let ktilde = if view.c { c1 } else { c0 };
        keymat::decrypt_string(&ktilde, &t, &pad).map(Some)
    }

    /// One full run. All randomness comes from the `(seed, trial)` streams.
    pub fn run(&self, trial: u64, c: bool, k0: &BitString, k1: &BitString) -> Result<ProtocolOutcome> {
        let m = self.sizes.m;
        for k in [k0, k1] {
            if k.len() != m {
                return Err(Error::LengthMismatch { expected: m, actual: k.len() });
            }
        }
        let seed = self.params.seed;
        let x = BitString::random(self.params.n, &mut rng::stream(seed, trial, Stream::Alice));
        let (y, z) = transmit_broadcast(&x, self.params.eps, &mut rng::stream(seed, trial, Stream::Channel));
        let mut transcript = Transcript::new(self.header(trial));

        let selection =
            bob_select_sets(&y, &self.sizes, self.sizes.regime, &mut rng::stream(seed, trial, Stream::Bob));
        let (sets, keymat) = match selection {
            Ok(sets) => {
                let ordered = bob_order_sets(&sets, c);
                transcript.push(Sender::Bob, encode_sets(&ordered));
                let hashes = self.hashes(&transcript.header)?;
                let km = self.alice_key_material(&x, &ordered, &hashes, k0, k1)?;
                transcript.push(Sender::Alice, encode_string(&km.ktilde0));
                transcript.push(Sender::Alice, encode_string(&km.ktilde1));
                (Some(sets), Some(km))
            }
            Err(Error::InsufficientErasures { .. } | Error::InsufficientUnerasures { .. }) => {
                transcript.push(Sender::Bob, encode_abort());
                (None, None)
            }
            Err(e) => return Err(e),
        };

        let bob = BobView { c, sets, transcript: transcript.clone(), y };
        let khat = self.bob_decode(&bob)?;
        let views = Views {
            alice: AliceView { k0: k0.clone(), k1: k1.clone(), x, transcript: transcript.clone() },
            bob,
            eve: EveView { transcript, z },
        };
        Ok(ProtocolOutcome { provisioned: keymat.is_some(), khat, views, keymat })
    }

    /// Uniform inputs `(C, K0, K1)` for trial `trial`.
    pub fn trial_inputs(&self, trial: u64) -> (bool, BitString, BitString) {
        let mut r = rng::stream(self.params.seed, trial, Stream::Inputs);
        let c = r.gen();
        let k0 = BitString::random(self.sizes.m, &mut r);
        let k1 = BitString::random(self.sizes.m, &mut r);
        (c, k0, k1)
    }

    /// Runs `trials` independent trials in parallel with uniform inputs.
    pub fn simulate(&self, trials: u64) -> Result<Simulation> {
        let records = (0..trials)
            .into_par_iter()
            .map(|trial| {
                let (c, k0, k1) = self.trial_inputs(trial);
                let out = self.run(trial, c, &k0, &k1)?;
                let expected = if c { &k1 } else { &k0 };
                Ok(TrialRecord {
                    trial,
                    c,
                    provisioned: out.provisioned,
                    decoded_correctly: out.khat.as_ref().map(|k| k == expected),
                    bob_erasures: out.views.bob.y.erased_count(),
                    eve_erasures: out.views.eve.z.erased_count(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Simulation::from_records(records))
    }
}

/// Runs trial 0 of a fresh protocol instance.
pub fn run_protocol(params: ProtocolParams, c: bool, k0: &BitString, k1: &BitString) -> Result<ProtocolOutcome> {
    Protocol::new(params)?.run(0, c, k0, k1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub c: bool,
    pub provisioned: bool,
    /// `None` when the run aborted.
    pub decoded_correctly: Option<bool>,
    pub bob_erasures: usize,
    pub eve_erasures: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Simulation {
    pub trials: u64,
    pub provisioned: u64,
    pub provisioned_fraction: f64,
    pub decode_failures: u64,
    pub records: Vec<TrialRecord>,
}

impl Simulation {
    fn from_records(records: Vec<TrialRecord>) -> Self {
        let trials = records.len() as u64;
        let provisioned = records.iter().filter(|r| r.provisioned).count() as u64;
        let decode_failures = records.iter().filter(|r| r.decoded_correctly == Some(false)).count() as u64;
        Self {
            trials,
            provisioned,
            provisioned_fraction: if trials == 0 { 0.0 } else { provisioned as f64 / trials as f64 },
            decode_failures,
            records,
        }
    }
}

/// Everything needed to re-execute one run and check it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub params: ProtocolParams,
    pub trial: u64,
    pub c: bool,
    pub k0: BitString,
    pub k1: BitString,
    pub transcript: Transcript,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub transcript_matches: bool,
    pub provisioned: bool,
    /// `None` when the run aborted.
    pub decoded_correctly: Option<bool>,
}

impl RunRecord {
    pub fn capture(protocol: &Protocol, trial: u64, c: bool, k0: BitString, k1: BitString) -> Result<Self> {
        let out = protocol.run(trial, c, &k0, &k1)?;
        Ok(Self { params: *protocol.params(), trial, c, k0, k1, transcript: out.transcript().clone() })
    }

    /// Re-runs the recorded inputs and compares transcripts and decoding.
    pub fn replay(&self) -> Result<ReplayReport> {
        let protocol = Protocol::new(self.params)?;
        let out = protocol.run(self.trial, self.c, &self.k0, &self.k1)?;
        let expected = if self.c { &self.k1 } else { &self.k0 };
        Ok(ReplayReport {
            transcript_matches: out.transcript() == &self.transcript,
            provisioned: out.provisioned,
            decoded_correctly: out.khat.as_ref().map(|k| k == expected),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ChannelParams;

    fn params(eps1: f64, eps2: f64, mode: PrivacyMode) -> ProtocolParams {
        ProtocolParams::new(400, 0.05, 0.1, mode, ChannelParams::new(eps1, eps2).unwrap(), 5)
    }

    #[test]
    fn provisioned_runs_decode_exactly() {
        let p = Protocol::new(params(0.5, 0.5, PrivacyMode::TwoPrivacy)).unwrap();
        for trial in 0..200 {
            let (c, k0, k1) = p.trial_inputs(trial);
            let out = p.run(trial, c, &k0, &k1).unwrap();
            if out.provisioned {
                assert_eq!(out.khat.as_ref().unwrap(), if c { &k1 } else { &k0 });
                out.views.bob.sets.as_ref().unwrap().validate(400, p.sizes()).unwrap();
            } else {
                assert!(out.khat.is_none());
            }
        }
    }

    #[test]
    fn one_privacy_regimes_decode() {
        for (e1, e2) in [(0.2, 0.6), (0.4, 0.6), (0.7, 0.6)] {
            let p = Protocol::new(params(e1, e2, PrivacyMode::OnePrivacy)).unwrap();
            let sim = p.simulate(100).unwrap();
            assert!(sim.provisioned > 90, "({e1}, {e2}): {}", sim.provisioned);
            assert_eq!(sim.decode_failures, 0);
        }
    }

    #[test]
    fn eve_blind_reduces_to_plain_erasure_ot() {
        let p = Protocol::new(params(0.5, 1.0, PrivacyMode::TwoPrivacy)).unwrap();
        let sim = p.simulate(50).unwrap();
        assert_eq!(sim.decode_failures, 0);
        assert!(sim.provisioned > 45);
    }

    #[test]
    fn equal_strings_decode_regardless_of_choice() {
        let p = Protocol::new(params(0.5, 0.5, PrivacyMode::TwoPrivacy)).unwrap();
        let k = BitString::random(p.sizes().m, &mut rng::seeded(1));
        for c in [false, true] {
            let out = p.run(3, c, &k, &k).unwrap();
            assert_eq!(out.khat.unwrap(), k);
        }
    }

    #[test]
    fn abort_when_unprovisioned() {
        // Bob never sees an erasure, so he cannot build B
        let p = Protocol::new(params(0.0, 0.5, PrivacyMode::TwoPrivacy)).unwrap();
        let (c, k0, k1) = p.trial_inputs(0);
        let out = p.run(0, c, &k0, &k1).unwrap();
        assert!(!out.provisioned && out.khat.is_none() && out.keymat.is_none());
        assert_eq!(out.transcript().messages().len(), 1);
        assert_eq!(out.transcript().ordered_sets().unwrap(), None);
    }

    #[test]
    fn views_share_transcript_and_eve_sees_no_secrets() {
        let p = Protocol::new(params(0.5, 0.5, PrivacyMode::TwoPrivacy)).unwrap();
        let (c, k0, k1) = p.trial_inputs(9);
        let out = p.run(9, c, &k0, &k1).unwrap();
        assert_eq!(out.views.alice.transcript, out.views.bob.transcript);
        assert_eq!(out.views.bob.transcript, out.views.eve.transcript);
        let msgs = out.transcript().messages();
        assert_eq!(msgs.len(), 3);
        assert_eq!(msgs.iter().map(|m| m.sender).collect::<Vec<_>>(), [Sender::Bob, Sender::Alice, Sender::Alice]);
        let km = out.keymat.as_ref().unwrap();
        assert_eq!(out.transcript().encrypted_strings().unwrap(), Some((km.ktilde0.clone(), km.ktilde1.clone())));
        assert_eq!(km.s0_expanded, expand(p.code(), &km.s0).unwrap());
        assert_eq!(km.ktilde0, k0.xor(&km.t0).unwrap().xor(&km.s0_expanded).unwrap());
    }

    #[test]
    fn runs_are_deterministic() {
        let p = Protocol::new(params(0.5, 0.5, PrivacyMode::TwoPrivacy)).unwrap();
        let (c, k0, k1) = p.trial_inputs(4);
        assert_eq!(p.run(4, c, &k0, &k1).unwrap(), p.run(4, c, &k0, &k1).unwrap());
        assert_eq!(p.simulate(20).unwrap(), p.simulate(20).unwrap());
    }

    #[test]
    fn wrong_string_length_rejected() {
        let p = Protocol::new(params(0.5, 0.5, PrivacyMode::TwoPrivacy)).unwrap();
        let k = BitString::zeros(3);
        assert!(matches!(p.run(0, false, &k, &k), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn replay_verifies_and_detects_tampering() {
        let p = Protocol::new(params(0.5, 0.5, PrivacyMode::TwoPrivacy)).unwrap();
        let (c, k0, k1) = p.trial_inputs(2);
        let rec = RunRecord::capture(&p, 2, c, k0, k1).unwrap();
        let json = serde_json::to_string(&rec).unwrap();
        let back: RunRecord = serde_json::from_str(&json).unwrap();
        let report = back.replay().unwrap();
        assert!(report.transcript_matches);
        assert_eq!(report.decoded_correctly, Some(true));
        let mut tampered = back.clone();
        tampered.c = !tampered.c;
        assert!(!tampered.replay().unwrap().transcript_matches);
    }
}
