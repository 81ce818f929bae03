//! Verification harness: exact and Monte Carlo leakage, provisioning tails,
//! and the random-code entropy experiment.

mod codes;
mod entropy;
mod exact;
mod montecarlo;
mod provisioning;

pub use codes::{
    code_entropy_experiment, restriction_entropy, CodeEntropyConfig, CodeEntropyReport, CodeModel, MAX_CODEBOOK_BITS,
};
pub use entropy::{entropy, entropy_of_counts, plug_in_mutual_information, plug_in_standard_error};
pub use exact::{
    exact_leakage, exact_leakage_with, ExactConfig, DEFAULT_ATOM_BUDGET, DEFAULT_N_MAX_EXACT, MAX_EXACT_STRING_BITS,
};
pub use montecarlo::{monte_carlo_leakage, MIN_MONTE_CARLO_TRIALS};
pub use provisioning::provisioning_probability;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Negative mutual information within this of zero is rounding noise.
const CLIP_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LeakageMethod {
    ExactEnumeration,
    MonteCarlo,
}

/// Secrecy functionals of one configuration, in bits, all conditioned on `J = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeakageReport {
    pub method: LeakageMethod,
    pub n: usize,
    pub m: usize,
    pub s: usize,
    pub k: usize,
    /// Zero for exact enumeration.
    pub trials: u64,
    /// `P(J = 1)`, exact or the empirical fraction.
    pub j_probability: f64,
    /// Weighted atoms visited by enumeration.
    pub atoms: Option<f64>,
    /// `I(C; U_k)`: what Alice's view says about Bob's choice.
    pub i_c_given_aliceview: f64,
    /// `I(K_C̄; V_k, W_k)`: Bob colluding with Eve against the other string.
    pub i_kcbar_given_bob_eve: f64,
    /// `I(K0, K1, C; W_k)`: Eve alone.
    pub i_keys_choice_given_eve: f64,
    /// `I(K_C̄; V_k)`: Bob alone.
    pub i_kcbar_given_bob: f64,
    /// Present for Monte Carlo estimates.
    pub std_errors: Option<LeakageErrors>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeakageErrors {
    pub i_c_given_aliceview: f64,
    pub i_kcbar_given_bob_eve: f64,
    pub i_keys_choice_given_eve: f64,
    pub i_kcbar_given_bob: f64,
}

pub(crate) fn clip_information(value: f64) -> Result<f64> {
    if !value.is_finite() || value < -CLIP_TOLERANCE {
        return Err(Error::InvariantViolated(format!("mutual information {value} is negative or not finite")));
    }
    Ok(value.max(0.0))
}
