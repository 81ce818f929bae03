use serde::{Deserialize, Serialize};

use crate::channel::ChannelParams;
use crate::error::{Error, Result};

/// Which secrecy notion the run targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PrivacyMode {
    /// Eve may collude with either party.
    TwoPrivacy,
    /// No collusion with Eve.
    OnePrivacy,
}

/// Where Bob draws the bad secret-key set from in 1-privacy mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OnePrivacyRegime {
    /// `eps1 < eps2 / 2`: leftover unerased positions.
    Unerased,
    /// `eps2 / 2 <= eps1 < 1/2`: any leftover position.
    Mixed,
    /// `eps1 >= 1/2`: leftover erased positions.
    Erased,
}

impl OnePrivacyRegime {
    pub fn for_channel(eps: ChannelParams) -> Self {
        if eps.eps1 < eps.eps2 / 2.0 {
            Self::Unerased
        } else if eps.eps1 < 0.5 {
            Self::Mixed
        } else {
            Self::Erased
        }
    }
}

/// Slack subtracted before rounding set sizes up, so that `n·r` computed in
/// floating point as `1.0000000000000002` still yields one bit.
const CEIL_SLACK: f64 = 1e-9;

pub(crate) fn ceil_count(x: f64) -> usize {
    (x - CEIL_SLACK).ceil().max(0.0) as usize
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolParams {
    /// Channel uses.
    pub n: usize,
    /// String bits per channel use.
    pub rate: f64,
    /// Provisioning slack, strictly between 0 and 1.
    pub delta: f64,
    pub mode: PrivacyMode,
    pub eps: ChannelParams,
    /// Seeds the private and channel randomness of every trial.
    pub seed: u64,
    /// Public seed for the expansion code.
    pub code_seed: u64,
    /// Forces a 1-privacy regime instead of deriving it from `eps`.
    #[serde(default)]
    pub regime_override: Option<OnePrivacyRegime>,
}

impl ProtocolParams {
    pub fn new(n: usize, rate: f64, delta: f64, mode: PrivacyMode, eps: ChannelParams, seed: u64) -> Self {
        Self {
            n,
            rate,
            delta,
            mode,
            eps,
            seed,
            code_seed: seed ^ 0x9e37_79b9_7f4a_7c15,
            regime_override: None,
        }
    }

    pub fn with_regime(mut self, regime: OnePrivacyRegime) -> Self {
        self.regime_override = Some(regime);
        self
    }

    pub fn with_code_seed(mut self, code_seed: u64) -> Self {
        self.code_seed = code_seed;
        self
    }

    /// `None` in 2-privacy mode.
    pub fn regime(&self) -> Option<OnePrivacyRegime> {
        match self.mode {
            PrivacyMode::TwoPrivacy => None,
            PrivacyMode::OnePrivacy => {
                Some(self.regime_override.unwrap_or_else(|| OnePrivacyRegime::for_channel(self.eps)))
            }
        }
    }

    /// Checks the parameters and computes the set and key sizes.
    pub fn sizes(&self) -> Result<Sizes> {
        self.eps.validate()?;
        if !(self.rate > 0.0) || !self.rate.is_finite() {
            return Err(Error::InvalidParameter(format!("rate {} must be positive", self.rate)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidParameter(format!("delta {} must lie in (0, 1)", self.delta)));
        }
        if self.n == 0 {
            return Err(Error::InvalidParameter("blocklength must be positive".into()));
        }
        let eps2_tilde = self.eps.eps2 * (1.0 - self.delta);
        if eps2_tilde <= 0.0 {
            return Err(Error::InvalidParameter("eps2 = 0 leaves no secret-key rate".into()));
        }
        let nr = self.n as f64 * self.rate;
        let m = ceil_count(nr);
        let k = ceil_count(nr * (1.0 - eps2_tilde));
        let s = ceil_count(nr * (1.0 - eps2_tilde) / eps2_tilde);
        if m == 0 {
            return Err(Error::InvalidParameter(format!("n·r = {nr} gives an empty string")));
        }
        let regime = self.regime();
        let sizes = Sizes { eps2_tilde, m, s, k, regime };
        if sizes.total_positions() > self.n {
            return Err(Error::InvalidParameter(format!(
                "sets need {} positions but n = {}",
                sizes.total_positions(),
                self.n
            )));
        }
        Ok(sizes)
    }
}

/// Derived sizes of one protocol instance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sizes {
    pub eps2_tilde: f64,
    /// String length `ceil(n·r)`.
    pub m: usize,
    /// Secret-key set size `ceil(n·r·(1 - ε̃2)/ε̃2)`.
    pub s: usize,
    /// Secret-key length `ceil(n·r·(1 - ε̃2))`.
    pub k: usize,
    pub regime: Option<OnePrivacyRegime>,
}

/// How many erased and unerased positions Bob needs, and how many in total.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Requirement {
    pub erased: usize,
    pub unerased: usize,
    pub total: usize,
}

impl Sizes {
    pub fn requirement(&self) -> Requirement {
        let (m, s) = (self.m, self.s);
        match self.regime {
            None | Some(OnePrivacyRegime::Erased) => {
                Requirement { erased: m + s, unerased: m + s, total: 2 * (m + s) }
            }
            Some(OnePrivacyRegime::Unerased) => {
                Requirement { erased: m, unerased: m + 2 * s, total: 2 * (m + s) }
            }
            Some(OnePrivacyRegime::Mixed) => Requirement { erased: m, unerased: m + s, total: 2 * (m + s) },
        }
    }

    pub fn total_positions(&self) -> usize {
        2 * (self.m + self.s)
    }

    /// Whether Bob can build all four sets from `erased` erased and `unerased`
    /// unerased positions.
    pub fn provisioned(&self, erased: usize, unerased: usize) -> bool {
        let req = self.requirement();
        erased >= req.erased && unerased >= req.unerased && erased + unerased >= req.total
    }
}
