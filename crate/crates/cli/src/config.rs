//! Subcommand parameters and the config file.
//!
//! Every parameter is optional at parse time so that flags, the config file
//! and built-in defaults can be layered in that order of precedence.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use ot_wiretap::analysis::CodeModel;
use ot_wiretap::protocol::{OnePrivacyRegime, PrivacyMode, ProtocolParams};
use ot_wiretap::ChannelParams;

use crate::error::CliError;

macro_rules! layered {
    ($ty:ident { $($field:ident),* $(,)? }) => {
        impl $ty {
            /// Fills every field not given on the command line from `file`.
            pub fn layer(self, file: Option<Self>) -> Self {
                let Some(file) = file else { return self };
                Self { $($field: self.$field.or(file.$field)),* }
            }
        }
    };
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum Format {
    #[serde(rename = "json")]
    Json,
    #[serde(rename = "csv")]
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum ModeArg {
    #[value(name = "2p")]
    #[serde(rename = "2p")]
    TwoPrivacy,
    #[value(name = "1p")]
    #[serde(rename = "1p")]
    OnePrivacy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegimeArg {
    Unerased,
    Mixed,
    Erased,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LeakageMethodArg {
    Exact,
    Mc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CodeModelArg {
    Codebook,
    Linear,
}

/// Top-level config file: optional output settings plus one table per subcommand.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct ExperimentConfig {
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub simulate: Option<SimulateArgs>,
    pub capacity: Option<CapacityArgs>,
    pub bounds: Option<BoundsArgs>,
    pub leakage: Option<LeakageArgs>,
    pub code_entropy: Option<CodeEntropyArgs>,
    pub replay: Option<ReplayArgs>,
}

impl ExperimentConfig {
    /// Reads JSON when the extension is `.json`, TOML otherwise.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| CliError::Io { context: format!("reading {}", path.display()), source })?;
        let parsed = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| e.to_string())
        } else {
            toml::from_str(&text).map_err(|e| e.to_string())
        };
        parsed.map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }
}

#[derive(Args, Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct SimulateArgs {
    #[arg(long)]
    pub eps1: Option<f64>,
    #[arg(long)]
    pub eps2: Option<f64>,
    /// Channel uses per trial.
    #[arg(long)]
    pub n: Option<usize>,
    /// String bits per channel use.
    #[arg(long)]
    pub rate: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Override the 1-privacy regime implied by the channel.
    #[arg(long, value_enum)]
    pub regime: Option<RegimeArg>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub code_seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<u64>,
    /// Also write the full record of this trial, for `replay`.
    #[arg(long, requires = "capture_out")]
    pub capture_trial: Option<u64>,
    #[arg(long)]
    pub capture_out: Option<PathBuf>,
}

layered!(SimulateArgs { eps1, eps2, n, rate, delta, mode, regime, seed, code_seed, trials, capture_trial, capture_out });

#[derive(Args, Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct CapacityArgs {
    #[arg(long)]
    pub eps1: Option<f64>,
    #[arg(long)]
    pub eps2: Option<f64>,
    /// Sweep the (steps+1) x (steps+1) grid over [0,1]^2 instead of one point.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Optimizer tolerance for the numerical bounds.
    #[arg(long)]
    pub tol: Option<f64>,
}

layered!(CapacityArgs { eps1, eps2, steps, tol });

#[derive(Args, Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct BoundsArgs {
    /// A broadcast channel (JSON or TOML); defaults to the erasure pair given by eps1, eps2.
    #[arg(long)]
    pub channel: Option<PathBuf>,
    #[arg(long)]
    pub eps1: Option<f64>,
    #[arg(long)]
    pub eps2: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
}

layered!(BoundsArgs { channel, eps1, eps2, tol });

#[derive(Args, Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct LeakageArgs {
    #[arg(long, value_enum)]
    pub method: Option<LeakageMethodArg>,
    #[arg(long)]
    pub eps1: Option<f64>,
    #[arg(long)]
    pub eps2: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Defaults to 1/n, a one-bit string.
    #[arg(long)]
    pub rate: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long, value_enum)]
    pub regime: Option<RegimeArg>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub code_seed: Option<u64>,
    /// Monte Carlo trials.
    #[arg(long)]
    pub trials: Option<u64>,
    /// Largest blocklength exact enumeration accepts.
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Largest number of weighted atoms exact enumeration visits.
    #[arg(long)]
    pub budget: Option<f64>,
}

layered!(LeakageArgs {
    method, eps1, eps2, n, rate, delta, mode, regime, seed, code_seed, trials, n_max, budget
});

#[derive(Args, Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct CodeEntropyArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub r_prime: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub codes: Option<usize>,
    #[arg(long)]
    pub subsets: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub model: Option<CodeModelArg>,
}

layered!(CodeEntropyArgs { n, r, r_prime, beta, codes, subsets, seed, model });

#[derive(Args, Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct ReplayArgs {
    /// A run record written by `simulate --capture-trial`.
    #[arg(long)]
    pub record: Option<PathBuf>,
}

layered!(ReplayArgs { record });

fn mode(arg: Option<ModeArg>) -> PrivacyMode {
    match arg.unwrap_or(ModeArg::TwoPrivacy) {
        ModeArg::TwoPrivacy => PrivacyMode::TwoPrivacy,
        ModeArg::OnePrivacy => PrivacyMode::OnePrivacy,
    }
}

fn regime(arg: RegimeArg) -> OnePrivacyRegime {
    match arg {
        RegimeArg::Unerased => OnePrivacyRegime::Unerased,
        RegimeArg::Mixed => OnePrivacyRegime::Mixed,
        RegimeArg::Erased => OnePrivacyRegime::Erased,
    }
}

pub fn channel(eps1: Option<f64>, eps2: Option<f64>) -> Result<ChannelParams, CliError> {
    Ok(ChannelParams::new(eps1.unwrap_or(0.5), eps2.unwrap_or(0.5))?)
}

#[allow(clippy::too_many_arguments)]
fn protocol_params(
    eps1: Option<f64>,
    eps2: Option<f64>,
    n: usize,
    rate: f64,
    delta: Option<f64>,
    mode_arg: Option<ModeArg>,
    regime_arg: Option<RegimeArg>,
    seed: Option<u64>,
    code_seed: Option<u64>,
) -> Result<ProtocolParams, CliError> {
    let mode = mode(mode_arg);
    if regime_arg.is_some() && mode == PrivacyMode::TwoPrivacy {
        return Err(CliError::Usage("--regime only applies to --mode 1p".into()));
    }
    let mut params = ProtocolParams::new(n, rate, delta.unwrap_or(0.1), mode, channel(eps1, eps2)?, seed.unwrap_or(0));
    if let Some(r) = regime_arg {
        params = params.with_regime(regime(r));
    }
    if let Some(c) = code_seed {
        params = params.with_code_seed(c);
    }
    params.sizes()?;
    Ok(params)
}

impl SimulateArgs {
    pub fn params(&self) -> Result<ProtocolParams, CliError> {
        protocol_params(
            self.eps1,
            self.eps2,
            self.n.unwrap_or(2000),
            self.rate.unwrap_or(0.2),
            self.delta,
            self.mode,
            self.regime,
            self.seed,
            self.code_seed,
        )
    }
}

impl LeakageArgs {
    pub fn params(&self) -> Result<ProtocolParams, CliError> {
        let n = self.n.unwrap_or(6);
        protocol_params(
            self.eps1,
            self.eps2,
            n,
            self.rate.unwrap_or(1.0 / n as f64),
            self.delta,
            self.mode,
            self.regime,
            self.seed,
            self.code_seed,
        )
    }
}

impl CodeModelArg {
    pub fn model(self) -> CodeModel {
        match self {
            CodeModelArg::Codebook => CodeModel::RandomCodebook,
            CodeModelArg::Linear => CodeModel::RandomLinear,
        }
    }
}
