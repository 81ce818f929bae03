//! Subcommand bodies. Each returns a [`Rendered`] report; nothing here writes
//! output.

use serde::Serialize;

use ot_wiretap::analysis::{
    code_entropy_experiment, exact_leakage_with, monte_carlo_leakage, CodeEntropyConfig, CodeEntropyReport,
    ExactConfig, LeakageReport,
};
use ot_wiretap::capacity::{
    c1p, c2p, capacity_grid, capacity_report, outer_bounds, CapacityReport, OuterBounds, DEFAULT_GENERAL_TOL,
};
use ot_wiretap::channel::bec_pair_as_broadcast;
use ot_wiretap::protocol::{Protocol, ProtocolParams, ReplayReport, RunRecord, TrialRecord};
use ot_wiretap::DiscreteBroadcastChannel;

use crate::config::{
    channel, BoundsArgs, CapacityArgs, CodeEntropyArgs, CodeModelArg, LeakageArgs, LeakageMethodArg, ReplayArgs,
    SimulateArgs,
};
use crate::error::CliError;

/// Bumped whenever a JSON field or CSV column changes.
pub const SCHEMA_VERSION: u32 = 1;

/// A rectangular table; the `schema_version` column is prepended on output.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rendered {
    pub json: serde_json::Value,
    pub table: Table,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    command: &'a str,
    #[serde(flatten)]
    body: T,
}

fn envelope<T: Serialize>(command: &str, body: T) -> serde_json::Value {
    serde_json::to_value(Envelope { schema_version: SCHEMA_VERSION, command, body })
        .expect("report types serialize to JSON")
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

#[derive(Serialize)]
struct SizesOut {
    m: usize,
    s: usize,
    k: usize,
}

#[derive(Serialize)]
struct SimulateOut<'a> {
    params: &'a ProtocolParams,
    sizes: SizesOut,
    trials: u64,
    provisioned: u64,
    provisioned_fraction: f64,
    /// Wrong decodes; only provisioned trials decode at all.
    decode_failures: u64,
    records: &'a [TrialRecord],
}

pub fn simulate(args: &SimulateArgs) -> Result<Rendered, CliError> {
    let params = args.params()?;
    let protocol = Protocol::new(params)?;
    let trials = args.trials.unwrap_or(1000);
    if let (Some(trial), Some(path)) = (args.capture_trial, &args.capture_out) {
        let (c, k0, k1) = protocol.trial_inputs(trial);
        let record = RunRecord::capture(&protocol, trial, c, k0, k1)?;
        let text = serde_json::to_string_pretty(&record).expect("run records serialize") + "\n";
        std::fs::write(path, text)
            .map_err(|source| CliError::Io { context: format!("writing {}", path.display()), source })?;
    }
    let sim = protocol.simulate(trials)?;
    let sizes = protocol.sizes();
    let json = envelope(
        "simulate",
        SimulateOut {
            params: &params,
            sizes: SizesOut { m: sizes.m, s: sizes.s, k: sizes.k },
            trials: sim.trials,
            provisioned: sim.provisioned,
            provisioned_fraction: sim.provisioned_fraction,
            decode_failures: sim.decode_failures,
            records: &sim.records,
        },
    );
    let table = Table {
        header: vec!["trial", "c", "provisioned", "decoded_correctly", "bob_erasures", "eve_erasures"],
        rows: sim
            .records
            .iter()
            .map(|r| {
                vec![
                    r.trial.to_string(),
                    (r.c as u8).to_string(),
                    r.provisioned.to_string(),
                    opt(r.decoded_correctly),
                    r.bob_erasures.to_string(),
                    r.eve_erasures.to_string(),
                ]
            })
            .collect(),
    };
    Ok(Rendered { json, table })
}

#[derive(Serialize)]
struct CapacityOut<'a> {
    points: &'a [CapacityReport],
}

pub fn capacity(args: &CapacityArgs) -> Result<Rendered, CliError> {
    let tol = args.tol.unwrap_or(DEFAULT_GENERAL_TOL);
    let points = match args.steps {
        Some(steps) => {
            if args.eps1.is_some() || args.eps2.is_some() {
                return Err(CliError::Usage("--steps sweeps the whole grid; drop --eps1/--eps2".into()));
            }
            capacity_grid(steps, tol)?
        }
        None => vec![capacity_report(channel(args.eps1, args.eps2)?, tol)?],
    };
    let table = Table {
        header: vec![
            "eps1",
            "eps2",
            "c2p",
            "c1p",
            "bound_ixy_given_z",
            "bound_hx_given_yz",
            "bound_hx_given_y",
            "bound_half_eps2",
        ],
        rows: points
            .iter()
            .map(|p| {
                [p.eps1, p.eps2, p.c2p, p.c1p, p.bound_ixy_given_z, p.bound_hx_given_yz, p.bound_hx_given_y, p.bound_half_eps2]
                    .iter()
                    .map(f64::to_string)
                    .collect()
            })
            .collect(),
    };
    Ok(Rendered { json: envelope("capacity", CapacityOut { points: &points }), table })
}

#[derive(Serialize)]
struct ClosedForm {
    c2p: f64,
    c1p: f64,
}

#[derive(Serialize)]
struct BoundsOut {
    channel: String,
    bounds: OuterBounds,
    c2p_bound: f64,
    c1p_bound: f64,
    /// Present for the erasure pair.
    closed_form: Option<ClosedForm>,
}

pub fn bounds(args: &BoundsArgs) -> Result<Rendered, CliError> {
    let tol = args.tol.unwrap_or(DEFAULT_GENERAL_TOL);
    let (label, ch, closed_form, half) = match &args.channel {
        Some(path) => {
            if args.eps1.is_some() || args.eps2.is_some() {
                return Err(CliError::Usage("--channel and --eps1/--eps2 are exclusive".into()));
            }
            let text = std::fs::read_to_string(path)
                .map_err(|source| CliError::Io { context: format!("reading {}", path.display()), source })?;
            let parsed: Result<DiscreteBroadcastChannel, String> =
                if path.extension().is_some_and(|e| e == "json") {
                    serde_json::from_str(&text).map_err(|e| e.to_string())
                } else {
                    toml::from_str(&text).map_err(|e| e.to_string())
                };
            let ch = parsed.map_err(|e| CliError::Usage(format!("channel {}: {e}", path.display())))?;
            ch.validate()?;
            (path.display().to_string(), ch, None, None)
        }
        None => {
            let eps = channel(args.eps1, args.eps2)?;
            let closed = ClosedForm { c2p: c2p(eps), c1p: c1p(eps) };
            (format!("bec-pair({}, {})", eps.eps1, eps.eps2), bec_pair_as_broadcast(eps), Some(closed), Some(eps.eps2 / 2.0))
        }
    };
    let mut b = outer_bounds(&ch, tol)?;
    b.half_eps2 = half;
    let out = BoundsOut { channel: label, c2p_bound: b.c2p_bound(), c1p_bound: b.c1p_bound(), bounds: b, closed_form };
    let table = Table {
        header: vec!["channel", "ixy_given_z", "hx_given_yz", "hx_given_y", "half_eps2", "c2p_bound", "c1p_bound", "converged"],
        rows: vec![vec![
            out.channel.clone(),
            out.bounds.ixy_given_z.to_string(),
            out.bounds.hx_given_yz.to_string(),
            out.bounds.hx_given_y.to_string(),
            opt(out.bounds.half_eps2),
            out.c2p_bound.to_string(),
            out.c1p_bound.to_string(),
            out.bounds.converged.to_string(),
        ]],
    };
    Ok(Rendered { json: envelope("bounds", out), table })
}

#[derive(Serialize)]
struct LeakageOut<'a> {
    params: &'a ProtocolParams,
    report: &'a LeakageReport,
}

pub fn leakage(args: &LeakageArgs) -> Result<Rendered, CliError> {
    let params = args.params()?;
    let report = match args.method.unwrap_or(LeakageMethodArg::Exact) {
        LeakageMethodArg::Exact => {
            let defaults = ExactConfig::default();
            let cfg = ExactConfig {
                n_max: args.n_max.unwrap_or(defaults.n_max),
                atom_budget: args.budget.unwrap_or(defaults.atom_budget),
                trial: 0,
            };
            exact_leakage_with(&params, &cfg)?
        }
        LeakageMethodArg::Mc => monte_carlo_leakage(&params, args.trials.unwrap_or(10_000))?,
    };
    let se = report.std_errors.as_ref();
    let table = Table {
        header: vec![
            "method",
            "n",
            "m",
            "s",
            "k",
            "trials",
            "j_probability",
            "i_c_given_aliceview",
            "i_kcbar_given_bob_eve",
            "i_keys_choice_given_eve",
            "i_kcbar_given_bob",
            "se_i_c_given_aliceview",
            "se_i_kcbar_given_bob_eve",
            "se_i_keys_choice_given_eve",
            "se_i_kcbar_given_bob",
        ],
        rows: vec![vec![
            serde_json::to_value(report.method).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
            report.n.to_string(),
            report.m.to_string(),
            report.s.to_string(),
            report.k.to_string(),
            report.trials.to_string(),
            report.j_probability.to_string(),
            report.i_c_given_aliceview.to_string(),
            report.i_kcbar_given_bob_eve.to_string(),
            report.i_keys_choice_given_eve.to_string(),
            report.i_kcbar_given_bob.to_string(),
            opt(se.map(|e| e.i_c_given_aliceview)),
            opt(se.map(|e| e.i_kcbar_given_bob_eve)),
            opt(se.map(|e| e.i_keys_choice_given_eve)),
            opt(se.map(|e| e.i_kcbar_given_bob)),
        ]],
    };
    Ok(Rendered { json: envelope("leakage", LeakageOut { params: &params, report: &report }), table })
}

pub fn code_entropy(args: &CodeEntropyArgs) -> Result<Rendered, CliError> {
    let cfg = CodeEntropyConfig {
        n: args.n.unwrap_or(20),
        r: args.r.unwrap_or(0.4),
        r_prime: args.r_prime.unwrap_or(0.7),
        beta: args.beta.unwrap_or(0.2),
        codes: args.codes.unwrap_or(200),
        subsets: args.subsets.unwrap_or(100),
        seed: args.seed.unwrap_or(0),
        model: args.model.unwrap_or(CodeModelArg::Codebook).model(),
    };
    let report: CodeEntropyReport = code_entropy_experiment(&cfg)?;
    let table = Table {
        header: vec![
            "model",
            "n",
            "r",
            "r_prime",
            "beta",
            "codes_tested",
            "subsets_per_code",
            "threshold",
            "pass_fraction",
            "min_entropy_seen",
        ],
        rows: vec![vec![
            serde_json::to_value(report.model).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
            report.n.to_string(),
            report.r.to_string(),
            report.r_prime.to_string(),
            report.beta.to_string(),
            report.codes_tested.to_string(),
            report.subsets_per_code.to_string(),
            report.threshold.to_string(),
            report.pass_fraction.to_string(),
            opt(report.min_entropy_seen),
        ]],
    };
    Ok(Rendered { json: envelope("code-entropy", &report), table })
}

pub fn replay(args: &ReplayArgs) -> Result<(Rendered, bool), CliError> {
    let path = args.record.as_ref().ok_or_else(|| CliError::Usage("replay needs --record <path>".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|source| CliError::Io { context: format!("reading {}", path.display()), source })?;
    let record: RunRecord =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("record {}: {e}", path.display())))?;
    let report: ReplayReport = record.replay()?;
    let ok = report.transcript_matches && report.decoded_correctly != Some(false);
    let table = Table {
        header: vec!["trial", "transcript_matches", "provisioned", "decoded_correctly"],
        rows: vec![vec![
            record.trial.to_string(),
            report.transcript_matches.to_string(),
            report.provisioned.to_string(),
            opt(report.decoded_correctly),
        ]],
    };
    Ok((Rendered { json: envelope("replay", &report), table }, ok))
}
