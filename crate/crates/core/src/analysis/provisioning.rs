//! Exact binomial tails for the probability that Bob can build his sets.

use statrs::function::factorial::ln_binomial;

use crate::error::{check_probability, Result};

/// Relative size below which further tail terms are dropped.
const TERM_CUTOFF: f64 = 1e-20;

/// `P[Bin(n, eps) >= threshold]`.
///
/// Sums the smaller tail outward from its inner end, where terms are
/// largest, by the pmf ratio recurrence; the inner term comes from
/// log-binomials. Thresholds at or below the mode go through the complement.
pub fn provisioning_probability(n: u64, eps: f64, threshold: u64) -> Result<f64> {
    check_probability("eps", eps)?;
    if threshold == 0 {
        return Ok(1.0);
    }
    if threshold > n {
        return Ok(0.0);
    }
    if eps == 0.0 {
        return Ok(0.0);
    }
    if eps == 1.0 {
        return Ok(1.0);
    }
    let mode = ((n + 1) as f64 * eps).floor().min(n as f64) as u64;
    let p = if threshold > mode {
        upper_tail(n, eps, threshold)
    } else {
        1.0 - lower_tail(n, eps, threshold - 1)
    };
    Ok(p.clamp(0.0, 1.0))
}

fn ln_pmf(n: u64, eps: f64, k: u64) -> f64 {
    ln_binomial(n, k) + k as f64 * eps.ln() + (n - k) as f64 * (-eps).ln_1p()
}

/// `Σ_{k >= t} pmf(k)` for `t` above the mode.
fn upper_tail(n: u64, eps: f64, t: u64) -> f64 {
    let odds = eps / (1.0 - eps);
    let mut term = ln_pmf(n, eps, t).exp();
    let mut sum = term;
    for k in t..n {
        term *= (n - k) as f64 / (k + 1) as f64 * odds;
        sum += term;
        if term < sum * TERM_CUTOFF {
            break;
        }
    }
    sum
}

/// `Σ_{k <= t} pmf(k)` for `t` at or below the mode.
fn lower_tail(n: u64, eps: f64, t: u64) -> f64 {
    let odds = (1.0 - eps) / eps;
    let mut term = ln_pmf(n, eps, t).exp();
    let mut sum = term;
    for k in (1..=t).rev() {
        term *= k as f64 / (n - k + 1) as f64 * odds;
        sum += term;
        if term < sum * TERM_CUTOFF {
            break;
        }
    }
    sum
}
