//! OT capacities of the wiretapped erasure channel and the general outer
//! bounds they meet.

mod info;
mod optimize;

pub use info::{
    binary_entropy, conditional_entropy_given_pair, conditional_entropy_given_y, conditional_entropy_given_z,
    conditional_mutual_information, Functional, InputDistribution,
};
pub use optimize::{maximize_over_input, Maximum, DEFAULT_BINARY_TOL, DEFAULT_GENERAL_TOL, ITERATION_CAP};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{bec_pair_as_broadcast, ChannelParams, DiscreteBroadcastChannel};
use crate::error::{Error, Result};

/// 2-private OT capacity: `eps2 · min(eps1, 1 - eps1)`.
pub fn c2p(eps: ChannelParams) -> f64 {
    eps.eps2 * eps.eps1.min(1.0 - eps.eps1)
}

/// 1-private OT capacity.
pub fn c1p(eps: ChannelParams) -> f64 {
    let ChannelParams { eps1, eps2 } = eps;
    if eps1 < eps2 / 2.0 {
        eps1
    } else if eps1 < 0.5 {
        eps2 / 2.0
    } else {
        eps2 * (1.0 - eps1)
    }
}

/// Numerically maximized outer bounds of a general broadcast channel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OuterBounds {
    /// `max I(X; Y | Z)`, bounding both capacities.
    pub ixy_given_z: f64,
    /// `max H(X | Y, Z)`, bounding the 2-private capacity.
    pub hx_given_yz: f64,
    /// `max H(X | Y)`, bounding the 1-private capacity.
    pub hx_given_y: f64,
    /// `eps2 / 2`; only meaningful for the erasure pair, `None` otherwise.
    pub half_eps2: Option<f64>,
    pub converged: bool,
}

impl OuterBounds {
    pub fn c2p_bound(&self) -> f64 {
        self.ixy_given_z.min(self.hx_given_yz)
    }

    pub fn c1p_bound(&self) -> f64 {
        let general = self.ixy_given_z.min(self.hx_given_y);
        self.half_eps2.map_or(general, |h| general.min(h))
    }
}

/// Evaluates the three maximized functionals of `ch`.
pub fn outer_bounds(ch: &DiscreteBroadcastChannel, tol: f64) -> Result<OuterBounds> {
    let ixy = maximize_over_input(Functional::MutualInfoYGivenZ, ch, tol)?;
    let hyz = maximize_over_input(Functional::EntropyGivenYZ, ch, tol)?;
    let hy = maximize_over_input(Functional::EntropyGivenY, ch, tol)?;
    Ok(OuterBounds {
        ixy_given_z: ixy.value,
        hx_given_yz: hyz.value,
        hx_given_y: hy.value,
        half_eps2: None,
        converged: ixy.converged && hyz.converged && hy.converged,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapacityReport {
    pub eps1: f64,
    pub eps2: f64,
    pub c2p: f64,
    pub c1p: f64,
    pub bound_ixy_given_z: f64,
    pub bound_hx_given_yz: f64,
    pub bound_hx_given_y: f64,
    pub bound_half_eps2: f64,
}

impl CapacityReport {
    /// Checks `c2p <= c1p` and that each capacity sits under its bounds, up to `slack`.
    pub fn check_invariants(&self, slack: f64) -> Result<()> {
        let c2p_bound = self.bound_ixy_given_z.min(self.bound_hx_given_yz);
        let c1p_bound = self.bound_ixy_given_z.min(self.bound_hx_given_y).min(self.bound_half_eps2);
        let fail = |what: &str| {
            Err(Error::InvariantViolated(format!("{what} at eps = ({}, {})", self.eps1, self.eps2)))
        };
        if self.c2p > c2p_bound + slack {
            return fail("c2p above its outer bound");
        }
        if self.c1p > c1p_bound + slack {
            return fail("c1p above its outer bound");
        }
        if self.c2p > self.c1p + slack {
            return fail("c2p above c1p");
        }
        Ok(())
    }
}

/// Closed-form capacities next to the numerically evaluated bounds of the
/// erasure pair.
pub fn capacity_report(eps: ChannelParams, tol: f64) -> Result<CapacityReport> {
    eps.validate()?;
    let bounds = outer_bounds(&bec_pair_as_broadcast(eps), tol)?;
    let report = CapacityReport {
        eps1: eps.eps1,
        eps2: eps.eps2,
        c2p: c2p(eps),
        c1p: c1p(eps),
        bound_ixy_given_z: bounds.ixy_given_z,
        bound_hx_given_yz: bounds.hx_given_yz,
        bound_hx_given_y: bounds.hx_given_y,
        bound_half_eps2: eps.eps2 / 2.0,
    };
    report.check_invariants(tol)?;
    Ok(report)
}

/// Reports on the `(steps + 1)²` grid over `[0, 1]²`, `eps1` varying slowest.
pub fn capacity_grid(steps: usize, tol: f64) -> Result<Vec<CapacityReport>> {
    if steps == 0 {
        return Err(Error::InvalidParameter("grid needs at least one step".into()));
    }
    let points: Vec<(usize, usize)> = (0..=steps).flat_map(|i| (0..=steps).map(move |j| (i, j))).collect();
    points
        .into_par_iter()
        .map(|(i, j)| {
            let eps = ChannelParams::new(i as f64 / steps as f64, j as f64 / steps as f64)?;
            capacity_report(eps, tol)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eps(e1: f64, e2: f64) -> ChannelParams {
        ChannelParams::new(e1, e2).unwrap()
    }

    #[test]
    fn two_private_values() {
        assert_eq!(c2p(eps(0.5, 1.0)), 0.5);
        assert_eq!(c2p(eps(0.73, 0.0)), 0.0);
        assert!((c2p(eps(0.3, 0.8)) - 0.24).abs() < 1e-15);
    }

    #[test]
    fn one_private_branches() {
        assert!((c1p(eps(0.2, 0.6)) - 0.2).abs() < 1e-15);
        assert!((c1p(eps(0.4, 0.6)) - 0.3).abs() < 1e-15);
        assert!((c1p(eps(0.7, 0.6)) - 0.18).abs() < 1e-15);
    }

    #[test]
    fn report_at_half_half() {
        let r = capacity_report(eps(0.5, 0.5), DEFAULT_BINARY_TOL).unwrap();
        assert_eq!(r.c2p, 0.25);
        assert_eq!(r.c1p, 0.25);
        assert!((r.bound_ixy_given_z - 0.25).abs() < 1e-12);
        assert!((r.bound_hx_given_yz - 0.25).abs() < 1e-12);
        assert!((r.bound_hx_given_y - 0.5).abs() < 1e-12);
        assert_eq!(r.bound_half_eps2, 0.25);
    }

    #[test]
    fn eve_without_erasures_zeroes_everything() {
        let r = capacity_report(eps(0.6, 0.0), DEFAULT_BINARY_TOL).unwrap();
        assert_eq!((r.c2p, r.c1p, r.bound_half_eps2), (0.0, 0.0, 0.0));
        assert!(r.bound_ixy_given_z.abs() < 1e-15 && r.bound_hx_given_yz.abs() < 1e-15);
    }

    #[test]
    fn ordering_and_monotonicity_on_grid() {
        let n = 100;
        for i in 0..=n {
            let e1 = i as f64 / n as f64;
            let mut prev = (0.0, 0.0);
            for j in 0..=n {
                let e = eps(e1, j as f64 / n as f64);
                let (a, b) = (c2p(e), c1p(e));
                assert!(a <= b + 1e-15);
                let interior = i > 0 && j > 0 && j < n;
                if interior {
                    assert_eq!((a - b).abs() < 1e-15, e1 >= 0.5, "eps = {e:?}");
                }
                assert!(a >= prev.0 - 1e-15 && b >= prev.1 - 1e-15);
                prev = (a, b);
            }
            assert_eq!(c2p(eps(e1, 1.0)), e1.min(1.0 - e1));
        }
    }

    #[test]
    fn general_channel_bounds_omit_half_eps2() {
        let b = outer_bounds(&bec_pair_as_broadcast(eps(0.3, 0.6)), DEFAULT_BINARY_TOL).unwrap();
        assert!(b.half_eps2.is_none());
        assert!((b.c2p_bound() - c2p(eps(0.3, 0.6))).abs() < 1e-12);
    }

    #[test]
    fn grid_shape() {
        let g = capacity_grid(4, 1e-9).unwrap();
        assert_eq!(g.len(), 25);
        assert_eq!((g[0].eps1, g[0].eps2), (0.0, 0.0));
        assert_eq!((g[1].eps1, g[1].eps2), (0.0, 0.25));
    }
}
