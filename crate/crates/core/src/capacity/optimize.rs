//! Maximization of an information functional over the input law.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::info::{Functional, InputDistribution};
use crate::channel::DiscreteBroadcastChannel;
use crate::error::{Error, Result};
use crate::rng;

pub const DEFAULT_BINARY_TOL: f64 = 1e-9;
pub const DEFAULT_GENERAL_TOL: f64 = 1e-6;
pub const ITERATION_CAP: usize = 100_000;

const BINARY_GRID: usize = 200;
const GOLDEN: f64 = 0.618_033_988_749_894_8;
const RANDOM_STARTS: usize = 4;
const GRID_FALLBACK_MAX_INPUTS: usize = 4;
const GRID_FALLBACK_STEPS: usize = 24;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Maximum {
    pub distribution: InputDistribution,
    pub value: f64,
    /// False when the iteration cap was hit; the result is the best point seen.
    pub converged: bool,
    pub iterations: usize,
}

impl Maximum {
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NonConvergence { iterations: self.iterations, best: self.value })
        }
    }
}

/// Maximizes `functional` over input laws of `ch`.
///
/// Binary inputs: a grid scan over `p(0)` followed by golden-section search in
/// the bracket around the best grid point, down to an interval of width `tol`.
/// Larger alphabets: projected gradient ascent from several starts, with an
/// exhaustive simplex grid as a fallback when the alphabet has at most four
/// letters.
pub fn maximize_over_input(functional: Functional, ch: &DiscreteBroadcastChannel, tol: f64) -> Result<Maximum> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {tol} must be positive")));
    }
    ch.validate()?;
    let f = |probs: &[f64]| -> f64 {
        functional
            .evaluate(&InputDistribution { probs: probs.to_vec() }, ch)
            .expect("dimensions checked")
    };
    match ch.input_size {
        1 => Ok(Maximum {
            distribution: InputDistribution::uniform(1),
            value: f(&[1.0]),
            converged: true,
            iterations: 0,
        }),
        2 => Ok(maximize_binary(|p| f(&[p, 1.0 - p]), tol)),
        _ => Ok(maximize_simplex(&f, ch.input_size, tol)),
    }
}

fn maximize_binary(f: impl Fn(f64) -> f64, tol: f64) -> Maximum {
    let mut best = (0.0, f(0.0));
    for i in 1..=BINARY_GRID {
        let p = i as f64 / BINARY_GRID as f64;
        let v = f(p);
        if v > best.1 {
            best = (p, v);
        }
    }
    let step = 1.0 / BINARY_GRID as f64;
    let (mut lo, mut hi) = ((best.0 - step).max(0.0), (best.0 + step).min(1.0));
    let mut a = hi - GOLDEN * (hi - lo);
    let mut b = lo + GOLDEN * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    let mut iterations = BINARY_GRID + 3;
    while hi - lo > tol && iterations < ITERATION_CAP {
        if fa >= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - GOLDEN * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + GOLDEN * (hi - lo);
            fb = f(b);
        }
        iterations += 1;
    }
    for (p, v) in [(a, fa), (b, fb), (lo, f(lo)), (hi, f(hi))] {
        if v > best.1 {
            best = (p, v);
        }
    }
    Maximum {
        distribution: InputDistribution::binary(best.0),
        value: best.1,
        converged: hi - lo <= tol,
        iterations,
    }
}

/// Euclidean projection onto the probability simplex.
fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (i, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let t = (cumulative - 1.0) / (i + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        }
    }
    let mut out: Vec<f64> = v.iter().map(|&x| (x - theta).max(0.0)).collect();
    let sum: f64 = out.iter().sum();
    out.iter_mut().for_each(|x| *x /= sum);
    out
}

fn gradient(f: &impl Fn(&[f64]) -> f64, p: &[f64]) -> Vec<f64> {
    const H: f64 = 1e-7;
    let mut probe = p.to_vec();
    let mut g: Vec<f64> = (0..p.len())
        .map(|i| {
            let base = p[i];
            let (lo, hi) = (if base >= H { base - H } else { base }, base + H);
            probe[i] = hi;
            let up = f(&probe);
            probe[i] = lo;
            let down = f(&probe);
            probe[i] = base;
            (up - down) / (hi - lo)
        })
        .collect();
    // tangent to the simplex
    let mean = g.iter().sum::<f64>() / g.len() as f64;
    g.iter_mut().for_each(|x| *x -= mean);
    g
}

fn ascend(f: &impl Fn(&[f64]) -> f64, start: Vec<f64>, tol: f64, budget: &mut usize) -> (Vec<f64>, f64, bool) {
    let mut p = project_to_simplex(&start);
    let mut value = f(&p);
    let mut step = 1.0;
    while *budget > 0 {
        *budget -= 1;
        let g = gradient(f, &p);
        let mut accepted = None;
        while step > 1e-14 {
            let candidate: Vec<f64> = p.iter().zip(&g).map(|(a, b)| a + step * b).collect();
            let q = project_to_simplex(&candidate);
            let v = f(&q);
            if v > value {
                accepted = Some((q, v));
                break;
            }
            step *= 0.5;
        }
        let Some((q, v)) = accepted else { return (p, value, true) };
        let moved = p.iter().zip(&q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let gain = v - value;
        p = q;
        value = v;
        step = (step * 2.0).min(1e3);
        if gain < tol * 1e-3 && moved < tol {
            return (p, value, true);
        }
    }
    (p, value, false)
}

fn simplex_grid(size: usize, steps: usize, visit: &mut impl FnMut(&[f64])) {
    fn rec(prefix: &mut Vec<usize>, size: usize, left: usize, steps: usize, visit: &mut impl FnMut(&[f64])) {
        if prefix.len() + 1 == size {
            prefix.push(left);
            let p: Vec<f64> = prefix.iter().map(|&c| c as f64 / steps as f64).collect();
            visit(&p);
            prefix.pop();
            return;
        }
        for c in 0..=left {
            prefix.push(c);
            rec(prefix, size, left - c, steps, visit);
            prefix.pop();
        }
    }
    rec(&mut Vec::with_capacity(size), size, steps, steps, visit);
}

fn maximize_simplex(f: &impl Fn(&[f64]) -> f64, size: usize, tol: f64) -> Maximum {
    let mut starts = vec![vec![1.0 / size as f64; size]];
    for i in 0..size {
        let mut s = vec![0.2 / (size - 1) as f64; size];
        s[i] = 0.8;
        starts.push(s);
    }
    let mut r = rng::seeded(0x5eed);
    for _ in 0..RANDOM_STARTS {
        let raw: Vec<f64> = (0..size).map(|_| -r.gen::<f64>().max(1e-300).ln()).collect();
        let sum: f64 = raw.iter().sum();
        starts.push(raw.into_iter().map(|x| x / sum).collect());
    }

    let mut budget = ITERATION_CAP;
    let mut converged = true;
    let mut best: Option<(Vec<f64>, f64)> = None;
    for start in starts {
        let (p, v, ok) = ascend(f, start, tol, &mut budget);
        converged &= ok;
        if best.as_ref().is_none_or(|(_, bv)| v > *bv) {
            best = Some((p, v));
        }
    }
    let (mut p, mut v) = best.expect("at least one start");
    if size <= GRID_FALLBACK_MAX_INPUTS {
        simplex_grid(size, GRID_FALLBACK_STEPS, &mut |q| {
            let fq = f(q);
            if fq > v + tol {
                p = q.to_vec();
                v = fq;
            }
        });
    }
    Maximum {
        distribution: InputDistribution { probs: p },
        value: v,
        converged,
        iterations: ITERATION_CAP - budget,
    }
}
