//! Replica-symmetric route to the rate `I1`.
//!
//! The effective SNR `η` solves `1/η = (1/q)(1 + mmse(V0 | V0 + Z/√η))` and
//! `I1 = I(V0; V0 + Z/√η) + (q/2) ln(q/η) + (η - q)/2` in nats. The factor
//! 1/2 on the correction terms is the real-Gaussian normalization (the same
//! expression is often quoted with unhalved corrections in complex-channel
//! conventions); the finite-n enumeration oracle (`oracle::mc_i1`) and the
//! stationarity of `I1(η)` at the fixed point both pin this form. The
//! fixed-point map can have up to three solutions near phase transitions, so
//! the solver runs a damped iteration from a log-spaced grid of starts and
//! keeps every distinct converged point; the solution minimizing `I1` is
//! selected.

use crate::error::{Error, Result};
use crate::model::ChannelParams;
use crate::scalar_channel::ScalarChannel;
use rayon::prelude::*;

const STARTS: usize = 32;
const MAX_ITERS: usize = 10_000;
const DAMPING: f64 = 0.5;
const DEDUP_REL: f64 = 1e-6;
/// Residual bound on `|1/η - (1/q)(1 + mmse(η))|`.
const RESIDUAL_TOL: f64 = 1e-10;

/// A fixed point of the effective-SNR map with its rate value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicaSolution {
    /// Effective SNR at the fixed point, in `(0, q]`.
    pub eta: f64,
    /// `I1` evaluated at this fixed point, nats.
    pub i1: f64,
    /// Defect `|1/η - (1/q)(1 + mmse(η))|`.
    pub residual: f64,
}

fn fixed_point_map(params: &ChannelParams, eta: f64) -> f64 {
    let mmse = ScalarChannel::new(params.p(), params.sigma2(), eta)
        .expect("valid scalar channel")
        .mmse();
    params.q() / (1.0 + mmse)
}

fn residual_at(params: &ChannelParams, eta: f64) -> f64 {
    (1.0 / eta - 1.0 / fixed_point_map(params, eta)).abs()
}

/// Runs the damped iteration from one start; returns a converged `η` or None.
fn iterate_from(params: &ChannelParams, mut eta: f64) -> Option<f64> {
    let mut converged = false;
    for _ in 0..MAX_ITERS {
        let next = (1.0 - DAMPING) * eta + DAMPING * fixed_point_map(params, eta);
        let delta = (next - eta).abs();
        eta = next;
        if delta < 1e-11 * eta.max(1e-12) {
            converged = true;
            break;
        }
    }
    if !converged {
        return None;
    }
    // secant polish on g(η) = T(η) - η to drive the residual down
    let g = |e: f64| fixed_point_map(params, e) - e;
    let mut x0 = eta * (1.0 - 1e-7);
    let mut x1 = eta;
    let mut g0 = g(x0);
    let mut g1 = g(x1);
    for _ in 0..60 {
        if residual_at(params, x1) < 0.1 * RESIDUAL_TOL {
            break;
        }
        let denom = g1 - g0;
        if denom == 0.0 {
            break;
        }
        let x2 = (x1 - g1 * (x1 - x0) / denom).clamp(1e-300, params.q());
        x0 = x1;
        g0 = g1;
        x1 = x2;
        g1 = g(x1);
    }
    eta = x1;
    (residual_at(params, eta) < RESIDUAL_TOL).then_some(eta)
}

/// All distinct fixed points of `η ↦ q / (1 + mmse(η))`, sorted by `η`.
pub fn solve_eta(params: &ChannelParams) -> Result<Vec<ReplicaSolution>> {
    let q = params.q();
    let lo = (1e-6 * q).ln();
    let hi = q.ln();
    let starts: Vec<f64> = (0..STARTS)
        .map(|i| (lo + (hi - lo) * (i as f64 + 1.0) / STARTS as f64).exp())
        .collect();

    let mut etas: Vec<f64> = starts
        .par_iter()
        .filter_map(|&s| iterate_from(params, s))
        .collect();
    etas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    etas.dedup_by(|a, b| (*a - *b).abs() <= DEDUP_REL * b.abs());

    if etas.is_empty() {
        return Err(Error::Convergence(format!(
            "no start of the effective-SNR iteration converged for p={}, sigma2={}, q={}",
            params.p(),
            params.sigma2(),
            params.q()
        )));
    }
    Ok(etas
        .into_iter()
        .map(|eta| ReplicaSolution {
            eta,
            i1: i1_at(params, eta),
            residual: residual_at(params, eta),
        })
        .collect())
}

/// `I1` evaluated at a given effective SNR.
pub fn i1_at(params: &ChannelParams, eta: f64) -> f64 {
    let mi = ScalarChannel::new(params.p(), params.sigma2(), eta)
        .expect("valid scalar channel")
        .mutual_information();
    mi + 0.5 * params.q() * (params.q() / eta).ln() + 0.5 * (eta - params.q())
}

/// Replica-route `I1`: the minimum of `i1_at` over all fixed points
/// (smallest `η` on ties).
pub fn i1_replica(params: &ChannelParams) -> Result<f64> {
    let solutions = solve_eta(params)?;
    // solutions are sorted by eta, so strict less-than keeps the smallest eta
    let mut best = f64::INFINITY;
    for s in &solutions {
        if s.i1 < best {
            best = s.i1;
        }
    }
    Ok(best.max(0.0))
}
