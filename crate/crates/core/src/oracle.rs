//! Finite-n Monte-Carlo ground truth.
//!
//! The marginal of `Y = A H X + W` given the pattern `S` is Gaussian, so the
//! mixture likelihood has the closed per-support weight
//!
//! ```text
//! ln G(S) = ½ yᵀ A H_S (H_Sᵀ Aᵀ A H_S + I/σ²)⁻¹ H_Sᵀ Aᵀ y
//!           - ½ ln det(σ² H_Sᵀ Aᵀ A H_S + I)
//! ```
//!
//! and `I1` at finite `n` follows from `½ σ² m_a q - (1/n) E ln Σ_S Pr(S) G(S)`
//! with the sum enumerated exactly over all 2ⁿ supports. `I2` needs no
//! enumeration: it is the average of `(1/2n) ln det(σ² H_Sᵀ Aᵀ A H_S + I)`.

use crate::error::{Error, Result};
use crate::model::{ChannelParams, SparsityLaw};
use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

/// Largest dimension enumerable over 2ⁿ supports.
const MAX_ENUM_N: usize = 16;
/// Largest dimension for exact pattern-law sampling (magnetization classes).
const MAX_LAW_N: usize = 20;

/// One realization of the observation model.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub n: usize,
    /// Ones in the diagonal sampling mask, `k = round(q n)`, placed first.
    pub k: usize,
    pub s: Vec<bool>,
    pub u: Vec<f64>,
    pub x: DVector<f64>,
    pub h: DMatrix<f64>,
    pub w: DVector<f64>,
    pub y: DVector<f64>,
}

/// Monte-Carlo estimate with its statistical error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleEstimate {
    /// Nats per symbol.
    pub mean: f64,
    /// Sample standard deviation / √trials.
    pub std_err: f64,
    pub trials: usize,
    pub n: usize,
}

fn ln_binomial(n: usize, m: usize) -> f64 {
    (1..=m).map(|j| (((n - j + 1) as f64) / j as f64).ln()).sum()
}

fn logsumexp(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Deterministic ordered reduction, independent of thread count.
fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1..=8 => values.iter().sum(),
        len => pairwise_sum(&values[..len / 2]) + pairwise_sum(&values[len / 2..]),
    }
}

fn mean_std_err(values: &[f64]) -> (f64, f64) {
    let trials = values.len();
    let mean = pairwise_sum(values) / trials as f64;
    if trials < 2 {
        return (mean, 0.0);
    }
    let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = pairwise_sum(&sq) / (trials - 1) as f64;
    (mean, (var / trials as f64).sqrt())
}

/// `ln C_n = ln Σ_S exp{n f(m_S)}`, summed over magnetization classes.
fn ln_partition(n: usize, law: &SparsityLaw) -> f64 {
    let lw: Vec<f64> = (0..=n)
        .map(|m| ln_binomial(n, m) + n as f64 * law.f(m as f64 / n as f64))
        .collect();
    logsumexp(&lw)
}

fn sample_pattern(rng: &mut ChaCha8Rng, n: usize, law: &SparsityLaw) -> Result<Vec<bool>> {
    if law.is_memoryless() {
        let p = law.m_a();
        return Ok((0..n).map(|_| rng.gen::<f64>() < p).collect());
    }
    if n > MAX_LAW_N {
        return Err(Error::Size(format!(
            "exact pattern-law sampling enumerates magnetization classes, needs n <= {MAX_LAW_N}, got {n}"
        )));
    }
    // Pr(S) depends on S only through |S|: draw the class, then a uniform
    // subset of that size.
    let lw: Vec<f64> = (0..=n)
        .map(|m| ln_binomial(n, m) + n as f64 * law.f(m as f64 / n as f64))
        .collect();
    let lz = logsumexp(&lw);
    let draw: f64 = rng.gen();
    let mut acc = 0.0;
    let mut class = n;
    for (m, &l) in lw.iter().enumerate() {
        acc += (l - lz).exp();
        if draw <= acc {
            class = m;
            break;
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    let (chosen, _) = idx.partial_shuffle(rng, class);
    let mut s = vec![false; n];
    for &i in chosen.iter() {
        s[i] = true;
    }
    Ok(s)
}

/// Draws the instance for (seed, trial). Streams are split by the trial
/// index, so parallel and serial runs see identical randomness.
pub fn sample_instance(
    n: usize,
    params: &ChannelParams,
    law: &SparsityLaw,
    seed: u64,
    trial: u64,
) -> Result<Instance> {
    if n == 0 {
        return Err(Error::Size("instance needs n >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let k = (params.q() * n as f64).round() as usize;

    let s = sample_pattern(&mut rng, n, law)?;
    let sd = params.sigma2().sqrt();
    let u: Vec<f64> = (0..n).map(|_| sd * rng.sample::<f64, _>(StandardNormal)).collect();
    let x = DVector::from_fn(n, |i, _| if s[i] { u[i] } else { 0.0 });
    let scale = (1.0 / n as f64).sqrt();
    let h = DMatrix::from_fn(n, n, |_, _| scale * rng.sample::<f64, _>(StandardNormal));
    let w = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let hx = &h * &x;
    let y = DVector::from_fn(n, |i, _| if i < k { hx[i] + w[i] } else { w[i] });
    Ok(Instance { n, k, s, u, x, h, w, y })
}

/// `ln G(S)` from the per-trial Gram precomputation `g = (AH)ᵀ(AH)`,
/// `z = (AH)ᵀ y`.
fn log_g_from_gram(
    g: &DMatrix<f64>,
    z: &DVector<f64>,
    support: &[usize],
    sigma2: f64,
) -> Result<f64> {
    let s = support.len();
    if s == 0 {
        return Ok(0.0);
    }
    let b = DMatrix::from_fn(s, s, |i, j| g[(support[i], support[j])]);
    let zs = DVector::from_fn(s, |i, _| z[support[i]]);
    let m = b * sigma2 + DMatrix::identity(s, s);
    let chol = m
        .cholesky()
        .ok_or_else(|| Error::Numeric("sigma^2 B + I is not positive definite".into()))?;
    // (B + I/σ²)⁻¹ = σ² (σ²B + I)⁻¹
    let term1 = 0.5 * sigma2 * zs.dot(&chol.solve(&zs));
    let half_logdet: f64 = chol.l().diagonal().iter().map(|d| d.ln()).sum();
    Ok(term1 - half_logdet)
}

fn gram(inst: &Instance) -> (DMatrix<f64>, DVector<f64>) {
    let ah = inst.h.rows(0, inst.k);
    let y_top = inst.y.rows(0, inst.k);
    (ah.tr_mul(&ah), ah.tr_mul(&y_top))
}

/// `ln G(S)` for one support, from the raw instance pieces.
pub fn log_g(
    y: &DVector<f64>,
    k: usize,
    h: &DMatrix<f64>,
    support: &[usize],
    sigma2: f64,
) -> Result<f64> {
    let n = h.ncols();
    if support.iter().any(|&i| i >= n) {
        return Err(Error::Size(format!("support index out of range for n={n}")));
    }
    let ah = h.rows(0, k);
    let y_top = y.rows(0, k);
    log_g_from_gram(&ah.tr_mul(&ah), &ah.tr_mul(&y_top), support, sigma2)
}

/// Exact-enumeration `I1` estimate, `n ≤ 16`.
pub fn mc_i1(
    n: usize,
    trials: usize,
    params: &ChannelParams,
    law: &SparsityLaw,
    seed: u64,
) -> Result<OracleEstimate> {
    if n == 0 || n > MAX_ENUM_N {
        return Err(Error::Size(format!("mc_i1 enumerates 2^n supports, needs 1 <= n <= {MAX_ENUM_N}, got {n}")));
    }
    if trials == 0 {
        return Err(Error::Size("mc_i1 needs trials >= 1".into()));
    }
    let s2 = params.sigma2();
    let ln_cn = ln_partition(n, law);
    // ln Pr(S) depends only on |S|
    let ln_prior: Vec<f64> =
        (0..=n).map(|m| n as f64 * law.f(m as f64 / n as f64) - ln_cn).collect();

    let per_trial: Result<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let inst = sample_instance(n, params, law, seed, t as u64)?;
            let (g, z) = gram(&inst);
            let mut lps = Vec::with_capacity(1usize << n);
            let mut support = Vec::with_capacity(n);
            for mask in 0u32..(1u32 << n) {
                support.clear();
                for i in 0..n {
                    if mask >> i & 1 == 1 {
                        support.push(i);
                    }
                }
                let lg = log_g_from_gram(&g, &z, &support, s2)?;
                lps.push(ln_prior[support.len()] + lg);
            }
            Ok(logsumexp(&lps) / n as f64)
        })
        .collect();
    let values = per_trial?;
    let (mean_ls, std_err) = mean_std_err(&values);
    Ok(OracleEstimate {
        mean: 0.5 * s2 * law.m_a() * params.q() - mean_ls,
        std_err,
        trials,
        n,
    })
}

/// Log-determinant `I2` estimate (support revealed), `n ≤ 1000`.
pub fn mc_i2(n: usize, trials: usize, params: &ChannelParams, seed: u64) -> Result<OracleEstimate> {
    if n == 0 || n > 1000 {
        return Err(Error::Size(format!("mc_i2 needs 1 <= n <= 1000, got {n}")));
    }
    if trials == 0 {
        return Err(Error::Size("mc_i2 needs trials >= 1".into()));
    }
    let law = SparsityLaw::memoryless(params.p())?;
    let s2 = params.sigma2();
    let per_trial: Result<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let inst = sample_instance(n, params, &law, seed, t as u64)?;
            let support: Vec<usize> = (0..n).filter(|&i| inst.s[i]).collect();
            if support.is_empty() {
                return Ok(0.0);
            }
            let ah = inst.h.rows(0, inst.k);
            let ahs = ah.select_columns(support.iter());
            let b = ahs.tr_mul(&ahs);
            let m = b * s2 + DMatrix::identity(support.len(), support.len());
            let chol = m
                .cholesky()
                .ok_or_else(|| Error::Numeric("sigma^2 B + I is not positive definite".into()))?;
            let half_logdet: f64 = chol.l().diagonal().iter().map(|d| d.ln()).sum();
            Ok(half_logdet / n as f64)
        })
        .collect();
    let values = per_trial?;
    let (mean, std_err) = mean_std_err(&values);
    Ok(OracleEstimate { mean, std_err, trials, n })
}
