//! Channel and source parameters, the sparsity-pattern law, and the binary
//! entropy function.
//!
//! The pattern prior is `Pr(S) ∝ exp{n f(m_s)}` with `m_s` the fraction of
//! ones in `S`. Laws are polynomials `f(m) = Σ_k α_k m^k / k`; the linear case
//! recovers an i.i.d. (memoryless) pattern. The *prior magnetization* `m_a`
//! is the maximizer of `H2(m) + f(m)` over [0,1], i.e. the magnetization that
//! dominates the prior.

use crate::error::{Error, Result};

/// Sparse channel parameter triple `(p, σ², q)`.
///
/// `p` is the sparsity rate (probability a source component is active), `σ²`
/// the variance of active components (noise variance is fixed at 1, so `σ²`
/// doubles as the per-active-component SNR), and `q = k/n` the sampling rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    p: f64,
    sigma2: f64,
    q: f64,
}

impl ChannelParams {
    pub fn new(p: f64, sigma2: f64, q: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("sparsity rate p must be in (0,1), got {p}")));
        }
        if !(sigma2 > 0.0) || !sigma2.is_finite() {
            return Err(Error::Domain(format!("sigma2 must be positive and finite, got {sigma2}")));
        }
        if !(q > 0.0 && q <= 1.0) {
            return Err(Error::Domain(format!("sampling rate q must be in (0,1], got {q}")));
        }
        Ok(Self { p, sigma2, q })
    }

    /// `σ² = 10^(snr_db/10)`.
    pub fn from_snr_db(p: f64, snr_db: f64, q: f64) -> Result<Self> {
        Self::new(p, 10f64.powf(snr_db / 10.0), q)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn snr_db(&self) -> f64 {
        10.0 * self.sigma2.log10()
    }

    pub fn with_q(&self, q: f64) -> Result<Self> {
        Self::new(self.p, self.sigma2, q)
    }

    pub fn with_p(&self, p: f64) -> Result<Self> {
        Self::new(p, self.sigma2, self.q)
    }

    pub fn with_sigma2(&self, sigma2: f64) -> Result<Self> {
        Self::new(self.p, sigma2, self.q)
    }
}

/// Binary entropy `H2(m) = -m ln m - (1-m) ln(1-m)` in nats, with the
/// `0 ln 0 := 0` convention.
pub fn binary_entropy(m: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&m) {
        return Err(Error::Domain(format!("binary_entropy argument must be in [0,1], got {m}")));
    }
    Ok(h2_unchecked(m))
}

fn h2_unchecked(m: f64) -> f64 {
    let term = |x: f64| if x > 0.0 { -x * x.ln() } else { 0.0 };
    term(m) + term(1.0 - m)
}

/// Pattern-law exponent `f(m) = Σ_k α_k m^k / k` with its cached prior
/// magnetization.
///
/// The codomain constraint `f ≤ 0` of the underlying law class is not
/// enforced: adding a constant to `f` cancels in the normalization, so only
/// `f'` matters.
#[derive(Debug, Clone, PartialEq)]
pub struct SparsityLaw {
    coeffs: Vec<f64>,
    m_a: f64,
}

impl SparsityLaw {
    /// Builds a law from coefficients `(α_1, …, α_M)` and solves for `m_a`.
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Domain("pattern law needs at least one coefficient".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain("pattern law coefficients must be finite".into()));
        }
        let m_a = prior_magnetization_from_coeffs(&coeffs);
        Ok(Self { coeffs, m_a })
    }

    /// The memoryless (i.i.d.) law for sparsity rate `p`:
    /// `f(m) = m ln(p/(1-p))`, for which `m_a = p`.
    pub fn memoryless(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("memoryless law needs p in (0,1), got {p}")));
        }
        Ok(Self { coeffs: vec![(p / (1.0 - p)).ln()], m_a: p })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// True for degree-1 laws, which correspond to i.i.d. patterns.
    pub fn is_memoryless(&self) -> bool {
        self.coeffs.len() == 1
    }

    /// Cached prior magnetization (maximizer of `H2 + f`).
    pub fn m_a(&self) -> f64 {
        self.m_a
    }

    /// `f(m) = Σ_k α_k m^k / k`.
    pub fn f(&self, m: f64) -> f64 {
        let mut acc = 0.0;
        let mut pow = 1.0;
        for (i, &a) in self.coeffs.iter().enumerate() {
            pow *= m;
            acc += a * pow / (i + 1) as f64;
        }
        acc
    }

    /// `f'(m) = Σ_k α_k m^(k-1)`.
    pub fn derivative(&self, m: f64) -> f64 {
        let mut acc = 0.0;
        let mut pow = 1.0;
        for &a in &self.coeffs {
            acc += a * pow;
            pow *= m;
        }
        acc
    }
}

/// Maximizer of `H2(m) + f(m)` over [0,1]; equivalently a root of
/// `m = (1 + tanh(f'(m)/2))/2`. With several local maxima the one with the
/// largest objective wins.
pub fn prior_magnetization(law: &SparsityLaw) -> f64 {
    prior_magnetization_from_coeffs(&law.coeffs)
}

fn prior_magnetization_from_coeffs(coeffs: &[f64]) -> f64 {
    let f = |m: f64| {
        let mut acc = 0.0;
        let mut pow = 1.0;
        for (i, &a) in coeffs.iter().enumerate() {
            pow *= m;
            acc += a * pow / (i + 1) as f64;
        }
        acc
    };
    let fp = |m: f64| {
        let mut acc = 0.0;
        let mut pow = 1.0;
        for &a in coeffs {
            acc += a * pow;
            pow *= m;
        }
        acc
    };
    let phi = |m: f64| h2_unchecked(m) + f(m);
    // phi'(m) = ln((1-m)/m) + f'(m); +inf at 0+, -inf at 1-, so every local
    // maximum is interior and bracketed by a +/- sign change of phi'.
    let dphi = |m: f64| ((1.0 - m) / m).ln() + fp(m);

    let steps = 1000usize;
    let h = 1.0 / steps as f64;
    let mut best_m = 0.5;
    let mut best_val = f64::NEG_INFINITY;
    let mut lo = h * 1e-6; // phi'(lo) > 0 always
    let mut dlo = dphi(lo);
    for i in 1..=steps {
        let hi = (i as f64 * h).min(1.0 - h * 1e-6);
        let dhi = dphi(hi);
        if dlo > 0.0 && dhi <= 0.0 {
            // bisect the bracketed maximum to 1e-12
            let (mut a, mut b) = (lo, hi);
            while b - a > 1e-12 {
                let mid = 0.5 * (a + b);
                if dphi(mid) > 0.0 {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            let m = 0.5 * (a + b);
            let v = phi(m);
            if v > best_val {
                best_val = v;
                best_m = m;
            }
        }
        lo = hi;
        dlo = dhi;
    }
    best_m
}
