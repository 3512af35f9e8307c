//! Achievable rates for the coding, wiretap, and MAC scenarios.
//!
//! Every scenario is a thin composition of `I1`, `I2`, and the binary
//! entropy. Raw formulas that go negative are clamped to zero with a flag
//! (a negative achievable rate means nothing is achievable); the raw value
//! stays available in the ingredients for plotting zero regions.

use crate::error::{Error, Result};
use crate::model::{binary_entropy, ChannelParams, SparsityLaw};
use crate::replica::i1_replica;
use crate::rigorous::i1_rigorous;
use crate::shannon_transform::i2;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Which route computes `I1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Route {
    /// Saddle-point formula (valid for any pattern law).
    #[default]
    Rigorous,
    /// Scalar fixed point (memoryless laws only).
    Replica,
}

/// `I1` by the requested route. The replica route only covers i.i.d.
/// patterns, so it rejects laws with memory.
pub fn i1_route(params: &ChannelParams, law: &SparsityLaw, route: Route) -> Result<f64> {
    match route {
        Route::Rigorous => i1_rigorous(params, law),
        Route::Replica => {
            if !law.is_memoryless() {
                return Err(Error::Domain(
                    "replica route requires a memoryless pattern law".into(),
                ));
            }
            i1_replica(params)
        }
    }
}

/// Inputs that went into a scenario rate.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Ingredients {
    pub i1: Option<f64>,
    pub i2: Option<f64>,
    pub h2: Option<f64>,
    pub i1_scaled: Option<f64>,
    pub i1_eavesdropper: Option<f64>,
    /// The unclamped formula value.
    pub raw: f64,
}

/// A named scenario's achievable rate, in nats, clamped at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub scenario: &'static str,
    pub rate: f64,
    pub ingredients: Ingredients,
    pub clamped: bool,
}

impl RateReport {
    fn from_raw(scenario: &'static str, raw: f64, ingredients: Ingredients) -> Self {
        let mut ing = ingredients;
        ing.raw = raw;
        Self { scenario, rate: raw.max(0.0), ingredients: ing, clamped: raw < 0.0 }
    }
}

/// Wiretap parameters: `base.q` is the legitimate user's sampling rate `q1`,
/// `q2` the eavesdropper's, with `q1 ≥ q2 > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WiretapParams {
    base: ChannelParams,
    q2: f64,
}

impl WiretapParams {
    pub fn new(base: ChannelParams, q2: f64) -> Result<Self> {
        if !(q2 > 0.0 && q2 <= base.q()) {
            return Err(Error::Domain(format!(
                "wiretap needs 0 < q2 <= q1, got q2={q2}, q1={}",
                base.q()
            )));
        }
        Ok(Self { base, q2 })
    }

    pub fn base(&self) -> &ChannelParams {
        &self.base
    }

    pub fn q1(&self) -> f64 {
        self.base.q()
    }

    pub fn q2(&self) -> f64 {
        self.q2
    }

    fn eavesdropper(&self) -> Result<ChannelParams> {
        self.base.with_q(self.q2)
    }
}

/// Controlled sparsity pattern: the rate is `I1` itself.
pub fn rate_controlled(
    params: &ChannelParams,
    law: &SparsityLaw,
    route: Route,
) -> Result<RateReport> {
    let i1 = i1_route(params, law, route)?;
    Ok(RateReport::from_raw(
        "controlled",
        i1,
        Ingredients { i1: Some(i1), ..Default::default() },
    ))
}

/// Sparsity pattern unknown to all parties: `max{0, I1 - H2(m_a)}`.
pub fn rate_unknown_pattern(
    params: &ChannelParams,
    law: &SparsityLaw,
    route: Route,
) -> Result<RateReport> {
    let i1 = i1_route(params, law, route)?;
    let h2 = binary_entropy(law.m_a())?;
    Ok(RateReport::from_raw(
        "unknown-pattern",
        i1 - h2,
        Ingredients { i1: Some(i1), h2: Some(h2), ..Default::default() },
    ))
}

/// Pattern given causally to the transmitter as a state: power concentrates
/// on the active slots (σ² ← σ²/p), and `max{0, I1_scaled - H2(p)}` is
/// achievable. The i.i.d. state makes this a replica-route quantity; the
/// rigorous route is available behind the switch and agrees within 1e-3.
pub fn rate_causal_state(params: &ChannelParams, route: Route) -> Result<RateReport> {
    let p = params.p();
    let scaled = params.with_sigma2(params.sigma2() / p)?;
    let law = SparsityLaw::memoryless(p)?;
    let i1_scaled = i1_route(&scaled, &law, route)?;
    let h2 = binary_entropy(p)?;
    Ok(RateReport::from_raw(
        "causal-state",
        i1_scaled - h2,
        Ingredients { i1_scaled: Some(i1_scaled), h2: Some(h2), ..Default::default() },
    ))
}

/// Pattern carries the information, amplitudes act as fading:
/// `max{0, I1 - I2}`.
pub fn rate_pattern_info(
    params: &ChannelParams,
    law: &SparsityLaw,
    route: Route,
) -> Result<RateReport> {
    let i1 = i1_route(params, law, route)?;
    let i2v = i2(params)?.i2;
    Ok(RateReport::from_raw(
        "pattern-info",
        i1 - i2v,
        Ingredients { i1: Some(i1), i2: Some(i2v), ..Default::default() },
    ))
}

/// Wiretap, pattern controlled by the transmitter:
/// `max{0, I1(q1) - I1(q2)}`.
pub fn secrecy_controlled(
    wp: &WiretapParams,
    law: &SparsityLaw,
    route: Route,
) -> Result<RateReport> {
    let i1_l = i1_route(wp.base(), law, route)?;
    let i1_e = i1_route(&wp.eavesdropper()?, law, route)?;
    Ok(RateReport::from_raw(
        "wiretap-controlled",
        i1_l - i1_e,
        Ingredients { i1: Some(i1_l), i1_eavesdropper: Some(i1_e), ..Default::default() },
    ))
}

/// Wiretap, pattern known to nobody: `max{0, I1(q1) - I2(q2) - H2(p)}`.
pub fn secrecy_unavailable(
    wp: &WiretapParams,
    law: &SparsityLaw,
    route: Route,
) -> Result<RateReport> {
    let i1_l = i1_route(wp.base(), law, route)?;
    let i2_e = i2(&wp.eavesdropper()?)?.i2;
    let h2 = binary_entropy(wp.base().p())?;
    Ok(RateReport::from_raw(
        "wiretap-unavailable",
        i1_l - i2_e - h2,
        Ingredients { i1: Some(i1_l), i2: Some(i2_e), h2: Some(h2), ..Default::default() },
    ))
}

/// Wiretap, pattern a non-causal uncontrollable state:
/// `max{0, I1(q1) - max{H2(p), I1(q2)}}`.
pub fn secrecy_uncontrolled(
    wp: &WiretapParams,
    law: &SparsityLaw,
    route: Route,
) -> Result<RateReport> {
    if !law.is_memoryless() {
        return Err(Error::Domain("uncontrolled-pattern secrecy assumes an i.i.d. state".into()));
    }
    let i1_l = i1_route(wp.base(), law, route)?;
    let i1_e = i1_route(&wp.eavesdropper()?, law, route)?;
    let h2 = binary_entropy(wp.base().p())?;
    Ok(RateReport::from_raw(
        "wiretap-uncontrolled",
        i1_l - h2.max(i1_e),
        Ingredients {
            i1: Some(i1_l),
            i1_eavesdropper: Some(i1_e),
            h2: Some(h2),
            ..Default::default()
        },
    ))
}

/// Symmetric MAC sum-rate of a `(1-α)` fraction of the users:
/// `(1-α)^{-1} I1` with `p ← (1-α) p`.
pub fn mac_rate(
    params: &ChannelParams,
    law: &SparsityLaw,
    alpha: f64,
    route: Route,
) -> Result<RateReport> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::Domain(format!("mac_rate needs alpha in [0,1), got {alpha}")));
    }
    if !law.is_memoryless() {
        return Err(Error::Domain("MAC sum-rate assumes an i.i.d. pattern".into()));
    }
    let p_eff = (1.0 - alpha) * params.p();
    let reduced = params.with_p(p_eff)?;
    let reduced_law = SparsityLaw::memoryless(p_eff)?;
    let i1 = i1_route(&reduced, &reduced_law, route)?;
    Ok(RateReport::from_raw(
        "mac",
        i1 / (1.0 - alpha),
        Ingredients { i1: Some(i1), ..Default::default() },
    ))
}

/// Outcome of the memoryless-optimality numerical experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalityScanReport {
    /// max over sampled laws of `I1(law) - I1(memoryless)`.
    pub max_gap: f64,
    /// Same gap for the wiretap difference, when a pair was supplied.
    pub wiretap_max_gap: Option<f64>,
    pub evaluated: usize,
    pub skipped: usize,
}

/// Samples random polynomial pattern laws of the given degree, pins their
/// prior magnetization to `p` through the leading coefficient (the average
/// sparseness constraint fixes `f'(m_a) = 2 artanh(2p - 1)`), and measures
/// how far any of them gets above the memoryless rate. The theorem says the
/// gap is never positive; the scan is the numerical check.
pub fn memoryless_optimality_scan(
    params: &ChannelParams,
    degree: usize,
    n_laws: usize,
    seed: u64,
    wiretap: Option<&WiretapParams>,
) -> Result<OptimalityScanReport> {
    if degree < 1 {
        return Err(Error::Domain("scan needs degree >= 1".into()));
    }
    let p = params.p();
    let target_slope = 2.0 * (2.0 * p - 1.0).atanh(); // = ln(p/(1-p))

    let memoryless = SparsityLaw::memoryless(p)?;
    let base_i1 = i1_rigorous(params, &memoryless)?;
    let base_wiretap = match wiretap {
        Some(wp) => Some(
            i1_rigorous(wp.base(), &memoryless)?
                - i1_rigorous(&wp.eavesdropper()?, &memoryless)?,
        ),
        None => None,
    };

    let mut rng = StdRng::seed_from_u64(seed);
    let mut max_gap = f64::NEG_INFINITY;
    let mut wiretap_max_gap = f64::NEG_INFINITY;
    let mut evaluated = 0usize;
    let mut skipped = 0usize;

    for _ in 0..n_laws {
        let mut coeffs = vec![0.0];
        for _ in 1..degree {
            coeffs.push(rng.gen_range(-0.5..0.5));
        }
        // leading coefficient solves f'(p) = target_slope exactly
        let mut tail_slope = 0.0;
        let mut pow = p;
        for &a in &coeffs[1..] {
            tail_slope += a * pow;
            pow *= p;
        }
        coeffs[0] = target_slope - tail_slope;
        let law = SparsityLaw::new(coeffs)?;
        if (law.m_a() - p).abs() > 1e-8 {
            // constraint made p a stationary point but not the global
            // maximizer; this law is outside the constrained family
            skipped += 1;
            continue;
        }
        let gap = match i1_rigorous(params, &law) {
            Ok(i1) => i1 - base_i1,
            Err(_) => {
                skipped += 1;
                continue;
            }
        };
        max_gap = max_gap.max(gap);
        if let Some(wp) = wiretap {
            let diff = i1_rigorous(wp.base(), &law)?
                - i1_rigorous(&wp.eavesdropper()?, &law)?;
            wiretap_max_gap = wiretap_max_gap.max(diff - base_wiretap.unwrap());
        }
        evaluated += 1;
    }

    if evaluated == 0 {
        return Err(Error::Convergence("every sampled law failed or was skipped".into()));
    }
    Ok(OptimalityScanReport {
        max_gap,
        wiretap_max_gap: wiretap.map(|_| wiretap_max_gap),
        evaluated,
        skipped,
    })
}
