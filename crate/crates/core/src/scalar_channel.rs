//! Scalar Bernoulli-Gaussian estimation through AWGN.
//!
//! `V0 = B0 X0` with `B0 ~ Bernoulli(p)` and `X0 ~ N(0, σ²)` is observed as
//! `Y = V0 + Z/sqrt(η)` with `Z ~ N(0,1)`. The observation is a two-component
//! Gaussian mixture, `Y ~ (1-p) N(0, 1/η) + p N(0, σ² + 1/η)`, and both the
//! MMSE of `V0` given `Y` and the mutual information `I(V0; Y)` reduce to 1-D
//! integrals against that mixture.

use crate::error::{Error, Result};
use crate::quad::integrate_adaptive;

/// Absolute tolerance for the mixture integrals.
const TOL: f64 = 1e-12;

/// Scalar channel at effective SNR `eta` (noise variance `1/eta`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarChannel {
    p: f64,
    sigma2: f64,
    eta: f64,
}

impl ScalarChannel {
    pub fn new(p: f64, sigma2: f64, eta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("Bernoulli weight p must be in [0,1], got {p}")));
        }
        if !(sigma2 >= 0.0) || !sigma2.is_finite() {
            return Err(Error::Domain(format!("sigma2 must be nonnegative, got {sigma2}")));
        }
        if !(eta >= 0.0) {
            return Err(Error::Domain(format!("eta must be nonnegative, got {eta}")));
        }
        Ok(Self { p, sigma2, eta })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Mixture density of the observation `Y`.
    fn density(&self, y: f64) -> f64 {
        let v0 = 1.0 / self.eta;
        let v1 = self.sigma2 + v0;
        (1.0 - self.p) * gaussian_pdf(y, v0) + self.p * gaussian_pdf(y, v1)
    }

    /// `mmse(V0 | V0 + Z/sqrt(η))`, in `[0, p σ²]`.
    pub fn mmse(&self) -> f64 {
        let (p, s2, eta) = (self.p, self.sigma2, self.eta);
        let prior_var = p * s2;
        if p == 0.0 || s2 == 0.0 {
            return 0.0;
        }
        if eta == 0.0 {
            return prior_var;
        }
        if p == 1.0 {
            // Gaussian prior closed form
            return s2 / (1.0 + eta * s2);
        }
        let v1 = s2 + 1.0 / eta;
        let shrink = s2 / v1;
        // E[V0|y] f(y) = p N(y; 0, v1) (σ²/v1) y, so the posterior second
        // moment of the estimate is an integral of num²/f.
        let integrand = |y: f64| {
            let num = p * gaussian_pdf(y, v1) * shrink * y;
            let den = self.density(y);
            if den > 0.0 {
                num * num / den
            } else {
                0.0
            }
        };
        let est_power = 2.0 * split_integral(&integrand, self);
        (prior_var - est_power).max(0.0)
    }

    /// `I(V0; V0 + Z/sqrt(η))` in nats: `h(Y) - ln(2πe/η)/2`.
    pub fn mutual_information(&self) -> f64 {
        let (p, s2, eta) = (self.p, self.sigma2, self.eta);
        if p == 0.0 || s2 == 0.0 || eta == 0.0 {
            return 0.0;
        }
        if p == 1.0 {
            return 0.5 * (1.0 + eta * s2).ln();
        }
        let two_pi_e = 2.0 * std::f64::consts::PI * std::f64::consts::E;
        let integrand = |y: f64| {
            let f = self.density(y);
            if f > 0.0 {
                f * f.ln()
            } else {
                0.0
            }
        };
        let neg_entropy = 2.0 * split_integral(&integrand, self);
        let mi = -neg_entropy - 0.5 * (two_pi_e / eta).ln();
        mi.max(0.0)
    }
}

/// Integral of an even integrand over the positive half line, truncated at 10
/// mixture standard deviations and split at the narrow component's scale so
/// the adaptive rule sees both scales.
fn split_integral(f: &impl Fn(f64) -> f64, ch: &ScalarChannel) -> f64 {
    let v0 = 1.0 / ch.eta;
    let v1 = ch.sigma2 + v0;
    let inner = (10.0 * v0.sqrt()).min(10.0 * v1.sqrt());
    let outer = 10.0 * v1.sqrt();
    let mut total = integrate_adaptive(f, 0.0, inner, 0.5 * TOL);
    if outer > inner {
        total += integrate_adaptive(f, inner, outer, 0.5 * TOL);
    }
    total
}

fn gaussian_pdf(y: f64, var: f64) -> f64 {
    (-0.5 * y * y / var).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn mmse_degenerate_cases() {
        let ch = ScalarChannel::new(0.0, 10.0, 3.0).unwrap();
        assert_eq!(ch.mmse(), 0.0);
        let ch = ScalarChannel::new(0.2, 10.0, 0.0).unwrap();
        assert_eq!(ch.mmse(), 2.0);
        let ch = ScalarChannel::new(1.0, 10.0, 1.0).unwrap();
        assert_abs_diff_eq!(ch.mmse(), 10.0 / 11.0, epsilon = 1e-12);
    }

    #[test]
    fn mi_degenerate_cases() {
        let ch = ScalarChannel::new(0.0, 10.0, 2.0).unwrap();
        assert_eq!(ch.mutual_information(), 0.0);
        let ch = ScalarChannel::new(0.2, 10.0, 0.0).unwrap();
        assert_eq!(ch.mutual_information(), 0.0);
        let ch = ScalarChannel::new(1.0, 10.0, 1.0).unwrap();
        assert_abs_diff_eq!(ch.mutual_information(), 0.5 * 11f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn mi_matches_immse_integral() {
        // independent oracle: I(η) = (1/2)∫_0^η mmse(γ) dγ
        let (p, s2, eta) = (0.2, 10.0, 0.5);
        let mmse_at = |g: f64| ScalarChannel::new(p, s2, g).unwrap().mmse();
        let oracle = 0.5 * integrate_adaptive(&mmse_at, 0.0, eta, 1e-10);
        let mi = ScalarChannel::new(p, s2, eta).unwrap().mutual_information();
        assert_abs_diff_eq!(mi, oracle, epsilon = 1e-7);
    }

    #[test]
    fn monotone_in_eta() {
        let etas: Vec<f64> = (1..=20).map(|i| 0.15 * i as f64).collect();
        let mut prev_mi = 0.0;
        let mut prev_mmse = f64::INFINITY;
        for &eta in &etas {
            let ch = ScalarChannel::new(0.2, 10.0, eta).unwrap();
            let mi = ch.mutual_information();
            let mmse = ch.mmse();
            assert!(mi > prev_mi, "mi not increasing at eta={eta}");
            assert!(mmse < prev_mmse, "mmse not decreasing at eta={eta}");
            prev_mi = mi;
            prev_mmse = mmse;
        }
    }

    #[test]
    fn data_processing_bound() {
        for &eta in &[0.1, 0.5, 1.0, 2.0, 5.0] {
            for &p in &[0.1, 0.2, 0.5, 0.9] {
                let s2 = 10.0;
                let ch = ScalarChannel::new(p, s2, eta).unwrap();
                let bound = 0.5 * (1.0 + eta * p * s2).ln() + crate::binary_entropy(p).unwrap();
                assert!(ch.mutual_information() <= bound + 1e-9);
            }
        }
    }

    #[test]
    fn immse_derivative_consistency() {
        // dI/dη = mmse/2, checked by central finite differences at 20 points
        let (p, s2) = (0.2, 10.0);
        let h = 1e-4;
        for i in 1..=20 {
            let eta = 0.2 * i as f64;
            let mi = |g: f64| ScalarChannel::new(p, s2, g).unwrap().mutual_information();
            let fd = (mi(eta + h) - mi(eta - h)) / (2.0 * h);
            let analytic = 0.5 * ScalarChannel::new(p, s2, eta).unwrap().mmse();
            let rel = (fd - analytic).abs() / analytic.abs();
            assert!(rel < 1e-5, "I-MMSE mismatch at eta={eta}: fd={fd} vs {analytic}");
        }
    }
}
