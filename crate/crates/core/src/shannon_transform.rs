//! Closed-form conditional rate `I2` and its high-SNR expansion.
//!
//! `I2` is half the Shannon transform of the support-restricted Gram matrix.
//! With `F(x,y) = (sqrt(x(1+√y)² + 1) - sqrt(x(1-√y)² + 1))²` and
//! `F = F(qσ², p/q)`,
//!
//! ```text
//! I2 = [p ln(1 + qσ² - F/4) + q ln(1 + pσ² - F/4) - F/(4σ²)] / 2   [nats]
//! ```
//!
//! and for large σ², `I2 = (min{q,p}/2) ln(1 + 4 min{q,p} σ²) + O(1)`.
//!
//! The overall factor 1/2 is the real-Gaussian normalization: the bracketed
//! expression is the log-determinant limit `lim (1/n) E ln det(σ²B + I)`
//! familiar from complex channel models, while the mutual information of a
//! real channel per real dimension carries half of it. The finite-n
//! log-determinant oracle (`oracle::mc_i2`) arbitrates this convention; both
//! forms are recoverable from the report (`i2` and `log_det_limit`).

use crate::error::{Error, Result};
use crate::model::ChannelParams;

/// `I2` with the ingredients that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct I2Report {
    /// The rate, nats (real-channel normalization).
    pub i2: f64,
    /// `F(qσ², p/q)`.
    pub f_value: f64,
    /// High-SNR prelog of `i2`, `min{q, p}/2`.
    pub prelog: f64,
    /// The unhalved log-determinant limit, `2·i2`.
    pub log_det_limit: f64,
}

/// `F(x,y) = (sqrt(x(1+√y)²+1) - sqrt(x(1-√y)²+1))²`.
pub fn f_mp(x: f64, y: f64) -> Result<f64> {
    if x < 0.0 || y < 0.0 {
        return Err(Error::Domain(format!("f_mp needs nonnegative arguments, got ({x}, {y})")));
    }
    let r = y.sqrt();
    let a = (x * (1.0 + r) * (1.0 + r) + 1.0).sqrt();
    let b = (x * (1.0 - r) * (1.0 - r) + 1.0).sqrt();
    Ok((a - b) * (a - b))
}

/// Closed-form `I2` in nats.
pub fn i2(params: &ChannelParams) -> Result<I2Report> {
    let (p, s2, q) = (params.p(), params.sigma2(), params.q());
    let f_value = f_mp(q * s2, p / q)?;
    let quarter = 0.25 * f_value;
    let arg1 = 1.0 + q * s2 - quarter;
    let arg2 = 1.0 + p * s2 - quarter;
    if arg1 <= 0.0 || arg2 <= 0.0 {
        return Err(Error::Numeric(format!(
            "log arguments must stay positive, got ({arg1}, {arg2})"
        )));
    }
    let log_det_limit = (p * arg1.ln() + q * arg2.ln() - quarter / s2).max(0.0);
    Ok(I2Report {
        i2: 0.5 * log_det_limit,
        f_value,
        prelog: 0.5 * q.min(p),
        log_det_limit,
    })
}

/// Leading high-SNR term `(min{q,p}/2) ln(1 + 4 min{q,p} σ²)` (without the
/// O(1) constant).
pub fn i2_high_snr(params: &ChannelParams) -> f64 {
    let m = params.q().min(params.p());
    0.5 * m * (1.0 + 4.0 * m * params.sigma2()).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn f_mp_boundary_values() {
        assert_eq!(f_mp(3.7, 0.0).unwrap(), 0.0);
        assert_eq!(f_mp(0.0, 2.0).unwrap(), 0.0);
        // (√5 - 1)² = 6 - 2√5
        assert_abs_diff_eq!(f_mp(1.0, 1.0).unwrap(), 6.0 - 2.0 * 5f64.sqrt(), epsilon = 1e-14);
        assert!(f_mp(-1.0, 1.0).is_err());
        assert!(f_mp(1.0, -1.0).is_err());
    }

    #[test]
    fn i2_vanishes_without_signal() {
        let params = ChannelParams::new(0.2, 1e-12, 0.5).unwrap();
        assert!(i2(&params).unwrap().i2 < 1e-10);
        let params = ChannelParams::new(1e-9, 10.0, 0.5).unwrap();
        assert!(i2(&params).unwrap().i2 < 1e-6);
    }

    #[test]
    fn i2_monotone_in_each_parameter() {
        let base = ChannelParams::new(0.2, 10.0, 0.5).unwrap();
        let mut prev = 0.0;
        for &s2 in &[1.0, 3.0, 10.0, 30.0, 100.0] {
            let v = i2(&base.with_sigma2(s2).unwrap()).unwrap().i2;
            assert!(v > prev);
            prev = v;
        }
        let mut prev = 0.0;
        for &p in &[0.1, 0.2, 0.4, 0.8] {
            let v = i2(&base.with_p(p).unwrap()).unwrap().i2;
            assert!(v > prev);
            prev = v;
        }
        let mut prev = 0.0;
        for &q in &[0.1, 0.3, 0.5, 0.8, 1.0] {
            let v = i2(&base.with_q(q).unwrap()).unwrap().i2;
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn decade_slope_equals_prelog() {
        for &(p, q) in &[(0.2, 0.5), (0.5, 0.2), (0.3, 0.3)] {
            for &s2 in &[1e3, 1e4] {
                let lo = i2(&ChannelParams::new(p, s2, q).unwrap()).unwrap().i2;
                let hi = i2(&ChannelParams::new(p, s2 * 10.0, q).unwrap()).unwrap().i2;
                let slope = (hi - lo) / 10f64.ln();
                let prelog = 0.5 * q.min(p);
                assert!(
                    (slope - prelog).abs() <= 0.05 * prelog,
                    "slope {slope} vs prelog {prelog} at p={p} q={q} s2={s2}"
                );
            }
        }
    }

    #[test]
    fn high_snr_gap_is_bounded() {
        let a = ChannelParams::new(0.2, 1e4, 0.5).unwrap();
        let b = ChannelParams::new(0.2, 1e6, 0.5).unwrap();
        let gap_a = i2(&a).unwrap().i2 - i2_high_snr(&a);
        let gap_b = i2(&b).unwrap().i2 - i2_high_snr(&b);
        assert!((gap_a - gap_b).abs() < 0.05, "O(1) gap drifting: {gap_a} vs {gap_b}");
    }

    #[test]
    fn high_snr_direct_substitution() {
        let params = ChannelParams::new(0.5, 100.0, 0.5).unwrap();
        assert_abs_diff_eq!(i2_high_snr(&params), 0.25 * 201f64.ln(), epsilon = 1e-14);
        let params = ChannelParams::new(0.5, 1e-12, 0.5).unwrap();
        assert!(i2_high_snr(&params) < 1e-11);
    }
}
