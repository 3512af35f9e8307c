//! Quadrature backends: cached Gauss-Hermite rules for Gaussian expectations
//! and an adaptive Simpson integrator for the scalar-channel mixture
//! integrals.

use gauss_quad::GaussHermite;
use std::collections::HashMap;
use std::num::NonZeroUsize;
use std::sync::{Mutex, OnceLock};

const SQRT_PI: f64 = 1.772453850905516027298167_f64;

fn rule_cache() -> &'static Mutex<HashMap<usize, &'static GaussHermite>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, &'static GaussHermite>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Cached Gauss-Hermite rule of the given degree. Rules are built once and
/// leaked; only a handful of degrees are ever requested.
pub fn hermite_rule(degree: usize) -> &'static GaussHermite {
    let mut cache = rule_cache().lock().unwrap();
    cache.entry(degree).or_insert_with(|| {
        let deg = NonZeroUsize::new(degree).expect("quadrature degree must be nonzero");
        Box::leak(Box::new(GaussHermite::new(deg)))
    })
}

/// `E[f(X)]` for `X ~ N(0, var)` by Gauss-Hermite quadrature with `degree`
/// nodes: substituting `x = sqrt(2 var) u` gives
/// `E[f] = (1/sqrt(pi)) * sum_i w_i f(sqrt(2 var) u_i)`.
pub fn gaussian_expectation(var: f64, degree: usize, f: impl Fn(f64) -> f64) -> f64 {
    debug_assert!(var >= 0.0);
    let scale = (2.0 * var).sqrt();
    hermite_rule(degree).integrate(|u| f(scale * u)) / SQRT_PI
}

/// Adaptive Simpson integration of `f` over `[a, b]` to absolute tolerance
/// `tol`.
pub fn integrate_adaptive(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    adaptive_step(f, a, b, fa, fm, fb, whole, tol, 50)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    // floating-point noise floor: once the requested tolerance drops below
    // the roundoff level of the local sum, further splitting only burns time
    let noise = 1e-15 * (left.abs() + right.abs());
    if depth == 0 || delta.abs() <= 15.0 * tol.max(noise) {
        left + right + delta / 15.0
    } else {
        adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}
