//! Single-photon key rates and the tolerable-QBER frontier.
//!
//! With one-way post-processing the asymptotic rate per sifted bit is
//! `R = 1 - H2(e_b) - H2(e_p)`, where `e_p` is one of the phase-error bounds.

use rayon::prelude::*;
use serde::Serialize;

use crate::bound::{phase_error_bound, simple_bound, BoundMethod};
use crate::error::{check_unit_half, Error, Result};
use crate::optimize::bisect_last_positive;

/// Bisection stops once the bracket is this narrow.
pub const ROOT_TOLERANCE: f64 = 1e-12;
pub const ROOT_MAX_ITER: usize = 200;

/// Binary entropy in bits, with `H2(0) = H2(1) = 0`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain {
            name: "x",
            value: x,
            domain: "[0, 1]",
        });
    }
    Ok(h2(x))
}

pub(crate) fn h2(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KeyRatePoint {
    pub e_b: f64,
    pub alpha: f64,
    pub e_p_used: f64,
    /// Key bits per sifted bit; negative means no key.
    pub rate: f64,
}

pub fn key_rate_single_photon(e_b: f64, alpha: f64, method: BoundMethod) -> Result<KeyRatePoint> {
    let e_p = phase_error_bound(e_b, alpha, method)?;
    Ok(KeyRatePoint {
        e_b,
        alpha,
        e_p_used: e_p,
        rate: 1.0 - h2(e_b) - h2(e_p),
    })
}

fn rate_or_negative(e_b: f64, alpha: f64, method: BoundMethod) -> f64 {
    key_rate_single_photon(e_b, alpha, method).map_or(f64::NEG_INFINITY, |p| p.rate)
}

/// Largest `e_b` with a positive key rate at the given `alpha`.
///
/// Returns 0 when the rate is already non-positive at `e_b = 0`.
pub fn tolerable_eb(alpha: f64, method: BoundMethod) -> Result<f64> {
    check_unit_half("alpha", alpha)?;
    if rate_or_negative(0.0, alpha, method) <= 0.0 {
        return Ok(0.0);
    }
    Ok(bisect_last_positive(
        |e_b| rate_or_negative(e_b, alpha, method),
        0.0,
        0.5,
        ROOT_TOLERANCE,
        ROOT_MAX_ITER,
    ))
}

/// Tolerable QBER along the line `e_b = alpha`.
///
/// `Approximate` substitutes the linear relation `e_p = 5 e_b` (the simple
/// bound on the diagonal); `Exact` and `Simple` use their own bounds.
pub fn tolerable_eb_diagonal(method: BoundMethod) -> f64 {
    let rate = |e: f64| match method {
        BoundMethod::Approximate => 1.0 - h2(e) - h2((5.0 * e).min(0.5)),
        BoundMethod::Simple => simple_bound(e, e).map_or(f64::NEG_INFINITY, |p| 1.0 - h2(e) - h2(p.min(0.5))),
        BoundMethod::Exact => rate_or_negative(e, e, method),
    };
    bisect_last_positive(rate, 0.0, 0.5, ROOT_TOLERANCE, ROOT_MAX_ITER)
}

/// Tolerable QBER of BB84 with one-way post-processing, where `e_p = e_b`.
pub fn bb84_tolerable_eb() -> f64 {
    bisect_last_positive(|e| 1.0 - 2.0 * h2(e), 0.0, 0.5, ROOT_TOLERANCE, ROOT_MAX_ITER)
}

/// `(alpha, tolerable e_b)` on `alpha_steps` equally spaced points of `[0, 1/2]`.
pub fn secure_region_frontier(alpha_steps: usize, method: BoundMethod) -> Result<Vec<(f64, f64)>> {
    if alpha_steps < 2 {
        return Err(Error::InvalidArgument(format!(
            "alpha_steps must be at least 2, got {alpha_steps}"
        )));
    }
    let last = alpha_steps - 1;
    (0..alpha_steps)
        .into_par_iter()
        .map(|k| {
            let alpha = if k == last { 0.5 } else { 0.5 * k as f64 / last as f64 };
            tolerable_eb(alpha, method).map(|e| (alpha, e))
        })
        .collect()
}
