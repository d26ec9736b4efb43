//! Upper bounds on the phase error rate given the observed bit error rates.
//!
//! With the scaling fixed by `|a_X|^2 + |a_Y|^2 = 1`, the two rate constraints
//! become `e_b_hat = |a_I|^2 + |a_Z|^2` and a ratio constraint involving
//! `alpha_hat`. Taking `a_I`, `a_X` in phase and `i a_Y`, `a_Z` in phase,
//! `|a_I|` and `|a_X|` can be eliminated, leaving `|a_Z|` as an explicit
//! function of `|a_Y|` ([`az_branch`]). The exact bound is then a 1-D
//! maximization of `(|a_Z|^2 + |a_Y|^2) e_b` over `|a_Y| in [0, 1]`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::attack::KrausCoefficients;
use crate::error::{check_unit_half, Error, Result};
use crate::optimize::scan_refine_max;

/// Reported bounds never exceed this: an attack with a larger phase error rate
/// can be mixed with its phase-flipped copy to reach exactly one half.
pub const PHASE_ERROR_CAP: f64 = 0.5;

/// Number of `|a_Y|` scan points before golden-section refinement.
pub const SCAN_POINTS: usize = 10_000;

/// Width of the final `|a_Y|` bracket.
pub const AY_TOLERANCE: f64 = 1e-9;

/// Odds ratios `(1 - e_b) / e_b` and `(1 - alpha) / alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HatParams {
    pub eb_hat: f64,
    pub alpha_hat: f64,
}

impl HatParams {
    /// Defined for `e_b, alpha in (0, 1/2]`.
    pub fn new(e_b: f64, alpha: f64) -> Result<Self> {
        for (name, v) in [("e_b", e_b), ("alpha", alpha)] {
            if !(v > 0.0 && v <= 0.5) {
                return Err(Error::Domain {
                    name,
                    value: v,
                    domain: "(0, 1/2]",
                });
            }
        }
        Ok(Self {
            eb_hat: (1.0 - e_b) / e_b,
            alpha_hat: (1.0 - alpha) / alpha,
        })
    }
}

/// Largest admissible `|a_Z|` for a given `|a_Y|`, or `None` when infeasible.
///
/// This is the `(+, +, -)` sign branch of the quartic obtained by squaring
/// the eliminated ratio constraint. It is rejected when the inner radicand is
/// negative or when it would require `|a_I|^2 = e_b_hat - |a_Z|^2 < 0`.
pub fn az_branch(ay: f64, h: &HatParams) -> Option<f64> {
    let HatParams { eb_hat, alpha_hat } = *h;
    let s = (alpha_hat * (1.0 - ay * ay)).max(0.0).sqrt();
    let radicand = -1.0 + eb_hat * (1.0 + alpha_hat) - ay * ay * (alpha_hat - 1.0) - 2.0 * ay * s;
    if radicand < 0.0 {
        return None;
    }
    let az = (alpha_hat * ay + s + radicand.sqrt()) / (1.0 + alpha_hat);
    (az * az <= eb_hat).then_some(az)
}

/// Which construction produced a [`BoundResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Exact,
    Approximate,
    Simple,
    /// `e_b = 0` and/or `alpha = 0`, handled in closed form.
    Limiting,
}

/// Selects the bound used by the key-rate calculations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundMethod {
    Exact,
    Approximate,
    Simple,
}

impl FromStr for BoundMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Self::Exact),
            "approx" | "approximate" => Ok(Self::Approximate),
            "simple" => Ok(Self::Simple),
            other => Err(Error::Parse(format!(
                "unknown bound method {other:?} (expected exact, approx or simple)"
            ))),
        }
    }
}

impl fmt::Display for BoundMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Exact => "exact",
            Self::Approximate => "approx",
            Self::Simple => "simple",
        })
    }
}

/// Result of the exact maximization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundResult {
    pub e_b: f64,
    pub alpha: f64,
    /// Reported bound, `min(ep_uncapped, 1/2)`.
    pub ep_max: f64,
    /// The maximized phase error rate before capping; the witness attains it.
    pub ep_uncapped: f64,
    /// Maximizing `|a_Y|` under the scaling `|a_X|^2 + |a_Y|^2 = 1`.
    pub ay_star: f64,
    pub witness: KrausCoefficients,
    pub method: BoundKind,
}

/// Exact upper bound on `e_p` for observed `(e_b, alpha)` in `[0, 1/2]^2`.
pub fn exact_bound(e_b: f64, alpha: f64) -> Result<BoundResult> {
    check_unit_half("e_b", e_b)?;
    check_unit_half("alpha", alpha)?;

    if e_b == 0.0 || alpha == 0.0 {
        return Ok(limiting_case(e_b, alpha));
    }

    let h = HatParams::new(e_b, alpha)?;
    let objective = |ay: f64| az_branch(ay, &h).map(|az| (az * az + ay * ay) * e_b);
    let (ay_star, ep) = scan_refine_max(objective, 0.0, 1.0, SCAN_POINTS, AY_TOLERANCE).ok_or(
        Error::Domain {
            name: "e_b",
            value: e_b,
            domain: "feasible region of the branch formula",
        },
    )?;
    let az = az_branch(ay_star, &h).expect("maximizer is feasible");

    Ok(BoundResult {
        e_b,
        alpha,
        ep_max: ep.min(PHASE_ERROR_CAP),
        ep_uncapped: ep,
        ay_star,
        witness: witness(ay_star, az, &h),
        method: BoundKind::Exact,
    })
}

/// Attack realizing `(|a_Y|, |a_Z|)` on the feasible branch.
///
/// `a_X`, `a_Y` are real and `a_Z = i |a_Z|`, so `i a_Y - a_Z = i (|a_Y| - |a_Z|)`.
/// `a_I` is the real root of the ratio constraint before squaring,
/// `sqrt(alpha_hat) (|a_Z| - |a_Y|) - |a_X|`; its magnitude is
/// `sqrt(e_b_hat - |a_Z|^2)` and its sign keeps `a_I + a_X` on the right side.
fn witness(ay: f64, az: f64, h: &HatParams) -> KrausCoefficients {
    let ax = (1.0 - ay * ay).max(0.0).sqrt();
    let ai = h.alpha_hat.sqrt() * (az - ay) - ax;
    KrausCoefficients::new(
        Complex64::new(ai, 0.0),
        Complex64::new(ax, 0.0),
        Complex64::new(ay, 0.0),
        Complex64::new(0.0, az),
    )
    .expect("witness has a_X or a_Y nonzero")
}

fn limiting_case(e_b: f64, alpha: f64) -> BoundResult {
    let real = |i: f64, x: f64, y: f64, z: Complex64| {
        KrausCoefficients::new(i.into(), x.into(), y.into(), z).expect("nonzero witness")
    };
    let (ep, ay_star, witness) = if e_b == 0.0 && alpha == 0.0 {
        (0.0, 0.0, real(1.0, 0.0, 0.0, Complex64::new(0.0, 0.0)))
    } else if e_b == 0.0 {
        // a_X = a_Y = 0, so e_p = alpha
        (
            alpha,
            0.0,
            real((1.0 - alpha).sqrt(), 0.0, 0.0, Complex64::new(0.0, alpha.sqrt())),
        )
    } else {
        // a_Z = i a_Y, so e_p <= 2 e_b, attained with a_X = 0
        (
            2.0 * e_b,
            1.0,
            real(
                (1.0 - 2.0 * e_b).sqrt(),
                0.0,
                e_b.sqrt(),
                Complex64::new(0.0, e_b.sqrt()),
            ),
        )
    };
    BoundResult {
        e_b,
        alpha,
        ep_max: ep.min(PHASE_ERROR_CAP),
        ep_uncapped: ep,
        ay_star,
        witness,
        method: BoundKind::Limiting,
    }
}

/// Closed-form bound without the `1/2` cap:
/// `alpha + e_b (2 - 2 alpha - alpha^2) + 2 sqrt(alpha (1 - alpha) e_b (1 - e_b - e_b alpha))`.
pub fn approx_bound_uncapped(e_b: f64, alpha: f64) -> Result<f64> {
    check_unit_half("e_b", e_b)?;
    check_unit_half("alpha", alpha)?;
    let cross = alpha * (1.0 - alpha) * e_b * (1.0 - e_b - e_b * alpha);
    Ok(alpha + e_b * (2.0 - 2.0 * alpha - alpha * alpha) + 2.0 * cross.max(0.0).sqrt())
}

/// [`approx_bound_uncapped`] capped at one half.
pub fn approx_bound(e_b: f64, alpha: f64) -> Result<f64> {
    Ok(approx_bound_uncapped(e_b, alpha)?.min(PHASE_ERROR_CAP))
}

/// `alpha + 2 e_b + 2 sqrt(e_b alpha)`; equals `5 e_b` on the diagonal.
pub fn simple_bound(e_b: f64, alpha: f64) -> Result<f64> {
    check_unit_half("e_b", e_b)?;
    check_unit_half("alpha", alpha)?;
    Ok(alpha + 2.0 * e_b + 2.0 * (e_b * alpha).sqrt())
}

/// Capped phase error bound for the selected method.
pub fn phase_error_bound(e_b: f64, alpha: f64, method: BoundMethod) -> Result<f64> {
    match method {
        BoundMethod::Exact => exact_bound(e_b, alpha).map(|b| b.ep_max),
        BoundMethod::Approximate => approx_bound(e_b, alpha),
        BoundMethod::Simple => Ok(simple_bound(e_b, alpha)?.min(PHASE_ERROR_CAP)),
    }
}
