//! Weak coherent source over fiber with threshold detectors.
//!
//! Uses the asymptotic decoy-state model: the single-photon gain `Q1` and
//! error rate `e1` are taken directly from the channel model, as if infinitely
//! many decoy intensities were available. The GLLP-style rate on the sifted key
//! is `R = -Q_mu f H2(E_mu) + Q1 (1 - H2(e_p))`.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::bound::exact_bound;
use crate::error::{Error, Result};
use crate::keyrate::h2;
use crate::optimize::{bisect_last_positive, golden_section_max};

pub const MU_SCAN_POINTS: usize = 400;
pub const MU_TOLERANCE: f64 = 1e-6;
pub const DISTANCE_RESOLUTION_KM: f64 = 0.01;
const DISTANCE_SEARCH_STEP_KM: f64 = 25.0;
const DISTANCE_SEARCH_LIMIT_KM: f64 = 10_000.0;

/// Channel and detector constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelParams {
    pub fiber_loss_db_per_km: f64,
    /// Transmittance of Bob's optics times detector efficiency.
    pub eta_bob: f64,
    /// Background yield per pulse.
    pub y0: f64,
    /// Misalignment error probability.
    pub e_det: f64,
    /// Error rate of background counts.
    pub e0: f64,
    /// Error-correction inefficiency, `f >= 1`.
    pub f_ec: f64,
}

impl Default for ChannelParams {
    /// Gobby-Yuan-Shields fiber experiment with `f = 1.22`.
    fn default() -> Self {
        Self {
            fiber_loss_db_per_km: 0.21,
            eta_bob: 0.045,
            y0: 1.7e-6,
            e_det: 0.033,
            e0: 0.5,
            f_ec: 1.22,
        }
    }
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("fiber_loss_db_per_km", self.fiber_loss_db_per_km),
            ("eta_bob", self.eta_bob),
            ("y0", self.y0),
            ("e_det", self.e_det),
            ("e0", self.e0),
            ("f_ec", self.f_ec),
        ];
        for (name, v) in fields {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Domain {
                    name,
                    value: v,
                    domain: "finite and nonnegative",
                });
            }
        }
        for (name, v) in [("eta_bob", self.eta_bob), ("e_det", self.e_det), ("e0", self.e0)] {
            if v > 1.0 {
                return Err(Error::Domain {
                    name,
                    value: v,
                    domain: "[0, 1]",
                });
            }
        }
        if self.f_ec < 1.0 {
            return Err(Error::Domain {
                name: "f_ec",
                value: self.f_ec,
                domain: "[1, inf)",
            });
        }
        Ok(())
    }

    /// Reads `key = value` lines over the defaults. Blank lines and `#` comments are ignored.
    pub fn from_key_values(text: &str) -> Result<Self> {
        let mut p = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Parse(format!("line {}: expected key=value, got {raw:?}", lineno + 1))
            })?;
            let value: f64 = value.trim().parse().map_err(|e| {
                Error::Parse(format!("line {}: bad value for {}: {e}", lineno + 1, key.trim()))
            })?;
            let slot = match key.trim() {
                "fiber_loss_db_per_km" => &mut p.fiber_loss_db_per_km,
                "eta_bob" => &mut p.eta_bob,
                "y0" => &mut p.y0,
                "e_det" => &mut p.e_det,
                "e0" => &mut p.e0,
                "f_ec" => &mut p.f_ec,
                other => {
                    return Err(Error::Parse(format!(
                        "line {}: unknown parameter {other:?}",
                        lineno + 1
                    )))
                }
            };
            *slot = value;
        }
        p.validate()?;
        Ok(p)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::from_key_values(&text)
    }

    /// Overall transmittance `eta_bob * 10^(-loss L / 10)`.
    pub fn transmittance(&self, l_km: f64) -> f64 {
        self.eta_bob * 10f64.powf(-self.fiber_loss_db_per_km * l_km / 10.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecoyObservables {
    pub q_mu: f64,
    pub e_mu: f64,
    pub q1: f64,
    pub e1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    ThreeState,
    Bb84,
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "three-state" => Ok(Self::ThreeState),
            "bb84" => Ok(Self::Bb84),
            other => Err(Error::Parse(format!(
                "unknown protocol {other:?} (expected three-state or bb84)"
            ))),
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::ThreeState => "three-state",
            Self::Bb84 => "bb84",
        })
    }
}

pub fn channel_observables(params: &ChannelParams, l_km: f64, mu: f64) -> Result<DecoyObservables> {
    if !(l_km >= 0.0) || !l_km.is_finite() {
        return Err(Error::Domain {
            name: "L_km",
            value: l_km,
            domain: "[0, inf)",
        });
    }
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::Domain {
            name: "mu",
            value: mu,
            domain: "(0, inf)",
        });
    }
    Ok(observables(params, params.transmittance(l_km), mu))
}

fn observables(p: &ChannelParams, eta: f64, mu: f64) -> DecoyObservables {
    let detected = -(-eta * mu).exp_m1();
    let q_mu = p.y0 + detected;
    let e_mu = if q_mu > 0.0 {
        (p.e0 * p.y0 + p.e_det * detected) / q_mu
    } else {
        0.0
    };
    let y1 = p.y0 + eta;
    let e1 = if y1 > 0.0 {
        (p.e0 * p.y0 + p.e_det * eta) / y1
    } else {
        0.0
    };
    DecoyObservables {
        q_mu,
        e_mu,
        q1: y1 * mu * (-mu).exp(),
        e1,
    }
}

/// Phase error rate of single-photon signals, `None` when `e1` leaves the bound's domain.
///
/// Three-state: the exact bound at `(e1, e1)`, since misalignment hits the Z
/// states and the `|+>` check state alike. BB84: `e_p = e1`.
pub fn single_photon_phase_error(e1: f64, protocol: Protocol) -> Option<f64> {
    match protocol {
        Protocol::Bb84 => Some(e1),
        Protocol::ThreeState => exact_bound(e1, e1).ok().map(|b| b.ep_max),
    }
}

/// Rate for a known single-photon phase error rate.
pub fn key_rate_with_phase_error(obs: &DecoyObservables, params: &ChannelParams, e_p: f64) -> f64 {
    -obs.q_mu * params.f_ec * h2(obs.e_mu) + obs.q1 * (1.0 - h2(e_p))
}

/// Signed key rate per sifted pulse; `-inf` when `e1 > 1/2` for the three-state protocol.
pub fn key_rate_decoy(obs: &DecoyObservables, params: &ChannelParams, protocol: Protocol) -> f64 {
    match single_photon_phase_error(obs.e1, protocol) {
        Some(e_p) => key_rate_with_phase_error(obs, params, e_p),
        None => f64::NEG_INFINITY,
    }
}

/// Best operating point at one distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistancePoint {
    pub l_km: f64,
    pub mu: f64,
    pub obs: DecoyObservables,
    pub e_p: f64,
    pub rate: f64,
}

/// Maximizes the key rate over `mu in (0, 1]`.
pub fn optimal_mu(params: &ChannelParams, l_km: f64, protocol: Protocol) -> Result<DistancePoint> {
    // e1 does not depend on mu
    let e1 = channel_observables(params, l_km, 1.0)?.e1;
    let eta = params.transmittance(l_km);
    let Some(e_p) = single_photon_phase_error(e1, protocol) else {
        let obs = observables(params, eta, 1.0);
        return Ok(DistancePoint {
            l_km,
            mu: 1.0,
            obs,
            e_p: f64::NAN,
            rate: f64::NEG_INFINITY,
        });
    };

    let rate = |mu: f64| key_rate_with_phase_error(&observables(params, eta, mu), params, e_p);
    let step = 1.0 / MU_SCAN_POINTS as f64;
    let (best_k, _) = (1..=MU_SCAN_POINTS)
        .map(|k| (k, rate(k as f64 * step)))
        .fold((1, f64::NEG_INFINITY), |acc, (k, r)| if r > acc.1 { (k, r) } else { acc });
    let lo = ((best_k - 1) as f64 * step).max(f64::EPSILON);
    let hi = ((best_k + 1) as f64 * step).min(1.0);
    let (mu, r) = golden_section_max(rate, lo, hi, MU_TOLERANCE);

    Ok(DistancePoint {
        l_km,
        mu,
        obs: observables(params, eta, mu),
        e_p,
        rate: r,
    })
}

/// Largest distance, to 0.01 km, at which the optimized rate is positive.
pub fn max_secure_distance(params: &ChannelParams, protocol: Protocol) -> Result<f64> {
    params.validate()?;
    let positive = |l: f64| optimal_mu(params, l, protocol).map_or(f64::NEG_INFINITY, |p| p.rate);
    if positive(0.0) <= 0.0 {
        return Err(Error::NoSecureDistance);
    }
    let mut lo = 0.0;
    let mut hi = DISTANCE_SEARCH_STEP_KM;
    while positive(hi) > 0.0 {
        lo = hi;
        hi += DISTANCE_SEARCH_STEP_KM;
        if hi > DISTANCE_SEARCH_LIMIT_KM {
            return Ok(f64::INFINITY);
        }
    }
    Ok(bisect_last_positive(positive, lo, hi, DISTANCE_RESOLUTION_KM, 200))
}

/// Optimal operating points for `l_min, l_min + step, ...` up to `l_max` inclusive.
pub fn distance_sweep(
    params: &ChannelParams,
    protocol: Protocol,
    l_min: f64,
    l_max: f64,
    l_step: f64,
) -> Result<Vec<DistancePoint>> {
    params.validate()?;
    if !(l_min >= 0.0 && l_max >= l_min && l_step > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "distance range needs 0 <= L_min <= L_max and L_step > 0 (got {l_min}, {l_max}, {l_step})"
        )));
    }
    // half-step slack so an l_max that is a multiple of the step is included
    let count = ((l_max - l_min) / l_step + 0.5).floor() as usize + 1;
    (0..count)
        .into_par_iter()
        .map(|k| l_min + k as f64 * l_step)
        .filter(|l| *l <= l_max + 1e-9 * l_step)
        .map(|l| optimal_mu(params, l, protocol))
        .collect()
}
