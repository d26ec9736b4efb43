//! Monte Carlo simulation of the prepare-and-measure protocol under a collective attack.
//!
//! Each round draws Alice's basis bit, her Z-basis value, Bob's basis bit and
//! one uniform for the measurement outcome. Outcomes follow the single-element
//! probabilities of the attack: a sifted Z round is flipped with probability
//! `e_b` and a sifted `|+>` round is read as `|->` with probability `alpha`.
//! Phase errors are never sampled; no X measurement is made on data pairs.
//!
//! # Randomness
//!
//! Round `i` draws from `ChaCha8` keyed by the run seed on stream `i`, so rounds
//! can be generated in any order or in parallel with identical results. The
//! check/data split of the sifted Z rounds uses stream `u64::MAX`.

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::attack::KrausCoefficients;
use crate::error::{Error, Result};

pub const DEFAULT_DELTA: f64 = 0.1;

const SPLIT_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    /// Number of data bits (and of Z check bits).
    pub n: u64,
    /// Oversampling fraction; `8 N (1 + delta)` rounds are sent.
    pub delta: f64,
    pub attack: KrausCoefficients,
    pub seed: u64,
}

impl SimConfig {
    pub fn new(n: u64, attack: KrausCoefficients, seed: u64) -> Self {
        Self {
            n,
            delta: DEFAULT_DELTA,
            attack,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidArgument("N must be at least 1".into()));
        }
        if !(self.delta > 0.0) || !self.delta.is_finite() {
            return Err(Error::Domain {
                name: "delta",
                value: self.delta,
                domain: "(0, inf)",
            });
        }
        Ok(())
    }

    pub fn rounds(&self) -> u64 {
        (8.0 * self.n as f64 * (1.0 + self.delta)).ceil() as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProtocolStats {
    pub transmitted: u64,
    pub sifted: u64,
    pub sifted_z: u64,
    pub sifted_x: u64,
    pub z_check_errors: u64,
    pub z_check_total: u64,
    /// Errors on the data half of the sifted Z rounds; not announced in the protocol.
    pub data_errors: u64,
    pub data_total: u64,
    /// `c_{+-}`: check-state rounds read as `|->`.
    pub x_check_errors: u64,
    pub x_check_total: u64,
    pub observed_eb: f64,
    pub observed_alpha: f64,
}

impl ProtocolStats {
    /// `c_{++}`: check-state rounds read as `|+>`.
    pub fn x_check_passes(&self) -> u64 {
        self.x_check_total - self.x_check_errors
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Round {
    Discarded,
    Z { error: bool },
    X { error: bool },
}

fn round_rng(key: [u8; 32], stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(stream);
    rng
}

fn simulate_round(key: [u8; 32], index: u64, p_bit: f64, p_check: f64) -> Round {
    let mut rng = round_rng(key, index);
    let bits = rng.next_u32();
    let alice_x = bits & 1 == 1;
    // Z-basis value; the flip probability is the same for |0_z> and |1_z>
    let _value = bits >> 1 & 1;
    let bob_x = bits >> 2 & 1 == 1;
    let u: f64 = rng.gen();
    match (alice_x, bob_x) {
        (false, false) => Round::Z { error: u < p_bit },
        (true, true) => Round::X { error: u < p_check },
        _ => Round::Discarded,
    }
}

/// Runs steps 1-5 of the protocol: send, measure, sift, split, estimate.
pub fn run_protocol(config: &SimConfig) -> Result<ProtocolStats> {
    config.validate()?;
    let rates = config.attack.rates()?;
    let key = ChaCha8Rng::seed_from_u64(config.seed).get_seed();
    let transmitted = config.rounds();

    let rounds: Vec<Round> = (0..transmitted)
        .into_par_iter()
        .map(|i| simulate_round(key, i, rates.e_b, rates.alpha))
        .collect();

    let mut z_errors = Vec::with_capacity(transmitted as usize / 4 + 1);
    let mut x_errors = Vec::with_capacity(transmitted as usize / 4 + 1);
    for r in &rounds {
        match *r {
            Round::Z { error } => z_errors.push(error),
            Round::X { error } => x_errors.push(error),
            Round::Discarded => {}
        }
    }
    let (sifted_z, sifted_x) = (z_errors.len() as u64, x_errors.len() as u64);
    let need = 2 * config.n;
    if sifted_z < need {
        return Err(Error::InsufficientSift {
            basis: "Z",
            got: sifted_z,
            need,
        });
    }
    if sifted_x < need {
        return Err(Error::InsufficientSift {
            basis: "X",
            got: sifted_x,
            need,
        });
    }

    let n = config.n as usize;
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.shuffle(&mut round_rng(key, SPLIT_STREAM));
    let count = |idx: &[usize]| idx.iter().filter(|&&k| z_errors[k]).count() as u64;
    let z_check_errors = count(&order[..n]);
    let data_errors = count(&order[n..]);
    let x_check_errors = x_errors[..2 * n].iter().filter(|&&e| e).count() as u64;

    Ok(ProtocolStats {
        transmitted,
        sifted: sifted_z + sifted_x,
        sifted_z,
        sifted_x,
        z_check_errors,
        z_check_total: config.n,
        data_errors,
        data_total: config.n,
        x_check_errors,
        x_check_total: need,
        observed_eb: z_check_errors as f64 / config.n as f64,
        observed_alpha: x_check_errors as f64 / need as f64,
    })
}

/// Observed check-state counts against the attack's per-round probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AzumaReport {
    /// `p_{+-}`, the analytic check-state error probability.
    pub p_error: f64,
    pub p_no_error: f64,
    /// `|c_{+-} / N_x - p_{+-}|`
    pub deviation_error: f64,
    /// `|c_{++} / N_x - p_{++}|`
    pub deviation_no_error: f64,
    /// `5 sqrt(p (1 - p) / N_x)`, identical for both outcomes.
    pub tolerance: f64,
    pub within_error: bool,
    pub within_no_error: bool,
    pub alpha_deviation: f64,
    pub eb_deviation: f64,
    pub eb_tolerance: f64,
    pub eb_within: bool,
}

pub fn azuma_check(stats: &ProtocolStats, attack: &KrausCoefficients) -> Result<AzumaReport> {
    let rates = attack.rates()?;
    let n_x = stats.x_check_total as f64;
    let p_error = rates.alpha;
    let p_no_error = 1.0 - p_error;
    let deviation_error = (stats.x_check_errors as f64 / n_x - p_error).abs();
    let deviation_no_error = (stats.x_check_passes() as f64 / n_x - p_no_error).abs();
    let tolerance = 5.0 * (p_error * p_no_error / n_x).sqrt();
    let eb_deviation = (stats.observed_eb - rates.e_b).abs();
    let eb_tolerance = 5.0 * (rates.e_b * (1.0 - rates.e_b) / stats.z_check_total as f64).sqrt();
    Ok(AzumaReport {
        p_error,
        p_no_error,
        deviation_error,
        deviation_no_error,
        tolerance,
        within_error: deviation_error <= tolerance,
        within_no_error: deviation_no_error <= tolerance,
        alpha_deviation: (stats.observed_alpha - p_error).abs(),
        eb_deviation,
        eb_tolerance,
        eb_within: eb_deviation <= eb_tolerance,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SamplingReport {
    pub rate_check: f64,
    pub rate_data: f64,
    pub gap: f64,
}

/// Splits `2N` error indicators uniformly at random into two halves of `N`.
pub fn sampling_check(outcomes: &[bool], seed: u64) -> Result<SamplingReport> {
    if outcomes.is_empty() || outcomes.len() % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "sampling check needs a positive even number of bits, got {}",
            outcomes.len()
        )));
    }
    let n = outcomes.len() / 2;
    let mut order: Vec<usize> = (0..outcomes.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let rate = |idx: &[usize]| idx.iter().filter(|&&k| outcomes[k]).count() as f64 / n as f64;
    let (rate_check, rate_data) = (rate(&order[..n]), rate(&order[n..]));
    Ok(SamplingReport {
        rate_check,
        rate_data,
        gap: (rate_check - rate_data).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn identity() -> KrausCoefficients {
        KrausCoefficients::real(1.0, 0.0, 0.0, 0.0).unwrap()
    }

    #[test]
    fn identity_channel_is_error_free() {
        let s = run_protocol(&SimConfig::new(10_000, identity(), 3)).unwrap();
        assert_eq!(s.observed_eb, 0.0);
        assert_eq!(s.observed_alpha, 0.0);
        assert_eq!(s.transmitted, 88_000);
        let r = azuma_check(&s, &identity()).unwrap();
        assert_eq!(r.deviation_error, 0.0);
        assert_eq!(r.deviation_no_error, 0.0);
        assert!(r.within_error && r.within_no_error);
    }

    #[test]
    fn bit_flip_channel_always_errs_on_z() {
        let flip = KrausCoefficients::real(0.0, 1.0, 0.0, 0.0).unwrap();
        let s = run_protocol(&SimConfig::new(10_000, flip, 3)).unwrap();
        assert_eq!(s.observed_eb, 1.0);
        assert_eq!(s.observed_alpha, 0.0);
        assert_eq!(s.data_errors, 10_000);
        let r = azuma_check(&s, &flip).unwrap();
        assert_eq!(r.deviation_error, 0.0);
    }

    #[test]
    fn partial_phase_flip_alpha_within_five_sigma() {
        let k = KrausCoefficients::new(
            Complex64::new(0.9f64.sqrt(), 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.1f64.sqrt()),
        )
        .unwrap();
        let s = run_protocol(&SimConfig::new(100_000, k, 11)).unwrap();
        let sigma = (0.1f64 * 0.9 / s.x_check_total as f64).sqrt();
        assert!((s.observed_alpha - 0.1).abs() < 5.0 * sigma);
        assert_eq!(s.observed_eb, 0.0);
    }

    #[test]
    fn same_seed_same_stats() {
        let k = KrausCoefficients::real(0.9, 0.2, 0.3, 0.1).unwrap();
        let a = run_protocol(&SimConfig::new(2_000, k, 99)).unwrap();
        let b = run_protocol(&SimConfig::new(2_000, k, 99)).unwrap();
        assert_eq!(a, b);
        let c = run_protocol(&SimConfig::new(2_000, k, 100)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn parallel_generation_matches_sequential() {
        let k = KrausCoefficients::real(0.9, 0.2, 0.3, 0.1).unwrap();
        let r = k.rates().unwrap();
        let key = ChaCha8Rng::seed_from_u64(5).get_seed();
        let seq: Vec<Round> = (0..5_000).map(|i| simulate_round(key, i, r.e_b, r.alpha)).collect();
        let par: Vec<Round> = (0..5_000u64)
            .into_par_iter()
            .map(|i| simulate_round(key, i, r.e_b, r.alpha))
            .collect();
        assert_eq!(seq, par);
    }

    #[test]
    fn insufficient_sift_is_an_error() {
        let cfg = SimConfig {
            delta: 1e-9,
            ..SimConfig::new(2, identity(), 0)
        };
        // 17 rounds rarely yield 4 sifted rounds in each basis; some seed must fail
        let failed = (0..200u64).any(|seed| {
            matches!(
                run_protocol(&SimConfig { seed, ..cfg }),
                Err(Error::InsufficientSift { .. })
            )
        });
        assert!(failed);
    }

    #[test]
    fn invalid_config() {
        assert!(run_protocol(&SimConfig::new(0, identity(), 0)).is_err());
        let cfg = SimConfig {
            delta: 0.0,
            ..SimConfig::new(10, identity(), 0)
        };
        assert!(run_protocol(&cfg).is_err());
    }

    #[test]
    fn sampling_check_edge_cases() {
        let zeros = vec![false; 100];
        let r = sampling_check(&zeros, 1).unwrap();
        assert_eq!((r.rate_check, r.rate_data, r.gap), (0.0, 0.0, 0.0));
        assert!(sampling_check(&[true, false, true], 1).is_err());
        assert!(sampling_check(&[], 1).is_err());
        let ones = vec![true; 10];
        assert_eq!(sampling_check(&ones, 4).unwrap().gap, 0.0);
    }
}
