use num_complex::Complex64;
use rayon::prelude::*;

use qkd3_core::attack::KrausCoefficients;
use qkd3_core::bound::exact_bound;
use qkd3_core::sim::{azuma_check, run_protocol, sampling_check, SimConfig};

fn attack() -> KrausCoefficients {
    KrausCoefficients::new(
        Complex64::new(0.9, 0.05),
        Complex64::new(0.15, 0.0),
        Complex64::new(0.1, -0.1),
        Complex64::new(0.0, 0.25),
    )
    .unwrap()
}

#[test]
fn azuma_flags_hold_across_seeds() {
    let k = attack();
    let within = (0..100u64)
        .into_par_iter()
        .filter(|&seed| {
            let s = run_protocol(&SimConfig::new(100_000, k, seed)).unwrap();
            let r = azuma_check(&s, &k).unwrap();
            r.within_error && r.within_no_error
        })
        .count();
    assert!(within >= 99, "{within}");
}

#[test]
fn observed_rates_feed_a_bound_that_covers_the_true_phase_error() {
    let k = attack();
    let truth = k.rates().unwrap();
    for seed in 0..20 {
        let s = run_protocol(&SimConfig::new(50_000, k, seed)).unwrap();
        let sigma_b = (truth.e_b * (1.0 - truth.e_b) / s.z_check_total as f64).sqrt();
        let sigma_a = (truth.alpha * (1.0 - truth.alpha) / s.x_check_total as f64).sqrt();
        // upper confidence corner of the observed rates
        let e_b = (s.observed_eb + 5.0 * sigma_b).min(0.5);
        let alpha = (s.observed_alpha + 5.0 * sigma_a).min(0.5);
        let b = exact_bound(e_b, alpha).unwrap().ep_uncapped;
        assert!(b >= truth.e_p, "seed {seed}: bound {b} < e_p {}", truth.e_p);
    }
}

#[test]
fn random_split_concentrates() {
    let n = 10_000;
    let alternating: Vec<bool> = (0..2 * n).map(|k| k % 2 == 1).collect();
    let blocked: Vec<bool> = (0..2 * n).map(|k| k < n).collect();
    let limit = 5.0 / (n as f64).sqrt();
    for seq in [&alternating, &blocked] {
        let ok = (0..100)
            .filter(|&seed| sampling_check(seq, seed).unwrap().gap <= limit)
            .count();
        assert!(ok >= 99, "{ok}");
    }
}

#[test]
fn check_and_data_halves_agree() {
    let k = attack();
    let s = run_protocol(&SimConfig::new(100_000, k, 7)).unwrap();
    let data = s.data_errors as f64 / s.data_total as f64;
    let e_b = k.rates().unwrap().e_b;
    let sigma = (2.0 * e_b * (1.0 - e_b) / s.z_check_total as f64).sqrt();
    assert!((s.observed_eb - data).abs() < 5.0 * sigma);
}

#[test]
fn stats_serialize_to_flat_json() {
    let s = run_protocol(&SimConfig::new(100, attack(), 1)).unwrap();
    let v: serde_json::Value = serde_json::to_value(s).unwrap();
    let obj = v.as_object().unwrap();
    assert!(obj.values().all(|x| x.is_number()));
    assert!(obj["transmitted"].is_u64());
    assert!(obj["observed_alpha"].is_f64());
}
