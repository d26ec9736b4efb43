//! Collective attacks as Pauli-decomposed Kraus elements.
//!
//! A single Kraus element acting on Bob's qubit is written
//! `E = a_I I + a_X X + a_Y Y + a_Z Z`. The three error rates seen by the
//! protocol depend on the amplitudes only through the squared magnitudes and
//! two interference terms, `|a_I + a_X|^2` and `|i a_Y - a_Z|^2`. That is what
//! lets [`combine_pair`] fold any ensemble of elements into one element with
//! identical rates.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Maximum number of draws [`random_attack`] makes before giving up.
pub const REJECTION_BUDGET: u64 = 1_000_000;

/// Pauli amplitudes `(a_I, a_X, a_Y, a_Z)` of one Kraus element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrausCoefficients {
    a_i: Complex64,
    a_x: Complex64,
    a_y: Complex64,
    a_z: Complex64,
}

impl KrausCoefficients {
    pub fn new(a_i: Complex64, a_x: Complex64, a_y: Complex64, a_z: Complex64) -> Result<Self> {
        let all = [a_i, a_x, a_y, a_z];
        if all.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidArgument(
                "Kraus coefficients must be finite".into(),
            ));
        }
        if all.iter().all(|a| a.norm_sqr() == 0.0) {
            return Err(Error::InvalidArgument(
                "at least one Kraus coefficient must be nonzero".into(),
            ));
        }
        Ok(Self { a_i, a_x, a_y, a_z })
    }

    /// Element with real amplitudes.
    pub fn real(a_i: f64, a_x: f64, a_y: f64, a_z: f64) -> Result<Self> {
        Self::new(a_i.into(), a_x.into(), a_y.into(), a_z.into())
    }

    pub fn a_i(&self) -> Complex64 {
        self.a_i
    }

    pub fn a_x(&self) -> Complex64 {
        self.a_x
    }

    pub fn a_y(&self) -> Complex64 {
        self.a_y
    }

    pub fn a_z(&self) -> Complex64 {
        self.a_z
    }

    pub fn as_array(&self) -> [Complex64; 4] {
        [self.a_i, self.a_x, self.a_y, self.a_z]
    }

    /// `|a_I|^2 + |a_X|^2 + |a_Y|^2 + |a_Z|^2`.
    pub fn total_weight(&self) -> f64 {
        self.as_array().iter().map(|a| a.norm_sqr()).sum()
    }

    /// Weight of outcome `|+>` on the check state, `|a_I + a_X|^2`.
    pub fn check_pass_weight(&self) -> f64 {
        (self.a_i + self.a_x).norm_sqr()
    }

    /// Weight of outcome `|->` on the check state, `|i a_Y - a_Z|^2`.
    pub fn check_fail_weight(&self) -> f64 {
        (I * self.a_y - self.a_z).norm_sqr()
    }

    /// Interference cosines of the `(I, X)` and `(iY, -Z)` pairs.
    pub fn interference_cosines(&self) -> PairCosines {
        PairCosines {
            ix: cosine(self.a_i, self.a_x),
            yz: cosine(I * self.a_y, -self.a_z),
        }
    }

    /// Multiplies every amplitude by `factor`.
    pub fn scaled(&self, factor: Complex64) -> Result<Self> {
        Self::new(
            self.a_i * factor,
            self.a_x * factor,
            self.a_y * factor,
            self.a_z * factor,
        )
    }

    pub fn rates(&self) -> Result<ErrorRates> {
        rates_from_weights(&Weights::of(self))
    }
}

/// `c` in `|u + v|^2 = |u|^2 + |v|^2 + 2 c |u| |v|`, zero when either term vanishes.
fn cosine(u: Complex64, v: Complex64) -> f64 {
    let denom = u.norm() * v.norm();
    if denom == 0.0 {
        0.0
    } else {
        (u * v.conj()).re / denom
    }
}

/// Interference cosines of the two amplitude pairs that enter the check-state rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairCosines {
    /// Between `a_I` and `a_X`.
    pub ix: f64,
    /// Between `i a_Y` and `-a_Z`.
    pub yz: f64,
}

impl fmt::Display for KrausCoefficients {
    /// Eight comma-separated scalars: `Re(a_I),Im(a_I),...,Re(a_Z),Im(a_Z)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .as_array()
            .iter()
            .flat_map(|a| [a.re, a.im])
            .map(|v| format!("{v}"))
            .collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for KrausCoefficients {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let values = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("bad attack scalar {t:?}: {e}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        if values.len() != 8 {
            return Err(Error::Parse(format!(
                "attack needs 8 comma-separated scalars, got {}",
                values.len()
            )));
        }
        let c = |k: usize| Complex64::new(values[2 * k], values[2 * k + 1]);
        Self::new(c(0), c(1), c(2), c(3))
    }
}

impl Serialize for KrausCoefficients {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let flat: Vec<f64> = self
            .as_array()
            .iter()
            .flat_map(|a| [a.re, a.im])
            .collect();
        flat.serialize(serializer)
    }
}

/// A nonempty collection of Kraus elements whose contributions are summed.
#[derive(Debug, Clone, PartialEq)]
pub struct AttackEnsemble {
    elements: Vec<KrausCoefficients>,
}

impl AttackEnsemble {
    pub fn new(elements: Vec<KrausCoefficients>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidArgument("attack ensemble is empty".into()));
        }
        Ok(Self { elements })
    }

    pub fn single(element: KrausCoefficients) -> Self {
        Self {
            elements: vec![element],
        }
    }

    pub fn elements(&self) -> &[KrausCoefficients] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Bit error rate on Z data, bit error rate on the `|+>` check state, and phase error rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorRates {
    pub e_b: f64,
    pub alpha: f64,
    pub e_p: f64,
}

#[derive(Default)]
struct Weights {
    total: f64,
    bit: f64,
    phase: f64,
    check_fail: f64,
    check_pass: f64,
}

impl Weights {
    fn of(k: &KrausCoefficients) -> Self {
        let [i, x, y, z] = k.as_array().map(|a| a.norm_sqr());
        Self {
            total: i + x + y + z,
            bit: x + y,
            phase: z + y,
            check_fail: k.check_fail_weight(),
            check_pass: k.check_pass_weight(),
        }
    }

    fn add(mut self, other: Self) -> Self {
        self.total += other.total;
        self.bit += other.bit;
        self.phase += other.phase;
        self.check_fail += other.check_fail;
        self.check_pass += other.check_pass;
        self
    }
}

fn rates_from_weights(w: &Weights) -> Result<ErrorRates> {
    if w.total <= 0.0 {
        return Err(Error::DegenerateAttack("total Pauli weight is zero"));
    }
    let check = w.check_fail + w.check_pass;
    if check <= 0.0 {
        return Err(Error::DegenerateAttack("check-state outcome weight is zero"));
    }
    Ok(ErrorRates {
        e_b: w.bit / w.total,
        alpha: w.check_fail / check,
        e_p: w.phase / w.total,
    })
}

/// Error rates induced by an ensemble, with every weight summed over its elements.
pub fn rates_from_ensemble(ensemble: &AttackEnsemble) -> Result<ErrorRates> {
    let w = ensemble
        .elements
        .iter()
        .map(Weights::of)
        .fold(Weights::default(), Weights::add);
    rates_from_weights(&w)
}

/// Merges two elements into one that contributes the same weights to every rate.
///
/// Magnitudes add in quadrature. The relative phase inside each interfering
/// pair is then chosen so that the pair's interference term is the sum of the
/// inputs' terms: `a_X = |a_X|`, `a_I = e^{i acos c} |a_I|`, and likewise
/// `-a_Z = |a_Z|`, `i a_Y = e^{i acos c'} |a_Y|`.
pub fn combine_pair(s1: &KrausCoefficients, s2: &KrausCoefficients) -> KrausCoefficients {
    combine_pair_with_cosines(s1, s2).0
}

/// [`combine_pair`] that also returns the (unclamped) interference cosines it computed.
pub fn combine_pair_with_cosines(
    s1: &KrausCoefficients,
    s2: &KrausCoefficients,
) -> (KrausCoefficients, PairCosines) {
    let mag = |a: Complex64, b: Complex64| (a.norm_sqr() + b.norm_sqr()).sqrt();
    let m_i = mag(s1.a_i, s2.a_i);
    let m_x = mag(s1.a_x, s2.a_x);
    let m_y = mag(s1.a_y, s2.a_y);
    let m_z = mag(s1.a_z, s2.a_z);

    let merged_cosine = |cross: f64, m_u: f64, m_v: f64| {
        let denom = m_u * m_v;
        if denom == 0.0 {
            0.0
        } else {
            cross / denom
        }
    };
    let cross_ix = (s1.a_i * s1.a_x.conj()).re + (s2.a_i * s2.a_x.conj()).re;
    let cross_yz =
        (I * s1.a_y * (-s1.a_z).conj()).re + (I * s2.a_y * (-s2.a_z).conj()).re;
    let cosines = PairCosines {
        ix: merged_cosine(cross_ix, m_i, m_x),
        yz: merged_cosine(cross_yz, m_y, m_z),
    };

    let phase = |c: f64| Complex64::from_polar(1.0, c.clamp(-1.0, 1.0).acos());
    let merged = KrausCoefficients {
        a_i: phase(cosines.ix) * m_i,
        a_x: Complex64::new(m_x, 0.0),
        // i a_Y = e^{i phi} |a_Y|
        a_y: -I * phase(cosines.yz) * m_y,
        a_z: Complex64::new(-m_z, 0.0),
    };
    (merged, cosines)
}

/// Folds an ensemble into a single element, left to right.
pub fn reduce_ensemble(ensemble: &AttackEnsemble) -> KrausCoefficients {
    let (first, rest) = ensemble
        .elements
        .split_first()
        .expect("AttackEnsemble is nonempty");
    rest.iter().fold(*first, |acc, next| combine_pair(&acc, next))
}

/// Restriction on the rates of attacks drawn by [`random_attack`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Region {
    #[default]
    Unrestricted,
    /// Only attacks inducing `e_b <= 1/2` and `alpha <= 1/2`.
    HalfQuadrant,
}

/// Seeded random element with unit total weight.
///
/// Real and imaginary parts are drawn uniformly from `[-1, 1]` and the element
/// is normalized so that the magnitudes squared sum to one.
pub fn random_attack(seed: u64, region: Region) -> Result<KrausCoefficients> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..REJECTION_BUDGET {
        let mut draw = || Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
        let raw = [draw(), draw(), draw(), draw()];
        let norm = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let Ok(k) = KrausCoefficients::new(raw[0] / norm, raw[1] / norm, raw[2] / norm, raw[3] / norm)
        else {
            continue;
        };
        match region {
            Region::Unrestricted => return Ok(k),
            Region::HalfQuadrant => {
                if let Ok(r) = k.rates() {
                    if r.e_b <= 0.5 && r.alpha <= 0.5 {
                        return Ok(k);
                    }
                }
            }
        }
    }
    Err(Error::SamplingBudget(REJECTION_BUDGET))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_rates(r: ErrorRates, e_b: f64, alpha: f64, e_p: f64) {
        assert!((r.e_b - e_b).abs() < 1e-12, "e_b {} vs {e_b}", r.e_b);
        assert!((r.alpha - alpha).abs() < 1e-12, "alpha {} vs {alpha}", r.alpha);
        assert!((r.e_p - e_p).abs() < 1e-12, "e_p {} vs {e_p}", r.e_p);
    }

    #[test]
    fn identity_channel_has_no_errors() {
        let k = KrausCoefficients::real(1.0, 0.0, 0.0, 0.0).unwrap();
        assert_rates(k.rates().unwrap(), 0.0, 0.0, 0.0);
    }

    #[test]
    fn pure_phase_flip() {
        let k = KrausCoefficients::real(0.0, 0.0, 0.0, 1.0).unwrap();
        assert_rates(k.rates().unwrap(), 0.0, 1.0, 1.0);
    }

    #[test]
    fn partial_phase_flip_in_quadrature() {
        // |i*0 - i sqrt(0.1)|^2 = 0.1, |sqrt(0.9)|^2 = 0.9
        let k = KrausCoefficients::new(
            c(0.9f64.sqrt(), 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.1f64.sqrt()),
        )
        .unwrap();
        assert_rates(k.rates().unwrap(), 0.0, 0.1, 0.1);
    }

    #[test]
    fn two_element_sums() {
        let e = AttackEnsemble::new(vec![
            KrausCoefficients::real(1.0, 0.0, 0.0, 0.0).unwrap(),
            KrausCoefficients::real(0.0, 1.0, 0.0, 0.0).unwrap(),
        ])
        .unwrap();
        assert_rates(rates_from_ensemble(&e).unwrap(), 0.5, 0.0, 0.0);
    }

    #[test]
    fn empty_and_degenerate_inputs() {
        assert!(matches!(
            AttackEnsemble::new(vec![]),
            Err(Error::InvalidArgument(_))
        ));
        assert!(KrausCoefficients::real(0.0, 0.0, 0.0, 0.0).is_err());
        assert!(KrausCoefficients::real(f64::NAN, 1.0, 0.0, 0.0).is_err());
        // a_I + a_X = 0 and i a_Y - a_Z = 0: no check-state outcome at all
        let k = KrausCoefficients::real(1.0, -1.0, 0.0, 0.0).unwrap();
        assert!(matches!(k.rates(), Err(Error::DegenerateAttack(_))));
    }

    #[test]
    fn combine_orthogonal_identity_and_flip() {
        let a = KrausCoefficients::real(1.0, 0.0, 0.0, 0.0).unwrap();
        let b = KrausCoefficients::real(0.0, 1.0, 0.0, 0.0).unwrap();
        let (m, cos) = combine_pair_with_cosines(&a, &b);
        assert_eq!(cos.ix, 0.0);
        assert!((m.a_i() - c(0.0, 1.0)).norm() < 1e-15);
        assert_eq!(m.a_x(), c(1.0, 0.0));
        assert!((m.check_pass_weight() - 2.0).abs() < 1e-15);
        assert_rates(m.rates().unwrap(), 0.5, 0.0, 0.0);
    }

    #[test]
    fn combine_with_itself_keeps_cosines() {
        let s = KrausCoefficients::new(c(0.3, 0.4), c(-0.2, 0.5), c(0.1, -0.6), c(0.7, 0.2)).unwrap();
        let (m, cos) = combine_pair_with_cosines(&s, &s);
        let own = s.interference_cosines();
        assert!((cos.ix - own.ix).abs() < 1e-12);
        assert!((cos.yz - own.yz).abs() < 1e-12);
        for (merged, orig) in m.as_array().iter().zip(s.as_array()) {
            assert!((merged.norm() - 2f64.sqrt() * orig.norm()).abs() < 1e-12);
        }
        let pair = AttackEnsemble::new(vec![s, s]).unwrap();
        let r1 = rates_from_ensemble(&pair).unwrap();
        let r2 = m.rates().unwrap();
        assert_rates(r2, r1.e_b, r1.alpha, r1.e_p);
    }

    #[test]
    fn reduce_singleton_is_unchanged_up_to_phases() {
        let s = KrausCoefficients::new(c(0.3, 0.4), c(-0.2, 0.5), c(0.1, -0.6), c(0.7, 0.2)).unwrap();
        let r = reduce_ensemble(&AttackEnsemble::single(s));
        assert_eq!(r, s);
    }

    #[test]
    fn reduce_two_matches_combine() {
        let a = KrausCoefficients::real(1.0, 0.0, 0.0, 0.0).unwrap();
        let b = KrausCoefficients::real(0.0, 1.0, 0.0, 0.0).unwrap();
        let e = AttackEnsemble::new(vec![a, b]).unwrap();
        assert_eq!(reduce_ensemble(&e), combine_pair(&a, &b));
    }

    #[test]
    fn random_attack_is_deterministic_and_normalized() {
        for seed in 0..50 {
            let a = random_attack(seed, Region::Unrestricted).unwrap();
            let b = random_attack(seed, Region::Unrestricted).unwrap();
            assert_eq!(a, b);
            assert!((a.total_weight() - 1.0).abs() < 1e-12);
        }
        assert_ne!(
            random_attack(1, Region::Unrestricted).unwrap(),
            random_attack(2, Region::Unrestricted).unwrap()
        );
    }

    #[test]
    fn region_draws_respect_half_quadrant() {
        for seed in 0..1000 {
            let k = random_attack(seed, Region::HalfQuadrant).unwrap();
            let r = k.rates().unwrap();
            assert!(r.e_b <= 0.5 && r.alpha <= 0.5, "seed {seed}: {r:?}");
        }
    }

    #[test]
    fn serialization_order() {
        let k = KrausCoefficients::new(c(1.0, 2.0), c(3.0, 4.0), c(5.0, 6.0), c(7.0, 8.0)).unwrap();
        assert_eq!(k.to_string(), "1,2,3,4,5,6,7,8");
        assert_eq!("1,2,3,4,5,6,7,8".parse::<KrausCoefficients>().unwrap(), k);
        assert!("1,2,3".parse::<KrausCoefficients>().is_err());
        assert!("1,2,3,4,5,6,7,x".parse::<KrausCoefficients>().is_err());
        assert!("0,0,0,0,0,0,0,0".parse::<KrausCoefficients>().is_err());
    }
}
