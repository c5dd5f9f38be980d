//! Satake parameters and Hecke data attached to a single (synthetic) form.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json::ComplexJson;
use crate::lr::{key_identity_expansion, symmetrized_square};
use crate::primes::{is_prime, primes_up_to};
use crate::schur::{eval_schur, EvalPoint};
use crate::weights::{WeightVector, MAX_RANK, MIN_RANK};

/// Drift in ∏α_i − 1 that is silently corrected.
pub const PRODUCT_TOLERANCE: f64 = 1e-12;
/// Drift beyond this is an input error.
pub const PRODUCT_REPAIR_LIMIT: f64 = 1e-9;
pub const TEMPERED_TOLERANCE: f64 = 1e-12;
pub const DEFAULT_EXCEPTIONAL_THRESHOLD: f64 = 1.0;

/// Satake parameters α = (α₁, …, α_n) at one prime, with ∏α_i = 1.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SatakePoint {
    n: usize,
    #[serde(serialize_with = "crate::json::complex_vec")]
    alphas: Vec<Complex64>,
    tempered: bool,
}

impl SatakePoint {
    pub fn new(mut alphas: Vec<Complex64>) -> Result<Self> {
        let n = alphas.len();
        if !(MIN_RANK..=MAX_RANK).contains(&n) {
            return Err(Error::RankOutOfRange(n));
        }
        if alphas.iter().any(|a| !a.is_finite() || a.norm() == 0.0) {
            return Err(Error::InvalidSatake("parameters must be finite and nonzero".into()));
        }
        let prod: Complex64 = alphas.iter().product();
        let drift = (prod - 1.0).norm();
        if drift > PRODUCT_REPAIR_LIMIT {
            return Err(Error::InvalidSatake(format!(
                "product of parameters is {prod}, not 1"
            )));
        }
        if drift > PRODUCT_TOLERANCE {
            let head: Complex64 = alphas[..n - 1].iter().product();
            alphas[n - 1] = 1.0 / head;
        }
        let tempered = alphas
            .iter()
            .all(|a| (a.norm() - 1.0).abs() <= TEMPERED_TOLERANCE);
        Ok(Self {
            n,
            alphas,
            tempered,
        })
    }

    /// Tempered point e^{iθ₁}, …, e^{iθ_{n−1}}, e^{−i(θ₁+…+θ_{n−1})}.
    pub fn from_angles(theta: &[f64]) -> Result<Self> {
        let mut alphas: Vec<Complex64> =
            theta.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
        alphas.push(Complex64::from_polar(1.0, -theta.iter().sum::<f64>()));
        Self::new(alphas)
    }

    /// Parses `"re,im;re,im;..."`.
    pub fn parse(s: &str) -> Result<Self> {
        Self::new(EvalPoint::parse(s)?.coords().to_vec())
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn alphas(&self) -> &[Complex64] {
        &self.alphas
    }

    pub fn is_tempered(&self) -> bool {
        self.tempered
    }

    pub fn to_eval_point(&self) -> EvalPoint {
        EvalPoint::new(self.alphas.clone()).expect("parameters are nonzero")
    }

    fn require_tempered(&self) -> Result<()> {
        if self.tempered {
            Ok(())
        } else {
            Err(Error::InvalidSatake("a tempered point is required".into()))
        }
    }
}

/// A(p^κ) = S_κ(α).
pub fn fourier_coefficient(kappa: &WeightVector, alpha: &SatakePoint) -> Result<Complex64> {
    kappa.ensure_rank(alpha.n)?;
    eval_schur(kappa, &alpha.to_eval_point())
}

/// | |S_κ(α)|² − Σ_ξ d^ξ_{κκ^ι} S_ξ(α) | for tempered α.
pub fn verify_key_identity(kappa: &WeightVector, alpha: &SatakePoint) -> Result<f64> {
    alpha.require_tempered()?;
    let lhs = fourier_coefficient(kappa, alpha)?.norm_sqr();
    let rhs = key_identity_expansion(kappa)?.evaluate(&alpha.to_eval_point())?;
    Ok((rhs - lhs).norm())
}

/// | |S_κ(α) + S_{κ^ι}(α)|² − (constant + Σ rest_ξ S_ξ(α)) | for tempered α.
pub fn verify_symmetrized_square(kappa: &WeightVector, alpha: &SatakePoint) -> Result<f64> {
    alpha.require_tempered()?;
    let x = alpha.to_eval_point();
    let s = eval_schur(kappa, &x)? + eval_schur(&kappa.involute(), &x)?;
    let sq = symmetrized_square(kappa)?;
    let constant = num_traits::ToPrimitive::to_f64(&sq.constant).unwrap_or(f64::INFINITY);
    let rhs = sq.rest.evaluate(&x)? + constant;
    Ok((rhs - s.norm_sqr()).norm())
}

/// log max_i |α_i| > threshold.
pub fn is_exceptional(alpha: &SatakePoint, threshold: f64) -> bool {
    let max = alpha.alphas.iter().map(|a| a.norm()).fold(0.0, f64::max);
    max.ln() > threshold
}

/// Satake parameters at a finite set of primes, all of one rank.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalData {
    n: usize,
    points: BTreeMap<u64, SatakePoint>,
}

#[derive(Serialize, Deserialize)]
struct PrimeJson {
    p: u64,
    alphas: Vec<ComplexJson>,
}

#[derive(Serialize, Deserialize)]
struct LocalDataJson {
    n: usize,
    primes: Vec<PrimeJson>,
}

impl LocalData {
    pub fn new(n: usize) -> Result<Self> {
        if !(MIN_RANK..=MAX_RANK).contains(&n) {
            return Err(Error::RankOutOfRange(n));
        }
        Ok(Self {
            n,
            points: BTreeMap::new(),
        })
    }

    pub fn insert(&mut self, p: u64, alpha: SatakePoint) -> Result<()> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if alpha.n != self.n {
            return Err(Error::RankMismatch {
                expected: self.n,
                found: alpha.n,
            });
        }
        self.points.insert(p, alpha);
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn get(&self, p: u64) -> Option<&SatakePoint> {
        self.points.get(&p)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &SatakePoint)> {
        self.points.iter().map(|(&p, a)| (p, a))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: LocalDataJson = serde_json::from_str(s)?;
        let mut data = Self::new(raw.n)?;
        for entry in raw.primes {
            let alphas = entry
                .alphas
                .iter()
                .map(|c| Complex64::new(c.re, c.im))
                .collect();
            data.insert(entry.p, SatakePoint::new(alphas)?)?;
        }
        Ok(data)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        let raw = LocalDataJson {
            n: self.n,
            primes: self
                .points
                .iter()
                .map(|(&p, a)| PrimeJson {
                    p,
                    alphas: a.alphas.iter().map(|&c| ComplexJson::from(c)).collect(),
                })
                .collect(),
        };
        serde_json::to_string(&raw).expect("plain data serializes")
    }
}

fn euler_factor(p: u64, alpha: &SatakePoint) -> Result<Complex64> {
    let mut factor = Complex64::new(1.0, 0.0);
    for a in &alpha.alphas {
        let d = 1.0 - a / p as f64;
        if d.norm() < 1e-300 {
            return Err(Error::EulerPole { p });
        }
        factor /= d;
    }
    Ok(factor)
}

/// ∏_{p ≤ z} ∏_i (1 − α_i(p)/p)^{−1}.
pub fn partial_euler_product(data: &LocalData, z: f64) -> Result<Complex64> {
    if z < 2.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    euler_product_over(data, &primes_up_to(z.floor() as u64))
}

/// ∏_{p ∈ primes} ∏_i (1 − α_i(p)/p)^{−1}.
pub fn euler_product_over(data: &LocalData, primes: &[u64]) -> Result<Complex64> {
    let mut acc = Complex64::new(1.0, 0.0);
    for &p in primes {
        let alpha = data.get(p).ok_or(Error::MissingPrime(p))?;
        acc *= euler_factor(p, alpha)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, PI};

    fn w(s: &str) -> WeightVector {
        WeightVector::parse(s, None).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn construction_and_repair() {
        let a = SatakePoint::new(vec![c(1.0, 0.0); 3]).unwrap();
        assert!(a.is_tempered());
        let drift = SatakePoint::new(vec![c(2.0, 0.0), c(0.5 + 1e-11, 0.0)]).unwrap();
        let prod: Complex64 = drift.alphas().iter().product();
        assert!((prod - 1.0).norm() < 1e-15);
        assert!(!drift.is_tempered());
        assert!(SatakePoint::new(vec![c(2.0, 0.0), c(0.6, 0.0)]).is_err());
        assert!(SatakePoint::new(vec![c(1.0, 0.0)]).is_err());
        assert!(SatakePoint::new(vec![c(0.0, 0.0), c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn coefficient_examples() {
        let omega = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
        let alpha = SatakePoint::new(vec![c(1.0, 0.0), omega, omega * omega]).unwrap();
        assert!(fourier_coefficient(&WeightVector::zero(3).unwrap(), &alpha).unwrap() == c(1.0, 0.0));
        assert!(fourier_coefficient(&w("1,0"), &alpha).unwrap().norm() < 1e-12);
        let alpha = SatakePoint::from_angles(&[0.3, 1.9]).unwrap();
        assert!(fourier_coefficient(&w("1,1"), &alpha).unwrap().im.abs() < 1e-12);
        assert!(matches!(
            fourier_coefficient(&w("1"), &alpha),
            Err(Error::RankMismatch { .. })
        ));
    }

    #[test]
    fn parameter_sum_is_first_coefficient() {
        // With this indexing S_(0,…,0,1) = e₁.
        let alpha = SatakePoint::from_angles(&[0.4, -1.1, 2.5]).unwrap();
        let sum: Complex64 = alpha.alphas().iter().sum();
        let a = fourier_coefficient(&w("0,0,1"), &alpha).unwrap();
        assert!((a - sum).norm() < 1e-12);
    }

    #[test]
    fn key_identity_examples() {
        let ones = SatakePoint::new(vec![c(1.0, 0.0); 3]).unwrap();
        assert!(verify_key_identity(&w("1,0"), &ones).unwrap() < 1e-12);
        let pm = SatakePoint::new(vec![c(0.0, 1.0), c(0.0, -1.0)]).unwrap();
        assert!(verify_key_identity(&w("1"), &pm).unwrap() < 1e-12);
        let loose = SatakePoint::new(vec![c(2.0, 0.0), c(0.5, 0.0)]).unwrap();
        assert!(verify_key_identity(&w("1"), &loose).is_err());
    }

    #[test]
    fn exceptional_predicate() {
        let t = SatakePoint::from_angles(&[0.7]).unwrap();
        assert!(!is_exceptional(&t, 1e-9));
        let big = SatakePoint::new(vec![c(E * E, 0.0), c(E.powi(-2), 0.0)]).unwrap();
        assert!(is_exceptional(&big, DEFAULT_EXCEPTIONAL_THRESHOLD));
        let mild = SatakePoint::new(vec![c(E.sqrt(), 0.0), c(1.0 / E.sqrt(), 0.0)]).unwrap();
        assert!(!is_exceptional(&mild, DEFAULT_EXCEPTIONAL_THRESHOLD));
    }

    #[test]
    fn euler_product_examples() {
        let mut data = LocalData::new(3).unwrap();
        for p in [2, 3, 5] {
            data.insert(p, SatakePoint::new(vec![c(1.0, 0.0); 3]).unwrap()).unwrap();
        }
        assert_eq!(partial_euler_product(&data, 1.5).unwrap(), c(1.0, 0.0));
        assert!((partial_euler_product(&data, 3.0).unwrap() - 27.0).norm() < 1e-12);
        assert!(matches!(partial_euler_product(&data, 7.0), Err(Error::MissingPrime(7))));
        assert!(matches!(data.insert(4, SatakePoint::new(vec![c(1.0, 0.0); 3]).unwrap()), Err(Error::NotPrime(4))));
    }

    #[test]
    fn euler_pole_reported() {
        let mut data = LocalData::new(2).unwrap();
        data.insert(2, SatakePoint::new(vec![c(2.0, 0.0), c(0.5, 0.0)]).unwrap()).unwrap();
        assert!(matches!(partial_euler_product(&data, 2.0), Err(Error::EulerPole { p: 2 })));
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"n":2,"primes":[{"p":2,"alphas":[{"re":0.0,"im":1.0},{"re":0.0,"im":-1.0}]}]}"#;
        let data = LocalData::from_json(text).unwrap();
        assert_eq!(data.rank(), 2);
        assert_eq!(LocalData::from_json(&data.to_json()).unwrap(), data);
        assert!(LocalData::from_json(r#"{"n":3,"primes":[{"p":2,"alphas":[{"re":1,"im":0},{"re":1,"im":0}]}]}"#).is_err());
    }
}
