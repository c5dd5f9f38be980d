//! The Sato–Tate measure dμ_ST and the p-adic Plancherel measure dμ_p on the
//! torus slice θ ∈ [0, 2π)^{n−1}, θ_n = −(θ₁ + … + θ_{n−1}).
//!
//! Integrals are computed two ways: a periodic trapezoid rule on a uniform
//! tensor grid, and (for Schur polynomials against dμ_p) the exact series
//! ∏(1 − p^{−i}) Σ_η d^η_{κη} p^{−‖η‖} with a certified tail bound.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, LazyLock, Mutex};

use num_complex::Complex64;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lr::{expand_power, lr_coefficient};
use crate::primes::is_prime;
use crate::schur::{dimension_bound, eval_schur, EvalPoint};
use crate::summation::{pairwise_sum, pairwise_sum_complex};
use crate::weights::{weights_with_wnorm_up_to, WeightVector, MAX_RANK, MIN_RANK};

/// Finest level the adaptive rule will try.
pub const MAX_LEVEL: u32 = 10;
/// Upper limit on the number of grid points in one quadrature.
pub const MAX_GRID_POINTS: u64 = 1 << 22;
/// Stopping rule for grid doubling.
pub const ADAPTIVE_TOLERANCE: f64 = 1e-10;
/// Guard on (u + v)|κ| for [`integrate_product`].
pub const PRODUCT_POWER_GUARD: u32 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum MeasureKind {
    SatoTate,
    Plancherel { p: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MeasureSpec {
    pub n: usize,
    #[serde(flatten)]
    pub kind: MeasureKind,
}

impl MeasureSpec {
    pub fn sato_tate(n: usize) -> Result<Self> {
        check_rank(n)?;
        Ok(Self {
            n,
            kind: MeasureKind::SatoTate,
        })
    }

    pub fn plancherel(n: usize, p: u64) -> Result<Self> {
        check_rank(n)?;
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Self {
            n,
            kind: MeasureKind::Plancherel { p },
        })
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn prime(&self) -> Option<u64> {
        match self.kind {
            MeasureKind::SatoTate => None,
            MeasureKind::Plancherel { p } => Some(p),
        }
    }

    /// The constant in front of the angular factor, (2π)^{−(n−1)} included.
    pub fn prefactor(&self) -> f64 {
        let n = self.n;
        let base = (2.0 * PI).powi(-(n as i32 - 1)) / factorial(n);
        match self.kind {
            MeasureKind::SatoTate => base,
            MeasureKind::Plancherel { p } => base * plancherel_constant(n, p),
        }
    }
}

fn check_rank(n: usize) -> Result<()> {
    if (MIN_RANK..=MAX_RANK).contains(&n) {
        Ok(())
    } else {
        Err(Error::RankOutOfRange(n))
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// ∏_{i=2}^n (1 − p^{−i}) / (1 − p^{−1}).
pub fn plancherel_constant(n: usize, p: u64) -> f64 {
    let q = 1.0 / p as f64;
    (2..=n as i32).map(|i| (1.0 - q.powi(i)) / (1.0 - q)).product()
}

/// ∏_{i=1}^{n−1} (1 − p^{−i}).
pub fn series_prefactor(n: usize, p: u64) -> f64 {
    let q = 1.0 / p as f64;
    (1..n as i32).map(|i| 1.0 - q.powi(i)).product()
}

/// The full angle vector (θ₁, …, θ_n) from the n − 1 free angles.
pub fn full_angles(theta: &[f64]) -> Vec<f64> {
    let mut out = theta.to_vec();
    out.push(-theta.iter().sum::<f64>());
    out
}

/// Density of the measure with respect to dθ₁ ⋯ dθ_{n−1}.
pub fn density(spec: &MeasureSpec, theta: &[f64]) -> f64 {
    debug_assert_eq!(theta.len() + 1, spec.n);
    let z: Vec<Complex64> = full_angles(theta)
        .iter()
        .map(|&t| Complex64::from_polar(1.0, t))
        .collect();
    spec.prefactor() * angular_factor(spec, &z)
}

/// The θ-dependent part of the density at torus point z.
fn angular_factor(spec: &MeasureSpec, z: &[Complex64]) -> f64 {
    let mut num = 1.0;
    let mut den = 1.0;
    let q = spec.prime().map(|p| 1.0 / p as f64);
    for i in 0..z.len() {
        for j in i + 1..z.len() {
            num *= (z[i] - z[j]).norm_sqr();
            if let Some(q) = q {
                den *= (z[i] - z[j] * q).norm_sqr();
            }
        }
    }
    num / den
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct QuadratureResult {
    #[serde(serialize_with = "crate::json::complex")]
    pub value: Complex64,
    pub grid_points: u64,
    pub error_estimate: f64,
    pub level: u32,
}

/// Largest level allowed for rank n under [`MAX_GRID_POINTS`].
pub fn max_level(n: usize) -> u32 {
    let budget = MAX_GRID_POINTS.trailing_zeros();
    MAX_LEVEL.min(budget / (n as u32 - 1))
}

/// Smallest level whose grid size N = 2^level is at least `degree` + 2n + 2.
pub fn default_level(n: usize, degree: u32) -> u32 {
    let need = degree as u64 + 2 * n as u64 + 2;
    let mut level = 1;
    while (1u64 << level) < need {
        level += 1;
    }
    level.min(max_level(n))
}

fn grid_size(n: usize, level: u32) -> Result<u64> {
    if level == 0 {
        return Err(Error::InvalidArgument("quadrature level must be >= 1".into()));
    }
    let dims = n as u32 - 1;
    let total = 1u64.checked_shl(level * dims).filter(|&t| t <= MAX_GRID_POINTS);
    total.ok_or_else(|| {
        Error::GuardExceeded(format!(
            "grid of 2^{level} points per axis in {dims} dimensions exceeds {MAX_GRID_POINTS} points"
        ))
    })
}

fn grid_index(idx: u64, dims: usize, side: u64) -> Vec<u64> {
    let mut rest = idx;
    (0..dims)
        .map(|_| {
            let k = rest % side;
            rest /= side;
            k
        })
        .collect()
}

/// Uniform tensor-grid rule with N = 2^level points per axis. The error
/// estimate is the difference to the rule on the even sub-grid (N/2 points
/// per axis), which reuses the same function values.
pub fn integrate_quadrature<F>(spec: &MeasureSpec, f: F, level: u32) -> Result<QuadratureResult>
where
    F: Fn(&EvalPoint) -> Complex64 + Sync,
{
    let n = spec.n;
    let total = grid_size(n, level)?;
    let dims = n - 1;
    let side = 1u64 << level;
    let step = 2.0 * PI / side as f64;
    let prefactor = spec.prefactor();
    let values: Vec<(Complex64, bool)> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let ks = grid_index(idx, dims, side);
            let theta: Vec<f64> = ks.iter().map(|&k| k as f64 * step).collect();
            let x = EvalPoint::torus(&theta);
            let w = prefactor * angular_factor(spec, x.coords());
            let even = ks.iter().all(|k| k % 2 == 0);
            (f(&x) * w, even)
        })
        .collect();
    let all: Vec<Complex64> = values.iter().map(|v| v.0).collect();
    let coarse: Vec<Complex64> = values.iter().filter(|v| v.1).map(|v| v.0).collect();
    let cell = step.powi(dims as i32);
    let fine = pairwise_sum_complex(&all) * cell;
    let coarse = pairwise_sum_complex(&coarse) * cell * 2f64.powi(dims as i32);
    Ok(QuadratureResult {
        value: fine,
        grid_points: total,
        error_estimate: (fine - coarse).norm(),
        level,
    })
}

/// Doubles the grid from `start_level` until the relative change drops below
/// [`ADAPTIVE_TOLERANCE`] or the level cap for this rank is reached.
pub fn integrate_adaptive<F>(spec: &MeasureSpec, f: F, start_level: u32) -> Result<QuadratureResult>
where
    F: Fn(&EvalPoint) -> Complex64 + Sync,
{
    let cap = max_level(spec.n);
    let mut level = start_level.clamp(1, cap);
    loop {
        let r = integrate_quadrature(spec, &f, level)?;
        if r.error_estimate <= ADAPTIVE_TOLERANCE * r.value.norm().max(1.0) || level >= cap {
            return Ok(r);
        }
        level += 1;
    }
}

/// A grid with precomputed points and weights, for many integrals over the
/// same measure.
pub struct WeightedGrid {
    spec: MeasureSpec,
    points: Vec<EvalPoint>,
    weights: Vec<f64>,
}

impl WeightedGrid {
    pub fn new(spec: MeasureSpec, level: u32) -> Result<Self> {
        let n = spec.n;
        let total = grid_size(n, level)?;
        let side = 1u64 << level;
        let step = 2.0 * PI / side as f64;
        let scale = spec.prefactor() * step.powi(n as i32 - 1);
        let (points, weights): (Vec<_>, Vec<_>) = (0..total)
            .into_par_iter()
            .map(|idx| {
                let theta: Vec<f64> = grid_index(idx, n - 1, side)
                    .iter()
                    .map(|&k| k as f64 * step)
                    .collect();
                let x = EvalPoint::torus(&theta);
                let w = scale * angular_factor(&spec, x.coords());
                (x, w)
            })
            .unzip();
        Ok(Self {
            spec,
            points,
            weights,
        })
    }

    pub fn spec(&self) -> &MeasureSpec {
        &self.spec
    }

    pub fn points(&self) -> &[EvalPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// S_κ at every grid point.
    pub fn schur_values(&self, kappa: &WeightVector) -> Result<Vec<Complex64>> {
        kappa.ensure_rank(self.spec.n)?;
        self.points.par_iter().map(|x| eval_schur(kappa, x)).collect()
    }

    pub fn integrate(&self, values: &[Complex64]) -> Complex64 {
        let terms: Vec<Complex64> = values.iter().zip(&self.weights).map(|(v, w)| v * w).collect();
        pairwise_sum_complex(&terms)
    }

    /// ⟨f, g⟩ = ∫ f conj(g) dμ.
    pub fn inner_product(&self, f: &[Complex64], g: &[Complex64]) -> Complex64 {
        let terms: Vec<Complex64> = f
            .iter()
            .zip(g)
            .zip(&self.weights)
            .map(|((a, b), w)| a * b.conj() * w)
            .collect();
        pairwise_sum_complex(&terms)
    }
}

/// ∫ S_κ dμ by adaptive quadrature.
pub fn integrate_schur_quadrature(spec: &MeasureSpec, kappa: &WeightVector) -> Result<QuadratureResult> {
    kappa.ensure_rank(spec.n)?;
    let start = default_level(spec.n, kappa.wnorm().max(kappa.involute().wnorm()));
    integrate_adaptive(spec, |x| eval_schur(kappa, x).expect("rank checked"), start)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SeriesValue {
    pub value: f64,
    pub tail_bound: f64,
    pub truncation: u32,
}

/// Default truncation max(n|κ|, 8‖κ‖).
pub fn default_truncation(kappa: &WeightVector) -> u32 {
    (kappa.rank() as u32 * kappa.abs()).max(8 * kappa.wnorm())
}

type ProfileKey = (WeightVector, u32);

static PROFILES: LazyLock<Mutex<HashMap<ProfileKey, Arc<Vec<u128>>>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

/// D[m] = Σ_{‖η‖ = m} d^η_{κη} for m = 0..=h. Independent of p, so cached.
fn coefficient_profile(kappa: &WeightVector, h: u32) -> Arc<Vec<u128>> {
    let key = (kappa.clone(), h);
    if let Some(found) = PROFILES.lock().expect("profile cache").get(&key) {
        return found.clone();
    }
    let etas = weights_with_wnorm_up_to(kappa.rank(), h).expect("rank validated");
    let terms: Vec<(u32, u64)> = etas
        .par_iter()
        .map(|eta| {
            let d = lr_coefficient(kappa, eta, eta).expect("same rank");
            (eta.wnorm(), d)
        })
        .collect();
    let mut profile = vec![0u128; h as usize + 1];
    for (m, d) in terms {
        profile[m as usize] += d as u128;
    }
    let profile = Arc::new(profile);
    PROFILES
        .lock()
        .expect("profile cache")
        .insert(key, profile.clone());
    profile
}

/// D[m] = Σ_{‖η‖ = m} d^η_{κη} for m = 0..=h, computed from LR coefficients
/// with no congruence shortcut.
pub fn series_coefficients(kappa: &WeightVector, h: u32) -> Vec<u128> {
    coefficient_profile(kappa, h).as_ref().clone()
}

/// Number of weights η of rank n with ‖η‖ = m, for m = 0..=limit.
fn weighted_counts(n: usize, limit: usize) -> Vec<f64> {
    let mut r = vec![0.0; limit + 1];
    r[0] = 1.0;
    for coin in 1..n {
        for m in coin..=limit {
            r[m] += r[m - coin];
        }
    }
    r
}

/// Σ_{‖η‖ > h} p^{−‖η‖}: exact counts for a stretch past h, then the
/// majorant #{‖η‖ = m} ≤ (m+1)^{n−2} summed as a geometric series.
pub fn weighted_tail(n: usize, p: u64, h: u32) -> f64 {
    const STRETCH: usize = 512;
    let q = 1.0 / p as f64;
    let h = h as usize;
    let limit = h + STRETCH;
    let r = weighted_counts(n, limit);
    let head: Vec<f64> = (h + 1..=limit).map(|m| r[m] * q.powi(m as i32)).collect();
    let e = n as i32 - 2;
    let m0 = (limit + 1) as f64;
    let ratio = q * ((m0 + 2.0) / (m0 + 1.0)).powi(e);
    let first = (m0 + 1.0).powi(e) * q.powf(m0);
    let rest = if ratio < 1.0 {
        first / (1.0 - ratio)
    } else {
        f64::INFINITY
    };
    pairwise_sum(&head) + rest
}

/// c_κ = (1 + |κ|)^{n² − n} as a float.
pub fn c_kappa(kappa: &WeightVector) -> f64 {
    dimension_bound(kappa).to_f64().unwrap_or(f64::INFINITY)
}

/// ∫ S_κ dμ_p by the series truncated at ‖η‖ ≤ h.
pub fn integrate_schur_series(kappa: &WeightVector, p: u64, h: u32) -> Result<SeriesValue> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let n = kappa.rank();
    let min = n as u32 * kappa.abs();
    if h < min {
        return Err(Error::TruncationTooSmall { h, min });
    }
    if kappa.is_zero() {
        // d^η_{0η} = 1 and Σ_η p^{−‖η‖} = ∏(1 − p^{−i})^{−1}.
        return Ok(SeriesValue {
            value: 1.0,
            tail_bound: 0.0,
            truncation: h,
        });
    }
    if !kappa.wnorm().is_multiple_of(n as u32) {
        return Ok(SeriesValue {
            value: 0.0,
            tail_bound: 0.0,
            truncation: h,
        });
    }
    let profile = coefficient_profile(kappa, h);
    let q = 1.0 / p as f64;
    let terms: Vec<f64> = profile
        .iter()
        .enumerate()
        .map(|(m, &d)| d as f64 * q.powi(m as i32))
        .collect();
    let pre = series_prefactor(n, p);
    Ok(SeriesValue {
        value: pre * pairwise_sum(&terms),
        tail_bound: pre * c_kappa(kappa) * weighted_tail(n, p, h),
        truncation: h,
    })
}

/// Series value at the default truncation.
pub fn integrate_schur_series_default(kappa: &WeightVector, p: u64) -> Result<SeriesValue> {
    integrate_schur_series(kappa, p, default_truncation(kappa))
}

fn check_product_guard(kappa: &WeightVector, u: u32, v: u32) -> Result<()> {
    let size = (u + v) * kappa.abs();
    if size > PRODUCT_POWER_GUARD {
        return Err(Error::GuardExceeded(format!(
            "product integral needs (u+v)|kappa| <= {PRODUCT_POWER_GUARD}, got {size}"
        )));
    }
    Ok(())
}

/// ∫ S_κ^u conj(S_κ)^v dμ_p via the exact expansion and term-wise series.
/// The tail bound is the coefficient-weighted sum of the term bounds.
pub fn integrate_product(kappa: &WeightVector, p: u64, u: u32, v: u32) -> Result<SeriesValue> {
    check_product_guard(kappa, u, v)?;
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let expansion = expand_power(kappa, u, v)?;
    let mut values = Vec::new();
    let mut tails = Vec::new();
    let mut truncation = 0;
    for (xi, c) in expansion.iter() {
        let c = c.to_f64().unwrap_or(f64::INFINITY);
        let s = integrate_schur_series_default(xi, p)?;
        values.push(c * s.value);
        tails.push(c * s.tail_bound);
        truncation = truncation.max(s.truncation);
    }
    Ok(SeriesValue {
        value: pairwise_sum(&values),
        tail_bound: pairwise_sum(&tails),
        truncation,
    })
}

/// The same integral by direct quadrature of S_κ^u conj(S_κ)^v.
pub fn integrate_product_quadrature(
    kappa: &WeightVector,
    p: u64,
    u: u32,
    v: u32,
) -> Result<QuadratureResult> {
    check_product_guard(kappa, u, v)?;
    let spec = MeasureSpec::plancherel(kappa.rank(), p)?;
    let degree = (u + v) * kappa.wnorm().max(kappa.involute().wnorm());
    let start = default_level(spec.n, degree);
    integrate_adaptive(
        &spec,
        |x| {
            let s = eval_schur(kappa, x).expect("rank checked");
            s.powu(u) * s.conj().powu(v)
        },
        start,
    )
}
