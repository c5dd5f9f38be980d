//! Degenerate Schur polynomials S_κ(x₁, …, x_n).
//!
//! [`eval_schur`] uses the ratio of alternants
//! det(x_j^{λ_i + n − i}) / det(x_j^{n − i}); [`eval_schur_tableaux`] sums
//! x^T over semistandard tableaux of shape λ, grouped by the horizontal strip
//! each letter occupies. The two share nothing but the partition.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::weights::WeightVector;

/// Coincident coordinates closer than this (relative to max |x_i|) are
/// treated as degenerate.
pub const DEGENERATE_GAP: f64 = 1e-9;
/// Largest acceptable max/min pivot ratio in the Vandermonde elimination.
pub const PIVOT_RATIO_LIMIT: f64 = 1e12;
/// Largest estimated bialternant rounding error accepted before the tableau
/// path is used instead.
pub const BIALTERNANT_ERROR_LIMIT: f64 = 1e-13;
/// |κ| cap for the public tableau evaluator.
pub const TABLEAU_GUARD: u32 = 10;

#[derive(Clone, Debug, PartialEq)]
pub struct EvalPoint {
    coords: Vec<Complex64>,
}

impl EvalPoint {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if let Some(i) = coords.iter().position(|z| z.norm() == 0.0) {
            return Err(Error::ZeroCoordinate(i));
        }
        Ok(Self { coords })
    }

    /// The torus point (e^{iθ₁}, …, e^{iθ_{n−1}}, e^{−i(θ₁+…+θ_{n−1})}).
    pub fn torus(angles: &[f64]) -> Self {
        let last: f64 = -angles.iter().sum::<f64>();
        let coords = angles
            .iter()
            .chain(std::iter::once(&last))
            .map(|&t| Complex64::from_polar(1.0, t))
            .collect();
        Self { coords }
    }

    pub fn ones(n: usize) -> Self {
        Self {
            coords: vec![Complex64::new(1.0, 0.0); n],
        }
    }

    /// Parses `"re,im;re,im;..."`.
    pub fn parse(s: &str) -> Result<Self> {
        let coords = s
            .split(';')
            .map(|pair| {
                let xs: Vec<&str> = pair.split(',').map(str::trim).collect();
                let bad = || Error::Parse(format!("bad complex coordinate {pair:?}"));
                match xs.as_slice() {
                    [re, im] => Ok(Complex64::new(
                        re.parse().map_err(|_| bad())?,
                        im.parse().map_err(|_| bad())?,
                    )),
                    [re] => Ok(Complex64::new(re.parse().map_err(|_| bad())?, 0.0)),
                    _ => Err(bad()),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(coords)
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    /// min_{i<j} |x_i − x_j| / max_i |x_i|.
    pub fn relative_gap(&self) -> f64 {
        let scale = self.coords.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let n = self.coords.len();
        let mut gap = f64::INFINITY;
        for i in 0..n {
            for j in i + 1..n {
                gap = gap.min((self.coords[i] - self.coords[j]).norm() / scale);
            }
        }
        gap
    }

    pub fn is_degenerate(&self) -> bool {
        self.relative_gap() < DEGENERATE_GAP
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalMethod {
    Bialternant,
    Tableaux,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SchurValue {
    #[serde(serialize_with = "crate::json::complex")]
    pub value: Complex64,
    pub method: EvalMethod,
}

/// S_κ(x), falling back to the tableau sum at (near-)coincident coordinates,
/// when the Vandermonde elimination is badly conditioned, or when the
/// estimated rounding error of the ratio exceeds [`BIALTERNANT_ERROR_LIMIT`].
pub fn eval_schur(kappa: &WeightVector, x: &EvalPoint) -> Result<Complex64> {
    Ok(eval_schur_detailed(kappa, x)?.value)
}

pub fn eval_schur_detailed(kappa: &WeightVector, x: &EvalPoint) -> Result<SchurValue> {
    let n = x.rank();
    kappa.ensure_rank(n)?;
    if kappa.is_zero() {
        return Ok(SchurValue {
            value: Complex64::one(),
            method: EvalMethod::Bialternant,
        });
    }
    if !x.is_degenerate() {
        if let Some(v) = bialternant(kappa, x).filter(|b| b.error_estimate <= BIALTERNANT_ERROR_LIMIT) {
            let v = v.value;
            return Ok(SchurValue {
                value: v,
                method: EvalMethod::Bialternant,
            });
        }
    }
    Ok(SchurValue {
        value: tableau_sum(kappa.to_partition().parts(), x.coords()),
        method: EvalMethod::Tableaux,
    })
}

/// A bialternant value with its a-priori rounding error estimate
/// n!·ε·max|x|^{n(n−1)/2} / |det(x_j^{n−i})|, relative to the largest monomial.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bialternant {
    pub value: Complex64,
    pub error_estimate: f64,
}

/// The determinant ratio alone, or `None` when the denominator is singular or
/// its pivot ratio exceeds [`PIVOT_RATIO_LIMIT`].
pub fn eval_schur_bialternant(kappa: &WeightVector, x: &EvalPoint) -> Result<Option<Bialternant>> {
    kappa.ensure_rank(x.rank())?;
    if x.is_degenerate() {
        return Ok(None);
    }
    Ok(bialternant(kappa, x))
}

fn bialternant(kappa: &WeightVector, x: &EvalPoint) -> Option<Bialternant> {
    let n = x.rank();
    let lambda = kappa.to_partition();
    let xs = x.coords();
    let numer: Vec<Vec<Complex64>> = (0..n)
        .map(|i| {
            let e = (lambda.parts()[i] as usize + n - 1 - i) as i32;
            xs.iter().map(|z| z.powi(e)).collect()
        })
        .collect();
    let denom: Vec<Vec<Complex64>> = (0..n)
        .map(|i| xs.iter().map(|z| z.powi((n - 1 - i) as i32)).collect())
        .collect();
    let (dd, ratio) = lu_determinant(denom);
    if !(ratio <= PIVOT_RATIO_LIMIT) || dd.norm() == 0.0 {
        return None;
    }
    let (dn, _) = lu_determinant(numer);
    let scale = xs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let factorial: f64 = (1..=n).map(|i| i as f64).product();
    let error_estimate =
        factorial * f64::EPSILON * scale.powi((n * (n - 1) / 2) as i32) / dd.norm();
    Some(Bialternant {
        value: dn / dd,
        error_estimate,
    })
}

/// Determinant by partial-pivoted elimination, with the max/min pivot
/// modulus ratio (∞ for a singular matrix).
fn lu_determinant(mut a: Vec<Vec<Complex64>>) -> (Complex64, f64) {
    let n = a.len();
    let mut det = Complex64::one();
    let mut pmax: f64 = 0.0;
    let mut pmin = f64::INFINITY;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .unwrap();
        let p = a[piv][col];
        if p.norm() == 0.0 {
            return (Complex64::zero(), f64::INFINITY);
        }
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        det *= p;
        pmax = pmax.max(p.norm());
        pmin = pmin.min(p.norm());
        for r in col + 1..n {
            let f = a[r][col] / p;
            if f.norm() == 0.0 {
                continue;
            }
            for c in col..n {
                let v = a[col][c];
                a[r][c] -= f * v;
            }
        }
    }
    (det, pmax / pmin)
}

/// Independent evaluation as a sum of x^T over semistandard tableaux.
pub fn eval_schur_tableaux(kappa: &WeightVector, x: &EvalPoint) -> Result<Complex64> {
    kappa.ensure_rank(x.rank())?;
    if kappa.abs() > TABLEAU_GUARD {
        return Err(Error::GuardExceeded(format!(
            "tableau evaluation needs |kappa| <= {TABLEAU_GUARD}, got {}",
            kappa.abs()
        )));
    }
    Ok(tableau_sum(kappa.to_partition().parts(), x.coords()))
}

/// Partitions μ ⊆ λ with at most `rows` nonzero parts and λ/μ a horizontal
/// strip (λ_{i+1} ≤ μ_i ≤ λ_i).
fn horizontal_strip_removals(lambda: &[u32], rows: usize) -> Vec<Vec<u32>> {
    fn rec(i: usize, lambda: &[u32], rows: usize, mu: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == lambda.len() {
            out.push(mu.clone());
            return;
        }
        let lo = lambda.get(i + 1).copied().unwrap_or(0);
        let hi = if i < rows { lambda[i] } else { 0 };
        for m in lo..=hi {
            mu[i] = m;
            rec(i + 1, lambda, rows, mu, out);
        }
    }
    let mut out = Vec::new();
    rec(0, lambda, rows, &mut vec![0; lambda.len()], &mut out);
    out
}

/// s_λ(x₁..x_k) = Σ_{λ/μ horizontal strip} x_k^{|λ/μ|} s_μ(x₁..x_{k−1}),
/// memoised on (μ, k). Each letter k fills one horizontal strip, so the
/// recursion enumerates semistandard tableaux strip by strip.
fn branching_sum<T, F>(lambda: &[u32], k: usize, leaf: &T, step: &F, memo: &mut HashMap<(Vec<u32>, usize), T>) -> T
where
    T: Clone + Zero,
    F: Fn(&T, usize, u32) -> T,
{
    let rows = lambda.iter().filter(|&&p| p > 0).count();
    if rows > k {
        return T::zero();
    }
    if rows == 0 {
        return leaf.clone();
    }
    if let Some(v) = memo.get(&(lambda.to_vec(), k)) {
        return v.clone();
    }
    let size: u32 = lambda.iter().sum();
    let mut acc = T::zero();
    for mu in horizontal_strip_removals(lambda, k - 1) {
        let removed = size - mu.iter().sum::<u32>();
        let inner = branching_sum(&mu, k - 1, leaf, step, memo);
        acc = acc + step(&inner, k, removed);
    }
    memo.insert((lambda.to_vec(), k), acc.clone());
    acc
}

fn tableau_sum(lambda: &[u32], xs: &[Complex64]) -> Complex64 {
    let mut memo = HashMap::new();
    branching_sum(
        lambda,
        xs.len(),
        &Complex64::one(),
        &|v: &Complex64, k, m| v * xs[k - 1].powi(m as i32),
        &mut memo,
    )
}

/// Exact number of semistandard tableaux of shape λ(κ) with entries ≤ n,
/// i.e. S_κ(1, …, 1) counted combinatorially.
pub fn count_tableaux(kappa: &WeightVector) -> BigUint {
    let mut memo = HashMap::new();
    branching_sum(
        kappa.to_partition().parts(),
        kappa.rank(),
        &BigUint::one(),
        &|v: &BigUint, _, _| v.clone(),
        &mut memo,
    )
}

/// S_κ(1, …, 1) by the Weyl dimension formula ∏_{i<j} (λ_i − λ_j + j − i)/(j − i).
pub fn dimension(kappa: &WeightVector) -> BigUint {
    let lambda = kappa.to_partition();
    let l = lambda.parts();
    let n = l.len();
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..n {
        for j in i + 1..n {
            num *= BigUint::from(l[i] - l[j] + (j - i) as u32);
            den *= BigUint::from((j - i) as u32);
        }
    }
    let (q, r) = (&num / &den, &num % &den);
    debug_assert!(r.is_zero());
    q
}

/// c_κ = (1 + |κ|)^{n² − n}, the universal bound on S_κ(1, …, 1).
pub fn dimension_bound(kappa: &WeightVector) -> BigUint {
    let n = kappa.rank() as u32;
    BigUint::from(1 + kappa.abs()).pow(n * n - n)
}
