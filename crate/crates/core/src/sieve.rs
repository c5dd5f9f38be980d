//! Prime-window combinatorics and the terms of the 2j-th moment
//!
//!   E |Σ_{P<p≤Q} b_p A(p^κ)/p|^{2j} = M + E.
//!
//! Sums over integers in (P^j, Q^j] are organised by exponent signature over
//! the window's primes. A signature e with Σe_p = j is hit by j!/∏e_p!
//! ordered tuples, which is a_j(∏p^{e_p}). Sums of a_j(n) f(n) with f
//! determined prime by prime are then j!·[x^j] ∏_p Σ_e f_p(e) x^e/e!.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{c_kappa, integrate_product};
use crate::primes::{factorize, primes_up_to};
use crate::summation::pairwise_sum_complex;
use crate::weights::WeightVector;

/// Largest P accepted for a window.
pub const MAX_WINDOW_P: f64 = 1e6;
/// Largest table [`aj_table`] will materialise.
pub const MAX_TABLE_ENTRIES: u64 = 1_000_000;
pub const MAIN_TERM_MAX_J: u32 = 3;
pub const MAIN_TERM_MAX_PRIMES: usize = 8;

/// The primes in (P, Q] for 2 ≤ P < Q ≤ 2P.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrimeWindow {
    #[serde(rename = "P")]
    p: f64,
    #[serde(rename = "Q")]
    q: f64,
    primes: Vec<u64>,
}

impl PrimeWindow {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !(p.is_finite() && q.is_finite()) || p < 2.0 || q <= p || q > 2.0 * p {
            return Err(Error::InvalidWindow(format!(
                "need 2 <= P < Q <= 2P, got P={p}, Q={q}"
            )));
        }
        if p > MAX_WINDOW_P {
            return Err(Error::InvalidWindow(format!("P={p} exceeds {MAX_WINDOW_P}")));
        }
        let primes = primes_up_to(q.floor() as u64)
            .into_iter()
            .filter(|&r| r as f64 > p)
            .collect();
        Ok(Self { p, q, primes })
    }

    pub fn lower(&self) -> f64 {
        self.p
    }

    pub fn upper(&self) -> f64 {
        self.q
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    fn log_p(&self) -> f64 {
        self.p.ln()
    }
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// All exponent vectors of length `k` summing to `j`, in lexicographic order.
pub fn signatures(k: usize, j: u32) -> Vec<Vec<u32>> {
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for e in (0..=left).rev() {
            cur[i] = e;
            rec(i + 1, left - e, cur, out);
        }
    }
    let mut out = Vec::new();
    if k == 0 {
        if j == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(0, j, &mut vec![0; k], &mut out);
    out
}

/// j!/∏ e_i!, the number of orderings of a signature.
pub fn multiplicity(sig: &[u32]) -> u64 {
    let j: u32 = sig.iter().sum();
    let mut num: u64 = 1;
    let mut k = 0u64;
    for &e in sig {
        for i in 1..=e as u64 {
            k += 1;
            num = num * k / i;
        }
    }
    debug_assert_eq!(k, j as u64);
    num
}

fn binomial(n: u64, k: u64) -> f64 {
    (0..k).map(|i| (n - i) as f64 / (i + 1) as f64).product()
}

/// n ↦ a_j(n; P, Q) over the support.
pub fn aj_table(j: u32, window: &PrimeWindow) -> Result<BTreeMap<u128, u64>> {
    if j == 0 {
        return Err(Error::InvalidArgument("j must be >= 1".into()));
    }
    let bits = j as f64 * window.q.log2();
    if bits >= 127.0 {
        return Err(Error::GuardExceeded(format!(
            "j*log2(Q) = {bits:.1} exceeds the 127-bit integer range"
        )));
    }
    let k = window.len() as u64;
    let entries = if k == 0 { 0.0 } else { binomial(j as u64 + k - 1, j as u64) };
    if entries > MAX_TABLE_ENTRIES as f64 {
        return Err(Error::GuardExceeded(format!(
            "a_j table would have {entries:.0} entries (limit {MAX_TABLE_ENTRIES})"
        )));
    }
    let mut out = BTreeMap::new();
    for sig in signatures(window.len(), j) {
        let n: u128 = window
            .primes
            .iter()
            .zip(&sig)
            .map(|(&p, &e)| (p as u128).pow(e))
            .product();
        out.insert(n, multiplicity(&sig));
    }
    Ok(out)
}

/// j!·[x^j] ∏_p Σ_{e=0}^{j} w(p, e) x^e / e!.
fn egf_sum<F: Fn(u64, u32) -> f64>(primes: &[u64], j: u32, w: F) -> f64 {
    let j = j as usize;
    let mut poly = vec![0.0; j + 1];
    poly[0] = 1.0;
    for &p in primes {
        let factor: Vec<f64> = (0..=j as u32).map(|e| w(p, e) / factorial(e)).collect();
        let mut next = vec![0.0; j + 1];
        for (a, &x) in poly.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            for (b, &y) in factor.iter().enumerate().take(j + 1 - a) {
                next[a + b] += x * y;
            }
        }
        poly = next;
    }
    poly[j] * factorial(j as u32)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaSum {
    pub name: &'static str,
    pub value: f64,
    pub bound: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LemmaAReport {
    pub j: u32,
    pub d: f64,
    #[serde(rename = "P")]
    pub p: f64,
    #[serde(rename = "Q")]
    pub q: f64,
    pub prime_count: usize,
    pub sums: Vec<LemmaSum>,
    /// (d Σ 1/p)^j, which sum (i) must equal.
    pub identity_value: f64,
    pub identity_residual: f64,
    pub identity_ok: bool,
    pub all_ok: bool,
}

/// The four sums over a_j and their explicit bounds.
pub fn lemma_a_report(j: u32, window: &PrimeWindow, d: f64) -> Result<LemmaAReport> {
    if j == 0 {
        return Err(Error::InvalidArgument("j must be >= 1".into()));
    }
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::InvalidArgument(format!("d must be positive, got {d}")));
    }
    let ps = window.primes();
    let jf = j as f64;
    let big_p = window.p;
    let log_p = window.log_p();
    let pf = |p: u64| p as f64;

    let plain = egf_sum(ps, j, |p, e| (d / pf(p)).powi(e as i32));
    let squares = egf_sum(ps, j, |p, e| {
        if e % 2 == 0 {
            d.powi(e as i32 / 2) / pf(p).powi(e as i32)
        } else {
            0.0
        }
    });
    let squarefull = egf_sum(ps, j, |p, e| {
        if e == 1 {
            0.0
        } else {
            (d / pf(p)).powi(e as i32)
        }
    });
    let mixed = egf_sum(ps, j, |p, e| match e {
        1 => d / (pf(p) * pf(p)),
        _ => (d / pf(p)).powi(e as i32),
    });

    let b1 = (3.0 * d / log_p).powi(j as i32);
    let b2 = if j.is_multiple_of(2) {
        (3.0 * d * jf / (big_p * log_p)).powf(jf / 2.0)
    } else {
        0.0
    };
    let b3 = (12.0 * d * d * jf / (big_p * log_p)).powf(jf / 2.0)
        * (1.0 + (jf * log_p / (54.0 * big_p)).powf(jf / 6.0));
    let b4 = (48.0 * d * d * jf / (big_p * log_p)).powf(jf / 2.0)
        * (1.0 + (20.0 * jf * log_p / big_p).powf(jf / 6.0));

    let recip: Vec<f64> = ps.iter().map(|&p| 1.0 / p as f64).collect();
    let identity_value = (d * crate::summation::pairwise_sum(&recip)).powi(j as i32);
    let identity_residual = if identity_value == 0.0 {
        plain.abs()
    } else {
        (plain - identity_value).abs() / identity_value
    };
    let identity_ok = identity_residual <= 1e-12;

    let mk = |name, value: f64, bound: f64| LemmaSum {
        name,
        value,
        bound,
        ok: value <= bound,
    };
    let sums = vec![
        mk("plain", plain, b1),
        mk("squares", squares, b2),
        mk("squarefull", squarefull, b3),
        mk("squarefree-squarefull", mixed, b4),
    ];
    let all_ok = identity_ok && sums.iter().all(|s| s.ok);
    Ok(LemmaAReport {
        j,
        d,
        p: window.p,
        q: window.q,
        prime_count: ps.len(),
        sums,
        identity_value,
        identity_residual,
        identity_ok,
        all_ok,
    })
}

/// ℓ = ℓ₁ℓ′, m = m₁m′ with ℓ₁m₁ squarefree, ℓ′m′ squarefull and the two
/// coprime: p goes to the squarefree part iff its exponent in ℓm is 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PairDecomposition {
    pub l1: u64,
    pub l_prime: u64,
    pub m1: u64,
    pub m_prime: u64,
}

pub fn pair_decompose(l: u64, m: u64) -> Result<PairDecomposition> {
    if l == 0 || m == 0 {
        return Err(Error::InvalidArgument("l and m must be >= 1".into()));
    }
    let mut exps: BTreeMap<u64, (u32, u32)> = BTreeMap::new();
    for (p, e) in factorize(l) {
        exps.entry(p).or_default().0 = e;
    }
    for (p, e) in factorize(m) {
        exps.entry(p).or_default().1 = e;
    }
    let mut out = PairDecomposition {
        l1: 1,
        l_prime: 1,
        m1: 1,
        m_prime: 1,
    };
    for (p, (u, v)) in exps {
        if u + v == 1 {
            out.l1 *= p.pow(u);
            out.m1 *= p.pow(v);
        } else {
            out.l_prime *= p.pow(u);
            out.m_prime *= p.pow(v);
        }
    }
    Ok(out)
}

/// The coefficients b_p on the window, extended multiplicatively to
/// b_ℓ = ∏ b_p^{u_p}. Primes without a value get b_p = 0.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientChoice {
    values: BTreeMap<u64, Complex64>,
    bound: f64,
}

#[derive(Deserialize)]
struct CoefficientEntry {
    p: u64,
    re: f64,
    #[serde(default)]
    im: f64,
}

#[derive(Deserialize)]
struct CoefficientFile {
    #[serde(default, rename = "B")]
    bound: Option<f64>,
    values: Vec<CoefficientEntry>,
}

impl CoefficientChoice {
    /// Explicit values; `bound` defaults to max |b_p|.
    pub fn new(values: BTreeMap<u64, Complex64>, bound: Option<f64>) -> Result<Self> {
        let max = values.values().map(|b| b.norm()).fold(0.0, f64::max);
        if values.values().any(|b| !b.is_finite()) {
            return Err(Error::InvalidArgument("coefficients must be finite".into()));
        }
        let bound = bound.unwrap_or(max);
        if !(bound >= 0.0) || max > bound * (1.0 + 1e-12) {
            return Err(Error::InvalidArgument(format!(
                "bound B={bound} is below max |b_p| = {max}"
            )));
        }
        Ok(Self { values, bound })
    }

    pub fn constant(c: Complex64, window: &PrimeWindow) -> Result<Self> {
        Self::new(window.primes().iter().map(|&p| (p, c)).collect(), Some(c.norm()))
    }

    /// Signs from a pattern such as `+-+-`, repeated cyclically over the
    /// window's primes.
    pub fn signs(pattern: &str, window: &PrimeWindow) -> Result<Self> {
        let signs: Vec<f64> = pattern
            .chars()
            .map(|c| match c {
                '+' => Ok(1.0),
                '-' => Ok(-1.0),
                _ => Err(Error::Parse(format!("bad sign {c:?} in {pattern:?}"))),
            })
            .collect::<Result<_>>()?;
        if signs.is_empty() {
            return Err(Error::Parse("empty sign pattern".into()));
        }
        let values = window
            .primes()
            .iter()
            .enumerate()
            .map(|(i, &p)| (p, Complex64::new(signs[i % signs.len()], 0.0)))
            .collect();
        Self::new(values, Some(1.0))
    }

    /// JSON `{"B": optional, "values": [{"p": 11, "re": 1.0, "im": 0.0}, ...]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: CoefficientFile = serde_json::from_str(text)?;
        let values = raw
            .values
            .into_iter()
            .map(|e| (e.p, Complex64::new(e.re, e.im)))
            .collect();
        Self::new(values, raw.bound)
    }

    /// Parses `const:c`, `const:re,im`, `signs:+-..` or `file:path.json`.
    pub fn parse(spec: &str, window: &PrimeWindow) -> Result<Self> {
        let (kind, arg) = spec
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("coefficient choice {spec:?} lacks a kind")))?;
        match kind {
            "const" => {
                let parts: Vec<f64> = arg
                    .split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<f64>()
                            .map_err(|_| Error::Parse(format!("bad constant {arg:?}")))
                    })
                    .collect::<Result<_>>()?;
                let c = match parts.as_slice() {
                    [re] => Complex64::new(*re, 0.0),
                    [re, im] => Complex64::new(*re, *im),
                    _ => return Err(Error::Parse(format!("bad constant {arg:?}"))),
                };
                Self::constant(c, window)
            }
            "signs" => Self::signs(arg, window),
            "file" => Self::from_json(&std::fs::read_to_string(Path::new(arg))?),
            _ => Err(Error::Parse(format!("unknown coefficient kind {kind:?}"))),
        }
    }

    pub fn get(&self, p: u64) -> Complex64 {
        self.values.get(&p).copied().unwrap_or_default()
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }
}

fn check_main_term_guard(j: u32, window: &PrimeWindow) -> Result<()> {
    if j == 0 || j > MAIN_TERM_MAX_J {
        return Err(Error::GuardExceeded(format!(
            "main term needs 1 <= j <= {MAIN_TERM_MAX_J}, got {j}"
        )));
    }
    if window.len() > MAIN_TERM_MAX_PRIMES {
        return Err(Error::GuardExceeded(format!(
            "main term needs at most {MAIN_TERM_MAX_PRIMES} primes in the window, got {}",
            window.len()
        )));
    }
    Ok(())
}

/// I_p(u, v) = ∫ S_κ^u conj(S_κ)^v dμ_p for u, v ≤ j.
fn local_integrals(kappa: &WeightVector, p: u64, j: u32) -> Result<Vec<Vec<f64>>> {
    (0..=j)
        .map(|u| {
            (0..=j)
                .map(|v| integrate_product(kappa, p, u, v).map(|s| s.value))
                .collect()
        })
        .collect()
}

/// M = Σ_{ℓ,m} a_j(ℓ) a_j(m) b_ℓ conj(b_m)/(ℓm) ∏_p ∫ S_κ^{u_p} conj(S_κ)^{v_p} dμ_p,
/// summed over pairs of signatures.
pub fn moment_main_term(
    kappa: &WeightVector,
    j: u32,
    window: &PrimeWindow,
    b: &CoefficientChoice,
) -> Result<Complex64> {
    check_main_term_guard(j, window)?;
    let ps = window.primes();
    let locals: Vec<Vec<Vec<f64>>> = ps
        .iter()
        .map(|&p| local_integrals(kappa, p, j))
        .collect::<Result<_>>()?;
    let sigs = signatures(ps.len(), j);
    // Per signature: a_j(ℓ)·b_ℓ/ℓ.
    let weights: Vec<Complex64> = sigs
        .iter()
        .map(|s| {
            let mut w = Complex64::new(multiplicity(s) as f64, 0.0);
            for (i, &e) in s.iter().enumerate() {
                w *= (b.get(ps[i]) / ps[i] as f64).powu(e);
            }
            w
        })
        .collect();
    let mut terms = Vec::with_capacity(sigs.len() * sigs.len());
    for (su, wu) in sigs.iter().zip(&weights) {
        for (sv, wv) in sigs.iter().zip(&weights) {
            let mut local = 1.0;
            for i in 0..ps.len() {
                local *= locals[i][su[i] as usize][sv[i] as usize];
            }
            terms.push(wu * wv.conj() * local);
        }
    }
    Ok(pairwise_sum_complex(&terms))
}

/// (1+|κ|)^{2j(n²−n)} B^{2j} (96j/(P log P))^j {1 + (40j log P/P)^{j/3}}.
pub fn main_term_bound(kappa: &WeightVector, j: u32, window: &PrimeWindow, b: f64) -> f64 {
    if b == 0.0 {
        return 0.0;
    }
    let jf = j as f64;
    let (big_p, log_p) = (window.p, window.log_p());
    let log = 2.0 * jf * c_kappa(kappa).ln()
        + 2.0 * jf * b.ln()
        + jf * (96.0 * jf / (big_p * log_p)).ln();
    log.exp() * (1.0 + (40.0 * jf * log_p / big_p).powf(jf / 3.0))
}

fn require_nonzero(kappa: &WeightVector) -> Result<()> {
    if kappa.is_zero() {
        Err(Error::InvalidArgument("kappa must be nonzero".into()))
    } else {
        Ok(())
    }
}

fn check_t_l(t: f64, l: f64) -> Result<()> {
    if !(t >= 1.0) {
        return Err(Error::InvalidArgument(format!("t must be >= 1, got {t}")));
    }
    if !(l > 0.0) {
        return Err(Error::InvalidArgument(format!("L must be positive, got {l}")));
    }
    Ok(())
}

/// t^{−1/2} (c_κ Q^{L‖κ‖})^{2j} (3B/log P)^{2j}.
pub fn error_term_bound(
    kappa: &WeightVector,
    j: u32,
    window: &PrimeWindow,
    b: f64,
    t: f64,
    l: f64,
) -> Result<f64> {
    require_nonzero(kappa)?;
    check_t_l(t, l)?;
    if b == 0.0 {
        return Ok(0.0);
    }
    let jf = j as f64;
    let log = -0.5 * t.ln()
        + 2.0 * jf * (c_kappa(kappa).ln() + l * kappa.wnorm() as f64 * window.q.ln())
        + 2.0 * jf * (3.0 * b / window.log_p()).ln();
    Ok(log.exp())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SieveRhs {
    pub first: f64,
    pub second: f64,
    pub total: f64,
    /// log₁₀ of the total, finite even when the total overflows.
    pub log10_total: f64,
}

/// t^{−1/2}(B C_κ Q^{L‖κ‖}/log P)^{2j} + ((B C_κ)² j/(P log P))^j {1 + (40j log P/P)^{j/3}}
/// with C_κ = 10(1+|κ|)^{n²−n}.
pub fn large_sieve_rhs(
    kappa: &WeightVector,
    j: u32,
    window: &PrimeWindow,
    b: f64,
    t: f64,
    l: f64,
) -> Result<SieveRhs> {
    require_nonzero(kappa)?;
    check_t_l(t, l)?;
    if j == 0 {
        return Err(Error::InvalidArgument("j must be >= 1".into()));
    }
    if b == 0.0 {
        return Ok(SieveRhs {
            first: 0.0,
            second: 0.0,
            total: 0.0,
            log10_total: f64::NEG_INFINITY,
        });
    }
    let jf = j as f64;
    let (big_p, log_p) = (window.p, window.log_p());
    let log_bc = b.ln() + 10f64.ln() + c_kappa(kappa).ln();
    let log_first = -0.5 * t.ln()
        + 2.0 * jf * (log_bc + l * kappa.wnorm() as f64 * window.q.ln() - log_p.ln());
    let log_second = jf * (2.0 * log_bc + jf.ln() - (big_p * log_p).ln())
        + (1.0 + (40.0 * jf * log_p / big_p).powf(jf / 3.0)).ln();
    let hi = log_first.max(log_second);
    let log_total = hi + ((log_first - hi).exp() + (log_second - hi).exp()).ln();
    Ok(SieveRhs {
        first: log_first.exp(),
        second: log_second.exp(),
        total: log_total.exp(),
        log10_total: log_total / 10f64.ln(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MomentReport {
    pub n: usize,
    pub kappa: WeightVector,
    pub j: u32,
    #[serde(rename = "P")]
    pub p: f64,
    #[serde(rename = "Q")]
    pub q: f64,
    pub primes: Vec<u64>,
    #[serde(rename = "B")]
    pub b: f64,
    pub t: f64,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(serialize_with = "crate::json::complex")]
    pub main_term: Complex64,
    pub main_term_bound: f64,
    pub main_term_within_bound: bool,
    pub error_bound: f64,
    pub rhs: SieveRhs,
}

pub fn moment_report(
    kappa: &WeightVector,
    j: u32,
    window: &PrimeWindow,
    b: &CoefficientChoice,
    t: f64,
    l: f64,
) -> Result<MomentReport> {
    require_nonzero(kappa)?;
    let main = moment_main_term(kappa, j, window, b)?;
    let bound = main_term_bound(kappa, j, window, b.bound());
    Ok(MomentReport {
        n: kappa.rank(),
        kappa: kappa.clone(),
        j,
        p: window.p,
        q: window.q,
        primes: window.primes.clone(),
        b: b.bound(),
        t,
        l,
        main_term: main,
        main_term_bound: bound,
        main_term_within_bound: main.norm() <= bound + 1e-9,
        error_bound: error_term_bound(kappa, j, window, b.bound(), t, l)?,
        rhs: large_sieve_rhs(kappa, j, window, b.bound(), t, l)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::integrate_schur_series_default;
    use crate::primes::{big_omega, is_squarefree, is_squarefull};
    use crate::schur::{eval_schur, EvalPoint};

    fn w(s: &str) -> WeightVector {
        WeightVector::parse(s, None).unwrap()
    }

    fn window(p: f64, q: f64) -> PrimeWindow {
        PrimeWindow::new(p, q).unwrap()
    }

    #[test]
    fn window_validation() {
        assert_eq!(window(4.0, 8.0).primes(), &[5, 7]);
        assert_eq!(window(10.0, 20.0).primes(), &[11, 13, 17, 19]);
        assert!(PrimeWindow::new(1.5, 3.0).is_err());
        assert!(PrimeWindow::new(4.0, 4.0).is_err());
        assert!(PrimeWindow::new(4.0, 9.0).is_err());
        assert!(PrimeWindow::new(2e6, 3e6).is_err());
    }

    /// Brute-force a_j by enumerating ordered tuples.
    fn aj_oracle(j: u32, ps: &[u64]) -> BTreeMap<u128, u64> {
        let mut out = BTreeMap::new();
        let k = ps.len();
        let total = k.pow(j);
        for mut idx in 0..total {
            let mut n: u128 = 1;
            for _ in 0..j {
                n *= ps[idx % k] as u128;
                idx /= k;
            }
            *out.entry(n).or_insert(0) += 1;
        }
        out
    }

    #[test]
    fn aj_examples() {
        let t1 = aj_table(1, &window(10.0, 20.0)).unwrap();
        assert_eq!(t1.len(), 4);
        assert!(t1.values().all(|&a| a == 1));
        let t2 = aj_table(2, &window(4.0, 8.0)).unwrap();
        assert_eq!(t2.get(&25), Some(&1));
        assert_eq!(t2.get(&35), Some(&2));
        assert_eq!(t2.get(&49), Some(&1));
        let t3 = aj_table(3, &window(4.0, 8.0)).unwrap();
        assert_eq!(t3.values().sum::<u64>(), 8);
    }

    #[test]
    fn aj_matches_tuple_enumeration() {
        for (p, q) in [(10.0, 20.0), (20.0, 40.0), (4.0, 8.0)] {
            let win = window(p, q);
            for j in 1..=4 {
                assert_eq!(aj_table(j, &win).unwrap(), aj_oracle(j, win.primes()));
            }
        }
    }

    #[test]
    fn aj_support_and_guards() {
        let win = window(20.0, 40.0);
        let t = aj_table(3, &win).unwrap();
        for &n in t.keys() {
            assert!(n > 8000 && n <= 64000);
        }
        assert!(aj_table(0, &win).is_err());
        assert!(matches!(aj_table(30, &window(1000.0, 2000.0)), Err(Error::GuardExceeded(_))));
    }

    /// The four sums straight from the table.
    fn lemma_oracle(j: u32, win: &PrimeWindow, d: f64) -> [f64; 4] {
        let t = aj_table(j, win).unwrap();
        let om = |n: u128| big_omega(n as u64) as i32;
        let plain = t.iter().map(|(&n, &a)| a as f64 * d.powi(om(n)) / n as f64).sum();
        let squares = t
            .iter()
            .filter_map(|(&n2, &a)| {
                let r = (n2 as f64).sqrt().round() as u128;
                (r * r == n2).then(|| a as f64 * d.powi(om(r)) / n2 as f64)
            })
            .sum();
        let squarefull = t
            .iter()
            .filter(|(&n, _)| is_squarefull(n as u64))
            .map(|(&n, &a)| a as f64 * d.powi(om(n)) / n as f64)
            .sum();
        let mut mixed = 0.0;
        for (&n, &a) in &t {
            // n = m·r with m squarefree, r squarefull, coprime: m collects
            // the primes of exponent one.
            let m: u64 = factorize(n as u64)
                .iter()
                .filter(|&&(_, e)| e == 1)
                .map(|&(p, _)| p)
                .product();
            let r = n as u64 / m;
            assert!(is_squarefree(m) && is_squarefull(r));
            mixed += a as f64 * d.powi(om(n)) / ((m * m) as f64 * r as f64);
        }
        [plain, squares, squarefull, mixed]
    }

    #[test]
    fn lemma_sums_match_enumeration() {
        for (p, q) in [(4.0, 8.0), (10.0, 20.0), (20.0, 40.0)] {
            let win = window(p, q);
            for j in 1..=4 {
                for d in [0.5, 1.0, 2.0] {
                    let report = lemma_a_report(j, &win, d).unwrap();
                    let oracle = lemma_oracle(j, &win, d);
                    for (s, o) in report.sums.iter().zip(oracle) {
                        assert!((s.value - o).abs() <= 1e-12 * o.abs().max(1e-300), "{} {s:?} {o}", s.name);
                    }
                    assert!(report.identity_ok);
                }
            }
        }
    }

    #[test]
    fn lemma_examples() {
        let r = lemma_a_report(1, &window(2.0, 4.0), 1.0).unwrap();
        assert!((r.sums[0].value - 1.0 / 3.0).abs() < 1e-15);
        assert!((r.sums[0].bound - 3.0 / 2f64.ln()).abs() < 1e-12);
        assert!(r.sums[0].ok);
        let r = lemma_a_report(2, &window(4.0, 8.0), 1.0).unwrap();
        assert!((r.sums[1].value - (1.0 / 25.0 + 1.0 / 49.0)).abs() < 1e-15);
        assert!((r.sums[1].bound - 6.0 / (4.0 * 4f64.ln())).abs() < 1e-12);
        assert!(r.sums[1].ok);
        for j in [1, 3, 5] {
            let r = lemma_a_report(j, &window(10.0, 20.0), 1.0).unwrap();
            assert_eq!(r.sums[1].value, 0.0);
        }
    }

    #[test]
    fn pair_decomposition_examples() {
        let d = |l, m| {
            let x = pair_decompose(l, m).unwrap();
            (x.l1, x.l_prime, x.m1, x.m_prime)
        };
        assert_eq!(d(1, 1), (1, 1, 1, 1));
        assert_eq!(d(12, 5), (3, 4, 5, 1));
        assert_eq!(d(6, 10), (3, 2, 5, 2));
        assert!(pair_decompose(0, 3).is_err());
    }

    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }

    fn divisors(n: u64) -> Vec<u64> {
        (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
    }

    #[test]
    fn pair_decomposition_is_the_unique_valid_split() {
        for l in 1..=60u64 {
            for m in 1..=60u64 {
                let mut found = Vec::new();
                for l1 in divisors(l) {
                    for m1 in divisors(m) {
                        let (h, r) = (l1 * m1, (l / l1) * (m / m1));
                        if is_squarefree(h) && is_squarefull(r) && gcd(h, r) == 1 {
                            found.push((l1, l / l1, m1, m / m1));
                        }
                    }
                }
                let x = pair_decompose(l, m).unwrap();
                assert_eq!(found, vec![(x.l1, x.l_prime, x.m1, x.m_prime)], "l={l} m={m}");
            }
        }
    }

    #[test]
    fn coefficient_choices() {
        let win = window(10.0, 20.0);
        let c = CoefficientChoice::parse("const:0.5", &win).unwrap();
        assert_eq!(c.get(13), Complex64::new(0.5, 0.0));
        assert_eq!(c.bound(), 0.5);
        let s = CoefficientChoice::parse("signs:+-", &win).unwrap();
        let got: Vec<f64> = win.primes().iter().map(|&p| s.get(p).re).collect();
        assert_eq!(got, vec![1.0, -1.0, 1.0, -1.0]);
        let f = CoefficientChoice::from_json(r#"{"values":[{"p":11,"re":0.6,"im":0.8}]}"#).unwrap();
        assert!((f.bound() - 1.0).abs() < 1e-15);
        assert_eq!(f.get(13), Complex64::default());
        assert!(CoefficientChoice::from_json(r#"{"B":0.5,"values":[{"p":11,"re":1}]}"#).is_err());
        assert!(CoefficientChoice::parse("signs:+x", &win).is_err());
        assert!(CoefficientChoice::parse("nope:1", &win).is_err());
    }

    #[test]
    fn main_term_example() {
        let win = window(10.0, 14.0);
        assert_eq!(win.primes(), &[11, 13]);
        let b = CoefficientChoice::parse("const:1", &win).unwrap();
        let m = moment_main_term(&w("1,0"), 1, &win, &b).unwrap();
        let i = |p| integrate_schur_series_default(&w("1,1"), p).unwrap().value;
        let expected = (1.0 + i(11)) / 121.0 + (1.0 + i(13)) / 169.0;
        assert!((m.re - expected).abs() < 1e-15 && m.im.abs() < 1e-15);
        let zero = CoefficientChoice::parse("const:0", &win).unwrap();
        assert_eq!(moment_main_term(&w("1,0"), 1, &win, &zero).unwrap(), Complex64::default());
        assert_eq!(main_term_bound(&w("1,0"), 1, &win, 0.0), 0.0);
    }

    #[test]
    fn main_term_guards() {
        let win = window(10.0, 20.0);
        let b = CoefficientChoice::parse("const:1", &win).unwrap();
        assert!(matches!(moment_main_term(&w("1,0"), 4, &win, &b), Err(Error::GuardExceeded(_))));
        let wide = window(100.0, 200.0);
        let b = CoefficientChoice::parse("const:1", &wide).unwrap();
        assert!(matches!(moment_main_term(&w("1,0"), 1, &wide, &b), Err(Error::GuardExceeded(_))));
    }

    #[test]
    fn squaring_out_identity() {
        // For fixed Satake points, |Σ b_p S_κ(α_p)/p|^{2j} equals the
        // double sum over ℓ, m with b multiplicative.
        let win = window(10.0, 20.0);
        let b = CoefficientChoice::parse("signs:+--+", &win).unwrap();
        let kappa = w("1,0");
        let angles = [[0.3, 1.1], [2.0, -0.4], [0.9, 0.2], [-1.7, 2.6]];
        let s: Vec<Complex64> = angles
            .iter()
            .map(|a| eval_schur(&kappa, &EvalPoint::torus(a)).unwrap())
            .collect();
        let ps = win.primes();
        let j = 2;
        let linear: Complex64 = ps.iter().zip(&s).map(|(&p, &x)| b.get(p) * x / p as f64).sum();
        let lhs = linear.norm_sqr().powi(j as i32);
        let sigs = signatures(ps.len(), j);
        let mut rhs = Complex64::default();
        for su in &sigs {
            for sv in &sigs {
                let mut t = Complex64::new((multiplicity(su) * multiplicity(sv)) as f64, 0.0);
                for i in 0..ps.len() {
                    let bp = b.get(ps[i]) / ps[i] as f64;
                    t *= (bp * s[i]).powu(su[i]) * (bp * s[i]).conj().powu(sv[i]);
                }
                rhs += t;
            }
        }
        assert!((rhs.re - lhs).abs() < 1e-14 && rhs.im.abs() < 1e-14);
    }

    #[test]
    fn main_term_within_bound_on_grid() {
        for n in [2usize, 3] {
            for kappa in crate::weights::weights_up_to(n, 2).unwrap() {
                if kappa.is_zero() {
                    continue;
                }
                for j in [1, 2] {
                    for p in [10.0, 20.0] {
                        // At most eight primes in the window.
                        let win = window(p, if p == 10.0 { 20.0 } else { 40.0 });
                        for bval in [0.5, 1.0] {
                            let b = CoefficientChoice::constant(Complex64::new(bval, 0.0), &win).unwrap();
                            let m = moment_main_term(&kappa, j, &win, &b).unwrap();
                            let bound = main_term_bound(&kappa, j, &win, bval);
                            assert!(m.norm() <= bound + 1e-9, "n={n} κ={kappa} j={j}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn bound_shapes() {
        let win = window(10.0, 20.0);
        let k = w("1,0");
        let e1 = error_term_bound(&k, 1, &win, 1.0, 100.0, 1.0).unwrap();
        let e4 = error_term_bound(&k, 1, &win, 1.0, 400.0, 1.0).unwrap();
        assert!((e1 / e4 - 2.0).abs() < 1e-12);
        assert_eq!(error_term_bound(&k, 1, &win, 0.0, 100.0, 1.0).unwrap(), 0.0);
        assert!(error_term_bound(&WeightVector::zero(3).unwrap(), 1, &win, 1.0, 1.0, 1.0).is_err());
        let r = large_sieve_rhs(&k, 1, &win, 0.0, 10.0, 1.0).unwrap();
        assert_eq!(r.total, 0.0);
        let far = large_sieve_rhs(&k, 1, &win, 1.0, 1e300, 1.0).unwrap();
        assert!(far.first < 1e-100 && (far.total - far.second).abs() <= 1e-12 * far.second);
        let mut last = 0.0;
        for bval in [0.25, 0.5, 1.0, 2.0] {
            let v = main_term_bound(&k, 1, &win, bval);
            assert!(v > last);
            last = v;
        }
        let b1 = main_term_bound(&k, 1, &win, 1.0);
        let b2 = main_term_bound(&k, 2, &win, 1.0);
        assert!(b2 > b1);
    }

    #[test]
    fn rhs_dominates_main_term_example() {
        let win = window(10.0, 20.0);
        let k = w("1,0");
        let b = CoefficientChoice::parse("const:1", &win).unwrap();
        let m = moment_main_term(&k, 1, &win, &b).unwrap();
        let rhs = large_sieve_rhs(&k, 1, &win, 1.0, 1e6, 1.0).unwrap();
        assert!(rhs.second >= m.norm());
        assert!(main_term_bound(&k, 1, &win, 1.0) >= m.norm());
    }
}
