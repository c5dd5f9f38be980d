//! The invariant suite run by `glsieve verify`.
//!
//! Every check records a measured quantity against a bound and passes iff
//! measured ≤ bound. Counts of violations are reported with bound 0. All
//! randomness is drawn from ChaCha8 streams derived from the suite seed, and
//! all reductions are order-fixed, so a report depends only on the scope,
//! the seed and the quick flag.

use std::collections::BTreeMap;
use std::f64::consts::{E, PI};

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::ensemble::{
    chi_square_test, envelope, large_sieve_experiment, sample_many, simulate_family, ExperimentConfig,
};
use crate::error::Result;
use crate::hecke::{
    euler_product_over, fourier_coefficient, is_exceptional, LocalData, SatakePoint,
};
use crate::lr::{
    coefficient_l2_bound_check, key_identity_expansion, lr_product, symmetrized_square, SchurExpansion,
};
use crate::measures::{
    c_kappa, density, integrate_adaptive, integrate_schur_quadrature,
    integrate_schur_series_default, series_coefficients, default_truncation, MeasureSpec, WeightedGrid,
};
use crate::primes::{is_squarefree, is_squarefull, primes_up_to};
use crate::schur::{
    count_tableaux, dimension, dimension_bound, eval_schur, eval_schur_bialternant, eval_schur_tableaux,
    EvalPoint,
};
use crate::sieve::{
    aj_table, lemma_a_report, main_term_bound, moment_main_term, multiplicity, pair_decompose,
    signatures, large_sieve_rhs, CoefficientChoice, PrimeWindow,
};
use crate::summation::pairwise_sum;
use crate::weights::{weights_up_to, weights_with_wnorm_up_to, Partition, WeightVector};
use crate::SCHEMA_VERSION;

pub const DEFAULT_SEED: u64 = 42;
pub const SUITE_NAME: &str = "glsieve-invariants";
pub const MODULES: [&str; 7] = ["weights", "schur", "lr", "measures", "hecke", "sieve", "ensemble"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub module: String,
    pub status: Status,
    pub measured: f64,
    pub bound: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Check {
    fn new(module: &str, name: &str, measured: f64, bound: f64, tolerance: f64, detail: String) -> Self {
        let status = if measured <= bound {
            Status::Pass
        } else {
            Status::Fail
        };
        Self {
            name: name.to_string(),
            module: module.to_string(),
            status,
            measured,
            bound,
            tolerance,
            detail,
        }
    }

    /// A violation count that must be zero.
    fn count(module: &str, name: &str, violations: usize, detail: String) -> Self {
        Self::new(module, name, violations as f64, 0.0, 0.0, detail)
    }

    fn skip(module: &str, name: &str, detail: String) -> Self {
        Self {
            name: name.to_string(),
            module: module.to_string(),
            status: Status::Skip,
            measured: 0.0,
            bound: 0.0,
            tolerance: 0.0,
            detail,
        }
    }

    fn error(module: &str, name: &str, err: crate::Error) -> Self {
        Self {
            name: name.to_string(),
            module: module.to_string(),
            status: Status::Fail,
            measured: f64::INFINITY,
            bound: 0.0,
            tolerance: 0.0,
            detail: format!("error: {err}"),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Options {
    pub quick: bool,
    pub seed: u64,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            quick: false,
            seed: DEFAULT_SEED,
        }
    }
}

impl Options {
    fn pick<T>(&self, quick: T, full: T) -> T {
        if self.quick {
            quick
        } else {
            full
        }
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VerificationReport {
    pub schema_version: u32,
    pub suite: &'static str,
    pub scope: String,
    pub quick: bool,
    pub seed: u64,
    pub summary: Summary,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0 && self.summary.skipped == 0
    }

    pub fn unknown_scope(&self) -> bool {
        self.checks.iter().any(|c| c.name == "scope" && c.status == Status::Skip)
    }
}

pub fn is_known_scope(scope: &str) -> bool {
    scope == "all" || MODULES.contains(&scope)
}

/// Runs every check of `scope` (`all` or a module name).
pub fn run_suite(scope: &str, opts: Options) -> VerificationReport {
    let checks = if scope == "all" {
        MODULES.iter().flat_map(|m| module_checks(m, opts)).collect()
    } else if MODULES.contains(&scope) {
        module_checks(scope, opts)
    } else {
        vec![Check::skip(
            scope,
            "scope",
            format!("unknown scope {scope:?}; expected all or one of {}", MODULES.join(", ")),
        )]
    };
    let summary = Summary {
        total: checks.len(),
        passed: checks.iter().filter(|c| c.status == Status::Pass).count(),
        failed: checks.iter().filter(|c| c.status == Status::Fail).count(),
        skipped: checks.iter().filter(|c| c.status == Status::Skip).count(),
    };
    VerificationReport {
        schema_version: SCHEMA_VERSION,
        suite: SUITE_NAME,
        scope: scope.to_string(),
        quick: opts.quick,
        seed: opts.seed,
        summary,
        checks,
    }
}

pub fn module_checks(module: &str, opts: Options) -> Vec<Check> {
    match module {
        "weights" => vec![
            weights_consistency(opts),
            weights_involution(opts),
            weights_round_trip(opts),
        ],
        "schur" => vec![
            schur_bound(opts),
            schur_path_agreement(opts),
            schur_conjugation(opts),
            schur_dimension(opts),
        ],
        "lr" => {
            let mut out = lr_quadrature_oracle(opts);
            out.push(lr_cauchy_schwarz(opts));
            out.extend(lr_structure(opts));
            out
        }
        "measures" => vec![
            measures_orthonormality(opts),
            measures_positivity(opts),
            measures_unit_mass(opts),
            measures_series_vs_quadrature(opts),
            measures_plancherel_bound(opts),
            measures_vanishing(opts),
            measures_weak_limit(opts),
        ],
        "hecke" => vec![
            hecke_conjugation(opts),
            hecke_key_identity(opts),
            hecke_symmetrized_square(opts),
            hecke_euler(opts),
            hecke_parameter_sum(opts),
            hecke_exceptional(opts),
        ],
        "sieve" => {
            let mut out = sieve_lemma(opts);
            out.push(sieve_pair_decomposition(opts));
            out.push(sieve_aj_counting(opts));
            out.push(sieve_squaring_out(opts));
            out.extend(sieve_main_term_dominance(opts));
            out
        }
        "ensemble" => {
            let mut out = vec![ensemble_envelope(opts), ensemble_chi_square(opts)];
            out.extend(ensemble_moments(opts));
            out.push(ensemble_determinism(opts));
            out
        }
        _ => Vec::new(),
    }
}

fn run(module: &str, name: &str, f: impl FnOnce() -> Result<Check>) -> Check {
    f().unwrap_or_else(|e| Check::error(module, name, e))
}

fn random_angles(rng: &mut ChaCha8Rng, dims: usize) -> Vec<f64> {
    (0..dims).map(|_| rng.gen::<f64>() * 2.0 * PI).collect()
}

/// A random torus point whose coordinates are pairwise separated.
fn random_nondegenerate_torus(rng: &mut ChaCha8Rng, n: usize) -> EvalPoint {
    loop {
        let x = EvalPoint::torus(&random_angles(rng, n - 1));
        let c = x.coords();
        let separated = (0..n).all(|i| (i + 1..n).all(|j| (c[i] - c[j]).norm() > 1e-3));
        if separated {
            return x;
        }
    }
}

fn max_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, f64::max)
}

fn nonzero_weights(n: usize, max_abs: u32) -> Vec<WeightVector> {
    weights_up_to(n, max_abs)
        .expect("valid rank")
        .into_iter()
        .filter(|k| !k.is_zero())
        .collect()
}

fn to_f64(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

// ---------------------------------------------------------------- weights

pub fn weights_consistency(opts: Options) -> Check {
    let (max_n, max_abs) = opts.pick((3, 6), (6, 12));
    let mut tested = 0;
    let mut bad = 0;
    for n in 2..=max_n {
        for k in weights_up_to(n, max_abs).expect("valid rank") {
            tested += 1;
            if k.wnorm() != k.to_partition().size() {
                bad += 1;
            }
        }
    }
    Check::count(
        "weights",
        "weights.wnorm-equals-partition-size",
        bad,
        format!("{tested} weights, n <= {max_n}, |kappa| <= {max_abs}"),
    )
}

pub fn weights_involution(opts: Options) -> Check {
    let (max_n, max_abs) = opts.pick((3, 4), (6, 8));
    let mut tested = 0;
    let mut bad = 0;
    for n in 2..=max_n {
        for k in weights_up_to(n, max_abs).expect("valid rank") {
            tested += 1;
            let lambda = k.to_partition();
            let l = lambda.parts();
            let complement: Vec<u32> = (0..n).map(|i| l[0] - l[n - 1 - i]).collect();
            let expected = Partition::new(complement).expect("complement is a partition");
            if k.involute().involute() != k || k.involute().to_partition() != expected {
                bad += 1;
            }
        }
    }
    Check::count(
        "weights",
        "weights.involution-and-complement",
        bad,
        format!("{tested} weights, n <= {max_n}, |kappa| <= {max_abs}"),
    )
}

pub fn weights_round_trip(opts: Options) -> Check {
    let (max_n, max_abs) = opts.pick((3, 6), (6, 12));
    let mut bad = 0;
    for n in 2..=max_n {
        for k in weights_up_to(n, max_abs).expect("valid rank") {
            if WeightVector::from_partition(&k.to_partition()).ok().as_ref() != Some(&k) {
                bad += 1;
            }
        }
    }
    Check::count("weights", "weights.partition-round-trip", bad, format!("n <= {max_n}"))
}

// ---------------------------------------------------------------- schur

/// |S_κ(x)| ≤ X^{‖κ‖} S_κ(1,…,1) ≤ X^{‖κ‖} (1+|κ|)^{n²−n} for |x_i| ≤ X.
pub fn schur_bound(opts: Options) -> Check {
    run("schur", "schur.growth-bound", || {
        let (max_n, max_abs) = opts.pick((3, 3), (4, 6));
        let points = 200;
        let mut rng = opts.rng(101);
        let mut worst = 0.0f64;
        let mut dim_bad = 0;
        let mut configs = 0;
        for n in 2..=max_n {
            let kappas = weights_up_to(n, max_abs)?;
            for x_max in [1.0, 1.5, E] {
                // Half the points on the polycircle |x_i| = X, half inside.
                let pts: Vec<EvalPoint> = (0..points)
                    .map(|i| {
                        let coords = (0..n)
                            .map(|_| {
                                let r = if i % 2 == 0 { x_max } else { x_max * rng.gen::<f64>().sqrt().max(1e-3) };
                                Complex64::from_polar(r, rng.gen::<f64>() * 2.0 * PI)
                            })
                            .collect();
                        EvalPoint::new(coords).expect("nonzero coordinates")
                    })
                    .collect();
                for k in &kappas {
                    configs += 1;
                    let scale = x_max.powi(k.wnorm() as i32);
                    let dim = to_f64(&dimension(k));
                    if dimension(k) > dimension_bound(k) {
                        dim_bad += 1;
                    }
                    let vals: Vec<f64> = pts
                        .par_iter()
                        .map(|x| eval_schur(k, x).map(|v| v.norm()))
                        .collect::<Result<_>>()?;
                    let ratio = max_of(vals.iter().map(|v| v / (scale * dim)));
                    worst = worst.max(ratio);
                }
            }
        }
        let measured = if dim_bad > 0 { f64::INFINITY } else { worst };
        Ok(Check::new(
            "schur",
            "schur.growth-bound",
            measured,
            1.0 + 1e-12,
            1e-12,
            format!(
                "max |S(x)|/(X^wnorm dim) over {configs} (kappa, X) configurations x {points} points; dimension above bound: {dim_bad}"
            ),
        ))
    })
}

pub fn schur_path_agreement(opts: Options) -> Check {
    run("schur", "schur.bialternant-vs-tableaux", || {
        let (max_n, max_abs) = opts.pick((3, 3), (4, 6));
        let mut rng = opts.rng(102);
        let mut worst = 0.0f64;
        for n in 2..=max_n {
            for k in weights_up_to(n, max_abs)? {
                let pts: Vec<EvalPoint> = (0..100).map(|_| random_nondegenerate_torus(&mut rng, n)).collect();
                let diffs: Vec<f64> = pts
                    .par_iter()
                    .map(|x| {
                        // The determinant ratio is compared even where the
                        // evaluator would prefer the tableau sum.
                        let a = match eval_schur_bialternant(&k, x)? {
                            Some(b) => b.value,
                            None => eval_schur(&k, x)?,
                        };
                        let b = eval_schur_tableaux(&k, x)?;
                        Ok((a - b).norm() / a.norm().max(b.norm()).max(1.0))
                    })
                    .collect::<Result<_>>()?;
                worst = worst.max(max_of(diffs));
            }
        }
        Ok(Check::new(
            "schur",
            "schur.bialternant-vs-tableaux",
            worst,
            1e-10,
            1e-10,
            format!("max relative difference, 100 torus points per kappa, n <= {max_n}, |kappa| <= {max_abs}"),
        ))
    })
}

pub fn schur_conjugation(opts: Options) -> Check {
    run("schur", "schur.torus-conjugation", || {
        let (max_n, max_abs) = opts.pick((3, 3), (4, 6));
        let mut rng = opts.rng(103);
        let mut worst = 0.0f64;
        for n in 2..=max_n {
            let pts: Vec<EvalPoint> = (0..100).map(|_| EvalPoint::torus(&random_angles(&mut rng, n - 1))).collect();
            for k in weights_up_to(n, max_abs)? {
                let d = k.involute();
                for x in &pts {
                    let a = eval_schur(&k, x)?.conj();
                    let b = eval_schur(&d, x)?;
                    worst = worst.max((a - b).norm() / a.norm().max(1.0));
                }
            }
        }
        Ok(Check::new(
            "schur",
            "schur.torus-conjugation",
            worst,
            1e-12,
            1e-12,
            "max |conj S_kappa - S_kappa^iota| / max(1, |S|) on random torus points".into(),
        ))
    })
}

pub fn schur_dimension(opts: Options) -> Check {
    let (max_n, max_abs) = opts.pick((3, 4), (6, 6));
    let mut bad = 0;
    let mut tested = 0;
    for n in 2..=max_n {
        for k in weights_up_to(n, max_abs).expect("valid rank") {
            tested += 1;
            let d = dimension(&k);
            if d != count_tableaux(&k) || d > dimension_bound(&k) {
                bad += 1;
            }
        }
    }
    Check::count(
        "schur",
        "schur.dimension-exact",
        bad,
        format!("{tested} weights: Weyl dimension equals tableau count and is <= (1+|kappa|)^(n^2-n)"),
    )
}

// ---------------------------------------------------------------- lr

/// d^ξ_{κκ'} against rounded Sato–Tate inner products ⟨S_κ S_κ', S_ξ⟩.
/// Returns the residual check and the exact-match check.
pub fn lr_quadrature_oracle(opts: Options) -> Vec<Check> {
    let max_abs = opts.pick(2, 4);
    let mut residual = 0.0f64;
    let mut mismatches = 0;
    let mut compared = 0;
    let mut failure = None;
    for n in [2usize, 3] {
        let result = (|| -> Result<()> {
            let kappas = weights_up_to(n, max_abs)?;
            let xis = weights_up_to(n, 2 * max_abs)?;
            let max_wnorm = kappas.iter().map(|k| k.wnorm().max(k.involute().wnorm())).max().unwrap_or(0);
            let level = crate::measures::default_level(n, 4 * max_wnorm);
            let grid = WeightedGrid::new(MeasureSpec::sato_tate(n)?, level)?;
            let mut values: BTreeMap<WeightVector, Vec<Complex64>> = BTreeMap::new();
            for w in kappas.iter().chain(&xis) {
                if !values.contains_key(w) {
                    values.insert(w.clone(), grid.schur_values(w)?);
                }
            }
            for (a, ka) in kappas.iter().enumerate() {
                for kb in &kappas[a..] {
                    let product = lr_product(ka, kb)?;
                    let va = &values[ka];
                    let vb = &values[kb];
                    let prod: Vec<Complex64> = va.iter().zip(vb).map(|(x, y)| x * y).collect();
                    let bound_wnorm = ka.wnorm() + kb.wnorm();
                    for xi in &xis {
                        if xi.wnorm() > bound_wnorm {
                            continue;
                        }
                        let ip = grid.inner_product(&prod, &values[xi]);
                        let rounded = ip.re.round();
                        residual = residual.max((ip - rounded).norm());
                        compared += 1;
                        if BigUint::from(rounded.max(0.0) as u64) != product.coefficient(xi) {
                            mismatches += 1;
                        }
                    }
                    // Every emitted ξ must be among those compared.
                    if product.iter().any(|(xi, _)| xi.wnorm() > bound_wnorm || !values.contains_key(xi)) {
                        mismatches += 1;
                    }
                }
            }
            Ok(())
        })();
        if let Err(e) = result {
            failure = Some(e);
        }
    }
    if let Some(e) = failure {
        let msg = e.to_string();
        return vec![
            Check::error("lr", "lr.quadrature-residual", e),
            Check::error("lr", "lr.quadrature-match", crate::Error::InvalidArgument(msg)),
        ];
    }
    vec![
        Check::new(
            "lr",
            "lr.quadrature-residual",
            residual,
            1e-8,
            1e-8,
            format!("max pre-rounding residual over {compared} inner products, n in {{2,3}}, |kappa|,|kappa'| <= {max_abs}"),
        ),
        Check::count(
            "lr",
            "lr.quadrature-match",
            mismatches,
            format!("{compared} coefficients compared against rounded Sato-Tate inner products"),
        ),
    ]
}

pub fn lr_cauchy_schwarz(opts: Options) -> Check {
    run("lr", "lr.cauchy-schwarz", || {
        let max_abs = opts.pick(3, 4);
        let mut bad = 0;
        let mut worst = 0.0f64;
        for n in [2usize, 3] {
            let kappas = weights_up_to(n, max_abs)?;
            for a in &kappas {
                for b in &kappas {
                    let c = coefficient_l2_bound_check(a, b)?;
                    worst = worst.max(to_f64(&c.sum_squares) / to_f64(&c.bound));
                    if !c.ok {
                        bad += 1;
                    }
                }
            }
        }
        Ok(Check::count(
            "lr",
            "lr.cauchy-schwarz",
            bad,
            format!("sum of squared coefficients <= c_kappa c_kappa'; worst ratio {worst:.3e}"),
        ))
    })
}

fn dimension_sum(e: &SchurExpansion) -> BigUint {
    e.iter().map(|(xi, c)| c * dimension(xi)).sum()
}

/// Commutativity, dimension identity, congruence and the key-identity
/// constant, over all pairs on the grid.
pub fn lr_structure(opts: Options) -> Vec<Check> {
    let (max_n, max_abs) = opts.pick((3, 3), (4, 4));
    let mut non_commuting = 0;
    let mut dim_bad = 0;
    let mut congruence_bad = 0;
    let mut constant_bad = 0;
    let mut pairs = 0;
    for n in 2..=max_n {
        let kappas = weights_up_to(n, max_abs).expect("valid rank");
        for a in &kappas {
            let key = key_identity_expansion(a);
            match key {
                Ok(k) if !k.constant().is_one() => constant_bad += 1,
                Err(_) if !a.is_zero() => constant_bad += 1,
                _ => {}
            }
            for b in &kappas {
                pairs += 1;
                let (ab, ba) = match (lr_product(a, b), lr_product(b, a)) {
                    (Ok(x), Ok(y)) => (x, y),
                    _ => {
                        non_commuting += 1;
                        continue;
                    }
                };
                if ab != ba {
                    non_commuting += 1;
                }
                if dimension_sum(&ab) != dimension(a) * dimension(b) {
                    dim_bad += 1;
                }
                let target = (a.wnorm() + b.wnorm()) % n as u32;
                if ab.iter().any(|(xi, _)| xi.wnorm() % n as u32 != target) {
                    congruence_bad += 1;
                }
            }
        }
    }
    let detail = format!("{pairs} ordered pairs, n <= {max_n}, |kappa| <= {max_abs}");
    vec![
        Check::count("lr", "lr.commutativity", non_commuting, detail.clone()),
        Check::count("lr", "lr.dimension-identity", dim_bad, detail.clone()),
        Check::count("lr", "lr.congruence", congruence_bad, detail),
        Check::count(
            "lr",
            "lr.key-identity-constant",
            constant_bad,
            "constant term of S_kappa S_kappa^iota is 1 for kappa != 0".into(),
        ),
    ]
}

// ---------------------------------------------------------------- measures

/// ⟨S_κ, S_κ'⟩ under dμ_ST for n ∈ {2,3}, ‖κ‖, ‖κ'‖ ≤ 6.
pub fn measures_orthonormality(_opts: Options) -> Check {
    run("measures", "measures.orthonormality", || {
        let mut worst = 0.0f64;
        let mut pairs = 0;
        for n in [2usize, 3] {
            let kappas = weights_with_wnorm_up_to(n, 6)?;
            let level = crate::measures::default_level(n, 12);
            let grid = WeightedGrid::new(MeasureSpec::sato_tate(n)?, level)?;
            let values: Vec<Vec<Complex64>> = kappas.iter().map(|k| grid.schur_values(k)).collect::<Result<_>>()?;
            for (i, a) in values.iter().enumerate() {
                for (j, b) in values.iter().enumerate() {
                    pairs += 1;
                    let delta = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((grid.inner_product(a, b) - delta).norm());
                }
            }
        }
        Ok(Check::new(
            "measures",
            "measures.orthonormality",
            worst,
            1e-10,
            1e-10,
            format!("max |<S_k, S_k'> - delta| over {pairs} pairs, n in {{2,3}}, wnorm <= 6"),
        ))
    })
}

pub fn measures_positivity(opts: Options) -> Check {
    let samples = opts.pick(1_000, 10_000);
    let mut rng = opts.rng(201);
    let mut negative = 0;
    for n in 2..=6usize {
        let mut specs = vec![MeasureSpec::sato_tate(n).expect("valid rank")];
        for p in [2, 3, 5, 11] {
            specs.push(MeasureSpec::plancherel(n, p).expect("prime"));
        }
        for spec in &specs {
            for _ in 0..samples {
                let d = density(spec, &random_angles(&mut rng, n - 1));
                if !(d >= 0.0 && d.is_finite()) {
                    negative += 1;
                }
            }
        }
    }
    Check::count(
        "measures",
        "measures.density-nonnegative",
        negative,
        format!("{samples} random angles per measure, n <= 6, p in {{2,3,5,11}}"),
    )
}

pub fn measures_unit_mass(_opts: Options) -> Check {
    run("measures", "measures.unit-mass", || {
        let mut worst = 0.0f64;
        for n in [2usize, 3] {
            let mut specs = vec![MeasureSpec::sato_tate(n)?];
            for p in [2, 3, 5, 11] {
                specs.push(MeasureSpec::plancherel(n, p)?);
            }
            for spec in &specs {
                let r = integrate_adaptive(spec, |_| Complex64::new(1.0, 0.0), 4)?;
                worst = worst.max((r.value - 1.0).norm());
            }
        }
        Ok(Check::new(
            "measures",
            "measures.unit-mass",
            worst,
            1e-10,
            1e-10,
            "max |total mass - 1|, Sato-Tate and Plancherel p in {2,3,5,11}, n in {2,3}".into(),
        ))
    })
}

/// Series values for the grid, shared by the series checks.
fn series_grid(max_abs: u32, primes: &[u64]) -> Result<Vec<(WeightVector, u64, f64, f64)>> {
    let mut out = Vec::new();
    for n in [2usize, 3] {
        for k in weights_up_to(n, max_abs)? {
            for &p in primes {
                let s = integrate_schur_series_default(&k, p)?;
                out.push((k.clone(), p, s.value, s.tail_bound));
            }
        }
    }
    Ok(out)
}

pub fn measures_series_vs_quadrature(opts: Options) -> Check {
    run("measures", "measures.series-vs-quadrature", || {
        let max_abs = opts.pick(2, 4);
        let grid = series_grid(max_abs, &[2, 3, 5, 11])?;
        let excess: Vec<f64> = grid
            .par_iter()
            .map(|(k, p, value, tail)| {
                let spec = MeasureSpec::plancherel(k.rank(), *p)?;
                let q = integrate_schur_quadrature(&spec, k)?;
                Ok((q.value - value).norm() - tail)
            })
            .collect::<Result<_>>()?;
        let worst = excess.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(Check::new(
            "measures",
            "measures.series-vs-quadrature",
            worst,
            1e-8,
            1e-8,
            format!(
                "max (|series - quadrature| - tailBound) over {} (kappa, p), |kappa| <= {max_abs}, n in {{2,3}}",
                grid.len()
            ),
        ))
    })
}

pub fn measures_plancherel_bound(opts: Options) -> Check {
    run("measures", "measures.plancherel-bound", || {
        let max_abs = opts.pick(2, 4);
        let grid = series_grid(max_abs, &[2, 3, 5, 11])?;
        let mut bad = 0;
        let mut worst = 0.0f64;
        for (k, p, value, tail) in &grid {
            if k.is_zero() {
                continue;
            }
            let bound = c_kappa(k) / *p as f64;
            worst = worst.max((value.abs() + tail) / bound);
            if value.abs() + tail > bound {
                bad += 1;
            }
        }
        Ok(Check::count(
            "measures",
            "measures.plancherel-bound",
            bad,
            format!("|integral| + tailBound <= c_kappa/p; worst ratio {worst:.3e}"),
        ))
    })
}

pub fn measures_vanishing(opts: Options) -> Check {
    let max_abs = opts.pick(3, 4);
    let mut bad = 0;
    let mut tested = 0;
    for n in [2usize, 3, 4] {
        for k in weights_up_to(n, max_abs).expect("valid rank") {
            if k.wnorm() % n as u32 == 0 {
                continue;
            }
            tested += 1;
            let coeffs = series_coefficients(&k, default_truncation(&k));
            let value = integrate_schur_series_default(&k, 5).map(|s| s.value);
            if coeffs.iter().any(|&d| d != 0) || value.ok() != Some(0.0) {
                bad += 1;
            }
        }
    }
    Check::count(
        "measures",
        "measures.congruence-vanishing",
        bad,
        format!("{tested} weights with wnorm != 0 mod n: every LR coefficient d^eta_(kappa,eta) vanishes"),
    )
}

pub fn measures_weak_limit(opts: Options) -> Check {
    run("measures", "measures.large-p-limit", || {
        let max_abs = opts.pick(2, 4);
        let p = 101;
        let mut worst = 0.0f64;
        for n in [2usize, 3] {
            for k in weights_up_to(n, max_abs)? {
                let s = integrate_schur_series_default(&k, p)?;
                let delta = if k.is_zero() { 1.0 } else { 0.0 };
                worst = worst.max(((s.value - delta).abs() + s.tail_bound) * p as f64 / c_kappa(&k));
            }
        }
        Ok(Check::new(
            "measures",
            "measures.large-p-limit",
            worst,
            1.0,
            0.0,
            "max |int S_kappa dmu_101 - delta| * 101 / c_kappa".into(),
        ))
    })
}

// ---------------------------------------------------------------- hecke

fn random_tempered(rng: &mut ChaCha8Rng, n: usize) -> SatakePoint {
    SatakePoint::from_angles(&random_angles(rng, n - 1)).expect("tempered point")
}

pub fn hecke_conjugation(opts: Options) -> Check {
    run("hecke", "hecke.conjugation", || {
        let (max_n, max_abs) = opts.pick((3, 3), (4, 4));
        let mut rng = opts.rng(301);
        let mut worst = 0.0f64;
        for n in 2..=max_n {
            let pts: Vec<SatakePoint> = (0..200).map(|_| random_tempered(&mut rng, n)).collect();
            for k in weights_up_to(n, max_abs)? {
                for a in &pts {
                    let x = fourier_coefficient(&k, a)?;
                    let y = fourier_coefficient(&k.involute(), a)?;
                    worst = worst.max((x.conj() - y).norm() / x.norm().max(1.0));
                    if k == k.involute() {
                        worst = worst.max(x.im.abs() / x.norm().max(1.0));
                    }
                }
            }
        }
        Ok(Check::new(
            "hecke",
            "hecke.conjugation",
            worst,
            1e-12,
            1e-12,
            "max |conj A(p^kappa) - A(p^kappa^iota)| / max(1, |A|), 200 tempered points per rank".into(),
        ))
    })
}

fn expansion_residuals(
    opts: Options,
    stream: u64,
    expansion: impl Fn(&WeightVector) -> Result<(f64, SchurExpansion)>,
    lhs: impl Fn(&WeightVector, &EvalPoint) -> Result<f64> + Sync,
) -> Result<(f64, usize)> {
    let (max_n, max_abs, points) = opts.pick((3, 3, 100), (4, 4, 1000));
    let mut rng = opts.rng(stream);
    let mut worst = 0.0f64;
    let mut evaluated = 0;
    for n in 2..=max_n {
        for k in nonzero_weights(n, max_abs) {
            let (constant, rest) = expansion(&k)?;
            let pts: Vec<EvalPoint> = (0..points)
                .map(|_| random_tempered(&mut rng, n).to_eval_point())
                .collect();
            let res: Vec<f64> = pts
                .par_iter()
                .map(|x| Ok((rest.evaluate(x)? + constant - lhs(&k, x)?).norm()))
                .collect::<Result<_>>()?;
            evaluated += res.len();
            worst = worst.max(max_of(res));
        }
    }
    Ok((worst, evaluated))
}

pub fn hecke_key_identity(opts: Options) -> Check {
    run("hecke", "hecke.key-identity", || {
        let (worst, count) = expansion_residuals(
            opts,
            302,
            |k| {
                let e = key_identity_expansion(k)?;
                Ok((to_f64(&e.constant()), e.without_constant()))
            },
            |k, x| Ok(eval_schur(k, x)?.norm_sqr()),
        )?;
        Ok(Check::new(
            "hecke",
            "hecke.key-identity",
            worst,
            1e-9,
            1e-9,
            format!("max | |S_kappa|^2 - (1 + sum d S_xi) | over {count} tempered evaluations"),
        ))
    })
}

pub fn hecke_symmetrized_square(opts: Options) -> Check {
    run("hecke", "hecke.symmetrized-square", || {
        let (worst, count) = expansion_residuals(
            opts,
            303,
            |k| {
                let s = symmetrized_square(k)?;
                Ok((to_f64(&s.constant), s.rest))
            },
            |k, x| Ok((eval_schur(k, x)? + eval_schur(&k.involute(), x)?).norm_sqr()),
        )?;
        Ok(Check::new(
            "hecke",
            "hecke.symmetrized-square",
            worst,
            1e-9,
            1e-9,
            format!("max residual of the |S_kappa + S_kappa^iota|^2 expansion over {count} tempered evaluations"),
        ))
    })
}

pub fn hecke_euler(opts: Options) -> Check {
    run("hecke", "hecke.euler-product", || {
        let mut rng = opts.rng(304);
        let mut worst = 0.0f64;
        for n in 2..=4usize {
            let primes = primes_up_to(50);
            let mut data = LocalData::new(n)?;
            for &p in &primes {
                data.insert(p, random_tempered(&mut rng, n))?;
            }
            let full = euler_product_over(&data, &primes)?;
            let logs: Vec<Complex64> = primes
                .iter()
                .flat_map(|&p| {
                    data.get(p)
                        .expect("inserted")
                        .alphas()
                        .iter()
                        .map(move |a| -(1.0 - a / p as f64).ln())
                        .collect::<Vec<_>>()
                })
                .collect();
            let via_logs = crate::summation::pairwise_sum_complex(&logs).exp();
            worst = worst.max((full - via_logs).norm() / via_logs.norm());
            let (small, large): (Vec<u64>, Vec<u64>) = primes.iter().partition(|&&p| p <= 20);
            let split = euler_product_over(&data, &small)? * euler_product_over(&data, &large)?;
            worst = worst.max((full - split).norm() / full.norm());
        }
        Ok(Check::new(
            "hecke",
            "hecke.euler-product",
            worst,
            1e-12,
            1e-12,
            "relative difference to the log-sum path and across a split of the primes, z = 50".into(),
        ))
    })
}

pub fn hecke_parameter_sum(opts: Options) -> Check {
    run("hecke", "hecke.parameter-sum", || {
        let mut rng = opts.rng(305);
        let mut worst = 0.0f64;
        for n in 2..=6usize {
            let mut parts = vec![0; n - 1];
            parts[n - 2] = 1;
            let e1 = WeightVector::new(n, parts)?;
            for _ in 0..100 {
                let a = random_tempered(&mut rng, n);
                let sum: Complex64 = a.alphas().iter().sum();
                worst = worst.max((fourier_coefficient(&e1, &a)? - sum).norm());
                let one = fourier_coefficient(&WeightVector::zero(n)?, &a)?;
                worst = worst.max((one - 1.0).norm());
            }
        }
        Ok(Check::new(
            "hecke",
            "hecke.parameter-sum",
            worst,
            1e-12,
            1e-12,
            "alpha_1 + ... + alpha_n against S_(0,...,0,1), and A(1) = 1".into(),
        ))
    })
}

pub fn hecke_exceptional(opts: Options) -> Check {
    let mut rng = opts.rng(306);
    let mut bad = 0;
    for n in 2..=6usize {
        for _ in 0..100 {
            if is_exceptional(&random_tempered(&mut rng, n), 1e-9) {
                bad += 1;
            }
        }
    }
    let big = SatakePoint::new(vec![Complex64::new(E * E, 0.0), Complex64::new(E.powi(-2), 0.0)]);
    if !big.map(|b| is_exceptional(&b, 1.0)).unwrap_or(false) {
        bad += 1;
    }
    Check::count(
        "hecke",
        "hecke.exceptional-predicate",
        bad,
        "tempered points are never exceptional; (e^2, e^-2) is".into(),
    )
}

// ---------------------------------------------------------------- sieve

pub fn sieve_lemma(opts: Options) -> Vec<Check> {
    let ps: &[f64] = opts.pick(&[4.0, 10.0], &[4.0, 10.0, 20.0, 50.0]);
    let max_j = opts.pick(3, 4);
    let mut residual = 0.0f64;
    let mut bound_bad = Vec::new();
    let mut odd_bad = 0;
    let mut err = None;
    for &p in ps {
        let win = match PrimeWindow::new(p, 2.0 * p) {
            Ok(w) => w,
            Err(e) => {
                err = Some(e);
                break;
            }
        };
        for j in 1..=max_j {
            for d in [0.5, 1.0, 2.0] {
                match lemma_a_report(j, &win, d) {
                    Ok(r) => {
                        residual = residual.max(r.identity_residual);
                        for s in r.sums.iter().filter(|s| !s.ok) {
                            bound_bad.push(format!("{} (j={j}, P={p}, d={d})", s.name));
                        }
                        if j % 2 == 1 && r.sums[1].value != 0.0 {
                            odd_bad += 1;
                        }
                    }
                    Err(e) => err = Some(e),
                }
            }
        }
    }
    if let Some(e) = err {
        return vec![Check::error("sieve", "sieve.lemma-identity", e)];
    }
    let grid = format!("j <= {max_j}, P in {ps:?}, Q = 2P, d in {{0.5, 1, 2}}");
    vec![
        Check::new(
            "sieve",
            "sieve.lemma-identity",
            residual,
            1e-12,
            1e-12,
            format!("max relative residual of sum a_j d^Omega/n vs (d sum 1/p)^j, {grid}"),
        ),
        Check::count(
            "sieve",
            "sieve.lemma-bounds",
            bound_bad.len(),
            if bound_bad.is_empty() {
                format!("all four sums within their bounds, {grid}")
            } else {
                format!("violations: {}", bound_bad.join("; "))
            },
        ),
        Check::count("sieve", "sieve.odd-j-squares-vanish", odd_bad, grid),
    ]
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn sieve_pair_decomposition(opts: Options) -> Check {
    let limit = opts.pick(60u64, 200);
    let divisors: Vec<Vec<u64>> = (0..=limit)
        .map(|n| if n == 0 { Vec::new() } else { (1..=n).filter(|d| n % d == 0).collect() })
        .collect();
    let bad: usize = (1..=limit)
        .into_par_iter()
        .map(|l| {
            let mut bad = 0;
            for m in 1..=limit {
                let mut found = Vec::new();
                for &l1 in &divisors[l as usize] {
                    for &m1 in &divisors[m as usize] {
                        let h = l1 * m1;
                        let r = (l / l1) * (m / m1);
                        if is_squarefree(h) && is_squarefull(r) && gcd(h, r) == 1 {
                            found.push((l1, l / l1, m1, m / m1));
                        }
                    }
                }
                let ok = pair_decompose(l, m)
                    .map(|x| found == vec![(x.l1, x.l_prime, x.m1, x.m_prime)])
                    .unwrap_or(false);
                if !ok {
                    bad += 1;
                }
            }
            bad
        })
        .sum();
    Check::count(
        "sieve",
        "sieve.pair-decomposition-unique",
        bad,
        format!("exhaustive divisor search finds exactly the computed split, all l, m <= {limit}"),
    )
}

pub fn sieve_aj_counting(opts: Options) -> Check {
    run("sieve", "sieve.aj-counting", || {
        let max_j = opts.pick(3, 4);
        let mut bad = 0;
        for p in [4.0, 10.0, 20.0, 50.0] {
            let win = PrimeWindow::new(p, 2.0 * p)?;
            let k = win.len() as u64;
            for j in 1..=max_j {
                let t = aj_table(j, &win)?;
                let (lo, hi) = ((p as u128).pow(j), ((2.0 * p) as u128).pow(j));
                if t.values().sum::<u64>() != k.pow(j) || t.keys().any(|&n| n <= lo || n > hi) {
                    bad += 1;
                }
            }
        }
        Ok(Check::count(
            "sieve",
            "sieve.aj-counting",
            bad,
            "sum_n a_j(n) = (#primes)^j and support in (P^j, Q^j]".into(),
        ))
    })
}

/// |Σ b_p S_κ(α_p)/p|^{2j} against its expansion over pairs of signatures,
/// j = 2, with b multiplicative.
pub fn sieve_squaring_out(opts: Options) -> Check {
    run("sieve", "sieve.squaring-out", || {
        let mut rng = opts.rng(401);
        let win = PrimeWindow::new(10.0, 20.0)?;
        let ps = win.primes().to_vec();
        let b = CoefficientChoice::signs("+-", &win)?;
        let j = 2;
        let sigs = signatures(ps.len(), j);
        let mut worst = 0.0f64;
        for n in [2usize, 3] {
            for k in nonzero_weights(n, 2) {
                for _ in 0..20 {
                    let s: Vec<Complex64> = ps
                        .iter()
                        .map(|_| eval_schur(&k, &EvalPoint::torus(&random_angles(&mut rng, n - 1))))
                        .collect::<Result<_>>()?;
                    let z: Vec<Complex64> = ps.iter().zip(&s).map(|(&p, &x)| b.get(p) * x / p as f64).collect();
                    let lhs = z.iter().sum::<Complex64>().norm_sqr().powi(j as i32);
                    let scale = z.iter().map(|w| w.norm()).sum::<f64>().powi(2 * j as i32);
                    let mut terms = Vec::new();
                    for su in &sigs {
                        for sv in &sigs {
                            let mut t = Complex64::new((multiplicity(su) * multiplicity(sv)) as f64, 0.0);
                            for i in 0..ps.len() {
                                t *= z[i].powu(su[i]) * z[i].conj().powu(sv[i]);
                            }
                            terms.push(t);
                        }
                    }
                    let rhs = crate::summation::pairwise_sum_complex(&terms);
                    worst = worst.max((rhs - lhs).norm() / scale);
                }
            }
        }
        Ok(Check::new(
            "sieve",
            "sieve.squaring-out",
            worst,
            1e-10,
            1e-10,
            "max difference / (sum |b_p S(alpha_p)|/p)^(2j), j = 2, primes in (10, 20], random tempered points".into(),
        ))
    })
}

/// |M| ≤ main_term_bound ≤ second term of the sieve right-hand side.
pub fn sieve_main_term_dominance(opts: Options) -> Vec<Check> {
    let mut first = Vec::new();
    let mut second = Vec::new();
    let mut worst_m = 0.0f64;
    let mut worst_b = 0.0f64;
    let mut configs = 0;
    let kappas = [("1", 2usize), ("2", 2), ("1,0", 3), ("1,1", 3)];
    let js: &[u32] = opts.pick(&[1], &[1, 2]);
    let result = (|| -> Result<()> {
        for (ks, n) in kappas {
            let k = WeightVector::parse(ks, Some(n))?;
            for &j in js {
                for p in [10.0, 20.0] {
                    let win = PrimeWindow::new(p, 2.0 * p)?;
                    for bval in [0.5, 1.0] {
                        configs += 1;
                        let b = CoefficientChoice::constant(Complex64::new(bval, 0.0), &win)?;
                        let m = moment_main_term(&k, j, &win, &b)?.norm();
                        let bound = main_term_bound(&k, j, &win, bval);
                        let rhs = large_sieve_rhs(&k, j, &win, bval, 1e6, 1.0)?.second;
                        worst_m = worst_m.max(m / bound);
                        worst_b = worst_b.max(bound / rhs);
                        let tag = format!("kappa={ks} j={j} P={p} B={bval}");
                        if m > bound + 1e-9 {
                            first.push(tag.clone());
                        }
                        if bound > rhs {
                            second.push(tag);
                        }
                    }
                }
            }
        }
        Ok(())
    })();
    if let Err(e) = result {
        return vec![Check::error("sieve", "sieve.main-term-bound", e)];
    }
    let describe = |v: &Vec<String>, worst: f64| {
        if v.is_empty() {
            format!("{configs} configurations; worst ratio {worst:.3e}")
        } else {
            format!("violations: {}", v.join("; "))
        }
    };
    vec![
        Check::count("sieve", "sieve.main-term-bound", first.len(), describe(&first, worst_m)),
        Check::count("sieve", "sieve.bound-below-rhs", second.len(), describe(&second, worst_b)),
    ]
}

// ---------------------------------------------------------------- ensemble

pub fn ensemble_envelope(opts: Options) -> Check {
    let probes = opts.pick(100_000, 1_000_000);
    let mut rng = opts.rng(501);
    let mut bad = 0;
    let mut worst = 0.0f64;
    for n in 2..=4usize {
        for p in [2, 3, 5, 11] {
            let spec = MeasureSpec::plancherel(n, p).expect("prime");
            let env = envelope(&spec);
            for _ in 0..probes / 12 {
                let d = density(&spec, &random_angles(&mut rng, n - 1));
                worst = worst.max(d / env);
                if d > env {
                    bad += 1;
                }
            }
        }
    }
    Check::count(
        "ensemble",
        "ensemble.envelope",
        bad,
        format!("{probes} random probes over n <= 4, p in {{2,3,5,11}}; max density/envelope {worst:.4}"),
    )
}

pub fn ensemble_chi_square(opts: Options) -> Check {
    run("ensemble", "ensemble.chi-square", || {
        let samples = opts.pick(20_000, 100_000);
        let mut worst = 0.0f64;
        let mut parts = Vec::new();
        for (i, (n, p)) in [(2usize, 5u64), (3, 5), (3, 11)].into_iter().enumerate() {
            let spec = MeasureSpec::plancherel(n, p)?;
            let draws = sample_many(&spec, samples, opts.seed.wrapping_add(i as u64))?;
            let r = chi_square_test(&spec, &draws, 8, 1e-3)?;
            worst = worst.max(r.statistic / r.critical_value);
            parts.push(format!("n={n} p={p}: {:.1}/{:.1}", r.statistic, r.critical_value));
        }
        Ok(Check::new(
            "ensemble",
            "ensemble.chi-square",
            worst,
            1.0,
            1e-3,
            format!("statistic / critical value at significance 1e-3, {samples} samples; {}", parts.join(", ")),
        ))
    })
}

pub fn ensemble_moments(opts: Options) -> Vec<Check> {
    let forms = opts.pick(10_000, 100_000);
    let mut out = Vec::new();
    for j in [1u32, 2] {
        let name_exact = format!("ensemble.moment-j{j}-matches-main-term");
        let name_rhs = format!("ensemble.moment-j{j}-below-rhs");
        let result = (|| -> Result<Vec<Check>> {
            let win = PrimeWindow::new(10.0, 20.0)?;
            let cfg = ExperimentConfig {
                kappa: WeightVector::parse("1,0", Some(3))?,
                j,
                b: CoefficientChoice::parse("const:1", &win)?,
                window: win,
                forms,
                seed: opts.seed,
                l: 1.0,
                t: 1e6,
            };
            let r = large_sieve_experiment(&cfg)?;
            let se = r.standard_error;
            Ok(vec![
                Check::new(
                    "ensemble",
                    &name_exact,
                    (r.empirical_lhs - r.exact_expectation).abs(),
                    4.0 * se,
                    4.0 * se,
                    format!(
                        "empirical {:.6e} vs exact main term {:.6e}, standard error {:.3e}, {forms} forms",
                        r.empirical_lhs, r.exact_expectation, se
                    ),
                ),
                Check::new(
                    "ensemble",
                    &name_rhs,
                    r.empirical_lhs,
                    r.rhs_second_term + 4.0 * se,
                    4.0 * se,
                    "empirical moment against the second term of the right-hand side".into(),
                ),
            ])
        })();
        match result {
            Ok(c) => out.extend(c),
            Err(e) => out.push(Check::error("ensemble", &name_exact, e)),
        }
    }
    out
}

pub fn ensemble_determinism(opts: Options) -> Check {
    run("ensemble", "ensemble.thread-independence", || {
        let win = PrimeWindow::new(10.0, 20.0)?;
        let simulate = |threads: usize| -> Result<Vec<LocalData>> {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| crate::Error::InvalidArgument(e.to_string()))?;
            pool.install(|| simulate_family(3, 500, &win, opts.seed).map(|f| f.forms))
        };
        let a = simulate(1)?;
        let b = simulate(3)?;
        let differing = a.iter().zip(&b).filter(|(x, y)| x != y).count() + a.len().abs_diff(b.len());
        Ok(Check::count(
            "ensemble",
            "ensemble.thread-independence",
            differing,
            "500 forms simulated on 1 and 3 threads".into(),
        ))
    })
}

/// Mean of the measured values of a check list; a convenience for the CLI
/// summary line.
pub fn pass_fraction(report: &VerificationReport) -> f64 {
    let ones: Vec<f64> = report.checks.iter().map(|c| if c.passed() { 1.0 } else { 0.0 }).collect();
    if ones.is_empty() {
        0.0
    } else {
        pairwise_sum(&ones) / ones.len() as f64
    }
}
