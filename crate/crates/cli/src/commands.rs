use std::time::Instant;

use glsieve::ensemble::{large_sieve_experiment, write_csv, ExperimentConfig};
use glsieve::hecke::{
    fourier_coefficient, is_exceptional, partial_euler_product, verify_key_identity,
    verify_symmetrized_square, LocalData, SatakePoint,
};
use glsieve::json::ComplexJson;
use glsieve::lr::lr_product;
use glsieve::measures::{
    default_truncation, integrate_quadrature, integrate_schur_quadrature, integrate_schur_series,
    MeasureSpec, QuadratureResult, SeriesValue,
};
use glsieve::primes::primes_up_to;
use glsieve::schur::{dimension, dimension_bound, eval_schur_detailed, EvalMethod, EvalPoint};
use glsieve::sieve::{aj_table, lemma_a_report, moment_report, CoefficientChoice, PrimeWindow};
use glsieve::verify::{self, Options};
use glsieve::weights::WeightVector;
use glsieve::{Error, Result, SCHEMA_VERSION};
use num_complex::Complex64;
use serde::Serialize;

use crate::args::*;

/// Agreement slack between series and quadrature on top of the tail bound.
const METHOD_AGREEMENT_SLACK: f64 = 1e-8;

pub struct Outcome {
    pub json: String,
    pub exit: i32,
    pub summary: String,
}

#[derive(Serialize)]
struct Doc<'a, T: Serialize> {
    #[serde(rename = "schemaVersion")]
    schema_version: u32,
    #[serde(flatten)]
    body: &'a T,
}

fn document<T: Serialize>(body: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(&Doc {
        schema_version: SCHEMA_VERSION,
        body,
    })?)
}

fn outcome<T: Serialize>(body: &T, ok: bool, summary: String) -> Result<Outcome> {
    Ok(Outcome {
        json: document(body)?,
        exit: if ok { 0 } else { 1 },
        summary,
    })
}

pub fn error_document(message: &str) -> String {
    #[derive(Serialize)]
    struct Failure<'a> {
        error: &'a str,
    }
    document(&Failure { error: message }).expect("plain strings serialize")
}

fn weight(k: &KappaArgs) -> Result<WeightVector> {
    WeightVector::parse(&k.kappa, k.n)
}

fn window(w: &WindowArgs) -> Result<PrimeWindow> {
    PrimeWindow::new(w.p, w.q)
}

fn l_or_default(l: Option<f64>) -> f64 {
    l.unwrap_or_else(|| {
        eprintln!("warning: --L not given; using L = 1");
        1.0
    })
}

fn u128_of(x: &num_bigint::BigUint) -> Result<u128> {
    num_traits::ToPrimitive::to_u128(x)
        .ok_or_else(|| Error::GuardExceeded(format!("{x} does not fit in 128 bits")))
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Schur(c) => schur(c),
        Command::Lr(c) => lr(c),
        Command::Measure(c) => measure(c),
        Command::Hecke(c) => hecke(c),
        Command::Sieve(c) => sieve(c),
        Command::Ensemble(c) => ensemble(c, cli.seed),
        Command::Verify { scope } => verify_cmd(scope, cli),
    }
}

fn schur(cmd: &SchurCmd) -> Result<Outcome> {
    match cmd {
        SchurCmd::Eval { kappa, point } => {
            let x = EvalPoint::parse(point)?;
            let k = WeightVector::parse(&kappa.kappa, kappa.n.or(Some(x.rank())))?;
            k.ensure_rank(x.rank())?;
            let v = eval_schur_detailed(&k, &x)?;
            #[derive(Serialize)]
            struct Out {
                kappa: WeightVector,
                n: usize,
                value: ComplexJson,
                method: EvalMethod,
            }
            let out = Out {
                n: k.rank(),
                kappa: k,
                value: v.value.into(),
                method: v.method,
            };
            let summary = format!("S_{} = {:.12e} + {:.12e}i ({:?})", out.kappa, v.value.re, v.value.im, v.method);
            outcome(&out, true, summary)
        }
        SchurCmd::Dim { kappa } => {
            let k = weight(kappa)?;
            #[derive(Serialize)]
            struct Out {
                kappa: WeightVector,
                n: usize,
                dimension: u128,
                bound: u128,
                #[serde(rename = "withinBound")]
                within_bound: bool,
            }
            let (d, b) = (dimension(&k), dimension_bound(&k));
            let out = Out {
                n: k.rank(),
                kappa: k,
                dimension: u128_of(&d)?,
                bound: u128_of(&b)?,
                within_bound: d <= b,
            };
            let summary = format!("dim S_{} = {}", out.kappa, out.dimension);
            outcome(&out, true, summary)
        }
    }
}

fn lr(cmd: &LrCmd) -> Result<Outcome> {
    let LrCmd::Product { kappa, kappa2 } = cmd;
    let k = weight(kappa)?;
    let k2 = WeightVector::parse(kappa2, Some(k.rank()))?;
    let product = lr_product(&k, &k2)?;
    #[derive(Serialize)]
    struct Term<'a> {
        xi: &'a WeightVector,
        coeff: u128,
    }
    #[derive(Serialize)]
    struct Out<'a> {
        n: usize,
        kappa: &'a WeightVector,
        kappa2: &'a WeightVector,
        terms: Vec<Term<'a>>,
    }
    let out = Out {
        n: k.rank(),
        kappa: &k,
        kappa2: &k2,
        terms: product
            .iter()
            .map(|(xi, c)| Ok(Term { xi, coeff: u128_of(c)? }))
            .collect::<Result<_>>()?,
    };
    let summary = format!("S_{k} S_{k2}: {} terms", product.len());
    outcome(&out, true, summary)
}

fn measure(cmd: &MeasureCmd) -> Result<Outcome> {
    let MeasureCmd::Integrate {
        kappa,
        measure,
        p,
        method,
        h,
        level,
    } = cmd;
    let k = weight(kappa)?;
    let n = k.rank();
    let spec = match (measure, p) {
        (MeasureName::Plancherel, Some(p)) => MeasureSpec::plancherel(n, *p)?,
        (MeasureName::Plancherel, None) => {
            return Err(Error::InvalidArgument("the Plancherel measure needs --p".into()))
        }
        (MeasureName::SatoTate, None) => MeasureSpec::sato_tate(n)?,
        (MeasureName::SatoTate, Some(_)) => {
            return Err(Error::InvalidArgument("--p applies to the Plancherel measure only".into()))
        }
    };
    let method = method.unwrap_or(match measure {
        MeasureName::Plancherel => Method::Both,
        MeasureName::SatoTate => Method::Quadrature,
    });
    let series: Option<SeriesValue> = match (method, spec.prime()) {
        (Method::Quadrature, _) => None,
        (_, Some(p)) => Some(integrate_schur_series(&k, p, h.unwrap_or_else(|| default_truncation(&k)))?),
        (_, None) => {
            return Err(Error::InvalidArgument("the series method needs the Plancherel measure".into()))
        }
    };
    let quadrature: Option<QuadratureResult> = match method {
        Method::Series => None,
        _ => Some(match level {
            Some(l) => integrate_quadrature(&spec, |x| glsieve::schur::eval_schur(&k, x).expect("rank checked"), *l)?,
            None => integrate_schur_quadrature(&spec, &k)?,
        }),
    };

    #[derive(Serialize)]
    #[serde(rename_all = "camelCase")]
    struct Out {
        n: usize,
        kappa: WeightVector,
        measure: MeasureSpec,
        method: &'static str,
        value: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        tail_bound: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        truncation: Option<u32>,
        #[serde(skip_serializing_if = "Option::is_none")]
        quadrature_value: Option<ComplexJson>,
        #[serde(skip_serializing_if = "Option::is_none")]
        grid_points: Option<u64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        error_estimate: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        level: Option<u32>,
        #[serde(skip_serializing_if = "Option::is_none")]
        methods_agree: Option<bool>,
    }
    let methods_agree = match (&series, &quadrature) {
        (Some(s), Some(q)) => {
            Some((q.value - Complex64::new(s.value, 0.0)).norm() <= s.tail_bound + METHOD_AGREEMENT_SLACK)
        }
        _ => None,
    };
    let value = series.map(|s| s.value).or(quadrature.map(|q| q.value.re)).unwrap_or(f64::NAN);
    let out = Out {
        n,
        kappa: k,
        measure: spec,
        method: match method {
            Method::Series => "series",
            Method::Quadrature => "quadrature",
            Method::Both => "both",
        },
        value,
        tail_bound: series.map(|s| s.tail_bound),
        truncation: series.map(|s| s.truncation),
        quadrature_value: quadrature.map(|q| q.value.into()),
        grid_points: quadrature.map(|q| q.grid_points),
        error_estimate: quadrature.map(|q| q.error_estimate),
        level: quadrature.map(|q| q.level),
        methods_agree,
    };
    let summary = match methods_agree {
        Some(a) => format!("integral of S_{} = {value:.12e}; methods agree: {a}", out.kappa),
        None => format!("integral of S_{} = {value:.12e}", out.kappa),
    };
    outcome(&out, methods_agree != Some(false), summary)
}

fn hecke(cmd: &HeckeCmd) -> Result<Outcome> {
    match cmd {
        HeckeCmd::Coeff {
            kappa,
            alpha,
            threshold,
        } => {
            let a = SatakePoint::parse(alpha)?;
            let k = WeightVector::parse(&kappa.kappa, kappa.n.or(Some(a.rank())))?;
            let value = fourier_coefficient(&k, &a)?;
            #[derive(Serialize)]
            struct Out<'a> {
                kappa: WeightVector,
                n: usize,
                alpha: &'a SatakePoint,
                value: ComplexJson,
                exceptional: bool,
                threshold: f64,
            }
            let out = Out {
                n: k.rank(),
                kappa: k,
                alpha: &a,
                value: value.into(),
                exceptional: is_exceptional(&a, *threshold),
                threshold: *threshold,
            };
            let summary = format!("A(p^{}) = {:.12e} + {:.12e}i", out.kappa, value.re, value.im);
            outcome(&out, true, summary)
        }
        HeckeCmd::Identity { kappa, alpha } => {
            let a = SatakePoint::parse(alpha)?;
            let k = WeightVector::parse(&kappa.kappa, kappa.n.or(Some(a.rank())))?;
            #[derive(Serialize)]
            #[serde(rename_all = "camelCase")]
            struct Out {
                kappa: WeightVector,
                n: usize,
                key_identity_residual: f64,
                symmetrized_square_residual: f64,
            }
            let out = Out {
                n: k.rank(),
                key_identity_residual: verify_key_identity(&k, &a)?,
                symmetrized_square_residual: verify_symmetrized_square(&k, &a)?,
                kappa: k,
            };
            let summary = format!(
                "residuals {:.3e}, {:.3e}",
                out.key_identity_residual, out.symmetrized_square_residual
            );
            outcome(&out, true, summary)
        }
        HeckeCmd::Euler { z, data } => {
            let local = LocalData::from_file(data)?;
            let value = partial_euler_product(&local, *z)?;
            #[derive(Serialize)]
            struct Out {
                n: usize,
                z: f64,
                primes: Vec<u64>,
                value: ComplexJson,
            }
            let out = Out {
                n: local.rank(),
                z: *z,
                primes: primes_up_to(z.floor().max(0.0) as u64),
                value: value.into(),
            };
            let summary = format!("Euler product up to {z}: {:.12e} + {:.12e}i", value.re, value.im);
            outcome(&out, true, summary)
        }
    }
}

fn sieve(cmd: &SieveCmd) -> Result<Outcome> {
    match cmd {
        SieveCmd::Aj { j, window: w } => {
            let win = window(w)?;
            let table = aj_table(*j, &win)?;
            #[derive(Serialize)]
            struct Entry {
                n: u128,
                count: u64,
            }
            #[derive(Serialize)]
            struct Out<'a> {
                j: u32,
                #[serde(flatten)]
                window: &'a PrimeWindow,
                total: u64,
                entries: Vec<Entry>,
            }
            let out = Out {
                j: *j,
                window: &win,
                total: table.values().sum(),
                entries: table.iter().map(|(&n, &count)| Entry { n, count }).collect(),
            };
            let summary = format!("a_{j}: {} nonzero entries, total {}", out.entries.len(), out.total);
            outcome(&out, true, summary)
        }
        SieveCmd::LemmaA { j, window: w, d } => {
            let r = lemma_a_report(*j, &window(w)?, *d)?;
            let summary = format!("a_j sums: all within bounds: {}", r.all_ok);
            outcome(&r, r.all_ok, summary)
        }
        SieveCmd::Moment {
            kappa,
            j,
            window: w,
            b,
            t,
            l,
        } => {
            let k = weight(kappa)?;
            let win = window(w)?;
            let choice = CoefficientChoice::parse(b, &win)?;
            let l = l_or_default(*l);
            let r = moment_report(&k, *j, &win, &choice, *t, l)?;
            let summary = format!(
                "|M| = {:.6e} <= bound {:.6e}: {}",
                r.main_term.norm(),
                r.main_term_bound,
                r.main_term_within_bound
            );
            outcome(&r, r.main_term_within_bound, summary)
        }
    }
}

fn ensemble(cmd: &EnsembleCmd, seed: u64) -> Result<Outcome> {
    let EnsembleCmd::Run {
        kappa,
        j,
        window: w,
        forms,
        b,
        t,
        l,
        dump_csv,
    } = cmd;
    let k = weight(kappa)?;
    let win = window(w)?;
    let cfg = ExperimentConfig {
        kappa: k,
        j: *j,
        b: CoefficientChoice::parse(b, &win)?,
        window: win,
        forms: *forms,
        seed,
        l: l_or_default(*l),
        t: *t,
    };
    let start = Instant::now();
    let r = large_sieve_experiment(&cfg)?;
    if let Some(path) = dump_csv {
        write_csv(path, &r.per_form)?;
    }
    let summary = format!(
        "empirical {:.6e} +- {:.2e}, exact {:.6e}, passed: {} ({:.2} s)",
        r.empirical_lhs,
        r.standard_error,
        r.exact_expectation,
        r.passed,
        start.elapsed().as_secs_f64()
    );
    outcome(&r, r.passed, summary)
}

fn verify_cmd(scope: &str, cli: &Cli) -> Result<Outcome> {
    let start = Instant::now();
    let report = verify::run_suite(
        scope,
        Options {
            quick: cli.quick,
            seed: cli.seed,
        },
    );
    let s = report.summary;
    let mut summary = String::new();
    for c in report.checks.iter().filter(|c| !c.passed()) {
        summary.push_str(&format!("{:?}: {} ({})\n", c.status, c.name, c.detail));
    }
    summary.push_str(&format!(
        "verify {scope}: {} checks, {} passed, {} failed, {} skipped; wallTime {:.2} s",
        s.total,
        s.passed,
        s.failed,
        s.skipped,
        start.elapsed().as_secs_f64()
    ));
    let exit = if report.unknown_scope() {
        2
    } else if s.failed > 0 {
        1
    } else {
        0
    };
    Ok(Outcome {
        json: serde_json::to_string_pretty(&report)?,
        exit,
        summary,
    })
}
