use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "glsieve",
    version,
    about = "Schur polynomials, Plancherel measures and large-sieve moments for GL(n)"
)]
pub struct Cli {
    /// Seed for every random stream.
    #[arg(long, global = true, default_value_t = glsieve::verify::DEFAULT_SEED)]
    pub seed: u64,
    /// Worker thread cap.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Reduced grids for `verify`.
    #[arg(long, global = true)]
    pub quick: bool,
    /// JSON object whose keys mirror long flags; explicit flags win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Degenerate Schur polynomials.
    #[command(subcommand)]
    Schur(SchurCmd),
    /// Littlewood–Richardson products.
    #[command(subcommand)]
    Lr(LrCmd),
    /// Integrals against the Sato–Tate and Plancherel measures.
    #[command(subcommand)]
    Measure(MeasureCmd),
    /// Satake parameters, Fourier coefficients and Euler products.
    #[command(subcommand)]
    Hecke(HeckeCmd),
    /// Sieve combinatorics and moment bounds.
    #[command(subcommand)]
    Sieve(SieveCmd),
    /// Synthetic families.
    #[command(subcommand)]
    Ensemble(EnsembleCmd),
    /// Run the invariant suite.
    Verify {
        /// `all` or a module name.
        #[arg(default_value = "all")]
        scope: String,
    },
}

#[derive(Debug, Args)]
pub struct KappaArgs {
    /// Weight vector, e.g. `1,0`.
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: String,
    /// Rank; defaults to the length of kappa plus one.
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum SchurCmd {
    /// S_κ at a point.
    Eval {
        #[command(flatten)]
        kappa: KappaArgs,
        /// Coordinates `re,im;re,im;...`.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// S_κ(1, …, 1).
    Dim {
        #[command(flatten)]
        kappa: KappaArgs,
    },
}

#[derive(Debug, Subcommand)]
pub enum LrCmd {
    /// Expansion of S_κ S_κ'.
    Product {
        #[command(flatten)]
        kappa: KappaArgs,
        #[arg(long)]
        kappa2: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MeasureName {
    SatoTate,
    Plancherel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Series,
    Quadrature,
    Both,
}

#[derive(Debug, Subcommand)]
pub enum MeasureCmd {
    /// ∫ S_κ dμ.
    Integrate {
        #[command(flatten)]
        kappa: KappaArgs,
        #[arg(long, value_enum, default_value = "plancherel")]
        measure: MeasureName,
        /// Prime for the Plancherel measure.
        #[arg(long)]
        p: Option<u64>,
        /// Defaults to `both` for Plancherel and `quadrature` for Sato–Tate.
        #[arg(long, value_enum)]
        method: Option<Method>,
        /// Series truncation.
        #[arg(long = "H")]
        h: Option<u32>,
        /// Fixed quadrature level (2^level points per axis) instead of
        /// adaptive doubling.
        #[arg(long)]
        level: Option<u32>,
    },
}

#[derive(Debug, Subcommand)]
pub enum HeckeCmd {
    /// A(p^κ) = S_κ(α).
    Coeff {
        #[command(flatten)]
        kappa: KappaArgs,
        /// Satake parameters `re,im;re,im;...`.
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        /// Threshold on log max|α_i| for the exceptional predicate.
        #[arg(long, default_value_t = glsieve::hecke::DEFAULT_EXCEPTIONAL_THRESHOLD)]
        threshold: f64,
    },
    /// Residuals of the |S_κ|² and |S_κ + S_κ^ι|² expansions at a tempered point.
    Identity {
        #[command(flatten)]
        kappa: KappaArgs,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
    },
    /// ∏_{p ≤ z} ∏_i (1 − α_{p,i}/p)^{-1}.
    Euler {
        #[arg(long)]
        z: f64,
        /// LocalData JSON file.
        #[arg(long)]
        data: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct WindowArgs {
    #[arg(long = "P")]
    pub p: f64,
    #[arg(long = "Q")]
    pub q: f64,
}

#[derive(Debug, Subcommand)]
pub enum SieveCmd {
    /// Table of a_j(n; P, Q).
    Aj {
        #[arg(long)]
        j: u32,
        #[command(flatten)]
        window: WindowArgs,
    },
    /// The four weighted a_j sums against their bounds.
    LemmaA {
        #[arg(long)]
        j: u32,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long)]
        d: f64,
    },
    /// Main term, its bound and the right-hand side of the moment inequality.
    Moment {
        #[command(flatten)]
        kappa: KappaArgs,
        #[arg(long)]
        j: u32,
        #[command(flatten)]
        window: WindowArgs,
        /// `const:c`, `const:re,im`, `signs:+-..` or `file:path.json`.
        #[arg(long, default_value = "const:1")]
        b: String,
        #[arg(long)]
        t: f64,
        #[arg(long = "L")]
        l: Option<f64>,
    },
}

#[derive(Debug, Subcommand)]
pub enum EnsembleCmd {
    /// Empirical moment over an i.i.d. Plancherel family.
    Run {
        #[command(flatten)]
        kappa: KappaArgs,
        #[arg(long)]
        j: u32,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long)]
        forms: usize,
        #[arg(long, default_value = "const:1")]
        b: String,
        #[arg(long, default_value_t = 1e6)]
        t: f64,
        #[arg(long = "L")]
        l: Option<f64>,
        /// Write `form,statistic` lines here.
        #[arg(long)]
        dump_csv: Option<PathBuf>,
    },
}
