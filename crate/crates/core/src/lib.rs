//! Symmetric-function, spectral-measure and sieve-combinatorics machinery for
//! moments of Hecke eigenvalues of GL(n) Maass forms.
//!
//! The crate is organised bottom-up:
//!
//! - [`weights`]: weight vectors κ, their norms, the involution κ ↦ κ^ι and
//!   the bijection with reduced partitions.
//! - [`schur`]: degenerate Schur polynomials S_κ, evaluated by the
//!   bialternant formula and, independently, by a tableau sum.
//! - [`lr`]: exact Littlewood–Richardson products in the determinant-one basis.
//! - [`measures`]: the Sato–Tate and p-adic Plancherel measures, torus
//!   quadrature and the exact series for ∫S_κ dμ_p.
//! - [`hecke`]: Satake parameters, Fourier coefficients and Euler products.
//! - [`sieve`]: a_j(n; P, Q), the squarefree/squarefull pair split, the main
//!   term of the 2j-th moment and the explicit bounds around it.
//! - [`ensemble`]: synthetic i.i.d. Plancherel families and empirical moments.
//! - [`verify`]: the invariant suite behind `glsieve verify`.

pub mod ensemble;
pub mod error;
pub mod hecke;
pub mod json;
pub mod lr;
pub mod measures;
pub mod primes;
pub mod schur;
pub mod sieve;
pub mod summation;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Version tag carried by every JSON document this crate produces.
pub const SCHEMA_VERSION: u32 = 1;
