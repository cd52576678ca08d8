//! Uniformly convergent expansions of the generalized hypergeometric
//! functions `p-1Fp(a; b; -z²/4)` and `pFp(a; b; -z)`.
//!
//! Four expansions are provided, all built on Nørlund's coefficients
//! `g_n(a; b)`:
//!
//! | method | kernel | uniform on |
//! |--------|--------|------------|
//! | [`besselexp::bessel_expansion`] | `0F1(-; ψ+n; -z²/4)` | horizontal strips |
//! | [`besselexp::elementary_bessel_expansion`] | `sin z`, `cos z`, rational | horizontal strips |
//! | [`kummerexp::kummer_expansion`] | `M(a_p, ψ'+n, -z)` | right half-planes |
//! | [`kummerexp::elementary_kummer_expansion`] | `e^z`, rational | right half-planes |
//!
//! The direct series in [`refseries`] is the oracle, and [`errormodel`]
//! measures sup-errors over regions and fits decay rates.

pub mod besselexp;
pub mod cli;
pub mod error;
pub mod errormodel;
pub mod extended;
pub mod kummerexp;
pub mod norlund;
pub mod numkernel;
pub mod refseries;

pub use error::{Error, Result};
pub use num_complex::Complex64;
