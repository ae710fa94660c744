//! Numerical verification engine for the regularized relative trace formulas
//! governing first and second moments of central L-values of holomorphic
//! Hilbert modular forms.
//!
//! The geometric side (explicit main terms plus orbital sums weighted by
//! Legendre and Kummer functions) and the spectral side (moments of
//! `L(1/2, π)` weighted by `1/L(1, π, Ad)`) are computed independently and
//! compared.
//!
//! Modules:
//! - [`nfcore`]: totally real fields of degree ≤ 2, ideals, zeta data, lattice enumeration
//! - [`specfun`]: Legendre P/Q, the orbital weight `𝒫(u)`, ₁F₁, ₂F₁, Gamma, Bessel
//! - [`orbital2`]: geometric side of the second-moment identity
//! - [`orbital1`]: geometric side of the first-moment identity
//! - [`mollify`]: mollifier, triple Dirichlet series, moment main terms, proportions
//! - [`oracle`]: level-1 eigenforms and their L-values over ℚ
//! - [`harness`]: configuration, reports and suite orchestration

pub mod error;
pub mod harness;
pub mod mollify;
pub mod nfcore;
pub mod oracle;
pub mod orbital1;
pub mod orbital2;
pub mod specfun;
pub mod sum;

pub use error::{Error, Result};
