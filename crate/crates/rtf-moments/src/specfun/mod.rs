//! Special functions for the orbital integrals.

pub mod bessel;
pub mod bounds;
pub mod gamma;
pub mod hyper;
pub mod legendre;
pub mod quad;
pub mod zeta;

pub use bessel::{bessel_j, spherical_j};
pub use gamma::{beta_fn, digamma, gamma_complex, gamma_fn, ln_gamma, ln_gamma_complex};
pub use hyper::{gauss_2f1_check, hyp1f1_series, hyp2f1, kummer_imag};
pub use legendre::{curly_p, curly_p_literal, ferrers_q, legendre_p, legendre_q, legendre_q_outer};
pub use zeta::{hurwitz_zeta, riemann_zeta};
