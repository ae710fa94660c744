//! Gauss and confluent hypergeometric functions for the parameter families
//! that appear in the orbital integrals.

use num_complex::Complex64;

use super::bessel::spherical_j;
use super::gamma::{beta_fn, ln_gamma};
use super::legendre::legendre_q;
use super::quad::composite_gl_complex;
use crate::{Error, Result};

/// Power series for ₂F₁(a, b; c; w), |w| < 1.
pub fn hyp2f1(a: f64, b: f64, c: f64, w: f64) -> Result<f64> {
    if w.abs() >= 1.0 {
        return Err(Error::Convergence(format!("2F1 series diverges at w = {w}")));
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    let max_terms = 2_000_000;
    for m in 0..max_terms {
        let mf = m as f64;
        term *= (a + mf) * (b + mf) / ((c + mf) * (mf + 1.0)) * w;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() && mf > a.abs() + b.abs() {
            return Ok(sum);
        }
    }
    Err(Error::Convergence(format!("2F1 series did not settle in {max_terms} terms")))
}

/// Relative residual of
/// `B(k/2,k/2)·₂F₁(k/2,k/2;k;1−z) = 2(1−z)^{−k/2}·Q_{k/2−1}((1+z)/(1−z))`.
pub fn gauss_2f1_check(k: u32, z: f64) -> Result<f64> {
    if k < 4 || k % 2 == 1 {
        return Err(Error::Domain(format!("weight must be even and >= 4, got {k}")));
    }
    if 1.0 - z >= 1.0 {
        return Err(Error::Convergence(format!("series argument 1 - z = {} is outside the unit disc", 1.0 - z)));
    }
    if z >= 1.0 {
        return Err(Error::Domain(format!("z must lie in (0, 1), got {z}")));
    }
    let h = k as f64 / 2.0;
    let lhs = beta_fn(h, h)? * hyp2f1(h, h, k as f64, 1.0 - z)?;
    let rhs = 2.0 * (1.0 - z).powf(-h) * legendre_q(k as usize / 2 - 1, (1.0 + z) / (1.0 - z))?;
    Ok((lhs - rhs).abs() / rhs.abs())
}

/// ₁F₁(a; b; z) by its power series (complex argument).
pub fn hyp1f1_series(a: f64, b: f64, z: Complex64) -> Complex64 {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for m in 0..100_000 {
        let mf = m as f64;
        term *= z * ((a + mf) / ((b + mf) * (mf + 1.0)));
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() && mf > z.norm() {
            break;
        }
    }
    sum
}

/// ₁F₁(k/2; k; ix) from the Euler integral
/// `Γ(k)/Γ(k/2)² ∫₀¹ e^{ixt} (t(1−t))^{k/2−1} dt`.
pub fn kummer_imag_integral(k: u32, x: f64) -> Complex64 {
    let h = k as f64 / 2.0;
    let ln_norm = ln_gamma(k as f64) - 2.0 * ln_gamma(h);
    let panels = 16 + (x.abs() / 2.0).ceil() as usize;
    let val = composite_gl_complex(
        |t| {
            let w = (ln_norm + (h - 1.0) * (t * (1.0 - t)).ln()).exp();
            Complex64::from_polar(w, x * t)
        },
        0.0,
        1.0,
        panels,
        20,
    );
    val
}

/// ₁F₁(k/2; k; ix) through the spherical Bessel reduction
/// `Γ(n+3/2) e^{iz} (z/2)^{−n−1/2} √(2z/π) j_n(z)`, z = x/2, n = k/2 − 1.
pub fn kummer_imag_bessel(k: u32, x: f64) -> Complex64 {
    if x == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let n = k as usize / 2 - 1;
    let z = x.abs() / 2.0;
    let nu = n as f64 + 0.5;
    let ln_mod = ln_gamma(nu + 1.0) - nu * (z / 2.0).ln() + 0.5 * (2.0 * z / std::f64::consts::PI).ln();
    let val = Complex64::from_polar(ln_mod.exp() * spherical_j(n, z), z);
    if x < 0.0 {
        val.conj()
    } else {
        val
    }
}

/// ₁F₁(k/2; k; ix) for even k ≥ 4 and real x.
pub fn kummer_imag(k: u32, x: f64) -> Complex64 {
    if x == 0.0 {
        Complex64::new(1.0, 0.0)
    } else if x.abs() <= 50.0 {
        kummer_imag_integral(k, x)
    } else {
        kummer_imag_bessel(k, x)
    }
}
