//! Hurwitz and Riemann zeta functions by Euler–Maclaurin summation.

use num_complex::Complex64;

use crate::{Error, Result};

// B_{2j} / (2j)!, j = 1..=15
const B2J_OVER_FACT: [f64; 15] = [
    0.083333333333333333333,
    -0.0013888888888888888889,
    0.000033068783068783068783,
    -8.2671957671957671958e-7,
    2.0876756987868098979e-8,
    -5.2841901386874931848e-10,
    1.3382536530684678833e-11,
    -3.3896802963225828668e-13,
    8.5860620562778445641e-15,
    -2.174868698558061873e-16,
    5.5090028283602295152e-18,
    -1.3954464685812523341e-19,
    3.5347070396294674717e-21,
    -8.9535174270375468504e-23,
    2.2679524523376830603e-24,
];

/// Hurwitz zeta ζ(s, a) for a > 0 and s ≠ 1.
pub fn hurwitz_zeta(s: Complex64, a: f64) -> Result<Complex64> {
    if a <= 0.0 {
        return Err(Error::Domain(format!("Hurwitz parameter must be positive, got {a}")));
    }
    if (s - 1.0).norm() < 1e-300 {
        return Err(Error::Pole("s = 1".into()));
    }
    let n_terms = 24 + (1.2 * s.norm()).ceil() as usize;
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 0..n_terms {
        sum += Complex64::new(n as f64 + a, 0.0).powc(-s);
    }
    let x = n_terms as f64 + a;
    let lx = x.ln();
    let x_pow = |e: Complex64| (e * lx).exp();
    sum += x_pow(1.0 - s) / (s - 1.0);
    sum += 0.5 * x_pow(-s);
    // rising factor s(s+1)...(s+2j-2) times x^{-s-2j+1}
    let mut rising = s;
    let mut xp = x_pow(-s - 1.0);
    for (j, c) in B2J_OVER_FACT.iter().enumerate() {
        let term = *c * rising * xp;
        sum += term;
        if term.norm() < 1e-18 * sum.norm() {
            break;
        }
        let m = 2.0 * (j as f64 + 1.0);
        rising *= (s + m - 1.0) * (s + m);
        xp /= x * x;
    }
    Ok(sum)
}

/// Riemann zeta ζ(s), s ≠ 1.
pub fn riemann_zeta(s: Complex64) -> Result<Complex64> {
    hurwitz_zeta(s, 1.0)
}

/// Generalised Stieltjes constant γ₁(a), the coefficient in
/// `ζ(s, a) = 1/(s−1) + γ₀(a) − γ₁(a)(s−1) + …`.
pub fn stieltjes_gamma1(a: f64) -> f64 {
    let n_terms = 40;
    let f = |x: f64| x.ln() / x;
    let mut sum = 0.0;
    for n in 0..n_terms {
        sum += f(n as f64 + a);
    }
    let x = n_terms as f64 + a;
    let lx = x.ln();
    sum += -0.5 * lx * lx + 0.5 * f(x);
    // derivative f^{(m)}(x) = (−1)^m m! (ln x − H_m) / x^{m+1}
    let mut fact = 1.0;
    let mut harmonic = 1.0;
    let mut m = 1usize;
    for c in B2J_OVER_FACT.iter() {
        let deriv = if m % 2 == 0 { 1.0 } else { -1.0 } * fact * (lx - harmonic) / x.powi(m as i32 + 1);
        sum -= c * deriv;
        // advance m by two
        fact *= (m + 1) as f64 * (m + 2) as f64;
        harmonic += 1.0 / (m + 1) as f64 + 1.0 / (m + 2) as f64;
        m += 2;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn basel_and_zeta4() {
        let z2 = riemann_zeta(Complex64::new(2.0, 0.0)).unwrap();
        assert!((z2.re - PI * PI / 6.0).abs() < 1e-14);
        let z4 = riemann_zeta(Complex64::new(4.0, 0.0)).unwrap();
        assert!((z4.re - PI.powi(4) / 90.0).abs() < 1e-14);
    }

    #[test]
    fn negative_and_critical_values() {
        let zm1 = riemann_zeta(Complex64::new(-1.0, 0.0)).unwrap();
        assert!((zm1.re + 1.0 / 12.0).abs() < 1e-13);
        let zh = riemann_zeta(Complex64::new(0.5, 0.0)).unwrap();
        assert!((zh.re + 1.4603545088095868).abs() < 1e-13);
        // first nontrivial zero
        let z = riemann_zeta(Complex64::new(0.5, 14.134725141734693)).unwrap();
        assert!(z.norm() < 1e-11);
    }

    #[test]
    fn hurwitz_half_is_scaled_riemann() {
        let s = Complex64::new(2.5, 1.0);
        let h = hurwitz_zeta(s, 0.5).unwrap();
        let r = riemann_zeta(s).unwrap() * ((Complex64::new(2.0, 0.0)).powc(s) - 1.0);
        assert!((h - r).norm() < 1e-13 * r.norm());
    }

    #[test]
    fn stieltjes_one() {
        assert!((stieltjes_gamma1(1.0) + 0.072_815_845_483_676_72).abs() < 1e-14);
    }

    #[test]
    fn pole_is_an_error() {
        assert!(riemann_zeta(Complex64::new(1.0, 0.0)).is_err());
    }
}
