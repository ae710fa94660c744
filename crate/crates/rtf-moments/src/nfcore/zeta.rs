//! Dedekind zeta functions of ℚ and real quadratic fields.

use num_complex::Complex64;

use super::arith::{kronecker, primes_up_to};
use super::field::Field;
use crate::specfun::gamma::{digamma, gamma_complex};
use crate::specfun::zeta::{hurwitz_zeta, riemann_zeta, stieltjes_gamma1};
use crate::{Error, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Dirichlet L(s, χ_D) for the Kronecker character of a fundamental discriminant D > 1.
pub fn dirichlet_l(disc: i64, s: Complex64) -> Result<Complex64> {
    let d = disc as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for a in 1..disc {
        let chi = kronecker(disc, a as u64);
        if chi != 0 {
            sum += chi as f64 * hurwitz_zeta(s, a as f64 / d)?;
        }
    }
    Ok(sum * (-s * d.ln()).exp())
}

/// `(L(1, χ_D), L'(1, χ_D))` through digamma values and Stieltjes constants.
pub fn l_one_and_derivative(disc: i64) -> (f64, f64) {
    let d = disc as f64;
    let mut l1 = 0.0;
    let mut g1 = 0.0;
    for a in 1..disc {
        let chi = kronecker(disc, a as u64) as f64;
        if chi != 0.0 {
            let x = a as f64 / d;
            l1 -= chi * digamma(x);
            g1 += chi * stieltjes_gamma1(x);
        }
    }
    l1 /= d;
    let dl1 = -d.ln() * l1 - g1 / d;
    (l1, dl1)
}

/// ζ_F(s) for s ≠ 1.
pub fn dedekind_zeta(field: &Field, s: Complex64) -> Result<Complex64> {
    if (s - 1.0).norm() == 0.0 {
        return Err(Error::Pole("ζ_F at s = 1".into()));
    }
    let z = riemann_zeta(s)?;
    if field.is_rational() {
        Ok(z)
    } else {
        Ok(z * dirichlet_l(field.disc as i64, s)?)
    }
}

/// ζ_F(s) by its Euler product over rational primes below `bound` (Re s > 1).
pub fn dedekind_zeta_euler(field: &Field, s: Complex64, bound: usize) -> Complex64 {
    let mut prod = Complex64::new(1.0, 0.0);
    for p in primes_up_to(bound) {
        for pr in field.primes_above(p) {
            let np = pr.norm() as f64;
            prod /= 1.0 - (-s * np.ln()).exp();
        }
    }
    prod
}

/// The Laurent data `(R, c0)` with ζ_F(1+s) = R/s + c0 + O(s).
pub fn zeta_laurent(field: &Field) -> (f64, f64) {
    (field.residue, field.c0)
}

/// Local factor (1 − N^{−s})^{−1}; `None` stands for the unit ideal and gives 1.
pub fn local_zeta(nq: Option<u64>, s: Complex64) -> Result<Complex64> {
    match nq {
        None | Some(1) => Ok(Complex64::new(1.0, 0.0)),
        Some(n) => {
            let denom = 1.0 - (-s * (n as f64).ln()).exp();
            if denom.norm() < 1e-300 {
                return Err(Error::Pole(format!("local zeta factor at N = {n}, s = {s}")));
            }
            Ok(1.0 / denom)
        }
    }
}

/// Relative residual of ζ_F(1−s) = D^{s−1/2} [π^{−s} 2^{1−s} Γ(s) cos(πs/2)]^{d} ζ_F(s).
pub fn functional_equation_residual(field: &Field, s: Complex64) -> Result<f64> {
    let pi = std::f64::consts::PI;
    let lhs = dedekind_zeta(field, 1.0 - s)?;
    let local = (-s * pi.ln()).exp() * ((1.0 - s) * 2f64.ln()).exp() * gamma_complex(s) * (s * (pi / 2.0)).cos();
    let rhs = ((s - 0.5) * (field.disc as f64).ln()).exp() * local.powi(field.degree as i32) * dedekind_zeta(field, s)?;
    Ok((lhs - rhs).norm() / rhs.norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basel() {
        let z = dedekind_zeta(&Field::rational(), Complex64::new(2.0, 0.0)).unwrap();
        assert!((z.re - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-14);
    }

    #[test]
    fn residue_matches_l_one() {
        for d in [2u64, 5, 13, 17] {
            let f = Field::real_quadratic(d).unwrap();
            let (l1, _) = l_one_and_derivative(f.disc as i64);
            assert!((l1 - f.residue).abs() < 1e-13, "d={d}: {l1} vs {}", f.residue);
        }
    }

    #[test]
    fn functional_equation() {
        for spec in ["Q", "Q(sqrt5)", "Q(sqrt2)"] {
            let f = Field::from_spec(spec).unwrap();
            let r = functional_equation_residual(&f, Complex64::new(2.0, 0.3)).unwrap();
            assert!(r < 1e-10, "{spec}: {r}");
        }
    }

    #[test]
    fn local_factors() {
        assert!((local_zeta(Some(2), Complex64::new(1.0, 0.0)).unwrap().re - 2.0).abs() < 1e-15);
        assert!((local_zeta(Some(2), Complex64::new(2.0, 0.0)).unwrap().re - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(local_zeta(None, Complex64::new(7.0, 1.0)).unwrap(), Complex64::new(1.0, 0.0));
        assert!(local_zeta(Some(2), Complex64::new(0.0, 0.0)).is_err());
    }
}
