//! Legendre functions of the first and second kind and the orbital weight 𝒫.

use crate::specfun::quad;
use crate::{Error, Result};

/// P_n(x) by the three-term recurrence.
pub fn legendre_p(n: usize, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut p_prev = 1.0;
    let mut p = x;
    for j in 1..n {
        let next = ((2 * j + 1) as f64 * x * p - j as f64 * p_prev) / (j + 1) as f64;
        p_prev = p;
        p = next;
    }
    p
}

/// Q_n(x) for x > 1 by backward (Miller) recurrence normalised with
/// Q_0(x) = artanh(1/x).
pub fn legendre_q(n: usize, x: f64) -> Result<f64> {
    if !(x > 1.0) {
        return Err(Error::Domain(format!("legendre_q needs x > 1, got {x}")));
    }
    Ok(q_backward(n, x))
}

/// Q_n(x) for |x| > 1, using Q_n(-x) = (-1)^{n+1} Q_n(x).
pub fn legendre_q_outer(n: usize, x: f64) -> Result<f64> {
    if x < -1.0 {
        let q = legendre_q(n, -x)?;
        Ok(if n % 2 == 0 { -q } else { q })
    } else {
        legendre_q(n, x)
    }
}

fn q_backward(n: usize, x: f64) -> f64 {
    let q0 = (1.0 / x).atanh();
    if n == 0 {
        return q0;
    }
    let ln_r = (x + (x * x - 1.0).sqrt()).ln();
    let extra = ((40.0 / ln_r).ceil() as usize).min(4_000_000);
    let top = n + extra + 16;
    let mut y_next = 0.0; // y_{j+1}
    let mut y = 1e-300; // y_j
    let mut y_n = if top == n { y } else { 0.0 };
    for j in (1..=top).rev() {
        // j y_{j-1} = (2j+1) x y_j - (j+1) y_{j+1}
        let y_prev = ((2 * j + 1) as f64 * x * y - (j + 1) as f64 * y_next) / j as f64;
        y_next = y;
        y = y_prev;
        if j - 1 == n {
            y_n = y;
        }
        if y.abs() > 1e250 {
            y *= 1e-250;
            y_next *= 1e-250;
            y_n *= 1e-250;
        }
    }
    q0 * (y_n / y)
}

/// Q_n(x) for x > 1 by adaptive quadrature of
/// Q_n(x) = 2^{-n-1} ∫_{-1}^{1} (1-t²)^n / (x-t)^{n+1} dt.
pub fn legendre_q_quadrature(n: usize, x: f64) -> Result<f64> {
    if !(x > 1.0) {
        return Err(Error::Domain(format!("legendre_q needs x > 1, got {x}")));
    }
    let f = |t: f64| {
        let d = x - t;
        ((1.0 - t * t) / (2.0 * d)).powi(n as i32) / (2.0 * d)
    };
    let crude = quad::integrate(f, -1.0, 1.0, f64::INFINITY);
    let tol = 1e-14 * crude.abs().max(f64::MIN_POSITIVE);
    // split near t = 1 where the integrand concentrates as x -> 1
    let split = 1.0 - (x - 1.0).min(1.0);
    Ok(quad::integrate(f, -1.0, split, tol) + quad::integrate(f, split, 1.0, tol))
}

fn check_curly_args(u: f64, k: u32) -> Result<()> {
    if k < 4 || k % 2 == 1 {
        return Err(Error::Domain(format!("weight {k} must be even and >= 4")));
    }
    if u == 0.0 || u == -1.0 {
        return Err(Error::Domain(format!("𝒫 has a logarithmic singularity at u = {u}")));
    }
    Ok(())
}

/// The archimedean orbital weight 𝒫_v(u) at one real place of weight k.
///
/// For |2u+1| > 1 this is 2 Q_{k/2-1}(2u+1). For |2u+1| ≤ 1 it is
/// -[P_{k/2-1}(2u+1) log|u/(u+1)| + 2 Σ_{j=1}^{⌊k/4⌋} c_j P_{k/2-2j}(2u+1)],
/// i.e. twice the Ferrers function of the second kind on the cut.
pub fn curly_p(u: f64, k: u32) -> Result<f64> {
    curly_p_from(u, k, 1)
}

/// Same as [`curly_p`] but with the finite sum started at j = 0.
pub fn curly_p_literal(u: f64, k: u32) -> Result<f64> {
    curly_p_from(u, k, 0)
}

fn curly_p_from(u: f64, k: u32, j0: u32) -> Result<f64> {
    check_curly_args(u, k)?;
    let x = 2.0 * u + 1.0;
    let n = (k / 2 - 1) as usize;
    if x.abs() > 1.0 {
        return Ok(2.0 * legendre_q_outer(n, x)?);
    }
    let kf = k as f64;
    let mut s = legendre_p(n, x) * (u / (u + 1.0)).abs().ln();
    for j in j0..=k / 4 {
        let jf = j as f64;
        let c = (kf - 4.0 * jf + 1.0) / ((2.0 * jf - 1.0) * (kf / 2.0 - jf));
        s += 2.0 * c * legendre_p((k / 2 - 2 * j) as usize, x);
    }
    Ok(-s)
}

/// Ferrers function of the second kind Q_n(x), |x| < 1, by forward recurrence.
pub fn ferrers_q(n: usize, x: f64) -> f64 {
    let q0 = 0.5 * ((1.0 + x) / (1.0 - x)).ln();
    if n == 0 {
        return q0;
    }
    let mut q_prev = q0;
    let mut q = x * q0 - 1.0;
    for j in 1..n {
        let next = ((2 * j + 1) as f64 * x * q - j as f64 * q_prev) / (j + 1) as f64;
        q_prev = q;
        q = next;
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_small_cases() {
        assert_eq!(legendre_p(0, 0.77), 1.0);
        assert_eq!(legendre_p(1, 0.3), 0.3);
        assert!((legendre_p(2, 0.5) - (-0.125)).abs() < 1e-15);
    }

    #[test]
    fn q0_closed_form() {
        assert!((legendre_q(0, 3.0).unwrap() - 0.5 * 2f64.ln()).abs() < 1e-15);
        assert!((legendre_q_quadrature(0, 3.0).unwrap() - 0.5 * 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn q1_closed_form() {
        // Q_1(x) = x Q_0(x) - 1, summed as a series when the difference cancels
        for x in [1.01f64, 1.5, 3.0, 40.0] {
            let exact = if x > 2.0 {
                (1..40).map(|j| x.powi(-2 * j) / (2 * j + 1) as f64).sum::<f64>()
            } else {
                x * (1.0 / x).atanh() - 1.0
            };
            let q = legendre_q(1, x).unwrap();
            assert!((q - exact).abs() < 1e-13 * exact.abs(), "{x}: {q} vs {exact}");
        }
    }

    #[test]
    fn q_dual_methods_agree() {
        for n in [0, 1, 5, 12, 30] {
            for x in [1.05, 1.5, 3.0, 9.0] {
                let a = legendre_q(n, x).unwrap();
                let b = legendre_q_quadrature(n, x).unwrap();
                assert!((a - b).abs() <= 1e-10 * a.abs(), "n={n} x={x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn q_rejects_inner_points() {
        assert!(legendre_q(3, 1.0).is_err());
        assert!(legendre_q(3, 0.2).is_err());
    }

    #[test]
    fn curly_p_outer_branch() {
        let v = curly_p(1.0, 12).unwrap();
        assert_eq!(v, 2.0 * legendre_q(5, 3.0).unwrap());
    }

    #[test]
    fn curly_p_inner_branch_is_twice_ferrers() {
        for k in [4u32, 8, 12, 14, 20] {
            for u in [-0.5, -0.1, -0.73] {
                let x = 2.0 * u + 1.0;
                let f = 2.0 * ferrers_q((k / 2 - 1) as usize, x);
                let c = curly_p(u, k).unwrap();
                assert!((c - f).abs() < 1e-12 * f.abs().max(1.0), "k={k} u={u}: {c} vs {f}");
            }
        }
    }

    #[test]
    fn curly_p_midpoint_literal_sum() {
        // u = -1/2: the log term vanishes and only the finite sum survives
        let k = 8;
        let direct: f64 = (0..=2)
            .map(|j| {
                let jf = j as f64;
                (9.0 - 4.0 * jf) / ((2.0 * jf - 1.0) * (4.0 - jf)) * legendre_p(4 - 2 * j, 0.0)
            })
            .sum();
        assert!((curly_p_literal(-0.5, k).unwrap() + 2.0 * direct).abs() < 1e-14);
    }

    #[test]
    fn curly_p_singular_points() {
        assert!(curly_p(0.0, 12).is_err());
        assert!(curly_p(-1.0, 12).is_err());
        assert!(curly_p(0.5, 7).is_err());
    }
}
