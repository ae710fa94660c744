//! Central values L(1/2, f) and adjoint values L(1, f, Ad) by smoothed
//! approximate functional equations.

use std::f64::consts::PI;

use num_complex::Complex64;
use statrs::function::gamma::gamma_ur;

use crate::nfcore::arith::primes_up_to;
use crate::specfun::gamma::{ln_gamma, ln_gamma_complex};
use crate::specfun::quad::gauss_legendre;
use crate::{Error, Result};

/// Regularised upper incomplete gamma Γ(a, x)/Γ(a).
pub fn upper_gamma_regularized(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if a == a.round() && a >= 1.0 && a <= 400.0 {
        // e^{−x} Σ_{j<a} x^j/j!
        let lx = x.ln();
        let mut sum = 0.0;
        for j in 0..a as usize {
            sum += (j as f64 * lx - ln_gamma(j as f64 + 1.0) - x).exp();
        }
        return sum.min(1.0);
    }
    gamma_ur(a, x)
}

/// Global root number of a newform of weight k on Γ_0(N), N = 1 or prime.
pub fn root_number(k: u32, level: u64, lambda_q: Option<f64>) -> f64 {
    let base = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
    if level == 1 {
        base
    } else {
        let lq = lambda_q.unwrap_or(0.0) * (level as f64).sqrt();
        -base * lq.signum()
    }
}

/// L(s, f) for real s by the two-sided approximate functional equation with
/// scale parameter X. `lambda[n]` holds λ(n) for 1 ≤ n < lambda.len().
pub fn l_value_afe(lambda: &[f64], k: u32, level: u64, eps: f64, s: f64, x: f64) -> Result<f64> {
    let kappa = (k as f64 - 1.0) / 2.0;
    let a_cond = (level as f64).sqrt() / (2.0 * PI);
    let a1 = s + kappa;
    let a2 = 1.0 - s + kappa;
    let dual = eps * a_cond.powf(1.0 - 2.0 * s) * (ln_gamma(a2) - ln_gamma(a1)).exp();
    let mut sum = 0.0;
    let mut quiet = 0;
    let mut n = 1usize;
    loop {
        if n >= lambda.len() {
            return Err(Error::Coverage { need: n as u64, have: lambda.len() as u64 - 1 });
        }
        let nf = n as f64;
        let w1 = upper_gamma_regularized(a1, nf / (a_cond * x));
        let w2 = upper_gamma_regularized(a2, nf * x / a_cond);
        let term = lambda[n] * (nf.powf(-s) * w1 + dual * nf.powf(s - 1.0) * w2);
        sum += term;
        if w1 < 1e-18 && w2 < 1e-18 {
            quiet += 1;
            if quiet > 4 {
                break;
            }
        }
        n += 1;
    }
    Ok(sum)
}

/// L(1/2, f); exactly 0 when the root number is −1.
pub fn central_l(lambda: &[f64], k: u32, level: u64, eps: f64, x: f64) -> Result<f64> {
    if eps < 0.0 {
        return Ok(0.0);
    }
    l_value_afe(lambda, k, level, eps, 0.5, x)
}

/// λ(p^m) for m = 0..=top by the Hecke recursion at a good prime.
pub fn prime_power_lambdas(lp: f64, top: usize) -> Vec<f64> {
    let mut out = vec![1.0; top + 1];
    if top >= 1 {
        out[1] = lp;
    }
    for m in 2..=top {
        out[m] = lp * out[m - 1] - out[m - 2];
    }
    out
}

/// Dirichlet coefficients c(1..len−1) of L(s, Ad) from λ(p).
pub fn adjoint_coefficients(lambda: &[f64], level: u64, len: usize) -> Result<Vec<f64>> {
    let primes = primes_up_to(len.saturating_sub(1));
    if let Some(&p) = primes.last() {
        if p as usize >= lambda.len() {
            return Err(Error::Coverage { need: p, have: lambda.len() as u64 - 1 });
        }
    }
    let mut c = vec![1.0; len];
    if len > 0 {
        c[0] = 0.0;
    }
    for p in primes {
        let p = p as usize;
        // local coefficients c(p^e)
        let mut top = 0;
        let mut pe = p;
        while pe < len {
            top += 1;
            pe = match pe.checked_mul(p) {
                Some(v) => v,
                None => usize::MAX,
            };
        }
        let local: Vec<f64> = if p as u64 == level {
            (0..=top).map(|e| (p as f64).powi(-(e as i32))).collect()
        } else {
            let lam = prime_power_lambdas(lambda[p], 2 * top);
            (0..=top).map(|e| (0..=e / 2).map(|j| lam[2 * (e - 2 * j)]).sum()).collect()
        };
        let mut pe = p;
        let mut e = 1;
        while pe < len {
            let mut m = pe;
            while m < len {
                if (m / pe) % p != 0 {
                    c[m] *= local[e];
                }
                m += pe;
            }
            e += 1;
            pe = match pe.checked_mul(p) {
                Some(v) => v,
                None => break,
            };
        }
    }
    Ok(c)
}

/// Mellin kernel W_s(y) = (1/2πi) ∫_{(c)} γ(s+w) y^{−w} dw/w, divided by γ(1),
/// tabulated on a fixed quadrature grid.
struct AdjointKernel {
    nodes: Vec<f64>,
    // weight · γ(s+c+it)/γ(1)/(c+it)
    values: Vec<Complex64>,
    c: f64,
}

fn ln_gamma_factor_adjoint(s: Complex64, k: u32) -> Complex64 {
    // π^{−(s+1)/2} Γ((s+1)/2) · 2 (2π)^{−(s+k−1)} Γ(s+k−1)
    let km1 = k as f64 - 1.0;
    -(s + 1.0) / 2.0 * PI.ln() + ln_gamma_complex((s + 1.0) / 2.0) + 2f64.ln() - (s + km1) * (2.0 * PI).ln()
        + ln_gamma_complex(s + km1)
}

impl AdjointKernel {
    fn new(s: f64, k: u32) -> Self {
        let c = 2.0;
        let t_max = 40.0 + 2.0 * (k as f64).sqrt();
        let panels = 64;
        let order = 24;
        let (x, w) = gauss_legendre(order);
        let ln_g1 = ln_gamma_factor_adjoint(Complex64::new(1.0, 0.0), k);
        let h = t_max / panels as f64;
        let mut nodes = Vec::with_capacity(panels * order);
        let mut values = Vec::with_capacity(panels * order);
        for p in 0..panels {
            let a = p as f64 * h;
            for (xi, wi) in x.iter().zip(w.iter()) {
                let t = a + 0.5 * h * (xi + 1.0);
                let wpt = Complex64::new(c, t);
                let g = (ln_gamma_factor_adjoint(s + wpt, k) - ln_g1).exp();
                nodes.push(t);
                values.push(g / wpt * (0.5 * h * wi / PI));
            }
        }
        AdjointKernel { nodes, values, c }
    }

    fn eval(&self, y: f64) -> f64 {
        let ly = y.ln();
        let scale = (-self.c * ly).exp();
        let mut sum = 0.0;
        for (t, v) in self.nodes.iter().zip(self.values.iter()) {
            let ph = Complex64::from_polar(1.0, -t * ly);
            sum += (v * ph).re;
        }
        sum * scale
    }
}

/// L(1, f, Ad) for a newform on Γ_0(N), N = 1 or prime (finite L-function,
/// including the Euler factor at N).
pub fn adjoint_l(lambda: &[f64], k: u32, level: u64, x: f64) -> Result<f64> {
    let w1 = AdjointKernel::new(1.0, k);
    let w0 = AdjointKernel::new(0.0, k);
    let sqrt_cond = level as f64;
    let mut len = 64usize;
    loop {
        let coeffs = adjoint_coefficients(lambda, level, len)?;
        let mut sum = 0.0;
        let mut tail_small = false;
        for n in 1..len {
            let nf = n as f64;
            let a = w1.eval(nf / (x * sqrt_cond));
            let b = w0.eval(nf * x / sqrt_cond);
            sum += coeffs[n] * (a / nf + b / sqrt_cond);
            if n + 1 == len {
                tail_small = a.abs() < 1e-17 && b.abs() < 1e-17;
            }
        }
        if tail_small {
            return Ok(sum);
        }
        len *= 2;
        if len > 1 << 22 {
            return Err(Error::Convergence("adjoint series did not settle".into()));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tau_lambdas(len: usize) -> Vec<f64> {
        let d = crate::oracle::modforms::discriminant(len);
        d.iter()
            .enumerate()
            .map(|(n, t)| {
                if n == 0 {
                    0.0
                } else {
                    crate::oracle::modforms::ratio_to_f64(t, &num_bigint::BigInt::from(1)) / (n as f64).powf(5.5)
                }
            })
            .collect()
    }

    #[test]
    fn delta_central_value() {
        let lam = tau_lambdas(400);
        let v = central_l(&lam, 12, 1, 1.0, 1.0).unwrap();
        assert!((v - 0.792_122_838_646_030_6).abs() < 1e-12, "{v}");
        let v2 = central_l(&lam, 12, 1, 1.0, 2.0).unwrap();
        assert!((v - v2).abs() < 1e-12);
    }

    #[test]
    fn delta_adjoint_value() {
        let lam = tau_lambdas(400);
        let a = adjoint_l(&lam, 12, 1, 1.0).unwrap();
        assert!((a - 0.631_792_945_727_883_2).abs() < 1e-10, "{a}");
        let a2 = adjoint_l(&lam, 12, 1, 2.0).unwrap();
        assert!((a - a2).abs() < 1e-10);
    }

    #[test]
    fn off_center_matches_direct_sum() {
        let lam = tau_lambdas(1000);
        let s = 4.5;
        let afe = l_value_afe(&lam, 12, 1, 1.0, s, 1.0).unwrap();
        let direct: f64 = (1..lam.len()).map(|n| lam[n] * (n as f64).powf(-s)).sum();
        assert!((afe - direct).abs() < 1e-8 * direct.abs(), "{afe} vs {direct}");
    }

    #[test]
    fn incomplete_gamma_paths_agree() {
        for (a, x) in [(6.0, 3.0), (6.0, 20.0), (40.0, 35.0)] {
            let exact = upper_gamma_regularized(a, x);
            let st = gamma_ur(a, x);
            assert!((exact - st).abs() < 1e-12 * exact.max(1e-300), "{a} {x}");
        }
    }
}
