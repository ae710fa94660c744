//! Majorants for Legendre functions and the orbital weight, used both by the
//! truncation logic and by the property suites.

use std::f64::consts::PI;

use super::gamma::ln_gamma;

/// Shell index m of u: 0 when |2u+1| ≤ 1, otherwise 2^{m−1} < |2u+1| ≤ 2^m.
pub fn shell_index(u: f64) -> u32 {
    let r = (2.0 * u + 1.0).abs();
    if r <= 1.0 {
        return 0;
    }
    let mut m = 1;
    while r > (2f64).powi(m as i32) {
        m += 1;
    }
    m
}

/// `√(2/π) n^{−1/2} (1−x²)^{−1/4}`, the uniform majorant for `|P_n(x)|`.
pub fn legendre_p_majorant(n: usize, x: f64) -> f64 {
    (2.0 / PI).sqrt() / (n as f64).sqrt() * (1.0 - x * x).powf(-0.25)
}

/// Inner-branch shape `k^{−1/2} |u(u+1)|^{−1/4−ε}`.
pub fn inner_shape(u: f64, k: u32, eps: f64) -> f64 {
    (k as f64).powf(-0.5) * (u * (u + 1.0)).abs().powf(-0.25 - eps)
}

/// Near-boundary shape `|u(u+1)|^{−1/2} k^{−1/2}`, for 1 < |2u+1| ≤ 2.
pub fn near_shape(u: f64, k: u32) -> f64 {
    (u * (u + 1.0)).abs().powf(-0.5) * (k as f64).powf(-0.5)
}

/// Outer-shell shape `2^{−k/2} k^{−1/2} |u(u+1)|^{−1/2} (2^{m−1}−1)^{−(k/2−1)}`, m ≥ 2.
pub fn shell_shape(u: f64, k: u32, m: u32) -> f64 {
    let h = k as f64 / 2.0;
    let base = (2f64).powi(m as i32 - 1) - 1.0;
    (-h * 2f64.ln() - 0.5 * (k as f64).ln() - 0.5 * (u * (u + 1.0)).abs().ln() - (h - 1.0) * base.ln()).exp()
}

/// Explicit majorant `2^{1−k/2} √π Γ(k/2)/Γ((k+1)/2) / (2^{m−1}−1)^{k/2}` of `|𝒫(u)|`
/// on shell m ≥ 2.
pub fn shell_majorant(k: u32, m: u32) -> f64 {
    let h = k as f64 / 2.0;
    let base = (2f64).powi(m as i32 - 1) - 1.0;
    let ln = (1.0 - h) * 2f64.ln() + 0.5 * PI.ln() + ln_gamma(h) - ln_gamma(h + 0.5) - h * base.ln();
    ln.exp()
}

/// Largest observed ratio `value / shape`; a fitted implied constant.
pub fn fit_constant<I: IntoIterator<Item = (f64, f64)>>(samples: I) -> f64 {
    samples.into_iter().map(|(v, s)| v.abs() / s).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::legendre::curly_p;

    #[test]
    fn shells() {
        assert_eq!(shell_index(-0.5), 0);
        assert_eq!(shell_index(0.0 + 1e-9), 1);
        assert_eq!(shell_index(1.0), 2);
        assert_eq!(shell_index(-2.0), 2);
        assert_eq!(shell_index(3.0), 3);
    }

    #[test]
    fn shell_majorant_dominates() {
        for k in [4u32, 12, 24] {
            for u in [1.0, 1.6, 3.0, 7.5, -2.0, -4.2, -9.0] {
                let m = shell_index(u);
                assert!(curly_p(u, k).unwrap().abs() <= shell_majorant(k, m), "k={k} u={u}");
            }
        }
    }
}
