//! Bessel functions of integer and half-integer order.

use std::f64::consts::PI;

use crate::{Error, Result};

/// Spherical Bessel function j_n(z) for real z ≥ 0.
pub fn spherical_j(n: usize, z: f64) -> f64 {
    if z == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    if z < 1.0 {
        return spherical_series(n, z);
    }
    if z > n as f64 {
        let mut j_prev = z.sin() / z;
        if n == 0 {
            return j_prev;
        }
        let mut j = z.sin() / (z * z) - z.cos() / z;
        for m in 1..n {
            let next = (2 * m + 1) as f64 / z * j - j_prev;
            j_prev = j;
            j = next;
        }
        return j;
    }
    spherical_miller(n, z)
}

fn spherical_series(n: usize, z: f64) -> f64 {
    let mut lead = 1.0;
    for m in 1..=n {
        lead *= z / (2 * m + 1) as f64;
    }
    let w = -0.5 * z * z;
    let mut term = 1.0;
    let mut sum = 1.0;
    for m in 1..60 {
        term *= w / (m as f64 * (2 * n + 2 * m + 1) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    lead * sum
}

fn spherical_miller(n: usize, z: f64) -> f64 {
    let big = n.max(z.ceil() as usize);
    let top = big + 30 + (10.0 * (big as f64).sqrt()) as usize;
    let mut y_next = 0.0;
    let mut y = 1.0;
    let mut norm = (2 * top + 1) as f64 * y * y;
    let mut y_n = 0.0;
    for m in (1..=top).rev() {
        let prev = (2 * m + 1) as f64 / z * y - y_next;
        y_next = y;
        y = prev;
        norm += (2 * m - 1) as f64 * y * y;
        if m - 1 == n {
            y_n = y;
        }
        if y.abs() > 1e120 {
            y *= 1e-120;
            y_next *= 1e-120;
            y_n *= 1e-120;
            norm *= 1e-240;
        }
    }
    // y ~ j_0, y_next ~ j_1; fix the global sign from whichever is larger
    let scale = norm.sqrt();
    let j0 = z.sin() / z;
    let j1 = z.sin() / (z * z) - z.cos() / z;
    let sign = if j0.abs() >= j1.abs() {
        (j0 * y).signum()
    } else {
        (j1 * y_next).signum()
    };
    sign * y_n / scale
}

/// Integer-order J_n(x) by Miller's algorithm with J_0 + 2 Σ J_{2m} = 1.
fn bessel_j_int(n: usize, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let sign = if x < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
    let x = x.abs();
    let big = n.max(x.ceil() as usize);
    let mut top = big + 30 + (10.0 * (big as f64).sqrt()) as usize;
    if top % 2 == 1 {
        top += 1;
    }
    let mut y_next = 0.0;
    let mut y = 1.0;
    let mut norm = 0.0;
    let mut y_n = if top == n { y } else { 0.0 };
    for m in (1..=top).rev() {
        let prev = 2.0 * m as f64 / x * y - y_next;
        y_next = y;
        y = prev;
        if (m - 1) % 2 == 0 && m - 1 > 0 {
            norm += 2.0 * y;
        }
        if m - 1 == n {
            y_n = y;
        }
        if y.abs() > 1e120 {
            y *= 1e-120;
            y_next *= 1e-120;
            y_n *= 1e-120;
            norm *= 1e-120;
        }
    }
    norm += y;
    sign * y_n / norm
}

/// J_ν(x) for ν with 2ν a nonnegative integer.
pub fn bessel_j(order: f64, x: f64) -> Result<f64> {
    let twice = 2.0 * order;
    if order < 0.0 || twice != twice.round() {
        return Err(Error::Domain(format!("bessel_j supports orders in (1/2)Z>=0, got {order}")));
    }
    if order == order.round() {
        return Ok(bessel_j_int(order as usize, x));
    }
    if x < 0.0 {
        return Err(Error::Domain("half-integer order needs x >= 0".into()));
    }
    let n = (order - 0.5).round() as usize;
    Ok((2.0 * x / PI).sqrt() * spherical_j(n, x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_order_closed_form() {
        let x = 1.0;
        let exact = (2.0 / (PI * x)).sqrt() * x.sin();
        assert!((bessel_j(0.5, x).unwrap() - exact).abs() < 1e-15);
    }

    #[test]
    fn spherical_j2_closed_form() {
        for z in [0.3f64, 2.0, 3.5, 9.42477796, 25.0] {
            let exact = (3.0 / (z * z) - 1.0) * z.sin() / z - 3.0 * z.cos() / (z * z);
            assert!((spherical_j(2, z) - exact).abs() < 1e-14, "z={z}");
        }
    }

    #[test]
    fn methods_agree_across_regimes() {
        for n in [3usize, 10, 25] {
            for z in [0.9, 1.1, 5.0, 12.0, 24.9] {
                let miller = spherical_miller(n, z);
                let series = spherical_series(n, z);
                if z < 8.0 {
                    assert!((miller - series).abs() <= 1e-12 * series.abs().max(1e-300), "n={n} z={z}");
                }
            }
        }
    }

    #[test]
    fn integer_order_values() {
        // J_0(1), J_1(1), J_5(10) reference values
        assert!((bessel_j(0.0, 1.0).unwrap() - 0.7651976865579666).abs() < 1e-15);
        assert!((bessel_j(1.0, 1.0).unwrap() - 0.4400505857449335).abs() < 1e-15);
        assert!((bessel_j(5.0, 10.0).unwrap() - (-0.2340615281867936)).abs() < 1e-14);
    }

    #[test]
    fn rejects_general_orders() {
        assert!(bessel_j(0.3, 1.0).is_err());
    }
}
