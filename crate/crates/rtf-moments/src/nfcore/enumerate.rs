//! Enumeration of field elements of a fractional ideal inside a box of
//! real embeddings.

use num_traits::Zero;

use super::arith::Q;
use super::field::{Field, FieldElement};
use super::ideal::IdealData;
use crate::{Error, Result};

/// Default element cap.
pub const DEFAULT_CAP: usize = 5_000_000;

/// Nonzero u ∈ 𝔞 with lo_v ≤ u_v ≤ hi_v for every real place, sorted by
/// |N(u)| and then coordinates.
pub fn enumerate_in_box(field: &Field, a: &IdealData, lo: &[f64], hi: &[f64], cap: usize) -> Result<Vec<FieldElement>> {
    if lo.len() != field.degree || hi.len() != field.degree {
        return Err(Error::Config("box dimension does not match field degree".into()));
    }
    let gen = a.generator(field)?;
    let mut out = Vec::new();
    if field.is_rational() {
        let r = gen.coords[0];
        let rf = r.numer().abs() as f64 / *r.denom() as f64;
        let x_lo = (lo[0] / rf).floor() as i128 - 1;
        let x_hi = (hi[0] / rf).ceil() as i128 + 1;
        if (x_hi - x_lo) as usize > cap {
            return Err(Error::CapExceeded { cap });
        }
        let step = if r < Q::zero() { -r } else { r };
        for x in x_lo..=x_hi {
            if x == 0 {
                continue;
            }
            let u = step * Q::from_integer(x);
            let uf = *u.numer() as f64 / *u.denom() as f64;
            if uf >= lo[0] && uf <= hi[0] {
                out.push(field.from_rational(u));
            }
        }
    } else {
        let w = field.element(Q::zero(), Q::from_integer(1));
        let b1 = gen.clone();
        let b2 = field.mul(&gen, &w);
        let m = [[b1.embeddings[0], b2.embeddings[0]], [b1.embeddings[1], b2.embeddings[1]]];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        // x = (m11 s0 − m01 s1)/det over the corners of the box
        let corners = [(lo[0], lo[1]), (lo[0], hi[1]), (hi[0], lo[1]), (hi[0], hi[1])];
        let xs: Vec<f64> = corners.iter().map(|&(s0, s1)| (m[1][1] * s0 - m[0][1] * s1) / det).collect();
        let x_lo = xs.iter().cloned().fold(f64::INFINITY, f64::min).floor() as i128 - 1;
        let x_hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max).ceil() as i128 + 1;
        let slack = 1e-9;
        for x in x_lo..=x_hi {
            let xf = x as f64;
            let mut y_lo = f64::NEG_INFINITY;
            let mut y_hi = f64::INFINITY;
            for v in 0..2 {
                let (a0, b0) = ((lo[v] - m[v][0] * xf) / m[v][1], (hi[v] - m[v][0] * xf) / m[v][1]);
                let (l, h) = if a0 <= b0 { (a0, b0) } else { (b0, a0) };
                y_lo = y_lo.max(l);
                y_hi = y_hi.min(h);
            }
            if y_lo > y_hi + slack {
                continue;
            }
            for y in (y_lo - slack).floor() as i128..=(y_hi + slack).ceil() as i128 {
                if x == 0 && y == 0 {
                    continue;
                }
                let u = field.add(
                    &field.mul(&b1, &field.from_int(x)),
                    &field.mul(&b2, &field.from_int(y)),
                );
                let inside = (0..2).all(|v| {
                    let tol = 1e-12 * (1.0 + lo[v].abs().max(hi[v].abs()));
                    u.embeddings[v] >= lo[v] - tol && u.embeddings[v] <= hi[v] + tol
                });
                if inside {
                    out.push(u);
                    if out.len() > cap {
                        return Err(Error::CapExceeded { cap });
                    }
                }
            }
        }
    }
    if out.len() > cap {
        return Err(Error::CapExceeded { cap });
    }
    sort_elements(field, &mut out);
    Ok(out)
}

/// Nonzero u ∈ 𝔞 with |u_v| ≤ B_v for every real place.
pub fn enumerate_elements(field: &Field, a: &IdealData, bounds: &[f64], cap: usize) -> Result<Vec<FieldElement>> {
    if bounds.iter().any(|&b| b <= 0.0) {
        return Err(Error::Config("box bounds must be positive".into()));
    }
    let lo: Vec<f64> = bounds.iter().map(|b| -b).collect();
    enumerate_in_box(field, a, &lo, bounds, cap)
}

/// Deterministic order: by |N(u)|, then by coordinates.
pub fn sort_elements(field: &Field, elems: &mut [FieldElement]) {
    elems.sort_by(|x, y| {
        let nx = field.norm(x);
        let ny = field.norm(y);
        let (nx, ny) = (if nx < Q::zero() { -nx } else { nx }, if ny < Q::zero() { -ny } else { ny });
        nx.cmp(&ny).then_with(|| x.cmp(y))
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thirds() {
        let q = Field::rational();
        let a = IdealData::parse(&q, "3^-1").unwrap();
        let els = enumerate_elements(&q, &a, &[1.0], 100).unwrap();
        let mut vals: Vec<Q> = els.iter().map(|u| u.coords[0]).collect();
        vals.sort();
        let want: Vec<Q> = [-3, -2, -1, 1, 2, 3].iter().map(|&k| Q::new(k, 3)).collect();
        assert_eq!(vals, want);
    }

    #[test]
    fn golden_box() {
        let f = Field::real_quadratic(5).unwrap();
        let els = enumerate_elements(&f, &IdealData::unit(), &[1.1, 1.1], 100).unwrap();
        // ±1 and ±φ^{-1}, ±φ̄^{-1} style units with both conjugates ≤ 1.1
        for u in &els {
            assert!(u.embeddings.iter().all(|e| e.abs() <= 1.1 + 1e-12));
        }
        let norms: Vec<Q> = els.iter().map(|u| f.norm(u)).collect();
        assert!(norms.iter().all(|n| n.numer().abs() == 1 && *n.denom() == 1));
        assert_eq!(els.len(), 2);
    }

    #[test]
    fn cap_is_enforced() {
        let q = Field::rational();
        let a = IdealData::parse(&q, "7^-1").unwrap();
        assert!(matches!(
            enumerate_elements(&q, &a, &[1e6], 1000),
            Err(Error::CapExceeded { .. })
        ));
    }
}
