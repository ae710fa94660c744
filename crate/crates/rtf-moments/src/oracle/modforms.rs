//! Exact q-expansions of level-one modular forms and the Hecke eigenbasis of
//! the cusp space.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

pub type Series = Vec<BigInt>;

/// dim S_k(SL_2(ℤ)) for even k ≥ 0.
pub fn cusp_dimension(k: u32) -> usize {
    if k % 2 == 1 || k < 12 {
        return 0;
    }
    let base = (k / 12) as usize;
    if k % 12 == 2 {
        base - 1
    } else {
        base
    }
}

fn divisor_power_sums(len: usize, power: u32) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for d in 1..len {
        let dp = BigInt::from(d).pow(power);
        let mut m = d;
        while m < len {
            out[m] += &dp;
            m += d;
        }
    }
    out
}

/// E_4 = 1 + 240 Σ σ_3(n) qⁿ, truncated to `len` coefficients.
pub fn eisenstein_e4(len: usize) -> Series {
    let mut s: Series = divisor_power_sums(len, 3).into_iter().map(|x| x * 240).collect();
    s[0] = BigInt::one();
    s
}

/// E_6 = 1 − 504 Σ σ_5(n) qⁿ.
pub fn eisenstein_e6(len: usize) -> Series {
    let mut s: Series = divisor_power_sums(len, 5).into_iter().map(|x| x * -504).collect();
    s[0] = BigInt::one();
    s
}

/// Truncated product of two series.
pub fn series_mul(a: &Series, b: &Series, len: usize) -> Series {
    let mut out = vec![BigInt::zero(); len];
    let a_nz: Vec<(usize, &BigInt)> = a.iter().enumerate().take(len).filter(|(_, x)| !x.is_zero()).collect();
    for (i, ai) in a_nz {
        for (j, bj) in b.iter().enumerate().take(len - i) {
            if !bj.is_zero() {
                out[i + j] += ai * bj;
            }
        }
    }
    out
}

/// Δ = (E_4³ − E_6²)/1728.
pub fn discriminant(len: usize) -> Series {
    let e4 = eisenstein_e4(len);
    let e6 = eisenstein_e6(len);
    let e4c = series_mul(&series_mul(&e4, &e4, len), &e4, len);
    let e6s = series_mul(&e6, &e6, len);
    e4c.iter().zip(e6s.iter()).map(|(x, y)| (x - y) / 1728).collect()
}

/// Triangular basis g_j = Δ^j E_4^a E_6^b (j = 1..d) of S_k; g_j = q^j + O(q^{j+1}).
pub fn cusp_basis(k: u32, len: usize) -> Vec<Series> {
    let d = cusp_dimension(k);
    if d == 0 {
        return Vec::new();
    }
    let e4 = eisenstein_e4(len);
    let e6 = eisenstein_e6(len);
    let delta = discriminant(len);
    // exponents (a_j, b_j) with 4a + 6b = k − 12j
    let exps: Vec<(u32, u32)> = (1..=d as u32)
        .map(|j| {
            let rest = k - 12 * j;
            if rest % 4 == 0 {
                (rest / 4, 0)
            } else {
                ((rest - 6) / 4, 1)
            }
        })
        .collect();
    let max_a = exps.iter().map(|e| e.0).max().unwrap_or(0);
    let mut e4_pows: Vec<Series> = Vec::with_capacity(max_a as usize + 1);
    let mut one = vec![BigInt::zero(); len];
    one[0] = BigInt::one();
    e4_pows.push(one);
    for i in 1..=max_a as usize {
        let next = series_mul(&e4_pows[i - 1], &e4, len);
        e4_pows.push(next);
    }
    let mut out = Vec::with_capacity(d);
    let mut delta_pow = delta.clone();
    for (j, &(a, b)) in exps.iter().enumerate() {
        if j > 0 {
            delta_pow = series_mul(&delta_pow, &delta, len);
        }
        let mut g = series_mul(&delta_pow, &e4_pows[a as usize], len);
        if b == 1 {
            g = series_mul(&g, &e6, len);
        }
        out.push(g);
    }
    out
}

/// Integer matrix of T_p on the triangular basis: T_p g_j = Σ_i A[i][j] g_i.
/// Needs basis series of length > p·d.
pub fn hecke_matrix(basis: &[Series], k: u32, p: usize) -> Vec<Vec<BigInt>> {
    let d = basis.len();
    let pk = BigInt::from(p).pow(k - 1);
    let mut a = vec![vec![BigInt::zero(); d]; d];
    for (j, g) in basis.iter().enumerate() {
        // coefficients 1..=d of T_p g
        let mut t: Vec<BigInt> = (0..=d)
            .map(|n| {
                let mut c = g[p * n].clone();
                if n % p == 0 {
                    c += &pk * &g[n / p];
                }
                c
            })
            .collect();
        // back-substitute in the unitriangular basis
        for i in 1..=d {
            let coef = t[i].clone();
            if !coef.is_zero() {
                for (m, tm) in t.iter_mut().enumerate().take(d + 1).skip(i) {
                    *tm -= &coef * &basis[i - 1][m];
                }
            }
            a[i - 1][j] = coef;
        }
    }
    a
}

/// Characteristic polynomial det(xI − A), coefficients from x⁰ upwards
/// (Faddeev–LeVerrier, exact).
pub fn char_poly(a: &[Vec<BigInt>]) -> Vec<BigInt> {
    let d = a.len();
    let mut coeffs = vec![BigInt::zero(); d + 1];
    coeffs[d] = BigInt::one();
    let mut m = vec![vec![BigInt::zero(); d]; d];
    for i in 1..=d {
        // M_i = A M_{i-1} + c_{d-i+1} I
        let mut next = mat_mul(a, &m);
        for (r, row) in next.iter_mut().enumerate() {
            row[r] += &coeffs[d - i + 1];
        }
        m = next;
        let am = mat_mul(a, &m);
        let tr: BigInt = (0..d).map(|r| am[r][r].clone()).sum();
        coeffs[d - i] = -(tr / BigInt::from(i));
    }
    coeffs
}

fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let d = a.len();
    let mut out = vec![vec![BigInt::zero(); d]; d];
    for i in 0..d {
        for l in 0..d {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..d {
                out[i][j] += &a[i][l] * &b[l][j];
            }
        }
    }
    out
}

type Poly = Vec<BigRational>;

fn poly_from_int(c: &[BigInt]) -> Poly {
    c.iter().map(|x| BigRational::from_integer(x.clone())).collect()
}

fn poly_trim(p: &mut Poly) {
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn poly_eval(p: &Poly, x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn poly_deriv(p: &Poly) -> Poly {
    let mut out: Poly = p.iter().enumerate().skip(1).map(|(i, c)| c * BigRational::from_integer(BigInt::from(i))).collect();
    if out.is_empty() {
        out.push(BigRational::zero());
    }
    out
}

fn poly_rem(a: &Poly, b: &Poly) -> Poly {
    let mut r = a.clone();
    let db = b.len() - 1;
    let lead = b[db].clone();
    while r.len() > db && !(r.len() == 1 && r[0].is_zero()) {
        let dr = r.len() - 1;
        let factor = &r[dr] / &lead;
        for i in 0..=db {
            let v = &factor * &b[i];
            r[dr - db + i] -= v;
        }
        r.pop();
        poly_trim(&mut r);
        if r.len() - 1 < db {
            break;
        }
    }
    poly_trim(&mut r);
    r
}

fn is_zero_poly(p: &Poly) -> bool {
    p.iter().all(|c| c.is_zero())
}

fn sturm_sequence(p: &Poly) -> Vec<Poly> {
    let mut seq = vec![p.clone(), poly_deriv(p)];
    loop {
        let n = seq.len();
        if seq[n - 1].len() == 1 {
            break;
        }
        let r = poly_rem(&seq[n - 2], &seq[n - 1]);
        if is_zero_poly(&r) {
            break;
        }
        seq.push(r.into_iter().map(|c| -c).collect());
    }
    seq
}

fn sign_changes(seq: &[Poly], x: &BigRational) -> usize {
    let mut prev = Sign::NoSign;
    let mut changes = 0;
    for p in seq {
        let v = poly_eval(p, x);
        let s = if v.is_zero() {
            Sign::NoSign
        } else if v.is_positive() {
            Sign::Plus
        } else {
            Sign::Minus
        };
        if s != Sign::NoSign {
            if prev != Sign::NoSign && s != prev {
                changes += 1;
            }
            prev = s;
        }
    }
    changes
}

/// Real roots of a squarefree integer polynomial with only real roots,
/// each to an interval of width 2^{−bits}; returns the right endpoints in
/// ascending order. `None` if the polynomial has a repeated root.
pub fn real_roots(coeffs: &[BigInt], bits: u32) -> Option<Vec<BigRational>> {
    let p = poly_from_int(coeffs);
    let deg = p.len() - 1;
    let seq = sturm_sequence(&p);
    if seq.last().map(|s| s.len() > 1).unwrap_or(false) {
        return None;
    }
    // Cauchy bound
    let lead = p[deg].abs();
    let mut bound = BigRational::one();
    for c in &p[..deg] {
        let r = c.abs() / &lead;
        if r > bound {
            bound = r;
        }
    }
    let mut b = BigInt::one();
    while BigRational::from_integer(b.clone()) <= bound {
        b <<= 1;
    }
    let lo = BigRational::from_integer(-b.clone());
    let hi = BigRational::from_integer(b);
    let count = |a: &BigRational, c: &BigRational| sign_changes(&seq, a) - sign_changes(&seq, c);
    let total = count(&lo, &hi);
    if total != deg {
        return None;
    }
    let eps = BigRational::new(BigInt::one(), BigInt::one() << bits);
    let mut stack = vec![(lo, hi)];
    let mut isolated = Vec::new();
    while let Some((a, c)) = stack.pop() {
        let n = count(&a, &c);
        if n == 0 {
            continue;
        }
        if n == 1 {
            isolated.push((a, c));
            continue;
        }
        if &c - &a < eps {
            return None;
        }
        let mid = (&a + &c) / BigRational::from_integer(BigInt::from(2));
        stack.push((a, mid.clone()));
        stack.push((mid, c));
    }
    let two = BigRational::from_integer(BigInt::from(2));
    let mut roots: Vec<BigRational> = isolated
        .into_iter()
        .map(|(mut a, mut c)| {
            let pc = poly_eval(&p, &c);
            if pc.is_zero() {
                return c;
            }
            let sc = pc.is_positive();
            while &c - &a > eps {
                let mid = (&a + &c) / &two;
                let pm = poly_eval(&p, &mid);
                if pm.is_zero() {
                    return mid;
                }
                if pm.is_positive() == sc {
                    c = mid;
                } else {
                    a = mid;
                }
            }
            c
        })
        .collect();
    roots.sort();
    Some(roots)
}

fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * m[n - 1][n - 1].clone()
}

/// Eigenvector of A for the approximate eigenvalue `lam`, normalised to
/// v_1 = 1 and returned as integers over a common denominator: (numerators, den).
pub fn eigenvector(a: &[Vec<BigInt>], lam: &BigRational) -> Result<(Vec<BigInt>, BigInt)> {
    let d = a.len();
    if d == 1 {
        return Ok((vec![BigInt::one()], BigInt::one()));
    }
    let den = lam.denom().clone();
    let num = lam.numer().clone();
    // B = den·A − num·I
    let b: Vec<Vec<BigInt>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let mut v = &den * &a[i][j];
                    if i == j {
                        v -= &num;
                    }
                    v
                })
                .collect()
        })
        .collect();
    // drop the row that leaves the best-conditioned (d−1)×(d−1) system in v_2..v_d
    let mut best: Option<(usize, BigInt)> = None;
    for drop in 0..d {
        let sub: Vec<Vec<BigInt>> = (0..d).filter(|&r| r != drop).map(|r| b[r][1..].to_vec()).collect();
        let det = bareiss_det(sub);
        if best.as_ref().map(|(_, bd)| det.abs() > bd.abs()).unwrap_or(true) {
            best = Some((drop, det));
        }
    }
    let (drop, det) = best.expect("d >= 2");
    if det.is_zero() {
        return Err(Error::Conditioning("singular eigenvector system".into()));
    }
    let rows: Vec<usize> = (0..d).filter(|&r| r != drop).collect();
    let mut nums = vec![det.clone()];
    for col in 1..d {
        // Cramer: replace column `col` by −B[rows][0]
        let m: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|&r| {
                (1..d)
                    .map(|c| if c == col { -b[r][0].clone() } else { b[r][c].clone() })
                    .collect()
            })
            .collect();
        nums.push(bareiss_det(m));
    }
    Ok((nums, det))
}

/// num/den as f64 without intermediate overflow.
pub fn ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let neg = (num.sign() == Sign::Minus) != (den.sign() == Sign::Minus);
    let (n, d) = (num.abs(), den.abs());
    let shift = n.bits() as i64 - d.bits() as i64 - 64;
    let q = if shift >= 0 { n / (d << shift as usize) } else { (n << (-shift) as usize) / d };
    let v = q.to_f64().unwrap_or(f64::INFINITY) * 2f64.powi(shift as i32);
    if neg {
        -v
    } else {
        v
    }
}

/// Eigenforms of weight k, level 1: q-expansion coefficients a(1..len−1)
/// as exact (numerators, denominator) pairs, ordered by the T_p eigenvalue.
pub struct ExactEigenform {
    pub numerators: Series,
    pub denominator: BigInt,
    pub hecke_prime: usize,
}

/// Diagonalise the smallest T_p with simple spectrum and return the eigenforms.
pub fn level1_eigenforms_exact(k: u32, len: usize, bits: u32) -> Result<Vec<ExactEigenform>> {
    let d = cusp_dimension(k);
    if d == 0 {
        return Ok(Vec::new());
    }
    for p in [2usize, 3, 5, 7, 11, 13] {
        let need = (p * d + 1).max(len);
        let basis = cusp_basis(k, need);
        let a = hecke_matrix(&basis, k, p);
        let cp = char_poly(&a);
        let Some(roots) = real_roots(&cp, bits) else { continue };
        let mut out = Vec::with_capacity(d);
        for lam in roots {
            let (v, den) = eigenvector(&a, &lam)?;
            let numerators: Series = (0..len)
                .map(|n| v.iter().zip(basis.iter()).map(|(vj, g)| vj * &g[n]).sum())
                .collect();
            out.push(ExactEigenform { numerators, denominator: den, hecke_prime: p });
        }
        return Ok(out);
    }
    Err(Error::Conditioning(format!("no Hecke operator with simple spectrum found at weight {k}")))
}

/// a(n)/n^{(k−1)/2} for n = 1..len−1 (index 0 unused, set to 0).
pub fn normalized_coefficients(form: &ExactEigenform, k: u32) -> Vec<f64> {
    let mut out = vec![0.0; form.numerators.len()];
    for (n, c) in form.numerators.iter().enumerate().skip(1) {
        // a(n)/a(1), then analytic normalisation
        let an = ratio_to_f64(c, &form.numerators[1]);
        out[n] = an / (n as f64).powf((k as f64 - 1.0) / 2.0);
    }
    out
}

/// q-expansion of η(z)^a η(Nz)^a with a(1 + N) = 24, a Hecke newform of
/// weight a on Γ_0(N) (N = 2, 3, 5, 11). Index n holds the coefficient of qⁿ.
pub fn eta_product(a: u32, level: u64, len: usize) -> Result<Series> {
    if a as u64 * (1 + level) != 24 {
        return Err(Error::Domain(format!("η^{a}(z)η^{a}({level}z) is not a weight-{a} cusp form of level {level}")));
    }
    let mut c = vec![BigInt::zero(); len];
    if len < 2 {
        return Ok(c);
    }
    // coefficients of q^{n+1} live at index n until the final shift
    c[0] = BigInt::one();
    for m in 1..len {
        for step in [m, level as usize * m] {
            if step >= len {
                continue;
            }
            for _ in 0..a {
                for i in (step..len).rev() {
                    let prev = c[i - step].clone();
                    c[i] -= prev;
                }
            }
        }
    }
    c.rotate_right(1);
    c[0] = BigInt::zero();
    Ok(c)
}

/// Analytically normalised eigenvalues λ(n) = a(n)/n^{(k−1)/2} of the eta
/// product newform of weight `a` and level `level`, n = 1..len−1.
pub fn eta_newform_lambdas(a: u32, level: u64, len: usize) -> Result<Vec<f64>> {
    let series = eta_product(a, level, len)?;
    let half = (a as f64 - 1.0) / 2.0;
    Ok(series
        .iter()
        .enumerate()
        .map(|(n, c)| if n == 0 { 0.0 } else { ratio_to_f64(c, &BigInt::one()) / (n as f64).powf(half) })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta_products() {
        // η(z)^8η(2z)^8 = q − 8q² + 12q³ + 64q⁴ − 210q⁵
        let f = eta_product(8, 2, 6).unwrap();
        let v: Vec<i64> = f.iter().map(|x| x.to_i64().unwrap()).collect();
        assert_eq!(v, vec![0, 1, -8, 12, 64, -210]);
        // η(z)^6η(3z)^6 = q − 6q² + 9q³ + 4q⁴ + 6q⁵
        let g = eta_product(6, 3, 6).unwrap();
        let v: Vec<i64> = g.iter().map(|x| x.to_i64().unwrap()).collect();
        assert_eq!(v, vec![0, 1, -6, 9, 4, 6]);
        assert!(eta_product(4, 3, 6).is_err());
        let lam = eta_newform_lambdas(8, 2, 50).unwrap();
        // λ(q)² = 1/q at the level
        assert!((lam[2] * lam[2] - 0.5).abs() < 1e-14);
        assert!((lam[6] - lam[2] * lam[3]).abs() < 1e-14);
    }

    #[test]
    fn dimensions() {
        assert_eq!(cusp_dimension(12), 1);
        assert_eq!(cusp_dimension(14), 0);
        assert_eq!(cusp_dimension(24), 2);
        assert_eq!(cusp_dimension(26), 1);
        assert_eq!(cusp_dimension(28), 2);
        assert_eq!(cusp_dimension(38), 2);
    }

    #[test]
    fn ramanujan_tau() {
        let delta = discriminant(11);
        let tau: Vec<i64> = delta.iter().map(|x| x.to_i64().unwrap()).collect();
        assert_eq!(tau, vec![0, 1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920]);
    }

    #[test]
    fn weight_24_eigenvalues() {
        // T_2 on S_24 has eigenvalues 540 ± 12√144169
        let basis = cusp_basis(24, 8);
        let a = hecke_matrix(&basis, 24, 2);
        let cp = char_poly(&a);
        let roots = real_roots(&cp, 80).unwrap();
        let r = roots.iter().map(|x| ratio_to_f64(x.numer(), x.denom())).collect::<Vec<_>>();
        let s = 12.0 * 144169f64.sqrt();
        assert!((r[0] - (540.0 - s)).abs() < 1e-6);
        assert!((r[1] - (540.0 + s)).abs() < 1e-6);
    }

    #[test]
    fn exact_integer_root_is_hit() {
        let roots = real_roots(&[BigInt::from(24), BigInt::one()], 64).unwrap();
        assert_eq!(roots, vec![BigRational::from_integer(BigInt::from(-24))]);
    }

    #[test]
    fn ratio_conversion() {
        let n = BigInt::from(10).pow(400) * 3;
        let d = BigInt::from(10).pow(399) * 7;
        assert!((ratio_to_f64(&n, &d) - 30.0 / 7.0).abs() < 1e-14);
        assert_eq!(ratio_to_f64(&BigInt::from(-1), &BigInt::from(4)), -0.25);
    }
}
