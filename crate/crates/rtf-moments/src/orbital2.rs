//! Geometric side of the second-moment relative trace formula: the singular
//! main term, the regular orbital sum and the old-form local factor.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::nfcore::arith::Q;
use crate::nfcore::enumerate::{enumerate_in_box, sort_elements, DEFAULT_CAP};
use crate::nfcore::{dedekind_zeta, tau, Field, FieldElement, IdealData, PrimeIdeal, WeightVector};
use crate::specfun::bounds::shell_majorant;
use crate::specfun::gamma::ln_gamma_ratio;
use crate::specfun::{curly_p, digamma, ln_gamma_complex};
use crate::sum::{ordered_blocks, Neumaier};
use crate::{Error, Result};

/// Elements per parallel block inside one shell.
pub(crate) const BLOCK: usize = 2048;
/// Safety factor on the tail estimate.
pub(crate) const TAIL_SAFETY: f64 = 4.0;

#[derive(Clone, Debug)]
pub struct SecondMomentParams {
    pub field: Field,
    pub k: WeightVector,
    pub q: IdealData,
    pub n: IdealData,
    pub tol: f64,
}

impl SecondMomentParams {
    pub fn new(field: Field, k: WeightVector, q: IdealData, n: IdealData, tol: f64) -> Result<Self> {
        validate_levels(&field, &k, &q, &n)?;
        if !(tol > 0.0) {
            return Err(Error::Config(format!("tolerance {tol} must be positive")));
        }
        Ok(SecondMomentParams { field, k, q, n, tol })
    }

    /// Convenience constructor over ℚ with integer level and Hecke index.
    pub fn rational(k: u32, q: u64, n: u64, tol: f64) -> Result<Self> {
        let f = Field::rational();
        let qi = IdealData::from_integer(&f, q)?;
        let ni = IdealData::from_integer(&f, n)?;
        SecondMomentParams::new(f, WeightVector::parallel(k, 1)?, qi, ni, tol)
    }

    /// V_𝔮 = N(𝔮)+1 at prime level, 1 at full level.
    pub fn v_q(&self) -> f64 {
        v_q(&self.q)
    }
}

pub(crate) fn validate_levels(field: &Field, k: &WeightVector, q: &IdealData, n: &IdealData) -> Result<()> {
    if k.weights().len() != field.degree {
        return Err(Error::Config(format!("{} weights for a field of degree {}", k.weights().len(), field.degree)));
    }
    if !n.is_integral() {
        return Err(Error::InvalidIdeal("n must be integral".into()));
    }
    if !(q.is_unit() || q.is_prime()) {
        return Err(Error::InvalidIdeal("q must be the unit ideal or a prime".into()));
    }
    if !n.coprime(q) {
        return Err(Error::InvalidIdeal("n and q must be coprime".into()));
    }
    Ok(())
}

pub(crate) fn v_q(q: &IdealData) -> f64 {
    if q.is_unit() {
        1.0
    } else {
        q.norm_f64() + 1.0
    }
}

/// Main term, regular part and truncation data of a geometric side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometricBreakdown {
    pub main_term: f64,
    pub regular_sum: f64,
    pub truncation_bound: f64,
    pub shells_evaluated: u32,
}

impl GeometricBreakdown {
    pub fn total(&self) -> f64 {
        self.main_term + self.regular_sum
    }
}

/// G_{𝔫,𝔮}(s).
pub fn g_function(p: &SecondMomentParams, s: Complex64) -> Result<Complex64> {
    let nq = if p.q.is_unit() { 1.0 } else { p.q.norm_f64() };
    let d = p.field.disc as f64;
    let nn = p.n.norm_f64();
    let t = tau(&p.n)? as f64;
    let mut ln_prod = Complex64::zero();
    for &k in p.k.weights() {
        let kf = k as f64;
        ln_prod += (kf - 1.0).ln() + 2.0 * ln_gamma_complex((s + kf) / 2.0)
            - 2f64.ln()
            - (1.0 + s) * (2.0 * PI).ln()
            - PI.ln()
            - 2.0 * ln_gamma_complex(Complex64::new(kf / 2.0, 0.0));
    }
    let one_plus = Complex64::new(1.0, 0.0) + (s * nq.ln()).exp();
    let ln_d = (1.5 + s) * d.ln();
    let ln_n = -(1.0 + s) / 2.0 * nn.ln();
    Ok(2.0 * one_plus * (ln_prod + ln_d + ln_n).exp() * t)
}

/// G′(0) by logarithmic differentiation.
pub fn g_derivative(p: &SecondMomentParams) -> Result<f64> {
    let g0 = g_function(p, Complex64::zero())?.re;
    let nq = if p.q.is_unit() { 1.0 } else { p.q.norm_f64() };
    let mut dlog = nq.ln() / 2.0 + (p.field.disc as f64).ln() - p.n.norm_f64().ln() / 2.0;
    for &k in p.k.weights() {
        dlog += digamma(k as f64 / 2.0) - (2.0 * PI).ln();
    }
    Ok(g0 * dlog)
}

/// G′(0) by a central difference of log G with step h.
pub fn g_derivative_fd(p: &SecondMomentParams, h: f64) -> Result<f64> {
    let g0 = g_function(p, Complex64::zero())?.re;
    let nq = if p.q.is_unit() { 1.0 } else { p.q.norm_f64() };
    let mut diff = (1.0 + nq.powf(h)).ln() - (1.0 + nq.powf(-h)).ln()
        + 2.0 * h * (p.field.disc as f64).ln()
        - h * p.n.norm_f64().ln();
    for &k in p.k.weights() {
        diff += 2.0 * ln_gamma_ratio(k as f64 / 2.0, h / 2.0) - 2.0 * h * (2.0 * PI).ln();
    }
    Ok(g0 * diff / (2.0 * h))
}

/// Both evaluations of the singular main term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularMain {
    /// (N(𝔮)+1)δ_{𝐤,𝔮}(c₀G(0) + R·G′(0)).
    pub derivative_form: f64,
    /// Trapezoid rule for the contour integral on |s| = 0.1.
    pub contour: f64,
    pub g0: f64,
    pub g_prime: f64,
    pub g_prime_fd: f64,
}

pub const CONTOUR_RADIUS: f64 = 0.1;
pub const CONTOUR_NODES: usize = 1024;

pub fn singular_main(p: &SecondMomentParams) -> Result<SingularMain> {
    let nq = if p.q.is_unit() { 1.0 } else { p.q.norm_f64() };
    let g0 = g_function(p, Complex64::zero())?.re;
    let g_prime = g_derivative(p)?;
    let g_prime_fd = g_derivative_fd(p, 1e-5)?;
    if (g_prime - g_prime_fd).abs() > 1e-9 * g_prime.abs().max(g0.abs()) {
        return Err(Error::Convergence(format!("G'(0) closed form {g_prime} vs difference {g_prime_fd}")));
    }
    if !p.k.delta_q(&p.q) {
        return Ok(SingularMain { derivative_form: 0.0, contour: 0.0, g0, g_prime, g_prime_fd });
    }
    let pref = nq + 1.0;
    let derivative_form = pref * (p.field.c0 * g0 + p.field.residue * g_prime);
    // (1/2πi)∮ f(s)/s ds = mean of f over the circle
    let mut acc = Neumaier::new();
    for j in 0..CONTOUR_NODES {
        let th = 2.0 * PI * (j as f64 + 0.5) / CONTOUR_NODES as f64;
        let s = Complex64::from_polar(CONTOUR_RADIUS, th);
        let z = dedekind_zeta(&p.field, s + 1.0)?;
        acc.add((z * g_function(p, s)?).re);
    }
    let contour = pref * acc.value() / CONTOUR_NODES as f64;
    if (contour - derivative_form).abs() > 1e-7 * derivative_form.abs().max(1e-300) {
        return Err(Error::Convergence(format!(
            "singular main term: derivative form {derivative_form} vs contour {contour}"
        )));
    }
    Ok(SingularMain { derivative_form, contour, g0, g_prime, g_prime_fd })
}

/// Prime ideals dividing n, q, u or 1+u.
fn relevant_primes(field: &Field, xs: &[&FieldElement], ideals: &[&IdealData]) -> Vec<PrimeIdeal> {
    let mut ps: Vec<PrimeIdeal> = Vec::new();
    for x in xs {
        for p in field.support_primes(x) {
            ps.extend(field.primes_above(p));
        }
    }
    for a in ideals {
        ps.extend(a.primes().cloned());
    }
    ps.sort();
    ps.dedup();
    ps
}

/// ∏_{v<∞} e_{v,𝔫}(u) for u ∈ 𝔮𝔫^{−1} − {0, −1}.
pub fn e_factor(field: &Field, u: &FieldElement, n: &IdealData, q: &IdealData) -> Result<i64> {
    if u.is_zero() {
        return Err(Error::Domain("u = 0".into()));
    }
    let one_u = field.add(u, &field.from_int(1));
    if one_u.is_zero() {
        return Err(Error::Domain("u = -1".into()));
    }
    let a = q.mul(&n.inv());
    if !a.contains(field, u)? {
        return Err(Error::Domain(format!("{u} is not in q n^-1")));
    }
    let mut out = 1i64;
    for pr in relevant_primes(field, &[u, &one_u], &[n, q]) {
        let eu = field.valuation(u, &pr)?;
        if q.exponent(&pr) > 0 {
            out *= eu;
        } else {
            let en = n.exponent(&pr);
            let e1 = field.valuation(&one_u, &pr)?;
            out *= (en + 1 + e1) * (en + 1 + eu);
        }
    }
    Ok(out)
}

/// e-factor over ℚ with u given exactly; skips the membership test.
fn e_factor_rational(u: Q, n_primes: &[(u64, i64)], q: u64) -> i64 {
    use crate::nfcore::arith::{factor, val_rat};
    let one_u = u + Q::from_integer(1);
    let mut ps: Vec<u64> = Vec::new();
    for x in [u.numer().unsigned_abs(), *u.denom() as u128, one_u.numer().unsigned_abs(), *one_u.denom() as u128] {
        ps.extend(factor(x).into_iter().map(|f| f.0));
    }
    ps.extend(n_primes.iter().map(|f| f.0));
    if q > 1 {
        ps.push(q);
    }
    ps.sort_unstable();
    ps.dedup();
    let mut out = 1i64;
    for p in ps {
        let eu = val_rat(&u, p);
        if p == q {
            out *= eu;
        } else {
            let en = n_primes.iter().find(|f| f.0 == p).map_or(0, |f| f.1);
            out *= (en + 1 + val_rat(&one_u, p)) * (en + 1 + eu);
        }
    }
    out
}

/// Shell index of a rational: 0 when |x| ≤ 1, else m with 2^{m−1} < |x| ≤ 2^m.
pub fn shell_of_rational(x: Q) -> u32 {
    let num = x.numer().unsigned_abs();
    let den = x.denom().unsigned_abs();
    let mut m = 0;
    while num > den << m {
        m += 1;
    }
    m
}

fn shell_of_float(x: f64) -> u32 {
    let r = x.abs();
    if r <= 1.0 {
        return 0;
    }
    let mut m = 1;
    while r > 2f64.powi(m as i32) {
        m += 1;
    }
    m
}

/// Elements u ≠ 0 of the fractional ideal 𝔞 whose shell, measured on
/// α·u + β, is exactly m (the largest over all real places), in the
/// deterministic order of `sort_elements`.
pub fn shell_elements(field: &Field, a: &IdealData, alpha: i64, beta: i64, m: u32, cap: usize) -> Result<Vec<FieldElement>> {
    let radius = 2f64.powi(m as i32);
    let af = alpha as f64;
    let bf = beta as f64;
    let lo: Vec<f64> = vec![(-radius - bf) / af; field.degree];
    let hi: Vec<f64> = vec![(radius - bf) / af; field.degree];
    if field.is_rational() {
        let g = a.generator(field)?.coords[0].abs();
        let bound = ((radius + bf.abs()) / af / (*g.numer() as f64 / *g.denom() as f64)).ceil() as i128 + 1;
        if (2 * bound) as usize > cap {
            return Err(Error::CapExceeded { cap });
        }
        let mut out = Vec::new();
        for j in -bound..=bound {
            if j == 0 {
                continue;
            }
            let u = g * Q::from_integer(j);
            let x = u * Q::from_integer(alpha as i128) + Q::from_integer(beta as i128);
            if shell_of_rational(x) == m {
                out.push(field.from_rational(u));
            }
        }
        sort_elements(field, &mut out);
        return Ok(out);
    }
    let all = enumerate_in_box(field, a, &lo, &hi, cap)?;
    Ok(all
        .into_iter()
        .filter(|u| u.embeddings.iter().map(|&e| shell_of_float(af * e + bf)).max() == Some(m))
        .collect())
}

/// Upper estimate for the number of nonzero u ∈ 𝔞 with max_v |αu_v + β| ≤ 2^m:
/// exact for ℚ, the covolume count plus a boundary allowance otherwise.
pub(crate) fn lattice_ball_count(field: &Field, a: &IdealData, alpha: i64, m: u32) -> f64 {
    let side = 2.0 * 2f64.powi(m as i32) / alpha as f64;
    let covol = a.norm_f64() * (field.disc as f64).sqrt();
    if field.is_rational() {
        side / covol + 2.0
    } else {
        let d = field.degree as i32;
        (side + 2.0 * covol.sqrt()).powi(d) / covol
    }
}

/// Options of the shell-by-shell regular sum.
#[derive(Clone, Copy, Debug)]
pub struct RegularOptions {
    pub max_shell: u32,
    pub cap: usize,
    /// Sum over the reflected index set u ↦ −(1+u) instead. Only the full
    /// level has a reflection-stable index set.
    pub reflect: bool,
}

impl Default for RegularOptions {
    fn default() -> Self {
        RegularOptions { max_shell: 48, cap: DEFAULT_CAP, reflect: false }
    }
}

/// Prefactor 2D_F V_𝔮 N(𝔫)^{−1/2} ∏ (k_v−1)/(2π²) of the regular sum.
pub fn regular_prefactor(p: &SecondMomentParams) -> f64 {
    let mut c = 2.0 * p.field.disc as f64 * p.v_q() / p.n.norm_f64().sqrt();
    for &k in p.k.weights() {
        c *= (k as f64 - 1.0) / (2.0 * PI * PI);
    }
    c
}

fn curly_p_product(u: &FieldElement, k: &WeightVector) -> Result<f64> {
    let mut v = 1.0;
    for (e, &kv) in u.embeddings.iter().zip(k.weights()) {
        v *= curly_p(*e, kv)?;
    }
    Ok(v)
}

/// Σ_{j≥1} 2^{jd} ∏_v majorant(k_v, m+j) / ∏_v majorant(k_v, m); m ≥ 2.
pub(crate) fn geometric_tail_ratio(m: u32, d: usize, majorant: impl Fn(u32) -> f64) -> f64 {
    let base = majorant(m);
    let mut s = 0.0;
    for j in 1..200 {
        let term = 2f64.powi((j * d) as i32) * majorant(m + j as u32) / base;
        s += term;
        if term < 1e-18 * s {
            break;
        }
    }
    s
}

/// Regular orbital sum, including its prefactor, summed shell by shell until
/// the tail estimate is below `tol`.
pub fn regular_sum(p: &SecondMomentParams) -> Result<GeometricBreakdown> {
    regular_sum_with(p, RegularOptions::default())
}

pub fn regular_sum_with(p: &SecondMomentParams, opts: RegularOptions) -> Result<GeometricBreakdown> {
    if opts.reflect && !p.q.is_unit() {
        return Err(Error::Config("q n^{-1} is not stable under u -> -(1+u) at prime level".into()));
    }
    let a = p.q.mul(&p.n.inv());
    let pref = regular_prefactor(p);
    let rational = p.field.is_rational();
    let n_primes: Vec<(u64, i64)> = p.n.factors().map(|(pr, e)| (pr.p, e)).collect();
    let q_int = if p.q.is_unit() { 1 } else { p.q.primes().next().map_or(1, |pr| pr.p) };
    let k_min = *p.k.weights().iter().min().unwrap_or(&4);
    let d = p.field.degree;
    let mut total = Neumaier::new();
    let mut bound = f64::INFINITY;
    let mut e_seen = 0i64;
    let mut mass_seen = 0.0f64;
    let mut m = 0;
    loop {
        let elems = shell_elements(&p.field, &a, 2, 1, m, opts.cap)?;
        let nblocks = elems.len().div_ceil(BLOCK);
        let partial: Vec<Result<(f64, f64, i64)>> = ordered_blocks(0..nblocks, |b| {
            let mut acc = Neumaier::new();
            let mut abs_mass = 0.0;
            let mut max_e = 0i64;
            for u in &elems[b * BLOCK..((b + 1) * BLOCK).min(elems.len())] {
                let one_u = p.field.add(u, &p.field.from_int(1));
                if one_u.is_zero() {
                    continue;
                }
                let w = if opts.reflect { p.field.neg(&one_u) } else { u.clone() };
                let e = if rational {
                    e_factor_rational(w.coords[0], &n_primes, q_int)
                } else {
                    e_factor(&p.field, &w, &p.n, &p.q)?
                };
                if e == 0 {
                    continue;
                }
                let v = curly_p_product(&w, &p.k)? * e as f64;
                acc.add(v);
                abs_mass += v.abs();
                max_e = max_e.max(e.abs());
            }
            Ok((acc.value(), abs_mass, max_e))
        });
        let mut shell = Neumaier::new();
        let mut shell_abs = 0.0;
        let mut max_e = 0;
        for r in partial {
            let (v, am, me) = r?;
            shell.add(v);
            shell_abs += am;
            max_e = max_e.max(me);
        }
        total.add(shell.value());
        e_seen = e_seen.max(max_e);
        if m >= 3 {
            mass_seen *= 2f64.powi(d as i32) * shell_majorant(k_min, m) / shell_majorant(k_min, m - 1);
        }
        mass_seen = mass_seen.max(shell_abs);
        // no bound until a nonzero orbit has been seen
        if m >= 2 && e_seen > 0 {
            let ratio = geometric_tail_ratio(m, d, |mm| shell_majorant(k_min, mm));
            bound = if rational {
                let count = (elems.len() as f64).max(lattice_ball_count(&p.field, &a, 2, m));
                TAIL_SAFETY * count * e_seen as f64 * ratio * shell_majorant(k_min, m)
            } else {
                TAIL_SAFETY * mass_seen * ratio
            };
            bound *= pref.abs();
            if bound < p.tol {
                break;
            }
        }
        if m >= opts.max_shell {
            return Err(Error::Convergence(format!("tail bound {bound:e} above tol after {m} shells")));
        }
        m += 1;
    }
    Ok(GeometricBreakdown {
        main_term: 0.0,
        regular_sum: pref * total.value(),
        truncation_bound: bound,
        shells_evaluated: m + 1,
    })
}

/// L_𝔮(1/2, π_𝔮 × χ_𝔮) = (1 + λ(𝔮)N(𝔮)^{−1/2} + N(𝔮)^{−1})^{−1}, with χ_𝔮(ϖ) = −1.
pub fn oldform_l_factor(lambda_q: f64, nq: u64) -> Result<f64> {
    if lambda_q.abs() > 2.0 + 1e-9 {
        log::warn!("|lambda(q)| = {} exceeds 2", lambda_q.abs());
    }
    let n = nq as f64;
    let den = 1.0 + lambda_q / n.sqrt() + 1.0 / n;
    if den.abs() < 1e-12 {
        return Err(Error::Domain("old-form local factor has a vanishing denominator".into()));
    }
    Ok(1.0 / den)
}

/// Full geometric side: singular main term plus regular sum.
pub fn secondmoment_geometric(p: &SecondMomentParams) -> Result<GeometricBreakdown> {
    let main = singular_main(p)?;
    let mut g = regular_sum(p)?;
    g.main_term = main.derivative_form;
    Ok(g)
}
