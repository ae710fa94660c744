//! Mollifier coefficients, the triple Dirichlet series `L(s, s₁, s₂; ρ, 𝔮)`
//! with its Euler product, the main-term functional `𝕃`, the moment main
//! terms `M⁽¹⁾`, `M⁽²⁾` and the non-vanishing proportion calculus.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::nfcore::arith::primes_up_to;
use crate::nfcore::zeta::dedekind_zeta;
use crate::nfcore::{moebius, Field, IdealData, PrimeIdeal, WeightVector};
use crate::oracle::NewformRecord;
use crate::specfun::digamma;
use crate::specfun::quad::composite_gl_complex;
use crate::sum::{ordered_blocks, Neumaier, NeumaierComplex};
use crate::{Error, Result};

/// Largest rational prime used by the truncated Euler products.
pub const EULER_PRIME_CAP: usize = 4_000_000;
const EULER_TARGET: f64 = 1e-13;

type PrimeFn = Arc<dyn Fn(u64) -> f64 + Send + Sync>;

/// Multiplicative weight ρ, given by its value at prime ideals of each norm.
#[derive(Clone)]
pub enum Rho {
    /// ρ(𝔭) = (1 + N𝔭^{−1})^{−1}.
    Default,
    Custom { name: String, at_prime: PrimeFn },
}

impl fmt::Debug for Rho {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rho::Default => f.write_str("Rho::Default"),
            Rho::Custom { name, .. } => write!(f, "Rho::Custom({name})"),
        }
    }
}

impl Rho {
    /// A custom ρ, accepted only if Σ_𝔭 |1 − ρ(𝔭)|/N𝔭 visibly converges:
    /// the mass over primes in (10³, 10⁴] must stay below 10⁻².
    pub fn custom(name: &str, at_prime: impl Fn(u64) -> f64 + Send + Sync + 'static) -> Result<Rho> {
        let mut tail = 0.0;
        for p in primes_up_to(10_000) {
            let r = at_prime(p);
            if !r.is_finite() || r.abs() >= (p as f64).powf(0.999) {
                return Err(Error::Config(format!("rho({p}) = {r} violates |rho(p)| < N(p)^(1-eps)")));
            }
            if p > 1000 {
                tail += (1.0 - r).abs() / p as f64;
            }
        }
        if tail > 1e-2 {
            return Err(Error::Config(format!(
                "rho {name:?} fails the summability check: tail mass {tail:.3e} over primes in (1e3, 1e4]"
            )));
        }
        Ok(Rho::Custom { name: name.to_string(), at_prime: Arc::new(at_prime) })
    }

    pub fn at_prime_norm(&self, np: u64) -> f64 {
        match self {
            Rho::Default => np as f64 / (np as f64 + 1.0),
            Rho::Custom { at_prime, .. } => at_prime(np),
        }
    }

    /// ρ(𝔫) for squarefree 𝔫; multiplicative extension over the prime support.
    pub fn at(&self, n: &IdealData) -> f64 {
        n.primes().map(|pr| self.at_prime_norm(pr.norm())).product()
    }

    pub fn is_default(&self) -> bool {
        matches!(self, Rho::Default)
    }
}

#[derive(Clone, Debug)]
pub struct MollifierSpec {
    pub field: Field,
    pub xi: f64,
    pub rho: Rho,
    pub q: IdealData,
}

impl MollifierSpec {
    pub fn new(field: Field, xi: f64, q: IdealData) -> Result<Self> {
        if !(xi > 1.0 && xi.is_finite()) {
            return Err(Error::Config(format!("xi must be a finite number > 1, got {xi}")));
        }
        if !(q.is_unit() || q.is_prime()) {
            return Err(Error::InvalidIdeal("mollifier level must be the unit ideal or a prime".into()));
        }
        Ok(MollifierSpec { field, xi, rho: Rho::Default, q })
    }

    pub fn rational(xi: f64) -> Result<Self> {
        MollifierSpec::new(Field::rational(), xi, IdealData::unit())
    }

    pub fn with_rho(mut self, rho: Rho) -> Self {
        self.rho = rho;
        self
    }

    fn divides_level(&self, pr: &PrimeIdeal) -> bool {
        self.q.exponent(pr) > 0
    }
}

/// `(1/2πi)∫_{(2)} ξ^s N^{−s} s^{−3} ds = (log(ξ/N))²/2 · 1_{N ≤ ξ}`.
pub fn mollifier_kernel(norm: f64, xi: f64) -> f64 {
    if norm <= xi {
        let l = (xi / norm).ln();
        0.5 * l * l
    } else {
        0.0
    }
}

/// The same contour integral by quadrature on the segment `2 + it`, |t| ≤ t_max.
pub fn mollifier_kernel_quadrature(norm: f64, xi: f64, t_max: f64) -> f64 {
    let l = (xi / norm).ln();
    let f = |t: f64| {
        let s = Complex64::new(2.0, t);
        (s * l).exp() / (s * s * s)
    };
    // the integrand is conjugate-symmetric in t
    let panels = (4.0 * t_max * (1.0 + l.abs())).ceil() as usize;
    composite_gl_complex(f, 0.0, t_max, panels.max(64), 16).re / PI
}

/// μ_F(𝔫)ρ(𝔫)N(𝔫)^{−1/2}(log(ξ/N(𝔫)))²/(2 log ξ) for N(𝔫) ≤ ξ, else 0.
pub fn mollifier_weight(n: &IdealData, spec: &MollifierSpec) -> Result<f64> {
    if !n.is_integral() {
        return Err(Error::InvalidIdeal(format!("{n} is not integral")));
    }
    if !n.coprime(&spec.q) {
        return Err(Error::Domain(format!("{n} is not coprime to the level {}", spec.q)));
    }
    let mu = moebius(n)?;
    let norm = n.norm_f64();
    if mu == 0 || norm > spec.xi {
        return Ok(0.0);
    }
    Ok(mu as f64 * spec.rho.at(n) / norm.sqrt() * mollifier_kernel(norm, spec.xi) / spec.xi.ln())
}

/// M_{ξ,ρ}(π) for a form over ℚ.
pub fn mollifier_value(record: &NewformRecord, spec: &MollifierSpec) -> Result<f64> {
    if !spec.field.is_rational() {
        return Err(Error::UnsupportedField("mollifier values need a form over Q".into()));
    }
    let top = spec.xi.floor() as u64;
    if top as usize > record.n_max() {
        return Err(Error::Coverage { need: top, have: record.n_max() as u64 });
    }
    let mut acc = Neumaier::new();
    for n in 1..=top {
        let ideal = IdealData::from_integer(&spec.field, n)?;
        if !ideal.coprime(&spec.q) {
            continue;
        }
        let w = mollifier_weight(&ideal, spec)?;
        if w != 0.0 {
            acc.add(w * record.lambda_at(n)?);
        }
    }
    Ok(acc.value())
}

struct SqfIdeal {
    ln_norm: f64,
    mu_rho: f64,
    primes: Vec<u32>,
}

fn prime_ideals_up_to(spec: &MollifierSpec, bound: u64) -> Vec<PrimeIdeal> {
    let mut out: Vec<PrimeIdeal> = primes_up_to(bound as usize)
        .into_iter()
        .flat_map(|p| spec.field.primes_above(p))
        .filter(|pr| pr.norm() <= bound && !spec.divides_level(pr))
        .collect();
    out.sort_by_key(|pr| (pr.norm(), pr.clone()));
    out
}

/// Squarefree integral ideals coprime to 𝔮 with norm ≤ bound, with μρ.
fn squarefree_ideals(spec: &MollifierSpec, bound: u64) -> Vec<SqfIdeal> {
    let primes = prime_ideals_up_to(spec, bound);
    let norms: Vec<u64> = primes.iter().map(|p| p.norm()).collect();
    let mut out = Vec::new();
    let mut stack: Vec<(u64, usize, Vec<u32>)> = vec![(1, 0, Vec::new())];
    while let Some((norm, start, support)) = stack.pop() {
        let mu_rho = support
            .iter()
            .map(|&i| -spec.rho.at_prime_norm(norms[i as usize]))
            .product();
        out.push(SqfIdeal { ln_norm: (norm as f64).ln(), mu_rho, primes: support.clone() });
        for i in start..primes.len() {
            let next = norm.saturating_mul(norms[i]);
            if next > bound {
                break;
            }
            let mut s = support.clone();
            s.push(i as u32);
            stack.push((next, i + 1, s));
        }
    }
    out.sort_by(|a, b| a.ln_norm.total_cmp(&b.ln_norm).then_with(|| a.primes.cmp(&b.primes)));
    out
}

fn check_region(s: Complex64, s1: Complex64, s2: Complex64) -> Result<()> {
    if 2.0 * s1.re + s.re > 0.0 && 2.0 * s2.re + s.re > 0.0 && s1.re + s2.re > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("(s, s1, s2) = ({s}, {s1}, {s2}) is outside the absolute-convergence region")))
    }
}

/// Direct double sum over squarefree 𝔫₁, 𝔫₂ of norm ≤ cutoff, with the inner
/// divisor sum over 𝔪 | gcd(𝔫₁, 𝔫₂) evaluated term by term.
pub fn triple_series_brute(s: Complex64, s1: Complex64, s2: Complex64, spec: &MollifierSpec, cutoff: u64) -> Result<Complex64> {
    check_region(s, s1, s2)?;
    if cutoff == 0 {
        return Err(Error::Config("cutoff must be >= 1".into()));
    }
    let ideals = squarefree_ideals(spec, cutoff);
    let half_s = (1.0 + s) * 0.5;
    let a1: Vec<Complex64> = ideals.iter().map(|n| n.mu_rho * (-(0.5 + s1) * n.ln_norm).exp()).collect();
    let a2: Vec<Complex64> = ideals.iter().map(|n| n.mu_rho * (-(0.5 + s2) * n.ln_norm).exp()).collect();
    let prime_ln: Vec<f64> = {
        let primes = prime_ideals_up_to(spec, cutoff);
        primes.iter().map(|p| (p.norm() as f64).ln()).collect()
    };
    const ROWS: usize = 64;
    let blocks = ideals.len().div_ceil(ROWS);
    let partial = ordered_blocks(0..blocks, |b| {
        let mut acc = NeumaierComplex::new();
        let mut common = Vec::new();
        for i in b * ROWS..((b + 1) * ROWS).min(ideals.len()) {
            let n1 = &ideals[i];
            for (j, n2) in ideals.iter().enumerate() {
                common.clear();
                intersect(&n1.primes, &n2.primes, &mut common);
                let single = n1.primes.len() + n2.primes.len() - 2 * common.len();
                let mut inner = Complex64::zero();
                for mask in 0u32..(1 << common.len()) {
                    let mut ln_m = 0.0;
                    let mut in_m = 0;
                    for (bit, &pi) in common.iter().enumerate() {
                        if mask >> bit & 1 == 1 {
                            ln_m += prime_ln[pi as usize];
                            in_m += 1;
                        }
                    }
                    // n1 n2 m^-2 has exponent 2 on gcd/m and 1 on the symmetric difference
                    let tau = 3f64.powi((common.len() - in_m) as i32) * 2f64.powi(single as i32);
                    let ln_quot = n1.ln_norm + n2.ln_norm - 2.0 * ln_m;
                    inner += tau * (-half_s * ln_quot).exp();
                }
                acc.add(a1[i] * a2[j] * inner);
            }
        }
        acc.value()
    });
    let mut total = NeumaierComplex::new();
    for p in partial {
        total.add(p);
    }
    Ok(total.value())
}

fn intersect(a: &[u32], b: &[u32], out: &mut Vec<u32>) {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
}

fn pow_neg(np: f64, z: Complex64) -> Complex64 {
    (-z * np.ln()).exp()
}

/// The five-term local factor G_𝔭(s, s₁, s₂).
pub fn local_factor(np: u64, rho: f64, s: Complex64, s1: Complex64, s2: Complex64) -> Complex64 {
    let n = np as f64;
    let one = Complex64::new(1.0, 0.0);
    one - 2.0 * rho * pow_neg(n, one + s1 + s * 0.5) - 2.0 * rho * pow_neg(n, one + s2 + s * 0.5)
        + rho * rho * pow_neg(n, one + s1 + s2)
        + 3.0 * rho * rho * pow_neg(n, 2.0 + s1 + s2 + s)
}

/// A truncated Euler product together with a bound on the omitted tail.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EulerValue {
    pub value: Complex64,
    pub tail_bound: f64,
    pub prime_bound: u64,
}

fn rho_max(spec: &MollifierSpec) -> f64 {
    match &spec.rho {
        Rho::Default => 1.0,
        Rho::Custom { at_prime, .. } => primes_up_to(10_000).into_iter().map(|p| at_prime(p).abs()).fold(1.0, f64::max),
    }
}

/// Prime bound P with `c·d/(σ P^σ log P) ≤ target`, capped.
fn prime_bound_for(c: f64, degree: usize, sigma: f64, target: f64) -> u64 {
    let mut p = 1000.0f64;
    while p < EULER_PRIME_CAP as f64 && c * degree as f64 / (sigma * p.powf(sigma) * p.ln()) > target {
        p *= 1.5;
    }
    p.min(EULER_PRIME_CAP as f64) as u64
}

fn tail_estimate(c: f64, degree: usize, sigma: f64, p: u64) -> f64 {
    let p = p as f64;
    c * degree as f64 / (sigma * p.powf(sigma) * p.ln())
}

/// ∏_{𝔭∤𝔮} G_𝔭(s, s₁, s₂), truncated at N𝔭 ≤ P with P chosen from the
/// decay |G_𝔭 − 1| ≤ 8ρ²_max N𝔭^{−1−σ}.
pub fn triple_series_euler(s: Complex64, s1: Complex64, s2: Complex64, spec: &MollifierSpec) -> Result<EulerValue> {
    check_region(s, s1, s2)?;
    let sigma = (s1.re + s.re / 2.0).min(s2.re + s.re / 2.0).min(s1.re + s2.re);
    let rm = rho_max(spec);
    let c = 2.0 * (4.0 * rm + 4.0 * rm * rm);
    let bound = prime_bound_for(c, spec.field.degree, sigma, EULER_TARGET);
    let mut log_sum = NeumaierComplex::new();
    for pr in prime_ideals_up_to(spec, bound) {
        let g = local_factor(pr.norm(), spec.rho.at_prime_norm(pr.norm()), s, s1, s2);
        log_sum.add(g.ln());
    }
    Ok(EulerValue {
        value: log_sum.value().exp(),
        tail_bound: tail_estimate(c, spec.field.degree, sigma, bound),
        prime_bound: bound,
    })
}

/// L(s, ρ) = ζ_F(s)·∏_𝔭 (1 − N𝔭^{−s})/(1 − ρ(𝔭)N𝔭^{−s}), Re s > 1/2 + margin.
pub fn l_rho(z: Complex64, spec: &MollifierSpec) -> Result<Complex64> {
    let zeta = dedekind_zeta(&spec.field, z)?;
    if spec.rho.is_default() {
        // 1 − ρ(𝔭) = 1/(N𝔭 + 1), so the correction decays like N𝔭^{−1−Re z}
        let bound = prime_bound_for(2.0, spec.field.degree, z.re, EULER_TARGET);
        let mut log_sum = NeumaierComplex::new();
        for p in primes_up_to(bound as usize) {
            for pr in spec.field.primes_above(p) {
                let n = pr.norm() as f64;
                let x = pow_neg(n, z);
                log_sum.add(((1.0 - x) / (1.0 - spec.rho.at_prime_norm(pr.norm()) * x)).ln());
            }
        }
        return Ok(zeta * log_sum.value().exp());
    }
    let bound = prime_bound_for(2.0 * rho_max(spec), spec.field.degree, z.re - 1.0, EULER_TARGET);
    let mut log_sum = NeumaierComplex::new();
    for p in primes_up_to(bound as usize) {
        for pr in spec.field.primes_above(p) {
            let x = pow_neg(pr.norm() as f64, z);
            log_sum.add(-(1.0 - spec.rho.at_prime_norm(pr.norm()) * x).ln());
        }
    }
    Ok(log_sum.value().exp())
}

fn local_l(np: u64, rho: f64, z: Complex64) -> Complex64 {
    1.0 / (1.0 - rho * pow_neg(np as f64, z))
}

/// E(s, s₁, s₂; ρ, 𝔮): the 𝔮-factor times ∏_{𝔭∤𝔮} L_𝔭(a)²L_𝔭(b)²G_𝔭/L_𝔭(c).
pub fn e_function(s: Complex64, s1: Complex64, s2: Complex64, spec: &MollifierSpec) -> Result<EulerValue> {
    let one = Complex64::new(1.0, 0.0);
    let a = one + s1 + s * 0.5;
    let b = one + s2 + s * 0.5;
    let c = one + s1 + s2;
    let mut head = Complex64::new(1.0, 0.0);
    for pr in spec.q.primes() {
        let r = spec.rho.at_prime_norm(pr.norm());
        let la = local_l(pr.norm(), r, a);
        let lb = local_l(pr.norm(), r, b);
        head *= la * la * lb * lb / local_l(pr.norm(), r, c);
    }
    // e_𝔭 − 1 = −ρ(1−ρ)N^{−c} + O(N^{−2−σ})
    let sigma = (c.re - 1.0 + 1.0).min(1.0 + a.re.min(b.re) - 1.0).max(1e-3);
    let c_tail = 64.0 * rho_max(spec).powi(4);
    let bound = prime_bound_for(c_tail, spec.field.degree, sigma, EULER_TARGET);
    let mut log_sum = NeumaierComplex::new();
    for pr in prime_ideals_up_to(spec, bound) {
        let np = pr.norm();
        let r = spec.rho.at_prime_norm(np);
        let la = local_l(np, r, a);
        let lb = local_l(np, r, b);
        let e = la * la * lb * lb / local_l(np, r, c) * local_factor(np, r, s, s1, s2);
        log_sum.add(e.ln());
    }
    Ok(EulerValue {
        value: head * log_sum.value().exp(),
        tail_bound: tail_estimate(c_tail, spec.field.degree, sigma, bound),
        prime_bound: bound,
    })
}

/// Factored form L(1+s₁+s₂, ρ)E/(L(1+s₁+s/2, ρ)²L(1+s₂+s/2, ρ)²).
pub fn triple_series_factored(s: Complex64, s1: Complex64, s2: Complex64, spec: &MollifierSpec) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let e = e_function(s, s1, s2, spec)?.value;
    let la = l_rho(one + s1 + s * 0.5, spec)?;
    let lb = l_rho(one + s2 + s * 0.5, spec)?;
    Ok(l_rho(one + s1 + s2, spec)? * e / (la * la * lb * lb))
}

/// Local zeta factor ζ_𝔮(s) = (1 − N𝔮^{−s})^{−1}, and 1 for the unit ideal.
pub fn zeta_q(q: &IdealData, s: f64) -> f64 {
    if q.is_unit() {
        1.0
    } else {
        1.0 / (1.0 - q.norm_f64().powf(-s))
    }
}

fn zeta_f2(field: &Field) -> Result<f64> {
    Ok(dedekind_zeta(field, Complex64::new(2.0, 0.0))?.re)
}

/// E(0,0,0; ρ, 𝔮) from the single-prime factor
/// 1 − ρN^{−1}(1 − ρ − ρ²N^{−2})/(1 − ρN^{−1})³, with the product
/// accelerated by dividing out ζ_F(2)'s Euler factors.
pub fn e_zero(spec: &MollifierSpec) -> Result<EulerValue> {
    let mut head = 1.0;
    for pr in spec.q.primes() {
        let r = spec.rho.at_prime_norm(pr.norm());
        let n = pr.norm() as f64;
        head *= (1.0 - r / n).powi(-3) / (1.0 - n.powi(-2));
    }
    let bound: u64 = if spec.rho.is_default() { 100_000 } else { EULER_PRIME_CAP as u64 };
    let mut log_sum = Neumaier::new();
    let mut last_window = 0.0f64;
    for pr in prime_ideals_up_to(spec, bound) {
        let n = pr.norm() as f64;
        let r = spec.rho.at_prime_norm(pr.norm());
        let f = 1.0 - r / n * (1.0 - r - r * r / (n * n)) / (1.0 - r / n).powi(3);
        let term = (f / (1.0 - 1.0 / (n * n))).ln();
        log_sum.add(term);
        if n > bound as f64 / 2.0 {
            last_window = last_window.max(term.abs() * n);
        }
    }
    let value = head / zeta_f2(&spec.field)? * log_sum.value().exp();
    // remaining terms decay at least like N^{-1}·max|term·N| over the last window
    let tail = last_window * spec.field.degree as f64 * (2.0 * (bound as f64).ln()).max(1.0);
    Ok(EulerValue { value: Complex64::new(value, 0.0), tail_bound: tail * value.abs(), prime_bound: bound })
}

/// The closed forms ζ_F(2)^{−1} and ζ_𝔮(1)³ζ_𝔮(2)^{−2}ζ_F(2)^{−1}.
pub fn e_zero_closed(field: &Field, q: &IdealData) -> Result<f64> {
    Ok(zeta_q(q, 1.0).powi(3) / zeta_q(q, 2.0).powi(2) / zeta_f2(field)?)
}

/// R(ρ) = lim L(1+s, ρ)/ζ_F(1+s) = ∏_𝔭 [1 − (1−ρ)N^{−1}/(1 − ρN^{−1})].
pub fn r_rho(spec: &MollifierSpec) -> Result<f64> {
    if spec.rho.is_default() {
        // each factor equals 1 − N𝔭^{−2}
        return Ok(1.0 / zeta_f2(&spec.field)?);
    }
    let mut log_sum = Neumaier::new();
    for p in primes_up_to(EULER_PRIME_CAP) {
        for pr in spec.field.primes_above(p) {
            let n = pr.norm() as f64;
            let r = spec.rho.at_prime_norm(pr.norm());
            log_sum.add((1.0 - (1.0 - r) / n / (1.0 - r / n)).ln());
        }
    }
    Ok(log_sum.value().exp())
}

/// C_𝔮 = ζ_𝔮(1)³ζ_𝔮(2)^{−2} for prime 𝔮 and 1 for the unit ideal.
pub fn c_q(q: &IdealData) -> f64 {
    zeta_q(q, 1.0).powi(3) / zeta_q(q, 2.0).powi(2)
}

/// `𝕃(G, ρ, 𝔮)` main term from the pair `(G(0), G′(0))`; the error term
/// O(G(0)/log ξ) is not included.
pub fn l_big(g: (f64, f64), spec: &MollifierSpec) -> Result<f64> {
    let ratio = if spec.rho.is_default() {
        c_q(&spec.q) * zeta_f2(&spec.field)?.powi(2)
    } else {
        e_zero(spec)?.value.re / r_rho(spec)?.powi(3)
    };
    let res = spec.field.residue;
    Ok(ratio / (res * res) * (g.1 / spec.xi.ln() + g.0))
}

/// `(G_𝔞(0), G_𝔞′(0))` for G_𝔞(s) = (1 + N𝔞^s)D^s∏Γ((k_v+s)/2)²/((2π)^sΓ(k_v/2)²).
pub fn g_pair(field: &Field, k: &WeightVector, a_norm: f64) -> (f64, f64) {
    let arch: f64 = k.weights().iter().map(|&kv| digamma(kv as f64 / 2.0) - (2.0 * PI).ln()).sum();
    (2.0, a_norm.ln() + 2.0 * (field.disc as f64).ln() + 2.0 * arch)
}

/// `(G(0), G′(0))` for G_𝔮^{old}(s) = G_{𝒪}(s)(1 + N𝔮^{−1−s/2})^{−2}.
pub fn g_old_pair(field: &Field, k: &WeightVector, nq: f64) -> (f64, f64) {
    let (g0, g1) = g_pair(field, k, 1.0);
    let f = 1.0 + 1.0 / nq;
    (g0 / (f * f), g1 / (f * f) + g0 * nq.ln() / nq / (f * f * f))
}

fn level_norm(q: &IdealData) -> Result<f64> {
    if q.is_unit() {
        Ok(1.0)
    } else if q.is_prime() {
        Ok(q.norm_f64())
    } else {
        Err(Error::InvalidIdeal("level must be the unit ideal or a prime".into()))
    }
}

/// c_𝔮 of the main terms: ζ_𝔮(1)³ζ_𝔮(2)^{−1} at prime level, δ_𝐤 at full level.
fn c_main(k: &WeightVector, q: &IdealData) -> f64 {
    if q.is_unit() {
        if k.delta() {
            1.0
        } else {
            0.0
        }
    } else {
        zeta_q(q, 1.0).powi(3) / zeta_q(q, 2.0)
    }
}

fn window_check(k: &WeightVector, nq: f64, xi: f64) {
    let edge = nq.sqrt() * k.norm().powf(0.25);
    if !(xi > 1.0 && xi <= edge) {
        log::warn!("xi = {xi} lies outside the window (1, N(q)^(1/2)||k||^(1/4) = {edge}]");
    }
}

/// Main terms (M⁽¹⁾, M⁽²⁾) of the first and second mollified moments.
pub fn moment_main_terms(k: &WeightVector, q: &IdealData, xi: f64) -> Result<(f64, f64)> {
    let nq = level_norm(q)?;
    window_check(k, nq, xi);
    let delta = if k.delta() { 1.0 } else { 0.0 };
    let lx = xi.ln();
    let kn = k.norm();
    let m1 = if q.is_unit() {
        4.0 * delta
    } else {
        (2.0 * (nq + 1.0) - 4.0 * delta) * zeta_q(q, 1.0)
    };
    let mut m2 = 4.0 * (nq + 1.0) * c_main(k, q) * (xi * nq.sqrt() * kn).ln() / lx;
    if !q.is_unit() {
        m2 -= 16.0 * zeta_q(q, 2.0) * delta / (1.0 + 1.0 / nq) * (xi * kn).ln() / lx;
    }
    let gap = normalization_gap(k, q, xi)?;
    if gap > 1e-12 {
        log::error!("M2 and 4x(second-moment main term in bracket form) differ by {gap:.3e}");
    }
    Ok((m1, m2))
}

/// The bracket form `c_𝔮(N+1)[log(N^{1/2}∥𝐤∥)/log ξ + 1] − 4ζ_𝔮(2)δ_𝐤/(1+N^{−1})[log∥𝐤∥/log ξ + 1]`.
pub fn mollified_bracket(k: &WeightVector, q: &IdealData, xi: f64) -> Result<f64> {
    let nq = level_norm(q)?;
    let lx = xi.ln();
    let kn = k.norm();
    let delta = if k.delta() { 1.0 } else { 0.0 };
    let mut m = c_main(k, q) * (nq + 1.0) * ((nq.sqrt() * kn).ln() / lx + 1.0);
    if !q.is_unit() {
        m -= 4.0 * zeta_q(q, 2.0) * delta / (1.0 + 1.0 / nq) * (kn.ln() / lx + 1.0);
    }
    Ok(m)
}

/// Relative gap |M⁽²⁾ − 4·bracket| / |M⁽²⁾|; zero up to rounding.
pub fn normalization_gap(k: &WeightVector, q: &IdealData, xi: f64) -> Result<f64> {
    let nq = level_norm(q)?;
    let lx = xi.ln();
    let kn = k.norm();
    let delta = if k.delta() { 1.0 } else { 0.0 };
    let mut m2 = 4.0 * (nq + 1.0) * c_main(k, q) * (xi * nq.sqrt() * kn).ln() / lx;
    if !q.is_unit() {
        m2 -= 16.0 * zeta_q(q, 2.0) * delta / (1.0 + 1.0 / nq) * (xi * kn).ln() / lx;
    }
    let m = mollified_bracket(k, q, xi)?;
    Ok(if m2 == 0.0 { (4.0 * m).abs() } else { (m2 - 4.0 * m).abs() / m2.abs() })
}

/// Predicted mollified moments `(Σ L M/L(1,Ad), Σ L²M²/L(1,Ad))` from the main terms.
pub fn mollified_main_terms(field: &Field, k: &WeightVector, q: &IdealData, xi: f64) -> Result<(f64, f64)> {
    let (m1, m2) = moment_main_terms(k, q, xi)?;
    let z2 = zeta_f2(field)?;
    let res = field.residue;
    let arch: f64 = k.weights().iter().map(|&kv| (kv as f64 - 1.0) / (4.0 * PI * PI)).product();
    let d32 = (field.disc as f64).powf(1.5);
    Ok((z2 * d32 / res * arch * m1, z2 * z2 * d32 / (res * res) * arch * m2))
}

/// (M⁽¹⁾)²/(2N(𝔮)M⁽²⁾), the ε = 0 proportion.
pub fn proportion_bound(k: &WeightVector, q: &IdealData, xi: f64) -> Result<f64> {
    let (m1, m2) = moment_main_terms(k, q, xi)?;
    Ok(m1 * m1 / (2.0 * level_norm(q)? * m2))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarmonicNormalizers {
    /// Asymptotic Σ_π 1/L(1, π, Ad).
    pub count_harmonic: f64,
    /// The proportion factor of the harmonic non-vanishing bound.
    pub r_qk: f64,
    /// Asymptotic #𝓕(𝐤, 𝔮).
    pub dim_estimate: f64,
    /// ξ^{1/3}N(𝔮)^{1/3}∥𝐤∥^{5/12}.
    pub amp_bound: f64,
    pub premise_ok: bool,
}

pub fn harmonic_normalizers(field: &Field, k: &WeightVector, q: &IdealData, xi: f64) -> Result<HarmonicNormalizers> {
    let nq = level_norm(q)?;
    let kn = k.norm();
    let arch: f64 = k.weights().iter().map(|&kv| (kv as f64 - 1.0) / (4.0 * PI * PI)).product();
    let d32 = (field.disc as f64).powf(1.5);
    // V_𝔮 − 1_{𝔮≠𝒪} is N(𝔮) in both cases
    let count_harmonic = 2.0 * nq * zeta_q(q, 2.0) * d32 * arch;
    let dim_estimate = 2.0 * nq * d32 * zeta_f2(field)? * arch;
    let lx = xi.ln();
    let r_qk = if q.is_unit() {
        lx / (xi * kn).ln()
    } else {
        let x = 1.0 / nq;
        (1.0 - x * x).powi(3) * lx
            / ((1.0 + x).powi(4) * nq.ln() + 2.0 * (1.0 + 10.0 * x * x + 4.0 * x.powi(3) + x.powi(4)) * (xi * kn).ln())
    };
    let amp_bound = (xi * nq).powf(1.0 / 3.0) * kn.powf(5.0 / 12.0);
    let premise_ok = xi <= nq.sqrt() * kn.powf(0.25);
    if !premise_ok {
        log::warn!("xi = {xi} exceeds N(q)^(1/2)||k||^(1/4); the amplification bound premise fails");
    }
    Ok(HarmonicNormalizers { count_harmonic, r_qk, dim_estimate, amp_bound, premise_ok })
}

// ---------------------------------------------------------------------------
// Exact regime limits.

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    LevelAspect,
    WeightAspectFullLevel,
    WeightAspectFixedQ,
    DoubleLimit,
    Uniform,
}

impl Regime {
    pub const ALL: [Regime; 5] = [
        Regime::LevelAspect,
        Regime::WeightAspectFullLevel,
        Regime::WeightAspectFixedQ,
        Regime::DoubleLimit,
        Regime::Uniform,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Regime::LevelAspect => "level-aspect",
            Regime::WeightAspectFullLevel => "weight-aspect",
            Regime::WeightAspectFixedQ => "weight-aspect-fixed-q",
            Regime::DoubleLimit => "double-limit",
            Regime::Uniform => "uniform",
        }
    }
}

impl std::str::FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Regime> {
        Regime::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown regime {s:?}")))
    }
}

/// A limiting regime with ξ = N(𝔮)^a ∥𝐤∥^b.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeSpec {
    pub regime: Regime,
    /// Fixed N(𝔮) where the regime holds the level fixed.
    pub nq: Option<u64>,
    pub a: f64,
    pub b: f64,
}

impl RegimeSpec {
    /// ξ at the window edge a = 1/2, b = 1/4; fixed-level regimes default to N(𝔮) = 2.
    pub fn edge(regime: Regime) -> RegimeSpec {
        let nq = matches!(regime, Regime::WeightAspectFixedQ).then_some(2);
        RegimeSpec { regime, nq, a: 0.5, b: 0.25 }
    }

    pub fn with_level(mut self, nq: u64) -> Self {
        self.nq = Some(nq);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=0.5).contains(&self.a) || !(0.0..=0.25).contains(&self.b) || self.a + self.b <= 0.0 {
            return Err(Error::Config(format!("exponents (a, b) = ({}, {}) outside the window", self.a, self.b)));
        }
        match self.regime {
            Regime::LevelAspect if self.a <= 0.0 => Err(Error::Config("level aspect needs a > 0".into())),
            Regime::WeightAspectFullLevel | Regime::WeightAspectFixedQ | Regime::DoubleLimit if self.b <= 0.0 => {
                Err(Error::Config("weight aspect needs b > 0".into()))
            }
            Regime::WeightAspectFixedQ => match self.nq {
                Some(n) if crate::nfcore::arith::is_prime(n) => Ok(()),
                _ => Err(Error::Config("fixed-level regime needs a prime norm N(q)".into())),
            },
            _ => Ok(()),
        }
    }
}

type Poly = Vec<BigRational>;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn trim(mut p: Poly) -> Poly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn poly_add(a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![BigRational::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] += y;
    }
    trim(out)
}

/// Rational function of N with rational coefficients.
#[derive(Clone, Debug)]
struct RatFn {
    num: Poly,
    den: Poly,
}

impl RatFn {
    fn constant(c: BigRational) -> RatFn {
        RatFn { num: trim(vec![c]), den: vec![BigRational::one()] }
    }

    fn poly(coeffs: &[i64]) -> RatFn {
        RatFn { num: trim(coeffs.iter().map(|&c| rat(c, 1)).collect()), den: vec![BigRational::one()] }
    }

    fn mul(&self, o: &RatFn) -> RatFn {
        RatFn { num: poly_mul(&self.num, &o.num), den: poly_mul(&self.den, &o.den) }
    }

    fn div(&self, o: &RatFn) -> RatFn {
        RatFn { num: poly_mul(&self.num, &o.den), den: poly_mul(&self.den, &o.num) }
    }

    fn add(&self, o: &RatFn) -> RatFn {
        RatFn {
            num: poly_add(&poly_mul(&self.num, &o.den), &poly_mul(&o.num, &self.den)),
            den: poly_mul(&self.den, &o.den),
        }
    }

    fn scale(&self, c: &BigRational) -> RatFn {
        self.mul(&RatFn::constant(c.clone()))
    }

    fn eval(&self, n: &BigRational) -> Result<BigRational> {
        let ev = |p: &Poly| p.iter().rev().fold(BigRational::zero(), |acc, c| acc * n + c);
        let d = ev(&self.den);
        if d.is_zero() {
            return Err(Error::Pole(format!("rational function at N = {n}")));
        }
        Ok(ev(&self.num) / d)
    }

    fn limit_at_infinity(&self) -> Result<BigRational> {
        let (dn, dd) = (self.num.len(), self.den.len());
        if dd == 0 {
            return Err(Error::Pole("zero denominator".into()));
        }
        if dn < dd {
            Ok(BigRational::zero())
        } else if dn == dd {
            Ok(self.num[dn - 1].clone() / self.den[dd - 1].clone())
        } else {
            Err(Error::Convergence("ratio diverges as N grows".into()))
        }
    }
}

/// (M⁽¹⁾)²/(2N·M⁽²⁾) at prime level as a rational function of N, given the
/// limiting values l1 of log(ξN^{1/2}∥𝐤∥)/log ξ and l2 of log(ξ∥𝐤∥)/log ξ.
fn prime_level_ratio(delta: bool, l1: &BigRational, l2: &BigRational) -> RatFn {
    let n = RatFn::poly(&[0, 1]);
    let zeta1 = n.div(&RatFn::poly(&[-1, 1]));
    let zeta2 = RatFn::poly(&[0, 0, 1]).div(&RatFn::poly(&[-1, 0, 1]));
    let c = zeta1.mul(&zeta1).mul(&zeta1).div(&zeta2);
    let inv_1px = n.div(&RatFn::poly(&[1, 1]));
    let d = if delta { 1 } else { 0 };
    let m1 = RatFn::poly(&[2 - 4 * d, 2]).mul(&zeta1);
    let first = RatFn::poly(&[4, 4]).mul(&c).scale(l1);
    let second = zeta2.mul(&inv_1px).scale(&(rat(-16 * d, 1) * l2));
    let m2 = first.add(&second);
    m1.mul(&m1).div(&RatFn::poly(&[0, 2]).mul(&m2))
}

fn to_rational(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::Config(format!("{x} is not finite")))
}

fn min_rat(a: BigRational, b: BigRational) -> BigRational {
    if a < b {
        a
    } else {
        b
    }
}

/// Exact limit of the main-term proportion in the given regime, obtained by
/// substituting the limiting log-ratios and taking the limit over ℚ(N).
/// Where the parity δ_𝐤 is not pinned by the regime both parities are taken
/// and the smaller value returned. The uniform regime returns the infimum
/// over prime levels N ≤ 10⁴ of the fixed-level limits together with the
/// full-level value.
pub fn exact_regime_limit(spec: &RegimeSpec) -> Result<BigRational> {
    spec.validate()?;
    let a = to_rational(spec.a)?;
    let b = to_rational(spec.b)?;
    let half = rat(1, 2);
    let one = BigRational::one();
    let weight_ratio = || (&b + &one) / &b;
    match spec.regime {
        Regime::LevelAspect => {
            let l1 = (&a + &half) / &a;
            let v0 = prime_level_ratio(false, &l1, &one).limit_at_infinity()?;
            let v1 = prime_level_ratio(true, &l1, &one).limit_at_infinity()?;
            Ok(min_rat(v0, v1))
        }
        Regime::WeightAspectFullLevel => {
            // M1 = 4, M2 = 8·l1 at full level with δ_𝐤 = 1
            let l1 = weight_ratio();
            Ok(rat(16, 1) / (rat(16, 1) * l1))
        }
        Regime::WeightAspectFixedQ => {
            let l = weight_ratio();
            let n = BigRational::from_integer(BigInt::from(spec.nq.unwrap_or(2)));
            let v0 = prime_level_ratio(false, &l, &l).eval(&n)?;
            let v1 = prime_level_ratio(true, &l, &l).eval(&n)?;
            Ok(min_rat(v0, v1))
        }
        Regime::DoubleLimit => {
            let l = weight_ratio();
            let v0 = prime_level_ratio(false, &l, &l).limit_at_infinity()?;
            let v1 = prime_level_ratio(true, &l, &l).limit_at_infinity()?;
            Ok(min_rat(v0, v1))
        }
        Regime::Uniform => {
            let l = weight_ratio();
            let mut best = rat(16, 1) / (rat(16, 1) * l.clone());
            let r0 = prime_level_ratio(false, &l, &l);
            let r1 = prime_level_ratio(true, &l, &l);
            for p in primes_up_to(10_000) {
                let n = BigRational::from_integer(BigInt::from(p));
                best = min_rat(best, min_rat(r0.eval(&n)?, r1.eval(&n)?));
            }
            Ok(best)
        }
    }
}

/// The published constant for each regime: 1/4, 1/5, (1 − N^{−1})³/(10(1 + N^{−1})),
/// 1/10 and 1/100.
pub fn regime_limit(spec: &RegimeSpec) -> Result<BigRational> {
    spec.validate()?;
    Ok(match spec.regime {
        Regime::LevelAspect => rat(1, 4),
        Regime::WeightAspectFullLevel => rat(1, 5),
        Regime::WeightAspectFixedQ => {
            let n = BigRational::from_integer(BigInt::from(spec.nq.unwrap_or(2)));
            let x = BigRational::one() / n;
            let one = BigRational::one();
            let num = (&one - &x) * (&one - &x) * (&one - &x);
            num / (rat(10, 1) * (one + x))
        }
        Regime::DoubleLimit => rat(1, 10),
        Regime::Uniform => rat(1, 100),
    })
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    let (n, d) = (r.numer(), r.denom());
    match (n.to_f64(), d.to_f64()) {
        (Some(a), Some(b)) if b.is_finite() && a.is_finite() => a / b,
        _ => {
            let shift = (d.bits() as i64 - 60).max(0) as usize;
            let n2 = (n.abs() >> shift).to_f64().unwrap_or(f64::INFINITY);
            let d2 = (d >> shift).to_f64().unwrap_or(f64::INFINITY);
            if n.is_negative() {
                -n2 / d2
            } else {
                n2 / d2
            }
        }
    }
}

/// One sampled point of the uniform window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformSample {
    pub nq: u64,
    pub k: u32,
    pub xi: f64,
    pub bound: f64,
}

/// Smallest proportion bound over a deterministic grid of (N(𝔮), k) with
/// N(𝔮)·k ≤ max_product, F = ℚ, ξ at the window edge. Full level with
/// k ≡ 2 (mod 4) is excluded: every central value vanishes there.
pub fn uniform_grid_minimum(max_product: f64) -> Result<UniformSample> {
    let mut levels: Vec<u64> = vec![1];
    let primes = primes_up_to((max_product / 4.0) as usize);
    levels.extend(primes.iter().take(40));
    let mut idx = 40.0f64;
    while (idx as usize) < primes.len() {
        levels.push(primes[idx as usize]);
        idx *= 1.3;
    }
    let mut best: Option<UniformSample> = None;
    for &nq in &levels {
        let q = if nq == 1 {
            IdealData::unit()
        } else {
            IdealData::from_integer(&Field::rational(), nq)?
        };
        let mut ks: Vec<u32> = (4..=40).step_by(2).collect();
        let mut kf = 42.0f64;
        while nq as f64 * kf <= max_product {
            let k = (kf as u32) & !1;
            ks.extend([k, k + 2]);
            kf *= 1.25;
        }
        for k in ks {
            if nq as f64 * k as f64 > max_product {
                continue;
            }
            let w = WeightVector::from_weights(vec![k])?;
            if q.is_unit() && !w.delta() {
                continue;
            }
            let xi = (nq as f64).sqrt() * (k as f64).powf(0.25);
            let bound = proportion_bound(&w, &q, xi)?;
            if best.is_none_or(|b| bound < b.bound) {
                best = Some(UniformSample { nq, k, xi, bound });
            }
        }
    }
    best.ok_or_else(|| Error::Config("empty uniform grid".into()))
}
