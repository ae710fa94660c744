//! Geometric side of the first-moment relative trace formula: the main term,
//! the Kummer-weighted tail sum and the old-form contribution.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::nfcore::arith::factor;
use crate::nfcore::enumerate::DEFAULT_CAP;
use crate::nfcore::{Field, FieldElement, IdealData, WeightVector};
use crate::oracle::NewformRecord;
use crate::orbital2::{
    geometric_tail_ratio, lattice_ball_count, oldform_l_factor, shell_elements, v_q, validate_levels, SecondMomentParams, BLOCK, TAIL_SAFETY,
};
use crate::specfun::hyper::{kummer_imag_bessel, kummer_imag_integral};
use crate::specfun::{kummer_imag, ln_gamma};
use crate::sum::{ordered_blocks, NeumaierComplex};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct FirstMomentParams {
    pub field: Field,
    pub k: WeightVector,
    pub q: IdealData,
    pub n: IdealData,
    pub tol: f64,
}

impl FirstMomentParams {
    pub fn new(field: Field, k: WeightVector, q: IdealData, n: IdealData, tol: f64) -> Result<Self> {
        validate_levels(&field, &k, &q, &n)?;
        if !(tol > 0.0) {
            return Err(Error::Config(format!("tolerance {tol} must be positive")));
        }
        Ok(FirstMomentParams { field, k, q, n, tol })
    }

    pub fn rational(k: u32, q: u64, n: u64, tol: f64) -> Result<Self> {
        let p = SecondMomentParams::rational(k, q, n, tol)?;
        Ok(p.into())
    }

    pub fn v_q(&self) -> f64 {
        v_q(&self.q)
    }
}

impl From<SecondMomentParams> for FirstMomentParams {
    fn from(p: SecondMomentParams) -> Self {
        FirstMomentParams { field: p.field, k: p.k, q: p.q, n: p.n, tol: p.tol }
    }
}

/// First-moment geometric side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FirstMomentBreakdown {
    pub main_term: f64,
    pub tail_value: f64,
    pub tail_bound: f64,
    pub shells_evaluated: u32,
}

impl FirstMomentBreakdown {
    pub fn total(&self) -> f64 {
        self.main_term + self.tail_value
    }
}

/// I_fin(t) for t ∈ 𝔮𝔫^{−1} − {0}, including V_𝔮/(N(𝔫)^{1/2}D_F²).
pub fn i_fin(field: &Field, t: &FieldElement, n: &IdealData, q: &IdealData) -> Result<Complex64> {
    if t.is_zero() {
        return Err(Error::Domain("t = 0".into()));
    }
    let a = q.mul(&n.inv());
    if !a.contains(field, t)? {
        return Err(Error::Domain(format!("{t} is not in q n^-1")));
    }
    let t_inv = field.inv(t)?;
    let mut primes: Vec<_> = field.support_primes(t).into_iter().flat_map(|p| field.primes_above(p)).collect();
    primes.extend(n.primes().cloned());
    primes.extend(q.primes().cloned());
    for pr in field.support_primes(&t_inv).into_iter().flat_map(|p| field.primes_above(p)) {
        primes.push(pr);
    }
    // places with a nontrivial different gate on e_v(t) ≥ d_v
    for (p, _) in factor(field.disc as u128) {
        primes.extend(field.primes_above(p));
    }
    primes.sort();
    primes.dedup();
    let mut out = Complex64::new(v_q(q) / (n.norm_f64().sqrt() * (field.disc as f64).powi(2)), 0.0);
    for pr in primes {
        let e = field.valuation(t, &pr)?;
        let y = field.local_fraction(&t_inv, &pr);
        let psibar = Complex64::from_polar(1.0, 2.0 * PI * (*y.numer() as f64 / *y.denom() as f64));
        let en = n.exponent(&pr);
        let factor = if q.exponent(&pr) > 0 {
            if e >= 1 {
                psibar
            } else {
                Complex64::new(0.0, 0.0)
            }
        } else if en > 0 {
            let mut f = Complex64::new(0.0, 0.0);
            if e > -en {
                f += psibar;
            }
            if e >= -en {
                f += 1.0;
            }
            f
        } else {
            let d = field.different_exponent(&pr);
            let mut f = Complex64::new(0.0, 0.0);
            if e >= d {
                f += 1.0;
            }
            if e > d {
                f += psibar * (pr.norm() as f64).powi(d as i32);
            }
            f
        };
        out *= factor;
        if out.norm() == 0.0 {
            return Ok(out);
        }
    }
    Ok(out)
}

/// Archimedean weight of the tail sum at one place:
/// (k−1)/(4π² i^{k/2}) (2π)^{k/2} Γ(k/2) / (|t|^{k/2} Γ(k)) ₁F₁(k/2; k; −2πi/t),
/// conjugated for t < 0.
pub fn i_arch(t: f64, k: u32) -> Complex64 {
    let h = k as f64 / 2.0;
    let ln_mod = (k as f64 - 1.0).ln() - (4.0 * PI * PI).ln() + h * (2.0 * PI).ln() + ln_gamma(h)
        - h * t.abs().ln()
        - ln_gamma(k as f64);
    let v = i_power(k) * ln_mod.exp() * kummer_imag(k, -2.0 * PI / t.abs());
    if t < 0.0 {
        v.conj()
    } else {
        v
    }
}

/// Same as [`i_arch`] with the Kummer function taken from its integral
/// representation (`bessel = false`) or its Bessel reduction.
pub fn i_arch_with(t: f64, k: u32, bessel: bool) -> Complex64 {
    let f = if bessel { kummer_imag_bessel(k, -2.0 * PI / t.abs()) } else { kummer_imag_integral(k, -2.0 * PI / t.abs()) };
    let base = kummer_imag(k, -2.0 * PI / t.abs());
    let scale = i_arch(t.abs(), k) / base;
    let v = scale * f;
    if t < 0.0 {
        v.conj()
    } else {
        v
    }
}

/// The factor of the unnormalised archimedean orbital integral,
/// (k−1)/(4πe^{2π} i^{k/2}) (4π)^k Γ(k/2)² /(|t|^{k/2} Γ(k)²) ₁F₁(k/2;k;−2πi/t),
/// at one place, with the conjugation rule for t < 0.
pub fn i_inf_place(t: f64, k: u32) -> Complex64 {
    let h = k as f64 / 2.0;
    let ln_mod = (k as f64 - 1.0).ln() - (4.0 * PI).ln() - 2.0 * PI + k as f64 * (4.0 * PI).ln() + 2.0 * ln_gamma(h)
        - h * t.abs().ln()
        - 2.0 * ln_gamma(k as f64);
    let v = i_power(k) * ln_mod.exp() * kummer_imag(k, -2.0 * PI / t.abs());
    if t < 0.0 {
        v.conj()
    } else {
        v
    }
}

/// i^{−k/2}.
fn i_power(k: u32) -> Complex64 {
    match (k / 2) % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

/// ∏_v i_inf_place(t_v, k_v).
pub fn i_inf(t: &FieldElement, k: &WeightVector) -> Complex64 {
    t.embeddings.iter().zip(k.weights()).map(|(&tv, &kv)| i_inf_place(tv, kv)).product()
}

/// ∏_v i_arch(t_v, k_v).
pub fn i_arch_product(t: &FieldElement, k: &WeightVector) -> Complex64 {
    t.embeddings.iter().zip(k.weights()).map(|(&tv, &kv)| i_arch(tv, kv)).product()
}

/// 2δ_{𝐤,𝔮}(N(𝔮)+1) D_F^{3/2} N(𝔫)^{−1/2} ∏ (k_v−1)/(4π²).
pub fn firstmoment_main(p: &FirstMomentParams) -> f64 {
    if !p.k.delta_q(&p.q) {
        return 0.0;
    }
    let nq = if p.q.is_unit() { 1.0 } else { p.q.norm_f64() };
    let mut v = 2.0 * (nq + 1.0) * (p.field.disc as f64).powf(1.5) / p.n.norm_f64().sqrt();
    for &k in p.k.weights() {
        v *= (k as f64 - 1.0) / (4.0 * PI * PI);
    }
    v
}

/// |I_arch(t)| ≤ this for |t| > 2^{m−1}, using |₁F₁(k/2;k;ix)| ≤ 1.
fn arch_majorant(k: u32, m: u32) -> f64 {
    let h = k as f64 / 2.0;
    let r = 2f64.powi(m as i32 - 1);
    ((k as f64 - 1.0).ln() - (4.0 * PI * PI).ln() + h * (2.0 * PI).ln() + ln_gamma(h) - h * r.ln() - ln_gamma(k as f64)).exp()
}

/// The tail term 2 D_F^{3/2} Σ_{t ∈ 𝔮𝔫^{−1} − {0}} I_fin(t) ∏ I_arch(t_v),
/// shell-truncated on |t|. Returns (value, truncation bound, shells).
pub fn tail_sum(p: &FirstMomentParams) -> Result<(f64, f64, u32)> {
    tail_sum_capped(p, 48, DEFAULT_CAP)
}

pub fn tail_sum_capped(p: &FirstMomentParams, max_shell: u32, cap: usize) -> Result<(f64, f64, u32)> {
    let a = p.q.mul(&p.n.inv());
    let pref = 2.0 * (p.field.disc as f64).powf(1.5);
    let k_min = *p.k.weights().iter().min().unwrap_or(&4);
    let d = p.field.degree;
    let mut total = NeumaierComplex::new();
    let mut bound = f64::INFINITY;
    let mut fin_seen = 0.0f64;
    let mut mass_seen = 0.0f64;
    let mut m = 0;
    loop {
        let elems = shell_elements(&p.field, &a, 1, 0, m, cap)?;
        let nblocks = elems.len().div_ceil(BLOCK);
        let partial: Vec<Result<(Complex64, f64, f64)>> = ordered_blocks(0..nblocks, |b| {
            let mut acc = NeumaierComplex::new();
            let mut abs_mass = 0.0;
            let mut max_fin = 0.0f64;
            for t in &elems[b * BLOCK..((b + 1) * BLOCK).min(elems.len())] {
                let f = i_fin(&p.field, t, &p.n, &p.q)?;
                if f.norm() == 0.0 {
                    continue;
                }
                let v = f * i_arch_product(t, &p.k);
                acc.add(v);
                abs_mass += v.norm();
                max_fin = max_fin.max(f.norm());
            }
            Ok((acc.value(), abs_mass, max_fin))
        });
        let mut shell = NeumaierComplex::new();
        let mut shell_abs = 0.0;
        let mut max_fin = 0.0f64;
        for r in partial {
            let (v, am, mf) = r?;
            shell.add(v);
            shell_abs += am;
            max_fin = max_fin.max(mf);
        }
        total.add(shell.value());
        fin_seen = fin_seen.max(max_fin);
        if m >= 3 {
            mass_seen *= 2f64.powi(d as i32) * arch_majorant(k_min, m) / arch_majorant(k_min, m - 1);
        }
        mass_seen = mass_seen.max(shell_abs);
        // no bound until a nonzero term has been seen
        if m >= 2 && fin_seen > 0.0 {
            let ratio = geometric_tail_ratio(m, d, |mm| arch_majorant(k_min, mm));
            bound = if p.field.is_rational() {
                let count = (elems.len() as f64).max(lattice_ball_count(&p.field, &a, 1, m));
                TAIL_SAFETY * count * fin_seen * arch_majorant(k_min, m) * ratio
            } else {
                TAIL_SAFETY * mass_seen * ratio
            };
            bound *= pref;
            if bound < p.tol {
                break;
            }
        }
        if m >= max_shell {
            return Err(Error::Convergence(format!("tail bound {bound:e} above tol after {m} shells")));
        }
        m += 1;
    }
    Ok((pref * total.value().re, bound, m + 1))
}

/// Main term plus tail.
pub fn firstmoment_geometric(p: &FirstMomentParams) -> Result<FirstMomentBreakdown> {
    let (tail_value, tail_bound, shells) = tail_sum(p)?;
    Ok(FirstMomentBreakdown { main_term: firstmoment_main(p), tail_value, tail_bound, shells_evaluated: shells })
}

/// Old-form part of the first moment at prime level q.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OldformFirst {
    /// (V_𝔮/N(𝔮)) Σ_π λ_π(𝔫) L_{π_𝔮} L(1/2,π)/L(1,π,Ad) over level-1 forms.
    pub oldform_exact: f64,
    /// 4δ_𝐤 D_F^{3/2} N(𝔫)^{−1/2} ∏ (k_v−1)/(4π²).
    pub oldform_asymptotic: f64,
}

pub fn oldform_firstmoment(level1: &[NewformRecord], k: u32, q: u64, n: u64) -> Result<OldformFirst> {
    if q < 2 {
        return Err(Error::Config("old forms need a prime level".into()));
    }
    let nq = q as f64;
    let mut s = 0.0;
    for r in level1 {
        if r.weight != k || r.level != 1 {
            return Err(Error::Config("old-form sum needs level-1 records of the same weight".into()));
        }
        s += r.lambda_at(n)? * oldform_l_factor(r.lambda_at(q)?, q)? * r.central_value / r.adjoint_value;
    }
    let delta = k % 4 == 0;
    let asym = if delta { 4.0 * (k as f64 - 1.0) / (4.0 * PI * PI) / (n as f64).sqrt() } else { 0.0 };
    Ok(OldformFirst { oldform_exact: (nq + 1.0) / nq * s, oldform_asymptotic: asym })
}
