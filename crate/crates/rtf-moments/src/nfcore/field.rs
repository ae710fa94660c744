//! Totally real fields of degree one or two, their elements and prime ideals.

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::arith::{factor, frac_part_p, is_squarefree, kronecker, quadratic_roots_lifted, val_int, val_rat, Q};
use super::zeta::{l_one_and_derivative, EULER_GAMMA};
use crate::{Error, Result};

/// Splitting behaviour of a prime ideal over its rational prime.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PrimeKind {
    /// The field is ℚ.
    Rational,
    /// `P = (p, ω − root)`, root reduced modulo p.
    Split { root: i128 },
    Inert,
    Ramified,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeIdeal {
    pub p: u64,
    pub kind: PrimeKind,
}

impl PrimeIdeal {
    pub fn rational(p: u64) -> Self {
        PrimeIdeal { p, kind: PrimeKind::Rational }
    }

    /// Residue degree.
    pub fn f(&self) -> u32 {
        if self.kind == PrimeKind::Inert {
            2
        } else {
            1
        }
    }

    /// Ramification index.
    pub fn e(&self) -> u32 {
        if self.kind == PrimeKind::Ramified {
            2
        } else {
            1
        }
    }

    pub fn norm(&self) -> u64 {
        self.p.pow(self.f())
    }

    pub fn label(&self) -> String {
        match &self.kind {
            PrimeKind::Rational => format!("{}", self.p),
            PrimeKind::Split { root } => format!("{}s{}", self.p, root),
            PrimeKind::Inert => format!("{}i", self.p),
            PrimeKind::Ramified => format!("{}r", self.p),
        }
    }
}

impl fmt::Display for PrimeIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// An element `a + bω` with exact rational coordinates and cached real embeddings.
#[derive(Clone, Debug)]
pub struct FieldElement {
    pub coords: [Q; 2],
    pub embeddings: Vec<f64>,
}

impl FieldElement {
    pub fn is_zero(&self) -> bool {
        self.coords[0].is_zero() && self.coords[1].is_zero()
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.coords == other.coords
    }
}

impl Eq for FieldElement {}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FieldElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coords.cmp(&other.coords)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coords[1].is_zero() {
            write!(f, "{}", self.coords[0])
        } else {
            write!(f, "{} + {}ω", self.coords[0], self.coords[1])
        }
    }
}

/// A totally real field of degree 1 or 2 with class number one.
#[derive(Clone, Debug)]
pub struct Field {
    pub degree: usize,
    /// Absolute discriminant D_F.
    pub disc: u64,
    /// Squarefree radicand d (1 for ℚ).
    pub radicand: u64,
    /// Res_{s=1} ζ_F(s).
    pub residue: f64,
    /// Constant term of the Laurent expansion of ζ_F at s = 1.
    pub c0: f64,
    pub fundamental_unit: Option<FieldElement>,
    // ω is a root of x² − t·x + n
    omega_t: i128,
    omega_n: i128,
}

impl Field {
    pub fn rational() -> Field {
        Field {
            degree: 1,
            disc: 1,
            radicand: 1,
            residue: 1.0,
            c0: EULER_GAMMA,
            fundamental_unit: None,
            omega_t: 0,
            omega_n: 0,
        }
    }

    /// ℚ(√d) for squarefree d > 1 of class number one.
    pub fn real_quadratic(d: u64) -> Result<Field> {
        if d < 2 {
            return Err(Error::UnsupportedField(format!("radicand {d} is not > 1")));
        }
        if !is_squarefree(d) {
            return Err(Error::UnsupportedField(format!("radicand {d} is not squarefree")));
        }
        let (disc, t, n) = if d % 4 == 1 {
            (d, 1i128, (1 - d as i128) / 4)
        } else {
            (4 * d, 0i128, -(d as i128))
        };
        let mut field = Field {
            degree: 2,
            disc,
            radicand: d,
            residue: 0.0,
            c0: 0.0,
            fundamental_unit: None,
            omega_t: t,
            omega_n: n,
        };
        let unit = field.find_fundamental_unit()?;
        let log_eps = unit.embeddings[0].ln();
        field.fundamental_unit = Some(unit);
        field.check_class_number_one()?;
        field.residue = 2.0 * log_eps / (disc as f64).sqrt();
        let (l1, dl1) = l_one_and_derivative(disc as i64);
        field.c0 = EULER_GAMMA * l1 + dl1;
        Ok(field)
    }

    /// Parse `"Q"` or `"Q(sqrtD)"`.
    pub fn from_spec(spec: &str) -> Result<Field> {
        let s: String = spec.chars().filter(|c| !c.is_whitespace()).collect();
        if s == "Q" {
            return Ok(Field::rational());
        }
        let inner = s
            .strip_prefix("Q(sqrt")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::UnsupportedField(format!("cannot parse field descriptor {spec:?}")))?;
        let inner = inner.strip_prefix('(').and_then(|r| r.strip_suffix(')')).unwrap_or(inner);
        let d: u64 = inner
            .parse()
            .map_err(|_| Error::UnsupportedField(format!("radicand {inner:?} is not a positive integer")))?;
        Field::real_quadratic(d)
    }

    pub fn is_rational(&self) -> bool {
        self.degree == 1
    }

    pub fn name(&self) -> String {
        if self.is_rational() {
            "Q".into()
        } else {
            format!("Q(sqrt{})", self.radicand)
        }
    }

    fn omega_embeddings(&self) -> [f64; 2] {
        let sd = (self.disc as f64).sqrt();
        let t = self.omega_t as f64;
        [(t + sd) / 2.0, (t - sd) / 2.0]
    }

    pub fn element(&self, a: Q, b: Q) -> FieldElement {
        let (af, bf) = (a.to_f64().unwrap(), b.to_f64().unwrap());
        let embeddings = if self.is_rational() {
            debug_assert!(b.is_zero());
            vec![af]
        } else {
            let w = self.omega_embeddings();
            vec![af + bf * w[0], af + bf * w[1]]
        };
        FieldElement { coords: [a, b], embeddings }
    }

    pub fn from_rational(&self, a: Q) -> FieldElement {
        self.element(a, Q::zero())
    }

    pub fn from_int(&self, a: i128) -> FieldElement {
        self.from_rational(Q::from_integer(a))
    }

    pub fn add(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        self.element(x.coords[0] + y.coords[0], x.coords[1] + y.coords[1])
    }

    pub fn neg(&self, x: &FieldElement) -> FieldElement {
        self.element(-x.coords[0], -x.coords[1])
    }

    pub fn mul(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        let [a, b] = x.coords;
        let [c, d] = y.coords;
        let n = Q::from_integer(self.omega_n);
        let t = Q::from_integer(self.omega_t);
        self.element(a * c - n * b * d, a * d + b * c + t * b * d)
    }

    pub fn conj(&self, x: &FieldElement) -> FieldElement {
        let [a, b] = x.coords;
        self.element(a + Q::from_integer(self.omega_t) * b, -b)
    }

    pub fn norm(&self, x: &FieldElement) -> Q {
        let [a, b] = x.coords;
        a * a + Q::from_integer(self.omega_t) * a * b + Q::from_integer(self.omega_n) * b * b
    }

    pub fn trace(&self, x: &FieldElement) -> Q {
        if self.is_rational() {
            return x.coords[0];
        }
        let [a, b] = x.coords;
        Q::from_integer(2) * a + Q::from_integer(self.omega_t) * b
    }

    pub fn inv(&self, x: &FieldElement) -> Result<FieldElement> {
        if x.is_zero() {
            return Err(Error::Domain("inverse of zero".into()));
        }
        let n = self.norm(x);
        let c = self.conj(x);
        Ok(self.element(c.coords[0] / n, c.coords[1] / n))
    }

    /// Whether x lies in 𝒪_F.
    pub fn is_integral(&self, x: &FieldElement) -> bool {
        x.coords[0].is_integer() && x.coords[1].is_integer()
    }

    /// Write x = (A + Bω)/m with integers A, B and m > 0.
    fn integral_parts(&self, x: &FieldElement) -> (i128, i128, i128) {
        let m = x.coords[0].denom().lcm(x.coords[1].denom());
        let a = x.coords[0].numer() * (m / x.coords[0].denom());
        let b = x.coords[1].numer() * (m / x.coords[1].denom());
        (a, b, m)
    }

    /// Rational primes over which x is not a unit.
    pub fn support_primes(&self, x: &FieldElement) -> Vec<u64> {
        let (a, b, m) = self.integral_parts(x);
        let y = self.element(Q::from_integer(a), Q::from_integer(b));
        let ny = self.norm(&y).to_integer().unsigned_abs();
        let mut ps: Vec<u64> = factor(ny).into_iter().map(|(p, _)| p).collect();
        ps.extend(factor(m as u128).into_iter().map(|(p, _)| p));
        ps.sort_unstable();
        ps.dedup();
        ps
    }

    /// Prime ideals above the rational prime p.
    pub fn primes_above(&self, p: u64) -> Vec<PrimeIdeal> {
        if self.is_rational() {
            return vec![PrimeIdeal::rational(p)];
        }
        match kronecker(self.disc as i64, p) {
            0 => vec![PrimeIdeal { p, kind: PrimeKind::Ramified }],
            -1 => vec![PrimeIdeal { p, kind: PrimeKind::Inert }],
            _ => {
                let mut roots = quadratic_roots_lifted(-self.omega_t, self.omega_n, p, 1);
                roots.sort_unstable();
                roots.into_iter().map(|r| PrimeIdeal { p, kind: PrimeKind::Split { root: r } }).collect()
            }
        }
    }

    /// Exact valuation v_P(x), x ≠ 0.
    pub fn valuation(&self, x: &FieldElement, pr: &PrimeIdeal) -> Result<i64> {
        if x.is_zero() {
            return Err(Error::Domain("valuation of zero".into()));
        }
        let p = pr.p;
        if self.is_rational() {
            return Ok(val_rat(&x.coords[0], p));
        }
        let (a, b, m) = self.integral_parts(x);
        let vm = val_int(m, p);
        Ok(match pr.kind {
            PrimeKind::Rational => val_rat(&x.coords[0], p),
            PrimeKind::Inert => {
                let va = if a == 0 { i64::MAX } else { val_int(a, p) };
                let vb = if b == 0 { i64::MAX } else { val_int(b, p) };
                va.min(vb) - vm
            }
            PrimeKind::Ramified => {
                let ny = self.norm(&self.element(Q::from_integer(a), Q::from_integer(b)));
                val_rat(&ny, p) - 2 * vm
            }
            PrimeKind::Split { root } => {
                let ny = self.norm(&self.element(Q::from_integer(a), Q::from_integer(b)));
                let bound = val_rat(&ny, p) as u32 + 1;
                let r = self.lifted_root(p, root, bound);
                let z = a + b * r;
                let vz = if z == 0 { bound as i64 } else { val_int(z, p).min(bound as i64) };
                vz - vm
            }
        })
    }

    fn lifted_root(&self, p: u64, root: i128, precision: u32) -> i128 {
        quadratic_roots_lifted(-self.omega_t, self.omega_n, p, precision)
            .into_iter()
            .find(|r| r.rem_euclid(p as i128) == root)
            .expect("split prime has a lifted root")
    }

    /// Local fractional part y ∈ [0, 1) with ψ_P(x) = exp(−2πi·y), where
    /// ψ = ψ_ℚ ∘ Tr.
    pub fn local_fraction(&self, x: &FieldElement, pr: &PrimeIdeal) -> Q {
        let p = pr.p;
        match pr.kind {
            PrimeKind::Rational => frac_part_p(&x.coords[0], p),
            PrimeKind::Inert | PrimeKind::Ramified => frac_part_p(&self.trace(x), p),
            PrimeKind::Split { root } => {
                let (a, b, m) = self.integral_parts(x);
                let s = val_int(m, p).max(0) as u32;
                if s == 0 {
                    return Q::zero();
                }
                let r = self.lifted_root(p, root, s + 1);
                let pk = (p as i128).pow(s + 1);
                let z = (a + b * r).rem_euclid(pk);
                frac_part_p(&Q::new(z, m), p)
            }
        }
    }

    /// Exponent of the different at P.
    pub fn different_exponent(&self, pr: &PrimeIdeal) -> i64 {
        if self.is_rational() || pr.kind != PrimeKind::Ramified {
            return 0;
        }
        // √D = 2ω − t generates the different
        let root_disc = self.element(Q::from_integer(-self.omega_t), Q::from_integer(2));
        self.valuation(&root_disc, pr).expect("nonzero")
    }

    /// A generator of the principal prime ideal P.
    pub fn prime_generator(&self, pr: &PrimeIdeal) -> Result<FieldElement> {
        match pr.kind {
            PrimeKind::Rational | PrimeKind::Inert => Ok(self.from_int(pr.p as i128)),
            _ => self
                .search_generator(pr)
                .ok_or_else(|| Error::UnsupportedField(format!("{} has non-principal prime {}", self.name(), pr))),
        }
    }

    fn search_generator(&self, pr: &PrimeIdeal) -> Option<FieldElement> {
        let eps = self.fundamental_unit.as_ref()?.embeddings[0];
        let bound = ((pr.p as f64) * eps).sqrt() * (1.0 + 1e-9) + 1e-9;
        let w = self.omega_embeddings();
        let sd = (self.disc as f64).sqrt();
        let b_max = (2.0 * bound / sd).ceil() as i128;
        for b in -b_max..=b_max {
            let bf = b as f64;
            let lo = (-bound - bf * w[0]).max(-bound - bf * w[1]).floor() as i128;
            let hi = (bound - bf * w[0]).min(bound - bf * w[1]).ceil() as i128;
            for a in lo..=hi {
                let n = a * a + self.omega_t * a * b + self.omega_n * b * b;
                if n.unsigned_abs() != pr.p as u128 {
                    continue;
                }
                let x = self.element(Q::from_integer(a), Q::from_integer(b));
                if self.valuation(&x, pr).ok() == Some(1) {
                    return Some(x);
                }
            }
        }
        None
    }

    fn find_fundamental_unit(&self) -> Result<FieldElement> {
        let disc = self.disc as i128;
        let isqrt = {
            let mut r = (disc as f64).sqrt() as i128;
            while r * r > disc {
                r -= 1;
            }
            while (r + 1) * (r + 1) <= disc {
                r += 1;
            }
            r
        };
        // continued fraction of ω = (t + √D)/2
        let (mut pp, mut qq) = (self.omega_t, 2i128);
        let (mut h_prev, mut h) = (1i128, 0i128);
        let (mut k_prev, mut k) = (0i128, 1i128);
        for _ in 0..10_000 {
            if qq <= 0 {
                break;
            }
            let a = Integer::div_floor(&(pp + isqrt), &qq);
            let h_next = a.checked_mul(h_prev).and_then(|v| v.checked_add(h));
            let k_next = a.checked_mul(k_prev).and_then(|v| v.checked_add(k));
            let (Some(hn), Some(kn)) = (h_next, k_next) else { break };
            h = h_prev;
            h_prev = hn;
            k = k_prev;
            k_prev = kn;
            let cand = self.element(Q::from_integer(h_prev), Q::from_integer(-k_prev));
            if self.norm(&cand).abs().is_one() {
                let mut unit = self.conj(&cand);
                if unit.embeddings[0] < 0.0 {
                    unit = self.neg(&unit);
                }
                if unit.embeddings[0] < 1.0 {
                    unit = self.inv(&unit)?;
                }
                return Ok(unit);
            }
            pp = a * qq - pp;
            qq = (disc - pp * pp) / qq;
        }
        Err(Error::UnsupportedField(format!("fundamental unit of {} out of reach", self.name())))
    }

    fn check_class_number_one(&self) -> Result<()> {
        let minkowski = (self.disc as f64).sqrt() / 2.0;
        let mut p = 2u64;
        while (p as f64) <= minkowski {
            if factor(p as u128).len() == 1 && factor(p as u128)[0].1 == 1 {
                for pr in self.primes_above(p) {
                    if pr.kind != PrimeKind::Inert && self.search_generator(&pr).is_none() {
                        return Err(Error::UnsupportedField(format!(
                            "{} does not have class number one (prime {} is not principal)",
                            self.name(),
                            pr
                        )));
                    }
                }
            }
            p += 1;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i128, b: i128) -> Q {
        Q::new(a, b)
    }

    #[test]
    fn golden_ratio_unit() {
        let f = Field::from_spec("Q(sqrt5)").unwrap();
        assert_eq!(f.disc, 5);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let u = f.fundamental_unit.as_ref().unwrap();
        assert!((u.embeddings[0] - phi).abs() < 1e-14);
        let r = 2.0 * phi.ln() / 5f64.sqrt();
        assert!((f.residue - r).abs() < 1e-15);
    }

    #[test]
    fn larger_units() {
        let f = Field::real_quadratic(94).unwrap();
        let u = f.fundamental_unit.as_ref().unwrap();
        assert_eq!(u.coords, [q(2143295, 1), q(221064, 1)]);
        let f = Field::real_quadratic(13).unwrap();
        let u = f.fundamental_unit.as_ref().unwrap();
        assert!((u.embeddings[0] - (3.0 + 13f64.sqrt()) / 2.0).abs() < 1e-13);
    }

    #[test]
    fn discriminant_by_trace_form() {
        for d in [2u64, 3, 5, 6, 13, 21] {
            let f = Field::real_quadratic(d).unwrap();
            let one = f.from_int(1);
            let w = f.element(q(0, 1), q(1, 1));
            let t11 = f.trace(&one);
            let t12 = f.trace(&w);
            let t22 = f.trace(&f.mul(&w, &w));
            let det = t11 * t22 - t12 * t12;
            assert_eq!(det, Q::from_integer(f.disc as i128), "d={d}");
        }
    }

    #[test]
    fn class_number_guard() {
        assert!(Field::from_spec("Q(sqrt10)").is_err());
        assert!(Field::from_spec("Q(sqrt15)").is_err());
        assert!(Field::from_spec("Q(sqrt12)").is_err());
        assert!(Field::from_spec("Q(sqrt-3)").is_err());
        assert!(Field::from_spec("Q(sqrt7)").is_ok());
    }

    #[test]
    fn valuations_sum_to_norm() {
        let f = Field::real_quadratic(7).unwrap();
        let x = f.element(q(3, 2), q(5, 7));
        let nx = f.norm(&x);
        for p in [2u64, 3, 5, 7, 19, 29, 53] {
            let total: i64 = f
                .primes_above(p)
                .iter()
                .map(|pr| f.valuation(&x, pr).unwrap() * pr.f() as i64)
                .sum();
            assert_eq!(total, val_rat(&nx, p), "p={p}");
        }
    }

    #[test]
    fn split_generators_have_valuation_one() {
        let f = Field::real_quadratic(5).unwrap();
        let ps = f.primes_above(11);
        assert_eq!(ps.len(), 2);
        for pr in &ps {
            let g = f.prime_generator(pr).unwrap();
            assert_eq!(f.valuation(&g, pr).unwrap(), 1);
            let other = ps.iter().find(|o| *o != pr).unwrap();
            assert_eq!(f.valuation(&g, other).unwrap(), 0);
        }
    }

    #[test]
    fn different_exponents() {
        let f = Field::real_quadratic(5).unwrap();
        assert_eq!(f.different_exponent(&f.primes_above(5)[0]), 1);
        let f = Field::real_quadratic(2).unwrap();
        assert_eq!(f.different_exponent(&f.primes_above(2)[0]), 3);
        let f = Field::real_quadratic(3).unwrap();
        assert_eq!(f.different_exponent(&f.primes_above(2)[0]), 2);
    }

    #[test]
    fn local_fraction_reproduces_product_formula() {
        // the additive character is trivial on F: Σ_v {Tr x}_v ≡ Tr x (mod 1)
        let f = Field::real_quadratic(5).unwrap();
        let x = f.element(q(1, 11), q(3, 22));
        let mut total = Q::zero();
        for p in f.support_primes(&x) {
            for pr in f.primes_above(p) {
                total += f.local_fraction(&x, &pr);
            }
        }
        let diff = total - f.trace(&x);
        assert!(diff.is_integer());
    }
}
