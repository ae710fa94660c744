//! Ideals in factored form, weight vectors and the multiplicative functions
//! τ, μ and ρ.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;

use super::arith::{factor, Q};
use super::field::{Field, FieldElement, PrimeIdeal, PrimeKind};
use crate::{Error, Result};

/// A fractional ideal stored as a map from prime ideals to exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IdealData {
    factors: BTreeMap<PrimeIdeal, i64>,
}

impl IdealData {
    /// The unit ideal 𝒪_F.
    pub fn unit() -> Self {
        IdealData::default()
    }

    pub fn prime_power(pr: PrimeIdeal, e: i64) -> Self {
        let mut out = IdealData::unit();
        if e != 0 {
            out.factors.insert(pr, e);
        }
        out
    }

    /// The ideal generated by a positive rational integer n.
    pub fn from_integer(field: &Field, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidIdeal("zero ideal".into()));
        }
        let mut out = IdealData::unit();
        for (p, e) in factor(n as u128) {
            for pr in field.primes_above(p) {
                let mult = pr.e() as i64 * e as i64;
                out = out.mul(&IdealData::prime_power(pr, mult));
            }
        }
        Ok(out)
    }

    /// Parse `"p1^e1*p2^e2"`. A bare integer denotes the principal ideal it
    /// generates. Prime ideals of a quadratic field carry a tag: `a`/`b` for
    /// the two primes above a split p (ascending root order) or `s<root>`,
    /// `i` for inert and `r` for ramified primes.
    pub fn parse(field: &Field, text: &str) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() || text == "1" || text == "O" {
            return Ok(IdealData::unit());
        }
        let mut out = IdealData::unit();
        for token in text.split('*') {
            let token = token.trim();
            let (base, exp) = match token.split_once('^') {
                Some((b, e)) => (
                    b,
                    e.parse::<i64>()
                        .map_err(|_| Error::InvalidIdeal(format!("bad exponent in {token:?}")))?,
                ),
                None => (token, 1),
            };
            let digits: String = base.chars().take_while(|c| c.is_ascii_digit()).collect();
            let tag = &base[digits.len()..];
            let p: u64 = digits
                .parse()
                .map_err(|_| Error::InvalidIdeal(format!("bad prime in {token:?}")))?;
            if tag.is_empty() {
                // a bare integer: the principal ideal it generates
                out = out.mul(&IdealData::from_integer(field, p)?.pow(exp));
                continue;
            }
            let above = field.primes_above(p);
            let pr = match tag {
                "a" | "b" if above.len() == 2 => above[if tag == "a" { 0 } else { 1 }].clone(),
                "i" | "r" if above.len() == 1 => {
                    let want = if tag == "i" { PrimeKind::Inert } else { PrimeKind::Ramified };
                    if above[0].kind != want {
                        return Err(Error::InvalidIdeal(format!("{p} is not {}", if tag == "i" { "inert" } else { "ramified" })));
                    }
                    above[0].clone()
                }
                t if t.starts_with('s') => {
                    let root: i128 = t[1..]
                        .parse()
                        .map_err(|_| Error::InvalidIdeal(format!("bad root tag in {token:?}")))?;
                    above
                        .iter()
                        .find(|pr| pr.kind == PrimeKind::Split { root })
                        .cloned()
                        .ok_or_else(|| Error::InvalidIdeal(format!("no split prime {token:?}")))?
                }
                _ => return Err(Error::InvalidIdeal(format!("tag {tag:?} does not fit prime {p}"))),
            };
            out = out.mul(&IdealData::prime_power(pr, exp));
        }
        Ok(out)
    }

    pub fn factors(&self) -> impl Iterator<Item = (&PrimeIdeal, i64)> {
        self.factors.iter().map(|(p, &e)| (p, e))
    }

    pub fn exponent(&self, pr: &PrimeIdeal) -> i64 {
        self.factors.get(pr).copied().unwrap_or(0)
    }

    pub fn primes(&self) -> impl Iterator<Item = &PrimeIdeal> {
        self.factors.keys()
    }

    pub fn norm(&self) -> Q {
        let mut n = Q::one();
        for (pr, &e) in &self.factors {
            let np = Q::from_integer(pr.norm() as i128);
            n *= if e >= 0 { np.pow(e as i32) } else { np.recip().pow((-e) as i32) };
        }
        n
    }

    /// Norm of an integral ideal as an integer.
    pub fn norm_u64(&self) -> Result<u64> {
        self.require_integral()?;
        Ok(self.norm().to_integer() as u64)
    }

    pub fn norm_f64(&self) -> f64 {
        let n = self.norm();
        *n.numer() as f64 / *n.denom() as f64
    }

    pub fn is_unit(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn is_integral(&self) -> bool {
        self.factors.values().all(|&e| e >= 0)
    }

    pub fn is_prime(&self) -> bool {
        self.factors.len() == 1 && self.factors.values().all(|&e| e == 1)
    }

    fn require_integral(&self) -> Result<()> {
        if self.is_integral() {
            Ok(())
        } else {
            Err(Error::InvalidIdeal(format!("{self} is not integral")))
        }
    }

    pub fn coprime(&self, other: &IdealData) -> bool {
        self.factors.keys().all(|p| !other.factors.contains_key(p))
    }

    pub fn mul(&self, other: &IdealData) -> IdealData {
        let mut out = self.clone();
        for (pr, &e) in &other.factors {
            let entry = out.factors.entry(pr.clone()).or_insert(0);
            *entry += e;
            if *entry == 0 {
                out.factors.remove(pr);
            }
        }
        out
    }

    pub fn inv(&self) -> IdealData {
        IdealData { factors: self.factors.iter().map(|(p, &e)| (p.clone(), -e)).collect() }
    }

    pub fn pow(&self, m: i64) -> IdealData {
        if m == 0 {
            return IdealData::unit();
        }
        IdealData { factors: self.factors.iter().map(|(p, &e)| (p.clone(), e * m)).collect() }
    }

    /// A generator (class number one).
    pub fn generator(&self, field: &Field) -> Result<FieldElement> {
        let mut g = field.from_int(1);
        for (pr, &e) in &self.factors {
            let pg = field.prime_generator(pr)?;
            let base = if e >= 0 { pg } else { field.inv(&pg)? };
            for _ in 0..e.abs() {
                g = field.mul(&g, &base);
            }
        }
        Ok(g)
    }

    /// Membership test x ∈ 𝔞 (zero belongs to every ideal).
    pub fn contains(&self, field: &Field, x: &FieldElement) -> Result<bool> {
        if x.is_zero() {
            return Ok(true);
        }
        for (pr, &e) in &self.factors {
            if field.valuation(x, pr)? < e {
                return Ok(false);
            }
        }
        for p in field.support_primes(x) {
            for pr in field.primes_above(p) {
                if !self.factors.contains_key(&pr) && field.valuation(x, &pr)? < 0 {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

impl fmt::Display for IdealData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(p, &e)| if e == 1 { p.label() } else { format!("{}^{}", p.label(), e) })
            .collect();
        f.write_str(&parts.join("*"))
    }
}

/// Number of integral divisors ∏(e_v + 1).
pub fn tau(n: &IdealData) -> Result<u64> {
    n.require_integral()?;
    Ok(n.factors().map(|(_, e)| e as u64 + 1).product())
}

/// Möbius function of an integral ideal.
pub fn moebius(n: &IdealData) -> Result<i32> {
    n.require_integral()?;
    if n.factors().any(|(_, e)| e > 1) {
        return Ok(0);
    }
    Ok(if n.factors().count() % 2 == 0 { 1 } else { -1 })
}

/// ρ(𝔫) = ∏_{𝔭|𝔫} (1 + N𝔭^{−1})^{−1}.
pub fn rho(n: &IdealData) -> Result<Q> {
    n.require_integral()?;
    let mut r = Q::one();
    for (pr, _) in n.factors() {
        let np = Q::from_integer(pr.norm() as i128);
        r *= np / (np + Q::one());
    }
    Ok(r)
}

/// Weight vector 𝐤 = (k_v) of even weights ≥ 4, one per real place.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightVector {
    weights: Vec<u32>,
}

impl WeightVector {
    pub fn new(field: &Field, weights: Vec<u32>) -> Result<Self> {
        if weights.len() != field.degree {
            return Err(Error::Config(format!(
                "{} weights given for a field of degree {}",
                weights.len(),
                field.degree
            )));
        }
        WeightVector::from_weights(weights)
    }

    pub fn from_weights(weights: Vec<u32>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Config("empty weight vector".into()));
        }
        if let Some(k) = weights.iter().find(|&&k| k < 4 || k % 2 == 1) {
            return Err(Error::Config(format!("weight {k} is not even and >= 4")));
        }
        Ok(WeightVector { weights })
    }

    pub fn parallel(k: u32, degree: usize) -> Result<Self> {
        WeightVector::from_weights(vec![k; degree])
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    /// ∥𝐤∥ = ∏ k_v.
    pub fn norm(&self) -> f64 {
        self.weights.iter().map(|&k| k as f64).product()
    }

    /// δ_𝐤 = 1 iff Σ k_v ≡ 0 (mod 4).
    pub fn delta(&self) -> bool {
        self.weights.iter().sum::<u32>() % 4 == 0
    }

    /// δ_{𝐤,𝔮}: 1 at proper level, δ_𝐤 at full level.
    pub fn delta_q(&self, q: &IdealData) -> bool {
        !q.is_unit() || self.delta()
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.weights.iter().map(|k| k.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    #[test]
    fn parse_and_norm() {
        let q = Field::rational();
        let n = IdealData::parse(&q, "2^2*3").unwrap();
        assert_eq!(n.norm(), Q::from_integer(12));
        assert_eq!(IdealData::parse(&q, "12").unwrap(), n);
        let f = Field::real_quadratic(5).unwrap();
        let a = IdealData::parse(&f, "11a*2i^2*5r").unwrap();
        assert_eq!(a.norm(), Q::from_integer(11 * 16 * 5));
        let eleven = IdealData::parse(&f, "11").unwrap();
        assert_eq!(eleven, IdealData::parse(&f, "11a*11b").unwrap());
        assert_eq!(IdealData::parse(&f, "5").unwrap(), IdealData::parse(&f, "5r^2").unwrap());
        assert!(IdealData::parse(&f, "7a").is_err());
        assert!(IdealData::parse(&f, "11a^-1").unwrap().norm() == Q::new(1, 11));
    }

    #[test]
    fn tau_examples() {
        let q = Field::rational();
        assert_eq!(tau(&IdealData::unit()).unwrap(), 1);
        assert_eq!(tau(&IdealData::parse(&q, "7^4").unwrap()).unwrap(), 5);
        assert_eq!(tau(&IdealData::parse(&q, "2^2*3").unwrap()).unwrap(), 6);
        assert!(tau(&IdealData::parse(&q, "2^-1").unwrap()).is_err());
    }

    #[test]
    fn rho_examples() {
        let q = Field::rational();
        assert_eq!(rho(&IdealData::unit()).unwrap(), Q::one());
        assert_eq!(rho(&IdealData::parse(&q, "3").unwrap()).unwrap(), Q::new(3, 4));
        assert_eq!(rho(&IdealData::parse(&q, "3^2").unwrap()).unwrap(), Q::new(3, 4));
    }

    #[test]
    fn weights() {
        let w = WeightVector::from_weights(vec![12]).unwrap();
        assert!(w.delta());
        assert!(!WeightVector::from_weights(vec![14]).unwrap().delta());
        assert!(WeightVector::from_weights(vec![14, 14]).unwrap().delta());
        assert!(WeightVector::from_weights(vec![3]).is_err());
        let q5 = IdealData::parse(&Field::rational(), "5").unwrap();
        assert!(WeightVector::from_weights(vec![14]).unwrap().delta_q(&q5));
    }

    #[test]
    fn generator_and_membership() {
        let f = Field::real_quadratic(5).unwrap();
        let a = IdealData::parse(&f, "11a^2*5^-1").unwrap();
        let g = a.generator(&f).unwrap();
        assert_eq!(f.norm(&g).abs(), a.norm());
        assert!(a.contains(&f, &g).unwrap());
        let half = f.from_rational(Q::new(1, 2));
        assert!(!a.contains(&f, &half).unwrap());
    }
}
