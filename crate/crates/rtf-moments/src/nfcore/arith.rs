//! Rational-integer helpers: factoring, valuations, Kronecker symbol,
//! modular arithmetic and p-adic fractional parts.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::Zero;

pub type Q = Ratio<i128>;

/// Trial-division factorisation of |n| (n ≠ 0), primes ascending.
pub fn factor(n: u128) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut m = n;
    if m <= 1 {
        return out;
    }
    let mut p: u128 = 2;
    while p * p <= m {
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            out.push((p as u64, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        out.push((m as u64, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factor(n as u128).len() == 1 && factor(n as u128)[0].1 == 1
}

pub fn is_squarefree(n: u64) -> bool {
    factor(n as u128).iter().all(|&(_, e)| e == 1)
}

/// p-adic valuation of a nonzero integer.
pub fn val_int(n: i128, p: u64) -> i64 {
    debug_assert!(n != 0);
    let p = p as i128;
    let mut m = n.abs();
    let mut e = 0;
    while m % p == 0 {
        m /= p;
        e += 1;
    }
    e
}

/// p-adic valuation of a nonzero rational.
pub fn val_rat(x: &Q, p: u64) -> i64 {
    val_int(*x.numer(), p) - val_int(*x.denom(), p)
}

/// Primes up to `n` by the sieve of Eratosthenes.
pub fn primes_up_to(n: usize) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i as u64).collect()
}

pub fn pow_mod(mut b: i128, mut e: u64, m: i128) -> i128 {
    let mut r = 1 % m;
    b = b.rem_euclid(m);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// Inverse of a modulo m (gcd(a, m) = 1).
pub fn inv_mod(a: i128, m: i128) -> i128 {
    let g = a.rem_euclid(m).extended_gcd(&m);
    debug_assert_eq!(g.gcd, 1);
    g.x.rem_euclid(m)
}

/// Kronecker symbol (D/n) for n ≥ 1.
pub fn kronecker(d: i64, n: u64) -> i32 {
    let mut result = 1;
    let mut n = n;
    let mut a = d as i128;
    if n == 0 {
        return if d.abs() == 1 { 1 } else { 0 };
    }
    while n % 2 == 0 {
        n /= 2;
        let r = a.rem_euclid(8);
        if a % 2 == 0 {
            return 0;
        }
        if r == 3 || r == 5 {
            result = -result;
        }
    }
    // Jacobi symbol (a/n) for odd n
    let mut m = n as i128;
    a = a.rem_euclid(m);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = m % 8;
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut m);
        if a % 4 == 3 && m % 4 == 3 {
            result = -result;
        }
        a %= m;
    }
    if m == 1 {
        result
    } else {
        0
    }
}

/// Roots of x² + bx + c modulo p, lifted to modulo p^k (simple roots only).
pub fn quadratic_roots_lifted(b: i128, c: i128, p: u64, k: u32) -> Vec<i128> {
    let pi = p as i128;
    let mut roots = Vec::new();
    for r in 0..pi {
        if (r * r + b * r + c).rem_euclid(pi) == 0 {
            roots.push(r);
        }
    }
    let mut out = Vec::new();
    for r0 in roots {
        let deriv = (2 * r0 + b).rem_euclid(pi);
        if deriv == 0 {
            continue;
        }
        let mut r = r0;
        let mut modulus = pi;
        for _ in 1..k {
            let next = modulus * pi;
            let f = (r * r + b * r + c).rem_euclid(next);
            let d = (2 * r + b).rem_euclid(next);
            r = (r - f * inv_mod(d, next)).rem_euclid(next);
            modulus = next;
        }
        out.push(r);
    }
    out
}

/// Fractional part {x}_p ∈ [0, 1) of a rational at p.
pub fn frac_part_p(x: &Q, p: u64) -> Q {
    let den = *x.denom();
    let s = val_int(den, p);
    if s <= 0 {
        return Q::zero();
    }
    let ps = (p as i128).pow(s as u32);
    let rest = den / ps;
    let num = x.numer().rem_euclid(ps) * inv_mod(rest, ps) % ps;
    Q::new(num, ps)
}
