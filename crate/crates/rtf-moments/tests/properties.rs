use num_complex::Complex64;
use proptest::prelude::*;
use rtf_moments::mollify::{
    exact_regime_limit, mollifier_kernel, mollifier_kernel_quadrature, normalization_gap, proportion_bound, regime_limit,
    triple_series_brute, triple_series_euler, MollifierSpec, Regime, RegimeSpec,
};
use rtf_moments::nfcore::zeta::functional_equation_residual;
use rtf_moments::nfcore::{dedekind_zeta, moebius, tau, Field, IdealData, WeightVector};
use rtf_moments::orbital1::{i_fin, i_inf_place};
use rtf_moments::orbital2::{regular_sum_with, secondmoment_geometric, RegularOptions, SecondMomentParams};
use rtf_moments::specfun::bounds::legendre_p_majorant;
use rtf_moments::specfun::hyper::{kummer_imag_bessel, kummer_imag_integral};
use rtf_moments::specfun::{gauss_2f1_check, legendre_p, legendre_q};

fn ideal(n: u64) -> IdealData {
    IdealData::from_integer(&Field::rational(), n).unwrap()
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn unit_or(q: u64) -> IdealData {
    if q == 1 {
        IdealData::unit()
    } else {
        ideal(q)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tau_and_moebius_are_multiplicative(a in 1u64..100, b in 1u64..100) {
        prop_assume!(gcd(a, b) == 1);
        let (ia, ib, iab) = (ideal(a), ideal(b), ideal(a * b));
        prop_assert_eq!(tau(&iab).unwrap(), tau(&ia).unwrap() * tau(&ib).unwrap());
        prop_assert_eq!(moebius(&iab).unwrap(), moebius(&ia).unwrap() * moebius(&ib).unwrap());
    }

    #[test]
    fn quadratic_tau_is_multiplicative(a in 1u64..60, b in 1u64..60) {
        prop_assume!(gcd(a, b) == 1);
        let f = Field::real_quadratic(5).unwrap();
        let i = |n| IdealData::from_integer(&f, n).unwrap();
        prop_assert_eq!(tau(&i(a * b)).unwrap(), tau(&i(a)).unwrap() * tau(&i(b)).unwrap());
        prop_assert_eq!(moebius(&i(a * b)).unwrap(), moebius(&i(a)).unwrap() * moebius(&i(b)).unwrap());
    }

    #[test]
    fn dedekind_functional_equation(d in prop::sample::select(vec![1u64, 5, 13]), t in -10.0f64..10.0) {
        let f = if d == 1 { Field::rational() } else { Field::real_quadratic(d).unwrap() };
        let r = functional_equation_residual(&f, Complex64::new(2.0, t)).unwrap();
        prop_assert!(r < 1e-10, "residual {r}");
    }

    #[test]
    fn zeta_laurent_expansion(h in 1e-4f64..1e-2) {
        for f in [Field::rational(), Field::real_quadratic(5).unwrap()] {
            let z = dedekind_zeta(&f, Complex64::new(1.0 + h, 0.0)).unwrap().re;
            let dev = (z - f.residue / h - f.c0).abs();
            prop_assert!(dev <= 10.0 * h, "deviation {dev} at h = {h}");
        }
    }

    #[test]
    fn legendre_p_recurrence(n in 1usize..200, x in -1.0f64..1.0) {
        let nf = n as f64;
        let lhs = (nf + 1.0) * legendre_p(n + 1, x);
        let rhs = (2.0 * nf + 1.0) * x * legendre_p(n, x) - nf * legendre_p(n - 1, x);
        prop_assert!((lhs - rhs).abs() < 1e-12 * (2.0 * nf + 1.0));
    }

    #[test]
    fn legendre_q_recurrence(n in 1usize..60, x in 1.01f64..20.0) {
        let nf = n as f64;
        let (q0, q1, q2) = (legendre_q(n - 1, x).unwrap(), legendre_q(n, x).unwrap(), legendre_q(n + 1, x).unwrap());
        let lhs = (nf + 1.0) * q2;
        let rhs = (2.0 * nf + 1.0) * x * q1 - nf * q0;
        prop_assert!((lhs - rhs).abs() <= 1e-12 * ((2.0 * nf + 1.0) * x * q1).abs());
    }

    #[test]
    fn legendre_p_uniform_bound(n in 1usize..=200, x in -0.999f64..0.999) {
        prop_assert!(legendre_p(n, x).abs() <= legendre_p_majorant(n, x));
    }

    #[test]
    fn gauss_hypergeometric_identity(k in prop::sample::select(vec![4u32, 8, 12, 20, 32]), z in 0.05f64..0.95) {
        prop_assert!(gauss_2f1_check(k, z).unwrap() < 1e-8);
    }

    #[test]
    fn kummer_methods_agree(k in prop::sample::select(vec![4u32, 12, 24, 40]), x in -50.0f64..50.0) {
        prop_assume!(x.abs() > 1.0);
        let a = kummer_imag_integral(k, x);
        let b = kummer_imag_bessel(k, x);
        prop_assert!((a - b).norm() < 1e-9, "{a} vs {b}");
    }

    #[test]
    fn archimedean_modulus_is_even(k in prop::sample::select(vec![12u32, 14, 20, 26]), t in 0.05f64..20.0) {
        let a = i_inf_place(t, k).norm();
        let b = i_inf_place(-t, k).norm();
        prop_assert!((a - b).abs() <= 1e-14 * a.max(1e-300));
    }

    #[test]
    fn finite_orbital_gate_at_q(t in 1i64..200, q in prop::sample::select(vec![2u64, 5, 7])) {
        let f = Field::rational();
        let v = i_fin(&f, &f.from_int(t as i128), &IdealData::unit(), &ideal(q));
        if t as u64 % q == 0 {
            prop_assert!(v.unwrap().norm() > 0.0);
        } else {
            prop_assert!(v.map(|z| z.norm() == 0.0).unwrap_or(true));
        }
    }

    #[test]
    fn mollifier_kernel_matches_contour(norm in 1.0f64..100.0, xi in 2.0f64..30.0) {
        let w = mollifier_kernel(norm, xi);
        prop_assert!(w >= 0.0);
        if norm >= xi {
            prop_assert_eq!(w, 0.0);
        }
        prop_assume!((norm - xi).abs() > 1e-2);
        let quad = mollifier_kernel_quadrature(norm, xi, 2000.0);
        prop_assert!((quad - w).abs() < 1e-6, "{quad} vs {w}");
    }

    #[test]
    fn normalizations_agree(k in (6u32..60).prop_map(|k| 2 * k), q in prop::sample::select(vec![1u64, 2, 3, 7, 101]), e in 0.05f64..0.25) {
        let w = WeightVector::from_weights(vec![k]).unwrap();
        let xi = ((q as f64).sqrt() * k as f64).powf(e).max(1.5);
        prop_assert!(normalization_gap(&w, &unit_or(q), xi).unwrap() < 1e-12);
    }

    #[test]
    fn proportion_bound_is_monotone_in_mollifier_length(
        k in (6u32..200).prop_map(|k| 4 * k), q in prop::sample::select(vec![1u64, 3, 11]), e in 0.02f64..0.24
    ) {
        let w = WeightVector::from_weights(vec![k]).unwrap();
        let base = (q as f64).sqrt() * k as f64;
        let a = proportion_bound(&w, &unit_or(q), base.powf(e)).unwrap();
        let b = proportion_bound(&w, &unit_or(q), base.powf(e + 0.01)).unwrap();
        prop_assert!(b >= a - 1e-12, "{a} -> {b}");
    }

    #[test]
    fn exact_fixed_level_limit_dominates_published(idx in 0usize..300) {
        let primes: Vec<u64> = (2u64..2000).filter(|&p| (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0)).collect();
        let p = primes[idx % primes.len()];
        let spec = RegimeSpec::edge(Regime::WeightAspectFixedQ).with_level(p);
        prop_assert!(exact_regime_limit(&spec).unwrap() >= regime_limit(&spec).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn euler_product_equals_brute_series(
        a in (2.0f64..3.0, -5.0f64..5.0), b in (2.0f64..3.0, -5.0f64..5.0), c in (2.0f64..3.0, -5.0f64..5.0)
    ) {
        let spec = MollifierSpec::rational(10.0).unwrap();
        let (s, s1, s2) = (Complex64::new(a.0, a.1), Complex64::new(b.0, b.1), Complex64::new(c.0, c.1));
        let brute = triple_series_brute(s, s1, s2, &spec, 3000).unwrap();
        let euler = triple_series_euler(s, s1, s2, &spec).unwrap().value;
        prop_assert!((brute - euler).norm() / euler.norm() < 1e-8);
    }

    #[test]
    fn regular_sum_reflection_and_box_doubling(
        k in prop::sample::select(vec![12u32, 16, 18]), n in 1u64..6, q in prop::sample::select(vec![1u64, 5])
    ) {
        prop_assume!(n % q != 0 || q == 1);
        let p = SecondMomentParams::rational(k, q, n, 1e-9).unwrap();
        let plain = regular_sum_with(&p, RegularOptions::default()).unwrap();
        let reflected = regular_sum_with(&p, RegularOptions { reflect: true, ..RegularOptions::default() });
        if q == 1 {
            let reflected = reflected.unwrap();
            prop_assert!((plain.regular_sum - reflected.regular_sum).abs() <= 1e-9 + plain.truncation_bound);
        } else {
            prop_assert!(reflected.is_err());
        }
        let wide = regular_sum_with(
            &p,
            RegularOptions { max_shell: plain.shells_evaluated + 1, ..RegularOptions::default() },
        );
        if let Ok(wide) = wide {
            prop_assert!((plain.regular_sum - wide.regular_sum).abs() <= plain.truncation_bound.max(1e-15));
        }
    }

    #[test]
    fn forced_vanishing_main_term_is_zero(k in (3u32..20).prop_map(|j| 4 * j + 2), n in 1u64..5) {
        let g = secondmoment_geometric(&SecondMomentParams::rational(k, 1, n, 1e-8).unwrap()).unwrap();
        prop_assert_eq!(g.main_term, 0.0);
    }
}
