use rtf_moments::oracle::{
    eta_newform_lambdas, level1_eigenforms, spectral_firstmoment, spectral_secondmoment, NewformRecord, Source,
};
use rtf_moments::orbital1::{firstmoment_geometric, FirstMomentParams};
use rtf_moments::orbital2::{oldform_l_factor, secondmoment_geometric, SecondMomentParams};

fn eta_record(weight: u32, level: u64) -> NewformRecord {
    NewformRecord::from_eigenvalues(weight, level, eta_newform_lambdas(weight, level, 1001).unwrap(), Source::Ingested)
        .unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(1e-3)
}

#[test]
fn level_two_weight_twelve_is_all_old() {
    // S_12(Γ_0(2)) is spanned by Δ(z) and Δ(2z)
    let forms = level1_eigenforms(12, 1000).unwrap();
    for n in [1u64, 3, 5, 7] {
        let p = SecondMomentParams::rational(12, 2, n, 1e-10).unwrap();
        let g2 = secondmoment_geometric(&p).unwrap().total();
        let s2 = spectral_secondmoment(12, 2, n, &forms, Some(&[])).unwrap();
        assert!(rel(s2.total().unwrap(), g2) < 1e-8, "second n={n}: {s2:?} vs {g2}");
        let g1 = firstmoment_geometric(&FirstMomentParams::from(p)).unwrap().total();
        let s1 = spectral_firstmoment(12, 2, n, &forms, Some(&[])).unwrap();
        assert!(rel(s1.total().unwrap(), g1) < 1e-8, "first n={n}: {s1:?} vs {g1}");
    }
}

#[test]
fn eta_product_newforms_close_the_identity() {
    for (k, q, hecke) in [(8u32, 2u64, &[1u64, 3][..]), (6, 3, &[1][..])] {
        let new = [eta_record(k, q)];
        for &n in hecke {
            let p = SecondMomentParams::rational(k, q, n, 1e-8).unwrap();
            let g2 = secondmoment_geometric(&p).unwrap().total();
            let s2 = spectral_secondmoment(k, q, n, &[], Some(&new)).unwrap().total().unwrap();
            assert!(rel(s2, g2) < 1e-6, "second k={k} q={q} n={n}: {s2} vs {g2}");
            let g1 = firstmoment_geometric(&FirstMomentParams::from(p)).unwrap().total();
            let s1 = spectral_firstmoment(k, q, n, &[], Some(&new)).unwrap().total().unwrap();
            assert!(rel(s1, g1) < 1e-6, "first k={k} q={q} n={n}: {s1} vs {g1}");
        }
    }
}

#[test]
fn steinberg_eigenvalue_at_the_level() {
    for (k, q) in [(8u32, 2u64), (6, 3)] {
        let r = eta_record(k, q);
        let lq = r.lambda_at(q).unwrap();
        assert!((lq * lq - 1.0 / q as f64).abs() < 1e-14);
        assert!(r.central_value > 0.0 && r.adjoint_value > 0.0);
    }
}

#[test]
fn old_part_uses_the_twisted_local_factor() {
    let forms = level1_eigenforms(12, 1000).unwrap();
    let delta = &forms[0];
    let l5 = delta.lambda_at(5).unwrap();
    let want = 2.0 * 6.0 / 5.0 * oldform_l_factor(l5, 5).unwrap() * delta.central_value.powi(2) / delta.adjoint_value;
    let got = spectral_secondmoment(12, 5, 1, &forms, None).unwrap();
    assert!((got.old_part - want).abs() < 1e-14 * want);
    assert!(got.new_part.is_none());
    // L_q(1/2, π × χ) with χ(ϖ) = −1
    let direct = 1.0 / (1.0 + l5 / 5f64.sqrt() + 0.2);
    assert!((oldform_l_factor(l5, 5).unwrap() - direct).abs() < 1e-15);
}

#[test]
fn level_one_spectral_examples() {
    let forms = level1_eigenforms(12, 1000).unwrap();
    let d = &forms[0];
    let s = spectral_secondmoment(12, 1, 1, &forms, None).unwrap();
    assert!((s.total().unwrap() - d.central_value.powi(2) / d.adjoint_value).abs() < 1e-15);
    for k in [14u32, 18, 22, 26] {
        let forms = level1_eigenforms(k, 400).unwrap();
        assert_eq!(spectral_secondmoment(k, 1, 1, &forms, None).unwrap().total(), Some(0.0));
    }
}

#[test]
fn hecke_index_must_be_coprime_to_level() {
    let forms = level1_eigenforms(12, 100).unwrap();
    assert!(spectral_secondmoment(12, 5, 10, &forms, None).is_err());
}
