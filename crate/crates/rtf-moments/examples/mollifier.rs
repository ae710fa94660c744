//! Mollifier data: the triple Dirichlet series in brute-force, Euler-product
//! and factored form, E(0,0,0), and mollified main terms at level 1.

use num_complex::Complex64;
use rtf_moments::mollify::{
    e_zero, e_zero_closed, mollified_main_terms, mollifier_value, triple_series_brute, triple_series_euler,
    triple_series_factored, MollifierSpec,
};
use rtf_moments::nfcore::{Field, IdealData, WeightVector};
use rtf_moments::oracle::level1_eigenforms;

fn main() -> rtf_moments::Result<()> {
    let spec = MollifierSpec::rational(10.0)?;
    let (s, s1, s2) = (Complex64::new(2.2, 1.0), Complex64::new(2.5, -3.0), Complex64::new(2.0, 0.5));
    let b = triple_series_brute(s, s1, s2, &spec, 3000)?;
    let e = triple_series_euler(s, s1, s2, &spec)?;
    let f = triple_series_factored(s, s1, s2, &spec)?;
    println!("brute    {b:.14}\neuler    {:.14} (primes <= {}, tail {:.1e})\nfactored {f:.14}", e.value, e.prime_bound, e.tail_bound);

    let field = Field::rational();
    for q in [1u64, 2, 7] {
        let qi = if q == 1 { IdealData::unit() } else { IdealData::from_integer(&field, q)? };
        let sp = MollifierSpec::new(field.clone(), 10.0, qi.clone())?;
        println!("E(0,0,0) q={q}: product {:.15} closed {:.15}", e_zero(&sp)?.value.re, e_zero_closed(&field, &qi)?);
    }

    for k in [12u32, 24] {
        let xi = (k as f64).powf(0.25);
        let forms = level1_eigenforms(k, 1000)?;
        let sp = MollifierSpec::rational(xi)?;
        let mut first = 0.0;
        for r in &forms {
            first += mollifier_value(r, &sp)? * r.central_value / r.adjoint_value;
        }
        let (m1, m2) = mollified_main_terms(&field, &WeightVector::from_weights(vec![k])?, &IdealData::unit(), xi)?;
        println!("k={k}: mollified first moment {first:.8} (main {m1:.8}), main second {m2:.8}");
    }
    Ok(())
}
