//! Level-1 Hecke eigenforms with their central and adjoint L-values, and the
//! harmonic count Σ 1/L(1,f,Ad) against 2(k−1)/(4π²).

use std::f64::consts::PI;

use rtf_moments::oracle::level1_eigenforms;

fn main() -> rtf_moments::Result<()> {
    for k in [12u32, 24, 36] {
        for (i, r) in level1_eigenforms(k, 1000)?.iter().enumerate() {
            println!(
                "k={k} #{i}: λ(2) = {:+.12}, ε = {:+}, L(1/2) = {:.12}, L(1,Ad) = {:.12}",
                r.lambda[2],
                r.root_number,
                r.central_value,
                r.adjoint_value
            );
        }
    }
    for k in [12u32, 24, 40, 60, 80] {
        let forms = level1_eigenforms(k, 1000)?;
        let sum: f64 = forms.iter().map(|r| 1.0 / r.adjoint_value).sum();
        println!("k={k:<3} forms {:<2} harmonic ratio {:.10}", forms.len(), sum / (2.0 * (k as f64 - 1.0) / (4.0 * PI * PI)));
    }
    Ok(())
}
