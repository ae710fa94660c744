//! Prime level: old-form contribution from level-1 data, the predicted
//! new part, and the full identity against eta-product newforms.

use rtf_moments::oracle::{eta_newform_lambdas, level1_eigenforms, spectral_secondmoment, NewformRecord, Source};
use rtf_moments::orbital2::{secondmoment_geometric, SecondMomentParams};

fn main() -> rtf_moments::Result<()> {
    println!("predicted new-part second moment at n = 1");
    for k in [12u32, 16] {
        let forms = level1_eigenforms(k, 1000)?;
        for q in [5u64, 7, 11] {
            let g = secondmoment_geometric(&SecondMomentParams::rational(k, q, 1, 1e-8)?)?;
            let old = spectral_secondmoment(k, q, 1, &forms, None)?.old_part;
            println!("  k={k:<3} q={q:<3} geometric {:.10} old {:.10} new {:.10}", g.total(), old, g.total() - old);
        }
    }

    // η(z)^8η(2z)^8 spans the new space of weight 8 on Γ_0(2), and S_8(1) = 0
    let newform = NewformRecord::from_eigenvalues(8, 2, eta_newform_lambdas(8, 2, 1001)?, Source::Ingested)?;
    println!("weight 8, level 2: L(1/2) = {:.12}, L^(2)(1,Ad) = {:.12}", newform.central_value, newform.adjoint_value);
    for n in [1u64, 3, 5] {
        let g = secondmoment_geometric(&SecondMomentParams::rational(8, 2, n, 1e-10)?)?;
        let s = spectral_secondmoment(8, 2, n, &[], Some(std::slice::from_ref(&newform)))?;
        let total = s.total().unwrap_or(f64::NAN);
        println!("  n={n}: spectral {total:.12e} geometric {:.12e} rel.err {:.1e}", g.total(), (total - g.total()).abs() / total.abs());
    }
    Ok(())
}
