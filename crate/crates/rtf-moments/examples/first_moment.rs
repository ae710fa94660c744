//! First-moment identity over ℚ: Σ λ_f(n)L(1/2,f)/L(1,f,Ad) against the
//! main term plus the Kummer-function tail, including the forced vanishing
//! at k ≡ 2 (mod 4).

use rtf_moments::oracle::{level1_eigenforms, spectral_firstmoment};
use rtf_moments::orbital1::{firstmoment_geometric, FirstMomentParams};
use rtf_moments::orbital2::SecondMomentParams;

fn main() -> rtf_moments::Result<()> {
    for k in [12u32, 14, 16, 18] {
        let forms = level1_eigenforms(k, 1000)?;
        for n in [1u64, 2, 3] {
            let p: FirstMomentParams = SecondMomentParams::rational(k, 1, n, 1e-10)?.into();
            let g = firstmoment_geometric(&p)?;
            let s = spectral_firstmoment(k, 1, n, &forms, None)?.total().unwrap_or(f64::NAN);
            println!(
                "k={k:<3} n={n}  main {:+.10e}  tail {:+.10e}  geometric {:+.12e}  spectral {:+.12e}",
                g.main_term,
                g.tail_value,
                g.total(),
                s
            );
        }
    }
    Ok(())
}
