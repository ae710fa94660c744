//! Second-moment identity over ℚ at full level: the spectral sum
//! Σ λ_f(n)L(1/2,f)²/L(1,f,Ad) against singular main term plus regular orbits.

use rtf_moments::oracle::{level1_eigenforms, spectral_secondmoment};
use rtf_moments::orbital2::{secondmoment_geometric, SecondMomentParams};

fn main() -> rtf_moments::Result<()> {
    println!("{:>3} {:>2} {:>20} {:>20} {:>10}", "k", "n", "spectral", "geometric", "rel.err");
    for k in [12u32, 16, 20, 22] {
        let forms = level1_eigenforms(k, 1000)?;
        for n in 1..=4u64 {
            let p = SecondMomentParams::rational(k, 1, n, 1e-10)?;
            let g = secondmoment_geometric(&p)?;
            let s = spectral_secondmoment(k, 1, n, &forms, None)?.total().unwrap_or(f64::NAN);
            let rel = (s - g.total()).abs() / s.abs().max(1e-3);
            println!("{k:>3} {n:>2} {s:>20.12e} {:>20.12e} {rel:>10.2e}", g.total());
        }
    }
    Ok(())
}
