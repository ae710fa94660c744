//! Legendre functions, the Kummer-type archimedean integral by two methods,
//! and the Dedekind zeta function of a real quadratic field.

use num_complex::Complex64;
use rtf_moments::nfcore::{dedekind_zeta, Field};
use rtf_moments::specfun::{curly_p, ferrers_q, kummer_imag, legendre_p, legendre_q};
use rtf_moments::specfun::hyper::{kummer_imag_bessel, kummer_imag_integral};

fn main() -> rtf_moments::Result<()> {
    for n in [0usize, 5, 11, 30] {
        println!("P_{n}(0.3) = {:+.15e}   Q_{n}(3) = {:+.15e}   Q_{n}^F(0.3) = {:+.15e}", legendre_p(n, 0.3), legendre_q(n, 3.0)?, ferrers_q(n, 0.3));
    }
    for u in [-3.0, -0.7, 0.25, 4.0] {
        println!("orbital weight k=12 at u={u:+}: {:+.15e}", curly_p(u, 12)?);
    }
    for x in [0.5, 2.0, 8.0] {
        let a = kummer_imag_integral(12, x);
        let b = kummer_imag_bessel(12, x);
        println!("Kummer k=12 x={x}: integral {a:.12e} bessel {b:.12e} chosen {:.12e}", kummer_imag(12, x));
    }
    let f = Field::real_quadratic(5)?;
    for s in [Complex64::new(2.0, 0.0), Complex64::new(0.5, 14.0), Complex64::new(-1.0, 3.0)] {
        println!("ζ_Q(√5)({s}) = {:.12e}", dedekind_zeta(&f, s)?);
    }
    Ok(())
}
