//! Non-vanishing proportions: published constants, exact limits of the
//! main-term ratio, and finite-(k, N) bounds.

use rtf_moments::mollify::{
    exact_regime_limit, proportion_bound, rational_to_f64, regime_limit, uniform_grid_minimum, Regime, RegimeSpec,
};
use rtf_moments::nfcore::{Field, IdealData, WeightVector};

fn main() -> rtf_moments::Result<()> {
    for regime in Regime::ALL {
        let spec = RegimeSpec::edge(regime);
        let published = regime_limit(&spec)?;
        let exact = exact_regime_limit(&spec)?;
        println!(
            "{:<22} published {:<10} ({:.6})  exact {:<12} ({:.6})",
            regime.name(),
            published.to_string(),
            rational_to_f64(&published),
            exact.to_string(),
            rational_to_f64(&exact)
        );
    }
    for nq in [2u64, 3, 5, 101] {
        let spec = RegimeSpec::edge(Regime::WeightAspectFixedQ).with_level(nq);
        println!(
            "fixed level N={nq:<4} published {:.6} exact {:.6}",
            rational_to_f64(&regime_limit(&spec)?),
            rational_to_f64(&exact_regime_limit(&spec)?)
        );
    }
    let q = IdealData::from_integer(&Field::rational(), 7)?;
    for k in [12u32, 100, 10_000] {
        let xi = 7f64.sqrt() * (k as f64).powf(0.25);
        println!("N=7 k={k:<6} bound {:.6}", proportion_bound(&WeightVector::from_weights(vec![k])?, &q, xi)?);
    }
    let min = uniform_grid_minimum(1e6)?;
    println!("uniform window minimum {:.6} at N={} k={}", min.bound, min.nq, min.k);
    Ok(())
}
