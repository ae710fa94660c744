//! Spectral sides of the second- and first-moment identities over ℚ.

use serde::{Deserialize, Serialize};

use super::records::NewformRecord;
use crate::nfcore::zeta::local_zeta;
use crate::orbital2::oldform_l_factor;
use crate::{Error, Result};

/// Spectral side split into the level-1 (old) contribution and the
/// prime-level new part. At level 1 everything is in `new_part`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralMoment {
    pub old_part: f64,
    pub new_part: Option<f64>,
}

impl SpectralMoment {
    pub fn total(&self) -> Option<f64> {
        self.new_part.map(|v| v + self.old_part)
    }
}

fn check_records(records: &[NewformRecord], k: u32, level: u64) -> Result<()> {
    for r in records {
        if r.weight != k || r.level != level {
            return Err(Error::Config(format!(
                "record of weight {} level {} supplied for weight {k} level {level}",
                r.weight, r.level
            )));
        }
    }
    Ok(())
}

fn moment(
    power: i32,
    k: u32,
    q: u64,
    n: u64,
    level1: &[NewformRecord],
    new: Option<&[NewformRecord]>,
) -> Result<SpectralMoment> {
    if n % q == 0 && q > 1 {
        return Err(Error::Config(format!("n = {n} is not coprime to q = {q}")));
    }
    check_records(level1, k, 1)?;
    let level1_sum = |coef: &dyn Fn(&NewformRecord) -> f64| -> Result<f64> {
        let mut s = 0.0;
        for r in level1 {
            s += r.lambda_at(n)? * coef(r) * r.central_value.powi(power) / r.adjoint_value;
        }
        Ok(s)
    };
    if q == 1 {
        return Ok(SpectralMoment { old_part: 0.0, new_part: Some(level1_sum(&|_| 1.0)?) });
    }
    let nq = q as f64;
    let vq = nq + 1.0;
    // the second moment carries 2V/N, the first V/N
    let c = if power == 2 { 2.0 * vq / nq } else { vq / nq };
    let mut old = 0.0;
    for r in level1 {
        let lq = r.lambda_at(q)?;
        old += r.lambda_at(n)? * oldform_l_factor(lq, q)? * r.central_value.powi(power) / r.adjoint_value;
    }
    old *= c;
    let new_part = match new {
        None => None,
        Some(forms) => {
            check_records(forms, k, q)?;
            let z1 = local_zeta(Some(q), num_complex::Complex64::new(1.0, 0.0))?.re;
            let z2 = local_zeta(Some(q), num_complex::Complex64::new(2.0, 0.0))?.re;
            let mut s = 0.0;
            for r in forms {
                s += r.lambda_at(n)? * r.central_value.powi(power) / r.adjoint_value;
            }
            Some(s * z1 / (z2 * z2))
        }
    };
    Ok(SpectralMoment { old_part: old, new_part })
}

/// Σ_π λ_π(n)L(1/2,π)²/L^{(q)}(1,π,Ad), weighted by ζ_q(1)ζ_q(2)^{−2} on the
/// new part, plus the old-form term at prime level.
pub fn spectral_secondmoment(
    k: u32,
    q: u64,
    n: u64,
    level1: &[NewformRecord],
    new: Option<&[NewformRecord]>,
) -> Result<SpectralMoment> {
    moment(2, k, q, n, level1, new)
}

/// First-moment analogue of [`spectral_secondmoment`].
pub fn spectral_firstmoment(
    k: u32,
    q: u64,
    n: u64,
    level1: &[NewformRecord],
    new: Option<&[NewformRecord]>,
) -> Result<SpectralMoment> {
    moment(1, k, q, n, level1, new)
}
