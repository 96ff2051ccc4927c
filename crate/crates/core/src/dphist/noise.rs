use rand::Rng;

use crate::error::{invalid, Result};

/// Integer `k` with `Pr[k] proportional to exp(-|k| / scale)`, as the difference of two
/// geometric variables with ratio `r = exp(-1/scale)`.
pub fn discrete_laplace<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> Result<i64> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(invalid(format!(
            "laplace scale must be positive, got {scale}"
        )));
    }
    let ln_r = -1.0 / scale;
    let mut geometric = || {
        // inversion: Pr[G >= k] = r^k
        let u: f64 = 1.0 - rng.random::<f64>();
        (u.ln() / ln_r).floor() as i64
    };
    Ok(geometric() - geometric())
}

/// `Pr[k = 0] = (e^(1/scale) - 1) / (e^(1/scale) + 1)`.
pub fn discrete_laplace_zero_mass(scale: f64) -> f64 {
    let e = (1.0 / scale).exp();
    (e - 1.0) / (e + 1.0)
}
