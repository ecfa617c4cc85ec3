//! Incomplete gamma functions.
//!
//! `Γ(k, x) = ∫ₓ^∞ t^{k-1} e^{-t} dt` and `γ(k, x) = Γ(k) - Γ(k, x)`, both
//! unregularized. The power series is used for `x < k + 1` and the Lentz
//! continued fraction otherwise.

use crate::error::{Error, Result};

pub use statrs::function::gamma::{gamma, ln_gamma};

const MAX_ITER: usize = 10_000;
const EPS: f64 = 1e-16;

/// Regularized pair `(P(k, x), Q(k, x))`.
fn regularized_pair(k: f64, x: f64) -> Result<(f64, f64)> {
    if !(k > 0.0) || !(x >= 0.0) || !k.is_finite() {
        return Err(Error::Domain(format!("incomplete gamma needs k > 0, x >= 0 (k={k}, x={x})")));
    }
    if x == 0.0 {
        return Ok((0.0, 1.0));
    }
    if x.is_infinite() {
        return Ok((1.0, 0.0));
    }
    let log_prefactor = -x + k * x.ln() - ln_gamma(k);
    if x < k + 1.0 {
        let mut ap = k;
        let mut term = 1.0 / k;
        let mut sum = term;
        for _ in 0..MAX_ITER {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * EPS {
                let p = sum * log_prefactor.exp();
                return Ok((p, 1.0 - p));
            }
        }
        Err(Error::Numeric(format!("incomplete gamma series did not converge (k={k}, x={x})")))
    } else {
        let tiny = 1e-300;
        let mut b = x + 1.0 - k;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..MAX_ITER {
            let an = -(i as f64) * (i as f64 - k);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < EPS {
                let q = h * log_prefactor.exp();
                return Ok((1.0 - q, q));
            }
        }
        Err(Error::Numeric(format!("incomplete gamma continued fraction did not converge (k={k}, x={x})")))
    }
}

/// Upper incomplete gamma function `Γ(k, x)`.
pub fn upper_incomplete_gamma(k: f64, x: f64) -> Result<f64> {
    if x == 0.0 && k > 0.0 {
        return Ok(gamma(k));
    }
    if x >= k + 1.0 {
        // Stay in log space so that Γ(k) overflowing does not matter.
        let (_, q) = regularized_pair(k, x)?;
        return Ok((q.ln() + ln_gamma(k)).exp());
    }
    let (_, q) = regularized_pair(k, x)?;
    Ok(q * gamma(k))
}

/// Lower incomplete gamma function `γ(k, x)`.
pub fn lower_incomplete_gamma(k: f64, x: f64) -> Result<f64> {
    let (p, _) = regularized_pair(k, x)?;
    Ok(p * gamma(k))
}

/// Regularized upper incomplete gamma `Q(k, x) = Γ(k, x)/Γ(k)`.
pub fn regularized_upper(k: f64, x: f64) -> Result<f64> {
    regularized_pair(k, x).map(|(_, q)| q)
}
