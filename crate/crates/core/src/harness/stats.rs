use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{param, Result};

/// Two-sided Wilson score interval for a binomial proportion.
pub fn wilson_interval(errors: u64, trials: u64, confidence: f64) -> Result<(f64, f64)> {
    if trials == 0 || errors > trials {
        return param(format!("need 0 <= errors <= trials and trials >= 1, got {errors}/{trials}"));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return param(format!("confidence must lie in (0, 1), got {confidence}"));
    }
    let z = Normal::standard().inverse_cdf(0.5 + confidence / 2.0);
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // the bounds are exact at the extremes; avoid rounding residue there
    let low = if errors == 0 { 0.0 } else { (centre - half).max(0.0) };
    let high = if errors == trials { 1.0 } else { (centre + half).min(1.0) };
    Ok((low.min(p), high.max(p)))
}
