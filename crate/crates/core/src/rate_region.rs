//! Achievable rates for Gauss-Markov channels decoded with noise recycling.
//!
//! All rates are in bits per channel use (base-2 logarithms). `snr` is the
//! linear ratio of signal power to marginal noise variance.

use std::io::Write;

use crate::error::{param, Result};

/// `0.5 * log2(1 + snr)`.
pub fn capacity(snr: f64) -> Result<f64> {
    if !(snr >= 0.0) || !snr.is_finite() {
        return param(format!("snr must be finite and non-negative, got {snr}"));
    }
    Ok(0.5 * snr.ln_1p() / std::f64::consts::LN_2)
}

/// Capacity seen by a channel whose neighbour's noise has been removed, so
/// only the innovation with variance `(1 - rho^2) sigma^2` remains.
pub fn recycled_capacity(snr: f64, rho: f64) -> Result<f64> {
    if !(rho.abs() < 1.0) {
        return param(format!("|rho| must be below 1, got {rho}"));
    }
    capacity(snr)?;
    capacity(snr / (1.0 - rho * rho))
}

/// Per-channel average over one lead and `m - 1` recycled channels.
pub fn average_rate(snr: f64, rho: f64, m: u64) -> Result<f64> {
    if m < 1 {
        return param("m must be at least 1");
    }
    let c1 = capacity(snr)?;
    let c2 = recycled_capacity(snr, rho)?;
    Ok((c1 + (m - 1) as f64 * c2) / m as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint {
    pub snr: f64,
    pub rho: f64,
    pub m: u64,
    /// Lead channel capacity.
    pub c1: f64,
    /// Recycled channel capacity.
    pub c2: f64,
    pub avg: f64,
}

impl RatePoint {
    pub fn new(snr: f64, rho: f64, m: u64) -> Result<Self> {
        Ok(RatePoint {
            snr,
            rho,
            m,
            c1: capacity(snr)?,
            c2: recycled_capacity(snr, rho)?,
            avg: average_rate(snr, rho, m)?,
        })
    }

    pub fn snr_db(&self) -> f64 {
        10.0 * self.snr.log10()
    }
}

/// Converts decibels to a linear ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Cartesian product over an SNR grid in dB, correlations and channel
/// counts, in that nesting order.
pub fn region_table(snr_db: &[f64], rhos: &[f64], ms: &[u64]) -> Result<Vec<RatePoint>> {
    if snr_db.is_empty() || rhos.is_empty() || ms.is_empty() {
        return param("rate region grids must be non-empty");
    }
    let mut out = Vec::with_capacity(snr_db.len() * rhos.len() * ms.len());
    for &s in snr_db {
        for &rho in rhos {
            for &m in ms {
                out.push(RatePoint::new(db_to_linear(s), rho, m)?);
            }
        }
    }
    Ok(out)
}

/// Writes `snr_db,rho,m,c1,c2,avg` rows. Rates are in bits per channel use.
pub fn write_csv<W: Write>(points: &[RatePoint], mut w: W) -> std::io::Result<()> {
    writeln!(w, "snr_db,rho,m,c1,c2,avg")?;
    for p in points {
        writeln!(w, "{},{},{},{},{},{}", p.snr_db(), p.rho, p.m, p.c1, p.c2, p.avg)?;
    }
    Ok(())
}
