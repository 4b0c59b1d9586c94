//! Gauss-Markov correlated noise across orthogonal channels.
//!
//! Channel `i` sees noise `z[i] = rho * z[i-1] + xi[i]` sample by sample, with
//! the innovations `xi[i]` drawn iid from `N(0, (1 - rho^2) sigma^2)`. The first
//! row is drawn straight from `N(0, sigma^2)` so every row has marginal
//! variance `sigma^2`. Innovations are stored next to the noise so that the
//! recursion can be checked bit-exactly downstream.
//!
//! All noise values live on the dyadic lattice `2^-40 Z`, and the product
//! `rho * z` is rounded onto the same lattice ([`lattice_scale`]). With
//! symbols at `+-1` and noise magnitudes well below `2^12`, every sum and
//! difference formed by the channel and by noise recycling is then exact in
//! `f64`: `y - x == z`, and `y2 - rho*z1 - x2 == xi2` hold to the bit.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{check_len, param, Error, Result};

const LATTICE_SCALE: f64 = (1u64 << 40) as f64;

/// Rounds `v` to the nearest multiple of `2^-40`.
pub fn lattice(v: f64) -> f64 {
    (v * LATTICE_SCALE).round() / LATTICE_SCALE
}

/// `rho * v` rounded onto the noise lattice.
pub fn lattice_scale(rho: f64, v: f64) -> f64 {
    lattice(rho * v)
}

/// Parameters of the Gauss-Markov noise process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmParams {
    m: usize,
    n: usize,
    rho: f64,
    sigma: f64,
}

impl GmParams {
    /// Validates and builds the parameter set.
    ///
    /// Requires `m >= 1`, `n >= 1`, `|rho| < 1` and `sigma > 0`.
    pub fn new(m: usize, n: usize, rho: f64, sigma: f64) -> Result<Self> {
        if m == 0 {
            return param("channel count m must be at least 1");
        }
        if n == 0 {
            return param("block length n must be at least 1");
        }
        if !(rho.abs() < 1.0) {
            return param(format!("correlation rho must satisfy |rho| < 1, got {rho}"));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return param(format!("noise sigma must be positive and finite, got {sigma}"));
        }
        Ok(GmParams { m, n, rho, sigma })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Standard deviation of the innovations, `sqrt(1 - rho^2) * sigma`.
    pub fn innovation_sigma(&self) -> f64 {
        (1.0 - self.rho * self.rho).sqrt() * self.sigma
    }
}

/// An `m x n` realization of the noise process and its innovations.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseMatrix {
    /// Noise samples, one row per channel.
    pub z: Vec<Vec<f64>>,
    /// Innovations. Row 0 equals `z[0]`.
    pub xi: Vec<Vec<f64>>,
}

impl NoiseMatrix {
    /// All-zero noise, used for noiseless runs.
    pub fn zeros(m: usize, n: usize) -> Self {
        NoiseMatrix {
            z: vec![vec![0.0; n]; m],
            xi: vec![vec![0.0; n]; m],
        }
    }

    pub fn m(&self) -> usize {
        self.z.len()
    }

    pub fn n(&self) -> usize {
        self.z.first().map_or(0, Vec::len)
    }
}

/// Draws one noise matrix.
///
/// Samples are drawn row by row, left to right, so a seeded `rng` gives a
/// reproducible matrix.
pub fn gm_noise_sample<R: Rng + ?Sized>(params: &GmParams, rng: &mut R) -> NoiseMatrix {
    let (m, n) = (params.m, params.n);
    let mut z = Vec::with_capacity(m);
    let mut xi = Vec::with_capacity(m);

    let first: Vec<f64> = (0..n)
        .map(|_| lattice(params.sigma * rng.sample::<f64, _>(StandardNormal)))
        .collect();
    z.push(first.clone());
    xi.push(first);

    let innovation_sigma = params.innovation_sigma();
    for i in 1..m {
        let row_xi: Vec<f64> = (0..n)
            .map(|_| lattice(innovation_sigma * rng.sample::<f64, _>(StandardNormal)))
            .collect();
        let row_z = z[i - 1]
            .iter()
            .zip(&row_xi)
            .map(|(prev, e)| lattice_scale(params.rho, *prev) + e)
            .collect();
        z.push(row_z);
        xi.push(row_xi);
    }
    NoiseMatrix { z, xi }
}

/// A BPSK-modulated codeword. Every entry is `+1.0` or `-1.0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModulatedVector(Vec<f64>);

impl ModulatedVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// Maps bit 0 to `+1` and bit 1 to `-1`.
pub fn bpsk_modulate(codeword: &[u8]) -> ModulatedVector {
    ModulatedVector(
        codeword
            .iter()
            .map(|&b| if b == 0 { 1.0 } else { -1.0 })
            .collect(),
    )
}

/// Sign demapper: non-negative values go to bit 0, negative to bit 1.
pub fn hard_decision(y: &[f64]) -> Vec<u8> {
    y.iter().map(|&v| u8::from(v < 0.0)).collect()
}

/// Noise standard deviation for real BPSK with unit symbol energy at the
/// given Eb/N0 (dB) and code rate: `sigma^2 = 1 / (2 R 10^(EbN0/10))`.
pub fn ebn0_to_sigma(ebn0_db: f64, rate: f64) -> Result<f64> {
    if !(rate > 0.0 && rate <= 1.0) {
        return param(format!("code rate must lie in (0, 1], got {rate}"));
    }
    if !ebn0_db.is_finite() {
        return param(format!("Eb/N0 must be finite, got {ebn0_db}"));
    }
    let ebn0 = 10f64.powf(ebn0_db / 10.0);
    Ok((1.0 / (2.0 * rate * ebn0)).sqrt())
}

/// Everything that happened on the `m` channels during one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelBundle {
    pub params: GmParams,
    pub sent: Vec<ModulatedVector>,
    pub noise: NoiseMatrix,
    pub received: Vec<Vec<f64>>,
}

impl ChannelBundle {
    pub fn m(&self) -> usize {
        self.params.m
    }
}

/// Adds the noise rows to the transmitted rows.
pub fn transmit(params: GmParams, sent: Vec<ModulatedVector>, noise: NoiseMatrix) -> Result<ChannelBundle> {
    check_len(params.m, sent.len())?;
    check_len(params.m, noise.z.len())?;
    check_len(params.m, noise.xi.len())?;
    for (x, (z, xi)) in sent.iter().zip(noise.z.iter().zip(&noise.xi)) {
        check_len(params.n, x.len())?;
        check_len(params.n, z.len())?;
        check_len(params.n, xi.len())?;
    }
    let received = sent
        .iter()
        .zip(&noise.z)
        .map(|(x, z)| x.as_slice().iter().zip(z).map(|(a, b)| a + b).collect())
        .collect();
    Ok(ChannelBundle {
        params,
        sent,
        noise,
        received,
    })
}

impl From<ModulatedVector> for Vec<f64> {
    fn from(v: ModulatedVector) -> Self {
        v.0
    }
}

impl TryFrom<Vec<f64>> for ModulatedVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        if v.iter().all(|&s| s == 1.0 || s == -1.0) {
            Ok(ModulatedVector(v))
        } else {
            param("BPSK symbols must be +1 or -1")
        }
    }
}
