//! Polar transform and CRC-aided polar codes.
//!
//! The transform is the plain Kronecker power of `[[1, 0], [1, 1]]` with no
//! bit-reversal permutation. Unfrozen positions are chosen by Bhattacharyya
//! parameters of the synthetic channels for a BI-AWGN channel at a design
//! Eb/N0.

use serde::{Deserialize, Serialize};

use super::crc::{crc_append, CrcSpec};
use super::linear::LinearCode;
use crate::channel::ebn0_to_sigma;
use crate::error::{check_len, param, Result};
use crate::gf2::BitMatrix;

/// `v F^{(x)p}` over GF(2), natural order.
pub fn polar_transform(v: &[u8]) -> Result<Vec<u8>> {
    let n = v.len();
    if !n.is_power_of_two() {
        return param(format!("polar transform length {n} is not a power of two"));
    }
    let mut x = v.to_vec();
    let mut half = 1;
    while half < n {
        for block in x.chunks_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter()) {
                *a ^= b;
            }
        }
        half *= 2;
    }
    Ok(x)
}

/// Natural logs of the Bhattacharyya parameters of the `n` synthetic
/// channels when the underlying channel has parameter `exp(ln_z0)`.
///
/// Follows the transform's block structure `x = [(u1 + u2) G', u2 G']`: the
/// first half of each level sees the degraded channel `2z - z^2`, the second
/// half the upgraded one `z^2`.
pub fn bhattacharyya_ln(n: usize, ln_z0: f64) -> Vec<f64> {
    let mut z = vec![ln_z0];
    while z.len() < n {
        let worse = z.iter().map(|&lz| lz + (2.0 - lz.exp()).ln());
        let better = z.iter().map(|&lz| 2.0 * lz);
        z = worse.chain(better).collect();
    }
    z
}

/// A CRC-aided polar code: `k` user bits plus `r` CRC bits on the unfrozen
/// positions, zeros elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaPolarSpec {
    pub n: usize,
    pub k: usize,
    pub crc: Option<CrcSpec>,
    /// Unfrozen positions in ascending order.
    pub info_set: Vec<usize>,
}

impl CaPolarSpec {
    pub fn crc_bits(&self) -> usize {
        self.crc.map_or(0, |c| c.degree())
    }

    /// Picks the `k + r` most reliable positions for the given design Eb/N0.
    /// The design noise level uses the user rate `k / n`.
    pub fn construct(n: usize, k: usize, crc: Option<CrcSpec>, design_ebn0_db: f64) -> Result<Self> {
        if !n.is_power_of_two() || n < 2 {
            return param(format!("polar length {n} must be a power of two >= 2"));
        }
        let r = crc.map_or(0, |c| c.degree());
        if k == 0 || k + r > n {
            return param(format!("k = {k} plus {r} CRC bits does not fit in n = {n}"));
        }
        let sigma = ebn0_to_sigma(design_ebn0_db, k as f64 / n as f64)?;
        let ln_z0 = -1.0 / (2.0 * sigma * sigma);
        let z = bhattacharyya_ln(n, ln_z0);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| z[a].total_cmp(&z[b]).then(a.cmp(&b)));
        let mut info_set = order[..k + r].to_vec();
        info_set.sort_unstable();
        Self::with_info_set(n, k, crc, info_set)
    }

    pub fn with_info_set(n: usize, k: usize, crc: Option<CrcSpec>, info_set: Vec<usize>) -> Result<Self> {
        let r = crc.map_or(0, |c| c.degree());
        if !n.is_power_of_two() {
            return param(format!("polar length {n} is not a power of two"));
        }
        check_len(k + r, info_set.len())?;
        if info_set.windows(2).any(|w| w[0] >= w[1]) || info_set.last().is_some_and(|&p| p >= n) {
            return param("info set must be strictly increasing positions below n");
        }
        Ok(CaPolarSpec { n, k, crc, info_set })
    }

    /// Equivalent linear code. `G` has the encodings of the unit messages as
    /// rows; `H` spans both the frozen-bit and CRC constraints.
    pub fn linear_code(&self) -> Result<LinearCode> {
        let mut g = BitMatrix::zeros(self.k, self.n);
        let mut u = vec![0u8; self.k];
        for i in 0..self.k {
            u[i] = 1;
            for (j, b) in ca_polar_encode(&u, self)?.into_iter().enumerate() {
                g.set(i, j, b == 1);
            }
            u[i] = 0;
        }
        LinearCode::from_generator(g)
    }
}

pub fn ca_polar_encode(message: &[u8], spec: &CaPolarSpec) -> Result<Vec<u8>> {
    check_len(spec.k, message.len())?;
    let payload = match &spec.crc {
        Some(crc) => crc_append(message, crc),
        None => message.to_vec(),
    };
    let mut v = vec![0u8; spec.n];
    for (&pos, &b) in spec.info_set.iter().zip(&payload) {
        v[pos] = b;
    }
    polar_transform(&v)
}
