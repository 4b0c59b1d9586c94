use rand::Rng;

use super::linear::LinearCode;
use crate::error::{param, Result};
use crate::gf2::BitMatrix;

/// Random linear code in systematic form: `G = [I_k | P]`, `H = [P^T | I_{n-k}]`
/// with `P` uniform over `k x (n-k)` binary matrices.
pub fn rlc_generate<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<LinearCode> {
    if k == 0 || k >= n {
        return param(format!("random linear code needs 0 < k < n, got n = {n}, k = {k}"));
    }
    let r = n - k;
    let mut p = BitMatrix::zeros(k, r);
    for i in 0..k {
        for j in 0..r {
            p.set(i, j, rng.random::<bool>());
        }
    }
    systematic(&p)
}

/// Systematic code from the parity part `P`.
pub fn systematic(p: &BitMatrix) -> Result<LinearCode> {
    let (k, r) = (p.rows(), p.cols());
    let n = k + r;
    let mut g = BitMatrix::zeros(k, n);
    let mut h = BitMatrix::zeros(r, n);
    for i in 0..k {
        g.set(i, i, true);
        for j in 0..r {
            if p.get(i, j) {
                g.set(i, k + j, true);
                h.set(j, i, true);
            }
        }
    }
    for j in 0..r {
        h.set(j, k + j, true);
    }
    LinearCode::new(g, h)
}
