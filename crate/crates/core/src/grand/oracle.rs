use crate::codes::LinearCode;
use crate::error::{check_len, Error, Result};

/// Largest code dimension the exhaustive oracle accepts.
pub const ML_ORACLE_MAX_K: usize = 20;

/// Correlation `sum_i y_i (1 - 2 c_i)`; larger is more likely under BPSK-AWGN.
pub fn correlation_metric(y: &[f64], codeword: &[u8]) -> f64 {
    y.iter()
        .zip(codeword)
        .map(|(&v, &c)| if c == 0 { v } else { -v })
        .sum()
}

/// Maximum-likelihood decoding by enumerating all `2^k` codewords.
///
/// Exact metric ties go to the lexicographically smallest codeword.
pub fn ml_oracle(code: &LinearCode, y: &[f64]) -> Result<Vec<u8>> {
    let k = code.k();
    if k > ML_ORACLE_MAX_K {
        return Err(Error::TooLarge {
            k,
            limit: ML_ORACLE_MAX_K,
        });
    }
    check_len(code.n(), y.len())?;
    let g = code.generator();
    // Gray-code walk: consecutive codewords differ by one generator row.
    let mut cw = vec![0u8; code.n()];
    let mut best = cw.clone();
    let mut best_metric = correlation_metric(y, &cw);
    for step in 1u64..(1 << k) {
        let row = step.trailing_zeros() as usize;
        for (c, b) in cw.iter_mut().zip(g.row_bits(row)) {
            *c ^= b;
        }
        let metric = correlation_metric(y, &cw);
        if metric > best_metric || (metric == best_metric && cw < best) {
            best_metric = metric;
            best.clone_from(&cw);
        }
    }
    Ok(best)
}
