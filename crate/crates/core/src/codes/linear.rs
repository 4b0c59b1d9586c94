use crate::error::{check_len, param, Result};
use crate::gf2::{pack, unpack, words_for, BitMatrix};

/// A binary `[n, k]` linear block code described by both its generator and
/// parity-check matrices.
///
/// Besides the row-major matrices the code keeps the columns of `H` packed
/// one after another, so the syndrome of a word with a few bits flipped can be
/// updated with one XOR per flipped bit.
#[derive(Debug, Clone)]
pub struct LinearCode {
    n: usize,
    k: usize,
    generator: BitMatrix,
    parity: BitMatrix,
    syn_words: usize,
    h_columns: Vec<u64>,
    info_positions: Vec<usize>,
    info_inverse: BitMatrix,
}

impl LinearCode {
    /// Builds a code from a generator and a parity-check matrix, checking
    /// `G H^T = 0`, `rank(G) = k` and `rank(H) = n - k`.
    pub fn new(generator: BitMatrix, parity: BitMatrix) -> Result<Self> {
        let n = generator.cols();
        let k = generator.rows();
        if k == 0 || k > n {
            return param(format!("code dimension {k} must lie in 1..={n}"));
        }
        check_len(n, parity.cols())?;
        check_len(n - k, parity.rows())?;
        if generator.rank() != k {
            return param("generator matrix is rank deficient");
        }
        if parity.rank() != n - k {
            return param("parity-check matrix is rank deficient");
        }
        if !generator.mul_transpose(&parity).is_zero() {
            return param("generator and parity-check matrices are not orthogonal");
        }

        let syn_words = words_for(n - k).max(1);
        let mut h_columns = vec![0u64; n * syn_words];
        for r in 0..n - k {
            for c in 0..n {
                if parity.get(r, c) {
                    h_columns[c * syn_words + r / 64] |= 1 << (r % 64);
                }
            }
        }

        // Row-reduce [G | I_k]: the pivots of G form an information set and
        // the right block maps codeword bits on that set back to the message.
        let mut aug = BitMatrix::zeros(k, n + k);
        for r in 0..k {
            for c in 0..n {
                if generator.get(r, c) {
                    aug.set(r, c, true);
                }
            }
            aug.set(r, n + r, true);
        }
        let pivots = aug.rref();
        let info_positions = pivots[..k].to_vec();
        let mut info_inverse = BitMatrix::zeros(k, k);
        for r in 0..k {
            for c in 0..k {
                if aug.get(r, n + c) {
                    info_inverse.set(r, c, true);
                }
            }
        }

        Ok(LinearCode {
            n,
            k,
            generator,
            parity,
            syn_words,
            h_columns,
            info_positions,
            info_inverse,
        })
    }

    /// Builds a code from its generator, deriving `H` as the null space of `G`.
    pub fn from_generator(generator: BitMatrix) -> Result<Self> {
        let parity = generator.null_space();
        Self::new(generator, parity)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    pub fn generator(&self) -> &BitMatrix {
        &self.generator
    }

    pub fn parity(&self) -> &BitMatrix {
        &self.parity
    }

    /// `u G`.
    pub fn encode(&self, message: &[u8]) -> Result<Vec<u8>> {
        check_len(self.k, message.len())?;
        Ok(self.generator.left_mul(message))
    }

    /// Inverse of [`encode`](Self::encode) on codewords.
    pub fn message_of(&self, codeword: &[u8]) -> Result<Vec<u8>> {
        check_len(self.n, codeword.len())?;
        let v: Vec<u8> = self.info_positions.iter().map(|&p| codeword[p]).collect();
        Ok(self.info_inverse.left_mul(&v))
    }

    /// True iff `H word^T = 0`.
    pub fn is_codeword(&self, word: &[u8]) -> Result<bool> {
        check_len(self.n, word.len())?;
        Ok(self.syndrome(word).iter().all(|&w| w == 0))
    }

    /// Packed syndrome `H word^T`.
    pub fn syndrome(&self, word: &[u8]) -> Vec<u64> {
        debug_assert_eq!(word.len(), self.n);
        let mut s = vec![0u64; self.syn_words];
        for (j, &b) in word.iter().enumerate() {
            if b & 1 == 1 {
                self.xor_column(&mut s, j);
            }
        }
        s
    }

    /// Number of words in a packed syndrome.
    pub fn syndrome_words(&self) -> usize {
        self.syn_words
    }

    /// Column `j` of `H`, packed.
    #[inline]
    pub fn column(&self, j: usize) -> &[u64] {
        &self.h_columns[j * self.syn_words..(j + 1) * self.syn_words]
    }

    #[inline]
    pub fn xor_column(&self, acc: &mut [u64], j: usize) {
        for (a, c) in acc.iter_mut().zip(self.column(j)) {
            *a ^= c;
        }
    }

    /// Row-wise parity check through the row-major `H`, independent of the
    /// packed columns used by [`is_codeword`](Self::is_codeword).
    pub fn is_codeword_rowwise(&self, word: &[u8]) -> Result<bool> {
        check_len(self.n, word.len())?;
        Ok(self.parity.mul_packed(&pack(word)).iter().all(|&b| b == 0))
    }

    /// All codewords, in message order `u = 0, 1, ..., 2^k - 1` (bit 0 of the
    /// counter is message bit 0). Only sensible for small `k`.
    pub fn codewords(&self) -> impl Iterator<Item = Vec<u8>> + '_ {
        (0u64..1 << self.k).map(move |idx| {
            let u: Vec<u8> = unpack(&[idx], self.k);
            self.generator.left_mul(&u)
        })
    }
}
