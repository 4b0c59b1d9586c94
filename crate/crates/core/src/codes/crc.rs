//! Bitwise CRC over GF(2), MSB first, zero initial value, no output XOR.

use serde::{Deserialize, Serialize};

use crate::error::{param, Result};

/// A CRC generator polynomial of degree `r`.
///
/// `poly` holds all coefficients including the leading `x^r` term, with bit
/// `i` the coefficient of `x^i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrcSpec {
    degree: u32,
    poly: u64,
}

impl CrcSpec {
    pub fn new(degree: u32, poly: u64) -> Result<Self> {
        if degree == 0 || degree > 63 {
            return param(format!("CRC degree must be in 1..=63, got {degree}"));
        }
        if poly >> degree != 1 {
            return param(format!("polynomial {poly:#x} is not monic of degree {degree}"));
        }
        Ok(CrcSpec { degree, poly })
    }

    /// Default polynomials by degree.
    ///
    /// | degree | polynomial |
    /// |---|---|
    /// | 6 | x^6 + x^5 + 1 |
    /// | 8 | x^8 + x^2 + x + 1 |
    /// | 11 | x^11 + x^10 + x^9 + x^5 + 1 |
    /// | 16 | x^16 + x^12 + x^5 + 1 |
    pub fn standard(degree: u32) -> Result<Self> {
        let poly = match degree {
            6 => 0x61,
            8 => 0x107,
            11 => 0xE21,
            16 => 0x1_1021,
            _ => return param(format!("no default CRC polynomial of degree {degree}")),
        };
        Self::new(degree, poly)
    }

    pub fn degree(&self) -> usize {
        self.degree as usize
    }

    pub fn poly(&self) -> u64 {
        self.poly
    }

    /// Remainder of `bits(x) * x^r` modulo the polynomial, as `r` bits with the
    /// highest-degree coefficient first.
    pub fn remainder(&self, bits: &[u8]) -> Vec<u8> {
        let r = self.degree;
        let mask = (1u64 << r) - 1;
        let low = self.poly & mask;
        let mut reg = 0u64;
        for &b in bits {
            let top = ((reg >> (r - 1)) & 1) ^ u64::from(b & 1);
            reg = (reg << 1) & mask;
            if top == 1 {
                reg ^= low;
            }
        }
        (0..r).rev().map(|i| ((reg >> i) & 1) as u8).collect()
    }
}

/// `message || CRC(message)`.
pub fn crc_append(message: &[u8], spec: &CrcSpec) -> Vec<u8> {
    let mut out = message.to_vec();
    out.extend(spec.remainder(message));
    out
}

/// True iff `word`, read as a polynomial, is divisible by the CRC polynomial.
pub fn crc_check(word: &[u8], spec: &CrcSpec) -> Result<bool> {
    if word.len() <= spec.degree() {
        return param(format!(
            "word of length {} is not longer than the CRC degree {}",
            word.len(),
            spec.degree()
        ));
    }
    let (msg, tail) = word.split_at(word.len() - spec.degree());
    Ok(spec.remainder(msg) == tail)
}
