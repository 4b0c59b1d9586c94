//! Guessing random additive noise decoders.
//!
//! Every decoder here works the same way: starting from the hard decisions of
//! the received vector, it proposes putative noise patterns (sets of bit
//! positions to flip) in some order of decreasing likelihood and asks the
//! code whether the hard decisions with those bits flipped form a codeword.
//! The first hit is the decoding. Each membership test counts as one query
//! and decoding is abandoned once the query budget is spent.
//!
//! The decoders differ only in the order of the patterns:
//!
//! * [`HardGrand`]: increasing Hamming weight, ignoring soft information.
//! * [`OrbGrand`]: increasing logistic weight, the sum of the reliability
//!   ranks of the flipped bits.
//! * [`SGrandAb`]: exactly decreasing likelihood under BPSK-AWGN, so the
//!   first hit is a maximum-likelihood decoding.
//!
//! [`ml_oracle`] decodes by exhaustive search and is used to validate the
//! ML claim.

mod hard;
mod orbgrand;
mod oracle;
mod sgrand;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use hard::{HammingPatterns, HardGrand};
pub use orbgrand::{LogisticPatterns, OrbGrand};
pub use oracle::{correlation_metric, ml_oracle, ML_ORACLE_MAX_K};
pub use sgrand::{LikelihoodPatterns, SGrandAb};

use crate::channel::hard_decision;
use crate::codes::LinearCode;
use crate::error::{check_len, Result};

/// Default abandonment threshold.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// Received soft values with the derived hard decisions and reliabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftVector {
    pub y: Vec<f64>,
    pub hard: Vec<u8>,
    pub reliability: Vec<f64>,
}

impl SoftVector {
    pub fn new(y: &[f64]) -> Self {
        SoftVector {
            y: y.to_vec(),
            hard: hard_decision(y),
            reliability: y.iter().map(|v| v.abs()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// Positions sorted from least to most reliable; ties by position.
    pub fn reliability_order(&self) -> Vec<usize> {
        // Reliabilities are non-negative, so their bit patterns sort like the
        // values; pairing with the position makes every key distinct.
        let mut keyed: Vec<(u64, usize)> = self.reliability.iter().map(|r| r.to_bits()).zip(0..).collect();
        keyed.sort_unstable();
        keyed.into_iter().map(|(_, i)| i).collect()
    }
}

/// Result of one decoding attempt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeOutcome {
    pub codeword: Option<Vec<u8>>,
    pub message: Option<Vec<u8>>,
    /// Codebook membership tests performed.
    pub queries: u64,
    pub abandoned: bool,
}

impl DecodeOutcome {
    pub fn abandoned(queries: u64) -> Self {
        DecodeOutcome {
            codeword: None,
            message: None,
            queries,
            abandoned: true,
        }
    }
}

/// A source of flip patterns, written into a caller-owned buffer to avoid an
/// allocation per query.
pub trait PatternSource {
    /// Writes the next pattern into `out` (cleared first). Returns `false`
    /// once the source is exhausted.
    fn next_pattern(&mut self, out: &mut Vec<usize>) -> bool;
}

/// A decoder for binary linear codes over a BPSK channel.
pub trait Decoder: fmt::Debug + Send + Sync {
    /// Configured abandonment threshold.
    fn budget(&self) -> u64;

    /// Decodes the real-valued received vector `y` with an explicit query
    /// budget.
    fn decode_with_budget(&self, code: &LinearCode, y: &[f64], budget: u64) -> Result<DecodeOutcome>;

    /// Decodes `y` with the configured budget.
    fn decode(&self, code: &LinearCode, y: &[f64]) -> Result<DecodeOutcome> {
        self.decode_with_budget(code, y, self.budget())
    }
}

/// Runs the guessing loop: patterns from `source` are indices into
/// `positions` and are flipped on `hard`.
pub(crate) fn guess<S: PatternSource>(
    code: &LinearCode,
    hard: &[u8],
    positions: Option<&[usize]>,
    source: &mut S,
    budget: u64,
) -> Result<DecodeOutcome> {
    check_len(code.n(), hard.len())?;
    let base = code.syndrome(hard);
    let mut syn = base.clone();
    let mut pattern = Vec::new();
    let mut queries = 0u64;
    while queries < budget {
        if !source.next_pattern(&mut pattern) {
            break;
        }
        syn.copy_from_slice(&base);
        for &p in &pattern {
            let pos = positions.map_or(p, |m| m[p]);
            code.xor_column(&mut syn, pos);
        }
        queries += 1;
        if syn.iter().all(|&w| w == 0) {
            let mut codeword = hard.to_vec();
            for &p in &pattern {
                codeword[positions.map_or(p, |m| m[p])] ^= 1;
            }
            let message = code.message_of(&codeword)?;
            return Ok(DecodeOutcome {
                codeword: Some(codeword),
                message: Some(message),
                queries,
                abandoned: false,
            });
        }
    }
    Ok(DecodeOutcome::abandoned(queries))
}

/// Decoder selection as it appears in configs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecoderKind {
    Grand,
    Orbgrand,
    Sgrandab,
}

impl DecoderKind {
    pub fn with_budget(self, budget: u64) -> AnyDecoder {
        match self {
            DecoderKind::Grand => AnyDecoder::Grand(HardGrand::new(budget)),
            DecoderKind::Orbgrand => AnyDecoder::Orbgrand(OrbGrand::new(budget)),
            DecoderKind::Sgrandab => AnyDecoder::Sgrandab(SGrandAb::new(budget)),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DecoderKind::Grand => "grand",
            DecoderKind::Orbgrand => "orbgrand",
            DecoderKind::Sgrandab => "sgrandab",
        }
    }
}

impl fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Any of the guessing decoders, dispatched statically.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnyDecoder {
    Grand(HardGrand),
    Orbgrand(OrbGrand),
    Sgrandab(SGrandAb),
}

impl AnyDecoder {
    pub fn kind(&self) -> DecoderKind {
        match self {
            AnyDecoder::Grand(_) => DecoderKind::Grand,
            AnyDecoder::Orbgrand(_) => DecoderKind::Orbgrand,
            AnyDecoder::Sgrandab(_) => DecoderKind::Sgrandab,
        }
    }
}

impl Decoder for AnyDecoder {
    fn budget(&self) -> u64 {
        match self {
            AnyDecoder::Grand(d) => d.budget,
            AnyDecoder::Orbgrand(d) => d.budget,
            AnyDecoder::Sgrandab(d) => d.budget,
        }
    }

    fn decode_with_budget(&self, code: &LinearCode, y: &[f64], budget: u64) -> Result<DecodeOutcome> {
        match self {
            AnyDecoder::Grand(d) => d.decode_with_budget(code, y, budget),
            AnyDecoder::Orbgrand(d) => d.decode_with_budget(code, y, budget),
            AnyDecoder::Sgrandab(d) => d.decode_with_budget(code, y, budget),
        }
    }
}
