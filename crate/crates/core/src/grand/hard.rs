use super::{guess, DecodeOutcome, Decoder, PatternSource};
use crate::channel::hard_decision;
use crate::codes::LinearCode;
use crate::error::Result;

/// All subsets of `0..n` by increasing size; subsets of equal size in
/// lexicographic order.
#[derive(Debug, Clone)]
pub struct HammingPatterns {
    n: usize,
    current: Vec<usize>,
    started: bool,
    done: bool,
}

impl HammingPatterns {
    pub fn new(n: usize) -> Self {
        HammingPatterns {
            n,
            current: Vec::new(),
            started: false,
            done: false,
        }
    }

    fn advance(&mut self) {
        let (n, w) = (self.n, self.current.len());
        // rightmost element that can still move right
        for i in (0..w).rev() {
            if self.current[i] < n - w + i {
                self.current[i] += 1;
                for j in i + 1..w {
                    self.current[j] = self.current[j - 1] + 1;
                }
                return;
            }
        }
        if w == n {
            self.done = true;
        } else {
            self.current = (0..=w).collect();
        }
    }
}

impl PatternSource for HammingPatterns {
    fn next_pattern(&mut self, out: &mut Vec<usize>) -> bool {
        if self.started {
            self.advance();
        }
        self.started = true;
        if self.done {
            return false;
        }
        out.clear();
        out.extend_from_slice(&self.current);
        true
    }
}

/// Hard-detection GRAND.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HardGrand {
    pub budget: u64,
}

impl HardGrand {
    pub fn new(budget: u64) -> Self {
        HardGrand { budget }
    }

    pub fn decode_hard(&self, code: &LinearCode, hard_bits: &[u8]) -> Result<DecodeOutcome> {
        guess(code, hard_bits, None, &mut HammingPatterns::new(code.n()), self.budget)
    }
}

impl Decoder for HardGrand {
    fn budget(&self) -> u64 {
        self.budget
    }

    fn decode_with_budget(&self, code: &LinearCode, y: &[f64], budget: u64) -> Result<DecodeOutcome> {
        HardGrand::new(budget).decode_hard(code, &hard_decision(y))
    }
}
