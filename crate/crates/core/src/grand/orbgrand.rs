use super::{guess, DecodeOutcome, Decoder, PatternSource, SoftVector};
use crate::codes::LinearCode;
use crate::error::Result;

/// Sum of the `c` largest values in `1..=n`.
fn top_sum(c: usize, n: usize) -> usize {
    c * n - c * c.saturating_sub(1) / 2
}

/// Flip patterns in non-decreasing logistic weight.
///
/// A pattern with logistic weight `w` is a partition of `w` into distinct
/// parts no larger than `n`; part `r` flips the bit of reliability rank `r`
/// (rank 1 is the least reliable bit). Within one weight, partitions come
/// with fewer parts first and, for equal part counts, in lexicographic order
/// of their increasing part sequences. Emitted patterns are 0-based ranks.
#[derive(Debug, Clone)]
pub struct LogisticPatterns {
    n: usize,
    weight: usize,
    parts: usize,
    /// Current partition, 1-based, strictly increasing.
    current: Vec<usize>,
    started: bool,
    done: bool,
}

impl LogisticPatterns {
    pub fn new(n: usize) -> Self {
        LogisticPatterns {
            n,
            weight: 0,
            parts: 0,
            current: Vec::new(),
            started: false,
            done: false,
        }
    }

    /// Logistic weight of the most recently emitted pattern.
    pub fn weight(&self) -> usize {
        self.weight
    }

    /// Lexicographically smallest increasing sequence of `count` values in
    /// `lo..=n` summing to `total`, written into `out`.
    fn fill_smallest(out: &mut Vec<usize>, count: usize, total: usize, lo: usize, n: usize) -> bool {
        let mut rem = total;
        let mut lo = lo;
        for i in 0..count {
            let after = count - i - 1;
            let v = lo.max(rem.saturating_sub(top_sum(after, n)));
            // the remaining parts must fit strictly above v
            if v > n || rem < v || rem - v < after * v + after * (after + 1) / 2 {
                return false;
            }
            if after == 0 && v != rem {
                return false;
            }
            out.push(v);
            rem -= v;
            lo = v + 1;
        }
        rem == 0
    }

    fn next_same_shape(&mut self) -> bool {
        let p = self.parts;
        if p < 2 {
            return false;
        }
        let mut prefix_sum: usize = self.current[..p - 1].iter().sum();
        for i in (0..p - 1).rev() {
            prefix_sum -= self.current[i];
            let lo = self.current[i] + 1;
            let mut tail = Vec::with_capacity(p - i);
            if Self::fill_smallest(&mut tail, p - i, self.weight - prefix_sum, lo, self.n) {
                self.current.truncate(i);
                self.current.extend(tail);
                return true;
            }
        }
        false
    }

    fn advance(&mut self) {
        if self.next_same_shape() {
            return;
        }
        let max_weight = self.n * (self.n + 1) / 2;
        loop {
            self.parts += 1;
            if self.parts > self.n || self.parts * (self.parts + 1) / 2 > self.weight {
                self.weight += 1;
                self.parts = 1;
                if self.weight > max_weight {
                    self.done = true;
                    return;
                }
            }
            self.current.clear();
            let mut first = Vec::with_capacity(self.parts);
            if Self::fill_smallest(&mut first, self.parts, self.weight, 1, self.n) {
                self.current = first;
                return;
            }
        }
    }
}

impl PatternSource for LogisticPatterns {
    fn next_pattern(&mut self, out: &mut Vec<usize>) -> bool {
        if self.started {
            self.advance();
        }
        self.started = true;
        if self.done {
            return false;
        }
        out.clear();
        out.extend(self.current.iter().map(|r| r - 1));
        true
    }
}

/// Ordered reliability bits GRAND with the basic logistic-weight schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrbGrand {
    pub budget: u64,
}

impl OrbGrand {
    pub fn new(budget: u64) -> Self {
        OrbGrand { budget }
    }

    pub fn decode_soft(&self, code: &LinearCode, soft: &SoftVector) -> Result<DecodeOutcome> {
        let order = soft.reliability_order();
        guess(code, &soft.hard, Some(&order), &mut LogisticPatterns::new(code.n()), self.budget)
    }
}

impl Decoder for OrbGrand {
    fn budget(&self) -> u64 {
        self.budget
    }

    fn decode_with_budget(&self, code: &LinearCode, y: &[f64], budget: u64) -> Result<DecodeOutcome> {
        OrbGrand::new(budget).decode_soft(code, &SoftVector::new(y))
    }
}
