use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{guess, DecodeOutcome, Decoder, PatternSource, SoftVector};
use crate::codes::LinearCode;
use crate::error::Result;

const ROOT: u32 = u32::MAX;

#[derive(Debug, Clone, Copy)]
struct Node {
    parent: u32,
    last: u32,
    /// Cost of the pattern without its last rank.
    prefix: f64,
    /// XOR of the parity-check columns of the pattern, when tracked.
    syn: u64,
}

/// Heap entry. Costs are non-negative, so their IEEE bit patterns order
/// like the values and compare as plain integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Entry {
    cost_bits: u64,
    node: u32,
}

impl Entry {
    fn new(cost: f64, node: u32) -> Self {
        debug_assert!(cost >= 0.0);
        Entry {
            cost_bits: cost.to_bits(),
            node,
        }
    }

    fn cost(&self) -> f64 {
        f64::from_bits(self.cost_bits)
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // Reversed so the max-heap pops the cheapest pattern. Equal costs are
    // ordered in `pop_min`.
    fn cmp(&self, other: &Self) -> Ordering {
        other.cost_bits.cmp(&self.cost_bits)
    }
}

/// Flip patterns in exactly non-increasing likelihood.
///
/// `reliability` must be non-negative and sorted ascending; pattern entries
/// are indices into it. The cost of a pattern is the sum of the flipped
/// reliabilities, i.e. the negated log-likelihood up to a constant. Patterns
/// are generated by a best-first search over a tree in which every sorted
/// index set has exactly one parent: a pattern ending in `j` has children
/// "append `j+1`" and "replace `j` by `j+1`". Both children cost at least as
/// much as the parent and compare greater lexicographically, so popping by
/// (cost, lexicographic order) yields every pattern exactly once in that
/// global order.
#[derive(Debug, Clone)]
pub struct LikelihoodPatterns {
    reliability: Vec<f64>,
    /// Single-word parity-check columns in reliability order, if tracked.
    columns: Vec<u64>,
    nodes: Vec<Node>,
    heap: BinaryHeap<Entry>,
    started: bool,
    last_cost: f64,
    scratch_a: Vec<usize>,
    scratch_b: Vec<usize>,
}

impl LikelihoodPatterns {
    pub fn new(reliability: Vec<f64>) -> Self {
        debug_assert!(reliability.windows(2).all(|w| w[0] <= w[1]));
        LikelihoodPatterns {
            reliability,
            columns: Vec::new(),
            nodes: Vec::new(),
            heap: BinaryHeap::new(),
            started: false,
            last_cost: 0.0,
            scratch_a: Vec::new(),
            scratch_b: Vec::new(),
        }
    }

    /// Also tracks each pattern's syndrome contribution; `columns[i]` is the
    /// parity-check column flipped by index `i`.
    pub(crate) fn with_columns(reliability: Vec<f64>, columns: Vec<u64>) -> Self {
        debug_assert_eq!(reliability.len(), columns.len());
        LikelihoodPatterns {
            columns,
            ..Self::new(reliability)
        }
    }

    /// Cost of the most recently emitted pattern.
    pub fn last_cost(&self) -> f64 {
        self.last_cost
    }

    fn push(&mut self, parent: u32, last: usize, prefix: f64) {
        let idx = self.nodes.len() as u32;
        let syn = match (self.columns.get(last), parent) {
            (None, _) => 0,
            (Some(&c), ROOT) => c,
            (Some(&c), p) => c ^ self.nodes[p as usize].syn,
        };
        self.nodes.push(Node {
            parent,
            last: last as u32,
            prefix,
            syn,
        });
        self.heap.push(Entry::new(prefix + self.reliability[last], idx));
    }

    fn materialize(nodes: &[Node], mut idx: u32, out: &mut Vec<usize>) {
        out.clear();
        while idx != ROOT {
            let node = nodes[idx as usize];
            out.push(node.last as usize);
            idx = node.parent;
        }
        out.reverse();
    }

    /// Pops the cheapest entry, breaking exact cost ties lexicographically.
    fn pop_min(&mut self) -> Option<Entry> {
        let first = self.heap.pop()?;
        if self.heap.peek().is_none_or(|e| e.cost_bits != first.cost_bits) {
            return Some(first);
        }
        let mut tied = vec![first];
        while self.heap.peek().is_some_and(|e| e.cost_bits == first.cost_bits) {
            tied.push(self.heap.pop().unwrap());
        }
        let mut best = 0;
        Self::materialize(&self.nodes, tied[0].node, &mut self.scratch_a);
        for (i, e) in tied.iter().enumerate().skip(1) {
            Self::materialize(&self.nodes, e.node, &mut self.scratch_b);
            if self.scratch_b < self.scratch_a {
                std::mem::swap(&mut self.scratch_a, &mut self.scratch_b);
                best = i;
            }
        }
        let chosen = tied.swap_remove(best);
        self.heap.extend(tied);
        Some(chosen)
    }

    /// Advances to the next pattern and returns its node, `ROOT` standing
    /// for the empty pattern. `None` once every pattern has been emitted.
    fn advance(&mut self) -> Option<u32> {
        let n = self.reliability.len();
        if !self.started {
            self.started = true;
            self.last_cost = 0.0;
            if n > 0 {
                self.push(ROOT, 0, 0.0);
            }
            return Some(ROOT);
        }
        let entry = self.pop_min()?;
        let node = self.nodes[entry.node as usize];
        let j = node.last as usize;
        if j + 1 < n {
            // append j+1: prefix becomes this pattern's full cost
            self.push(entry.node, j + 1, entry.cost());
            // replace j with j+1
            self.push(node.parent, j + 1, node.prefix);
        }
        self.last_cost = entry.cost();
        Some(entry.node)
    }

    fn syndrome_of(&self, node: u32) -> u64 {
        if node == ROOT {
            0
        } else {
            self.nodes[node as usize].syn
        }
    }
}

impl PatternSource for LikelihoodPatterns {
    fn next_pattern(&mut self, out: &mut Vec<usize>) -> bool {
        match self.advance() {
            Some(node) => {
                Self::materialize(&self.nodes, node, out);
                true
            }
            None => false,
        }
    }
}

/// Soft GRAND with abandonment: maximum-likelihood order, gives up after
/// `budget` queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SGrandAb {
    pub budget: u64,
}

impl SGrandAb {
    pub fn new(budget: u64) -> Self {
        SGrandAb { budget }
    }

    pub fn decode_soft(&self, code: &LinearCode, soft: &SoftVector) -> Result<DecodeOutcome> {
        let order = soft.reliability_order();
        let sorted: Vec<f64> = order.iter().map(|&i| soft.reliability[i]).collect();
        if code.syndrome_words() != 1 {
            return guess(code, &soft.hard, Some(&order), &mut LikelihoodPatterns::new(sorted), self.budget);
        }
        // Syndromes fit one word: keep them on the search tree so that a
        // query is a single comparison.
        let columns = order.iter().map(|&p| code.column(p)[0]).collect();
        let mut src = LikelihoodPatterns::with_columns(sorted, columns);
        let base = code.syndrome(&soft.hard)[0];
        let mut queries = 0;
        while queries < self.budget {
            let Some(node) = src.advance() else { break };
            queries += 1;
            if src.syndrome_of(node) == base {
                let mut pattern = Vec::new();
                LikelihoodPatterns::materialize(&src.nodes, node, &mut pattern);
                let mut codeword = soft.hard.clone();
                for p in pattern {
                    codeword[order[p]] ^= 1;
                }
                return Ok(DecodeOutcome {
                    message: Some(code.message_of(&codeword)?),
                    codeword: Some(codeword),
                    queries,
                    abandoned: false,
                });
            }
        }
        Ok(DecodeOutcome::abandoned(queries))
    }
}

impl Decoder for SGrandAb {
    fn budget(&self) -> u64 {
        self.budget
    }

    fn decode_with_budget(&self, code: &LinearCode, y: &[f64], budget: u64) -> Result<DecodeOutcome> {
        SGrandAb::new(budget).decode_soft(code, &SoftVector::new(y))
    }
}
