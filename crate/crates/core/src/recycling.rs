//! Noise recycling schemes.
//!
//! After a channel is decoded, its noise realization is estimated as
//! `z_hat = y - x_hat` from the raw received vector and the modulated
//! decoding. A correlated neighbour then decodes `y' = y - rho * z_hat`
//! instead of its raw output. Estimates are passed on whether or not the
//! decoding was right; an abandoned decoding falls back to the hard
//! decisions of its decoder input.
//!
//! Channel indices are 0-based throughout this module.

use crate::channel::{bpsk_modulate, hard_decision, lattice_scale, ChannelBundle};
use crate::codes::LinearCode;
use crate::error::{check_len, Result};
use crate::grand::{DecodeOutcome, Decoder};

/// Noise estimate recovered from a decoded channel.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseEstimate(pub Vec<f64>);

impl NoiseEstimate {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// `y - bpsk(decoded)`.
pub fn estimate_noise(y: &[f64], decoded: &[u8]) -> Result<NoiseEstimate> {
    check_len(y.len(), decoded.len())?;
    let x = bpsk_modulate(decoded);
    Ok(NoiseEstimate(y.iter().zip(x.as_slice()).map(|(a, b)| a - b).collect()))
}

/// `y - rho * z_hat`, with the product rounded onto the noise lattice.
pub fn recycle(y: &[f64], z_hat: &NoiseEstimate, rho: f64) -> Result<Vec<f64>> {
    check_len(y.len(), z_hat.0.len())?;
    Ok(y.iter().zip(&z_hat.0).map(|(&v, &z)| v - lattice_scale(rho, z)).collect())
}

/// Per-trial outcome of a decoding scheme over all channels.
#[derive(Debug, Clone, PartialEq)]
pub struct RecyclingResult {
    /// Final outcome of each channel.
    pub outcomes: Vec<DecodeOutcome>,
    /// Whether each channel's decoding equals the transmitted codeword.
    pub correct: Vec<bool>,
    /// The vector each channel's final decoder was fed.
    pub inputs: Vec<Vec<f64>>,
    /// Whether that input had a recycled estimate removed.
    pub recycled: Vec<bool>,
    /// Race winner, for the racing scheme when some decoder finished.
    pub winner: Option<usize>,
    /// Queries spent by each channel's race decoder before the race ended.
    /// Empty for schemes without a race.
    pub race_queries: Vec<u64>,
}

impl RecyclingResult {
    /// Final query count of each channel.
    pub fn queries(&self) -> Vec<u64> {
        self.outcomes.iter().map(|o| o.queries).collect()
    }

    pub fn errors(&self) -> usize {
        self.correct.iter().filter(|c| !**c).count()
    }
}

fn is_correct(bundle: &ChannelBundle, channel: usize, outcome: &DecodeOutcome) -> bool {
    outcome
        .codeword
        .as_ref()
        .is_some_and(|c| bpsk_modulate(c) == bundle.sent[channel])
}

/// Decodes `input` and returns the outcome with the noise estimate taken
/// against the raw `y`.
fn decode_and_estimate<D: Decoder + ?Sized>(
    decoder: &D,
    code: &LinearCode,
    y: &[f64],
    input: &[f64],
) -> Result<(DecodeOutcome, NoiseEstimate)> {
    let outcome = decoder.decode(code, input)?;
    let est = estimate_from(y, input, &outcome)?;
    Ok((outcome, est))
}

fn estimate_from(y: &[f64], input: &[f64], outcome: &DecodeOutcome) -> Result<NoiseEstimate> {
    match &outcome.codeword {
        Some(c) => estimate_noise(y, c),
        None => estimate_noise(y, &hard_decision(input)),
    }
}

fn check_lists(bundle: &ChannelBundle, codes: usize, decoders: usize) -> Result<()> {
    check_len(bundle.m(), codes)?;
    check_len(bundle.m(), decoders)
}

/// Every channel decoded from its raw output.
pub fn decode_independent<D: Decoder + ?Sized>(
    bundle: &ChannelBundle,
    codes: &[&LinearCode],
    decoders: &[&D],
) -> Result<RecyclingResult> {
    check_lists(bundle, codes.len(), decoders.len())?;
    let mut outcomes = Vec::with_capacity(bundle.m());
    for (j, y) in bundle.received.iter().enumerate() {
        outcomes.push(decoders[j].decode(codes[j], y)?);
    }
    let correct = outcomes.iter().enumerate().map(|(j, o)| is_correct(bundle, j, o)).collect();
    Ok(RecyclingResult {
        outcomes,
        correct,
        inputs: bundle.received.clone(),
        recycled: vec![false; bundle.m()],
        winner: None,
        race_queries: Vec::new(),
    })
}

/// Channel 0 leads; channel `j` decodes with the estimate from channel `j - 1`.
pub fn decode_predetermined<D: Decoder + ?Sized>(
    bundle: &ChannelBundle,
    codes: &[&LinearCode],
    decoders: &[&D],
    rho: f64,
) -> Result<RecyclingResult> {
    check_lists(bundle, codes.len(), decoders.len())?;
    let m = bundle.m();
    let mut outcomes = Vec::with_capacity(m);
    let mut inputs = Vec::with_capacity(m);
    let mut previous: Option<NoiseEstimate> = None;
    for (j, y) in bundle.received.iter().enumerate() {
        let input = match &previous {
            None => y.clone(),
            Some(est) => recycle(y, est, rho)?,
        };
        let (outcome, est) = decode_and_estimate(decoders[j], codes[j], y, &input)?;
        previous = Some(est);
        outcomes.push(outcome);
        inputs.push(input);
    }
    let correct = outcomes.iter().enumerate().map(|(j, o)| is_correct(bundle, j, o)).collect();
    Ok(RecyclingResult {
        outcomes,
        correct,
        inputs,
        recycled: (0..m).map(|j| j > 0).collect(),
        winner: None,
        race_queries: Vec::new(),
    })
}

/// Racing: every channel starts decoding with `race`; the one needing the
/// fewest queries (lowest index on ties) leads, and the others are decoded
/// outward from it with `lag`, each using the estimate of its neighbour
/// towards the winner.
///
/// Losing race decoders stop as soon as they can no longer win, so their
/// entries in `race_queries` are truncated counts.
pub fn decode_racing<R: Decoder + ?Sized, L: Decoder + ?Sized>(
    bundle: &ChannelBundle,
    code: &LinearCode,
    race: &R,
    lag: &L,
    rho: f64,
) -> Result<RecyclingResult> {
    let m = bundle.m();
    let mut race_outcomes = Vec::with_capacity(m);
    let mut race_queries = Vec::with_capacity(m);
    let mut leader: Option<(usize, u64)> = None;
    for (i, y) in bundle.received.iter().enumerate() {
        let budget = match leader {
            None => race.budget(),
            // a later channel wins only with strictly fewer queries
            Some((_, q)) => race.budget().min(q - 1),
        };
        let outcome = race.decode_with_budget(code, y, budget)?;
        race_queries.push(outcome.queries);
        if !outcome.abandoned {
            leader = Some((i, outcome.queries));
        }
        race_outcomes.push(outcome);
    }

    let Some((winner, _)) = leader else {
        return Ok(RecyclingResult {
            correct: vec![false; m],
            outcomes: race_outcomes,
            inputs: bundle.received.clone(),
            recycled: vec![false; m],
            winner: None,
            race_queries,
        });
    };

    let mut outcomes: Vec<Option<DecodeOutcome>> = vec![None; m];
    let mut inputs: Vec<Vec<f64>> = vec![Vec::new(); m];
    let mut estimates: Vec<Option<NoiseEstimate>> = vec![None; m];

    let y_win = &bundle.received[winner];
    estimates[winner] = Some(estimate_from(y_win, y_win, &race_outcomes[winner])?);
    inputs[winner] = y_win.clone();
    outcomes[winner] = Some(race_outcomes.swap_remove(winner));

    for step in 1..=(m - 1 - winner).max(winner) {
        let mut targets = Vec::with_capacity(2);
        if step <= winner {
            targets.push((winner - step, winner - step + 1));
        }
        if winner + step < m {
            targets.push((winner + step, winner + step - 1));
        }
        for (ch, from) in targets {
            let y = &bundle.received[ch];
            let est = estimates[from].as_ref().expect("neighbour decoded in an earlier step");
            let input = recycle(y, est, rho)?;
            let (outcome, est) = decode_and_estimate(lag, code, y, &input)?;
            estimates[ch] = Some(est);
            inputs[ch] = input;
            outcomes[ch] = Some(outcome);
        }
    }

    let outcomes: Vec<DecodeOutcome> = outcomes.into_iter().map(|o| o.expect("every channel decoded")).collect();
    let correct = outcomes.iter().enumerate().map(|(j, o)| is_correct(bundle, j, o)).collect();
    Ok(RecyclingResult {
        outcomes,
        correct,
        inputs,
        recycled: (0..m).map(|j| j != winner).collect(),
        winner: Some(winner),
        race_queries,
    })
}
