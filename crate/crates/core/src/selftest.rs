//! Quick invariant checks run by the `selftest` subcommand.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::{bpsk_modulate, gm_noise_sample, hard_decision, lattice_scale, transmit, GmParams};
use crate::codes::{crc_check, rlc_generate, Code, CrcSpec};
use crate::grand::{correlation_metric, ml_oracle, Decoder, LogisticPatterns, OrbGrand, PatternSource, SGrandAb};
use crate::harness::wilson_interval;
use crate::rate_region::{average_rate, capacity, recycled_capacity};
use crate::recycling::{decode_independent, decode_predetermined, estimate_noise, recycle};

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub name: &'static str,
    pub error: Option<String>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.error.is_none()
    }
}

type Check = fn() -> Result<(), String>;

const CHECKS: &[(&str, Check)] = &[
    ("gauss-markov recursion", gm_recursion),
    ("recycling removes the correlated part", recycling_identity),
    ("crc check value", crc_value),
    ("ca-polar codewords carry a valid crc", polar_consistency),
    ("orbgrand weights non-decreasing", orbgrand_order),
    ("sgrandab agrees with ml", sgrand_ml),
    ("rho = 0 recycling is independent decoding", rho_zero),
    ("rate region ordering", rate_region),
    ("wilson interval", wilson),
];

pub fn run_all() -> Vec<CheckResult> {
    CHECKS
        .iter()
        .map(|(name, f)| CheckResult { name, error: f().err() })
        .collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn gm_recursion() -> Result<(), String> {
    let params = GmParams::new(5, 64, 0.7, 1.3).map_err(|e| e.to_string())?;
    let noise = gm_noise_sample(&params, &mut ChaCha8Rng::seed_from_u64(1));
    for i in 1..5 {
        for j in 0..64 {
            let expect = lattice_scale(0.7, noise.z[i - 1][j]) + noise.xi[i][j];
            ensure(noise.z[i][j] == expect, || format!("row {i} column {j} breaks the recursion"))?;
        }
    }
    ensure(noise.z[0] == noise.xi[0], || "first row differs from its innovation".into())
}

fn recycling_identity() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let params = GmParams::new(2, 32, 0.8, 0.9).map_err(|e| e.to_string())?;
    let words: Vec<Vec<u8>> = (0..2).map(|_| (0..32).map(|_| rng.random_range(0..2u8)).collect()).collect();
    let sent = words.iter().map(|w| bpsk_modulate(w)).collect();
    let noise = gm_noise_sample(&params, &mut rng);
    let b = transmit(params, sent, noise).map_err(|e| e.to_string())?;
    let est = estimate_noise(&b.received[0], &words[0]).map_err(|e| e.to_string())?;
    let y = recycle(&b.received[1], &est, 0.8).map_err(|e| e.to_string())?;
    for j in 0..32 {
        ensure(y[j] - b.sent[1].as_slice()[j] == b.noise.xi[1][j], || format!("residual differs at {j}"))?;
    }
    Ok(())
}

fn crc_value() -> Result<(), String> {
    let bits: Vec<u8> = b"123456789".iter().flat_map(|c| (0..8).rev().map(move |i| c >> i & 1)).collect();
    let spec = CrcSpec::standard(8).map_err(|e| e.to_string())?;
    let r = spec.remainder(&bits).iter().fold(0u32, |acc, &b| acc << 1 | u32::from(b));
    ensure(r == 0xF4, || format!("CRC-8 of \"123456789\" is {r:#x}, expected 0xf4"))
}

fn polar_consistency() -> Result<(), String> {
    let code = Code::ca_polar(64, 46, 8, 4.0).map_err(|e| e.to_string())?;
    let spec = code.polar.clone().ok_or("missing polar spec")?;
    let crc = spec.crc.ok_or("missing crc")?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let msg: Vec<u8> = (0..46).map(|_| rng.random_range(0..2u8)).collect();
        let cw = code.linear.encode(&msg).map_err(|e| e.to_string())?;
        let u = crate::codes::polar_transform(&cw).map_err(|e| e.to_string())?;
        let carried: Vec<u8> = spec.info_set.iter().map(|&i| u[i]).collect();
        ensure(crc_check(&carried, &crc).map_err(|e| e.to_string())?, || "crc fails on a codeword".into())?;
        ensure(carried[..46] == msg[..], || "message not carried on the info set".into())?;
    }
    Ok(())
}

fn orbgrand_order() -> Result<(), String> {
    let mut src = LogisticPatterns::new(64);
    let mut buf = Vec::new();
    let mut prev = 0;
    for _ in 0..20_000 {
        if !src.next_pattern(&mut buf) {
            break;
        }
        let w: usize = buf.iter().map(|r| r + 1).sum();
        ensure(w >= prev, || format!("weight dropped from {prev} to {w}"))?;
        prev = w;
    }
    Ok(())
}

fn sgrand_ml() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let code = rlc_generate(16, 8, &mut rng).map_err(|e| e.to_string())?;
    let dec = SGrandAb::new(u64::MAX);
    for t in 0..100 {
        let msg: Vec<u8> = (0..8).map(|_| rng.random_range(0..2u8)).collect();
        let x = bpsk_modulate(&code.encode(&msg).map_err(|e| e.to_string())?);
        let y: Vec<f64> = x.as_slice().iter().map(|v| v + rng.random_range(-1.5..1.5)).collect();
        let got = dec.decode(&code, &y).map_err(|e| e.to_string())?;
        let ml = ml_oracle(&code, &y).map_err(|e| e.to_string())?;
        let c = got.codeword.ok_or("sgrandab abandoned with an unbounded budget")?;
        let (a, b) = (correlation_metric(&y, &c), correlation_metric(&y, &ml));
        ensure((a - b).abs() <= 1e-9 * b.abs().max(1.0), || format!("trial {t}: metric {a} vs ml {b}"))?;
    }
    Ok(())
}

fn rho_zero() -> Result<(), String> {
    let code = Code::ca_polar(32, 20, 6, 3.0).map_err(|e| e.to_string())?;
    let dec = OrbGrand::new(10_000);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let params = GmParams::new(3, 32, 0.0, 0.8).map_err(|e| e.to_string())?;
    for _ in 0..20 {
        let sent = (0..3)
            .map(|_| {
                let msg: Vec<u8> = (0..20).map(|_| rng.random_range(0..2u8)).collect();
                code.linear.encode(&msg).map(|c| bpsk_modulate(&c))
            })
            .collect::<crate::Result<Vec<_>>>()
            .map_err(|e| e.to_string())?;
        let noise = gm_noise_sample(&params, &mut rng);
        let b = transmit(params, sent, noise).map_err(|e| e.to_string())?;
        let codes = [&code.linear; 3];
        let a = decode_independent(&b, &codes, &[&dec; 3]).map_err(|e| e.to_string())?;
        let p = decode_predetermined(&b, &codes, &[&dec; 3], 0.0).map_err(|e| e.to_string())?;
        ensure(a.outcomes == p.outcomes, || "outcomes differ".into())?;
        ensure(p.inputs == b.received, || "recycled inputs differ from raw outputs".into())?;
        ensure(hard_decision(&p.inputs[0]) == hard_decision(&b.received[0]), || "lead input changed".into())?;
    }
    Ok(())
}

fn rate_region() -> Result<(), String> {
    for snr in [0.0, 0.1, 1.0, 10.0, 100.0] {
        for rho in [0.0, 0.3, -0.6, 0.9] {
            let c1 = capacity(snr).map_err(|e| e.to_string())?;
            let c2 = recycled_capacity(snr, rho).map_err(|e| e.to_string())?;
            ensure(c2 >= c1, || format!("c2 < c1 at snr {snr} rho {rho}"))?;
            for m in [1, 2, 8] {
                let avg = average_rate(snr, rho, m).map_err(|e| e.to_string())?;
                ensure(c1 <= avg + 1e-15 && avg <= c2 + 1e-15, || format!("avg outside [c1, c2] at m {m}"))?;
            }
        }
    }
    Ok(())
}

fn wilson() -> Result<(), String> {
    let (lo, hi) = wilson_interval(10, 1000, 0.95).map_err(|e| e.to_string())?;
    ensure((lo - 0.00544).abs() < 1e-4 && (hi - 0.01831).abs() < 1e-4, || format!("got ({lo}, {hi})"))
}
