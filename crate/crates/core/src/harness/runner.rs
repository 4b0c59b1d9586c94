use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::config::{ExperimentConfig, Scheme, SigmaMode};
use super::stats::wilson_interval;
use crate::channel::{bpsk_modulate, ebn0_to_sigma, gm_noise_sample, transmit, ChannelBundle, GmParams, NoiseMatrix};
use crate::codes::{Code, LinearCode};
use crate::error::{Error, Result};
use crate::grand::AnyDecoder;
use crate::recycling::{decode_independent, decode_predetermined, decode_racing, RecyclingResult};

/// Trials are dispatched and early stopping is checked in batches of this
/// size, so the number of trials run never depends on scheduling.
pub const BATCH: u64 = 500;

const CONFIDENCE: f64 = 0.95;

/// One (Eb/N0, channel, scheme) result row. Pooled rows use channel 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlerPoint {
    pub ebn0_db: f64,
    pub channel: usize,
    pub scheme: String,
    /// Blocks decoded for this row.
    pub trials: u64,
    pub errors: u64,
    pub bler: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub mean_queries: f64,
    pub abandoned: u64,
}

/// Bookkeeping for one Eb/N0 point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointSummary {
    pub ebn0_db: f64,
    /// Noise standard deviation each channel's rows were simulated with.
    pub sigma: Vec<f64>,
    pub trials: u64,
    pub stopped_early: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub points: Vec<BlerPoint>,
    pub summaries: Vec<PointSummary>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct RowKey {
    scheme: &'static str,
    channel: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Cell {
    blocks: u64,
    errors: u64,
    queries: u64,
    abandoned: u64,
}

impl Cell {
    fn add(&mut self, other: &Cell) {
        self.blocks += other.blocks;
        self.errors += other.errors;
        self.queries += other.queries;
        self.abandoned += other.abandoned;
    }

    fn channel(res: &RecyclingResult, j: usize) -> Cell {
        Cell {
            blocks: 1,
            errors: u64::from(!res.correct[j]),
            queries: res.outcomes[j].queries,
            abandoned: u64::from(res.outcomes[j].abandoned),
        }
    }
}

/// A validated experiment with its codes and decoders constructed.
#[derive(Debug, Clone)]
pub struct Experiment {
    config: ExperimentConfig,
    codes: Vec<Code>,
    decoders: Vec<AnyDecoder>,
    race: AnyDecoder,
    lag: AnyDecoder,
    /// Rate group of every channel and the rate defining each group's sigma.
    group_of: Vec<usize>,
    group_rates: Vec<f64>,
    rows: Vec<RowKey>,
}

impl Experiment {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        if config.trials > u64::from(u32::MAX) {
            return Err(Error::Config("trials must fit in 32 bits".into()));
        }
        let codes = config.build_codes()?;
        let (group_of, group_rates) = match config.sigma_mode {
            SigmaMode::Common => (vec![0; config.m], vec![codes[0].rate()]),
            SigmaMode::PerChannelRate => {
                let mut rates: Vec<f64> = Vec::new();
                let mut group_of = Vec::with_capacity(config.m);
                for c in &codes {
                    let g = match rates.iter().position(|&r| r == c.rate()) {
                        Some(g) => g,
                        None => {
                            rates.push(c.rate());
                            rates.len() - 1
                        }
                    };
                    group_of.push(g);
                }
                (group_of, rates)
            }
        };
        let rows = row_keys(&config);
        Ok(Experiment {
            decoders: config.channel_decoders(),
            race: config.race_decoder(),
            lag: config.lag_decoder(),
            config,
            codes,
            group_of,
            group_rates,
            rows,
        })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn codes(&self) -> &[Code] {
        &self.codes
    }

    /// Runs every Eb/N0 point. `threads = None` uses rayon's default pool
    /// size; results do not depend on it.
    pub fn run(&self, threads: Option<usize>) -> Result<RunReport> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.unwrap_or(0))
            .build()
            .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))?;
        let mut points = Vec::new();
        let mut summaries = Vec::new();
        for (e, &ebn0) in self.config.ebn0_db.iter().enumerate() {
            let sigmas = self
                .group_rates
                .iter()
                .map(|&r| ebn0_to_sigma(ebn0, r))
                .collect::<Result<Vec<f64>>>()?;
            let mut totals = vec![Cell::default(); self.rows.len()];
            let mut done = 0u64;
            let mut stopped_early = false;
            while done < self.config.trials {
                let end = (done + BATCH).min(self.config.trials);
                let batch: Vec<Vec<Cell>> = pool.install(|| {
                    (done..end)
                        .into_par_iter()
                        .map(|t| self.trial(e as u64, t, &sigmas))
                        .collect::<Result<Vec<_>>>()
                })?;
                for cells in &batch {
                    for (tot, c) in totals.iter_mut().zip(cells) {
                        tot.add(c);
                    }
                }
                done = end;
                if let Some(stop) = self.config.early_stop {
                    if done < self.config.trials
                        && done >= stop.min_trials
                        && totals.iter().all(|c| c.errors >= stop.errors)
                    {
                        stopped_early = true;
                        break;
                    }
                }
            }
            for (key, cell) in self.rows.iter().zip(&totals) {
                points.push(make_point(ebn0, key, cell)?);
            }
            summaries.push(PointSummary {
                ebn0_db: ebn0,
                sigma: self.group_of.iter().map(|&g| sigmas[g]).collect(),
                trials: done,
                stopped_early,
            });
        }
        Ok(RunReport { points, summaries })
    }

    /// Simulates one trial and returns one cell per row.
    fn trial(&self, ebn0_index: u64, trial: u64, sigmas: &[f64]) -> Result<Vec<Cell>> {
        let m = self.config.m;
        let rho = self.config.recycling_rho();
        let codes: Vec<&LinearCode> = self.codes.iter().map(|c| &c.linear).collect();
        let decoders: Vec<&AnyDecoder> = self.decoders.iter().collect();

        let mut main: Vec<Option<Cell>> = vec![None; m];
        let mut base: Vec<Option<Cell>> = vec![None; m];
        let mut race_pooled = None;

        for (g, &sigma) in sigmas.iter().enumerate() {
            let members: Vec<usize> = (0..m).filter(|&j| self.group_of[j] == g).collect();
            let mut rng = trial_rng(self.config.seed, ebn0_index, trial);
            let bundle = self.sample(&mut rng, sigma)?;
            let res = match self.config.scheme {
                Scheme::Independent => decode_independent(&bundle, &codes, &decoders)?,
                Scheme::Predetermined => decode_predetermined(&bundle, &codes, &decoders, rho)?,
                Scheme::Racing => decode_racing(&bundle, codes[0], &self.race, &self.lag, rho)?,
            };
            for &j in &members {
                main[j] = Some(Cell::channel(&res, j));
            }
            if self.config.scheme == Scheme::Racing {
                race_pooled = Some(racing_pooled(&res));
            }
            if self.config.baseline && self.config.scheme != Scheme::Independent {
                let ind = decode_independent(&bundle, &codes, &decoders)?;
                for &j in &members {
                    base[j] = Some(Cell::channel(&ind, j));
                }
            }
        }

        let mut cells = Vec::with_capacity(self.rows.len());
        let main: Vec<Cell> = main.into_iter().map(|c| c.expect("every channel has a group")).collect();
        cells.extend(&main);
        if let Some([winner, lagger, all]) = race_pooled {
            cells.push(winner);
            if m > 1 {
                cells.push(lagger);
            }
            cells.push(all);
        }
        let independent = if self.config.scheme == Scheme::Independent {
            Some(main)
        } else if self.config.baseline {
            Some(base.into_iter().map(|c| c.expect("every channel has a group")).collect())
        } else {
            None
        };
        if let Some(ind) = independent {
            if self.config.scheme != Scheme::Independent {
                cells.extend(&ind);
            }
            if m > 1 {
                let mut all = Cell::default();
                ind.iter().for_each(|c| all.add(c));
                cells.push(all);
            }
        }
        debug_assert_eq!(cells.len(), self.rows.len());
        Ok(cells)
    }

    fn sample(&self, rng: &mut ChaCha8Rng, sigma: f64) -> Result<ChannelBundle> {
        let n = self.codes[0].n();
        if self.codes.iter().any(|c| c.n() != n) {
            return Err(Error::Config("all channels must share one block length".into()));
        }
        let mut sent = Vec::with_capacity(self.config.m);
        for code in &self.codes {
            let msg: Vec<u8> = (0..code.k()).map(|_| rng.random_range(0..2u8)).collect();
            sent.push(bpsk_modulate(&code.linear.encode(&msg)?));
        }
        let params = GmParams::new(self.config.m, n, self.config.rho, sigma)?;
        let noise = if self.config.zero_noise {
            NoiseMatrix::zeros(self.config.m, n)
        } else {
            gm_noise_sample(&params, rng)
        };
        transmit(params, sent, noise)
    }
}

/// Winner, pooled laggers and all channels. A race without a winner counts
/// as an error on every channel.
fn racing_pooled(res: &RecyclingResult) -> [Cell; 3] {
    let m = res.correct.len();
    let mut all = Cell::default();
    (0..m).for_each(|j| all.add(&Cell::channel(res, j)));
    let (winner, lagger) = match res.winner {
        Some(w) => {
            let mut lag = Cell::default();
            (0..m).filter(|&j| j != w).for_each(|j| lag.add(&Cell::channel(res, j)));
            (Cell::channel(res, w), lag)
        }
        None => (
            Cell {
                blocks: 1,
                errors: 1,
                queries: res.outcomes.iter().map(|o| o.queries).min().unwrap_or(0),
                abandoned: 1,
            },
            Cell {
                blocks: m as u64 - 1,
                errors: m as u64 - 1,
                queries: 0,
                abandoned: m as u64 - 1,
            },
        ),
    };
    [winner, lagger, all]
}

fn row_keys(config: &ExperimentConfig) -> Vec<RowKey> {
    let m = config.m;
    let per_channel = |scheme: &'static str| (1..=m).map(move |channel| RowKey { scheme, channel });
    let mut rows: Vec<RowKey> = per_channel(config.scheme.name()).collect();
    if config.scheme == Scheme::Racing {
        rows.push(RowKey { scheme: "racing_winner", channel: 0 });
        if m > 1 {
            rows.push(RowKey { scheme: "racing_lagger", channel: 0 });
        }
        rows.push(RowKey { scheme: "racing_all", channel: 0 });
    }
    let has_independent = config.scheme == Scheme::Independent || config.baseline;
    if has_independent {
        if config.scheme != Scheme::Independent {
            rows.extend(per_channel("independent"));
        }
        if m > 1 {
            rows.push(RowKey { scheme: "independent_all", channel: 0 });
        }
    }
    rows
}

fn make_point(ebn0_db: f64, key: &RowKey, cell: &Cell) -> Result<BlerPoint> {
    let (ci_low, ci_high) = wilson_interval(cell.errors, cell.blocks, CONFIDENCE)?;
    Ok(BlerPoint {
        ebn0_db,
        channel: key.channel,
        scheme: key.scheme.to_string(),
        trials: cell.blocks,
        errors: cell.errors,
        bler: cell.errors as f64 / cell.blocks as f64,
        ci_low,
        ci_high,
        mean_queries: cell.queries as f64 / cell.blocks as f64,
        abandoned: cell.abandoned,
    })
}

/// Random generator of one trial, a pure function of the master seed, the
/// Eb/N0 index and the trial index.
pub fn trial_rng(seed: u64, ebn0_index: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((ebn0_index << 32) | trial);
    rng
}

/// Validates `config`, builds its codes and runs it on the default pool.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<BlerPoint>> {
    Ok(Experiment::new(config.clone())?.run(None)?.points)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(scheme: &str, extra: &str) -> ExperimentConfig {
        ExperimentConfig::from_toml_str(&format!(
            r#"
scheme = "{scheme}"
m = 2
rho = 0.8
ebn0_db = [2.0, 4.0]
trials = 60
seed = 3
budget = 2000
{extra}

[[channel]]
family = "ca-polar"
n = 32
k = 20
crc_degree = 6
"#
        ))
        .unwrap()
    }

    fn find<'a>(pts: &'a [BlerPoint], scheme: &str, channel: usize, ebn0: f64) -> &'a BlerPoint {
        pts.iter()
            .find(|p| p.scheme == scheme && p.channel == channel && p.ebn0_db == ebn0)
            .unwrap()
    }

    #[test]
    fn rows_for_racing_with_baseline() {
        let pts = run_experiment(&config("racing", "baseline = true")).unwrap();
        let schemes: Vec<(&str, usize)> = pts[..7].iter().map(|p| (p.scheme.as_str(), p.channel)).collect();
        assert_eq!(
            schemes,
            [
                ("racing", 1),
                ("racing", 2),
                ("racing_winner", 0),
                ("racing_lagger", 0),
                ("racing_all", 0),
                ("independent", 1),
                ("independent", 2),
            ]
        );
        assert_eq!(pts.len(), 16);
        let all = find(&pts, "racing_all", 0, 2.0);
        assert_eq!(all.trials, 120);
        assert_eq!(all.errors, find(&pts, "racing", 1, 2.0).errors + find(&pts, "racing", 2, 2.0).errors);
        for p in &pts {
            assert!(p.ci_low <= p.bler && p.bler <= p.ci_high);
            assert_eq!(p.bler, p.errors as f64 / p.trials as f64);
        }
    }

    #[test]
    fn zero_noise_gives_no_errors() {
        let pts = run_experiment(&config("predetermined", "zero_noise = true\nbaseline = true")).unwrap();
        assert!(pts.iter().all(|p| p.errors == 0 && p.mean_queries == 1.0));
    }

    #[test]
    fn rho_zero_schemes_agree() {
        let mut a = config("independent", "");
        a.rho = 0.0;
        let mut b = config("predetermined", "");
        b.rho = 0.0;
        let pa = run_experiment(&a).unwrap();
        let pb = run_experiment(&b).unwrap();
        for ebn0 in [2.0, 4.0] {
            for ch in [1, 2] {
                let x = find(&pa, "independent", ch, ebn0);
                let y = find(&pb, "predetermined", ch, ebn0);
                assert_eq!((x.errors, x.mean_queries, x.abandoned), (y.errors, y.mean_queries, y.abandoned));
            }
        }
    }

    #[test]
    fn thread_count_does_not_matter() {
        let exp = Experiment::new(config("racing", "baseline = true")).unwrap();
        assert_eq!(exp.run(Some(1)).unwrap(), exp.run(Some(3)).unwrap());
    }

    #[test]
    fn early_stop_runs_whole_batches() {
        let mut cfg = config("independent", "early_stop = { errors = 1, min_trials = 0 }");
        cfg.trials = 5 * BATCH;
        cfg.ebn0_db = vec![-2.0];
        let report = Experiment::new(cfg).unwrap().run(None).unwrap();
        assert_eq!(report.summaries[0].trials, BATCH);
        assert!(report.summaries[0].stopped_early);
        assert_eq!(report.points[0].trials, BATCH);
    }

    #[test]
    fn trial_streams_differ() {
        let a: u64 = trial_rng(1, 0, 0).random();
        let b: u64 = trial_rng(1, 0, 1).random();
        let c: u64 = trial_rng(1, 1, 0).random();
        let a2: u64 = trial_rng(1, 0, 0).random();
        assert_eq!(a, a2);
        assert!(a != b && a != c && b != c);
    }
}
