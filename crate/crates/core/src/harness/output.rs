use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::ExperimentConfig;
use super::runner::{BlerPoint, PointSummary};
use crate::codes::{Code, CodeFamily};
use crate::error::{param, Error, Result};

pub const CSV_HEADER: &str = "ebn0_db,channel,scheme,trials,errors,bler,ci_low,ci_high,mean_queries,abandoned";

/// Everything needed to rerun an experiment bit for bit.
#[derive(Debug, Clone, Serialize)]
pub struct Snapshot {
    pub config: ExperimentConfig,
    pub code: Vec<CodeRecord>,
    pub point: Vec<PointSummary>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CodeRecord {
    pub channel: usize,
    pub family: CodeFamily,
    pub n: usize,
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crc_degree: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crc_poly: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub info_set: Option<Vec<usize>>,
}

impl Snapshot {
    pub fn new(config: &ExperimentConfig, codes: &[Code], summaries: &[PointSummary]) -> Self {
        let channels = config.channels();
        let code = codes
            .iter()
            .zip(&channels)
            .enumerate()
            .map(|(j, (c, ch))| {
                let crc = c.polar.as_ref().and_then(|p| p.crc);
                CodeRecord {
                    channel: j + 1,
                    family: c.family,
                    n: c.n(),
                    k: c.k(),
                    seed: (c.family == CodeFamily::Rlc).then_some(ch.seed),
                    crc_degree: c.polar.as_ref().map(|_| crc.map_or(0, |s| s.degree() as u32)),
                    crc_poly: crc.map(|s| s.poly()),
                    info_set: c.polar.as_ref().map(|p| p.info_set.clone()),
                }
            })
            .collect();
        Snapshot {
            config: config.clone(),
            code,
            point: summaries.to_vec(),
        }
    }
}

/// Formats points as CSV, sorted by (scheme, channel, ebn0_db).
pub fn csv_string(points: &[BlerPoint]) -> String {
    let mut sorted: Vec<&BlerPoint> = points.iter().collect();
    sorted.sort_by(|a, b| {
        a.scheme
            .cmp(&b.scheme)
            .then(a.channel.cmp(&b.channel))
            .then(a.ebn0_db.total_cmp(&b.ebn0_db))
    });
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for p in sorted {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            p.ebn0_db, p.channel, p.scheme, p.trials, p.errors, p.bler, p.ci_low, p.ci_high, p.mean_queries, p.abandoned
        );
    }
    out
}

/// Whitespace-separated plot data per (scheme, channel) pair.
fn series(points: &[BlerPoint]) -> Vec<(String, String)> {
    let mut keys: Vec<(&str, usize)> = points.iter().map(|p| (p.scheme.as_str(), p.channel)).collect();
    keys.sort();
    keys.dedup();
    keys.into_iter()
        .map(|(scheme, channel)| {
            let mut rows: Vec<&BlerPoint> =
                points.iter().filter(|p| p.scheme == scheme && p.channel == channel).collect();
            rows.sort_by(|a, b| a.ebn0_db.total_cmp(&b.ebn0_db));
            let mut text = String::from("# ebn0_db bler ci_low ci_high\n");
            for p in rows {
                let _ = writeln!(text, "{} {} {} {}", p.ebn0_db, p.bler, p.ci_low, p.ci_high);
            }
            (format!("{scheme}_ch{channel}.dat"), text)
        })
        .collect()
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes `bler.csv`, one `series/<scheme>_ch<channel>.dat` file per row
/// family and, when given, a `config.toml` snapshot into `dir`. Returns the
/// CSV path.
pub fn emit_results(points: &[BlerPoint], dir: &Path, snapshot: Option<&Snapshot>) -> Result<PathBuf> {
    if points.is_empty() {
        return param("no result points to write");
    }
    create_dir(dir)?;
    let csv = dir.join("bler.csv");
    write(&csv, &csv_string(points))?;
    let series_dir = dir.join("series");
    create_dir(&series_dir)?;
    for (name, text) in series(points) {
        write(&series_dir.join(name), &text)?;
    }
    if let Some(snap) = snapshot {
        let text = toml::to_string(snap).map_err(|e| Error::Config(e.to_string()))?;
        write(&dir.join("config.toml"), &text)?;
    }
    Ok(csv)
}
