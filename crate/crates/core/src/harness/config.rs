use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::codes::{default_crc_degree, Code, CodeFamily};
use crate::error::{Error, Result};
use crate::grand::{AnyDecoder, DecoderKind, DEFAULT_BUDGET};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Independent,
    Predetermined,
    Racing,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Independent => "independent",
            Scheme::Predetermined => "predetermined",
            Scheme::Racing => "racing",
        }
    }
}

/// How Eb/N0 is turned into a noise level when channels have different rates.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SigmaMode {
    /// Each channel's reported curve uses the sigma of its own rate.
    #[default]
    PerChannelRate,
    /// One sigma for all channels, set by the rate of the first channel.
    Common,
}

/// Stop a point early once every reported row has `errors` block errors and
/// at least `min_trials` trials have run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EarlyStop {
    #[serde(default = "default_stop_errors")]
    pub errors: u64,
    #[serde(default)]
    pub min_trials: u64,
}

fn default_stop_errors() -> u64 {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    pub family: CodeFamily,
    pub n: usize,
    pub k: usize,
    /// Seed of the random generator matrix (RLC only).
    #[serde(default)]
    pub seed: u64,
    /// CRC degree for CA-polar codes; 0 disables the CRC.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crc_degree: Option<u32>,
    /// Decoder used for this channel outside the race.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decoder: Option<DecoderKind>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scheme: Scheme,
    pub m: usize,
    pub rho: f64,
    /// Correlation assumed by the receiver; defaults to `rho`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decoder_rho: Option<f64>,
    pub ebn0_db: Vec<f64>,
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_budget")]
    pub budget: u64,
    /// Default decoder for every role not set explicitly.
    #[serde(default = "default_decoder")]
    pub decoder: DecoderKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub race_decoder: Option<DecoderKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lag_decoder: Option<DecoderKind>,
    /// Also run independent decoding on the same trials.
    #[serde(default)]
    pub baseline: bool,
    #[serde(default)]
    pub sigma_mode: SigmaMode,
    /// Replace the channel noise by zeros.
    #[serde(default)]
    pub zero_noise: bool,
    /// Eb/N0 used for polar construction; defaults to the middle of the grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub design_ebn0_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub early_stop: Option<EarlyStop>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// One block per channel, or a single block shared by all channels.
    pub channel: Vec<ChannelConfig>,
}

fn default_budget() -> u64 {
    DEFAULT_BUDGET
}

fn default_decoder() -> DecoderKind {
    DecoderKind::Sgrandab
}

fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return invalid("m must be at least 1");
        }
        if !(self.rho.abs() < 1.0) {
            return invalid(format!("rho must satisfy |rho| < 1, got {}", self.rho));
        }
        if let Some(r) = self.decoder_rho {
            if !(r.abs() < 1.0) {
                return invalid(format!("decoder_rho must satisfy |rho| < 1, got {r}"));
            }
        }
        if self.trials == 0 {
            return invalid("trials must be at least 1");
        }
        if self.ebn0_db.is_empty() {
            return invalid("ebn0_db must list at least one point");
        }
        if let Some(v) = self.ebn0_db.iter().chain(&self.design_ebn0_db).find(|v| !v.is_finite()) {
            return invalid(format!("Eb/N0 values must be finite, got {v}"));
        }
        if self.channel.len() != 1 && self.channel.len() != self.m {
            return invalid(format!(
                "expected 1 or {} [[channel]] blocks, found {}",
                self.m,
                self.channel.len()
            ));
        }
        for (j, ch) in self.channel.iter().enumerate() {
            if ch.k == 0 || ch.k >= ch.n {
                return invalid(format!("channel {}: need 0 < k < n, got n={} k={}", j + 1, ch.n, ch.k));
            }
            if ch.family == CodeFamily::CaPolar && !ch.n.is_power_of_two() {
                return invalid(format!("channel {}: CA-polar length must be a power of two", j + 1));
            }
            if ch.family == CodeFamily::Rlc && ch.crc_degree.is_some() {
                return invalid(format!("channel {}: crc_degree applies to ca-polar only", j + 1));
            }
        }
        if self.scheme == Scheme::Racing {
            if self.channel.iter().any(|c| c.decoder.is_some()) {
                return invalid("racing uses race_decoder and lag_decoder, not per-channel decoders");
            }
            if self.channels().windows(2).any(|w| w[0] != w[1]) {
                return invalid("racing requires the same code on every channel");
            }
        } else if self.race_decoder.is_some() || self.lag_decoder.is_some() {
            return invalid("race_decoder and lag_decoder apply to the racing scheme only");
        }
        if let Some(stop) = self.early_stop {
            if stop.errors == 0 {
                return invalid("early_stop.errors must be at least 1");
            }
        }
        Ok(())
    }

    /// Channel blocks expanded to one per channel.
    pub fn channels(&self) -> Vec<ChannelConfig> {
        if self.channel.len() == 1 {
            vec![self.channel[0].clone(); self.m]
        } else {
            self.channel.clone()
        }
    }

    pub fn recycling_rho(&self) -> f64 {
        self.decoder_rho.unwrap_or(self.rho)
    }

    pub fn design_ebn0(&self) -> f64 {
        self.design_ebn0_db.unwrap_or_else(|| {
            let lo = self.ebn0_db.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = self.ebn0_db.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (lo + hi) / 2.0
        })
    }

    pub fn build_codes(&self) -> Result<Vec<Code>> {
        let design = self.design_ebn0();
        let mut built: Vec<(ChannelConfig, Code)> = Vec::new();
        let mut codes = Vec::with_capacity(self.m);
        for ch in self.channels() {
            // identical blocks share one construction
            if let Some((_, c)) = built.iter().find(|(b, _)| *b == ch) {
                codes.push(c.clone());
                continue;
            }
            let code = match ch.family {
                CodeFamily::Rlc => Code::rlc(ch.n, ch.k, ch.seed)?,
                CodeFamily::CaPolar => {
                    Code::ca_polar(ch.n, ch.k, ch.crc_degree.unwrap_or_else(|| default_crc_degree(ch.n)), design)?
                }
            };
            built.push((ch, code.clone()));
            codes.push(code);
        }
        Ok(codes)
    }

    /// Per-channel decoders for independent and predetermined decoding.
    pub fn channel_decoders(&self) -> Vec<AnyDecoder> {
        self.channels()
            .iter()
            .map(|c| c.decoder.unwrap_or(self.decoder).with_budget(self.budget))
            .collect()
    }

    pub fn race_decoder(&self) -> AnyDecoder {
        self.race_decoder.unwrap_or(self.decoder).with_budget(self.budget)
    }

    pub fn lag_decoder(&self) -> AnyDecoder {
        self.lag_decoder.or(self.race_decoder).unwrap_or(self.decoder).with_budget(self.budget)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const RACING: &str = r#"
scheme = "racing"
m = 3
rho = 0.8
ebn0_db = [3.0, 4.0, 5.0]
trials = 100
seed = 7
budget = 1000

[[channel]]
family = "ca-polar"
n = 64
k = 46
"#;

    #[test]
    fn parses_and_broadcasts() {
        let cfg = ExperimentConfig::from_toml_str(RACING).unwrap();
        assert_eq!(cfg.scheme, Scheme::Racing);
        assert_eq!(cfg.channels().len(), 3);
        assert_eq!(cfg.decoder, DecoderKind::Sgrandab);
        assert_eq!(cfg.design_ebn0(), 4.0);
        assert_eq!(cfg.lag_decoder().kind(), DecoderKind::Sgrandab);
        let codes = cfg.build_codes().unwrap();
        assert_eq!(codes.len(), 3);
        assert_eq!(codes[0].k(), 46);
    }

    #[test]
    fn roundtrips_through_toml() {
        let cfg = ExperimentConfig::from_toml_str(RACING).unwrap();
        let again = ExperimentConfig::from_toml_str(&cfg.to_toml_string().unwrap()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn rejects_bad_configs() {
        let bad = [
            RACING.replace("m = 3", "m = 0"),
            RACING.replace("rho = 0.8", "rho = 1.0"),
            RACING.replace("trials = 100", "trials = 0"),
            RACING.replace("ebn0_db = [3.0, 4.0, 5.0]", "ebn0_db = []"),
            RACING.replace("k = 46", "k = 64"),
            RACING.replace("n = 64", "n = 48"),
            RACING.replace("budget = 1000", "budget = 1000\ncolour = 3"),
            RACING.replace("family = \"ca-polar\"", "family = \"turbo\""),
            RACING.replace("k = 46", "k = 46\ndecoder = \"grand\""),
            RACING.replace("scheme = \"racing\"", "scheme = \"predetermined\"\nrace_decoder = \"grand\""),
            format!("{RACING}\n[[channel]]\nfamily = \"rlc\"\nn = 64\nk = 40\n"),
        ];
        for text in &bad {
            assert!(matches!(ExperimentConfig::from_toml_str(text), Err(Error::Config(_))), "{text}");
        }
    }

    #[test]
    fn racing_needs_identical_codes() {
        let text = RACING.replace("m = 3", "m = 2")
            + "\n[[channel]]\nfamily = \"rlc\"\nn = 64\nk = 46\n";
        assert!(ExperimentConfig::from_toml_str(&text).is_err());
        let text = text.replace("\"racing\"", "\"predetermined\"");
        let cfg = ExperimentConfig::from_toml_str(&text).unwrap();
        let codes = cfg.build_codes().unwrap();
        assert_eq!(codes[1].family, CodeFamily::Rlc);
    }
}
