//! Binary linear block codes: random linear codes, CRCs and CRC-aided polar
//! codes, all exposed through [`LinearCode`] for encoding and membership.

pub mod crc;
pub mod linear;
pub mod polar;
pub mod rlc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use crc::{crc_append, crc_check, CrcSpec};
pub use linear::LinearCode;
pub use polar::{ca_polar_encode, polar_transform, CaPolarSpec};
pub use rlc::rlc_generate;

use crate::error::{param, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CodeFamily {
    Rlc,
    CaPolar,
}

/// Default CRC degree for a CA-polar code of length `n`.
pub fn default_crc_degree(n: usize) -> u32 {
    if n <= 128 {
        8
    } else {
        11
    }
}

/// A constructed code together with what is needed to reproduce it.
#[derive(Debug, Clone)]
pub struct Code {
    pub family: CodeFamily,
    pub linear: LinearCode,
    /// Present for CA-polar codes.
    pub polar: Option<CaPolarSpec>,
}

impl Code {
    /// A random linear code drawn from `seed`.
    pub fn rlc(n: usize, k: usize, seed: u64) -> Result<Self> {
        let linear = rlc_generate(n, k, &mut ChaCha8Rng::seed_from_u64(seed))?;
        Ok(Code {
            family: CodeFamily::Rlc,
            linear,
            polar: None,
        })
    }

    /// A CA-polar code with `k` user bits and a degree-`crc_degree` CRC
    /// (`0` for none), designed at `design_ebn0_db`.
    pub fn ca_polar(n: usize, k: usize, crc_degree: u32, design_ebn0_db: f64) -> Result<Self> {
        let crc = if crc_degree == 0 {
            None
        } else {
            Some(CrcSpec::standard(crc_degree)?)
        };
        let spec = CaPolarSpec::construct(n, k, crc, design_ebn0_db)?;
        Self::from_polar(spec)
    }

    pub fn from_polar(spec: CaPolarSpec) -> Result<Self> {
        if spec.k == 0 {
            return param("CA-polar code needs k >= 1");
        }
        let linear = spec.linear_code()?;
        Ok(Code {
            family: CodeFamily::CaPolar,
            linear,
            polar: Some(spec),
        })
    }

    pub fn n(&self) -> usize {
        self.linear.n()
    }

    pub fn k(&self) -> usize {
        self.linear.k()
    }

    pub fn rate(&self) -> f64 {
        self.linear.rate()
    }
}
