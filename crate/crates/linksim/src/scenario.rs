//! Scenario files: JSON description of one link-level experiment.

use std::path::{Path, PathBuf};

use fcwave_core::qam::Modulation;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumerologySpec {
    pub scs_khz: u32,
    pub n_fft: usize,
}

impl Default for NumerologySpec {
    fn default() -> Self {
        Self {
            scs_khz: 15,
            n_fft: 1024,
        }
    }
}

/// Subband width class of the two scenario tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Band {
    /// One PRB per subband: 8 active of 12 subcarriers.
    Prb1,
    /// Four PRBs per subband: 44 active of 48 subcarriers.
    Prb4,
    /// One 52-PRB subband: 624 active subcarriers.
    Prb52,
}

impl Band {
    pub fn is_wide(self) -> bool {
        self == Band::Prb52
    }

    /// Subcarriers between adjacent subband centers.
    pub fn width(self) -> usize {
        match self {
            Band::Prb1 => 12,
            Band::Prb4 => 48,
            Band::Prb52 => 624,
        }
    }

    pub fn active(self) -> usize {
        match self {
            Band::Prb1 => 8,
            Band::Prb4 => 44,
            Band::Prb52 => 624,
        }
    }

    pub fn default_n_tb(self) -> usize {
        match self {
            Band::Prb52 => 4,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModulationSpec {
    Qpsk,
    #[serde(rename = "16qam")]
    Qam16,
    #[serde(rename = "64qam")]
    Qam64,
}

impl From<ModulationSpec> for Modulation {
    fn from(m: ModulationSpec) -> Self {
        match m {
            ModulationSpec::Qpsk => Modulation::Qpsk,
            ModulationSpec::Qam16 => Modulation::Qam16,
            ModulationSpec::Qam64 => Modulation::Qam64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelSpec {
    Awgn,
    /// Tapped delay line. Without `profile` an exponential power-delay
    /// profile with the requested spread is used.
    Tdl {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        profile: Option<PathBuf>,
        rms_ds_ns: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum SyncSpec {
    #[default]
    Synchronous,
    /// Neighbouring subbands arrive `offset` high-rate samples late.
    Asynchronous { offset: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RxPathSpec {
    #[default]
    Direct,
    Simplified,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub id: String,
    #[serde(default)]
    pub numerology: NumerologySpec,
    pub band: Band,
    /// Adjacent subbands; the middle one is evaluated.
    #[serde(default = "default_subbands")]
    pub subbands: usize,
    /// Center bin of the evaluated subband in the `n_fft` grid.
    #[serde(default)]
    pub center_bin: i64,
    /// Filtering configuration id: 1-6 for narrow bands, 1-4 for 52 PRBs.
    pub filtering: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_tb: Option<usize>,
    pub channel: ChannelSpec,
    #[serde(default)]
    pub sync: SyncSpec,
    pub modulation: ModulationSpec,
    pub snr_db: Vec<f64>,
    #[serde(default = "default_symbols")]
    pub symbols: usize,
    pub drops: usize,
    pub seed: u64,
    #[serde(default)]
    pub rx_path: RxPathSpec,
}

fn default_subbands() -> usize {
    3
}

fn default_symbols() -> usize {
    14
}

impl Scenario {
    pub fn n_tb(&self) -> usize {
        self.n_tb.unwrap_or(self.band.default_n_tb())
    }

    pub fn target(&self) -> usize {
        self.subbands / 2
    }

    pub fn validate(&self) -> Result<()> {
        if self.id.is_empty() || self.id.contains(['/', '\\']) {
            return Err(SimError::field(
                "id",
                "must be a non-empty file-name-safe string",
            ));
        }
        let n = self.numerology.n_fft;
        if !n.is_power_of_two() || n < 1024 {
            return Err(SimError::field(
                "numerology.n_fft",
                "must be a power of two >= 1024",
            ));
        }
        if self.numerology.scs_khz == 0 {
            return Err(SimError::field("numerology.scs_khz", "must be positive"));
        }
        let max_cfg = if self.band.is_wide() { 4 } else { 6 };
        if !(1..=max_cfg).contains(&self.filtering) {
            return Err(SimError::field(
                "filtering",
                format!(
                    "{} is not a configuration id 1..={max_cfg} for {:?}",
                    self.filtering, self.band
                ),
            ));
        }
        if self.subbands == 0 || (self.band.is_wide() && self.subbands != 1) {
            return Err(SimError::field(
                "subbands",
                "narrow bands need >= 1, 52 PRBs exactly 1",
            ));
        }
        let guard = self.band.width() - self.band.active();
        let n_tb = self.n_tb();
        if self.subbands > 1 && 2 * n_tb > guard {
            return Err(SimError::field(
                "n_tb",
                format!("{n_tb} transition bins per edge overlap the neighbour's in a {guard}-subcarrier guard"),
            ));
        }
        if self.subbands * self.band.width() + 2 * n_tb > n {
            return Err(SimError::field(
                "subbands",
                "allocation does not fit in the FFT grid",
            ));
        }
        if self.snr_db.is_empty() || self.snr_db.iter().any(|s| !s.is_finite()) {
            return Err(SimError::field(
                "snr_db",
                "needs at least one finite SNR value",
            ));
        }
        if self.symbols == 0 {
            return Err(SimError::field("symbols", "must be at least 1"));
        }
        if self.drops == 0 {
            return Err(SimError::field("drops", "must be at least 1"));
        }
        if let ChannelSpec::Tdl { rms_ds_ns, .. } = self.channel {
            if rms_ds_ns.is_nan() || rms_ds_ns <= 0.0 {
                return Err(SimError::field("channel.rms_ds_ns", "must be positive"));
            }
        }
        if let SyncSpec::Asynchronous { offset } = self.sync {
            if offset >= n {
                return Err(SimError::field(
                    "sync.offset",
                    "must be shorter than one symbol",
                ));
            }
        }
        if self.rx_path == RxPathSpec::Simplified && !crate::chain::rx_is_discontinuous(self) {
            return Err(SimError::field(
                "rx_path",
                "the fused receiver needs a symbol-synchronized RX",
            ));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn from_json(text: &str, origin: &Path) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text).map_err(|source| SimError::Parse {
            path: origin.to_path_buf(),
            source,
        })?;
        s.validate()?;
        Ok(s)
    }
}

/// Reads and validates a scenario; a relative TDL profile path is resolved
/// against the scenario file's directory.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| SimError::io(path, e))?;
    let mut s = Scenario::from_json(&text, path)?;
    if let ChannelSpec::Tdl {
        profile: Some(p), ..
    } = &mut s.channel
    {
        if p.is_relative() {
            *p = path.parent().unwrap_or(Path::new(".")).join(&*p);
        }
    }
    Ok(s)
}
