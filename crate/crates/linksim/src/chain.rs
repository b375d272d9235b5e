//! TX and RX processing chains of the filtering configurations.

use fcwave_core::channel::ChannelResponse;
use fcwave_core::fc::{rx_continuous, tx_continuous};
use fcwave_core::metrics::{
    beta_direct, beta_simplified, complexity, mu, ProcessingMode, SubbandCost,
};
use fcwave_core::numerology::cp_schedule;
use fcwave_core::ofdm::{demodulate_stream, Allocation, CpOfdmSignal, DcMode, QamGrid};
use fcwave_core::qam::Modulation;
use fcwave_core::sync::{burst_start, low_rate_cp, rx_discontinuous, tx_discontinuous, RxPath};
use fcwave_core::{BlockScheme, CpSchedule, Cplx, FcParams, Numerology, SubbandConfig, Waveform};
use num_rational::Rational64;

use crate::error::{Result, SimError};
use crate::scenario::{Band, RxPathSpec, Scenario};

/// Short transform of the continuous narrow-band configurations.
pub const L_CONTINUOUS_NARROW: usize = 128;

/// How one side of the link processes a subband.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Processing {
    /// Plain CP-OFDM at the high rate.
    Plain,
    Continuous {
        l: usize,
    },
    Discontinuous {
        l: usize,
    },
}

impl Processing {
    /// Low-rate transform size, `N` for plain OFDM.
    pub fn l(self, n: usize) -> usize {
        match self {
            Processing::Plain => n,
            Processing::Continuous { l } | Processing::Discontinuous { l } => l,
        }
    }

    pub fn is_filtered(self) -> bool {
        self != Processing::Plain
    }
}

/// Symbol-synchronized short transform: the smallest power of two holding
/// the active subcarriers and both transition bands.
pub fn discontinuous_l(band: Band, n_tb: usize) -> usize {
    (band.active() + 2 * n_tb).next_power_of_two()
}

fn continuous_l(band: Band, n: usize) -> usize {
    if band.is_wide() {
        n
    } else {
        L_CONTINUOUS_NARROW
    }
}

/// TX and RX processing of a scenario's filtering configuration.
pub fn processing(s: &Scenario) -> (Processing, Processing) {
    use Processing::*;
    let n = s.numerology.n_fft;
    let cont = continuous_l(s.band, n);
    let disc = discontinuous_l(s.band, s.n_tb());
    if s.band.is_wide() {
        let c = Continuous { l: cont };
        let d = Discontinuous { l: cont };
        return match s.filtering {
            1 => (c, c),
            2 => (c, d),
            3 => (d, c),
            _ => (d, d),
        };
    }
    let rx = Continuous { l: cont };
    match s.filtering {
        1 => (Plain, Plain),
        2 => (Plain, rx),
        3 => (Continuous { l: cont }, rx),
        4 => (Discontinuous { l: cont }, rx),
        5 => (Discontinuous { l: disc }, rx),
        _ => (Discontinuous { l: disc }, Discontinuous { l: cont }),
    }
}

pub fn rx_is_discontinuous(s: &Scenario) -> bool {
    matches!(processing(s).1, Processing::Discontinuous { .. })
}

/// Everything fixed across the drops of a scenario.
#[derive(Debug, Clone)]
pub struct Link {
    pub num: Numerology,
    pub sched: CpSchedule,
    pub modulation: Modulation,
    pub tx: Processing,
    pub rx: Processing,
    pub rx_path: RxPath,
    pub l_act: usize,
    pub n_tb: usize,
    /// Signed center bin of every subband.
    pub centers: Vec<i64>,
    pub target: usize,
    pub symbols: usize,
    tx_alloc: Allocation,
    rx_alloc: Allocation,
    tx_cfgs: Vec<SubbandConfig>,
    rx_cfg: SubbandConfig,
    rx_params: FcParams,
}

fn subband_config(
    p: Processing,
    n: usize,
    center: i64,
    alloc: &Allocation,
    n_tb: usize,
) -> Result<SubbandConfig> {
    Ok(match p {
        Processing::Plain => {
            SubbandConfig::with_window(n, n, center, vec![1.0; n], alloc.len(), 0)?
        }
        _ => SubbandConfig::for_allocation(p.l(n), n, center, alloc, n_tb)?,
    })
}

impl Link {
    pub fn new(s: &Scenario) -> Result<Self> {
        let num = Numerology::new(s.numerology.scs_khz, s.numerology.n_fft)?;
        let n = num.n_fft;
        let (tx, rx) = processing(s);
        let n_tb = s.n_tb();
        let l_act = s.band.active();
        let target = s.target();
        let width = s.band.width() as i64;
        let centers: Vec<i64> = (0..s.subbands)
            .map(|k| s.center_bin + (k as i64 - target as i64) * width)
            .collect();
        let tx_alloc = Allocation::centered(tx.l(n), l_act, DcMode::Include)?;
        let rx_alloc = Allocation::centered(rx.l(n), l_act, DcMode::Include)?;
        let tx_cfgs = centers
            .iter()
            .map(|&c| subband_config(tx, n, c, &tx_alloc, n_tb))
            .collect::<Result<Vec<_>>>()?;
        let rx_cfg = subband_config(rx, n, centers[target], &rx_alloc, n_tb)?;
        let rx_params = FcParams::derive(n, rx.l(n), 0.5)?;
        let rx_path = match s.rx_path {
            RxPathSpec::Direct => RxPath::Direct,
            RxPathSpec::Simplified => RxPath::Simplified,
        };
        Ok(Self {
            sched: cp_schedule(&num, s.symbols)?,
            num,
            modulation: s.modulation.into(),
            tx,
            rx,
            rx_path,
            l_act,
            n_tb,
            centers,
            target,
            symbols: s.symbols,
            tx_alloc,
            rx_alloc,
            tx_cfgs,
            rx_cfg,
            rx_params,
        })
    }

    pub fn n(&self) -> usize {
        self.num.n_fft
    }

    pub fn fs_hz(&self) -> f64 {
        self.num.fs_hz() as f64
    }

    pub fn tx_alloc(&self) -> &Allocation {
        &self.tx_alloc
    }

    /// High-rate bin of every active subcarrier of subband `m`.
    pub fn high_rate_bins(&self, m: usize) -> Vec<usize> {
        let n = self.n() as i64;
        self.tx_alloc
            .offsets
            .iter()
            .map(|o| (self.centers[m] + o).rem_euclid(n) as usize)
            .collect()
    }

    /// Maps `bits` (one row per symbol) of subband `m` to its QAM grid.
    pub fn grid(&self, bits: &[Vec<u8>]) -> Result<QamGrid> {
        let symbols = bits
            .iter()
            .map(|b| self.modulation.map(b))
            .collect::<fcwave_core::Result<Vec<_>>>()?;
        Ok(QamGrid::new(self.tx_alloc.clone(), symbols)?)
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.l_act * self.modulation.bits_per_symbol()
    }

    /// Filtered (or plain) high-rate waveform of subband `m`.
    pub fn transmit(&self, m: usize, grid: &QamGrid) -> Result<Waveform> {
        self.transmit_with(m, grid, &self.sched)
    }

    fn transmit_with(&self, m: usize, grid: &QamGrid, sched: &CpSchedule) -> Result<Waveform> {
        let n = self.n();
        let l = self.tx.l(n);
        let interp = n / l;
        let cfg = std::slice::from_ref(&self.tx_cfgs[m]);
        let out = match self.tx {
            Processing::Plain | Processing::Continuous { .. } => {
                let sig = CpOfdmSignal::modulate(grid, &sched.exact_low_rate(interp)?)?;
                tx_continuous(&[sig], cfg, &self.num, 0.5, BlockScheme::Ola)?
            }
            Processing::Discontinuous { .. } => {
                let sig = CpOfdmSignal::modulate(grid, &low_rate_cp(sched, interp))?;
                tx_discontinuous(&[sig], cfg, sched, &self.num, BlockScheme::Ola)?
            }
        };
        Ok(out.waveform)
    }

    /// Like [`Link::transmit`] for a grid of any length, with its own CP
    /// schedule; used for spectra.
    pub fn transmit_burst(&self, m: usize, grid: &QamGrid) -> Result<Waveform> {
        let sched = cp_schedule(&self.num, grid.n_symbols())?;
        self.transmit_with(m, grid, &sched)
    }

    /// Demodulates the target subband from `samples`, whose first CP sample
    /// of symbol 0 is at `origin`. Returns the active subcarriers of every
    /// symbol in allocation order.
    pub fn receive(&self, samples: &[Cplx], origin: usize) -> Result<Vec<Vec<Cplx>>> {
        let n = self.n();
        let p = &self.rx_params;
        let l = self.rx.l(n);
        let per_symbol = match self.rx {
            Processing::Plain | Processing::Continuous { .. } => {
                if !origin.is_multiple_of(p.interp) {
                    return Err(SimError::Invalid(format!(
                        "origin {origin} is not on the low-rate grid of I = {}",
                        p.interp
                    )));
                }
                let low = rx_continuous(samples, &self.rx_cfg, p, BlockScheme::Ols)?;
                let cps = self.sched.exact_low_rate(p.interp)?;
                demodulate_stream(&low, origin / p.interp, &cps, l)?
            }
            Processing::Discontinuous { .. } => {
                let base = burst_start(origin, p, &self.sched)?;
                rx_discontinuous(
                    &samples[base..],
                    &self.rx_cfg,
                    p,
                    &self.sched,
                    self.symbols,
                    BlockScheme::Ols,
                    self.rx_path,
                )?
            }
        };
        let bins = self.rx_alloc.bins();
        Ok(per_symbol
            .iter()
            .map(|s| bins.iter().map(|&b| s[b]).collect())
            .collect())
    }

    /// Channel response seen by the target subband's active subcarriers.
    pub fn target_response(&self, h: &ChannelResponse) -> Vec<Cplx> {
        let n = self.n();
        self.high_rate_bins(self.target)
            .into_iter()
            .map(|k| h.at_bin(k, n))
            .collect()
    }

    /// Real multiplications per QAM symbol of one side, over all subbands.
    pub fn mults_per_qam(&self, p: Processing, rx: bool) -> Result<f64> {
        let n = self.n();
        let m = self.centers.len();
        let cost = SubbandCost {
            l: p.l(n),
            l_ofdm: p.l(n),
            l_act: self.l_act,
            n_tb: self.n_tb,
        };
        let subbands = vec![cost; m];
        let ratio = match p {
            Processing::Plain => Rational64::new(mu(n)?, (m * self.l_act) as i64),
            Processing::Continuous { .. } => {
                let mode = ProcessingMode::Continuous { overlap: 0.5 };
                complexity(&subbands, &self.num, mode, beta_direct(), self.symbols)?.c_per_qam
            }
            Processing::Discontinuous { .. } => {
                let beta = if rx && self.rx_path == RxPath::Simplified {
                    beta_simplified()
                } else {
                    beta_direct()
                };
                complexity(
                    &subbands,
                    &self.num,
                    ProcessingMode::Discontinuous,
                    beta,
                    self.symbols,
                )?
                .c_per_qam
            }
        };
        Ok(*ratio.numer() as f64 / *ratio.denom() as f64)
    }

    /// Common origin for all received waveforms: a multiple of `N`, so every
    /// receiver's low-rate grid and burst buffer fit in front of it.
    pub fn common_origin(&self, waveforms: &[Waveform]) -> usize {
        let n = self.n();
        let max = waveforms.iter().map(|w| w.origin).max().unwrap_or(0);
        (max / n + 1) * n
    }

    /// Center frequency of subband `m` in Hz, relative to the carrier.
    pub fn center_hz(&self, m: usize) -> f64 {
        let n = self.n() as i64;
        let c = self.tx_cfgs[m].center as i64;
        let signed = if c < n / 2 { c } else { c - n };
        signed as f64 * f64::from(self.num.scs_khz) * 1e3
    }
}

/// Unit-energy rescaling of a fading realization (perfect power control).
pub fn normalize_power(h: &mut ChannelResponse) {
    let e: f64 = h.gains.iter().map(|g| g.norm_sqr()).sum();
    if e > 0.0 {
        let s = 1.0 / e.sqrt();
        for g in &mut h.gains {
            *g *= s;
        }
    }
}
