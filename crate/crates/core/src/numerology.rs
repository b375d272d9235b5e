//! Numerology, the NR normal-CP schedule and FC block geometry.

use crate::{Error, Result};

/// Sampling grid of the high-rate (output) side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Numerology {
    pub scs_khz: u32,
    /// High-rate transform size `N`.
    pub n_fft: usize,
    pub symbols_per_half_subframe: usize,
}

impl Numerology {
    /// `scs_khz` must be 15 kHz scaled by a power of two (15, 30, 60, ...).
    pub fn new(scs_khz: u32, n_fft: usize) -> Result<Self> {
        if !n_fft.is_power_of_two() || n_fft < 16 {
            return Err(Error::Numerology(format!(
                "n_fft must be a power of two >= 16, got {n_fft}"
            )));
        }
        let mu = scs_exponent(scs_khz)?;
        Ok(Self {
            scs_khz,
            n_fft,
            symbols_per_half_subframe: 7 << mu,
        })
    }

    /// 15 kHz subcarrier spacing with `N = n_fft`.
    pub fn nr_15khz(n_fft: usize) -> Result<Self> {
        Self::new(15, n_fft)
    }

    /// Output sampling rate in Hz, `scs * N`.
    pub fn fs_hz(&self) -> u64 {
        u64::from(self.scs_khz) * 1000 * self.n_fft as u64
    }

    fn mu(&self) -> u32 {
        (self.scs_khz / 15).trailing_zeros()
    }
}

fn scs_exponent(scs_khz: u32) -> Result<u32> {
    if scs_khz == 0 || !scs_khz.is_multiple_of(15) || !(scs_khz / 15).is_power_of_two() {
        return Err(Error::Numerology(format!(
            "subcarrier spacing {scs_khz} kHz is not 15 kHz times a power of two"
        )));
    }
    Ok((scs_khz / 15).trailing_zeros())
}

/// High-rate CP length of every OFDM symbol of a burst.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CpSchedule {
    pub per_symbol_high_rate: Vec<usize>,
}

impl CpSchedule {
    pub fn new(per_symbol_high_rate: Vec<usize>) -> Self {
        Self {
            per_symbol_high_rate,
        }
    }

    pub fn len(&self) -> usize {
        self.per_symbol_high_rate.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_symbol_high_rate.is_empty()
    }

    pub fn get(&self, n: usize) -> usize {
        self.per_symbol_high_rate[n]
    }

    /// `sum_{q=1}^{n} N_CP,q`: the CP samples between the start of the
    /// burst's first symbol core and symbol `n`, excluding symbol 0's own CP.
    pub fn sum_after_first(&self, n: usize) -> usize {
        self.per_symbol_high_rate[1..=n].iter().sum()
    }

    /// Low-rate CP lengths for interpolation factor `interp`, failing when
    /// any CP is not an integer number of low-rate samples.
    pub fn exact_low_rate(&self, interp: usize) -> Result<Vec<usize>> {
        self.per_symbol_high_rate
            .iter()
            .map(|&n_cp| {
                if n_cp % interp == 0 {
                    Ok(n_cp / interp)
                } else {
                    Err(Error::Geometry(format!(
                        "CP of {n_cp} high-rate samples is not a multiple of I = {interp}"
                    )))
                }
            })
            .collect()
    }
}

/// NR normal-CP lengths: the first symbol of every half subframe carries
/// the longer CP.
pub fn cp_schedule(num: &Numerology, n_symbols: usize) -> Result<CpSchedule> {
    if n_symbols == 0 {
        return Err(Error::InvalidArgument("n_symbols must be >= 1".into()));
    }
    let n = num.n_fft;
    let long_units = 72 + (8usize << num.mu());
    if !(long_units * n).is_multiple_of(1024) || !(72 * n).is_multiple_of(1024) {
        return Err(Error::Numerology(format!(
            "N = {n} gives a non-integer CP length"
        )));
    }
    let long = long_units * n / 1024;
    let short = 72 * n / 1024;
    let per_half = num.symbols_per_half_subframe;
    Ok(CpSchedule::new(
        (0..n_symbols)
            .map(|i| if i % per_half == 0 { long } else { short })
            .collect(),
    ))
}

/// FC block geometry for one subband.
///
/// Low-rate block length `l` with `l_o` overlapping samples split into a
/// leading (`l_l`) and a tailing (`l_t`) part; high-rate counterparts use
/// the same ceil/floor split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FcParams {
    pub l: usize,
    pub n: usize,
    pub overlap: f64,
    pub l_o: usize,
    pub l_s: usize,
    pub l_l: usize,
    pub l_t: usize,
    pub n_o: usize,
    pub n_s: usize,
    pub n_l: usize,
    pub n_t: usize,
    /// Interpolation factor `N / L`.
    pub interp: usize,
}

fn exact_count(x: f64, what: &str) -> Result<usize> {
    let r = x.round();
    if (x - r).abs() > 1e-9 || r < 0.0 {
        return Err(Error::Geometry(format!("{what} = {x} is not an integer")));
    }
    Ok(r as usize)
}

impl FcParams {
    pub fn derive(n: usize, l: usize, overlap: f64) -> Result<Self> {
        if l == 0 || n == 0 {
            return Err(Error::Geometry("transform sizes must be positive".into()));
        }
        if !n.is_multiple_of(l) {
            return Err(Error::Geometry(format!("L = {l} does not divide N = {n}")));
        }
        if !(overlap > 0.0 && overlap < 1.0) {
            return Err(Error::Geometry(format!(
                "overlap factor {overlap} outside (0, 1)"
            )));
        }
        let l_o = exact_count(overlap * l as f64, "lambda * L")?;
        let n_o = exact_count(overlap * n as f64, "lambda * N")?;
        if l_o == 0 || l_o >= l {
            return Err(Error::Geometry(format!(
                "overlap of {l_o} samples leaves no usable block of L = {l}"
            )));
        }
        Ok(Self {
            l,
            n,
            overlap,
            l_o,
            l_s: l - l_o,
            l_l: l_o.div_ceil(2),
            l_t: l_o / 2,
            n_o,
            n_s: n - n_o,
            n_l: n_o.div_ceil(2),
            n_t: n_o / 2,
            interp: n / l,
        })
    }

    /// Overlap factor of a discontinuous first block whose leading overlap
    /// absorbs an `l_cp`-sample CP.
    pub fn first_block_overlap(&self, l_cp: usize) -> Result<f64> {
        if l_cp > self.l_l {
            return Err(Error::Geometry(format!(
                "CP of {l_cp} samples does not fit in the {}-sample leading overlap",
                self.l_l
            )));
        }
        Ok(0.5 - l_cp as f64 / self.l as f64)
    }
}

/// Free-function form of [`FcParams::derive`].
pub fn derive_fc_params(n: usize, l: usize, overlap: f64) -> Result<FcParams> {
    FcParams::derive(n, l, overlap)
}

/// Free-function form of [`FcParams::first_block_overlap`].
pub fn first_block_overlap(params: &FcParams, l_cp: usize) -> Result<f64> {
    params.first_block_overlap(l_cp)
}
