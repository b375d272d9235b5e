//! BER, EVM, Welch PSD and the real-multiplication complexity model.

use num_rational::Rational64;

use crate::fc::ContinuousLayout;
use crate::numerology::cp_schedule;
use crate::{dft, Cplx, Error, FcParams, Numerology, Result};

/// Real multiplications of a split-radix FFT of size `l`:
/// `l log2(l) - 3 l + 4`.
pub fn mu(l: usize) -> Result<i64> {
    if l < 2 || !l.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "transform size {l} is not a power of two >= 2"
        )));
    }
    let l = l as i64;
    Ok(l * l.trailing_zeros() as i64 - 3 * l + 4)
}

/// Per-subband inputs of the complexity model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubbandCost {
    /// Short FC transform size.
    pub l: usize,
    /// OFDM transform size at the subband's low rate.
    pub l_ofdm: usize,
    /// Active subcarriers (QAM symbols per OFDM symbol).
    pub l_act: usize,
    /// Transition-band bins on each side of the window.
    pub n_tb: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProcessingMode {
    /// Continuous FC with overlap factor `overlap`; the FC blocks per
    /// symbol follow from segmenting the whole slot.
    Continuous { overlap: f64 },
    /// Symbol-synchronized FC, two blocks per symbol.
    Discontinuous,
}

/// `beta` for the direct receiver (two inverse short transforms per symbol).
pub fn beta_direct() -> Rational64 {
    Rational64::from_integer(1)
}

/// `beta` for the fused receiver (one inverse short transform per symbol).
pub fn beta_simplified() -> Rational64 {
    Rational64::new(1, 2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexityReport {
    pub n: usize,
    pub subbands: Vec<SubbandCost>,
    pub mode: ProcessingMode,
    pub slot_len: usize,
    /// FC blocks per OFDM symbol.
    pub alpha: Rational64,
    pub beta: Rational64,
    pub c_high: Rational64,
    pub c_low: Vec<Rational64>,
    /// `(c_high + sum c_low) / sum l_act`.
    pub c_per_qam: Rational64,
}

/// Multiplications per QAM symbol of an FC filtered transmitter or
/// receiver: `C_high = alpha mu(N)`,
/// `C_low,m = alpha beta mu(L_m) + 6 alpha N_tb,m + mu(L_OFDM,m)`.
pub fn complexity(
    subbands: &[SubbandCost],
    num: &Numerology,
    mode: ProcessingMode,
    beta: Rational64,
    slot_len: usize,
) -> Result<ComplexityReport> {
    if subbands.is_empty() || slot_len == 0 {
        return Err(Error::InvalidArgument(
            "complexity needs at least one subband and one symbol".into(),
        ));
    }
    let n = num.n_fft;
    let alpha = match mode {
        ProcessingMode::Discontinuous => Rational64::from_integer(2),
        ProcessingMode::Continuous { overlap } => {
            let sched = cp_schedule(num, slot_len)?;
            let mut alpha = None;
            for s in subbands {
                let p = FcParams::derive(n, s.l, overlap)?;
                let cps = sched.exact_low_rate(p.interp)?;
                let len = slot_len * s.l_ofdm + cps.iter().sum::<usize>();
                let blocks = ContinuousLayout::new(len, &p).blocks;
                let a = Rational64::new(blocks as i64, slot_len as i64);
                match alpha {
                    None => alpha = Some(a),
                    Some(prev) if prev != a => {
                        return Err(Error::InvalidArgument(
                            "continuous subbands need a common block grid".into(),
                        ))
                    }
                    _ => {}
                }
            }
            alpha.unwrap_or_default()
        }
    };
    let c_high = alpha * mu(n)?;
    let c_low = subbands
        .iter()
        .map(|s| {
            Ok(alpha * beta * mu(s.l)?
                + alpha * 6 * s.n_tb as i64
                + Rational64::from_integer(mu(s.l_ofdm)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let active: i64 = subbands.iter().map(|s| s.l_act as i64).sum();
    if active == 0 {
        return Err(Error::InvalidArgument("no active subcarriers".into()));
    }
    let total = c_low.iter().fold(c_high, |acc, c| acc + c);
    Ok(ComplexityReport {
        n,
        subbands: subbands.to_vec(),
        mode,
        slot_len,
        alpha,
        beta,
        c_high,
        c_low,
        c_per_qam: total / active,
    })
}

pub fn bit_errors(tx: &[u8], rx: &[u8]) -> Result<usize> {
    if tx.len() != rx.len() {
        return Err(Error::length("received bits", tx.len(), rx.len()));
    }
    Ok(tx.iter().zip(rx).filter(|(a, b)| a != b).count())
}

pub fn ber(tx: &[u8], rx: &[u8]) -> Result<f64> {
    if tx.is_empty() {
        return Err(Error::InvalidArgument("no bits".into()));
    }
    Ok(bit_errors(tx, rx)? as f64 / tx.len() as f64)
}

/// Value reported by [`evm_db`] when the error is exactly zero.
pub const EVM_CEILING_DB: f64 = 200.0;

/// EVM as positive dB of suppression, `-10 log10(sum |rx - ref|^2 / sum |ref|^2)`,
/// capped at [`EVM_CEILING_DB`].
pub fn evm_db(reference: &[Cplx], rx: &[Cplx]) -> Result<f64> {
    if reference.len() != rx.len() {
        return Err(Error::length("received grid", reference.len(), rx.len()));
    }
    let p_ref: f64 = reference.iter().map(|v| v.norm_sqr()).sum();
    if p_ref == 0.0 {
        return Err(Error::InvalidArgument("reference has zero power".into()));
    }
    let p_err: f64 = reference
        .iter()
        .zip(rx)
        .map(|(a, b)| (b - a).norm_sqr())
        .sum();
    if p_err == 0.0 {
        return Ok(EVM_CEILING_DB);
    }
    Ok((-10.0 * (p_err / p_ref).log10()).min(EVM_CEILING_DB))
}

/// Two-sided power spectral density with frequencies ascending from `-fs/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Psd {
    pub freq_hz: Vec<f64>,
    /// Power per Hz.
    pub density: Vec<f64>,
    pub segments: usize,
}

impl Psd {
    fn band_indices(&self, lo_hz: f64, hi_hz: f64) -> impl Iterator<Item = usize> + '_ {
        self.freq_hz
            .iter()
            .enumerate()
            .filter(move |(_, &f)| f >= lo_hz && f <= hi_hz)
            .map(|(i, _)| i)
    }

    /// Mean density over `[lo_hz, hi_hz]`, in dB.
    pub fn mean_db(&self, lo_hz: f64, hi_hz: f64) -> Result<f64> {
        let (sum, cnt) = self
            .band_indices(lo_hz, hi_hz)
            .fold((0.0, 0usize), |(s, c), i| (s + self.density[i], c + 1));
        if cnt == 0 {
            return Err(Error::InvalidArgument(format!(
                "no PSD bins in [{lo_hz}, {hi_hz}] Hz"
            )));
        }
        Ok(10.0 * (sum / cnt as f64).log10())
    }

    /// Peak density over `[lo_hz, hi_hz]`, in dB.
    pub fn max_db(&self, lo_hz: f64, hi_hz: f64) -> Result<f64> {
        self.band_indices(lo_hz, hi_hz)
            .map(|i| self.density[i])
            .reduce(f64::max)
            .map(|v| 10.0 * v.log10())
            .ok_or_else(|| Error::InvalidArgument(format!("no PSD bins in [{lo_hz}, {hi_hz}] Hz")))
    }

    /// Density in dB relative to the mean over the reference band.
    pub fn normalized_db(&self, lo_hz: f64, hi_hz: f64) -> Result<Vec<f64>> {
        let r = self.mean_db(lo_hz, hi_hz)?;
        Ok(self.density.iter().map(|v| 10.0 * v.log10() - r).collect())
    }
}

/// Welch estimate with Hann segments of `seg_len` samples overlapping by
/// the fraction `overlap`.
pub fn psd(samples: &[Cplx], fs_hz: f64, seg_len: usize, overlap: f64) -> Result<Psd> {
    if seg_len < 2 || samples.len() < seg_len {
        return Err(Error::length("PSD input", seg_len, samples.len()));
    }
    if !(0.0..1.0).contains(&overlap) {
        return Err(Error::InvalidArgument(format!(
            "overlap {overlap} outside [0, 1)"
        )));
    }
    let hop = (((1.0 - overlap) * seg_len as f64).round() as usize).max(1);
    let win: Vec<f64> = (0..seg_len)
        .map(|i| {
            let s = (std::f64::consts::PI * i as f64 / seg_len as f64).sin();
            s * s
        })
        .collect();
    let u: f64 = win.iter().map(|w| w * w).sum();
    let mut acc = vec![0.0; seg_len];
    let mut segments = 0;
    let mut start = 0;
    while start + seg_len <= samples.len() {
        let mut buf: Vec<Cplx> = samples[start..start + seg_len]
            .iter()
            .zip(&win)
            .map(|(x, w)| x * w)
            .collect();
        dft::forward(&mut buf);
        for (a, v) in acc.iter_mut().zip(&buf) {
            *a += v.norm_sqr();
        }
        segments += 1;
        start += hop;
    }
    let scale = 1.0 / (fs_hz * u * segments as f64);
    let half = seg_len / 2;
    let density = (0..seg_len)
        .map(|i| acc[(i + half) % seg_len] * scale)
        .collect();
    let freq_hz = (0..seg_len)
        .map(|i| (i as f64 - half as f64) * fs_hz / seg_len as f64)
        .collect();
    Ok(Psd {
        freq_hz,
        density,
        segments,
    })
}
