//! Continuous fast-convolution synthesis and analysis filter banks.
//!
//! A synthesis block takes `L` low-rate samples of subband `m` to `N`
//! high-rate samples:
//!
//! ```text
//! y = sqrt(I) W_N^-1 M(phi) D P W_L x
//! ```
//!
//! where `P` is the FFT shift, `D` the frequency-domain window and `M` the
//! bin mapping onto the long transform. OLA processing applies the
//! time-domain analysis window `A` to the input block, OLS applies the
//! synthesis window `S` to the output block. Analysis blocks are the
//! conjugate transposes, scaled so a TX/RX chain has unit passband gain.
//!
//! The FFT shift is never materialized: shifted index `p` of the window
//! corresponds to DFT bin `(p + L/2) mod L` and lands on long-transform bin
//! `(c - L/2 + p) mod N`.

use std::ops::Range;

use crate::numerology::FcParams;
use crate::ofdm::{Allocation, CpOfdmSignal};
use crate::{dft, Cplx, Error, Numerology, Result};

const ZERO: Cplx = Cplx { re: 0.0, im: 0.0 };

/// Raised-cosine transition weights, from the passband edge outward.
fn transition_weights(n_tb: usize) -> impl Iterator<Item = f64> {
    (0..n_tb).map(move |k| {
        let x = std::f64::consts::PI * (k + 1) as f64 / (2.0 * (n_tb + 1) as f64);
        x.cos().powi(2)
    })
}

fn window_at(l: usize, start: usize, width: usize, n_tb: usize) -> Result<Vec<f64>> {
    if start < n_tb || start + width + n_tb > l {
        return Err(Error::Geometry(format!(
            "passband of {width} bins at {start} with {n_tb} transition bins per edge \
             does not fit in L = {l}"
        )));
    }
    let mut w = vec![0.0; l];
    w[start..start + width].iter_mut().for_each(|v| *v = 1.0);
    for (k, t) in transition_weights(n_tb).enumerate() {
        w[start - 1 - k] = t;
        w[start + width + k] = t;
    }
    Ok(w)
}

/// Frequency-domain window over the FFT-shifted bins of an `l`-point block:
/// `l_act` ones centered on bin `l/2` (starting at `l/2 - floor(l_act/2)`),
/// then `n_tb` raised-cosine bins `cos^2(pi (k+1) / (2 (n_tb+1)))` on each
/// edge, zeros elsewhere.
pub fn design_window(l: usize, l_act: usize, n_tb: usize) -> Result<Vec<f64>> {
    if l_act + 2 * n_tb > l {
        return Err(Error::Geometry(format!(
            "{l_act} passband + 2 x {n_tb} transition bins exceed L = {l}"
        )));
    }
    window_at(l, l / 2 - l_act / 2, l_act, n_tb)
}

/// Everything the filter bank needs to know about one subband.
#[derive(Debug, Clone, PartialEq)]
pub struct SubbandConfig {
    /// Short transform size `L`.
    pub l: usize,
    pub l_ofdm: usize,
    /// Center bin `c` in the `N`-bin grid, `0 <= c < N`.
    pub center: usize,
    pub l_act: usize,
    pub n_tb: usize,
    /// Weight of every FFT-shifted bin, length `l`.
    pub window: Vec<f64>,
}

impl SubbandConfig {
    /// Window designed around `alloc` (whose `l_ofdm` must equal `l`), with
    /// the subband DC placed at signed bin `center` of an `n`-bin grid.
    pub fn for_allocation(
        l: usize,
        n: usize,
        center: i64,
        alloc: &Allocation,
        n_tb: usize,
    ) -> Result<Self> {
        if alloc.l_ofdm != l {
            return Err(Error::Geometry(format!(
                "allocation is for L_OFDM = {}, filter bank uses L = {l}",
                alloc.l_ofdm
            )));
        }
        let first = *alloc
            .offsets
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty allocation".into()))?;
        let start = l as i64 / 2 + first;
        if start < 0 {
            return Err(Error::Geometry("allocation starts below bin 0".into()));
        }
        let window = window_at(l, start as usize, alloc.span(), n_tb)?;
        Self::with_window(l, n, center, window, alloc.len(), n_tb)
    }

    /// Explicit window (e.g. all ones) over the shifted bins.
    pub fn with_window(
        l: usize,
        n: usize,
        center: i64,
        window: Vec<f64>,
        l_act: usize,
        n_tb: usize,
    ) -> Result<Self> {
        if window.len() != l {
            return Err(Error::length("frequency window", l, window.len()));
        }
        if !l.is_multiple_of(2) || l > n {
            return Err(Error::Geometry(format!(
                "L = {l} must be even and not exceed N = {n}"
            )));
        }
        if window.iter().any(|w| !(0.0..=1.0).contains(w)) {
            return Err(Error::InvalidArgument(
                "window weights outside [0, 1]".into(),
            ));
        }
        Ok(Self {
            l,
            l_ofdm: l,
            center: center.rem_euclid(n as i64) as usize,
            l_act,
            n_tb,
            window,
        })
    }

    /// Long-transform bin receiving shifted bin `p`.
    pub fn target_bin(&self, p: usize, n: usize) -> usize {
        (self.center as i64 - (self.l / 2) as i64 + p as i64).rem_euclid(n as i64) as usize
    }

    /// Long-transform bin of a subcarrier at signed `offset` from the
    /// subband DC.
    pub fn bin_of_offset(&self, offset: i64, n: usize) -> usize {
        (self.center as i64 + offset).rem_euclid(n as i64) as usize
    }
}

/// Accumulates `phase * spec[p]` into bin `Xi(p) = (c - L/2 + p) mod N` of
/// `out`, for FFT-shifted input `spec` of length `L`.
pub fn map_bins_into(spec: &[Cplx], center: usize, out: &mut [Cplx], phase: Cplx) {
    let n = out.len() as i64;
    let base = center as i64 - (spec.len() / 2) as i64;
    for (p, &v) in spec.iter().enumerate() {
        let q = (base + p as i64).rem_euclid(n) as usize;
        out[q] += phase * v;
    }
}

/// Returns a fresh length-`n` vector with `spec` mapped onto it.
pub fn map_bins(spec: &[Cplx], cfg: &SubbandConfig, n: usize, phase: Cplx) -> Result<Vec<Cplx>> {
    if spec.len() != cfg.l {
        return Err(Error::length("mapped spectrum", cfg.l, spec.len()));
    }
    let mut out = vec![ZERO; n];
    map_bins_into(spec, cfg.center, &mut out, phase);
    Ok(out)
}

/// Phase rotator of a block starting `offset` high-rate samples from the
/// waveform origin: `exp(j 2 pi c offset / N)`.
pub fn phase_at(center: usize, offset: i64, n: usize) -> Cplx {
    dft::unit_phasor(center as i128 * offset as i128, n as u64)
}

/// `exp(j 2 pi r c L_S / L)`, keeping consecutive continuous blocks phase
/// coherent.
pub fn block_phase(r: usize, center: usize, l_s: usize, l: usize) -> Cplx {
    dft::unit_phasor(r as i128 * center as i128 * l_s as i128, l as u64)
}

/// OLA or OLS block concatenation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BlockScheme {
    #[default]
    Ola,
    Ols,
}

fn check_params(cfg: &SubbandConfig, params: &FcParams) -> Result<()> {
    if cfg.l != params.l {
        return Err(Error::Geometry(format!(
            "subband uses L = {}, parameters are for L = {}",
            cfg.l, params.l
        )));
    }
    Ok(())
}

/// Adds this subband's windowed, shifted and mapped spectrum of `x`
/// (length `L`) into the long-transform input `acc`, already scaled by
/// `sqrt(I) / N` so a plain inverse DFT of `acc` finishes the block.
pub(crate) fn accumulate_synthesis(x: &[Cplx], cfg: &SubbandConfig, acc: &mut [Cplx], phase: Cplx) {
    let l = cfg.l;
    let n = acc.len();
    let mut spec = x.to_vec();
    dft::forward(&mut spec);
    let scale = ((n / l) as f64).sqrt() / n as f64;
    let half = l / 2;
    let shifted: Vec<Cplx> = (0..l)
        .map(|p| spec[(p + half) % l] * cfg.window[p] * scale)
        .collect();
    map_bins_into(&shifted, cfg.center, acc, phase);
}

/// `sqrt(I) W_N^-1 M(phase) D P W_L x`, no time-domain windowing.
pub fn synthesize_block(
    x: &[Cplx],
    cfg: &SubbandConfig,
    n: usize,
    phase: Cplx,
) -> Result<Vec<Cplx>> {
    if x.len() != cfg.l {
        return Err(Error::length("synthesis input block", cfg.l, x.len()));
    }
    let mut acc = vec![ZERO; n];
    accumulate_synthesis(x, cfg, &mut acc, phase);
    dft::inverse(&mut acc);
    Ok(acc)
}

/// Zeroes everything outside `keep`.
pub fn apply_window(buf: &mut [Cplx], keep: Range<usize>) {
    for (i, v) in buf.iter_mut().enumerate() {
        if !keep.contains(&i) {
            *v = ZERO;
        }
    }
}

/// OLA synthesis block: analysis window `A` (zero `L_L` leading and `L_T`
/// tailing input samples), then [`synthesize_block`].
pub fn sfb_block_ola(
    x: &[Cplx],
    cfg: &SubbandConfig,
    params: &FcParams,
    phase: Cplx,
) -> Result<Vec<Cplx>> {
    check_params(cfg, params)?;
    if x.len() != cfg.l {
        return Err(Error::length("synthesis input block", cfg.l, x.len()));
    }
    let mut xa = x.to_vec();
    apply_window(&mut xa, params.l_l..params.l_l + params.l_s);
    synthesize_block(&xa, cfg, params.n, phase)
}

/// OLS synthesis block: [`synthesize_block`], then synthesis window `S`
/// (zero `N_L` leading and `N_T` tailing output samples).
pub fn sfb_block_ols(
    x: &[Cplx],
    cfg: &SubbandConfig,
    params: &FcParams,
    phase: Cplx,
) -> Result<Vec<Cplx>> {
    check_params(cfg, params)?;
    let mut y = synthesize_block(x, cfg, params.n, phase)?;
    apply_window(&mut y, params.n_l..params.n_l + params.n_s);
    Ok(y)
}

/// Frequency-domain analysis of a long-transform spectrum `ylong`
/// (`W_N y`): `(1 / sqrt(I)) P^-1 D M(phase)^H ylong`, in natural DFT bin
/// order of the short transform.
pub(crate) fn analysis_from_long_spectrum(
    ylong: &[Cplx],
    cfg: &SubbandConfig,
    phase: Cplx,
) -> Vec<Cplx> {
    let l = cfg.l;
    let n = ylong.len();
    let half = l / 2;
    let scale = 1.0 / ((n / l) as f64).sqrt();
    let ph = phase.conj() * scale;
    let mut g = vec![ZERO; l];
    for p in 0..l {
        let w = cfg.window[p];
        if w != 0.0 {
            g[(p + half) % l] = ylong[cfg.target_bin(p, n)] * (ph * w);
        }
    }
    g
}

/// Frequency-domain output `g` of the analysis front end for a length-`N`
/// block: FFT, bin selection, weighting and de-shift.
pub fn analysis_spectrum(
    y: &[Cplx],
    cfg: &SubbandConfig,
    n: usize,
    phase: Cplx,
) -> Result<Vec<Cplx>> {
    if y.len() != n {
        return Err(Error::length("analysis input block", n, y.len()));
    }
    let mut ylong = y.to_vec();
    dft::forward(&mut ylong);
    Ok(analysis_from_long_spectrum(&ylong, cfg, phase))
}

/// `sqrt(I) conj(W_N^-1 M D P W_L)^T y`, no time-domain windowing.
pub fn analyze_block(y: &[Cplx], cfg: &SubbandConfig, n: usize, phase: Cplx) -> Result<Vec<Cplx>> {
    let mut g = analysis_spectrum(y, cfg, n, phase)?;
    dft::inverse(&mut g);
    let inv_l = 1.0 / cfg.l as f64;
    g.iter_mut().for_each(|v| *v *= inv_l);
    Ok(g)
}

/// OLA analysis block: window `A` on the `N` input samples (zero `N_L`
/// leading, `N_T` tailing), then [`analyze_block`]. Equals
/// `sqrt(I) conj(F_OLS)^T y`.
pub fn afb_block_ola(
    y: &[Cplx],
    cfg: &SubbandConfig,
    params: &FcParams,
    phase: Cplx,
) -> Result<Vec<Cplx>> {
    check_params(cfg, params)?;
    if y.len() != params.n {
        return Err(Error::length("analysis input block", params.n, y.len()));
    }
    let mut ya = y.to_vec();
    apply_window(&mut ya, params.n_l..params.n_l + params.n_s);
    analyze_block(&ya, cfg, params.n, phase)
}

/// OLS analysis block: [`analyze_block`], then window `S` on the `L`
/// outputs (zero `L_L` leading, `L_T` tailing). Equals
/// `sqrt(I) conj(F_OLA)^T y`.
pub fn afb_block_ols(
    y: &[Cplx],
    cfg: &SubbandConfig,
    params: &FcParams,
    phase: Cplx,
) -> Result<Vec<Cplx>> {
    check_params(cfg, params)?;
    let mut z = analyze_block(y, cfg, params.n, phase)?;
    apply_window(&mut z, params.l_l..params.l_l + params.l_s);
    Ok(z)
}

/// Complex baseband samples at the high rate.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    pub samples: Vec<Cplx>,
    pub fs_hz: f64,
    /// Index of the first CP sample of OFDM symbol 0.
    pub origin: usize,
}

impl Waveform {
    pub fn zeros(len: usize, fs_hz: f64, origin: usize) -> Self {
        Self {
            samples: vec![ZERO; len],
            fs_hz,
            origin,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|v| v.norm_sqr()).sum()
    }

    /// Shifts the content so the origin lands on `new_origin`, padding
    /// (or trimming) at the front and zero-extending to `min_len`.
    pub fn realigned(&self, new_origin: usize, min_len: usize) -> Self {
        let mut samples = Vec::with_capacity(min_len.max(self.len() + new_origin));
        if new_origin >= self.origin {
            samples.resize(new_origin - self.origin, ZERO);
            samples.extend_from_slice(&self.samples);
        } else {
            samples.extend_from_slice(&self.samples[self.origin - new_origin..]);
        }
        if samples.len() < min_len {
            samples.resize(min_len, ZERO);
        }
        Self {
            samples,
            fs_hz: self.fs_hz,
            origin: new_origin,
        }
    }
}

/// A synthesized waveform with the number of FC block periods it took.
#[derive(Debug, Clone, PartialEq)]
pub struct Synthesized {
    pub waveform: Waveform,
    pub fc_blocks: usize,
}

/// Block partitioning of a continuous TX input of `len` low-rate samples
/// padded with `S_L = L - L_S` zeros on both ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ContinuousLayout {
    pub len: usize,
    pub padding: usize,
    pub blocks: usize,
    pub l: usize,
    pub l_s: usize,
    pub l_l: usize,
}

impl ContinuousLayout {
    pub fn new(len: usize, params: &FcParams) -> Self {
        let blocks = if len == 0 {
            0
        } else {
            (len - 1 + params.l_t) / params.l_s + 1
        };
        Self {
            len,
            padding: params.l - params.l_s,
            blocks,
            l: params.l,
            l_s: params.l_s,
            l_l: params.l_l,
        }
    }

    /// Padded-input range covered by block `r`.
    pub fn segment(&self, r: usize) -> Range<usize> {
        r * self.l_s..r * self.l_s + self.l
    }

    /// Padded-input range passed (weight one) by block `r`'s window `A`.
    pub fn passed(&self, r: usize) -> Range<usize> {
        let s = r * self.l_s + self.l_l;
        s..s + self.l_s
    }

    /// Padded index of input sample `i`.
    pub fn padded_index(&self, i: usize) -> usize {
        i + self.padding
    }
}

fn padded_segment(samples: &[Cplx], padding: usize, range: Range<usize>) -> Vec<Cplx> {
    range
        .map(|i| {
            i.checked_sub(padding)
                .and_then(|j| samples.get(j))
                .copied()
                .unwrap_or(ZERO)
        })
        .collect()
}

/// Continuous FC synthesis of one or more subbands sharing the long
/// transform: hop-`L_S` segmentation of the zero-padded CP-OFDM streams,
/// per-block filtering, shared `N`-point IFFT and overlap at hop `N_S`.
pub fn tx_continuous(
    signals: &[CpOfdmSignal],
    cfgs: &[SubbandConfig],
    num: &Numerology,
    overlap: f64,
    scheme: BlockScheme,
) -> Result<Synthesized> {
    if signals.is_empty() || signals.len() != cfgs.len() {
        return Err(Error::length("subband configs", signals.len(), cfgs.len()));
    }
    let n = num.n_fft;
    let params: Vec<FcParams> = cfgs
        .iter()
        .map(|c| FcParams::derive(n, c.l, overlap))
        .collect::<Result<_>>()?;
    let duration = signals[0].samples.len() * params[0].interp;
    for (s, p) in signals.iter().zip(&params) {
        if s.samples.len() * p.interp != duration {
            return Err(Error::length(
                "high-rate duration of subband",
                duration,
                s.samples.len() * p.interp,
            ));
        }
    }
    let layouts: Vec<ContinuousLayout> = signals
        .iter()
        .zip(&params)
        .map(|(s, p)| ContinuousLayout::new(s.samples.len(), p))
        .collect();
    let blocks = layouts.iter().map(|l| l.blocks).max().unwrap_or(0);
    let (n_s, n_l) = (params[0].n_s, params[0].n_l);
    let out_len = if blocks == 0 {
        0
    } else {
        (blocks - 1) * n_s + n
    };
    let mut out = vec![ZERO; out_len];

    for r in 0..blocks {
        let mut acc = vec![ZERO; n];
        for ((sig, cfg), (p, lay)) in signals.iter().zip(cfgs).zip(params.iter().zip(&layouts)) {
            let mut seg = padded_segment(&sig.samples, lay.padding, lay.segment(r));
            if scheme == BlockScheme::Ola {
                apply_window(&mut seg, p.l_l..p.l_l + p.l_s);
            }
            let phase = block_phase(r, cfg.center, p.l_s, p.l);
            accumulate_synthesis(&seg, cfg, &mut acc, phase);
        }
        dft::inverse(&mut acc);
        if scheme == BlockScheme::Ols {
            apply_window(&mut acc, n_l..n_l + n_s);
        }
        for (o, v) in out[r * n_s..r * n_s + n].iter_mut().zip(&acc) {
            *o += v;
        }
    }

    Ok(Synthesized {
        waveform: Waveform {
            samples: out,
            fs_hz: num.fs_hz() as f64,
            origin: params[0].n_o,
        },
        fc_blocks: blocks,
    })
}

/// Continuous FC analysis of one subband. Returns the low-rate sequence
/// `x[k]` aligned to high-rate sample `k I` of `samples`.
pub fn rx_continuous(
    samples: &[Cplx],
    cfg: &SubbandConfig,
    params: &FcParams,
    scheme: BlockScheme,
) -> Result<Vec<Cplx>> {
    check_params(cfg, params)?;
    let (n, l, interp) = (params.n, params.l, params.interp);
    if samples.len() < n {
        return Err(Error::length("received waveform", n, samples.len()));
    }
    if params.n_l != interp * params.l_l {
        return Err(Error::Geometry(
            "receiver needs an even number of overlapping low-rate samples".into(),
        ));
    }
    let out_len = samples.len().div_ceil(interp);
    let blocks = out_len.div_ceil(params.l_s);
    let mut out = vec![ZERO; out_len];
    let lead = params.n_l as i64;
    let fetch = |start: i64| -> Vec<Cplx> {
        (0..n as i64)
            .map(|i| {
                let idx = start + i;
                if idx < 0 {
                    ZERO
                } else {
                    samples.get(idx as usize).copied().unwrap_or(ZERO)
                }
            })
            .collect()
    };
    for r in 0..blocks {
        let start = (r * params.n_s) as i64 - lead;
        let mut y = fetch(start);
        let phase = phase_at(cfg.center, start, n);
        let low_start = (r * params.l_s) as i64 - params.l_l as i64;
        match scheme {
            BlockScheme::Ols => {
                let z = analyze_block(&y, cfg, n, phase)?;
                for (i, &v) in z.iter().enumerate().skip(params.l_l).take(params.l_s) {
                    let t = low_start + i as i64;
                    if t >= 0 && (t as usize) < out_len {
                        out[t as usize] = v;
                    }
                }
            }
            BlockScheme::Ola => {
                apply_window(&mut y, params.n_l..params.n_l + params.n_s);
                let z = analyze_block(&y, cfg, n, phase)?;
                for (i, v) in z.iter().enumerate().take(l) {
                    let t = low_start + i as i64;
                    if t >= 0 && (t as usize) < out_len {
                        out[t as usize] += v;
                    }
                }
            }
        }
    }
    Ok(out)
}
