//! Discontinuous, symbol-synchronized FC processing.
//!
//! Every CP-OFDM symbol is zero padded to `3L/2` low-rate samples and
//! filtered in exactly two half-overlapping FC blocks. The first block's
//! leading overlap absorbs the CP, so its effective overlap factor drops to
//! `0.5 - L_CP / L`. Filtered symbols (`3N/2` high-rate samples each) are
//! overlap-added at offsets `sigma_n = n N + sum_{q=1}^{n} N_CP,q`, which
//! restores the exact high-rate CP even when the low-rate CP was truncated.
//!
//! On the receive side the two blocks of a symbol are analysed
//! independently and their central halves concatenated. Because the block
//! pair is aligned to the symbol, the inverse short transforms of the
//! filter bank and the forward transform of the OFDM demodulator fuse into
//! one inverse and one forward transform ([`rx_symbol_simplified`]).
//!
//! Only the half-overlap geometry is supported: `L` a multiple of four and
//! `L_O = L/2`.

use std::ops::Range;

use crate::fc::{
    accumulate_synthesis, analysis_from_long_spectrum, apply_window, block_phase, BlockScheme,
    SubbandConfig, Synthesized, Waveform,
};
use crate::numerology::{CpSchedule, FcParams};
use crate::ofdm::CpOfdmSignal;
use crate::{dft, Cplx, Error, Numerology, Result};

const ZERO: Cplx = Cplx { re: 0.0, im: 0.0 };

/// Splits a high-rate CP into the integer low-rate CP and the number of
/// high-rate samples the FC chain has to extrapolate.
pub fn cp_truncate(n_cp: usize, interp: usize) -> (usize, usize) {
    let l_cp = n_cp / interp;
    (l_cp, n_cp - interp * l_cp)
}

/// Low-rate CP of every symbol after truncation.
pub fn low_rate_cp(sched: &CpSchedule, interp: usize) -> Vec<usize> {
    sched
        .per_symbol_high_rate
        .iter()
        .map(|&n_cp| cp_truncate(n_cp, interp).0)
        .collect()
}

fn check_geometry(params: &FcParams) -> Result<()> {
    if !params.l.is_multiple_of(4) || params.l_o * 2 != params.l || params.n_o * 2 != params.n {
        return Err(Error::Geometry(format!(
            "symbol-synchronized processing needs lambda = 0.5 and 4 | L (L = {}, L_O = {})",
            params.l, params.l_o
        )));
    }
    Ok(())
}

/// `[S_L zeros; CP-OFDM symbol; L_T zeros]` with `S_L = L_L - L_CP`, length
/// `3L/2`. `sym` carries its CP of `l_cp` samples.
pub fn zero_pad_symbol(sym: &[Cplx], params: &FcParams, l_cp: usize) -> Result<Vec<Cplx>> {
    check_geometry(params)?;
    if l_cp > params.l_l {
        return Err(Error::Geometry(format!(
            "CP of {l_cp} samples exceeds the {}-sample leading overlap",
            params.l_l
        )));
    }
    if sym.len() != params.l + l_cp {
        return Err(Error::length("CP-OFDM symbol", params.l + l_cp, sym.len()));
    }
    let lead = params.l_l - l_cp;
    let mut z = vec![ZERO; lead];
    z.extend_from_slice(sym);
    z.resize(3 * params.l / 2, ZERO);
    Ok(z)
}

/// Input samples of the padded symbol passed by the first block's analysis
/// window: `[S_L, S_L + L_S + L_CP)`.
pub fn first_block_window(params: &FcParams, l_cp: usize) -> Range<usize> {
    let s_l = params.l_l - l_cp;
    s_l..s_l + params.l_s + l_cp
}

/// Output samples kept by the first block's OLS synthesis window: the
/// high-rate CP (`n_cp` samples before the symbol core) and the first half
/// of the core.
pub fn first_block_output_window(params: &FcParams, n_cp: usize) -> Range<usize> {
    params.n_l - n_cp..params.n_l + params.n_s
}

/// `theta_n = exp(j 2 pi c phi_n)` with `phi_n = (1/N) sum_{q=1}^{n} N_CP,q`.
pub fn symbol_phase(n: usize, center: usize, sched: &CpSchedule, n_fft: usize) -> Cplx {
    if n == 0 {
        return Cplx::new(1.0, 0.0);
    }
    let shift = sched.sum_after_first(n) as i128;
    dft::unit_phasor(center as i128 * shift, n_fft as u64)
}

/// One filtered symbol of length `3N/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct FilteredSymbol {
    pub samples: Vec<Cplx>,
    pub n: usize,
}

struct SymbolInput<'a> {
    sym: &'a [Cplx],
    cfg: &'a SubbandConfig,
    params: &'a FcParams,
    l_cp: usize,
}

/// Filters symbol `n` of all subbands in two blocks that share the
/// long-transform IFFT.
fn synthesize_symbol(
    inputs: &[SymbolInput<'_>],
    n: usize,
    sched: &CpSchedule,
    n_fft: usize,
    scheme: BlockScheme,
) -> Result<Vec<Cplx>> {
    let half_n = n_fft / 2;
    let mut out = vec![ZERO; 3 * half_n];
    let n_cp = sched.get(n);
    for r in 0..2 {
        let mut acc = vec![ZERO; n_fft];
        for inp in inputs {
            let p = inp.params;
            let z = zero_pad_symbol(inp.sym, p, inp.l_cp)?;
            let start = r * p.l / 2;
            let mut seg = z[start..start + p.l].to_vec();
            if scheme == BlockScheme::Ola {
                let keep = if r == 0 {
                    first_block_window(p, inp.l_cp)
                } else {
                    p.l_l..p.l_l + p.l_s
                };
                apply_window(&mut seg, keep);
            }
            let phase = block_phase(r, inp.cfg.center, p.l_s, p.l)
                * symbol_phase(n, inp.cfg.center, sched, n_fft);
            accumulate_synthesis(&seg, inp.cfg, &mut acc, phase);
        }
        dft::inverse(&mut acc);
        if scheme == BlockScheme::Ols {
            let p = inputs[0].params;
            let keep = if r == 0 {
                first_block_output_window(p, n_cp)
            } else {
                p.n_l..p.n_l + p.n_s
            };
            apply_window(&mut acc, keep);
        }
        for (o, v) in out[r * half_n..r * half_n + n_fft].iter_mut().zip(&acc) {
            *o += v;
        }
    }
    Ok(out)
}

fn expected_cp(sched: &CpSchedule, n: usize, interp: usize, actual: usize) -> Result<()> {
    let (l_cp, _) = cp_truncate(sched.get(n), interp);
    if l_cp != actual {
        return Err(Error::Geometry(format!(
            "symbol {n} has a {actual}-sample CP, schedule implies {l_cp}"
        )));
    }
    Ok(())
}

/// Filters one CP-OFDM symbol (`sym` includes its CP) of one subband.
pub fn tx_symbol(
    sym: &[Cplx],
    cfg: &SubbandConfig,
    params: &FcParams,
    n: usize,
    sched: &CpSchedule,
    scheme: BlockScheme,
) -> Result<FilteredSymbol> {
    check_geometry(params)?;
    if cfg.l != params.l || cfg.l_ofdm != cfg.l {
        return Err(Error::Geometry(
            "symbol-synchronized TX needs L = L_OFDM".into(),
        ));
    }
    if n >= sched.len() {
        return Err(Error::OutOfRange {
            what: "CP schedule",
            index: n,
            len: sched.len(),
        });
    }
    let l_cp = sym
        .len()
        .checked_sub(params.l)
        .ok_or_else(|| Error::length("CP-OFDM symbol", params.l, sym.len()))?;
    expected_cp(sched, n, params.interp, l_cp)?;
    let samples = synthesize_symbol(
        &[SymbolInput {
            sym,
            cfg,
            params,
            l_cp,
        }],
        n,
        sched,
        params.n,
        scheme,
    )?;
    Ok(FilteredSymbol { samples, n })
}

/// Start of every filtered symbol in the burst buffer.
pub fn symbol_offsets(sched: &CpSchedule, n_fft: usize, n_symbols: usize) -> Vec<usize> {
    (0..n_symbols)
        .map(|n| n * n_fft + if n == 0 { 0 } else { sched.sum_after_first(n) })
        .collect()
}

/// Burst length `Q = N_L + N_T + B N + sum_{n=1}^{B-1} N_CP,n`.
pub fn burst_length(sched: &CpSchedule, params: &FcParams, n_symbols: usize) -> usize {
    let cps = if n_symbols > 1 {
        sched.sum_after_first(n_symbols - 1)
    } else {
        0
    };
    params.n_l + params.n_t + n_symbols * params.n + cps
}

/// Symbol-wise overlap-add of filtered symbols into one burst.
pub fn combine_symbols(
    syms: &[FilteredSymbol],
    sched: &CpSchedule,
    params: &FcParams,
    fs_hz: f64,
) -> Result<Waveform> {
    check_geometry(params)?;
    let b = syms.len();
    if b == 0 || b > sched.len() {
        return Err(Error::length("filtered symbols", sched.len(), b));
    }
    let len = 3 * params.n / 2;
    let offsets = symbol_offsets(sched, params.n, b);
    let mut out = vec![ZERO; burst_length(sched, params, b)];
    for (s, &off) in syms.iter().zip(&offsets) {
        if s.samples.len() != len {
            return Err(Error::length("filtered symbol", len, s.samples.len()));
        }
        for (o, v) in out[off..off + len].iter_mut().zip(&s.samples) {
            *o += v;
        }
    }
    Ok(Waveform {
        samples: out,
        fs_hz,
        origin: params.n_l - sched.get(0),
    })
}

/// Discontinuous TX of one or more subbands: per-symbol two-block
/// filtering with a shared long transform, then symbol-wise overlap-add.
/// Each signal's CPs must be the truncated low-rate CPs of `sched`.
pub fn tx_discontinuous(
    signals: &[CpOfdmSignal],
    cfgs: &[SubbandConfig],
    sched: &CpSchedule,
    num: &Numerology,
    scheme: BlockScheme,
) -> Result<Synthesized> {
    if signals.is_empty() || signals.len() != cfgs.len() {
        return Err(Error::length("subband configs", signals.len(), cfgs.len()));
    }
    let n_fft = num.n_fft;
    let params: Vec<FcParams> = cfgs
        .iter()
        .map(|c| FcParams::derive(n_fft, c.l, 0.5))
        .collect::<Result<_>>()?;
    let b = signals[0].n_symbols();
    if b == 0 || b > sched.len() {
        return Err(Error::length("CP schedule", b, sched.len()));
    }
    for ((sig, cfg), p) in signals.iter().zip(cfgs).zip(&params) {
        check_geometry(p)?;
        if sig.n_symbols() != b {
            return Err(Error::length("symbols in subband", b, sig.n_symbols()));
        }
        if sig.l_ofdm != cfg.l {
            return Err(Error::Geometry(
                "symbol-synchronized TX needs L = L_OFDM".into(),
            ));
        }
        for n in 0..b {
            expected_cp(sched, n, p.interp, sig.cp_lengths[n])?;
        }
    }

    let filtered = (0..b)
        .map(|n| {
            let inputs: Vec<SymbolInput<'_>> = signals
                .iter()
                .zip(cfgs)
                .zip(&params)
                .map(|((sig, cfg), p)| SymbolInput {
                    sym: sig.symbol(n),
                    cfg,
                    params: p,
                    l_cp: sig.cp_lengths[n],
                })
                .collect();
            synthesize_symbol(&inputs, n, sched, n_fft, scheme)
                .map(|samples| FilteredSymbol { samples, n })
        })
        .collect::<Result<Vec<_>>>()?;
    let waveform = combine_symbols(&filtered, sched, &params[0], num.fs_hz() as f64)?;
    Ok(Synthesized {
        waveform,
        fc_blocks: 2 * b,
    })
}

/// Index in a received waveform (with origin `origin`) where the burst
/// buffer of [`combine_symbols`] starts.
pub fn burst_start(origin: usize, params: &FcParams, sched: &CpSchedule) -> Result<usize> {
    (origin + sched.get(0))
        .checked_sub(params.n_l)
        .ok_or_else(|| Error::Geometry("waveform origin precedes the burst buffer".into()))
}

/// The two length-`N` blocks of symbol `n`: `[sigma_n, sigma_n + N)` and
/// `[sigma_n + N/2, sigma_n + 3N/2)` of the burst-aligned `samples`.
pub fn rx_segment(
    samples: &[Cplx],
    sched: &CpSchedule,
    n_fft: usize,
    n: usize,
) -> Result<(Vec<Cplx>, Vec<Cplx>)> {
    if n >= sched.len() {
        return Err(Error::OutOfRange {
            what: "CP schedule",
            index: n,
            len: sched.len(),
        });
    }
    let sigma = symbol_offsets(sched, n_fft, n + 1)[n];
    let end = sigma + 3 * n_fft / 2;
    if samples.len() < end {
        return Err(Error::length("received burst", end, samples.len()));
    }
    Ok((
        samples[sigma..sigma + n_fft].to_vec(),
        samples[sigma + n_fft / 2..end].to_vec(),
    ))
}

/// Frequency-domain FC outputs `g_{2n}, g_{2n+1}` of symbol `n`: long FFT,
/// subband bin selection, weighting and de-shift of both blocks. With
/// [`BlockScheme::Ola`] the high-rate analysis window is applied first;
/// for block 0 it also passes the `N_CP,n` samples ahead of the core.
pub fn rx_front_end(
    y0: &[Cplx],
    y1: &[Cplx],
    cfg: &SubbandConfig,
    params: &FcParams,
    n: usize,
    sched: &CpSchedule,
    scheme: BlockScheme,
) -> Result<(Vec<Cplx>, Vec<Cplx>)> {
    check_geometry(params)?;
    if cfg.l != params.l {
        return Err(Error::Geometry("subband and parameter L differ".into()));
    }
    let theta = symbol_phase(n, cfg.center, sched, params.n);
    let mut out = Vec::with_capacity(2);
    for (r, y) in [y0, y1].into_iter().enumerate() {
        if y.len() != params.n {
            return Err(Error::length("received block", params.n, y.len()));
        }
        let mut buf = y.to_vec();
        if scheme == BlockScheme::Ola {
            let lead = if r == 0 { sched.get(n) } else { 0 };
            apply_window(&mut buf, params.n_l - lead..params.n_l + params.n_s);
        }
        dft::forward(&mut buf);
        let phase = block_phase(r, cfg.center, params.l_s, params.l) * theta;
        out.push(analysis_from_long_spectrum(&buf, cfg, phase));
    }
    let g1 = out.pop().unwrap_or_default();
    let g0 = out.pop().unwrap_or_default();
    Ok((g0, g1))
}

fn check_pair(g0: &[Cplx], g1: &[Cplx]) -> Result<usize> {
    let l = g0.len();
    if l == 0 || !l.is_multiple_of(4) {
        return Err(Error::Geometry(format!(
            "block length {l} is not a multiple of 4"
        )));
    }
    if g1.len() != l {
        return Err(Error::length("second FC block", l, g1.len()));
    }
    Ok(l)
}

/// Direct receiver combination:
/// `x = W_L [P^(L/4) S W_L^-1 g0 + P^(-L/4) S W_L^-1 g1] / sqrt(L)`,
/// i.e. two inverse and one forward short transform.
pub fn combine_direct(g0: &[Cplx], g1: &[Cplx]) -> Result<Vec<Cplx>> {
    let l = check_pair(g0, g1)?;
    let (q, h) = (l / 4, l / 2);
    let mut t0 = g0.to_vec();
    let mut t1 = g1.to_vec();
    dft::inverse(&mut t0);
    dft::inverse(&mut t1);
    let mut x = Vec::with_capacity(l);
    x.extend_from_slice(&t0[q..q + h]);
    x.extend_from_slice(&t1[q..q + h]);
    dft::forward(&mut x);
    let scale = 1.0 / (l as f64 * (l as f64).sqrt());
    x.iter_mut().for_each(|v| *v *= scale);
    Ok(x)
}

/// Receiver combination for OLA analysis blocks: both block outputs are
/// overlap-added at hop `L/2` and the symbol core `[L/4, 5L/4)` of the
/// padded frame is demodulated.
pub fn combine_overlap_add(g0: &[Cplx], g1: &[Cplx]) -> Result<Vec<Cplx>> {
    let l = check_pair(g0, g1)?;
    let q = l / 4;
    let mut t0 = g0.to_vec();
    let mut t1 = g1.to_vec();
    dft::inverse(&mut t0);
    dft::inverse(&mut t1);
    let mut x = vec![ZERO; l];
    for (i, v) in x.iter_mut().enumerate() {
        if q + i < l {
            *v += t0[q + i];
        }
        if i >= q {
            *v += t1[i - q];
        }
    }
    dft::forward(&mut x);
    let scale = 1.0 / (l as f64 * (l as f64).sqrt());
    x.iter_mut().for_each(|v| *v *= scale);
    Ok(x)
}

/// `Omega_phi = diag(W_L^(phi k))`, `W_L = exp(-j 2 pi / L)`.
fn omega(phi: i64, l: usize, v: &mut [Cplx]) {
    for (k, x) in v.iter_mut().enumerate() {
        *x *= dft::unit_phasor(-(phi as i128) * k as i128, l as u64);
    }
}

/// Fused receiver combination
/// `x = Omega_{-L/4} [F (g0 - Omega_{L/2} g1) + Omega_{L/2} g1] / sqrt(L)`
/// with `F = Omega_{L/4} W_L S^ W_L^-1 Omega_{-L/4}` and `S^` the receiver
/// window circularly advanced by `L/4` (ones on the first half). Costs one
/// inverse and one forward short transform; equal to [`combine_direct`].
pub fn rx_symbol_simplified(g0: &[Cplx], g1: &[Cplx]) -> Result<Vec<Cplx>> {
    let l = check_pair(g0, g1)?;
    let (q, h) = ((l / 4) as i64, l / 2);
    let mut rot1 = g1.to_vec();
    omega(h as i64, l, &mut rot1);
    let mut d: Vec<Cplx> = g0.iter().zip(&rot1).map(|(a, b)| a - b).collect();
    omega(-q, l, &mut d);
    dft::inverse(&mut d);
    d[h..].iter_mut().for_each(|v| *v = ZERO);
    dft::forward(&mut d);
    let inv_l = 1.0 / l as f64;
    d.iter_mut().for_each(|v| *v *= inv_l);
    omega(q, l, &mut d);
    let mut x: Vec<Cplx> = d.iter().zip(&rot1).map(|(a, b)| a + b).collect();
    omega(-q, l, &mut x);
    let scale = 1.0 / (l as f64).sqrt();
    x.iter_mut().for_each(|v| *v *= scale);
    Ok(x)
}

/// Direct discontinuous reception of symbol `n` from its two blocks.
/// Returns all `L` demodulated bins in natural DFT order.
#[allow(clippy::too_many_arguments)]
pub fn rx_symbol_direct(
    y0: &[Cplx],
    y1: &[Cplx],
    cfg: &SubbandConfig,
    params: &FcParams,
    n: usize,
    sched: &CpSchedule,
    scheme: BlockScheme,
) -> Result<Vec<Cplx>> {
    let (g0, g1) = rx_front_end(y0, y1, cfg, params, n, sched, scheme)?;
    match scheme {
        BlockScheme::Ols => combine_direct(&g0, &g1),
        BlockScheme::Ola => combine_overlap_add(&g0, &g1),
    }
}

/// Low-rate receiver combination variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RxPath {
    #[default]
    Direct,
    Simplified,
}

/// Receives every symbol of a burst. `samples` must start at the burst
/// buffer (see [`burst_start`]). The fused path needs OLS blocks.
pub fn rx_discontinuous(
    samples: &[Cplx],
    cfg: &SubbandConfig,
    params: &FcParams,
    sched: &CpSchedule,
    n_symbols: usize,
    scheme: BlockScheme,
    path: RxPath,
) -> Result<Vec<Vec<Cplx>>> {
    if scheme == BlockScheme::Ola && path == RxPath::Simplified {
        return Err(Error::InvalidArgument(
            "the fused receiver combines OLS block outputs only".into(),
        ));
    }
    (0..n_symbols)
        .map(|n| {
            let (y0, y1) = rx_segment(samples, sched, params.n, n)?;
            let (g0, g1) = rx_front_end(&y0, &y1, cfg, params, n, sched, scheme)?;
            match (scheme, path) {
                (BlockScheme::Ola, _) => combine_overlap_add(&g0, &g1),
                (BlockScheme::Ols, RxPath::Direct) => combine_direct(&g0, &g1),
                (BlockScheme::Ols, RxPath::Simplified) => rx_symbol_simplified(&g0, &g1),
            }
        })
        .collect()
}
