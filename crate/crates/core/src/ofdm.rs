//! Low-rate CP-OFDM modulation and demodulation for one subband.

use crate::{dft, Cplx, Error, Result};

/// DC subcarrier handling of a centered allocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DcMode {
    #[default]
    Include,
    Exclude,
}

/// Active subcarriers of a subband, as signed frequency offsets (in
/// subcarriers) from the subband center, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Allocation {
    pub l_ofdm: usize,
    pub offsets: Vec<i64>,
}

impl Allocation {
    /// `l_act` subcarriers centered on the subband center. With DC included
    /// the offsets are `-floor(l_act/2) ..= ceil(l_act/2) - 1`; with DC
    /// excluded the zero offset is skipped and the set spans one extra bin.
    pub fn centered(l_ofdm: usize, l_act: usize, dc: DcMode) -> Result<Self> {
        let span = match dc {
            DcMode::Include => l_act,
            DcMode::Exclude => l_act + 1,
        };
        if l_act == 0 || span > l_ofdm {
            return Err(Error::InvalidArgument(format!(
                "{l_act} active subcarriers do not fit in {l_ofdm} bins"
            )));
        }
        let lo = -((l_act / 2) as i64);
        let offsets = match dc {
            DcMode::Include => (lo..lo + l_act as i64).collect(),
            DcMode::Exclude => (lo..=lo + l_act as i64).filter(|&k| k != 0).collect(),
        };
        Ok(Self { l_ofdm, offsets })
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    /// Contiguous width covered by the allocation, in bins.
    pub fn span(&self) -> usize {
        match (self.offsets.first(), self.offsets.last()) {
            (Some(a), Some(b)) => (b - a + 1) as usize,
            _ => 0,
        }
    }

    /// DFT bin index of every active subcarrier in the `l_ofdm` grid.
    pub fn bins(&self) -> Vec<usize> {
        self.bins_in(self.l_ofdm)
    }

    /// Same offsets placed in a grid of `len` bins around DC.
    pub fn bins_in(&self, len: usize) -> Vec<usize> {
        self.offsets
            .iter()
            .map(|&k| k.rem_euclid(len as i64) as usize)
            .collect()
    }
}

/// QAM symbols on the active subcarriers of consecutive OFDM symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct QamGrid {
    pub alloc: Allocation,
    /// `symbols[n][i]` is the value on subcarrier `alloc.offsets[i]` of
    /// OFDM symbol `n`.
    pub symbols: Vec<Vec<Cplx>>,
}

impl QamGrid {
    pub fn new(alloc: Allocation, symbols: Vec<Vec<Cplx>>) -> Result<Self> {
        for col in &symbols {
            if col.len() != alloc.len() {
                return Err(Error::length("QAM grid column", alloc.len(), col.len()));
            }
        }
        Ok(Self { alloc, symbols })
    }

    pub fn n_symbols(&self) -> usize {
        self.symbols.len()
    }
}

/// `sqrt(L) IDFT` of the zero-stuffed frequency vector of symbol `n`,
/// i.e. a unitary inverse transform.
pub fn ofdm_modulate(grid: &QamGrid, n: usize) -> Result<Vec<Cplx>> {
    let col = grid.symbols.get(n).ok_or(Error::OutOfRange {
        what: "OFDM symbol",
        index: n,
        len: grid.symbols.len(),
    })?;
    let l = grid.alloc.l_ofdm;
    let mut buf = vec![Cplx::new(0.0, 0.0); l];
    for (&bin, &v) in grid.alloc.bins().iter().zip(col) {
        buf[bin] = v;
    }
    dft::inverse(&mut buf);
    let scale = 1.0 / (l as f64).sqrt();
    buf.iter_mut().for_each(|v| *v *= scale);
    Ok(buf)
}

/// `(1 / sqrt(L)) DFT(sym)`, the inverse of [`ofdm_modulate`].
pub fn ofdm_demodulate(sym: &[Cplx], l_ofdm: usize) -> Result<Vec<Cplx>> {
    if sym.len() != l_ofdm {
        return Err(Error::length("OFDM symbol", l_ofdm, sym.len()));
    }
    let mut buf = sym.to_vec();
    dft::forward(&mut buf);
    let scale = 1.0 / (l_ofdm as f64).sqrt();
    buf.iter_mut().for_each(|v| *v *= scale);
    Ok(buf)
}

/// Prepends the last `l_cp` samples.
pub fn cp_insert(sym: &[Cplx], l_cp: usize) -> Result<Vec<Cplx>> {
    if l_cp >= sym.len() {
        return Err(Error::InvalidArgument(format!(
            "CP of {l_cp} samples is not shorter than the {}-sample symbol",
            sym.len()
        )));
    }
    let mut out = Vec::with_capacity(sym.len() + l_cp);
    out.extend_from_slice(&sym[sym.len() - l_cp..]);
    out.extend_from_slice(sym);
    Ok(out)
}

pub fn cp_remove(sig: &[Cplx], l_cp: usize, l_ofdm: usize) -> Result<Vec<Cplx>> {
    if sig.len() < l_cp + l_ofdm {
        return Err(Error::length("CP-OFDM symbol", l_cp + l_ofdm, sig.len()));
    }
    Ok(sig[l_cp..l_cp + l_ofdm].to_vec())
}

/// Removes the CPs of consecutive symbols starting at `start` and
/// demodulates each one; returns all `l_ofdm` bins per symbol.
pub fn demodulate_stream(
    samples: &[Cplx],
    start: usize,
    cp_lengths: &[usize],
    l_ofdm: usize,
) -> Result<Vec<Vec<Cplx>>> {
    let mut pos = start;
    let mut out = Vec::with_capacity(cp_lengths.len());
    for &l_cp in cp_lengths {
        let end = pos + l_cp + l_ofdm;
        if end > samples.len() {
            return Err(Error::length("received stream", end, samples.len()));
        }
        out.push(ofdm_demodulate(&samples[pos + l_cp..end], l_ofdm)?);
        pos = end;
    }
    Ok(out)
}

/// Serial CP-OFDM stream of one subband.
#[derive(Debug, Clone, PartialEq)]
pub struct CpOfdmSignal {
    pub samples: Vec<Cplx>,
    pub l_ofdm: usize,
    /// Start index of every symbol (its first CP sample).
    pub symbol_starts: Vec<usize>,
    pub cp_lengths: Vec<usize>,
}

impl CpOfdmSignal {
    /// Modulates every symbol of `grid` and prepends `cp_lengths[n]`.
    pub fn modulate(grid: &QamGrid, cp_lengths: &[usize]) -> Result<Self> {
        if cp_lengths.len() != grid.n_symbols() {
            return Err(Error::length(
                "CP schedule",
                grid.n_symbols(),
                cp_lengths.len(),
            ));
        }
        let l = grid.alloc.l_ofdm;
        let total = grid.n_symbols() * l + cp_lengths.iter().sum::<usize>();
        let mut samples = Vec::with_capacity(total);
        let mut symbol_starts = Vec::with_capacity(grid.n_symbols());
        for (n, &l_cp) in cp_lengths.iter().enumerate() {
            symbol_starts.push(samples.len());
            samples.extend(cp_insert(&ofdm_modulate(grid, n)?, l_cp)?);
        }
        Ok(Self {
            samples,
            l_ofdm: l,
            symbol_starts,
            cp_lengths: cp_lengths.to_vec(),
        })
    }

    pub fn n_symbols(&self) -> usize {
        self.symbol_starts.len()
    }

    /// Samples of symbol `n` including its CP.
    pub fn symbol(&self, n: usize) -> &[Cplx] {
        let s = self.symbol_starts[n];
        &self.samples[s..s + self.cp_lengths[n] + self.l_ofdm]
    }
}
