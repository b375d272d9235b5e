//! Gray-mapped square QAM with unit average symbol energy.

use crate::{Cplx, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Modulation {
    Qpsk,
    Qam16,
    Qam64,
}

impl Modulation {
    pub fn bits_per_symbol(self) -> usize {
        match self {
            Modulation::Qpsk => 2,
            Modulation::Qam16 => 4,
            Modulation::Qam64 => 6,
        }
    }

    pub fn order(self) -> usize {
        1 << self.bits_per_symbol()
    }

    fn bits_per_axis(self) -> usize {
        self.bits_per_symbol() / 2
    }

    /// Scale giving unit average energy: `sqrt(2 (M - 1) / 3)`.
    fn norm(self) -> f64 {
        (2.0 * (self.order() as f64 - 1.0) / 3.0).sqrt()
    }

    /// Maps `bits` (length a multiple of `bits_per_symbol`) to symbols. The
    /// first half of each symbol's bits drives the in-phase axis.
    pub fn map(self, bits: &[u8]) -> Result<Vec<Cplx>> {
        let k = self.bits_per_symbol();
        if !bits.len().is_multiple_of(k) {
            return Err(Error::InvalidArgument(format!(
                "{} bits is not a multiple of {k}",
                bits.len()
            )));
        }
        let h = self.bits_per_axis();
        let norm = self.norm();
        Ok(bits
            .chunks_exact(k)
            .map(|c| Cplx::new(axis_level(&c[..h]) / norm, axis_level(&c[h..]) / norm))
            .collect())
    }

    /// Hard-decision nearest-point demapping.
    pub fn demap(self, symbols: &[Cplx]) -> Vec<u8> {
        let h = self.bits_per_axis();
        let norm = self.norm();
        let mut out = Vec::with_capacity(symbols.len() * self.bits_per_symbol());
        for s in symbols {
            push_axis_bits(s.re * norm, h, &mut out);
            push_axis_bits(s.im * norm, h, &mut out);
        }
        out
    }
}

/// PAM level `2 i - (2^h - 1)` where `i` is the Gray-decoded index.
fn axis_level(bits: &[u8]) -> f64 {
    let mut gray = 0usize;
    for &b in bits {
        gray = (gray << 1) | (b & 1) as usize;
    }
    let mut idx = gray;
    let mut shift = gray >> 1;
    while shift != 0 {
        idx ^= shift;
        shift >>= 1;
    }
    let levels = 1usize << bits.len();
    (2 * idx) as f64 - (levels as f64 - 1.0)
}

fn push_axis_bits(v: f64, h: usize, out: &mut Vec<u8>) {
    let levels = 1usize << h;
    let idx = ((v + (levels as f64 - 1.0)) / 2.0).round();
    let idx = idx.clamp(0.0, (levels - 1) as f64) as usize;
    let gray = idx ^ (idx >> 1);
    for b in (0..h).rev() {
        out.push(((gray >> b) & 1) as u8);
    }
}
