//! Fast-convolution (FC) filtered CP-OFDM waveform processing.
//!
//! The crate covers the whole per-subband chain:
//!
//! * [`numerology`]: 5G-NR style numerology, variable CP schedule and FC
//!   block geometry ([`FcParams`]).
//! * [`ofdm`] and [`qam`]: low-rate CP-OFDM (de)modulation and Gray-mapped
//!   QAM.
//! * [`fc`]: the continuous FC synthesis/analysis filter bank with OLA and
//!   OLS block processing.
//! * [`sync`]: discontinuous, symbol-synchronized FC processing with CP
//!   extrapolation and the fused low-rate receiver transform.
//! * [`channel`]: AWGN, tapped-delay-line fading, asynchronous multiplexing
//!   and one-tap equalization.
//! * [`metrics`]: BER, EVM, Welch PSD and the real-multiplication
//!   complexity model.
//!
//! All signals are `Complex64` sample vectors. Transforms follow the DFT
//! matrix convention `W[k, n] = exp(-j 2 pi k n / L)`.

pub mod channel;
pub mod dft;
mod error;
pub mod fc;
pub mod metrics;
pub mod numerology;
pub mod ofdm;
pub mod qam;
pub mod sync;

pub use error::{Error, Result};
pub use fc::{BlockScheme, SubbandConfig, Synthesized, Waveform};
pub use numerology::{CpSchedule, FcParams, Numerology};

/// Complex baseband sample.
pub type Cplx = num_complex::Complex64;
