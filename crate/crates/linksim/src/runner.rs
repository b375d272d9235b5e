//! Monte-Carlo drops of one scenario.

use fcwave_core::channel::{
    add_noise, equalize, multiplex_async, noise_variance, ChannelResponse, TdlProfile,
};
use fcwave_core::metrics::{bit_errors, psd, EVM_CEILING_DB};
use fcwave_core::{Cplx, Waveform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{normalize_power, Link};
use crate::error::{Result, SimError};
use crate::scenario::{ChannelSpec, Scenario, SyncSpec};
use crate::theory;

/// One CSV row: the target subband at one SNR point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub snr_db: f64,
    pub ber: f64,
    pub evm_db: f64,
    pub config_id: u8,
    pub scenario: String,
    pub bits: u64,
    pub bit_errors: u64,
    /// Symbols dropped by the equalizer at channel nulls.
    pub erasures: u64,
    /// Closed-form AWGN reference; empty for fading channels.
    pub ber_theory: Option<f64>,
    /// Noise-free TX spectrum one PRB outside the allocation, relative to
    /// the in-band level.
    pub oob_psd_db: f64,
    pub tx_mults_per_qam: f64,
    pub rx_mults_per_qam: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Point {
    bits: u64,
    errors: u64,
    erasures: u64,
    err_energy: f64,
    ref_energy: f64,
}

impl Point {
    fn add(&mut self, o: &Point) {
        self.bits += o.bits;
        self.errors += o.errors;
        self.erasures += o.erasures;
        self.err_energy += o.err_energy;
        self.ref_energy += o.ref_energy;
    }
}

const BITS: u64 = 1;
const CHANNEL: u64 = 2;
const NOISE: u64 = 3;
const SPECTRUM: u64 = 4;

/// Independent generator for `(drop, purpose, index)` of one seed.
fn stream(seed: u64, drop: usize, purpose: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((drop as u64) << 16) | (purpose << 8) | index as u64);
    rng
}

fn random_bits(rng: &mut ChaCha8Rng, rows: usize, per_row: usize) -> Vec<Vec<u8>> {
    (0..rows)
        .map(|_| {
            (0..per_row)
                .map(|_| u8::from(rng.random::<bool>()))
                .collect()
        })
        .collect()
}

struct Context<'a> {
    s: &'a Scenario,
    link: Link,
    profile: Option<TdlProfile>,
}

impl<'a> Context<'a> {
    fn new(s: &'a Scenario) -> Result<Self> {
        let link = Link::new(s)?;
        let profile = match &s.channel {
            ChannelSpec::Awgn => None,
            ChannelSpec::Tdl {
                profile: Some(path),
                rms_ds_ns,
            } => Some(TdlProfile::load(path)?.scaled_to(*rms_ds_ns)?),
            ChannelSpec::Tdl {
                profile: None,
                rms_ds_ns,
            } => Some(TdlProfile::exponential(*rms_ds_ns, link.fs_hz())?),
        };
        Ok(Self { s, link, profile })
    }

    fn drop(&self, d: usize) -> Result<Vec<Point>> {
        let link = &self.link;
        let seed = self.s.seed;
        let target = link.target;
        let mut waves = Vec::with_capacity(link.centers.len());
        let mut reference = None;
        for m in 0..link.centers.len() {
            let bits = random_bits(
                &mut stream(seed, d, BITS, m),
                link.symbols,
                link.bits_per_symbol(),
            );
            let grid = link.grid(&bits)?;
            let mut w = link.transmit(m, &grid)?;
            let h = match &self.profile {
                Some(p) => {
                    let mut h = p.realize(w.fs_hz, &mut stream(seed, d, CHANNEL, m));
                    normalize_power(&mut h);
                    w = h.apply(&w);
                    h
                }
                None => ChannelResponse::identity(),
            };
            if m == target {
                reference = Some((bits, grid, h));
            }
            waves.push(w);
        }
        let (bits, grid, h) = reference.expect("target subband exists");
        let received = self.combine(&waves)?;
        let cfr = link.target_response(&h);

        self.s
            .snr_db
            .iter()
            .enumerate()
            .map(|(i, &snr)| {
                let mut samples = received.samples.clone();
                add_noise(
                    &mut samples,
                    noise_variance(snr),
                    &mut stream(seed, d, NOISE, i),
                );
                let rx = link.receive(&samples, received.origin)?;
                let mut pt = Point::default();
                for ((row, tx_bits), tx_sym) in rx.iter().zip(&bits).zip(&grid.symbols) {
                    let eq = equalize(row, &cfr)?;
                    let rx_bits = link.modulation.demap(&eq.values);
                    pt.bits += tx_bits.len() as u64;
                    pt.errors += bit_errors(tx_bits, &rx_bits)? as u64;
                    pt.erasures += eq.erasures() as u64;
                    for ((y, x), &erased) in eq.values.iter().zip(tx_sym).zip(&eq.erased) {
                        if !erased {
                            pt.err_energy += (y - x).norm_sqr();
                            pt.ref_energy += x.norm_sqr();
                        }
                    }
                }
                Ok(pt)
            })
            .collect()
    }

    /// Aligns the subband waveforms and delays the neighbours in the
    /// asynchronous case.
    fn combine(&self, waves: &[Waveform]) -> Result<Waveform> {
        let n = self.link.n();
        let origin = self.link.common_origin(waves);
        let len = waves
            .iter()
            .map(|w| w.len() - w.origin.min(w.len()))
            .max()
            .unwrap_or(0)
            + origin
            + 2 * n;
        let aligned: Vec<Waveform> = waves.iter().map(|w| w.realigned(origin, len)).collect();
        let offset = match self.s.sync {
            SyncSpec::Synchronous => 0,
            SyncSpec::Asynchronous { offset } => offset,
        };
        let offsets: Vec<usize> = (0..waves.len())
            .map(|m| if m == self.link.target { 0 } else { offset })
            .collect();
        Ok(multiplex_async(&aligned, &offsets)?)
    }
}

/// Symbols in the burst used for the spectrum estimate.
pub const SPECTRUM_SYMBOLS: usize = 140;
const SPECTRUM_SEGMENT: usize = 4096;

/// Welch PSD of the noise-free target-subband transmitter, one PRB (12
/// subcarriers) outside either edge of the allocation, in dB relative to
/// the in-band mean; the higher side is returned.
pub fn oob_psd_db(link: &Link, seed: u64) -> Result<f64> {
    let t = link.target;
    let bits = random_bits(
        &mut stream(seed, 0, SPECTRUM, t),
        SPECTRUM_SYMBOLS,
        link.bits_per_symbol(),
    );
    let w = link.transmit_burst(t, &link.grid(&bits)?)?;
    let p = psd(&w.samples, w.fs_hz, SPECTRUM_SEGMENT, 0.5)?;
    let scs = f64::from(link.num.scs_khz) * 1e3;
    let f0 = link.center_hz(t);
    let offs = &link.tx_alloc().offsets;
    let lo = f0 + (offs[0] as f64 - 0.5) * scs;
    let hi = f0 + (offs[offs.len() - 1] as f64 + 0.5) * scs;
    let inband = p.mean_db(lo, hi)?;
    let probe = |f: f64| p.mean_db(f - 0.5 * scs, f + 0.5 * scs);
    let upper = probe(hi + 12.0 * scs)?;
    let lower = probe(lo - 12.0 * scs)?;
    Ok(upper.max(lower) - inband)
}

/// Runs every drop and SNR point of `s`; drops run in parallel and are
/// reduced in drop order, so results do not depend on scheduling.
pub fn run_scenario(s: &Scenario) -> Result<Vec<ResultRow>> {
    s.validate()?;
    let ctx = Context::new(s)?;
    let per_drop: Vec<Vec<Point>> = (0..s.drops)
        .into_par_iter()
        .map(|d| ctx.drop(d))
        .collect::<Result<_>>()?;
    let mut totals = vec![Point::default(); s.snr_db.len()];
    for pts in &per_drop {
        for (t, p) in totals.iter_mut().zip(pts) {
            t.add(p);
        }
    }
    if totals.iter().any(|t| t.bits == 0) {
        return Err(SimError::Invalid("scenario produced no bits".into()));
    }
    let link = &ctx.link;
    let oob = oob_psd_db(link, s.seed)?;
    let tx_cost = link.mults_per_qam(link.tx, false)?;
    let rx_cost = link.mults_per_qam(link.rx, true)?;
    let awgn = s.channel == ChannelSpec::Awgn;
    Ok(s.snr_db
        .iter()
        .zip(&totals)
        .map(|(&snr, t)| ResultRow {
            snr_db: snr,
            ber: t.errors as f64 / t.bits as f64,
            evm_db: evm(t),
            config_id: s.filtering,
            scenario: s.id.clone(),
            bits: t.bits,
            bit_errors: t.errors,
            erasures: t.erasures,
            ber_theory: awgn.then(|| theory::ber(link.modulation, snr)),
            oob_psd_db: oob,
            tx_mults_per_qam: tx_cost,
            rx_mults_per_qam: rx_cost,
        })
        .collect())
}

fn evm(t: &Point) -> f64 {
    if t.err_energy <= 0.0 {
        EVM_CEILING_DB
    } else {
        (10.0 * (t.ref_energy / t.err_energy).log10()).min(EVM_CEILING_DB)
    }
}

/// Received target-subband symbols of one noise-free drop against the
/// transmitted ones, for loopback checks.
pub fn noiseless_loopback(s: &Scenario) -> Result<(Vec<Cplx>, Vec<Cplx>)> {
    let ctx = Context::new(s)?;
    let link = &ctx.link;
    let mut waves = Vec::new();
    let mut sent = Vec::new();
    for m in 0..link.centers.len() {
        let bits = random_bits(
            &mut stream(s.seed, 0, BITS, m),
            link.symbols,
            link.bits_per_symbol(),
        );
        let grid = link.grid(&bits)?;
        if m == link.target {
            sent = grid.symbols.iter().flatten().copied().collect();
        }
        waves.push(link.transmit(m, &grid)?);
    }
    let w = ctx.combine(&waves)?;
    let got = link
        .receive(&w.samples, w.origin)?
        .into_iter()
        .flatten()
        .collect();
    Ok((sent, got))
}
