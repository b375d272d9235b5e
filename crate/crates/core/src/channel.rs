//! Link impairments: AWGN, block-faded tapped delay lines, asynchronous
//! multiplexing of subband waveforms and one-tap equalization.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::fc::Waveform;
use crate::{dft, Cplx, Error, Result};

const ZERO: Cplx = Cplx { re: 0.0, im: 0.0 };

/// Noise variance per complex high-rate sample for an SNR (Es/N0) given in
/// dB, with unit average energy per active subcarrier. The unitary FC and
/// OFDM transforms carry this variance unchanged onto every demodulated bin.
pub fn noise_variance(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}

/// Draws one circular complex Gaussian sample of variance `var`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, var: f64) -> Cplx {
    let s = (var / 2.0).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Cplx::new(re * s, im * s)
}

/// Adds circular complex Gaussian noise of variance `var` in place.
pub fn add_noise<R: Rng + ?Sized>(samples: &mut [Cplx], var: f64, rng: &mut R) {
    if var <= 0.0 {
        return;
    }
    for v in samples.iter_mut() {
        *v += complex_gaussian(rng, var);
    }
}

/// AWGN at `snr_db`. An infinite SNR returns the input unchanged.
pub fn awgn(w: &Waveform, snr_db: f64, seed: u64) -> Result<Waveform> {
    if w.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot add noise to an empty waveform".into(),
        ));
    }
    let mut out = w.clone();
    if snr_db.is_infinite() && snr_db > 0.0 {
        return Ok(out);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    add_noise(&mut out.samples, noise_variance(snr_db), &mut rng);
    Ok(out)
}

/// One tap of a power-delay profile; `power` is linear.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tap {
    pub delay_ns: f64,
    pub power: f64,
}

/// Power-delay profile with unit total power and sorted delays.
#[derive(Debug, Clone, PartialEq)]
pub struct TdlProfile {
    pub taps: Vec<Tap>,
}

impl TdlProfile {
    /// Builds a profile from `(delay_ns, power_db)` pairs, normalizing the
    /// total power to one and sorting by delay.
    pub fn from_db(taps: &[(f64, f64)]) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::Profile("profile has no taps".into()));
        }
        let mut out: Vec<Tap> = Vec::with_capacity(taps.len());
        for &(d, p) in taps {
            if !d.is_finite() || d < 0.0 || !p.is_finite() {
                return Err(Error::Profile(format!("invalid tap ({d} ns, {p} dB)")));
            }
            out.push(Tap {
                delay_ns: d,
                power: 10f64.powf(p / 10.0),
            });
        }
        out.sort_by(|a, b| a.delay_ns.total_cmp(&b.delay_ns));
        let total: f64 = out.iter().map(|t| t.power).sum();
        out.iter_mut().for_each(|t| t.power /= total);
        Ok(Self { taps: out })
    }

    /// Parses `<delay_ns> <power_db>` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut taps = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let mut num = |name: &str| -> Result<f64> {
                fields
                    .next()
                    .ok_or_else(|| Error::Profile(format!("line {}: missing {name}", i + 1)))?
                    .parse::<f64>()
                    .map_err(|e| Error::Profile(format!("line {}: bad {name}: {e}", i + 1)))
            };
            let d = num("delay")?;
            let p = num("power")?;
            if fields.next().is_some() {
                return Err(Error::Profile(format!("line {}: trailing fields", i + 1)));
            }
            taps.push((d, p));
        }
        Self::from_db(&taps)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Profile(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Exponential power-delay profile sampled every high-rate sample with
    /// decay constant `rms_ds_ns`, truncated at -30 dB.
    pub fn exponential(rms_ds_ns: f64, fs_hz: f64) -> Result<Self> {
        if rms_ds_ns.is_nan() || fs_hz.is_nan() || rms_ds_ns <= 0.0 || fs_hz <= 0.0 {
            return Err(Error::Profile(
                "delay spread and rate must be positive".into(),
            ));
        }
        let ts_ns = 1e9 / fs_hz;
        let max_ns = rms_ds_ns * 30.0 * std::f64::consts::LN_10 / 10.0;
        let k_max = (max_ns / ts_ns).floor() as usize;
        let taps: Vec<(f64, f64)> = (0..=k_max)
            .map(|k| {
                let d = k as f64 * ts_ns;
                (d, -10.0 * (d / rms_ds_ns) * std::f64::consts::LOG10_E)
            })
            .collect();
        Self::from_db(&taps)
    }

    pub fn mean_delay_ns(&self) -> f64 {
        self.taps.iter().map(|t| t.power * t.delay_ns).sum()
    }

    /// Power-weighted RMS delay spread.
    pub fn rms_delay_spread_ns(&self) -> f64 {
        let m = self.mean_delay_ns();
        self.taps
            .iter()
            .map(|t| t.power * (t.delay_ns - m).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_delay_ns(&self) -> f64 {
        self.taps.last().map_or(0.0, |t| t.delay_ns)
    }

    /// Rescales all delays so the RMS delay spread equals `rms_ds_ns`.
    pub fn scaled_to(&self, rms_ds_ns: f64) -> Result<Self> {
        let cur = self.rms_delay_spread_ns();
        if cur.is_nan() || rms_ds_ns.is_nan() || cur <= 0.0 || rms_ds_ns <= 0.0 {
            return Err(Error::Profile(
                "cannot rescale a zero delay spread profile".into(),
            ));
        }
        let k = rms_ds_ns / cur;
        Ok(Self {
            taps: self
                .taps
                .iter()
                .map(|t| Tap {
                    delay_ns: t.delay_ns * k,
                    power: t.power,
                })
                .collect(),
        })
    }

    /// One Rayleigh block-fading realization on the sample grid of
    /// `fs_hz`. Taps rounding to the same sample are combined.
    pub fn realize<R: Rng + ?Sized>(&self, fs_hz: f64, rng: &mut R) -> ChannelResponse {
        let mut delays: Vec<usize> = Vec::new();
        let mut gains: Vec<Cplx> = Vec::new();
        for t in &self.taps {
            let d = (t.delay_ns * 1e-9 * fs_hz).round() as usize;
            let g = complex_gaussian(rng, t.power);
            match delays.iter().position(|&x| x == d) {
                Some(i) => gains[i] += g,
                None => {
                    delays.push(d);
                    gains.push(g);
                }
            }
        }
        ChannelResponse { delays, gains }
    }
}

/// Sparse impulse response on the high-rate grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelResponse {
    pub delays: Vec<usize>,
    pub gains: Vec<Cplx>,
}

impl ChannelResponse {
    pub fn identity() -> Self {
        Self {
            delays: vec![0],
            gains: vec![Cplx::new(1.0, 0.0)],
        }
    }

    pub fn max_delay(&self) -> usize {
        self.delays.iter().copied().max().unwrap_or(0)
    }

    /// `H[k] = sum_i g_i exp(-j 2 pi k d_i / n)` at DFT bin `k` of size `n`.
    pub fn at_bin(&self, k: usize, n: usize) -> Cplx {
        self.delays
            .iter()
            .zip(&self.gains)
            .map(|(&d, &g)| g * dft::unit_phasor(-((k * d) as i128), n as u64))
            .sum()
    }

    /// Full length-`n` frequency response.
    pub fn frequency_response(&self, n: usize) -> Vec<Cplx> {
        (0..n).map(|k| self.at_bin(k, n)).collect()
    }

    /// Linear convolution; the output keeps the input length plus the
    /// maximum delay and the input origin.
    pub fn apply(&self, w: &Waveform) -> Waveform {
        let mut out = vec![ZERO; w.len() + self.max_delay()];
        for (&d, &g) in self.delays.iter().zip(&self.gains) {
            for (o, &x) in out[d..].iter_mut().zip(&w.samples) {
                *o += g * x;
            }
        }
        Waveform {
            samples: out,
            fs_hz: w.fs_hz,
            origin: w.origin,
        }
    }
}

/// Passes `w` through one fading realization of `profile`.
pub fn tdl_channel<R: Rng + ?Sized>(
    w: &Waveform,
    profile: &TdlProfile,
    rng: &mut R,
) -> (Waveform, ChannelResponse) {
    let h = profile.realize(w.fs_hz, rng);
    (h.apply(w), h)
}

/// Delays each subband waveform by its offset (in high-rate samples) and
/// sums them in a common buffer of the longest delayed length. All inputs
/// must share the same origin, which the output keeps.
pub fn multiplex_async(waveforms: &[Waveform], offsets: &[usize]) -> Result<Waveform> {
    let first = waveforms
        .first()
        .ok_or_else(|| Error::InvalidArgument("no waveforms to multiplex".into()))?;
    if offsets.len() != waveforms.len() {
        return Err(Error::length(
            "timing offsets",
            waveforms.len(),
            offsets.len(),
        ));
    }
    if waveforms.iter().any(|w| w.origin != first.origin) {
        return Err(Error::InvalidArgument(
            "subband waveforms must share one origin".into(),
        ));
    }
    let len = waveforms
        .iter()
        .zip(offsets)
        .map(|(w, &o)| w.len() + o)
        .max()
        .unwrap_or(0);
    let mut out = vec![ZERO; len];
    for (w, &o) in waveforms.iter().zip(offsets) {
        for (d, s) in out[o..].iter_mut().zip(&w.samples) {
            *d += s;
        }
    }
    Ok(Waveform {
        samples: out,
        fs_hz: first.fs_hz,
        origin: first.origin,
    })
}

/// One-tap zero-forcing result; bins with a vanishing response are erased.
#[derive(Debug, Clone, PartialEq)]
pub struct Equalized {
    pub values: Vec<Cplx>,
    pub erased: Vec<bool>,
}

impl Equalized {
    pub fn erasures(&self) -> usize {
        self.erased.iter().filter(|&&e| e).count()
    }
}

/// Magnitude below which a channel bin counts as a null.
pub const NULL_THRESHOLD: f64 = 1e-12;

pub fn equalize(grid: &[Cplx], cfr: &[Cplx]) -> Result<Equalized> {
    if grid.len() != cfr.len() {
        return Err(Error::length("channel response", grid.len(), cfr.len()));
    }
    let mut values = Vec::with_capacity(grid.len());
    let mut erased = Vec::with_capacity(grid.len());
    for (&y, &h) in grid.iter().zip(cfr) {
        if h.norm() < NULL_THRESHOLD {
            values.push(ZERO);
            erased.push(true);
        } else {
            values.push(y / h);
            erased.push(false);
        }
    }
    Ok(Equalized { values, erased })
}
