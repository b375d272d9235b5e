#![allow(dead_code)]

pub mod dense;

use fcwave_core::ofdm::{Allocation, CpOfdmSignal, DcMode, QamGrid};
use fcwave_core::qam::Modulation;
use fcwave_core::Cplx;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn random_vec<R: Rng>(rng: &mut R, len: usize) -> Vec<Cplx> {
    (0..len)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Cplx::new(re, im)
        })
        .collect()
}

pub fn random_window<R: Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.random_range(0.0..=1.0)).collect()
}

/// Plain low-rate sequence wrapped as a one-symbol CP-less signal.
pub fn raw_signal(samples: Vec<Cplx>, l_ofdm: usize) -> CpOfdmSignal {
    CpOfdmSignal {
        samples,
        l_ofdm,
        symbol_starts: vec![0],
        cp_lengths: vec![0],
    }
}

pub fn random_bits<R: Rng>(rng: &mut R, n: usize) -> Vec<u8> {
    (0..n).map(|_| rng.random_range(0..2u8)).collect()
}

/// Random QAM grid over `alloc` for `n_symbols` symbols.
pub fn random_grid<R: Rng>(
    rng: &mut R,
    alloc: &Allocation,
    n_symbols: usize,
    m: Modulation,
) -> QamGrid {
    let symbols = (0..n_symbols)
        .map(|_| {
            let bits = random_bits(rng, alloc.len() * m.bits_per_symbol());
            m.map(&bits).unwrap()
        })
        .collect();
    QamGrid::new(alloc.clone(), symbols).unwrap()
}

pub fn centered(l: usize, l_act: usize) -> Allocation {
    Allocation::centered(l, l_act, DcMode::Include).unwrap()
}

pub fn max_abs_diff(a: &[Cplx], b: &[Cplx]) -> f64 {
    dense::max_abs_diff(a, b)
}

/// Normalized correlation between the transmitted high-rate CP region of
/// each filtered symbol and the tail of the same symbol built directly at
/// the high rate. Only symbols whose CP needs extrapolation are counted;
/// the correlation is pooled over symbols after aligning each symbol's
/// common phase.
pub fn cp_extrapolation_correlation(
    l: usize,
    l_act: usize,
    n_tb: usize,
    trials: u64,
    seed: u64,
) -> f64 {
    use fcwave_core::numerology::cp_schedule;
    use fcwave_core::sync::{cp_truncate, low_rate_cp, tx_symbol};
    use fcwave_core::{BlockScheme, FcParams, Numerology, SubbandConfig};
    use rand::SeedableRng;
    use std::f64::consts::PI;

    let n = 1024;
    let i = n / l;
    let c = 612usize;
    let num = Numerology::nr_15khz(n).unwrap();
    let sched = cp_schedule(&num, 14).unwrap();
    let params = FcParams::derive(n, l, 0.5).unwrap();
    let alloc = centered(l, l_act);
    let cfg = SubbandConfig::for_allocation(l, n, c as i64, &alloc, n_tb).unwrap();
    let (mut cross, mut e_tx, mut e_ref) = (0.0, 0.0, 0.0);
    for trial in 0..trials {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed + trial);
        let grid = random_grid(&mut rng, &alloc, 14, Modulation::Qam64);
        let sig = CpOfdmSignal::modulate(&grid, &low_rate_cp(&sched, i)).unwrap();
        for k in 0..14 {
            let n_cp = sched.get(k);
            if cp_truncate(n_cp, i).1 == 0 {
                continue;
            }
            let f = tx_symbol(sig.symbol(k), &cfg, &params, k, &sched, BlockScheme::Ola).unwrap();
            let tx = &f.samples[params.n_l - n_cp..params.n_l];
            let reference: Vec<Cplx> = (n - n_cp..n)
                .map(|h| {
                    alloc
                        .offsets
                        .iter()
                        .zip(&grid.symbols[k])
                        .map(|(&o, &v)| {
                            let b = (c as i64 + o).rem_euclid(n as i64) as usize;
                            let arg = 2.0 * PI * ((b * h) % n) as f64 / n as f64;
                            v * Cplx::from_polar(1.0, arg)
                        })
                        .sum()
                })
                .collect();
            cross += tx
                .iter()
                .zip(&reference)
                .map(|(a, b)| a * b.conj())
                .sum::<Cplx>()
                .norm();
            e_tx += tx.iter().map(|v| v.norm_sqr()).sum::<f64>();
            e_ref += reference.iter().map(|v| v.norm_sqr()).sum::<f64>();
        }
    }
    cross / (e_tx * e_ref).sqrt()
}
