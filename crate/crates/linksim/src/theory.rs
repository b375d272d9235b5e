//! Closed-form uncoded BER of Gray-mapped square QAM in AWGN.

use fcwave_core::qam::Modulation;
use statrs::function::erf::erfc;

/// Exact bit-error probability of Gray-coded square `M`-QAM at symbol
/// energy to noise density `es_n0` (linear), summed bit position by bit
/// position.
pub fn ber_square_qam(order: usize, es_n0: f64) -> f64 {
    let side = (order as f64).sqrt().round() as usize;
    assert!(
        side * side == order && side.is_power_of_two() && side >= 2,
        "order {order}"
    );
    let bits = side.trailing_zeros() as usize;
    let arg = (3.0 * es_n0 / (2.0 * (order as f64 - 1.0))).sqrt();
    let mut total = 0.0;
    for k in 1..=bits {
        let half = 1usize << (k - 1);
        let terms = side - side / (1 << k);
        let mut pk = 0.0;
        for i in 0..terms {
            let q = i * half / side;
            let sign = if q.is_multiple_of(2) { 1.0 } else { -1.0 };
            let weight = half as f64 - ((i * half) as f64 / side as f64 + 0.5).floor();
            pk += sign * weight * erfc((2 * i + 1) as f64 * arg);
        }
        total += pk / side as f64;
    }
    total / bits as f64
}

pub fn ber(m: Modulation, snr_db: f64) -> f64 {
    ber_square_qam(m.order(), 10f64.powf(snr_db / 10.0))
}

/// SNR in dB at which the theoretical BER falls to `target`.
pub fn snr_for_ber(m: Modulation, target: f64) -> f64 {
    let (mut lo, mut hi) = (-20.0f64, 60.0f64);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if ber(m, mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
