//! Unnormalized in-place DFTs on top of `rustfft`, with per-thread plan
//! caching so block loops and worker threads never re-plan.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::Cplx;

struct Plans {
    planner: FftPlanner<f64>,
    forward: HashMap<usize, Arc<dyn Fft<f64>>>,
    inverse: HashMap<usize, Arc<dyn Fft<f64>>>,
}

thread_local! {
    static PLANS: RefCell<Plans> = RefCell::new(Plans {
        planner: FftPlanner::new(),
        forward: HashMap::new(),
        inverse: HashMap::new(),
    });
}

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|cell| {
        let mut plans = cell.borrow_mut();
        let Plans {
            planner,
            forward,
            inverse: inv,
        } = &mut *plans;
        let map = if inverse { inv } else { forward };
        map.entry(len)
            .or_insert_with(|| {
                if inverse {
                    planner.plan_fft_inverse(len)
                } else {
                    planner.plan_fft_forward(len)
                }
            })
            .clone()
    })
}

/// `buf <- W buf`, with `W[k, n] = exp(-j 2 pi k n / len)`.
pub fn forward(buf: &mut [Cplx]) {
    if buf.len() > 1 {
        plan(buf.len(), false).process(buf);
    }
}

/// `buf <- conj(W) buf` (no `1/len` factor).
pub fn inverse(buf: &mut [Cplx]) {
    if buf.len() > 1 {
        plan(buf.len(), true).process(buf);
    }
}

/// `exp(j 2 pi num / den)` with the argument reduced modulo `den` in integer
/// arithmetic first, so large block or symbol indices lose no precision.
pub fn unit_phasor(num: i128, den: u64) -> Cplx {
    let den_i = den as i128;
    let reduced = num.rem_euclid(den_i);
    let angle = 2.0 * std::f64::consts::PI * (reduced as f64) / (den as f64);
    Cplx::from_polar(1.0, angle)
}
