//! Dense-matrix reference constructions of the FC filter bank, built
//! directly from DFT, permutation, mapping and window matrices.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::PI;

pub type Mat = DMatrix<Complex64>;
pub type Vector = DVector<Complex64>;

pub fn cis(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, x)
}

/// `W[k, n] = exp(-j 2 pi k n / l)`.
pub fn dft(l: usize) -> Mat {
    Mat::from_fn(
        l,
        l,
        |k, n| cis(-2.0 * PI * ((k * n) % l) as f64 / l as f64),
    )
}

pub fn idft(l: usize) -> Mat {
    Mat::from_fn(l, l, |n, k| {
        cis(2.0 * PI * ((k * n) % l) as f64 / l as f64) / l as f64
    })
}

/// Circulant permutation `(P^(k) v)[i] = v[(i + k) mod l]`.
pub fn perm(l: usize, k: i64) -> Mat {
    let mut p = Mat::zeros(l, l);
    for i in 0..l {
        let j = (i as i64 + k).rem_euclid(l as i64) as usize;
        p[(i, j)] = Complex64::new(1.0, 0.0);
    }
    p
}

pub fn diag_real(w: &[f64]) -> Mat {
    Mat::from_fn(w.len(), w.len(), |i, j| {
        if i == j {
            Complex64::new(w[i], 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Diagonal 0/1 matrix passing indices in `[start, start + len)`.
pub fn pass(size: usize, start: usize, len: usize) -> Mat {
    let w: Vec<f64> = (0..size)
        .map(|i| {
            if i >= start && i < start + len {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    diag_real(&w)
}

/// Bin mapping `M(phi)`: shifted input bin `p` goes to long bin
/// `(c - l/2 + p) mod n`.
pub fn mapping(n: usize, l: usize, c: usize, phase: Complex64) -> Mat {
    let mut m = Mat::zeros(n, l);
    for p in 0..l {
        let q = (c as i64 - (l / 2) as i64 + p as i64).rem_euclid(n as i64) as usize;
        m[(q, p)] = phase;
    }
    m
}

/// `W_N^-1 M(phi) D P^(L/2) W_L`.
pub fn core(n: usize, l: usize, c: usize, window: &[f64], phase: Complex64) -> Mat {
    idft(n) * mapping(n, l, c, phase) * diag_real(window) * perm(l, (l / 2) as i64) * dft(l)
}

/// Overlap split of `o` samples into leading (ceil) and tailing parts.
pub fn split(o: usize) -> (usize, usize) {
    (o.div_ceil(2), o / 2)
}

/// `F^(OLA) = W_N^-1 M D P W_L A`.
pub fn f_ola(n: usize, l: usize, l_o: usize, c: usize, window: &[f64], phase: Complex64) -> Mat {
    let (l_l, _) = split(l_o);
    core(n, l, c, window, phase) * pass(l, l_l, l - l_o)
}

/// `F^(OLS) = S W_N^-1 M D P W_L`.
pub fn f_ols(n: usize, l: usize, l_o: usize, c: usize, window: &[f64], phase: Complex64) -> Mat {
    let n_o = l_o * n / l;
    let (n_l, _) = split(n_o);
    pass(n, n_l, n - n_o) * core(n, l, c, window, phase)
}

/// Analysis core `(L / N) W_L^-1 P^(-L/2) D M(phi)^H W_N`.
fn analysis_core(n: usize, l: usize, c: usize, window: &[f64], phase: Complex64) -> Mat {
    let scale = Complex64::new(l as f64 / n as f64, 0.0);
    idft(l)
        * perm(l, -((l / 2) as i64))
        * diag_real(window)
        * mapping(n, l, c, phase).adjoint()
        * dft(n)
        * scale
}

/// `G^(OLA) = (L/N) W_L^-1 P^(-L/2) D M^H W_N A_N`.
pub fn g_ola(n: usize, l: usize, l_o: usize, c: usize, window: &[f64], phase: Complex64) -> Mat {
    let n_o = l_o * n / l;
    let (n_l, _) = split(n_o);
    analysis_core(n, l, c, window, phase) * pass(n, n_l, n - n_o)
}

/// `G^(OLS) = S_L (L/N) W_L^-1 P^(-L/2) D M^H W_N`.
pub fn g_ols(n: usize, l: usize, l_o: usize, c: usize, window: &[f64], phase: Complex64) -> Mat {
    let (l_l, _) = split(l_o);
    pass(l, l_l, l - l_o) * analysis_core(n, l, c, window, phase)
}

/// Whole-signal continuous synthesis: `sqrt(I) F` acting on the padded
/// input, with blocks at input hop `L_S` and output hop `N_S`.
pub fn continuous_tx(
    n: usize,
    l: usize,
    l_o: usize,
    c: usize,
    window: &[f64],
    blocks: usize,
    ols: bool,
) -> Mat {
    let (l_s, i) = (l - l_o, n / l);
    let n_s = l_s * i;
    let rows = (blocks - 1) * n_s + n;
    let cols = (blocks - 1) * l_s + l;
    let mut f = Mat::zeros(rows, cols);
    for r in 0..blocks {
        let phase = cis(2.0 * PI * (r * c * l_s) as f64 / l as f64);
        let b = if ols {
            f_ols(n, l, l_o, c, window, phase)
        } else {
            f_ola(n, l, l_o, c, window, phase)
        };
        let mut view = f.view_mut((r * n_s, r * l_s), (n, l));
        view += b;
    }
    f * Complex64::new((i as f64).sqrt(), 0.0)
}

/// Whole-signal continuous analysis of a length-`len` high-rate input.
/// Block `r` reads samples `[r N_S - N_L, r N_S - N_L + N)` and writes
/// low-rate samples starting at `r L_S - L_L`; out-of-range samples are
/// dropped.
pub fn continuous_rx(
    n: usize,
    l: usize,
    l_o: usize,
    c: usize,
    window: &[f64],
    len: usize,
    ols: bool,
) -> Mat {
    let (l_s, i) = (l - l_o, n / l);
    let (n_s, n_o) = (l_s * i, l_o * i);
    let (l_l, _) = split(l_o);
    let (n_l, _) = split(n_o);
    let out_len = len.div_ceil(i);
    let blocks = out_len.div_ceil(l_s);
    let mut g = Mat::zeros(out_len, len);
    for r in 0..blocks {
        let start = (r * n_s) as i64 - n_l as i64;
        let phase = cis(2.0 * PI * (c as f64) * start as f64 / n as f64);
        let b = if ols {
            g_ols(n, l, l_o, c, window, phase)
        } else {
            g_ola(n, l, l_o, c, window, phase)
        };
        let low = (r * l_s) as i64 - l_l as i64;
        for row in 0..l {
            let t = low + row as i64;
            if t < 0 || t as usize >= out_len {
                continue;
            }
            for col in 0..n {
                let s = start + col as i64;
                if s < 0 || s as usize >= len {
                    continue;
                }
                g[(t as usize, s as usize)] += b[(row, col)] * (i as f64).sqrt();
            }
        }
    }
    g
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len(), "length mismatch");
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn mat_max_abs_diff(a: &Mat, b: &Mat) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn apply(m: &Mat, x: &[Complex64]) -> Vec<Complex64> {
    (m * Vector::from_column_slice(x)).iter().copied().collect()
}

/// Symbol-synchronized synthesis of one padded symbol (`3L/2` samples) into
/// `3N/2` high-rate samples. `phase` is the per-symbol rotator; block `r`
/// additionally carries `exp(j 2 pi r c L_S / L)`.
#[allow(clippy::too_many_arguments)]
pub fn sync_tx(
    n: usize,
    l: usize,
    c: usize,
    window: &[f64],
    l_cp: usize,
    n_cp: usize,
    phase: Complex64,
    ols: bool,
) -> Mat {
    let i = n / l;
    let (l_q, n_q) = (l / 4, n / 4);
    let mut f = Mat::zeros(3 * n / 2, 3 * l / 2);
    for r in 0..2 {
        let ph = phase * cis(2.0 * PI * (r * c * l / 2) as f64 / l as f64);
        let core = core(n, l, c, window, ph);
        let b = match (ols, r) {
            (false, 0) => core * pass(l, l_q - l_cp, l / 2 + l_cp),
            (false, _) => core * pass(l, l_q, l / 2),
            (true, 0) => pass(n, n_q - n_cp, n / 2 + n_cp) * core,
            (true, _) => pass(n, n_q, n / 2) * core,
        };
        let mut view = f.view_mut((r * n / 2, r * l / 2), (n, l));
        view += b;
    }
    f * Complex64::new((i as f64).sqrt(), 0.0)
}

/// Direct symbol-synchronized reception of a `3N/2` window: per-block
/// analysis, then either central-half selection `P^(+-L/4) S` (OLS) or
/// overlap-add of both blocks onto the core `[L/4, 5L/4)` (OLA), and the
/// unitary `L`-point DFT of the OFDM demodulator.
/// With OLA the first block's input window also passes the `n_cp`
/// high-rate CP samples ahead of the symbol core.
pub fn sync_rx(
    n: usize,
    l: usize,
    c: usize,
    window: &[f64],
    n_cp: usize,
    phase: Complex64,
    ols: bool,
) -> Mat {
    let i = n / l;
    let lo = l / 2;
    let sel = pass(l, l / 4, l / 2);
    let mut acc = Mat::zeros(l, 3 * n / 2);
    for r in 0..2 {
        let ph = phase * cis(2.0 * PI * (r * c * l / 2) as f64 / l as f64);
        let g = match (ols, r) {
            (true, _) => g_ols(n, l, lo, c, window, ph),
            (false, 0) => analysis_core(n, l, c, window, ph) * pass(n, n / 4 - n_cp, n / 2 + n_cp),
            (false, _) => g_ola(n, l, lo, c, window, ph),
        };
        let shift = if r == 0 {
            (l / 4) as i64
        } else {
            -((l / 4) as i64)
        };
        let keep = match (ols, r) {
            (true, _) => sel.clone(),
            (false, 0) => pass(l, l / 4, 3 * l / 4),
            (false, _) => pass(l, 0, 3 * l / 4),
        };
        let b = perm(l, shift) * keep * g * Complex64::new((i as f64).sqrt(), 0.0);
        let mut view = acc.view_mut((0, r * n / 2), (l, n));
        view += b;
    }
    dft(l) * acc * Complex64::new(1.0 / (l as f64).sqrt(), 0.0)
}

/// `Omega_phi = diag(exp(-j 2 pi phi k / l))`.
pub fn omega(l: usize, phi: i64) -> Mat {
    Mat::from_fn(l, l, |a, b| {
        if a == b {
            cis(-2.0 * PI * (phi * a as i64) as f64 / l as f64)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}
