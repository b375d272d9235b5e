//! Acceptance criteria 1-11, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so every line prints even when a
//! criterion fails. The process exits with success unless
//! `ACCEPTANCE_STRICT=1` is set, in which case any FAIL is an error.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::cell::Cell;
use std::path::PathBuf;
use std::time::Instant;

use common::dense;
use common::{random_vec, random_window};
use fcwave::emit::write_csv;
use fcwave::runner::noiseless_loopback;
use fcwave::scenario::*;
use fcwave::tables::{complexity_grid, CASES};
use fcwave::{load_scenario, run_scenario, theory};
use fcwave_core::fc::{afb_block_ola, afb_block_ols, sfb_block_ola, sfb_block_ols, tx_continuous};
use fcwave_core::metrics::{evm_db, mu};
use fcwave_core::numerology::cp_schedule;
use fcwave_core::ofdm::{Allocation, CpOfdmSignal, DcMode, QamGrid};
use fcwave_core::qam::Modulation;
use fcwave_core::sync::{
    combine_direct, cp_truncate, low_rate_cp, rx_symbol_simplified, tx_discontinuous,
};
use fcwave_core::{BlockScheme, Cplx, FcParams, Numerology, SubbandConfig};
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GRID: [(usize, usize); 4] = [(8, 32), (8, 64), (16, 32), (16, 64)];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config {
            cases,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

struct Case {
    c: usize,
    window: Vec<f64>,
    phase: Cplx,
    params: FcParams,
    cfg: SubbandConfig,
}

fn random_case(rng: &mut ChaCha8Rng, l: usize, n: usize) -> Case {
    let overlap = if rng.random_bool(0.5) { 0.5 } else { 0.25 };
    let c = rng.random_range(0..n);
    let window = random_window(rng, l);
    let phase = Cplx::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
    let params = FcParams::derive(n, l, overlap).unwrap();
    let cfg = SubbandConfig::with_window(l, n, c as i64, window.clone(), l, 0).unwrap();
    Case {
        c,
        window,
        phase,
        params,
        cfg,
    }
}

/// Runs `body` on 100 seeded cases per grid point; returns the largest
/// deviation it reported.
fn over_grid(body: impl Fn(&mut ChaCha8Rng, usize, usize) -> f64) -> f64 {
    let worst = Cell::new(0.0f64);
    for (l, n) in GRID {
        runner(100)
            .run(&proptest::num::u64::ANY, |seed| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                worst.set(worst.get().max(body(&mut rng, l, n)));
                Ok(())
            })
            .unwrap();
    }
    worst.get()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let worst = over_grid(|rng, l, n| {
        let k = random_case(rng, l, n);
        let s = Cplx::new(((n / l) as f64).sqrt(), 0.0);
        let lo = k.params.l_o;
        let x = random_vec(rng, l);
        let y = random_vec(rng, n);
        let checks = [
            (
                sfb_block_ola(&x, &k.cfg, &k.params, k.phase).unwrap(),
                dense::f_ola(n, l, lo, k.c, &k.window, k.phase) * s,
                &x,
            ),
            (
                sfb_block_ols(&x, &k.cfg, &k.params, k.phase).unwrap(),
                dense::f_ols(n, l, lo, k.c, &k.window, k.phase) * s,
                &x,
            ),
            (
                afb_block_ola(&y, &k.cfg, &k.params, k.phase).unwrap(),
                dense::g_ola(n, l, lo, k.c, &k.window, k.phase) * s,
                &y,
            ),
            (
                afb_block_ols(&y, &k.cfg, &k.params, k.phase).unwrap(),
                dense::g_ols(n, l, lo, k.c, &k.window, k.phase) * s,
                &y,
            ),
        ];
        checks
            .iter()
            .map(|(got, m, v)| dense::max_abs_diff(got, &dense::apply(m, v)))
            .fold(0.0, f64::max)
    });
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst <= 1e-10 && secs < 10.0,
        format!("max |streaming - dense| = {worst:.2e} (tol 1e-10), {secs:.2} s (limit 10 s)"),
    )
}

fn criterion_2() -> Outcome {
    let worst = over_grid(|rng, l, n| {
        let k = random_case(rng, l, n);
        let lo = k.params.l_o;
        let g = dense::g_ola(n, l, lo, k.c, &k.window, k.phase);
        let f = dense::f_ols(n, l, lo, k.c, &k.window, k.phase);
        dense::mat_max_abs_diff(&g, &f.adjoint())
    });
    outcome(
        worst <= 1e-12,
        format!("max |G_OLA - F_OLS^H| = {worst:.2e} (tol 1e-12)"),
    )
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for l in [8usize, 16, 64] {
        for _ in 0..1000 {
            let g0 = random_vec(&mut rng, l);
            let g1 = random_vec(&mut rng, l);
            let a = combine_direct(&g0, &g1).unwrap();
            let b = rx_symbol_simplified(&g0, &g1).unwrap();
            worst = worst.max(dense::max_abs_diff(&a, &b));
        }
    }
    outcome(
        worst <= 1e-10,
        format!("max |fused - direct| = {worst:.2e} over 3000 pairs (tol 1e-10)"),
    )
}

fn two_symbol_blocks(l: usize) -> (usize, usize) {
    let num = Numerology::nr_15khz(1024).unwrap();
    let sched = cp_schedule(&num, 2).unwrap();
    let interp = 1024 / l;
    let alloc = Allocation::centered(l, l / 2, DcMode::Include).unwrap();
    let grid = QamGrid::new(alloc, vec![vec![Cplx::new(1.0, 0.0); l / 2]; 2]).unwrap();
    let cfg = SubbandConfig::for_allocation(l, 1024, 100, &grid.alloc, 2).unwrap();
    let cont_sig = CpOfdmSignal::modulate(&grid, &sched.exact_low_rate(interp).unwrap()).unwrap();
    let cont = tx_continuous(
        &[cont_sig],
        std::slice::from_ref(&cfg),
        &num,
        0.5,
        BlockScheme::Ola,
    )
    .unwrap();
    let disc_sig = CpOfdmSignal::modulate(&grid, &low_rate_cp(&sched, interp)).unwrap();
    let disc = tx_discontinuous(&[disc_sig], &[cfg], &sched, &num, BlockScheme::Ola).unwrap();
    (cont.fc_blocks, disc.fc_blocks)
}

fn criterion_4() -> Outcome {
    let counts: Vec<(usize, (usize, usize))> = [128usize, 1024]
        .iter()
        .map(|&l| (l, two_symbol_blocks(l)))
        .collect();
    let pass = counts.iter().all(|(_, c)| *c == (5, 4));
    let detail = counts
        .iter()
        .map(|(l, (c, d))| format!("L={l}: continuous {c}, discontinuous {d}"))
        .collect::<Vec<_>>()
        .join("; ");
    outcome(pass, format!("{detail} (expected 5 and 4)"))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mus = (mu(128).unwrap(), mu(16).unwrap());
    let rows = complexity_grid(&Numerology::nr_15khz(1024).unwrap()).unwrap();
    let mut ok = mus == (516, 20);
    let mut notes = Vec::new();
    for case in &CASES {
        let pick = |scheme: &str| {
            rows.iter()
                .filter(|r| r.case == case.name && r.scheme == scheme)
                .map(|r| r.exact)
                .collect::<Vec<_>>()
        };
        let disc = pick("discontinuous");
        let half = pick("continuous_0.5");
        let flat = disc.len() == 14 && disc.iter().all(|v| *v == disc[0]);
        let below = disc.iter().zip(&half).all(|(d, h)| d <= h);
        ok &= flat && below;
        notes.push(format!(
            "{} disc {} vs cont0.5 slot1 {}",
            case.name, disc[0], half[0]
        ));
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < 1.0;
    outcome(
        ok,
        format!(
            "mu(128)={}, mu(16)={}; {}; {secs:.3} s",
            mus.0,
            mus.1,
            notes.join(", ")
        ),
    )
}

fn scenario(band: Band, filtering: u8) -> Scenario {
    Scenario {
        id: format!("acceptance_{band:?}_{filtering}").to_lowercase(),
        numerology: NumerologySpec::default(),
        band,
        subbands: if band.is_wide() { 1 } else { 3 },
        center_bin: 0,
        filtering,
        n_tb: None,
        channel: ChannelSpec::Awgn,
        sync: SyncSpec::Synchronous,
        modulation: ModulationSpec::Qam64,
        snr_db: vec![40.0],
        symbols: 14,
        drops: 1,
        seed: 6,
        rx_path: RxPathSpec::Direct,
    }
}

fn criterion_6() -> Outcome {
    let s = scenario(Band::Prb52, 4);
    let (sent, got) = noiseless_loopback(&s).unwrap();
    let evm = evm_db(&sent, &got).unwrap();
    outcome(
        evm >= 45.0,
        format!(
            "52 PRB, n_tb={}, discontinuous TX+RX: EVM {evm:.1} dB (need >= 45 dB)",
            s.n_tb()
        ),
    )
}

/// SNR where the measured BER crosses `target`, interpolated in log BER.
fn crossing(rows: &[(f64, f64)], target: f64) -> Option<f64> {
    rows.windows(2).find_map(|w| {
        let ((s0, b0), (s1, b1)) = (w[0], w[1]);
        (b0 >= target && b1 < target && b1 > 0.0).then(|| {
            let t = (b0.ln() - target.ln()) / (b0.ln() - b1.ln());
            s0 + t * (s1 - s0)
        })
    })
}

fn criterion_7() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for (spec, m) in [
        (ModulationSpec::Qpsk, Modulation::Qpsk),
        (ModulationSpec::Qam16, Modulation::Qam16),
        (ModulationSpec::Qam64, Modulation::Qam64),
    ] {
        let lo = (theory::snr_for_ber(m, 3e-2) * 2.0).floor() / 2.0;
        let hi = (theory::snr_for_ber(m, 1e-3) * 2.0).ceil() / 2.0;
        let mut s = scenario(Band::Prb52, 4);
        s.modulation = spec;
        s.snr_db = (0..)
            .map(|k| lo + 0.5 * k as f64)
            .take_while(|v| *v <= hi)
            .collect();
        let bits_per_drop = 624 * 14 * m.bits_per_symbol();
        s.drops = 200_000usize.div_ceil(bits_per_drop);
        s.seed = 70 + m.bits_per_symbol() as u64;
        let rows = run_scenario(&s).unwrap();
        let min_bits = rows.iter().map(|r| r.bits).min().unwrap_or(0);
        let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.snr_db, r.ber)).collect();
        let reference = theory::snr_for_ber(m, 1e-2);
        match crossing(&pts, 1e-2) {
            Some(x) => {
                let gap = x - reference;
                ok &= gap.abs() <= 0.3 && min_bits >= 200_000;
                notes.push(format!("{m:?} {gap:+.2} dB ({min_bits} bits/pt)"));
            }
            None => {
                ok = false;
                notes.push(format!("{m:?} no 1e-2 crossing"));
            }
        }
    }
    outcome(
        ok,
        format!(
            "SNR gap to theory at BER 1e-2: {} (tol 0.3 dB)",
            notes.join(", ")
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut bers = Vec::new();
    for f in 1..=6u8 {
        let mut s = scenario(Band::Prb1, f);
        s.sync = SyncSpec::Asynchronous { offset: 256 };
        s.drops = 300;
        s.seed = 80;
        bers.push(run_scenario(&s).unwrap()[0].ber);
    }
    let plain = bers[0] >= 1e-2;
    let rx_only = (1e-3..=2e-2).contains(&bers[1]);
    let tx_filtered = bers[2..].iter().all(|b| *b <= 1e-3);
    let list = bers
        .iter()
        .enumerate()
        .map(|(i, b)| format!("cfg{} {b:.2e}", i + 1))
        .collect::<Vec<_>>()
        .join(", ");
    outcome(
        plain && rx_only && tx_filtered,
        format!(
            "{list} (need cfg1 >= 1e-2 [{}], cfg2 in [1e-3, 2e-2] [{}], cfg3-6 <= 1e-3 [{}])",
            ok_word(plain),
            ok_word(rx_only),
            ok_word(tx_filtered)
        ),
    )
}

fn ok_word(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "miss"
    }
}

fn criterion_9() -> Outcome {
    let oob = |f: u8| {
        let mut s = scenario(Band::Prb1, f);
        s.modulation = ModulationSpec::Qam16;
        s.snr_db = vec![30.0];
        run_scenario(&s).unwrap()[0].oob_psd_db
    };
    let (plain, cont, disc) = (oob(1), oob(3), oob(5));
    outcome(
        plain - disc >= 20.0,
        format!(
            "one PRB beyond the edge: plain {plain:.1} dB, discontinuous L=16 {disc:.1} dB, gap {:.1} dB (need >= 20); \
             continuous L=128 {cont:.1} dB, continuous minus discontinuous {:.1} dB (not gated)",
            plain - disc,
            cont - disc
        ),
    )
}

fn criterion_10() -> Outcome {
    let table = [
        (80usize, 64usize, 1usize, 16usize),
        (80, 8, 10, 0),
        (72, 8, 9, 0),
        (80, 32, 2, 16),
        (80, 16, 5, 0),
        (72, 64, 1, 8),
    ];
    let mut ok = table
        .iter()
        .all(|&(n_cp, i, l_cp, extra)| cp_truncate(n_cp, i) == (l_cp, extra));
    let mut notes = Vec::new();
    for (l, act) in [(16usize, 12usize), (16, 8), (64, 44)] {
        let rho = common::cp_extrapolation_correlation(l, act, 2, 40, 29);
        ok &= rho >= 0.99;
        notes.push(format!("L={l}/{act} active {rho:.4}"));
    }
    outcome(
        ok,
        format!(
            "truncation table exact; CP/tail correlation {} (need >= 0.99)",
            notes.join(", ")
        ),
    )
}

fn criterion_11() -> Outcome {
    let dir = std::env::temp_dir().join(format!("fcwave-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut ok = true;
    let mut names = Vec::new();
    for name in ["prb1_awgn_async_cfg5.json", "prb4_tdlc300_async_cfg4.json"] {
        let s = load_scenario(root.join(name)).unwrap();
        let bytes = |tag: &str, threads: usize| {
            let path = dir.join(format!("{tag}.csv"));
            let rows = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| run_scenario(&s).unwrap());
            write_csv(&rows, &path).unwrap();
            std::fs::read(path).unwrap()
        };
        let a = bytes("a", 4);
        let b = bytes("b", 1);
        ok &= a == b && !a.is_empty();
        names.push(s.id);
    }
    let _ = std::fs::remove_dir_all(&dir);
    outcome(
        ok,
        format!(
            "byte-identical CSV on rerun (4 vs 1 threads): {}",
            names.join(", ")
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 11] = [
        ("streaming blocks equal dense products", criterion_1),
        ("analysis/synthesis duality", criterion_2),
        ("fused receiver equals direct path", criterion_3),
        ("FC block counts for two symbols", criterion_4),
        ("complexity model", criterion_5),
        ("52-PRB loopback EVM", criterion_6),
        ("52-PRB AWGN BER against theory", criterion_7),
        ("asynchronous 1-PRB BER ordering", criterion_8),
        ("single-PRB PSD containment", criterion_9),
        ("CP truncation and extrapolation", criterion_10),
        ("determinism", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = f();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2}: {} {name}: {} [{:.1} s]",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 && std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
